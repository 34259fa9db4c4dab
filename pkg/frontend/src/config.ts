/**
 * Config mappings and their INI rendering.
 *
 * The service accepts plain INI text; a structured mapping is just a
 * convenience on this side.  Semantic validation (known sections, keys,
 * value ranges) is the engine's job and its messages come back verbatim
 * in a ValidationError, so this module only enforces shape.
 */

import { z } from "zod";
import { ValidationError } from "./errors.js";

const scalar = z.union([z.string(), z.number(), z.boolean()]);

const sectionSchema = z.record(
  z.string().regex(/^[a-z][a-z0-9_]*$/, "keys are lowercase words"),
  z.union([scalar, z.array(scalar).nonempty()]),
);

export const configMappingSchema = z.record(
  z.string().regex(/^[a-z][a-z0-9_]*$/, "section names are lowercase words"),
  sectionSchema,
);

export type ConfigMapping = z.infer<typeof configMappingSchema>;

function renderValue(value: string | number | boolean): string {
  if (typeof value === "boolean") return value ? "true" : "false";
  // schema validation already rejects NaN and infinities
  if (typeof value === "number") return String(value);
  if (value.includes("\n")) {
    throw new ValidationError("config values cannot contain newlines");
  }
  return value;
}

/** Render a mapping as INI text the service will accept. */
export function renderConfig(mapping: ConfigMapping): string {
  const parsed = configMappingSchema.safeParse(mapping);
  if (!parsed.success) {
    throw new ValidationError(`bad config mapping: ${parsed.error.message}`);
  }
  const lines: string[] = [];
  for (const [section, entries] of Object.entries(parsed.data)) {
    lines.push(`[${section}]`);
    for (const [key, value] of Object.entries(entries)) {
      const text = Array.isArray(value)
        ? value.map(renderValue).join(" ")
        : renderValue(value);
      lines.push(`${key} = ${text}`);
    }
    lines.push("");
  }
  return lines.join("\n");
}
