/**
 * Client for the solver service: create a session, evolve it to target
 * times, and pull the state back as typed arrays.  Every result is
 * produced by the engine; nothing numerical happens on this side.
 */

import { z } from "zod";
import { ConfigMapping, renderConfig } from "./config.js";
import {
  ClawtileError,
  SessionClosedError,
  ServiceError,
  errorFromResponse,
} from "./errors.js";
import { Frame, StateArray, parseFrame } from "./frame.js";

const sessionInfoSchema = z.object({
  session_id: z.string().min(1),
  problem: z.string(),
  ndim: z.number().int().min(1).max(3),
  cells: z.array(z.number().int().positive()),
  num_states: z.number().int().positive(),
  precision: z.enum(["single", "double"]),
  time: z.number(),
  steps_accepted: z.number().int().nonnegative(),
  steps_reverted: z.number().int().nonnegative(),
});

const evolveSchema = z.object({
  time: z.number(),
  steps_accepted: z.number().int().nonnegative(),
  steps_reverted: z.number().int().nonnegative(),
  nu_max: z.number(),
});

const healthSchema = z.object({ status: z.string(), version: z.string() });

export interface SessionInfo {
  sessionId: string;
  problem: string;
  ndim: number;
  cells: number[];
  numStates: number;
  precision: "single" | "double";
  time: number;
  stepsAccepted: number;
  stepsReverted: number;
}

export interface StepReport {
  /** Session time after the call. */
  time: number;
  stepsAccepted: number;
  stepsReverted: number;
  nuMax: number;
}

export interface SessionState {
  time: number;
  step: number;
  dims: readonly number[];
  /** One flat x-fastest array per state variable; copies, safe to keep. */
  states: readonly StateArray[];
}

export interface CreateOptions {
  workers?: number;
  tiles?: string;
  serial?: boolean;
}

export interface ClientOptions {
  baseUrl: string;
  /** Override for environments without a global fetch. */
  fetchImpl?: typeof fetch;
}

function toInfo(raw: z.infer<typeof sessionInfoSchema>): SessionInfo {
  return {
    sessionId: raw.session_id,
    problem: raw.problem,
    ndim: raw.ndim,
    cells: raw.cells,
    numStates: raw.num_states,
    precision: raw.precision,
    time: raw.time,
    stepsAccepted: raw.steps_accepted,
    stepsReverted: raw.steps_reverted,
  };
}

async function raiseFor(resp: Response): Promise<never> {
  let detail = `${resp.status} ${resp.statusText}`;
  try {
    const body = (await resp.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
    else if (body.detail !== undefined) detail = JSON.stringify(body.detail);
  } catch {
    // non-JSON error body; keep the status line
  }
  throw errorFromResponse(resp.status, detail);
}

export class ClawtileClient {
  private readonly base: string;
  private readonly fetch: typeof fetch;

  constructor(options: ClientOptions) {
    this.base = options.baseUrl.replace(/\/+$/, "");
    this.fetch = options.fetchImpl ?? globalThis.fetch;
    if (typeof this.fetch !== "function") {
      throw new ClawtileError("no fetch implementation available");
    }
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetch(`${this.base}${path}`, init);
    if (!resp.ok) await raiseFor(resp);
    return resp;
  }

  private async requestJson<T>(
    path: string,
    schema: z.ZodType<T>,
    init?: RequestInit,
  ): Promise<T> {
    const resp = await this.request(path, init);
    const parsed = schema.safeParse(await resp.json());
    if (!parsed.success) {
      throw new ServiceError(
        `malformed service response for ${path}: ${parsed.error.message}`,
        resp.status,
      );
    }
    return parsed.data;
  }

  async health(): Promise<{ status: string; version: string }> {
    return this.requestJson("/healthz", healthSchema);
  }

  /**
   * Create a solver session from INI config text or a structured
   * mapping.  Validation runs engine-side under the same rules as the
   * CLI; failures throw ValidationError with the engine's message.
   */
  async createSession(
    config: string | ConfigMapping,
    options: CreateOptions = {},
  ): Promise<Session> {
    const configText = typeof config === "string" ? config : renderConfig(config);
    const body: Record<string, unknown> = { config_text: configText };
    if (options.workers !== undefined) body.workers = options.workers;
    if (options.tiles !== undefined) body.tiles = options.tiles;
    if (options.serial !== undefined) body.serial = options.serial;
    const raw = await this.requestJson("/sessions", sessionInfoSchema, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return new Session(this, raw.session_id, toInfo(raw));
  }

  /** @internal shared by Session methods */
  async _request(path: string, init?: RequestInit): Promise<Response> {
    return this.request(path, init);
  }

  /** @internal shared by Session methods */
  async _requestJson<T>(path: string, schema: z.ZodType<T>, init?: RequestInit): Promise<T> {
    return this.requestJson(path, schema, init);
  }
}

export class Session {
  #closed = false;

  constructor(
    private readonly client: ClawtileClient,
    readonly id: string,
    /** Metadata captured at creation; time advances engine-side. */
    readonly created: SessionInfo,
  ) {}

  get closed(): boolean {
    return this.#closed;
  }

  private guard(): void {
    if (this.#closed) throw new SessionClosedError(this.id);
  }

  /** Current metadata, including session time and step counts. */
  async info(): Promise<SessionInfo> {
    this.guard();
    const raw = await this.client._requestJson(
      `/sessions/${this.id}`,
      sessionInfoSchema,
    );
    return toInfo(raw);
  }

  /** Advance to tTarget (engine rejects targets behind the session). */
  async evolve(tTarget: number): Promise<StepReport> {
    this.guard();
    const raw = await this.client._requestJson(
      `/sessions/${this.id}/evolve`,
      evolveSchema,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ t_target: tTarget }),
      },
    );
    return {
      time: raw.time,
      stepsAccepted: raw.steps_accepted,
      stepsReverted: raw.steps_reverted,
      nuMax: raw.nu_max,
    };
  }

  /** Raw state frame, byte-identical to a frame the CLI writes. */
  async stateBytes(): Promise<Uint8Array> {
    this.guard();
    const resp = await this.client._request(`/sessions/${this.id}/state`);
    return new Uint8Array(await resp.arrayBuffer());
  }

  /** Parsed state: per-variable arrays plus the current time. */
  async state(): Promise<SessionState> {
    const frame: Frame = parseFrame(await this.stateBytes());
    return {
      time: frame.header.time,
      step: frame.header.step,
      dims: frame.header.dims,
      states: frame.states,
    };
  }

  /** Free the engine-side session; further calls fail cleanly. */
  async close(): Promise<void> {
    if (this.#closed) return;
    await this.client._request(`/sessions/${this.id}`, { method: "DELETE" });
    this.#closed = true;
  }
}
