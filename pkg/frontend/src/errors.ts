/** Error types surfaced by the client; each carries the service detail. */

/** Base class for everything this client throws deliberately. */
export class ClawtileError extends Error {
  override name = "ClawtileError";
}

/** The config (or a request field) failed validation; HTTP 422. */
export class ValidationError extends ClawtileError {
  override name = "ValidationError";
}

/** The session id is not (or no longer) known to the service; HTTP 404. */
export class NotFoundError extends ClawtileError {
  override name = "NotFoundError";
}

/** Another operation holds the session; HTTP 409 with a busy detail. */
export class SessionBusyError extends ClawtileError {
  override name = "SessionBusyError";
}

/**
 * The engine rejected or aborted the run (non-finite values, repeated
 * CFL reverts, dry states); HTTP 409 from an evolve. The message keeps
 * the engine's own description, including the failing step when known.
 */
export class SimulationError extends ClawtileError {
  override name = "SimulationError";
}

/** A method was called on a session after close(). */
export class SessionClosedError extends ClawtileError {
  override name = "SessionClosedError";
  constructor(id: string) {
    super(`session ${id} is closed`);
  }
}

/** A state payload or frame file is structurally invalid. */
export class FrameFormatError extends ClawtileError {
  override name = "FrameFormatError";
}

/** The service answered with a status this client has no mapping for. */
export class ServiceError extends ClawtileError {
  override name = "ServiceError";
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export function errorFromResponse(status: number, detail: string): ClawtileError {
  if (status === 422) return new ValidationError(detail);
  if (status === 404) return new NotFoundError(detail);
  if (status === 409) {
    return detail.includes("busy")
      ? new SessionBusyError(detail)
      : new SimulationError(detail);
  }
  return new ServiceError(detail, status);
}
