export {
  ClawtileClient,
  Session,
  type ClientOptions,
  type CreateOptions,
  type SessionInfo,
  type SessionState,
  type StepReport,
} from "./client.js";
export { renderConfig, configMappingSchema, type ConfigMapping } from "./config.js";
export {
  ClawtileError,
  FrameFormatError,
  NotFoundError,
  ServiceError,
  SessionBusyError,
  SessionClosedError,
  SimulationError,
  ValidationError,
} from "./errors.js";
export {
  cellIndex,
  parseFrame,
  type Frame,
  type FrameHeader,
  type StateArray,
} from "./frame.js";
