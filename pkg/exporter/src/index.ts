export { runExport, listFrames, ExportJob, ExportResult } from "./export.js";
export {
  encodeSidecar,
  decodeSidecar,
  formatDetRow,
  unitNormalize,
  SIDECAR_MAGIC,
  DetectionBox,
  SidecarRecord,
} from "./formats.js";
export { readNetpbm, encodePgm, GrayImage } from "./image.js";
export {
  getDetector,
  getEmbedder,
  lumaBlobDetector,
  patchHistogramEmbedder,
  Detector,
  Embedder,
} from "./models.js";
