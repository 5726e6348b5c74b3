export { CsvError, readColumnSeries, type Series } from "./csv.js";
export {
  loadSeries,
  renderComparison,
  writeComparison,
  type Observable,
  type PlotSpec,
  type SeriesInput,
} from "./figure.js";
export { linearScale, logScale, tickLabel } from "./scale.js";
export { main, parseArgs, UsageError } from "./cli.js";
