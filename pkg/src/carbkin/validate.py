"""Compare simulated trajectories against experimental time series.

Experimental CSVs carry a ``t_s`` column plus any of ``ph`` and
``ca_molal``; blank cells are missing observations.  Simulated series
are linearly interpolated onto the experimental times before computing
RMSEs, so the experiment's sampling grid never needs to match the
simulation's.

``compare_conventions`` is the headline check: it runs the same batch
configuration under both carbonate-basis conventions and reports, per
leg, the fit against the experiment and the time to saturation, plus
their ratio.  Databases that declare the carbonate order against P(CO2)
typically come out 20-30x faster than the corrected basis.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .batch import BatchConfig, TimeSeries, integrate_batch, time_to_saturation
from .errors import FileFormatError, SaturationNotReached
from .kinetics import ConventionFlag

OBSERVABLES = ("ph", "ca_molal")


@dataclass(frozen=True)
class ExperimentSeries:
    """Measured batch observations; missing values are NaN."""

    t: np.ndarray
    columns: dict[str, np.ndarray]  # observable name -> values (NaN = missing)
    label: str = "experiment"
    source: str = ""

    def __post_init__(self):
        if len(self.t) == 0:
            raise ValueError("experiment series must contain at least one row")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("experiment time must be strictly increasing")
        if not self.columns:
            raise ValueError("experiment needs at least one observable column")

    def __len__(self):
        return len(self.t)


def load_experiment_csv(path, label: str | None = None) -> ExperimentSeries:
    """Read an experimental CSV (header ``t_s`` plus ``ph`` and/or ``ca_molal``).

    Lines starting with ``#`` are comments.  Raises
    :class:`FileFormatError` with row context for unsorted times,
    malformed numbers, or a missing observable column.
    """
    context = str(path)
    with open(path, "r", encoding="utf-8") as handle:
        lines = [
            (lineno, line)
            for lineno, line in enumerate(handle, start=1)
            if line.strip() and not line.lstrip().startswith("#")
        ]
    if not lines:
        raise FileFormatError("empty file", context)
    reader = csv.reader(line for _, line in lines)
    header = [cell.strip() for cell in next(reader)]
    if not header or header[0] != "t_s":
        raise FileFormatError("first column must be 't_s'", context)
    observables = [name for name in header[1:] if name in OBSERVABLES]
    unknown = [name for name in header[1:] if name not in OBSERVABLES]
    if unknown:
        raise FileFormatError(
            f"unknown columns {unknown}; expected subset of {list(OBSERVABLES)}",
            context,
        )
    if not observables:
        raise FileFormatError("no observable column (need 'ph' or 'ca_molal')", context)

    times = []
    data = {name: [] for name in observables}
    for (lineno, _), row in zip(lines[1:], reader):
        if len(row) != len(header):
            raise FileFormatError(
                f"row {lineno}: expected {len(header)} fields, got {len(row)}", context
            )
        try:
            t = float(row[0])
        except ValueError:
            raise FileFormatError(
                f"row {lineno}: malformed time {row[0]!r}", context
            ) from None
        if times and t <= times[-1]:
            raise FileFormatError(
                f"row {lineno}: time {t} not increasing (previous {times[-1]})",
                context,
            )
        times.append(t)
        for name, cell in zip(header[1:], row[1:]):
            cell = cell.strip()
            if cell == "":
                value = math.nan
            else:
                try:
                    value = float(cell)
                except ValueError:
                    raise FileFormatError(
                        f"row {lineno}: malformed number {cell!r} in column '{name}'",
                        context,
                    ) from None
            data[name].append(value)

    return ExperimentSeries(
        t=np.asarray(times, dtype=float),
        columns={name: np.asarray(values, dtype=float) for name, values in data.items()},
        label=label if label is not None else "experiment",
        source=context,
    )


def _sim_column(sim: TimeSeries, column: str) -> np.ndarray:
    if column == "ph":
        return sim.ph
    if column == "ca_molal":
        return sim.ca_molality
    raise ValueError(f"unknown observable {column!r}; expected one of {OBSERVABLES}")


def aligned_rmse(sim: TimeSeries, exp: ExperimentSeries, column: str) -> float:
    """RMSE of the simulation against one experimental observable.

    The simulated column is linearly interpolated onto the experimental
    times; missing observations are skipped.  Experimental times outside
    the simulated range raise ValueError listing them.
    """
    if column not in exp.columns:
        raise ValueError(f"experiment has no '{column}' column")
    outside = exp.t[(exp.t < sim.t[0]) | (exp.t > sim.t[-1])]
    if len(outside):
        raise ValueError(
            f"experimental times outside simulated range "
            f"[{sim.t[0]:g}, {sim.t[-1]:g}]: {outside.tolist()}"
        )
    observed = exp.columns[column]
    mask = ~np.isnan(observed)
    if not np.any(mask):
        raise ValueError(f"no non-missing observations in column '{column}'")
    predicted = np.interp(exp.t[mask], sim.t, _sim_column(sim, column))
    residuals = predicted - observed[mask]
    return float(np.sqrt(np.mean(residuals ** 2)))


def aligned_residuals(sim: TimeSeries, exp: ExperimentSeries, column: str) -> np.ndarray:
    """Per-observation residuals sim - exp on the experimental grid (NaN kept)."""
    predicted = np.interp(exp.t, sim.t, _sim_column(sim, column))
    return predicted - exp.columns[column]


def experiment_saturation_time(
    exp: ExperimentSeries, threshold: float = 0.99
) -> float:
    """Saturation time inferred from the experimental calcium plateau.

    The plateau is the maximum observed calcium; it counts as a plateau
    only if the last 10% of observations sit within 1% of it.  Returns
    the first (interpolated) time calcium reaches ``threshold`` times
    the plateau.
    """
    if "ca_molal" not in exp.columns:
        raise ValueError("experiment has no 'ca_molal' column")
    ca = exp.columns["ca_molal"]
    mask = ~np.isnan(ca)
    times = exp.t[mask]
    values = ca[mask]
    if len(values) < 3:
        raise ValueError("too few calcium observations to locate a plateau")
    plateau = float(np.max(values))
    # last 10% of points (at least two, so a pure ramp never "plateaus")
    tail_count = max(2, -(-len(values) // 10))
    tail = values[-tail_count:]
    if np.any(np.abs(tail - plateau) > 0.01 * plateau):
        raise SaturationNotReached(threshold, float(values[-1] / plateau))
    target = threshold * plateau
    if values[0] >= target:
        return float(times[0])
    above = np.nonzero(values >= target)[0]
    if len(above) == 0:
        raise SaturationNotReached(threshold, float(np.max(values) / plateau))
    i = int(above[0])
    frac = (target - values[i - 1]) / (values[i] - values[i - 1])
    return float(times[i - 1] + frac * (times[i] - times[i - 1]))


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of running one config under both carbonate-basis conventions."""

    rmse_ph: dict[str, float]  # basis value -> RMSE (NaN if column absent)
    rmse_ca: dict[str, float]
    time_to_saturation_sim: dict[str, float]  # basis value -> t_sat, s
    timescale_ratio: float  # t_sat(h2co3_activity) / t_sat(p_co2)
    residuals: dict[str, dict[str, np.ndarray]]  # basis -> column -> residuals
    t_sat_experiment: float | None
    series: dict[str, TimeSeries]
    experiment: ExperimentSeries

    def metric_rows(self) -> list[tuple[str, float]]:
        """Flat (metric, value) pairs for the report CSV."""
        rows = []
        for basis in _BASES:
            rows.append((f"rmse_ph_{basis}", self.rmse_ph[basis]))
            rows.append((f"rmse_ca_{basis}", self.rmse_ca[basis]))
            rows.append((f"t_sat_s_{basis}", self.time_to_saturation_sim[basis]))
        rows.append(("timescale_ratio", self.timescale_ratio))
        rows.append(
            (
                "t_sat_s_experiment",
                math.nan if self.t_sat_experiment is None else self.t_sat_experiment,
            )
        )
        return rows


_BASES = (
    ConventionFlag.CARBONIC_ACID_ACTIVITY.value,
    ConventionFlag.PARTIAL_PRESSURE_CO2.value,
)


def _extend_equilibrated(sim: TimeSeries, t_target: float) -> TimeSeries:
    """Pad an equilibrated series with its (constant) final state.

    A run that stopped on the equilibration rule holds its final
    composition indefinitely, so extending it to cover later
    experimental times is exact, not extrapolation.
    """
    if sim.status != "equilibrated" or t_target <= sim.t[-1]:
        return sim
    return TimeSeries(
        t=np.append(sim.t, t_target),
        mineral_moles=np.append(sim.mineral_moles, sim.mineral_moles[-1]),
        ca_molality=np.append(sim.ca_molality, sim.ca_molality[-1]),
        ph=np.append(sim.ph, sim.ph[-1]),
        a_h2co3=np.append(sim.a_h2co3, sim.a_h2co3[-1]),
        omega=np.append(sim.omega, sim.omega[-1]),
        rate=np.append(sim.rate, sim.rate[-1]),
        status=sim.status,
    )


def compare_conventions(config: BatchConfig, exp: ExperimentSeries) -> ComparisonReport:
    """Run ``config`` under both carbonate bases and score each against ``exp``.

    All other inputs are held identical between the two legs, so any
    difference in the report is attributable to the declared basis
    alone.  Legs that equilibrate before the last experimental time are
    padded with their constant final state.
    """
    t_last = float(exp.t[-1])
    series = {}
    for basis in (
        ConventionFlag.CARBONIC_ACID_ACTIVITY,
        ConventionFlag.PARTIAL_PRESSURE_CO2,
    ):
        sim = integrate_batch(replace(config, basis_override=basis))
        series[basis.value] = _extend_equilibrated(sim, t_last)

    rmse_ph = {}
    rmse_ca = {}
    t_sat = {}
    residuals = {}
    for basis, sim in series.items():
        rmse_ph[basis] = (
            aligned_rmse(sim, exp, "ph") if "ph" in exp.columns else math.nan
        )
        rmse_ca[basis] = (
            aligned_rmse(sim, exp, "ca_molal") if "ca_molal" in exp.columns else math.nan
        )
        t_sat[basis] = time_to_saturation(sim)
        residuals[basis] = {
            column: aligned_residuals(sim, exp, column) for column in exp.columns
        }

    try:
        t_sat_exp = (
            experiment_saturation_time(exp) if "ca_molal" in exp.columns else None
        )
    except (SaturationNotReached, ValueError):
        t_sat_exp = None

    ratio = (
        t_sat[ConventionFlag.CARBONIC_ACID_ACTIVITY.value]
        / t_sat[ConventionFlag.PARTIAL_PRESSURE_CO2.value]
    )
    report = ComparisonReport(
        rmse_ph=rmse_ph,
        rmse_ca=rmse_ca,
        time_to_saturation_sim=t_sat,
        timescale_ratio=ratio,
        residuals=residuals,
        t_sat_experiment=t_sat_exp,
        series=series,
        experiment=exp,
    )
    _check_report(report)
    return report


def _check_report(report: ComparisonReport) -> None:
    for basis in _BASES:
        for table in (report.rmse_ph, report.rmse_ca):
            value = table[basis]
            if not (math.isnan(value) or value >= 0):
                raise ValueError(f"negative RMSE for basis {basis}")
        if not report.time_to_saturation_sim[basis] >= 0:
            raise ValueError(f"negative saturation time for basis {basis}")
    if not report.timescale_ratio > 0:
        raise ValueError("timescale ratio must be positive")


def write_report_csv(report: ComparisonReport, path) -> None:
    """metric,value rows; NaN prints as 'nan'."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("metric,value\n")
        for metric, value in report.metric_rows():
            handle.write(f"{metric},{value:.9e}\n")


def write_aligned_csv(report: ComparisonReport, path) -> None:
    """Experiment and both simulation legs interpolated onto the experiment grid."""
    exp = report.experiment
    columns: list[tuple[str, np.ndarray]] = [("t_s", exp.t)]
    for observable in OBSERVABLES:
        if observable not in exp.columns:
            continue
        for basis in _BASES:
            sim = report.series[basis]
            columns.append(
                (
                    f"sim_{observable}_{basis}",
                    np.interp(exp.t, sim.t, _sim_column(sim, observable)),
                )
            )
        columns.append((f"exp_{observable}", exp.columns[observable]))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(name for name, _ in columns) + "\n")
        for i in range(len(exp.t)):
            handle.write(",".join(f"{values[i]:.9e}" for _, values in columns) + "\n")
