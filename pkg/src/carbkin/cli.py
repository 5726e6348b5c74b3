"""Command-line interface.

Subcommands::

    carbkin speciate  --p-co2 X | --carbon-total X  [--ca-total X] [--model F]
    carbkin batch     --config F [--db F] [--basis B] --out CSV
    carbkin validate  --config F [--db F] --experiment CSV --out-dir DIR
    carbkin lintdb    --db F [--fix --out F] [--model F] [--ref-p-co2 X]

Exit codes: 0 success (and clean lint), 1 lint findings, 2 on any error.
The environment variable CARBKIN_DB overrides the default database path
(the packaged calcite.default).  All file output is deterministic:
identical inputs produce byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import batch as batchmod
from . import ratedb, validate
from .chem import AqueousModel, load_model, speciate_closed, speciate_open
from .errors import CarbkinError, SaturationNotReached
from .kinetics import ConventionFlag


@dataclass
class RunManifest:
    """Execution record printed to stderr after file-writing subcommands."""

    subcommand: str
    config_path: str | None
    database_path: str | None
    output_dir: str | None
    exit_status: int
    wall_time_s: float

    def emit(self) -> None:
        print(
            f"[carbkin {self.subcommand}] config={self.config_path or '-'} "
            f"db={self.database_path or '-'} out={self.output_dir or '-'} "
            f"status={self.exit_status} wall_time_s={self.wall_time_s:.3f}",
            file=sys.stderr,
        )


def default_db_path() -> str:
    env = os.environ.get("CARBKIN_DB")
    if env:
        return env
    return str(resources.files("carbkin").joinpath("data/calcite.default"))


def _load_model_arg(path: str | None) -> AqueousModel:
    return load_model(path) if path else AqueousModel()


def cmd_speciate(args) -> int:
    if args.p_co2 is None and args.carbon_total is None:
        raise SystemExit2("one of --p-co2 or --carbon-total is required")
    if args.p_co2 is not None and args.carbon_total is not None:
        raise SystemExit2("--p-co2 and --carbon-total are mutually exclusive")
    model = _load_model_arg(args.model)
    if args.p_co2 is not None:
        state = speciate_open(model, args.p_co2, args.ca_total)
    else:
        state = speciate_closed(model, args.carbon_total, args.ca_total)
    print(f"{'species':<10} {'molality_mol_kg':>18} {'activity':>18}")
    for species in state.molalities:
        print(
            f"{species:<10} {state.molalities[species]:>18.9e} "
            f"{state.activities[species]:>18.9e}"
        )
    print(f"ph = {state.ph:.6f}")
    print(f"ionic_strength_mol_kg = {state.ionic_strength:.9e}")
    print(f"omega = {state.omega:.9e}")
    return 0


def cmd_batch(args) -> int:
    db = ratedb.parse_db(args.db)
    config = batchmod.load_batch_config(args.config, db, basis=args.basis)
    series = batchmod.integrate_batch(config)
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True)
    series.to_csv(out)
    try:
        t_sat = batchmod.time_to_saturation(series)
        print(f"t_sat_s={t_sat:.9e}")
    except SaturationNotReached as exc:
        print("t_sat_s=nan")
        print(f"saturation not reached: {exc}", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    db = ratedb.parse_db(args.db)
    config = batchmod.load_batch_config(args.config, db)
    experiment = validate.load_experiment_csv(args.experiment)
    report = validate.compare_conventions(config, experiment)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    validate.write_report_csv(report, out_dir / "report.csv")
    validate.write_aligned_csv(report, out_dir / "aligned.csv")
    print(f"timescale_ratio={report.timescale_ratio:.9e}")
    return 0


def cmd_lintdb(args) -> int:
    db = ratedb.parse_db(args.db)
    findings = ratedb.lint_db(db)
    for finding in findings:
        print(str(finding))
    if args.fix:
        if not args.out:
            raise SystemExit2("--fix requires --out")
        model = _load_model_arg(args.model)
        fixed = {}
        for name, entry in db.minerals.items():
            fixed[name] = ratedb.rewrite_entry(
                entry,
                ConventionFlag.CARBONIC_ACID_ACTIVITY,
                model,
                args.ref_p_co2,
            )
        ratedb.write_db(
            ratedb.KineticsDatabase(db.format_version, fixed), args.out
        )
    return 1 if findings else 0


class SystemExit2(CarbkinError):
    """Usage-level error that should exit with status 2."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carbkin",
        description="Carbonate mineral dissolution kinetics toolkit",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_spec = sub.add_parser("speciate", help="equilibrium speciation to stdout")
    p_spec.add_argument("--p-co2", type=float, default=None,
                        help="CO2 partial pressure, atm (open system)")
    p_spec.add_argument("--carbon-total", type=float, default=None,
                        help="total dissolved carbon, mol/kg (closed system)")
    p_spec.add_argument("--ca-total", type=float, default=0.0,
                        help="total dissolved calcium, mol/kg")
    p_spec.add_argument("--model", default=None, help="aqueous model file")
    p_spec.set_defaults(func=cmd_speciate)

    p_batch = sub.add_parser("batch", help="run a batch dissolution simulation")
    p_batch.add_argument("--config", required=True, help="batch config file")
    p_batch.add_argument("--db", default=default_db_path(),
                         help="kinetics database (default: CARBKIN_DB or packaged)")
    p_batch.add_argument(
        "--basis",
        choices=["h2co3_activity", "p_co2", "from-db"],
        default=None,
        help="carbonate-mechanism basis override",
    )
    p_batch.add_argument("--out", required=True, help="output CSV path")
    p_batch.set_defaults(func=cmd_batch)

    p_val = sub.add_parser("validate", help="compare both conventions to experiment")
    p_val.add_argument("--config", required=True)
    p_val.add_argument("--db", default=default_db_path())
    p_val.add_argument("--experiment", required=True, help="experimental CSV")
    p_val.add_argument("--out-dir", required=True)
    p_val.set_defaults(func=cmd_validate)

    p_lint = sub.add_parser("lintdb", help="lint a kinetics database")
    p_lint.add_argument("--db", required=True)
    p_lint.add_argument("--fix", action="store_true",
                        help="write a rate-preserving corrected database")
    p_lint.add_argument("--out", default=None, help="output path for --fix")
    p_lint.add_argument("--model", default=None,
                        help="aqueous model file (Henry constant for --fix)")
    p_lint.add_argument("--ref-p-co2", type=float, default=0.97,
                        help="reference pressure anchoring the basis conversion")
    p_lint.set_defaults(func=cmd_lintdb)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        status = args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except (CarbkinError, OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.subcommand in ("batch", "validate"):
        RunManifest(
            subcommand=args.subcommand,
            config_path=getattr(args, "config", None),
            database_path=getattr(args, "db", None),
            output_dir=getattr(args, "out", None) or getattr(args, "out_dir", None),
            exit_status=status,
            wall_time_s=time.monotonic() - started,
        ).emit()
    return status


if __name__ == "__main__":
    sys.exit(main())
