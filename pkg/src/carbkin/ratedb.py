"""Mineral-kinetics parameter files: parsing, validation, linting, rewriting.

The on-disk format is YAML with one table per mineral.  Two classic
pitfalls are made schema-impossible or at least lint-visible:

* every rate constant carries an explicit ``unit`` tag, normalized to
  mol/(m2 s) on parse, so decade errors from mmol/cm2 tabulations
  cannot slip through silently;
* mechanisms are keyed by name.  A legacy positional list is still
  accepted (documented order: acid, neutral, carbonate) but is flagged
  by the linter, because positional tables are exactly how mechanism
  mix-ups propagate between databases.

The linter's main check is the carbonate-mechanism activity basis: an
entry declaring ``p_co2`` runs roughly 1/KH (~29.5x at 25 degC) faster
than the same constants against a_H2CO3*.  ``rewrite_entry`` converts an
entry between bases while preserving its rates (a pure power-law
rescaling of the carbonate constant), which makes the declared basis
correct without changing behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import yaml

from .chem import AqueousModel
from .errors import FileFormatError
from .kinetics import (
    ConventionFlag,
    LogKLine,
    MechanismParams,
    PWPParameters,
    RateParameterSet,
    RateUnit,
    convert_log_rate_units,
)

RECOGNIZED_VERSIONS = (1,)
MECHANISM_NAMES = ("acid", "neutral", "carbonate")
_MECHANISM_FIELDS = {"log_k298", "unit", "E_J_mol", "n", "p", "q"}
_ENTRY_FIELDS = {
    "formula",
    "molar_mass_kg_mol",
    "log_ksp",
    "carbonate_basis",
    "mechanisms",
    "pwp",
}


@dataclass(frozen=True)
class MineralEntry:
    """One mineral's kinetic and thermodynamic parameters."""

    formula: str
    molar_mass: float  # kg/mol
    log_ksp: float
    palandri: RateParameterSet
    pwp: PWPParameters | None = None
    # provenance only: parsed from a legacy positional mechanism list
    positional_source: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.molar_mass > 0:
            raise ValueError(f"molar mass must be positive, got {self.molar_mass}")

    @property
    def is_carbonate_mineral(self) -> bool:
        return "CO3" in self.formula.upper()


@dataclass(frozen=True)
class KineticsDatabase:
    format_version: int
    minerals: dict[str, MineralEntry]


@dataclass(frozen=True)
class Finding:
    """One linter finding."""

    severity: str
    code: str
    mineral: str
    message: str

    def __str__(self):
        tag = "WARN" if self.severity == "warning" else self.severity.upper()
        return f"{tag} {self.mineral} {self.code} {self.message}"


class _StrictLoader(yaml.SafeLoader):
    """SafeLoader that rejects duplicate mapping keys instead of keeping the last."""


def _strict_mapping(loader, node, deep=False):
    mapping = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=deep)
        if key in mapping:
            raise FileFormatError(f"duplicate key {key!r}", context=key_node.start_mark)
        mapping[key] = loader.construct_object(value_node, deep=deep)
    return mapping


_StrictLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _strict_mapping
)


def _number(raw, field_name, context):
    if isinstance(raw, bool) or raw is None:
        raise FileFormatError(f"field '{field_name}' must be a number, got {raw!r}", context)
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise FileFormatError(
            f"field '{field_name}' must be a number, got {raw!r}", context
        ) from None
    if not math.isfinite(value):
        raise FileFormatError(f"field '{field_name}' must be finite", context)
    return value


def _parse_mechanism(raw, mineral, name, context):
    ctx = f"{context}: mineral '{mineral}', mechanism '{name}'"
    if not isinstance(raw, dict):
        raise FileFormatError("mechanism must be a mapping", ctx)
    missing = _MECHANISM_FIELDS - set(raw)
    if missing:
        raise FileFormatError(f"missing mechanism fields: {sorted(missing)}", ctx)
    unknown = set(raw) - _MECHANISM_FIELDS
    if unknown:
        raise FileFormatError(f"unknown mechanism fields: {sorted(unknown)}", ctx)
    try:
        unit = RateUnit.from_string(str(raw["unit"]))
    except ValueError as exc:
        raise FileFormatError(str(exc), ctx) from None
    log_k = _number(raw["log_k298"], "log_k298", ctx)
    if unit is RateUnit.MMOL_CM2_S:
        log_k = convert_log_rate_units(log_k)
    try:
        return MechanismParams(
            log_k_298=log_k,
            activation_energy=_number(raw["E_J_mol"], "E_J_mol", ctx),
            n=_number(raw["n"], "n", ctx),
            p=_number(raw["p"], "p", ctx),
            q=_number(raw["q"], "q", ctx),
        )
    except ValueError as exc:
        raise FileFormatError(str(exc), ctx) from exc


def _parse_pwp(raw, mineral, context):
    ctx = f"{context}: mineral '{mineral}', pwp"
    if not isinstance(raw, dict):
        raise FileFormatError("pwp section must be a mapping", ctx)
    expected = {"unit", "acid", "carbonate", "neutral"}
    missing = expected - set(raw)
    if missing:
        raise FileFormatError(f"missing pwp fields: {sorted(missing)}", ctx)
    unknown = set(raw) - expected
    if unknown:
        raise FileFormatError(f"unknown pwp fields: {sorted(unknown)}", ctx)
    try:
        unit = RateUnit.from_string(str(raw["unit"]))
    except ValueError as exc:
        raise FileFormatError(str(exc), ctx) from None
    lines = {}
    for name in ("acid", "carbonate", "neutral"):
        line = raw[name]
        if not isinstance(line, dict) or set(line) != {"a", "b"}:
            raise FileFormatError(
                f"pwp mechanism '{name}' must be a mapping with fields a, b", ctx
            )
        lines[name] = LogKLine(
            a=_number(line["a"], "a", ctx), b=_number(line["b"], "b", ctx)
        )
    return PWPParameters(
        acid=lines["acid"], carbonate=lines["carbonate"], neutral=lines["neutral"],
        unit=unit,
    )


def _parse_entry(name, raw, context):
    ctx = f"{context}: mineral '{name}'"
    if not isinstance(raw, dict):
        raise FileFormatError("mineral entry must be a mapping", ctx)
    if name != name.lower():
        raise FileFormatError("mineral names must be lowercase", ctx)
    missing = (_ENTRY_FIELDS - {"pwp"}) - set(raw)
    if missing:
        raise FileFormatError(f"missing fields: {sorted(missing)}", ctx)
    unknown = set(raw) - _ENTRY_FIELDS
    if unknown:
        raise FileFormatError(f"unknown fields: {sorted(unknown)}", ctx)

    try:
        basis = ConventionFlag.from_string(str(raw["carbonate_basis"]))
    except ValueError as exc:
        raise FileFormatError(str(exc), ctx) from None

    mechanisms_raw = raw["mechanisms"]
    positional = False
    if isinstance(mechanisms_raw, list):
        # Legacy positional list; documented order acid, neutral, carbonate.
        if len(mechanisms_raw) != 3:
            raise FileFormatError(
                f"positional mechanism list must have 3 entries, got {len(mechanisms_raw)}",
                ctx,
            )
        mechanisms_raw = dict(zip(MECHANISM_NAMES, mechanisms_raw))
        positional = True
    if not isinstance(mechanisms_raw, dict):
        raise FileFormatError("mechanisms must be a mapping keyed by name", ctx)
    missing_mechs = set(MECHANISM_NAMES) - set(mechanisms_raw)
    if missing_mechs:
        raise FileFormatError(
            f"missing mechanism keys: {sorted(missing_mechs)}", ctx
        )
    unknown_mechs = set(mechanisms_raw) - set(MECHANISM_NAMES)
    if unknown_mechs:
        raise FileFormatError(
            f"unknown mechanism keys: {sorted(unknown_mechs)}", ctx
        )
    mechanisms = {
        mech: _parse_mechanism(mechanisms_raw[mech], name, mech, context)
        for mech in MECHANISM_NAMES
    }

    pwp = None
    if raw.get("pwp") is not None:
        pwp = _parse_pwp(raw["pwp"], name, context)

    try:
        return MineralEntry(
            formula=str(raw["formula"]),
            molar_mass=_number(raw["molar_mass_kg_mol"], "molar_mass_kg_mol", ctx),
            log_ksp=_number(raw["log_ksp"], "log_ksp", ctx),
            palandri=RateParameterSet(
                acid=mechanisms["acid"],
                neutral=mechanisms["neutral"],
                carbonate=mechanisms["carbonate"],
                carbonate_basis=basis,
            ),
            pwp=pwp,
            positional_source=positional,
        )
    except ValueError as exc:
        raise FileFormatError(str(exc), ctx) from exc


def parse_db(path) -> KineticsDatabase:
    """Parse and fully validate a kinetics database file.

    All rate constants are normalized to mol/(m2 s).  Schema violations
    raise :class:`FileFormatError` naming the offending mineral/field.
    """
    context = str(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = yaml.load(handle, Loader=_StrictLoader)
    except FileFormatError:
        raise
    except yaml.YAMLError as exc:
        raise FileFormatError(f"invalid YAML: {exc}", context) from exc
    if not isinstance(raw, dict):
        raise FileFormatError("database must be a mapping", context)
    unknown = set(raw) - {"format_version", "minerals"}
    if unknown:
        raise FileFormatError(f"unknown top-level keys: {sorted(unknown)}", context)
    version = raw.get("format_version")
    if version not in RECOGNIZED_VERSIONS:
        raise FileFormatError(
            f"unrecognized format_version {version!r}; recognized: "
            f"{list(RECOGNIZED_VERSIONS)}",
            context,
        )
    minerals_raw = raw.get("minerals")
    if not isinstance(minerals_raw, dict) or not minerals_raw:
        raise FileFormatError("'minerals' must be a non-empty mapping", context)
    minerals = {
        str(name): _parse_entry(str(name), entry, context)
        for name, entry in minerals_raw.items()
    }
    return KineticsDatabase(format_version=int(version), minerals=minerals)


def _mechanism_dict(mech: MechanismParams) -> dict:
    return {
        "log_k298": mech.log_k_298,
        "unit": RateUnit.MOL_M2_S.value,
        "E_J_mol": mech.activation_energy,
        "n": mech.n,
        "p": mech.p,
        "q": mech.q,
    }


def serialize_db(db: KineticsDatabase) -> str:
    """Render a database back to canonical YAML (name-keyed, mol/(m2 s))."""
    doc = {"format_version": db.format_version, "minerals": {}}
    for name, entry in db.minerals.items():
        raw = {
            "formula": entry.formula,
            "molar_mass_kg_mol": entry.molar_mass,
            "log_ksp": entry.log_ksp,
            "carbonate_basis": entry.palandri.carbonate_basis.value,
            "mechanisms": {
                "acid": _mechanism_dict(entry.palandri.acid),
                "neutral": _mechanism_dict(entry.palandri.neutral),
                "carbonate": _mechanism_dict(entry.palandri.carbonate),
            },
        }
        if entry.pwp is not None:
            raw["pwp"] = {
                "unit": entry.pwp.unit.value,
                "acid": {"a": entry.pwp.acid.a, "b": entry.pwp.acid.b},
                "carbonate": {"a": entry.pwp.carbonate.a, "b": entry.pwp.carbonate.b},
                "neutral": {"a": entry.pwp.neutral.a, "b": entry.pwp.neutral.b},
            }
        doc["minerals"][name] = raw
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


def write_db(db: KineticsDatabase, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_db(db))


PCO2_BASIS = "PCO2_BASIS"
POSITIONAL_RISK = "POSITIONAL_RISK"


def lint_db(db: KineticsDatabase) -> list[Finding]:
    """Check a parsed database for the documented reporting pitfalls.

    Returns an empty list when clean.  ``PCO2_BASIS`` flags carbonate
    minerals whose carbonate-mechanism order is declared against the gas
    partial pressure; ``POSITIONAL_RISK`` flags entries that came from a
    positional mechanism list.
    """
    findings = []
    for name, entry in db.minerals.items():
        if (
            entry.is_carbonate_mineral
            and entry.palandri.carbonate_basis is ConventionFlag.PARTIAL_PRESSURE_CO2
        ):
            findings.append(
                Finding(
                    severity="warning",
                    code=PCO2_BASIS,
                    mineral=name,
                    message=(
                        "carbonate-mechanism order declared against P(CO2); "
                        "re-express order n3 against a_H2CO3* "
                        "(divide basis by KH*gamma)"
                    ),
                )
            )
        if entry.positional_source:
            findings.append(
                Finding(
                    severity="warning",
                    code=POSITIONAL_RISK,
                    mineral=name,
                    message=(
                        "mechanisms were given as a positional list; "
                        "use name-keyed mechanisms to rule out index mix-ups"
                    ),
                )
            )
    return findings


def rewrite_entry(
    entry: MineralEntry,
    target_basis: ConventionFlag,
    model: AqueousModel,
    reference_p_co2: float,
) -> MineralEntry:
    """Convert an entry's carbonate basis while preserving its rates.

    With a_H2CO3* = KH * P the carbonate term is a pure power law, so
    shifting log k by -/+ n3*log10(KH) makes both bases evaluate
    identically at every pressure; ``reference_p_co2`` anchors an
    internal consistency check of exactly that.  Returns ``entry``
    itself when the basis already matches (no-op).
    """
    current = entry.palandri.carbonate_basis
    if current is target_basis:
        return entry
    n3 = entry.palandri.carbonate.n
    if target_basis is ConventionFlag.CARBONIC_ACID_ACTIVITY:
        shift = -n3 * model.log_kh  # k_new = k_old / KH^n3
    else:
        shift = n3 * model.log_kh
    old = entry.palandri.carbonate
    new_carbonate = replace(old, log_k_298=old.log_k_298 + shift)

    # consistency anchor: both bases must produce the same carbonate term
    a_h2co3 = model.kh * reference_p_co2
    if current is ConventionFlag.PARTIAL_PRESSURE_CO2:
        before = 10.0 ** old.log_k_298 * reference_p_co2 ** n3
        after = 10.0 ** new_carbonate.log_k_298 * a_h2co3 ** n3
    else:
        before = 10.0 ** old.log_k_298 * a_h2co3 ** n3
        after = 10.0 ** new_carbonate.log_k_298 * reference_p_co2 ** n3
    if before > 0 and abs(after / before - 1.0) > 1e-9:
        raise ValueError(
            f"basis conversion changed the carbonate term at the reference "
            f"condition ({before:.6e} -> {after:.6e})"
        )

    return replace(
        entry,
        palandri=replace(
            entry.palandri, carbonate=new_carbonate, carbonate_basis=target_basis
        ),
    )
