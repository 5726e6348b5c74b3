"""Aqueous chemistry of the CO2-H2O-CaCO3 system.

Species set: H+, OH-, H2CO3* (lumped CO2(aq) + true carbonic acid), HCO3-,
CO3-2, Ca+2.  Homogeneous equilibria (as activities):

    H2CO3*  <=> H+ + HCO3-      K1
    HCO3-   <=> H+ + CO3-2      K2
    H2O     <=> H+ + OH-        Kw
    CO2(g)  <=> H2CO3*          a_H2CO3* = KH * P(CO2)     [Henry]

Speciation is solved on the electroneutrality (charge-balance) equation
with a Newton iteration on log10(a_H+) and an outer fixed-point loop for
the Davies activity coefficients.  Neutral species carry unit activity
coefficient; water activity is taken as 1 (dilute solutions).

Default equilibrium constants are standard 25 degC handbook values; runs
at any other temperature require a user-supplied model file with all
log K values for that temperature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import yaml

from .errors import ConvergenceError, FileFormatError

SPECIES = ("H+", "OH-", "H2CO3*", "HCO3-", "CO3-2", "Ca+2")

CHARGES = {
    "H+": 1,
    "OH-": -1,
    "H2CO3*": 0,
    "HCO3-": -1,
    "CO3-2": -2,
    "Ca+2": 2,
}

# Solver tolerances (see SpeciationState notes): charge-balance residual in
# mol/kg, activity-coefficient fixed-point change, iteration caps.
CHARGE_TOL = 1.0e-12
GAMMA_TOL = 1.0e-10
MAX_ITER = 100

_MODEL_KEYS = (
    "temperature_K",
    "log_k1",
    "log_k2",
    "log_kw",
    "log_kh",
    "log_ksp",
    "debye_a",
)


@dataclass(frozen=True)
class AqueousModel:
    """Equilibrium constants and activity-model parameters at one temperature.

    Attributes
    ----------
    temperature : float
        Kelvin.
    log_k1, log_k2 : float
        log10 of the first and second carbonic-acid dissociation constants.
    log_kw : float
        log10 of the water ion product.
    log_kh : float
        log10 of the Henry constant, a_H2CO3* = 10**log_kh * P(CO2) [atm].
    log_ksp : float
        log10 of the calcite solubility product.
    debye_a : float
        Debye-Hueckel A parameter, (kg/mol)**0.5.
    """

    temperature: float = 298.15
    log_k1: float = -6.35
    log_k2: float = -10.33
    log_kw: float = -14.00
    log_kh: float = -1.47
    log_ksp: float = -8.48
    debye_a: float = 0.5092

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        for name in ("log_k1", "log_k2", "log_kw", "log_kh", "log_ksp", "debye_a"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.log_k2 < self.log_k1:
            raise ValueError(
                "second dissociation must be weaker than the first "
                f"(log_k2={self.log_k2} >= log_k1={self.log_k1})"
            )

    @property
    def k1(self) -> float:
        return 10.0 ** self.log_k1

    @property
    def k2(self) -> float:
        return 10.0 ** self.log_k2

    @property
    def kw(self) -> float:
        return 10.0 ** self.log_kw

    @property
    def kh(self) -> float:
        return 10.0 ** self.log_kh

    @property
    def ksp(self) -> float:
        return 10.0 ** self.log_ksp

    @classmethod
    def from_mapping(cls, mapping, context: str = "model") -> "AqueousModel":
        """Build a model from a key -> number mapping; absent keys keep defaults."""
        if not isinstance(mapping, dict):
            raise FileFormatError("model section must be a mapping", context)
        unknown = set(mapping) - set(_MODEL_KEYS)
        if unknown:
            raise FileFormatError(
                f"unknown model keys: {sorted(unknown)}; allowed: {list(_MODEL_KEYS)}",
                context,
            )
        kwargs = {}
        for key, value in mapping.items():
            target = "temperature" if key == "temperature_K" else key
            kwargs[target] = _as_number(value, key, context)
        try:
            return cls(**kwargs)
        except ValueError as exc:
            raise FileFormatError(str(exc), context) from exc


def load_model(path) -> AqueousModel:
    """Load an :class:`AqueousModel` from a YAML key -> number file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle)
    except yaml.YAMLError as exc:
        raise FileFormatError(f"invalid YAML: {exc}", str(path)) from exc
    if raw is None:
        raw = {}
    return AqueousModel.from_mapping(raw, context=str(path))


def _as_number(value, key, context):
    # YAML 1.1 reads bare "1e-8" as a string; accept numeric strings too.
    if isinstance(value, bool) or value is None:
        raise FileFormatError(f"field '{key}' must be a number, got {value!r}", context)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise FileFormatError(
            f"field '{key}' must be a number, got {value!r}", context
        ) from None


@dataclass(frozen=True)
class SpeciationState:
    """Self-consistent aqueous state returned by the speciation solvers.

    ``molalities`` and ``activities`` are keyed by the names in
    :data:`SPECIES`.  ``omega`` is the calcite saturation index
    a_Ca+2 * a_CO3-2 / Ksp.
    """

    molalities: dict[str, float]
    activities: dict[str, float]
    ionic_strength: float
    ph: float
    omega: float

    @property
    def a_h(self) -> float:
        return self.activities["H+"]

    @property
    def a_h2co3(self) -> float:
        return self.activities["H2CO3*"]

    @property
    def a_hco3(self) -> float:
        return self.activities["HCO3-"]

    @property
    def a_co3(self) -> float:
        return self.activities["CO3-2"]

    @property
    def a_ca(self) -> float:
        return self.activities["Ca+2"]

    @property
    def ca_molality(self) -> float:
        return self.molalities["Ca+2"]

    @property
    def carbon_total(self) -> float:
        m = self.molalities
        return m["H2CO3*"] + m["HCO3-"] + m["CO3-2"]

    @property
    def charge_imbalance(self) -> float:
        return sum(CHARGES[s] * m for s, m in self.molalities.items())


def activity_coefficient(charge: int, ionic_strength: float, debye_a: float) -> float:
    """Davies activity coefficient.

    log10(gamma) = -A * z**2 * (sqrt(I)/(1 + sqrt(I)) - 0.3*I)

    Neutral species (charge 0) return exactly 1.  Valid to roughly
    I = 0.5 mol/kg.
    """
    if ionic_strength < 0:
        raise ValueError(f"ionic strength must be >= 0, got {ionic_strength}")
    if charge == 0 or ionic_strength == 0.0:
        return 1.0
    sqrt_i = math.sqrt(ionic_strength)
    log_gamma = -debye_a * charge * charge * (
        sqrt_i / (1.0 + sqrt_i) - 0.3 * ionic_strength
    )
    return 10.0 ** log_gamma


def ionic_strength(molalities: dict[str, float]) -> float:
    """I = 0.5 * sum(z_j**2 * m_j) over charged species, mol/kg."""
    total = 0.0
    for species, m in molalities.items():
        if m < 0:
            raise ValueError(f"negative molality for {species}: {m}")
        z = CHARGES[species]
        total += z * z * m
    return 0.5 * total


def saturation_index(a_ca: float, a_co3: float, log_ksp: float) -> float:
    """Omega = a_Ca+2 * a_CO3-2 / Ksp."""
    if a_ca < 0 or a_co3 < 0:
        raise ValueError("activities must be >= 0")
    return a_ca * a_co3 / 10.0 ** log_ksp


# ---------------------------------------------------------------------------
# charge-balance solves
# ---------------------------------------------------------------------------

# log10(a_H+) bracket: pH 16 down to -3 covers anything the carbonate system
# can produce.
_LOG_AH_LO = -16.0
_LOG_AH_HI = 3.0


def _open_residual(log_ah, model, a_co2, ca_total, g1, g2):
    """Charge balance and its derivative wrt log10(a_H+), open system."""
    ah = 10.0 ** log_ah
    m_h = ah / g1
    m_oh = model.kw / (ah * g1)
    m_hco3 = model.k1 * a_co2 / (ah * g1)
    m_co3 = model.k1 * model.k2 * a_co2 / (ah * ah * g2)
    f = m_h + 2.0 * ca_total - m_oh - m_hco3 - 2.0 * m_co3
    # dF/d(a_h), all terms positive: monotone increasing
    dfda = (1.0 / g1) + m_oh / ah + m_hco3 / ah + 4.0 * m_co3 / ah
    dfdx = dfda * ah * math.log(10.0)
    return f, dfdx


def _closed_residual(log_ah, model, carbon_total, ca_total, g1, g2):
    """Charge balance and derivative, closed system (total carbon fixed)."""
    ah = 10.0 ** log_ah
    u = model.k1 / (ah * g1)
    v = model.k1 * model.k2 / (ah * ah * g2)
    denom = 1.0 + u + v
    m_co2 = carbon_total / denom
    m_hco3 = u * m_co2
    m_co3 = v * m_co2
    m_h = ah / g1
    m_oh = model.kw / (ah * g1)
    f = m_h + 2.0 * ca_total - m_oh - m_hco3 - 2.0 * m_co3
    dfda = (
        1.0 / g1
        + m_oh / ah
        + (carbon_total / ah) * (u + 4.0 * v + u * v) / (denom * denom)
    )
    dfdx = dfda * ah * math.log(10.0)
    return f, dfdx


def _solve_log_ah(residual, x0):
    """Safeguarded Newton on the monotone charge-balance residual.

    ``residual(x)`` returns (F, dF/dx) with F strictly increasing in x.
    Keeps a bracket and falls back to bisection whenever the Newton step
    leaves it.
    """
    lo, hi = _LOG_AH_LO, _LOG_AH_HI
    x = min(max(x0, lo + 1.0), hi - 1.0)
    f, dfdx = residual(x)
    best_x, best_f = x, f
    for _ in range(MAX_ITER):
        if abs(f) < CHARGE_TOL * 0.1:
            return x, f
        if f > 0.0:
            hi = x
        else:
            lo = x
        if dfdx > 0.0 and math.isfinite(dfdx):
            step = -f / dfdx
            x_new = x + step
        else:
            x_new = 0.5 * (lo + hi)
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if hi - lo < 1e-15:
            return best_x, best_f
        x = x_new
        f, dfdx = residual(x)
        if abs(f) < abs(best_f):
            best_x, best_f = x, f
    if abs(best_f) <= CHARGE_TOL:
        return best_x, best_f
    raise ConvergenceError(
        "charge-balance Newton did not converge", residual=best_f
    )


def _gamma_loop(model, solve_once):
    """Outer fixed-point on the Davies coefficients.

    ``solve_once(g1, g2)`` returns (log_ah, molalities dict).  Iterates
    until both activity coefficients change by less than GAMMA_TOL.
    """
    g1 = g2 = 1.0
    for _ in range(MAX_ITER):
        log_ah, molalities = solve_once(g1, g2)
        strength = ionic_strength(molalities)
        g1_new = activity_coefficient(1, strength, model.debye_a)
        g2_new = activity_coefficient(2, strength, model.debye_a)
        if max(abs(g1_new - g1), abs(g2_new - g2)) < GAMMA_TOL:
            return log_ah, molalities, strength, g1_new, g2_new
        g1, g2 = g1_new, g2_new
    raise ConvergenceError(
        "activity-coefficient fixed point did not converge",
        residual=max(abs(g1_new - g1), abs(g2_new - g2)),
    )


def _assemble_state(model, log_ah, molalities, strength, g1, g2):
    ah = 10.0 ** log_ah
    m = molalities
    a_co2 = m["H2CO3*"]  # gamma = 1 for the lumped neutral species
    activities = {
        "H+": ah,
        "OH-": model.kw / ah,
        "H2CO3*": a_co2,
        "HCO3-": model.k1 * a_co2 / ah,
        "CO3-2": model.k1 * model.k2 * a_co2 / (ah * ah),
        "Ca+2": g2 * m["Ca+2"],
    }
    state = SpeciationState(
        molalities=dict(m),
        activities=activities,
        ionic_strength=strength,
        ph=-log_ah,
        omega=saturation_index(activities["Ca+2"], activities["CO3-2"], model.log_ksp),
    )
    residual = state.charge_imbalance
    if abs(residual) > CHARGE_TOL:
        raise ConvergenceError("speciation charge balance out of tolerance",
                               residual=residual)
    return state


def speciate_open(model: AqueousModel, p_co2: float, ca_total: float) -> SpeciationState:
    """Equilibrium speciation with a fixed CO2 partial pressure.

    The gas buffer pins a_H2CO3* = KH * p_co2; calcium is fixed at
    ``ca_total``; pH comes from electroneutrality.

    Parameters
    ----------
    model : AqueousModel
    p_co2 : float
        CO2 partial pressure, atm; must be > 0.
    ca_total : float
        Total dissolved calcium, mol/kg; must be >= 0.

    Raises
    ------
    ConvergenceError
        If the Newton or activity-coefficient iteration fails.
    """
    if not p_co2 > 0:
        raise ValueError(f"p_co2 must be > 0, got {p_co2}")
    if ca_total < 0:
        raise ValueError(f"ca_total must be >= 0, got {ca_total}")
    a_co2 = model.kh * p_co2

    def solve_once(g1, g2):
        log_ah, _ = _solve_log_ah(
            lambda x: _open_residual(x, model, a_co2, ca_total, g1, g2),
            x0=-7.0,
        )
        ah = 10.0 ** log_ah
        molalities = {
            "H+": ah / g1,
            "OH-": model.kw / (ah * g1),
            "H2CO3*": a_co2,
            "HCO3-": model.k1 * a_co2 / (ah * g1),
            "CO3-2": model.k1 * model.k2 * a_co2 / (ah * ah * g2),
            "Ca+2": ca_total,
        }
        return log_ah, molalities

    log_ah, molalities, strength, g1, g2 = _gamma_loop(model, solve_once)
    return _assemble_state(model, log_ah, molalities, strength, g1, g2)


def speciate_closed(
    model: AqueousModel, carbon_total: float, ca_total: float
) -> SpeciationState:
    """Equilibrium speciation with fixed total dissolved carbon.

    Same electroneutrality solve as :func:`speciate_open`, with the gas
    constraint replaced by m_H2CO3* + m_HCO3- + m_CO3-2 = carbon_total.
    Carbon and calcium totals are conserved by construction.
    """
    if carbon_total < 0:
        raise ValueError(f"carbon_total must be >= 0, got {carbon_total}")
    if ca_total < 0:
        raise ValueError(f"ca_total must be >= 0, got {ca_total}")

    def solve_once(g1, g2):
        log_ah, _ = _solve_log_ah(
            lambda x: _closed_residual(x, model, carbon_total, ca_total, g1, g2),
            x0=-7.0,
        )
        ah = 10.0 ** log_ah
        u = model.k1 / (ah * g1)
        v = model.k1 * model.k2 / (ah * ah * g2)
        m_co2 = carbon_total / (1.0 + u + v)
        molalities = {
            "H+": ah / g1,
            "OH-": model.kw / (ah * g1),
            "H2CO3*": m_co2,
            "HCO3-": u * m_co2,
            "CO3-2": v * m_co2,
            "Ca+2": ca_total,
        }
        return log_ah, molalities

    log_ah, molalities, strength, g1, g2 = _gamma_loop(model, solve_once)
    return _assemble_state(model, log_ah, molalities, strength, g1, g2)


def calcite_equilibrium_open(model: AqueousModel, p_co2: float) -> SpeciationState:
    """Open-system state in equilibrium with calcite (omega = 1).

    Finds the dissolved-calcium level at which the saturation index of
    the gas-buffered solution reaches 1; omega is strictly increasing in
    calcium, so plain bisection is reliable.
    """
    if not p_co2 > 0:
        raise ValueError(f"p_co2 must be > 0, got {p_co2}")

    def omega_at(ca):
        return speciate_open(model, p_co2, ca).omega

    lo = 0.0
    hi = 1e-6
    for _ in range(80):
        if omega_at(hi) >= 1.0:
            break
        lo = hi
        hi *= 2.0
        if hi > 50.0:
            raise ConvergenceError(
                f"calcite equilibrium not bracketed below 50 mol/kg at p_co2={p_co2}"
            )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if omega_at(mid) < 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return speciate_open(model, p_co2, hi)
