"""Dissolution rate laws for carbonate minerals.

Two rate models are implemented:

* The Plummer-Wigley-Parkhurst (PWP) mechanism model: three parallel
  forward pathways (acid, carbonate, neutral) with a lumped backward
  term,

      R_net = k1*a_H+ + k2*a_H2CO3* + k3  -  k4*a_Ca+2*a_HCO3-

  The forward constants follow log10 k_i = a_i/T + b_i; k4 is closed by
  detailed balance so that R_net vanishes exactly at the calcite
  equilibrium composition for the given temperature and CO2 pressure.

* The Palandri-Kharaka semi-empirical law: per mechanism an Arrhenius
  factor, an activity power, and an affinity term (1 - Omega^p)^q.  The
  carbonate mechanism's activity basis is explicit and switchable
  between the dissolved-carbonic-acid activity a_H2CO3* and the gas
  partial pressure P(CO2); the two differ by a factor of 1/KH (~29.5 at
  25 degC with log KH = -1.47), which is exactly the discrepancy a
  database that declares the wrong basis bakes into simulated
  timescales.

Mechanism parameters are always keyed by name ("acid", "neutral",
"carbonate"), never by position: published tables disagree on mechanism
ordering, and positional forms are how basis and index mix-ups spread.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .chem import AqueousModel, SpeciationState, calcite_equilibrium_open

GAS_CONSTANT = 8.314462618  # J/(mol K)
T_REF = 298.15  # K, reference temperature of the tabulated rate constants


class ConventionFlag(enum.Enum):
    """Activity basis of the carbonate mechanism."""

    CARBONIC_ACID_ACTIVITY = "h2co3_activity"
    PARTIAL_PRESSURE_CO2 = "p_co2"

    @classmethod
    def from_string(cls, raw: str) -> "ConventionFlag":
        for member in cls:
            if member.value == raw:
                return member
        raise ValueError(
            f"unknown carbonate basis {raw!r}; expected one of "
            f"{[m.value for m in cls]}"
        )


class RateUnit(enum.Enum):
    """Unit of a tabulated rate constant."""

    MOL_M2_S = "mol_m2_s"
    MMOL_CM2_S = "mmol_cm2_s"

    @classmethod
    def from_string(cls, raw: str) -> "RateUnit":
        for member in cls:
            if member.value == raw:
                return member
        raise ValueError(
            f"unknown rate unit {raw!r}; expected one of {[m.value for m in cls]}"
        )


@dataclass(frozen=True)
class LogKLine:
    """log10 k = a/T + b with T in kelvin."""

    a: float
    b: float


@dataclass(frozen=True)
class PWPParameters:
    """Temperature lines for the three PWP forward constants.

    ``unit`` tags the unit the lines produce; classic tabulations use
    mmol/(cm2 s), which is one decade below mol/(m2 s).
    """

    acid: LogKLine
    carbonate: LogKLine
    neutral: LogKLine
    unit: RateUnit = RateUnit.MOL_M2_S


@dataclass(frozen=True)
class MechanismParams:
    """One mechanism of the semi-empirical rate law.

    log_k_298 is log10 of the rate constant at 298.15 K in mol/(m2 s);
    activation_energy is in J/mol; n is the reaction order of the
    mechanism's activity factor; p and q shape the affinity term.
    """

    log_k_298: float
    activation_energy: float = 0.0
    n: float = 1.0
    p: float = 1.0
    q: float = 1.0

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise ValueError(f"p and q must be positive (p={self.p}, q={self.q})")
        if self.activation_energy < 0:
            raise ValueError(
                f"activation energy must be >= 0, got {self.activation_energy}"
            )

    def rate_constant(self, temperature: float, gas_constant: float = GAS_CONSTANT) -> float:
        """k at ``temperature`` via the Arrhenius factor (unity at 298.15 K)."""
        k298 = 10.0 ** self.log_k_298
        if self.activation_energy == 0.0:
            return k298
        return k298 * math.exp(
            -self.activation_energy / gas_constant * (1.0 / temperature - 1.0 / T_REF)
        )


@dataclass(frozen=True)
class RateParameterSet:
    """Complete semi-empirical parameterization for one mineral.

    The carbonate-mechanism activity basis is mandatory and explicit; a
    parameter set with the wrong declared basis runs, but runs ~1/KH too
    fast, so serialized forms must never default it.
    """

    acid: MechanismParams
    neutral: MechanismParams
    carbonate: MechanismParams
    carbonate_basis: ConventionFlag
    gas_constant: float = GAS_CONSTANT


def pwp_log_rate_constant(a: float, b: float, temperature: float) -> float:
    """Evaluate log10 k = a/temperature + b (unit set by the parameter line)."""
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return a / temperature + b


def convert_log_rate_units(log_k_mmol_cm2: float) -> float:
    """mmol/(cm2 s) -> mol/(m2 s): 1e-3 mol/mmol * 1e4 cm2/m2 is one decade."""
    if not math.isfinite(log_k_mmol_cm2):
        raise ValueError(f"log rate constant must be finite, got {log_k_mmol_cm2}")
    return log_k_mmol_cm2 + 1.0


def pwp_rate_constants(
    pwp: PWPParameters, temperature: float
) -> tuple[float, float, float]:
    """(k1, k2, k3) in mol/(m2 s) at ``temperature``: acid, carbonate, neutral."""
    logs = [
        pwp_log_rate_constant(line.a, line.b, temperature)
        for line in (pwp.acid, pwp.carbonate, pwp.neutral)
    ]
    if pwp.unit is RateUnit.MMOL_CM2_S:
        logs = [convert_log_rate_units(value) for value in logs]
    k1, k2, k3 = (10.0 ** value for value in logs)
    return k1, k2, k3


def forward_rate(k1: float, k2: float, k3: float, a_h: float, a_h2co3: float) -> float:
    """Total forward dissolution rate k1*a_H+ + k2*a_H2CO3* + k3, mol/(m2 s)."""
    if min(k1, k2, k3) < 0:
        raise ValueError("rate constants must be >= 0")
    if a_h < 0 or a_h2co3 < 0:
        raise ValueError("activities must be >= 0")
    return k1 * a_h + k2 * a_h2co3 + k3


def derive_k4(model: AqueousModel, pwp: PWPParameters, p_co2: float) -> float:
    """Backward constant closed by detailed balance.

    Evaluates the forward rate at the calcite-equilibrium composition
    for (model.temperature, p_co2) and divides by a_Ca+2 * a_HCO3- of
    that state, so the net rate is zero exactly where Omega = 1.
    """
    equilibrium = calcite_equilibrium_open(model, p_co2)
    k1, k2, k3 = pwp_rate_constants(pwp, model.temperature)
    rf = forward_rate(k1, k2, k3, equilibrium.a_h, equilibrium.a_h2co3)
    return rf / (equilibrium.a_ca * equilibrium.a_hco3)


def pwp_net_rate(
    k1: float, k2: float, k3: float, k4: float, state: SpeciationState
) -> float:
    """Net PWP rate R_f - k4*a_Ca+2*a_HCO3-, mol/(m2 s); > 0 is dissolution."""
    rf = forward_rate(k1, k2, k3, state.a_h, state.a_h2co3)
    return rf - k4 * (state.a_ca * state.a_hco3)


def _affinity(omega: float, p: float, q: float) -> float:
    """(1 - Omega^p)^q extended continuously past saturation.

    For Omega > 1 the base is negative; the factor is evaluated as
    sign(1-Omega^p) * |1-Omega^p|^q so supersaturation flips the rate
    sign (precipitation) instead of going complex.
    """
    base = 1.0 - omega ** p  # OverflowError propagates for absurd omega/p
    if base == 0.0:
        return 0.0
    return math.copysign(abs(base) ** q, base)


def palandri_rate(
    params: RateParameterSet,
    state: SpeciationState,
    p_co2: float,
    area: float,
    temperature: float,
) -> float:
    """Mineral mole rate of the semi-empirical law, mol/s.

    Negative during dissolution (mineral is consumed).  The acid term
    carries a_H+^n, the neutral term no activity factor, and the
    carbonate term either a_H2CO3*^n or p_co2^n depending on
    ``params.carbonate_basis``.

    Parameters
    ----------
    params : RateParameterSet
    state : SpeciationState
        Current solution composition (supplies activities and omega).
    p_co2 : float
        CO2 partial pressure in atm; only consulted under the
        PARTIAL_PRESSURE_CO2 basis.
    area : float
        Reactive mineral surface area, m2.
    temperature : float
        Kelvin.
    """
    if area < 0:
        raise ValueError(f"area must be >= 0, got {area}")
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    omega = state.omega
    if omega < 0:
        raise ValueError(f"omega must be >= 0, got {omega}")

    if params.carbonate_basis is ConventionFlag.CARBONIC_ACID_ACTIVITY:
        carbonate_activity = state.a_h2co3
    else:
        carbonate_activity = p_co2

    total = 0.0
    for mech, activity_factor in (
        (params.acid, state.a_h ** params.acid.n),
        (params.neutral, 1.0),
        (params.carbonate, carbonate_activity ** params.carbonate.n),
    ):
        k = mech.rate_constant(temperature, params.gas_constant)
        total += k * activity_factor * _affinity(omega, mech.p, mech.q)
    return -area * total + 0.0  # normalizes -0.0 at equilibrium


def rate_params_from_pwp(
    pwp: PWPParameters,
    temperature: float = T_REF,
    basis: ConventionFlag = ConventionFlag.CARBONIC_ACID_ACTIVITY,
) -> RateParameterSet:
    """Semi-empirical parameter set equivalent to the PWP forward constants.

    Uses the PWP lines evaluated at ``temperature`` as the 298.15 K
    constants with zero activation energy, unit reaction orders, and
    p = q = 1: at ``temperature`` and far from saturation the two models'
    forward rates then agree exactly.
    """
    k1, k2, k3 = pwp_rate_constants(pwp, temperature)
    return RateParameterSet(
        acid=MechanismParams(log_k_298=math.log10(k1)),
        neutral=MechanismParams(log_k_298=math.log10(k3), n=0.0),
        carbonate=MechanismParams(log_k_298=math.log10(k2)),
        carbonate_basis=basis,
    )
