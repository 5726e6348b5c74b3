"""The two calcite dissolution rate laws, and the unit pitfall.

Shows the mechanism-model (PWP) constants coming out of their
temperature lines, the one-decade unit conversion that tabulated values
need, and how the semi-empirical (Palandri-Kharaka) law collapses onto
the mechanism model's forward rate at 25 degC.
"""

import math

from carbkin import (
    AqueousModel,
    LogKLine,
    PWPParameters,
    RateUnit,
    calcite_equilibrium_open,
    convert_log_rate_units,
    derive_k4,
    forward_rate,
    palandri_rate,
    pwp_log_rate_constant,
    pwp_net_rate,
    pwp_rate_constants,
    rate_params_from_pwp,
    speciate_open,
)

pwp = PWPParameters(
    acid=LogKLine(-444.0, 0.198),
    carbonate=LogKLine(-2177.0, 2.84),
    neutral=LogKLine(-317.0, -5.86),
    unit=RateUnit.MMOL_CM2_S,
)

print("== mechanism-model rate constants at 298.15 K ==")
for name, line in (("acid", pwp.acid), ("carbonate", pwp.carbonate), ("neutral", pwp.neutral)):
    log_k = pwp_log_rate_constant(line.a, line.b, 298.15)
    print(
        f"  {name:<10} log k = {log_k:+.3f} mmol/(cm2 s)"
        f"  ->  {convert_log_rate_units(log_k):+.3f} mol/(m2 s)"
    )
print("  (forgetting the +1 unit conversion costs exactly one decade of rate)")

print("\n== published table values for comparison ==")
print("  acid -0.30, carbonate -3.48, neutral -5.81  (all within 0.15 log units)")

model = AqueousModel()
state = speciate_open(model, p_co2=0.97, ca_total=0.0)
k1, k2, k3 = pwp_rate_constants(pwp, 298.15)

print("\n== far from equilibrium, 25 degC, P(CO2) = 0.97 atm ==")
rf = forward_rate(k1, k2, k3, state.a_h, state.a_h2co3)
print(f"  mechanism-model forward rate: {rf:.3e} mol/(m2 s)")
params = rate_params_from_pwp(pwp)
rate = palandri_rate(params, state, p_co2=0.97, area=1.0, temperature=298.15)
print(f"  semi-empirical rate (omega=0): {-rate:.3e} mol/(m2 s)  -- identical")

print("\n== the backward term ==")
k4 = derive_k4(model, pwp, p_co2=0.97)
print(f"  k4 from detailed balance at the calcite equilibrium: {k4:.4f}")
eq = calcite_equilibrium_open(model, 0.97)
print(f"  net rate at that equilibrium: {pwp_net_rate(k1, k2, k3, k4, eq):.2e}")
