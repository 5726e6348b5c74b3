"""Carbonate speciation basics.

Walks the CO2-H2O-CaCO3 system through three classic states: pure
water, water under ambient CO2, and water in equilibrium with calcite
under a CO2-bubbled atmosphere.
"""

from carbkin import AqueousModel, calcite_equilibrium_open, speciate_closed, speciate_open

model = AqueousModel()  # 25 degC handbook constants

print("== pure water ==")
state = speciate_closed(model, carbon_total=0.0, ca_total=0.0)
print(f"pH = {state.ph:.3f}  (charge imbalance {state.charge_imbalance:.1e} mol/kg)")

print("\n== water under ambient CO2 (P = 10^-3.5 atm) ==")
state = speciate_open(model, p_co2=10.0 ** -3.5, ca_total=0.0)
print(f"pH = {state.ph:.3f}")
print(f"a_H2CO3* = {state.a_h2co3:.3e}  (Henry: 10^-1.47 * P)")

print("\n== water under bubbled CO2 (P = 0.97 atm) ==")
state = speciate_open(model, p_co2=0.97, ca_total=0.0)
print(f"pH = {state.ph:.3f}  -- carbonic acid makes this noticeably acidic")

print("\n== same water, equilibrated with calcite ==")
eq = calcite_equilibrium_open(model, p_co2=0.97)
print(f"pH = {eq.ph:.3f}, dissolved Ca = {eq.ca_molality * 1e3:.2f} mmol/kg")
print(f"saturation index omega = {eq.omega:.6f}")
print("\nmolalities (mol/kg):")
for species, m in eq.molalities.items():
    print(f"  {species:<8} {m:.4e}")
