"""Linting a kinetics database for the basis pitfall.

The shipped "as published" fixture declares the carbonate order against
P(CO2).  The linter flags it; the rewrite converts it to the
a_H2CO3* basis while preserving every rate (a pure power-law rescale of
the carbonate constant by the Henry constant).
"""

from importlib import resources

from carbkin import (
    AqueousModel,
    ConventionFlag,
    lint_db,
    parse_db,
    rewrite_entry,
)

data = resources.files("carbkin").joinpath("data")

for name in ("calcite.default", "calcite.palandri-as-published"):
    db = parse_db(str(data / name))
    findings = lint_db(db)
    print(f"== {name} ==")
    if not findings:
        print("  clean")
    for finding in findings:
        print(f"  {finding}")

print("\n== rate-preserving rewrite ==")
db = parse_db(str(data / "calcite.palandri-as-published"))
entry = db.minerals["calcite"]
fixed = rewrite_entry(
    entry, ConventionFlag.CARBONIC_ACID_ACTIVITY, AqueousModel(), reference_p_co2=0.97
)
print(f"  carbonate log k: {entry.palandri.carbonate.log_k_298}  (basis p_co2)")
print(f"             ->    {fixed.palandri.carbonate.log_k_298}  (basis h2co3_activity)")
print("  -3.48 - n3*log10(KH) = -3.48 + 1.47 = -2.01: same rates, honest label")
print("\nnote: the rewrite normalizes the *declaration*.  The scientific fix for")
print("a database that meant a_H2CO3* all along is to keep the constant and")
print("flip only the basis flag, which is exactly calcite.default.")
