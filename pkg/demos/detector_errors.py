"""
Dark counts and lost photons
============================

Real detectors sometimes click without a photon (probability ``d``) and
sometimes miss one (probability ``l``). Both detectors then report the
heralding outcome while the amplifier actually saw a different pair of
idler photon numbers, and the heralded state becomes a mixture.
"""

import numpy as np

from opaherald import ErrorModel, gain_displaced_number, outcome_table

alpha = 2.0
g0 = gain_displaced_number(alpha)

# The state for each true outcome (j photons in, k out) only depends on the
# amplifier, so the table is built once and reweighted for every (d, l).
table = outcome_table(alpha, g0, ErrorModel(0.0, 0.0))
print("overlap of each outcome state with the ideal output at g0:")
for (j, k), o in table.outcomes.items():
    print(f"  ({j},{k}): {o.overlap_sq:.4f}")


def fidelities(d, l):
    m = ErrorModel(d, l)
    terms = {jk: m.weight(*jk) * o.overlap_sq for jk, o in table.outcomes.items()}
    lower = sum(t for (j, k), t in terms.items() if k < 2)
    return lower, sum(terms.values())


# %%
# The lower bound treats the two-photon outcomes as orthogonal. The full
# model gives them weights d*l and (1-d)*l, so its weights add up to one.
print("\n   d     l    F_lower  F_full")
for l in (0.0, 0.2, 0.5):
    for d in np.linspace(0.0, 0.5, 6):
        lower, full = fidelities(d, l)
        print(f"{d:5.2f} {l:5.2f}   {lower:.4f}   {full:.4f}")
