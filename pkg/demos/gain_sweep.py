"""
What the output looks like as the gain grows
============================================

For an input amplitude of 2 the heralded output starts as the input
coherent state at ``g = 1``, becomes orthogonal to a photon-added state at
``g1``, turns into a displaced single photon at ``g0`` and approaches a
photon-added coherent state at large gain. The projections onto those
reference states and the first two photon-number moments tell the story.
"""

import numpy as np
from scipy.optimize import minimize_scalar

from opaherald import (
    gain_displaced_number,
    gain_orthogonal_photon_added,
    photon_moments_closed,
    reference_projections,
    success_probability,
)

alpha = 2.0
g0 = gain_displaced_number(alpha)
g1 = gain_orthogonal_photon_added(alpha)
print(f"g1 = {g1:.4f}  (orthogonal to the photon-added state)")
print(f"g0 = {g0:.4f}  (displaced single photon)\n")

gains = sorted(set(np.round(np.geomspace(1.0, 10.0, 13), 4)) | {g0, g1})
print("     g     P_s     p_coh   p_pacs  p_disp   <n>     Var")
for g in gains:
    p = reference_projections(alpha, g)
    m = photon_moments_closed(alpha, g)
    print(
        f"{g:7.4f}  {success_probability(alpha, g):.4f}  {p.p_coh:.4f}  {p.p_pacs:.4f}  "
        f"{p.p_disp:.4f}  {m.mean_n:6.3f}  {m.variance:6.3f}"
    )

# %%
# The projection onto ``|beta>`` and onto the displaced photon always add up
# to one: the output lives in the plane spanned by those two states.
#
# The mean photon number first drops below the input value of 4, comes back
# to exactly 4 at g0 and keeps rising a little before falling towards one
# photon. The variance peaks close to g0.


def peak(f, lo, hi):
    return minimize_scalar(lambda g: -f(g), bounds=(lo, hi), method="bounded").x


g_dip = minimize_scalar(lambda g: photon_moments_closed(alpha, g).mean_n, bounds=(1.0, g0), method="bounded").x
g_mean = peak(lambda g: photon_moments_closed(alpha, g).mean_n, g0, 2.0)
g_var = peak(lambda g: photon_moments_closed(alpha, g).variance, 1.0, 2.0)
print(f"\nmean dip   at g = {g_dip:.4f}, <n> = {photon_moments_closed(alpha, g_dip).mean_n:.4f}")
print(f"mean peak  at g = {g_mean:.4f} ({100 * (g_mean / g0 - 1):+.1f}% from g0)")
print(f"var peak   at g = {g_var:.4f} ({100 * (g_var / g0 - 1):+.1f}% from g0)")
