"""
Fock coefficients of the heralded output
========================================

A coherent state with ten photons on average goes through the amplifier
together with one idler photon, and one idler photon is detected. At the
gain ``g0`` the output is a displaced single photon state, and its number
basis coefficients pass through zero in the middle of the distribution.
"""

import math

import numpy as np

from opaherald import closed_output, coherent_state, gain_displaced_number

alpha = math.sqrt(10.0)
g0 = gain_displaced_number(alpha)
out = closed_output(alpha, g0)
print(f"g0 = {g0:.6f}, beta = alpha/g0 = {out.beta.real:.6f}, P_success = {out.p_success:.3e}")

# The output coefficients are those of |beta> reweighted by (1/g^2 - G^2 n),
# which changes sign at n0 = 1/(g^2 - 1). Here n0 = |alpha|^2 - 1 = 9.
ref = coherent_state(out.beta, out.psi.trunc)

print("\n  n      c_n(out)    c_n(|beta>)")
for n in range(21):
    print(f"{n:3d}  {out.psi.amps[n].real:+.6f}   {ref.amps[n].real:+.6f}")

# %%
# The sign change across n = 9 is what makes the state orthogonal to
# ``|beta>``: the two halves of the distribution cancel in the overlap.
c = out.psi.amps.real
print(f"\n|c_9|^2 = {abs(c[9]) ** 2:.1e}")
print(f"<beta|psi> = {abs(np.vdot(ref.amps, out.psi.amps)):.1e}")
