"""
Husimi Q function across the special gains
==========================================

The Q function of a pure state is ``|<gamma|psi>|^2 / pi``. The heralded
output has a single exact zero, which starts far out at low gain, moves to
the displacement centre at ``g0`` and then heads towards the origin.
"""

import numpy as np

from opaherald import closed_output, gain_displaced_number, gain_orthogonal_photon_added, q_function
from opaherald.heralded import q_zero_location
from opaherald.observables import default_window, locate_q_zero

alpha = 2.0
panels = {
    "g = 1": 1.0,
    "g = g1": gain_orthogonal_photon_added(alpha),
    "g = g0": gain_displaced_number(alpha),
    "g = 1.195": 1.195,
}

SHADES = " .:-=+*#%@"


def sketch(grid, step=6):
    """Coarse character map of a Q grid, imaginary axis pointing up."""
    v = grid.values[::-step, ::step] / grid.values.max()
    return "\n".join("".join(SHADES[min(int(x * len(SHADES)), len(SHADES) - 1)] for x in row) for row in v)


for name, g in panels.items():
    psi = closed_output(alpha, g).psi
    grid = q_function(psi, default_window(alpha), 121, 121)
    peak = grid.argmax()
    print(f"{name} ({g:.4f}): peak at {peak.real:+.2f}{peak.imag:+.2f}i, integral {grid.integral():.4f}")
    if g > 1:
        zero, q = locate_q_zero(psi, grid)
        exact = q_zero_location(alpha, g)
        print(f"  zero found at {zero.real:.6f}, expected {exact.real:.6f}, Q there {q:.1e}")
    print(sketch(grid))
    print()

# %%
# At g0 the zero sits at alpha/g0 = sqrt(3), the centre of the ring that a
# displaced single photon draws in phase space.
print("zero positions for a few more gains:")
for g in np.linspace(1.05, 3.0, 6):
    print(f"  g = {g:.2f}: gamma = {q_zero_location(alpha, g).real:.4f}")
