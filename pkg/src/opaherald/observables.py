"""Q functions, reference-state projections and photon-number moments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .fock import StateVec, Truncation, coherent_state, displaced_number_state, inner_product
from .heralded import _bracket, closed_output, output_truncation, photon_added_state
from .amplifier import AmplifierParams

Q_MAX = 1.0 / math.pi
DEFAULT_GRID_NODES = 241
_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class QGrid:
    """Q function sampled on a rectangular grid; ``values[iy, ix]`` sits at ``xs[ix] + 1j*ys[iy]``."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    values: np.ndarray

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def cell_area(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1) * (self.y_max - self.y_min) / (self.ny - 1)

    def integral(self) -> float:
        """Riemann sum of Q over the window."""
        return float(self.values.sum() * self.cell_area)

    def argmax(self) -> complex:
        iy, ix = np.unravel_index(np.argmax(self.values), self.values.shape)
        return complex(self.xs[ix], self.ys[iy])


@dataclass(frozen=True)
class MomentReport:
    mean_n: float
    second_moment: float

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean_n**2


class Projections(NamedTuple):
    p_coh: float
    p_pacs: float
    p_disp: float


def default_window(alpha: complex) -> tuple[float, float, float, float]:
    half = abs(complex(alpha)) + 4.0
    return (-half, half, -half, half)


def coherent_overlaps(state: StateVec, gammas) -> np.ndarray:
    """``<gamma|state>`` for every amplitude in ``gammas`` (any shape).

    The coherent bras are not truncated to the state's cutoff first: only the
    first ``state.dim`` of their coefficients meet a nonzero amplitude, so the
    sum is exact for any ``gamma``.
    """
    gammas = np.asarray(gammas, dtype=complex)
    flat = gammas.reshape(-1)
    n = np.arange(state.dim)
    half_log_fact = 0.5 * gammaln(n + 1)
    psi = state.amps
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, _CHUNK):
        z = flat[start : start + _CHUNK]
        r = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_r = np.log(r)
            log_mag = -0.5 * r[:, None] ** 2 + n[None, :] * log_r[:, None] - half_log_fact[None, :]
        log_mag[:, 0] = -0.5 * r**2
        # conj of the coherent coefficients: phase exp(-i n arg z)
        bra = np.exp(log_mag - 1j * n[None, :] * np.angle(z)[:, None])
        out[start : start + _CHUNK] = bra @ psi
    return out.reshape(gammas.shape)


def q_values(state: StateVec, gammas) -> np.ndarray:
    return np.abs(coherent_overlaps(state, gammas)) ** 2 / math.pi


def q_function(
    state: StateVec,
    bounds: tuple[float, float, float, float] = (-6.0, 6.0, -6.0, 6.0),
    nx: int = DEFAULT_GRID_NODES,
    ny: int = DEFAULT_GRID_NODES,
) -> QGrid:
    """Husimi ``Q(gamma) = |<gamma|psi>|^2 / pi`` of a pure state on a grid."""
    x_min, x_max, y_min, y_max = map(float, bounds)
    if not all(math.isfinite(v) for v in (x_min, x_max, y_min, y_max)):
        raise ValueError(f"grid bounds must be finite, got {bounds}")
    if nx < 2 or ny < 2 or x_max <= x_min or y_max <= y_min:
        raise ValueError(f"degenerate grid {bounds} with {nx}x{ny} nodes")
    xs = np.linspace(x_min, x_max, nx)
    ys = np.linspace(y_min, y_max, ny)
    gammas = xs[None, :] + 1j * ys[:, None]
    values = q_values(state, gammas)
    values.setflags(write=False)
    return QGrid(x_min, x_max, y_min, y_max, nx, ny, values)


def _refine_minimum(state: StateVec, center: complex, h: float, steps: int = 40) -> tuple[complex, float]:
    """Zoom in on a local minimum of Q with 5x5 stencils and quadratic fits."""
    offsets = np.arange(-2, 3)
    dx, dy = np.meshgrid(offsets, offsets)
    dx, dy = dx.ravel().astype(float), dy.ravel().astype(float)
    design = np.column_stack([np.ones_like(dx), dx, dy, dx * dx, dx * dy, dy * dy])
    best_val = float(q_values(state, np.array([center]))[0])
    for _ in range(steps):
        pts = center + h * (dx + 1j * dy)
        vals = q_values(state, pts)
        i_min = int(np.argmin(vals))
        coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
        _, bx, by, axx, axy, ayy = coef
        hess = np.array([[2 * axx, axy], [axy, 2 * ayy]])
        candidate = pts[i_min]
        if np.all(np.linalg.eigvalsh(hess) > 0):
            sx, sy = np.linalg.solve(hess, [-bx, -by])
            if abs(sx) <= 2 and abs(sy) <= 2:
                candidate = center + h * complex(sx, sy)
        cand_val = float(q_values(state, np.array([candidate]))[0])
        if cand_val > vals[i_min]:
            candidate, cand_val = pts[i_min], float(vals[i_min])
        center, best_val = candidate, cand_val
        h /= 4.0
        if h < 1e-12 * max(1.0, abs(center)):
            break
    return center, best_val


def locate_q_zeros(state: StateVec, grid: QGrid) -> list[tuple[complex, float]]:
    """Interior local minima of the Q grid, each refined off-grid.

    Returns ``(gamma, Q(gamma))`` pairs sorted by refined value. The Gaussian
    fall-off towards the window edge is monotone and produces no interior
    minima, so these are the zeros (or near-zeros) of the state.
    """
    v = grid.values
    core = v[1:-1, 1:-1]
    is_min = np.ones_like(core, dtype=bool)
    for sy in (-1, 0, 1):
        for sx in (-1, 0, 1):
            if sx == 0 and sy == 0:
                continue
            is_min &= core < v[1 + sy : v.shape[0] - 1 + sy, 1 + sx : v.shape[1] - 1 + sx]
    h = min((grid.x_max - grid.x_min) / (grid.nx - 1), (grid.y_max - grid.y_min) / (grid.ny - 1))
    found = []
    for iy, ix in zip(*np.nonzero(is_min)):
        start = complex(grid.xs[ix + 1], grid.ys[iy + 1])
        found.append(_refine_minimum(state, start, h))
    return sorted(found, key=lambda item: item[1])


def locate_q_zero(state: StateVec, grid: QGrid | None = None) -> tuple[complex, float] | None:
    if grid is None:
        grid = q_function(state)
    zeros = locate_q_zeros(state, grid)
    return zeros[0] if zeros else None


def pacs_state(beta: complex, trunc: Truncation) -> StateVec:
    """Photon-added coherent state ``a^dag|beta> / sqrt(1 + |beta|^2)``."""
    return photon_added_state(beta, trunc, k=1)


def pacs_overlap_closed(alpha: complex, g: float) -> float:
    """``|<PACS(beta)|psi>|^2`` from ``<beta| a (1/g^2 - G^2 n) |beta> = beta (1/g^2 - G^2 (x + 1))``."""
    params = AmplifierParams(g)
    beta, _, norm_n, G2 = _bracket(alpha, params.g)
    x = abs(beta) ** 2
    amp = 1.0 / params.g**2 - G2 * (x + 1.0)
    return x * amp * amp / ((1.0 + x) * norm_n)


def reference_projections(alpha: complex, g: float, trunc: Truncation | None = None) -> Projections:
    """Squared overlaps of the heralded output with ``|beta>``, the PACS and ``D(beta)|1>``."""
    if trunc is None:
        trunc = output_truncation(alpha)
    out = closed_output(alpha, g, trunc)
    psi, beta = out.psi, out.beta

    def proj(ref: StateVec) -> float:
        return abs(inner_product(ref, psi)) ** 2

    return Projections(
        p_coh=proj(coherent_state(beta, trunc)),
        p_pacs=proj(pacs_state(beta, trunc)),
        p_disp=proj(displaced_number_state(beta, 1, trunc)),
    )


def photon_moments_closed(alpha: complex, g: float) -> MomentReport:
    """Mean and second moment of n from the two-component decomposition.

    With ``x = |alpha/g|^2`` and ``A = 1/g^2 - x G^2``, the cross terms
    ``2 Re(C0* C1 <beta|n^k|beta,1>)`` evaluate to ``-2 x G^2 A / N`` for
    ``k = 1`` and ``-2 x G^2 A (2x + 1) / N`` for ``k = 2``.
    """
    params = AmplifierParams(g)
    beta, a, norm_n, G2 = _bracket(alpha, params.g)
    x = abs(beta) ** 2
    c0_sq = a * a / norm_n
    c1_sq = x * G2 * G2 / norm_n
    cross = -2.0 * x * G2 * a / norm_n
    mean = c0_sq * x + c1_sq * (x + 1.0) + cross
    second = c0_sq * (x + x * x) + c1_sq * (3.0 * x + (x + 1.0) ** 2) + cross * (2.0 * x + 1.0)
    return MomentReport(mean, second)


def photon_moments_numeric(state: StateVec) -> MomentReport:
    p = state.probabilities / state.norm_sq
    n = np.arange(state.dim, dtype=float)
    return MomentReport(float(p @ n), float(p @ (n * n)))
