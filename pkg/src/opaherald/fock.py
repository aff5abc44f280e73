"""Truncated Fock-space states and the elementary bosonic operators.

Single-mode states are stored as complex amplitude vectors indexed by photon
number, two-mode (signal, idler) states as complex matrices indexed
``[n_signal, n_idler]``. Every public constructor and operator re-checks the
probability mass in the top :data:`TAIL_LEVELS` levels and raises
:class:`~opaherald.errors.TruncationTooSmall` instead of silently truncating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import gammaln

from .errors import DimensionMismatch, TruncationTooSmall

DEFAULT_TAIL_TOL = 1e-12
TAIL_LEVELS = 5
UNITARITY_TOL = 1e-8


def default_dim(mean_photons: float) -> int:
    """Fock cutoff adequate for a state whose mean photon number is ``mean_photons``."""
    m = max(float(mean_photons), 0.0)
    return int(math.ceil(m + 10.0 * math.sqrt(m + 1.0) + 20.0))


@dataclass(frozen=True)
class Truncation:
    """Number of Fock levels kept (``0 .. dim-1``) and the tolerated tail mass."""

    dim: int
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"dim must be an integer >= 2, got {self.dim!r}")
        if not 0.0 <= self.tail_tol < 1.0:
            raise ValueError(f"tail_tol must lie in [0, 1), got {self.tail_tol!r}")
        object.__setattr__(self, "dim", int(self.dim))

    @classmethod
    def for_mean(cls, mean_photons: float, tail_tol: float = DEFAULT_TAIL_TOL) -> "Truncation":
        return cls(default_dim(mean_photons), tail_tol)


def _frozen(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    if arr.ndim != ndim:
        raise DimensionMismatch(f"expected a {ndim}-d amplitude array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def tail_fraction(amps: np.ndarray, levels: int = TAIL_LEVELS) -> float:
    """Fraction of the squared norm held by the top ``levels`` Fock levels."""
    p = np.abs(amps) ** 2
    total = p.sum()
    if total == 0.0:
        return 0.0
    return float(p[-levels:].sum() / total)


def _check_tail(amps: np.ndarray, tail_tol: float, what: str) -> None:
    frac = tail_fraction(amps)
    if frac > tail_tol:
        raise TruncationTooSmall(
            f"{what}: top-{TAIL_LEVELS} level mass {frac:.3e} exceeds tail_tol={tail_tol:.1e} "
            f"at dim={len(amps)}"
        )


@dataclass(frozen=True, eq=False)
class StateVec:
    """Single-mode state in a truncated Fock basis.

    ``amps[n]`` is the amplitude of ``|n>``. ``tail_mass`` records the
    probability that was cut off when the state was built (before any
    renormalization); it is zero for states constructed directly.
    """

    amps: np.ndarray
    trunc: Truncation | None = None
    tail_mass: float = 0.0

    def __post_init__(self):
        amps = _frozen(self.amps, 1)
        object.__setattr__(self, "amps", amps)
        if self.trunc is None:
            object.__setattr__(self, "trunc", Truncation(len(amps)))
        elif self.trunc.dim != len(amps):
            raise DimensionMismatch(f"{len(amps)} amplitudes for trunc.dim={self.trunc.dim}")

    @property
    def dim(self) -> int:
        return len(self.amps)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def normalized(self) -> "StateVec":
        norm_sq = self.norm_sq
        if norm_sq == 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return StateVec(self.amps / math.sqrt(norm_sq), self.trunc, self.tail_mass)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amps, dtype=dtype)


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Signal-idler state; ``amps[n, m]`` multiplies ``|n>_s |m>_i``."""

    amps: np.ndarray
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen(self.amps, 2))

    @property
    def dims(self) -> tuple[int, int]:
        return self.amps.shape

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def signal_tail(self) -> float:
        return tail_fraction(np.sqrt(np.sum(np.abs(self.amps) ** 2, axis=1)))

    def idler_tail(self) -> float:
        return tail_fraction(np.sqrt(np.sum(np.abs(self.amps) ** 2, axis=0)))


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Raw, unnormalized-by-truncation coefficients ``exp(-|a|^2/2) a^n / sqrt(n!)``.

    Evaluated in log space so large ``n`` neither overflows nor loses relative
    precision. No tail check is made.
    """
    alpha = complex(alpha)
    n = np.arange(dim)
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    r = abs(alpha)
    log_mag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def coherent_state(alpha: complex, trunc: Truncation) -> StateVec:
    """Truncated coherent state ``|alpha>``, renormalized to unit norm.

    Raises ``TruncationTooSmall`` if the Poisson mass beyond ``dim - 1`` (or
    in the top few kept levels) reaches ``trunc.tail_tol``.
    """
    raw = coherent_amplitudes(alpha, trunc.dim)
    kept = float(np.sum(np.abs(raw) ** 2))
    lost = max(1.0 - kept, 0.0)
    if lost >= trunc.tail_tol and lost > 0.0:
        raise TruncationTooSmall(
            f"coherent state alpha={complex(alpha)}: Poisson tail {lost:.3e} beyond dim={trunc.dim}"
        )
    _check_tail(raw, trunc.tail_tol, f"coherent state alpha={complex(alpha)}")
    return StateVec(raw / math.sqrt(kept), trunc, tail_mass=lost)


def number_state(n: int, trunc: Truncation) -> StateVec:
    if not 0 <= n < trunc.dim:
        raise DimensionMismatch(f"|{n}> does not fit in dim={trunc.dim}")
    amps = np.zeros(trunc.dim, dtype=complex)
    amps[n] = 1.0
    _check_tail(amps, trunc.tail_tol, f"number state |{n}>")
    return StateVec(amps, trunc)


def ladder(state: StateVec, direction: Literal["raise", "lower"]) -> StateVec:
    """Apply the creation (``"raise"``) or annihilation (``"lower"``) operator.

    The result is not normalized.
    """
    a = state.amps
    dim = state.dim
    out = np.zeros(dim, dtype=complex)
    n = np.arange(dim)
    if direction == "lower":
        out[:-1] = np.sqrt(n[1:]) * a[1:]
    elif direction == "raise":
        out[1:] = np.sqrt(n[1:]) * a[:-1]
        overflow = dim * abs(a[-1]) ** 2
        total = state.norm_sq
        if total > 0 and overflow / total > state.trunc.tail_tol:
            raise TruncationTooSmall(f"raising pushed {overflow / total:.3e} of the norm past dim={dim}")
    else:
        raise ValueError(f"direction must be 'raise' or 'lower', got {direction!r}")
    _check_tail(out, state.trunc.tail_tol, f"ladder {direction}")
    return StateVec(out, state.trunc)


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float))


def annihilation_matrix(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def displacement_matrix(beta: complex, trunc: Truncation) -> np.ndarray:
    """Matrix elements ``<m|D(beta)|n>`` for ``0 <= m, n < dim``.

    Uses the associated-Laguerre closed form. Along each sub-diagonal
    ``m = n + k`` the normalized elements
    ``E_n = sqrt(n!/(n+k)!) beta^k exp(-|beta|^2/2) L_n^(k)(|beta|^2)``
    obey the three-term recurrence

        sqrt((n+1)(n+1+k)) E_{n+1} = (2n+1+k-x) E_n - sqrt(n(n+k)) E_{n-1}

    seeded with ``E_0 = <k|beta>``. The upper triangle follows from
    ``D(beta)^dagger = D(-beta)``.
    """
    beta = complex(beta)
    dim = trunc.dim
    x = abs(beta) ** 2
    k = np.arange(dim, dtype=float)
    lower = np.zeros((dim, dim), dtype=complex)

    e_prev = np.zeros(dim, dtype=complex)
    e_cur = coherent_amplitudes(beta, dim)
    for n in range(dim):
        valid = dim - n  # offsets k = 0 .. dim-1-n still land inside the matrix
        kk = np.arange(valid)
        lower[n + kk, n] = e_cur[:valid]
        if n == dim - 1:
            break
        e_next = ((2 * n + 1 + k - x) * e_cur - np.sqrt(n * (n + k)) * e_prev) / np.sqrt(
            (n + 1) * (n + 1 + k)
        )
        e_prev, e_cur = e_cur, e_next

    sign = (-1.0) ** (np.arange(dim)[:, None] - np.arange(dim)[None, :])
    upper = (sign * lower).conj().T
    mat = np.tril(lower) + np.triu(upper, k=1)

    half = dim // 2
    gram = mat[:half] @ mat[:half].conj().T
    defect = float(np.max(np.abs(gram - np.eye(half)))) if half else 0.0
    if defect > UNITARITY_TOL:
        raise TruncationTooSmall(
            f"displacement beta={beta}: unitarity defect {defect:.2e} on the lower {half} levels "
            f"at dim={dim}"
        )
    return mat


def displaced_number_state(beta: complex, n: int, trunc: Truncation) -> StateVec:
    """Normalized ``D(beta)|n>``.

    Built as ``(a^dag - conj(beta))^n |beta> / sqrt(n!)``, which needs only
    ``n`` raisings of the coherent state and so stays valid at cutoffs where
    the full :func:`displacement_matrix` fails its unitarity check.
    """
    if not 0 <= n < trunc.dim:
        raise DimensionMismatch(f"|{n}> does not fit in dim={trunc.dim}")
    beta = complex(beta)
    state = coherent_state(beta, trunc)
    amps = state.amps
    for k in range(1, n + 1):
        raised = ladder(StateVec(amps, trunc), "raise").amps
        amps = (raised - beta.conjugate() * amps) / math.sqrt(k)
    _check_tail(amps, trunc.tail_tol, f"displaced number state beta={beta}, n={n}")
    return StateVec(amps, trunc, tail_mass=state.tail_mass).normalized()


def inner_product(a: StateVec, b: StateVec) -> complex:
    """``<a|b>`` (antilinear in the first argument)."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} and {b.dim} differ")
    return complex(np.vdot(a.amps, b.amps))


def overlap_sq(a: StateVec, b: StateVec) -> float:
    """Phase-insensitive ``|<a|b>|^2 / (<a|a><b|b>)``."""
    return abs(inner_product(a, b)) ** 2 / (a.norm_sq * b.norm_sq)


def tensor(signal: StateVec, idler: StateVec) -> TwoModeState:
    tol = min(signal.trunc.tail_tol, idler.trunc.tail_tol)
    return TwoModeState(np.outer(signal.amps, idler.amps), tail_tol=tol)


def project_idler(ts: TwoModeState, m: int) -> tuple[StateVec, float]:
    """Project the idler onto ``|m>``.

    Returns the (unnormalized) conditional signal state and its squared norm,
    which is the probability of the idler outcome ``m``.
    """
    dim_s, dim_i = ts.dims
    if not 0 <= m < dim_i:
        raise DimensionMismatch(f"idler outcome {m} outside dim_i={dim_i}")
    sig = StateVec(ts.amps[:, m].copy(), Truncation(dim_s, ts.tail_tol))
    return sig, sig.norm_sq
