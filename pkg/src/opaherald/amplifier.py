"""Two-mode parametric amplifier evolution and idler heralding.

The amplifier unitary is applied in its normally ordered, factored form

    S = (1/g) exp(-G a^dag b^dag) g^-(n_a + n_b) exp(G a b),

with each exponential expanded as a terminating power series on the
amplitude grid. :func:`evolve_expm_oracle` exponentiates the generator
``kappa_t (a b - a^dag b^dag)`` densely and exists only to cross-check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionTooLarge, InvalidGain, NonConvergent, TruncationTooSmall, ZeroProbability
from .fock import (
    DEFAULT_TAIL_TOL,
    StateVec,
    Truncation,
    TwoModeState,
    _check_tail,
    annihilation_matrix,
    coherent_state,
    number_state,
    project_idler,
    tensor,
)

SERIES_RTOL = 1e-16
EXPM_MAX_SIZE = 4000
MIN_HERALD_WEIGHT = 1e-300


@dataclass(frozen=True)
class AmplifierParams:
    """Gain ``g = cosh(kappa_t)`` and the derived ``G = sqrt(g^2 - 1)/g = tanh(kappa_t)``."""

    g: float

    def __post_init__(self):
        g = float(self.g)
        if not math.isfinite(g) or g < 1.0:
            raise InvalidGain(f"gain must be a finite real >= 1, got {self.g!r}")
        object.__setattr__(self, "g", g)

    @classmethod
    def from_kappa_t(cls, kappa_t: float) -> "AmplifierParams":
        return cls(math.cosh(kappa_t))

    @property
    def G(self) -> float:
        g = self.g
        return math.sqrt((g - 1.0) * (g + 1.0)) / g

    @property
    def G2(self) -> float:
        g = self.g
        return (g - 1.0) * (g + 1.0) / (g * g)

    @property
    def kappa_t(self) -> float:
        u = self.g - 1.0
        if u < 1e-12:
            # arccosh(1 + u) = sqrt(2u) (1 - u/12 + ...)
            return math.sqrt(2.0 * u)
        return math.log1p(u + math.sqrt(u * (self.g + 1.0)))


def _lower_both(a: np.ndarray) -> np.ndarray:
    dim_s, dim_i = a.shape
    out = np.zeros_like(a)
    out[:-1, :-1] = (
        np.sqrt(np.arange(1, dim_s))[:, None] * np.sqrt(np.arange(1, dim_i))[None, :] * a[1:, 1:]
    )
    return out


def _raise_both(a: np.ndarray) -> np.ndarray:
    dim_s, dim_i = a.shape
    out = np.zeros_like(a)
    out[1:, 1:] = (
        np.sqrt(np.arange(1, dim_s))[:, None] * np.sqrt(np.arange(1, dim_i))[None, :] * a[:-1, :-1]
    )
    return out


def _exp_series(amps: np.ndarray, coef: float, step, max_terms: int) -> np.ndarray:
    """``exp(coef * X) amps`` where ``step`` applies ``X``."""
    out = amps.copy()
    if coef == 0.0:
        return out
    scale = np.linalg.norm(amps)
    if scale == 0.0:
        return out
    term = amps
    for k in range(1, max_terms + 1):
        term = (coef / k) * step(term)
        out += term
        if np.linalg.norm(term) < SERIES_RTOL * scale:
            return out
    raise NonConvergent(f"series did not terminate within {max_terms} terms")


def pair_annihilation_factor(params: AmplifierParams, amps: np.ndarray, max_terms: int | None = None):
    """Apply ``exp(G a b)`` to a two-mode amplitude grid."""
    amps = np.asarray(amps, dtype=complex)
    limit = max_terms if max_terms is not None else min(amps.shape) + 1
    return _exp_series(amps, params.G, _lower_both, limit)


def evolve_factored(
    params: AmplifierParams,
    ts: TwoModeState,
    tail_tol: float | None = DEFAULT_TAIL_TOL,
    max_terms: int | None = None,
) -> TwoModeState:
    """Apply the amplifier via its factored form.

    Cost is ``O(terms * dim_s * dim_i)``; no operator matrix is built.
    ``tail_tol=None`` skips the output truncation checks, which is correct
    when only low idler components are used afterwards (see :func:`herald`).
    """
    g = params.g
    limit = max_terms if max_terms is not None else min(ts.dims) + 1
    amps = pair_annihilation_factor(params, ts.amps, limit)
    dim_s, dim_i = ts.dims
    total = np.arange(dim_s)[:, None] + np.arange(dim_i)[None, :]
    amps = amps * np.power(g, -total.astype(float))
    amps = _exp_series(amps, -params.G, _raise_both, limit) / g
    out = TwoModeState(amps, tail_tol=ts.tail_tol)

    if tail_tol is not None:
        in_norm = ts.norm_sq
        if in_norm > 0.0:
            leak = 1.0 - out.norm_sq / in_norm
            if leak > tail_tol:
                raise TruncationTooSmall(
                    f"amplifier g={g}: {leak:.3e} of the norm leaked past dims {ts.dims}"
                )
        worst = max(out.signal_tail(), out.idler_tail())
        if worst > tail_tol:
            raise TruncationTooSmall(f"amplifier g={g}: output tail {worst:.3e} at dims {ts.dims}")
    return out


def two_mode_generator(params: AmplifierParams, dims: tuple[int, int]) -> np.ndarray:
    """Dense ``kappa_t (a b - a^dag b^dag)`` on the flattened (signal, idler) space."""
    a = annihilation_matrix(dims[0])
    b = annihilation_matrix(dims[1])
    ab = np.kron(a, b)
    return params.kappa_t * (ab - ab.T)


def _chain_generator(kappa_t: float, p: int, q: int, length: int) -> np.ndarray:
    """Generator restricted to ``{|k+p, k+q> : k < length}`` (fixed ``n_s - n_i = p - q``)."""
    k = np.arange(length - 1)
    c = kappa_t * np.sqrt((k + 1.0 + p) * (k + 1.0 + q))
    return np.diag(c, 1) - np.diag(c, -1)


def oracle_headroom(params: AmplifierParams, rtol: float = 1e-30) -> int:
    """Extra chain levels after which pair amplitudes (which fall off as ``G^k``) drop below ``rtol``."""
    G = params.G
    if G == 0.0:
        return 1
    return int(math.ceil(math.log(rtol) / (2.0 * math.log(G)))) + 40


def evolve_expm_oracle(
    params: AmplifierParams,
    ts: TwoModeState,
    oracle_dim: int | None = None,
) -> TwoModeState:
    """Reference evolution by dense exponentiation of ``kappa_t (a b - a^dag b^dag)``.

    The generator conserves ``n_s - n_i``, so it is exponentiated on each
    invariant chain separately. Chains are extended to ``oracle_dim`` levels
    (default: :func:`oracle_headroom` levels past ``max(dims)``) before
    exponentiating and the result is cropped back to ``ts.dims``; with enough headroom this is the exact
    evolution projected onto the cutoff, the same object the factored form
    produces. ``oracle_dim = max(dims)`` with square dims reproduces the
    exponential of the truncated generator :func:`two_mode_generator`.
    """
    dim_s, dim_i = ts.dims
    if dim_s * dim_i > EXPM_MAX_SIZE:
        raise DimensionTooLarge(
            f"dense exponential needs dim_s*dim_i <= {EXPM_MAX_SIZE}, got {dim_s * dim_i}"
        )
    if oracle_dim is None:
        oracle_dim = max(dim_s, dim_i) + oracle_headroom(params)
    kappa_t = params.kappa_t
    src = ts.amps
    out = np.zeros_like(src)
    for delta in range(-(dim_i - 1), dim_s):
        p, q = max(delta, 0), max(-delta, 0)
        n_in = min(dim_s - p, dim_i - q)
        length = oracle_dim - max(p, q)
        if length <= 0:
            continue
        k_in = np.arange(n_in)
        vec = np.zeros(length, dtype=complex)
        vec[: min(n_in, length)] = src[k_in + p, k_in + q][:length]
        if not vec.any():
            continue
        evolved = scipy.linalg.expm(_chain_generator(kappa_t, p, q, length)) @ vec
        n_keep = min(n_in, length)
        out[k_in[:n_keep] + p, k_in[:n_keep] + q] = evolved[:n_keep]
    return TwoModeState(out, tail_tol=ts.tail_tol)


def herald_truncation(alpha: complex, idler_out: int, tail_tol: float = DEFAULT_TAIL_TOL) -> Truncation:
    """Default cutoff for :func:`herald`: the input coherent state plus ``idler_out`` raisings."""
    return Truncation.for_mean(abs(complex(alpha)) ** 2 + idler_out + 1, tail_tol)


def herald(
    params: AmplifierParams,
    alpha: complex,
    idler_in: int,
    idler_out: int,
    trunc: Truncation | None = None,
) -> tuple[StateVec, float]:
    """Signal state conditioned on ``|idler_in>`` in and ``|idler_out>`` detected.

    The input ``|alpha>_s |idler_in>_i`` is evolved with
    :func:`evolve_factored` and the idler projected onto ``|idler_out>``.
    Returns the normalized signal state and the projection weight.

    Only the full two-mode output can leak past the cutoff; the
    ``idler_out`` slice is fed by at most ``idler_out`` raisings, so its
    tail is what gets checked.
    """
    if trunc is None:
        trunc = herald_truncation(alpha, idler_out)
    if max(idler_in, idler_out) >= trunc.dim:
        raise ValueError(f"idler numbers ({idler_in}, {idler_out}) must be < dim={trunc.dim}")
    ts = tensor(coherent_state(alpha, trunc), number_state(idler_in, trunc))
    out = evolve_factored(params, ts, tail_tol=None)
    sig, weight = project_idler(out, idler_out)
    if weight < MIN_HERALD_WEIGHT:
        raise ZeroProbability(
            f"outcome (in={idler_in}, out={idler_out}) has weight {weight:.3e} at g={params.g}"
        )
    _check_tail(sig.amps, trunc.tail_tol, f"heralded state (in={idler_in}, out={idler_out})")
    sig = StateVec(sig.amps, trunc).normalized()
    return sig, weight
