"""Closed-form description of the heralded amplifier output.

With ``beta = alpha / g`` the post-selected signal state is

    |psi> ~ (1/g^2 - G^2 n) |beta>
          = C0 |beta> + C1 D(beta)|1>,

a superposition of the attenuated coherent state and the displaced single
photon state, heralded with probability ``exp(-|G alpha|^2) N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplifier import AmplifierParams
from .errors import InvalidAmplitude, InvalidGain
from .fock import (
    DEFAULT_TAIL_TOL,
    StateVec,
    Truncation,
    _check_tail,
    coherent_state,
    ladder,
)


def _params(g: float) -> AmplifierParams:
    return AmplifierParams(g)


def output_truncation(alpha: complex, tail_tol: float = DEFAULT_TAIL_TOL) -> Truncation:
    return Truncation.for_mean(abs(complex(alpha)) ** 2 + 3, tail_tol)


@dataclass(frozen=True, eq=False)
class HeraldedState:
    """Normalized heralded output and its analytic decomposition.

    Attributes
    ----------
    psi : StateVec
        Output signal state, unit norm.
    c0, c1 : complex
        Coefficients on ``|beta>`` and ``D(beta)|1>``.
    norm_N : float
        Squared norm of ``(1/g^2 - G^2 n)|beta>``.
    p_success : float
        Heralding probability.
    beta : complex
        Attenuated amplitude ``alpha / g``.
    """

    psi: StateVec
    c0: complex
    c1: complex
    norm_N: float
    p_success: float
    beta: complex
    alpha: complex
    g: float


def _bracket(alpha: complex, g: float) -> tuple[complex, float, float, float]:
    G2 = _params(g).G2
    beta = complex(alpha) / g
    x = abs(beta) ** 2
    a = 1.0 / (g * g) - x * G2
    norm_n = a * a + x * G2 * G2
    return beta, a, norm_n, G2


def closed_output(alpha: complex, g: float, trunc: Truncation | None = None) -> HeraldedState:
    """Heralded output state built coefficient-wise in the number basis."""
    params = _params(g)
    g = params.g
    if trunc is None:
        trunc = output_truncation(alpha)
    beta, a, norm_n, G2 = _bracket(alpha, g)
    coh = coherent_state(beta, trunc)
    n = np.arange(trunc.dim)
    vec = (1.0 / (g * g) - G2 * n) * coh.amps
    _check_tail(vec, trunc.tail_tol, f"heralded output alpha={complex(alpha)}, g={g}")
    psi = StateVec(vec, trunc, tail_mass=coh.tail_mass).normalized()
    sq = math.sqrt(norm_n)
    return HeraldedState(
        psi=psi,
        c0=complex(a / sq),
        c1=complex(-beta * G2 / sq),
        norm_N=norm_n,
        p_success=success_probability(alpha, g),
        beta=beta,
        alpha=complex(alpha),
        g=g,
    )


def success_probability(alpha: complex, g: float) -> float:
    params = _params(g)
    _, _, norm_n, G2 = _bracket(alpha, params.g)
    return math.exp(-G2 * abs(complex(alpha)) ** 2) * norm_n


def unnormalized_operator_form(alpha: complex, g: float, trunc: Truncation) -> StateVec:
    """``exp(-|G alpha|^2/2) (1/g^2 - alpha G^2 a^dag / g) |alpha/g>``.

    This is the state before the number-operator rewrite; its squared norm
    is the success probability.
    """
    params = _params(g)
    g, G2 = params.g, params.G2
    alpha = complex(alpha)
    coh = coherent_state(alpha / g, trunc)
    raised = ladder(coh, "raise")
    vec = math.exp(-0.5 * G2 * abs(alpha) ** 2) * (coh.amps / (g * g) - alpha * G2 / g * raised.amps)
    return StateVec(vec, trunc)


def photon_added_state(beta: complex, trunc: Truncation, k: int = 1) -> StateVec:
    """Normalized ``(a^dag)^k |beta>``."""
    state = coherent_state(beta, trunc)
    for _ in range(k):
        state = ladder(state, "raise")
    return state.normalized()


def gain_displaced_number(alpha: complex) -> float:
    """Gain at which the output is exactly ``D(alpha/g)|1>``."""
    x = abs(complex(alpha)) ** 2
    if not x > 1.0:
        raise InvalidAmplitude(f"displaced-number gain needs |alpha| > 1, got |alpha|^2={x}")
    return 1.0 / math.sqrt(1.0 - 1.0 / x)


def gain_orthogonal_photon_added(alpha: complex) -> float:
    """Gain at which the output is orthogonal to the photon-added state ``a^dag|alpha/g>``."""
    x = abs(complex(alpha)) ** 2
    if x == 0.0:
        raise InvalidAmplitude("photon-added orthogonality gain is undefined for alpha = 0")
    # (2 - x + sqrt(x^2 + 4)) / 2 without the cancellation at large x
    return math.sqrt(1.0 + 2.0 / (math.sqrt(x * x + 4.0) + x))


def vanishing_coefficient_index(g: float) -> float:
    """Photon number ``n0 = 1/(g^2 - 1)`` at which the output coefficient vanishes."""
    g = float(g)
    if not g > 1.0:
        raise InvalidGain(f"no vanishing coefficient for g <= 1 (got {g})")
    return 1.0 / ((g - 1.0) * (g + 1.0))


def q_zero_location(alpha: complex, g: float) -> complex:
    """Coherent amplitude ``gamma`` with ``<gamma|psi> = 0``.

    From ``<gamma|(1/g^2 - G^2 n)|beta> = (1/g^2 - G^2 conj(gamma) beta) <gamma|beta>``
    the zero sits at ``conj(gamma) = n0 / beta``.
    """
    n0 = vanishing_coefficient_index(g)
    alpha = complex(alpha)
    if alpha == 0:
        raise InvalidAmplitude("for alpha = 0 the output is the vacuum, whose Q function has no zero")
    beta = alpha / float(g)
    return n0 / beta.conjugate()
