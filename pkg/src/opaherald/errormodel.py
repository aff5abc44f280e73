"""Fidelity of the heralded state under detector dark counts and photon loss.

Outcome ``(j, k)`` means ``j`` photons actually entered the idler and ``k``
left it, while both detectors reported one. Detector D1 (heralding the idler
input) contributes ``d`` for ``j = 0`` and ``1 - d`` for ``j = 1``; detector
D2 (idler output) contributes ``d``, ``1 - d - l`` and ``l`` for
``k = 0, 1, 2``.

The weights leave out the probabilities of generating each ``(j, k)`` in
the amplifier. Keeping only ``k <= 1`` gives the lower bound, whose weights
sum to ``1 - l``. The full model adds the two ``k = 2`` terms weighted
``d*l`` and ``(1-d)*l``, which is the unique completion that keeps the D1 x D2
product structure and sums to one; that completion is a modelling choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .amplifier import AmplifierParams, herald
from .errors import InvalidModel, ZeroProbability
from .fock import StateVec, Truncation, inner_product
from .heralded import closed_output, output_truncation

OUTCOMES = tuple((j, k) for j in (0, 1) for k in (0, 1, 2))


@dataclass(frozen=True)
class ErrorModel:
    d: float
    l: float  # noqa: E741

    def __post_init__(self):
        d, l = float(self.d), float(self.l)  # noqa: E741
        if not (math.isfinite(d) and 0.0 <= d <= 0.5):
            raise InvalidModel(f"dark-count probability d must lie in [0, 0.5], got {self.d!r}")
        if not (math.isfinite(l) and 0.0 <= l < 1.0):
            raise InvalidModel(f"loss probability l must lie in [0, 1), got {self.l!r}")
        if d + l > 1.0:
            raise InvalidModel(f"d + l must not exceed 1, got {d + l}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "l", l)

    def input_weight(self, j: int) -> float:
        return (self.d, 1.0 - self.d)[j]

    def output_weight(self, k: int) -> float:
        return (self.d, 1.0 - self.d - self.l, self.l)[k]

    def weight(self, j: int, k: int) -> float:
        return self.input_weight(j) * self.output_weight(k)


@dataclass(frozen=True, eq=False)
class Outcome:
    state: StateVec | None
    weight: float
    overlap_sq: float


@dataclass(frozen=True, eq=False)
class OutcomeTable:
    """Per-outcome states, weights and squared overlaps with the ideal output."""

    psi: StateVec
    outcomes: dict

    def __getitem__(self, jk: tuple[int, int]) -> Outcome:
        return self.outcomes[jk]

    def total_weight(self, include_two_photon: bool = True) -> float:
        return sum(o.weight for (j, k), o in self.outcomes.items() if include_two_photon or k < 2)

    def fidelity(self, include_two_photon: bool = True) -> float:
        return sum(
            o.weight * o.overlap_sq
            for (j, k), o in self.outcomes.items()
            if include_two_photon or k < 2
        )


def _table_truncation(alpha: complex) -> Truncation:
    return output_truncation(alpha)


def outcome_state(j: int, k: int, alpha: complex, g: float, trunc: Truncation | None = None) -> StateVec:
    """Normalized signal state for idler input ``|j>`` and detected output ``|k>``."""
    if (j, k) not in OUTCOMES:
        raise ValueError(f"outcome ({j}, {k}) is outside {{0,1}} x {{0,1,2}}")
    if trunc is None:
        trunc = _table_truncation(alpha)
    state, _ = herald(AmplifierParams(g), alpha, j, k, trunc)
    return state


def outcome_table(
    alpha: complex, g: float, model: ErrorModel, trunc: Truncation | None = None
) -> OutcomeTable:
    """Evaluate all six outcomes.

    An outcome the amplifier cannot produce (for example ``k != j`` at
    ``g = 1``) is recorded with ``state=None`` and zero overlap.
    """
    if trunc is None:
        trunc = _table_truncation(alpha)
    psi = closed_output(alpha, g, trunc).psi
    rows = {}
    for j, k in OUTCOMES:
        try:
            state = outcome_state(j, k, alpha, g, trunc)
        except ZeroProbability:
            state, ov = None, 0.0
        else:
            ov = min(abs(inner_product(state, psi)) ** 2, 1.0)
        rows[(j, k)] = Outcome(state, model.weight(j, k), ov)
    return OutcomeTable(psi, rows)


def _check_model(model) -> ErrorModel:
    if not isinstance(model, ErrorModel):
        raise InvalidModel(f"expected an ErrorModel, got {type(model).__name__}")
    return model


def fidelity_lower_bound(alpha: complex, g: float, model: ErrorModel, trunc: Truncation | None = None) -> float:
    """Fidelity keeping only outcomes with ``k <= 1`` (two-photon states taken as orthogonal)."""
    model = _check_model(model)
    return outcome_table(alpha, g, model, trunc).fidelity(include_two_photon=False)


def fidelity_full(alpha: complex, g: float, model: ErrorModel, trunc: Truncation | None = None) -> float:
    model = _check_model(model)
    return outcome_table(alpha, g, model, trunc).fidelity(include_two_photon=True)
