"""Information criteria for fitted models and the selection rule.

QBIC penalizes by q * log(n) (natural log), QAIC by 2q.  Selection minimizes
the chosen criterion; exact ties go to the model with fewer parameters, then
to the lower model id.  The theoretical large-sample probability that the
penalty-2q criterion prefers a nesting model with dq extra parameters is
P(chi2_dq > 2 dq), exposed for diagnostics.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Literal

from scipy.special import gammaincc

Criterion = Literal["qbic", "qaic"]


@dataclass(frozen=True)
class CriterionValue:
    """Both criteria for one fitted candidate."""

    model_id: str
    qbic: float
    qaic: float
    q: int
    h_value: float
    converged: bool

    @classmethod
    def from_fit(cls, model_id: str, h_value: float, q: int, n: int, converged: bool):
        return cls(model_id, qbic(h_value, q, n), qaic(h_value, q), q, h_value, converged)


def qbic(h_value: float, q: int, n: int) -> float:
    """-2 h_value + q * log(n); requires n >= 2."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return -2.0 * h_value + q * math.log(n)


def qaic(h_value: float, q: int) -> float:
    """-2 h_value + 2 q."""
    return -2.0 * h_value + 2.0 * q


def select(values: Iterable[CriterionValue], criterion: Criterion) -> str:
    """Model id minimizing the criterion; ties -> smaller q, then lower id."""
    from .errors import EmptyCandidateList

    values = list(values)
    if not values:
        raise EmptyCandidateList("no candidates to select from")
    if criterion not in ("qbic", "qaic"):
        raise ValueError(f"unknown criterion {criterion!r}")
    best = min(values, key=lambda v: (getattr(v, criterion), v.q, v.model_id))
    return best.model_id


def qaic_overfit_probability(dq: int) -> float:
    """P(chi2_dq > 2 dq) via the regularized upper incomplete gamma Q(dq/2, dq)."""
    if dq < 1:
        raise ValueError("dq must be >= 1")
    return float(gammaincc(dq / 2.0, float(dq)))
