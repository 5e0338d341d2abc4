"""Discrete evidence grading and chance-corrected agreement.

The four-level grading of ``2 log BF10`` (thresholds 2, 6, 10) follows the
Kass-Raftery reporting convention; boundaries are half-open ``[lo, hi)``,
so a value of exactly 2 grades as POSITIVE, 6 as STRONG and 10 as
VERY_STRONG. Values below zero (evidence leaning to the null) fold into
the lowest grade; callers wanting to grade support *for* the null flip
the orientation first and classify the ``BF01`` value.
"""

from __future__ import annotations

import enum

import numpy as np

from .bf_core import LogBF, Orientation
from .errors import DomainError, UndefinedAgreementError

__all__ = ["EvidenceLevel", "classify", "AgreementTable", "weighted_kappa"]


class EvidenceLevel(enum.IntEnum):
    BARE_MENTION = 0
    POSITIVE = 1
    STRONG = 2
    VERY_STRONG = 3

    @property
    def label(self) -> str:
        return {
            EvidenceLevel.BARE_MENTION: "not worth more than a bare mention",
            EvidenceLevel.POSITIVE: "positive",
            EvidenceLevel.STRONG: "strong",
            EvidenceLevel.VERY_STRONG: "very strong",
        }[self]


_BOUNDS = (2.0, 6.0, 10.0)


def classify(bf: LogBF) -> EvidenceLevel:
    """Grade a BF10-oriented Bayes factor on the four-level evidence scale."""
    if bf.orientation is not Orientation.BF10:
        raise DomainError("classify expects a BF10-oriented Bayes factor; flip first")
    x = bf.two_log_bf
    if x < _BOUNDS[0]:
        return EvidenceLevel.BARE_MENTION
    if x < _BOUNDS[1]:
        return EvidenceLevel.POSITIVE
    if x < _BOUNDS[2]:
        return EvidenceLevel.STRONG
    return EvidenceLevel.VERY_STRONG


class AgreementTable:
    """C x C contingency table of (reference level, estimator level) counts."""

    def __init__(self, counts):
        counts = np.asarray(counts, dtype=float)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise DomainError("agreement table must be square")
        if np.any(counts < 0) or not np.all(np.isfinite(counts)):
            raise DomainError("agreement table counts must be finite and nonnegative")
        self.counts = counts

    @classmethod
    def from_levels(cls, reference, estimator, size: int = 4) -> "AgreementTable":
        reference = np.asarray(reference, dtype=int)
        estimator = np.asarray(estimator, dtype=int)
        if reference.shape != estimator.shape:
            raise DomainError("paired classifications must have equal length")
        counts = np.zeros((size, size))
        np.add.at(counts, (reference, estimator), 1.0)
        return cls(counts)

    @property
    def total(self) -> float:
        return float(self.counts.sum())


def weighted_kappa(table: AgreementTable) -> float:
    """Cohen's kappa with quadratic disagreement weights ((i-j)/(C-1))^2.

    Equals one iff all mass sits on the diagonal. When the expected
    disagreement is zero (all mass in a single cell) the statistic is
    undefined and ``UndefinedAgreementError`` is raised rather than
    returning NaN.
    """
    counts = table.counts
    n = counts.sum()
    if n <= 0:
        raise DomainError("agreement table is empty")
    size = counts.shape[0]
    i, j = np.indices(counts.shape)
    penalty = ((i - j) / (size - 1.0)) ** 2
    observed = float((penalty * counts).sum()) / n
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    expected = float((penalty * np.outer(rows, cols)).sum()) / (n * n)
    if expected == 0.0:
        raise UndefinedAgreementError(
            "expected disagreement is zero (all mass in one cell)"
        )
    return 1.0 - observed / expected
