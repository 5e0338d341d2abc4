"""Single-study Bayes factors and conversions among T^2, Lambda, p and BF.

All Bayes factors live on the ``2 log BF`` scale inside :class:`LogBF`
values carrying an explicit orientation (evidence for the alternative,
``BF10``, or for the null, ``BF01``). Raw Bayes factors are only
materialised at reporting boundaries, so nothing here overflows even for
overwhelming evidence.

Two prior families are covered:

* Zellner g-prior: closed forms from the coefficient of determination
  (``gprior_bf10_from_r2``), from the t statistic (``gprior_bf10_from_t``),
  the nested-nuisance variant (``gprior_bf01_nuisance``), and the exact
  raw-data conjugate form in log-determinant shape (``nig_bf10_rawdata``).
* JZS (Cauchy on the standardised effect): ``jzs_bf10`` integrates the
  noncentral-t likelihood against the Cauchy prior with an adaptive
  Gauss-Kronrod rule after the substitution ``effect = tan(theta)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .distributions import nct_logpdf, t_logpdf
from .errors import DomainError, QuadratureError, RangeError, SingularMatrixError
from .quadrature import adaptive_gauss_kronrod

__all__ = [
    "Orientation",
    "Sign",
    "LogBF",
    "RawDataset",
    "StudySummary",
    "two_sample_ss",
    "gprior_bf10_from_r2",
    "gprior_bf01_nuisance",
    "nig_bf10_rawdata",
    "gprior_bf10_from_t",
    "lambda_to_t2",
    "t2_to_lambda",
    "bf_to_t2",
    "p_to_t2",
    "jzs_bf10",
]


class Orientation(enum.Enum):
    """Which model the Bayes factor favours when it exceeds one."""

    BF10 = "BF10"
    BF01 = "BF01"

    def flipped(self):
        return Orientation.BF01 if self is Orientation.BF10 else Orientation.BF10


class Sign(enum.Enum):
    """Direction of the estimated effect; UNKNOWN for undirectional reports."""

    POS = "+"
    NEG = "-"
    UNKNOWN = "?"

    @property
    def factor(self):
        """+1 / -1 multiplier, or None when the direction is unknown."""
        if self is Sign.POS:
            return 1.0
        if self is Sign.NEG:
            return -1.0
        return None


@dataclass(frozen=True)
class LogBF:
    """A Bayes factor stored as ``2 log BF`` plus its orientation."""

    two_log_bf: float
    orientation: Orientation = Orientation.BF10

    def flip(self) -> "LogBF":
        """Exchange numerator and denominator models; negates the scale."""
        return LogBF(-self.two_log_bf, self.orientation.flipped())

    def as_bf10(self) -> "LogBF":
        return self if self.orientation is Orientation.BF10 else self.flip()

    @property
    def bayes_factor(self) -> float:
        """The raw Bayes factor, exp(two_log_bf / 2); may overflow to inf."""
        return math.exp(self.two_log_bf / 2.0)


@dataclass(frozen=True)
class RawDataset:
    """Raw data for the exact conjugate Bayes factor.

    ``x_nuisance`` is the full-rank n x q design of the null model
    (including the intercept column); ``x_interest`` holds the p tested
    covariates.
    """

    y: np.ndarray
    x_nuisance: np.ndarray
    x_interest: np.ndarray

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        x0 = np.atleast_2d(np.asarray(self.x_nuisance, dtype=float))
        x1 = np.atleast_2d(np.asarray(self.x_interest, dtype=float))
        if x0.shape[0] != y.size or x1.shape[0] != y.size:
            raise DomainError("design matrices must have one row per response")
        if y.size <= x0.shape[1] + x1.shape[1] + 1:
            raise DomainError("need n > p + q + 1 observations")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x_nuisance", x0)
        object.__setattr__(self, "x_interest", x1)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def q(self) -> int:
        return self.x_nuisance.shape[1]

    @property
    def p(self) -> int:
        return self.x_interest.shape[1]


@dataclass(frozen=True)
class StudySummary:
    """Per-study summary statistics, as extracted from a report.

    ``nu`` defaults to ``n - 2`` (two-sample comparison or simple
    regression); pass ``nu`` explicitly for the one-sample ``n - 1``
    convention, it is never inferred. ``ss_x`` is the covariate sum of
    squares; for a two-sample design it equals ``n1 * n2 / (n1 + n2)``.
    """

    n: int
    t_stat: float | None = None
    nu: float | None = None
    ss_x: float | None = None
    sign: Sign = Sign.UNKNOWN

    def __post_init__(self):
        if self.n < 3:
            raise DomainError("study sample size must be at least 3")
        if self.nu is None:
            object.__setattr__(self, "nu", float(self.n - 2))
        if self.nu <= 0:
            raise DomainError("degrees of freedom must be positive")
        if self.ss_x is not None and self.ss_x <= 0:
            raise DomainError("ss_x must be positive")


def two_sample_ss(n1: int, n2: int) -> float:
    """Covariate sum of squares of a two-group indicator: n1 n2 / (n1 + n2)."""
    if n1 <= 0 or n2 <= 0:
        raise DomainError("group sizes must be positive")
    return n1 * n2 / float(n1 + n2)


def _check_g(g: float) -> float:
    g = float(g)
    if g <= 0.0:
        raise DomainError("g-prior scale g must be positive")
    return g


def gprior_bf10_from_r2(n: int, p: int, r2_1: float, g: float) -> LogBF:
    """g-prior Bayes factor from the alternative model's R^2.

    ``2 log BF10 = (n-p-1) log(1+g) - (n-1) log(1 + g (1 - R1^2))``.
    """
    g = _check_g(g)
    if not 0.0 <= r2_1 < 1.0:
        raise DomainError("r2_1 must lie in [0, 1)")
    if n <= p + 1:
        raise DomainError("need n > p + 1")
    value = (n - p - 1) * np.log1p(g) - (n - 1) * np.log1p(g * (1.0 - r2_1))
    return LogBF(float(value), Orientation.BF10)


def gprior_bf01_nuisance(
    n: int, p: int, q: int, r2_0: float, r2_1: float, g: float
) -> LogBF:
    """Null-oriented g-prior Bayes factor with q nuisance covariates.

    ``2 log BF01 = -(n-p-1) log(1+g) + (n-q-1) log(1 + g (1-R1^2)/(1-R0^2))``
    for the null model (R0^2) nested in the alternative (R1^2).
    """
    g = _check_g(g)
    if not 0.0 <= r2_0 < 1.0 or not 0.0 <= r2_1 < 1.0:
        raise DomainError("coefficients of determination must lie in [0, 1)")
    if r2_0 > r2_1:
        raise DomainError("nesting violated: r2_0 exceeds r2_1")
    value = -(n - p - 1) * np.log1p(g) + (n - q - 1) * np.log1p(
        g * (1.0 - r2_1) / (1.0 - r2_0)
    )
    return LogBF(float(value), Orientation.BF01)


def nig_bf10_rawdata(data: RawDataset, v_beta: np.ndarray) -> LogBF:
    """Exact conjugate Bayes factor from raw data, in log-determinant form.

    With ``X`` the interest design residualised against the nuisance block,
    ``BF10 = |V|^{-1/2} |X'X + V^{-1}|^{-1/2}
    {1 - y'X (X'X + V^{-1})^{-1} X'y / (y'y - y'P0 y)}^{-n/2}``.
    Linear systems are solved by Cholesky factorisation; nothing is
    explicitly inverted except the p x p prior matrix.
    """
    v_beta = np.atleast_2d(np.asarray(v_beta, dtype=float))
    if v_beta.shape != (data.p, data.p):
        raise DomainError("v_beta must be p x p")
    y, x0, x1 = data.y, data.x_nuisance, data.x_interest
    try:
        c0 = np.linalg.cholesky(x0.T @ x0)
        v_chol = np.linalg.cholesky(v_beta)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("nuisance design or prior matrix singular") from exc
    proj = _chol_solve(c0, x0.T @ x1)
    x = x1 - x0 @ proj
    v_inv = _chol_solve(v_chol, np.eye(data.p))
    a = x.T @ x + v_inv
    try:
        a_chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("X'X + V^{-1} is numerically singular") from exc
    xty = x.T @ y
    quad = float(xty @ _chol_solve(a_chol, xty))
    rss0 = float(y @ y - y @ x0 @ _chol_solve(c0, x0.T @ y))
    braces = 1.0 - quad / rss0
    if braces <= 0.0:
        raise SingularMatrixError("residual ratio collapsed; data degenerate")
    ld_v = 2.0 * float(np.sum(np.log(np.diag(v_chol))))
    ld_a = 2.0 * float(np.sum(np.log(np.diag(a_chol))))
    value = -ld_v - ld_a - data.n * np.log(braces)
    return LogBF(float(value), Orientation.BF10)


def _chol_solve(chol, b):
    z = np.linalg.solve(chol, b)
    return np.linalg.solve(chol.T, z)


def gprior_bf10_from_t(t2: float, n: int, g: float) -> LogBF:
    """g-prior Bayes factor as a function of the squared t statistic.

    ``2 log BF10 = (n-2) log(1+g) - (n-1) log[1 + g (T^2/(n-2) + 1)^{-1}]``;
    strictly increasing in ``t2`` for fixed ``n`` and ``g``.
    """
    g = _check_g(g)
    if n <= 2:
        raise DomainError("need n > 2")
    t2 = float(t2)
    if t2 < 0.0:
        raise DomainError("t2 must be nonnegative")
    value = (n - 2) * np.log1p(g) - (n - 1) * np.log1p(g / (t2 / (n - 2.0) + 1.0))
    return LogBF(float(value), Orientation.BF10)


def lambda_to_t2(lmbda: float, n: int) -> float:
    """Convert a likelihood-ratio statistic to T^2: ``nu (exp(L/n) - 1)``."""
    if n <= 2:
        raise DomainError("need n > 2")
    lmbda = float(lmbda)
    if lmbda < 0.0:
        raise DomainError("lambda must be nonnegative")
    return (n - 2.0) * math.expm1(lmbda / n)


def t2_to_lambda(t2: float, n: int) -> float:
    """Inverse of :func:`lambda_to_t2`: ``n log(1 + t2 / nu)``."""
    if n <= 2:
        raise DomainError("need n > 2")
    t2 = float(t2)
    if t2 < 0.0:
        raise DomainError("t2 must be nonnegative")
    return n * math.log1p(t2 / (n - 2.0))


def bf_to_t2(bf: LogBF, n: int, g: float) -> float:
    """Unique T^2 whose g-prior Bayes factor equals ``bf``.

    The map is monotone, so the inversion is algebraic: with
    ``c = [(n-2) log(1+g) - 2logBF10] / (n-1)``, ``T^2 = nu (1-u)/u`` for
    ``u = (e^c - 1)/g``. Raises ``RangeError`` outside the attainable band
    ``[-log(1+g), (n-2) log(1+g))``.
    """
    g = _check_g(g)
    if n <= 2:
        raise DomainError("need n > 2")
    b = bf.as_bf10().two_log_bf
    log1pg = math.log1p(g)
    lo = -log1pg
    hi = (n - 2) * log1pg
    if b > hi or (b < lo and not math.isclose(b, lo, rel_tol=0.0, abs_tol=1e-9)):
        raise RangeError(
            f"2logBF10={b:.6g} outside attainable range [{lo:.6g}, {hi:.6g})"
        )
    c = ((n - 2) * log1pg - b) / (n - 1.0)
    u = math.expm1(c) / g
    if u <= 0.0:
        raise RangeError("Bayes factor at or above the infinite-T asymptote")
    t2 = (n - 2.0) * (1.0 - u) / u
    return t2 if t2 > 1e-10 else 0.0  # snap float residue at the floor


def p_to_t2(p_two_sided: float, nu: float) -> float:
    """T^2 whose two-sided p-value under ``nu`` df equals ``p_two_sided``."""
    p = float(p_two_sided)
    if not 0.0 < p <= 1.0:
        raise DomainError("two-sided p-value must lie in (0, 1]")
    nu = float(nu)
    if nu <= 0.0:
        raise DomainError("degrees of freedom must be positive")
    x = sp.betaincinv(0.5 * nu, 0.5, p)
    return float(nu * (1.0 - x) / x)


# Offsets (in units of the effect-scale) at which the initial quadrature
# partition is anchored around the integrand peak, so narrow peaks are
# never missed by the first Gauss-Kronrod pass.
_PEAK_OFFSETS = np.array(
    [-200.0, -50.0, -16.0, -8.0, -4.0, -2.0, -1.0, 0.0,
     1.0, 2.0, 4.0, 8.0, 16.0, 50.0, 200.0]
)


def cauchy_theta_breakpoints(center: float, scale: float) -> np.ndarray:
    """Initial partition of (-pi/2, pi/2) for tan-substituted integrands."""
    interior = np.arctan(center + _PEAK_OFFSETS * scale)
    pts = np.unique(np.concatenate([[-np.pi / 2.0], interior, [np.pi / 2.0]]))
    return pts


def jzs_bf10(
    t_stat: float,
    nu: float,
    ss_x: float,
    epsabs: float = 1e-12,
    epsrel: float = 1e-8,
) -> LogBF:
    """JZS Bayes factor for one study from ``(T, nu, ss_x)``.

    Evaluates ``BF10 = int f_nu(T; sqrt(ss) b) cauchy(b) db / f_nu(T; 0)``
    by adaptive Gauss-Kronrod after ``b = tan(theta)`` (the standard-Cauchy
    weight becomes 1/pi on (-pi/2, pi/2)). The result depends on ``t_stat``
    only through ``|t_stat|``, which is what gets integrated, making the
    sign invariance exact. Quadrature failure raises ``QuadratureError``.
    """
    nu = float(nu)
    ss_x = float(ss_x)
    if nu <= 0.0:
        raise DomainError("degrees of freedom must be positive")
    if ss_x <= 0.0:
        raise DomainError("ss_x must be positive")
    t = abs(float(t_stat))
    ln_den = float(t_logpdf(t, nu))
    sq = math.sqrt(ss_x)

    def integrand(theta):
        effect = np.tan(theta)
        return np.exp(nct_logpdf(t, nu, sq * effect) - ln_den) / np.pi

    pts = cauchy_theta_breakpoints(t / sq, 1.0 / sq)
    value, _ = adaptive_gauss_kronrod(integrand, pts, epsabs=epsabs, epsrel=epsrel)
    if value <= 0.0:
        raise QuadratureError("JZS integral evaluated to a nonpositive value")
    return LogBF(2.0 * math.log(value), Orientation.BF10)
