"""Meta-analytic combination of study summaries into one Bayes factor.

Three information regimes govern which estimator is legal:

* DETAILED: statistic, effect direction and covariate sum of squares are
  known for every study -> inverse-variance weighting of the t statistics
  (``meta_bf_g_detailed``) or the Cauchy-prior product integral
  (``meta_bf_jzs``).
* PARTIAL: statistic, direction and sample size -> sample-size-fraction
  weights (``meta_bf_g_partial``).
* LIMITED: undirectional statistic and sample size only -> weighted
  combination of |T| values (``meta_bf_g_limited``), the two-sided analogue
  of a one-sided Stouffer combination.

Studies that do not meet the selected method's requirements produce a hard
``InsufficientDataError`` listing the offending study ids; the estimators
never silently downgrade to a weaker regime, because mixing weighting
schemes across studies has no agreed-upon justification.

Classical p-value combiners (Fisher, Stouffer, and the two-sided
Pearson-Owen statistic) are included for the LIMITED regime and for
reference output.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import bf_core
from .bf_core import (
    LogBF,
    Orientation,
    Sign,
    StudySummary,
    cauchy_theta_breakpoints,
    gprior_bf10_from_t,
    two_sample_ss,
)
from .distributions import h_factor, chisq_sf, nct_logpdf, normal_cdf, normal_quantile, t_logpdf
from .errors import DomainError, InsufficientDataError, QuadratureError, RangeError
from .quadrature import adaptive_gauss_kronrod

__all__ = [
    "ReportedAs",
    "InformationCase",
    "WeightScheme",
    "MetaMethod",
    "GRule",
    "StudyRecord",
    "StudyWeights",
    "MetaResult",
    "build_record",
    "detect_case",
    "normalize_to_abs_t",
    "variance_weights",
    "sample_fraction_weights",
    "inverse_normal_combine",
    "meta_bf_g_detailed",
    "meta_bf_g_partial",
    "meta_bf_g_limited",
    "meta_bf_jzs",
    "fisher_combine",
    "stouffer_combine",
    "pearson_owen_stat",
]

P_VALUE_CLAMP = (1e-300, 1.0 - 1e-16)


class ReportedAs(enum.Enum):
    """Which statistic a study actually published."""

    T_STAT = "t_stat"
    T_SQUARED = "t_squared"
    LAMBDA = "lambda"
    P_VALUE_TWO_SIDED = "p_two_sided"
    BAYES_FACTOR_G = "two_log_bf_g"
    BAYES_FACTOR_JZS = "two_log_bf_jzs"


class InformationCase(enum.Enum):
    DETAILED = "detailed"
    PARTIAL = "partial"
    LIMITED = "limited"


class WeightScheme(enum.Enum):
    VARIANCE = "variance"
    SAMPLE_FRACTION = "sample_fraction"
    CUSTOM = "custom"


class MetaMethod(enum.Enum):
    META_BF_G_D = "meta_bf_g_D"
    META_BF_G_P = "meta_bf_g_P"
    META_BF_G_L = "meta_bf_g_L"
    META_BF_JZS = "meta_bf_jzs"


@dataclass(frozen=True)
class GRule:
    """How the g-prior scale is chosen.

    Default: ``g_k = n_k`` when converting a single study's Bayes factor
    and ``g = N`` for the synthesized statistic. A fixed override applies
    to both.
    """

    fixed: float | None = None

    def study_g(self, n: int) -> float:
        return float(self.fixed if self.fixed is not None else n)

    def total_g(self, n_total: int) -> float:
        return float(self.fixed if self.fixed is not None else n_total)


@dataclass(frozen=True)
class StudyRecord:
    """One study's published evidence.

    ``value`` is the reported statistic in the scale named by
    ``reported_as`` (Bayes factors on the 2 log BF10 scale). The summary
    carries sample size, degrees of freedom, covariate sum of squares and
    effect direction where known.
    """

    study_id: str
    reported_as: ReportedAs
    value: float
    summary: StudySummary
    group_sizes: tuple[int, int] | None = None

    def __post_init__(self):
        if self.group_sizes is not None:
            n1, n2 = self.group_sizes
            if n1 + n2 != self.summary.n:
                raise DomainError(
                    f"study {self.study_id}: group sizes must sum to n"
                )
        if self.reported_as is ReportedAs.T_STAT:
            if self.summary.t_stat is None or self.summary.t_stat != self.value:
                raise DomainError(
                    f"study {self.study_id}: t_stat record must carry the t in its summary"
                )

    @property
    def ss_x(self) -> float | None:
        return self.summary.ss_x

    @property
    def sign(self) -> Sign:
        return self.summary.sign


def build_record(
    study_id: str,
    *,
    t_stat: float | None = None,
    t_squared: float | None = None,
    lmbda: float | None = None,
    p_two_sided: float | None = None,
    two_log_bf_g: float | None = None,
    two_log_bf_jzs: float | None = None,
    n: int | None = None,
    n1: int | None = None,
    n2: int | None = None,
    ss_x: float | None = None,
    sign: Sign | str | None = None,
    nu: float | None = None,
) -> StudyRecord:
    """Assemble a validated StudyRecord from loosely-typed inputs.

    Exactly one statistic argument must be given. ``n`` is derived from
    the group sizes when absent, and ``ss_x`` from the group sizes if not
    supplied directly. String signs '+', '-', '?' are accepted.
    """
    provided = {
        ReportedAs.T_STAT: t_stat,
        ReportedAs.T_SQUARED: t_squared,
        ReportedAs.LAMBDA: lmbda,
        ReportedAs.P_VALUE_TWO_SIDED: p_two_sided,
        ReportedAs.BAYES_FACTOR_G: two_log_bf_g,
        ReportedAs.BAYES_FACTOR_JZS: two_log_bf_jzs,
    }
    given = [(kind, v) for kind, v in provided.items() if v is not None]
    if len(given) != 1:
        raise DomainError(
            f"study {study_id}: exactly one statistic must be supplied, got {len(given)}"
        )
    reported_as, value = given[0]
    group_sizes = None
    if (n1 is None) != (n2 is None):
        raise DomainError(f"study {study_id}: need both group sizes or neither")
    if n1 is not None:
        group_sizes = (int(n1), int(n2))
        derived_n = int(n1) + int(n2)
        if n is not None and int(n) != derived_n:
            raise DomainError(f"study {study_id}: n must equal n1 + n2")
        n = derived_n
        derived_ss = two_sample_ss(int(n1), int(n2))
        if ss_x is None:
            ss_x = derived_ss
    if n is None:
        raise DomainError(f"study {study_id}: sample size n is required")
    if isinstance(sign, str):
        sign = Sign(sign)
    if sign is None:
        # derive the direction from a signed t statistic; an explicit '?'
        # is honoured instead, forcing LIMITED handling for that study
        if reported_as is ReportedAs.T_STAT:
            sign = _sign_from_value(value)
        else:
            sign = Sign.UNKNOWN
    summary = StudySummary(
        n=int(n),
        t_stat=float(value) if reported_as is ReportedAs.T_STAT else None,
        nu=nu,
        ss_x=ss_x,
        sign=sign,
    )
    return StudyRecord(
        study_id=str(study_id),
        reported_as=reported_as,
        value=float(value),
        summary=summary,
        group_sizes=group_sizes,
    )


@dataclass(frozen=True)
class StudyWeights:
    """Per-study weights with squares summing to one."""

    w: np.ndarray
    scheme: WeightScheme

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if np.any(w < 0.0):
            raise DomainError("weights must be nonnegative")
        if abs(float(np.sum(w * w)) - 1.0) > 1e-12:
            raise DomainError("squared weights must sum to one")
        object.__setattr__(self, "w", w)

    @property
    def squared(self) -> np.ndarray:
        return self.w * self.w


@dataclass(frozen=True)
class MetaResult:
    """Outcome of one synthesis method."""

    combined_t: float | None
    meta_bf: LogBF
    weights: StudyWeights | None
    case_used: InformationCase
    method: MetaMethod
    n_total: int
    g_used: float | None
    warnings: tuple[str, ...] = field(default=())


def detect_case(studies) -> InformationCase:
    """Most informative case every study supports."""
    if all(_supports_detailed(r) for r in studies):
        return InformationCase.DETAILED
    if all(_supports_direction(r) for r in studies):
        return InformationCase.PARTIAL
    return InformationCase.LIMITED


def _supports_direction(record: StudyRecord) -> bool:
    if record.sign is not Sign.UNKNOWN:
        return True
    # an exactly null statistic has no direction and needs none
    return _is_null_statistic(record)


def _supports_detailed(record: StudyRecord) -> bool:
    return _supports_direction(record) and record.ss_x is not None


def _is_null_statistic(record: StudyRecord) -> bool:
    if record.reported_as in (
        ReportedAs.T_STAT,
        ReportedAs.T_SQUARED,
        ReportedAs.LAMBDA,
    ):
        return record.value == 0.0
    if record.reported_as is ReportedAs.P_VALUE_TWO_SIDED:
        return record.value >= 1.0
    return False


def normalize_to_abs_t(
    record: StudyRecord,
    g_rule: GRule = GRule(),
    warnings: list | None = None,
) -> tuple[float, Sign]:
    """Convert any reported statistic to (|T|, sign).

    The conversion route depends on ``reported_as``: identity for a t
    statistic, square root for T^2, the likelihood-ratio and p-value maps,
    or inversion of the (monotone) Bayes-factor transforms. Out-of-range
    Bayes factors raise ``RangeError``. p-values equal to 0 or 1 after
    machine rounding are clamped to ``P_VALUE_CLAMP`` with a warning.
    """
    kind = record.reported_as
    summary = record.summary
    if kind is ReportedAs.T_STAT:
        # the stored sign wins: an explicit '?' forces LIMITED handling
        return abs(record.value), summary.sign
    if kind is ReportedAs.T_SQUARED:
        if record.value < 0:
            raise DomainError(f"study {record.study_id}: negative T^2")
        return math.sqrt(record.value), summary.sign
    if kind is ReportedAs.LAMBDA:
        t2 = bf_core.lambda_to_t2(record.value, summary.n)
        return math.sqrt(t2), summary.sign
    if kind is ReportedAs.P_VALUE_TWO_SIDED:
        p = record.value
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"study {record.study_id}: p-value outside [0, 1]")
        clamped = min(max(p, P_VALUE_CLAMP[0]), P_VALUE_CLAMP[1])
        if clamped != p and warnings is not None:
            warnings.append(
                f"study {record.study_id}: p-value {p!r} clamped to {clamped!r}"
            )
        t2 = bf_core.p_to_t2(clamped, summary.nu)
        return math.sqrt(t2), summary.sign
    if kind is ReportedAs.BAYES_FACTOR_G:
        g = g_rule.study_g(summary.n)
        t2 = bf_core.bf_to_t2(LogBF(record.value, Orientation.BF10), summary.n, g)
        return math.sqrt(t2), summary.sign
    if kind is ReportedAs.BAYES_FACTOR_JZS:
        if summary.ss_x is None:
            raise InsufficientDataError(
                f"study {record.study_id}: inverting a JZS Bayes factor needs ss_x",
                [record.study_id],
            )
        return _invert_jzs(record.value, summary.nu, summary.ss_x), summary.sign
    raise DomainError(f"unhandled statistic kind {kind}")


def _sign_from_value(t: float) -> Sign:
    if t > 0:
        return Sign.POS
    if t < 0:
        return Sign.NEG
    return Sign.UNKNOWN


def _invert_jzs(two_log_bf: float, nu: float, ss_x: float) -> float:
    floor = bf_core.jzs_bf10(0.0, nu, ss_x).two_log_bf
    if two_log_bf < floor - 1e-9:
        raise RangeError(
            f"2logBF={two_log_bf:.6g} below the JZS minimum {floor:.6g} at T=0"
        )
    if two_log_bf <= floor:
        return 0.0
    hi = 10.0
    while bf_core.jzs_bf10(hi, nu, ss_x).two_log_bf < two_log_bf:
        hi *= 2.0
        if hi > 1e6:
            raise RangeError("JZS Bayes factor unattainably large")
    return float(
        optimize.brentq(
            lambda t: bf_core.jzs_bf10(t, nu, ss_x).two_log_bf - two_log_bf,
            0.0,
            hi,
            xtol=1e-10,
            rtol=8.9e-16,
        )
    )


def variance_weights(studies) -> StudyWeights:
    """Inverse-variance weights for t statistics, from (t, nu, ss) triples.

    The variance of the standardised per-study effect ``d_k = T_k /
    (H(nu_k/2) sqrt(ss_k))`` is
    ``v_k = H^{-2} nu/(ss (nu-2)) + [(nu/(nu-2)) H^{-2} - 1] d_k^2``,
    and ``w_k = sqrt(v_k^{-1} / sum v^{-1})``. Requires every ``nu > 2``.
    """
    ts, nus, sss = _unpack_triples(studies)
    if np.any(nus <= 2.0):
        raise DomainError("variance weights require nu > 2 for every study")
    if np.any(sss <= 0.0):
        raise DomainError("variance weights require positive ss_x")
    h = h_factor(nus / 2.0)
    d = ts / (h * np.sqrt(sss))
    v = (nus / (sss * (nus - 2.0))) / h**2 + ((nus / (nus - 2.0)) / h**2 - 1.0) * d * d
    inv = 1.0 / v
    return StudyWeights(np.sqrt(inv / inv.sum()), WeightScheme.VARIANCE)


def sample_fraction_weights(ns) -> StudyWeights:
    """Weights ``w_k = sqrt(n_k / N)``; exact normalisation by construction."""
    ns = np.asarray(ns, dtype=float)
    if ns.ndim != 1 or ns.size == 0 or np.any(ns <= 0):
        raise DomainError("sample sizes must be positive")
    return StudyWeights(np.sqrt(ns / ns.sum()), WeightScheme.SAMPLE_FRACTION)


def inverse_normal_combine(abs_t, signs, weights: StudyWeights) -> float:
    """Weighted signed combination ``sum w_k sign_k |T_k|``.

    A zero statistic contributes zero whatever its sign; a nonzero
    statistic with unknown sign is an error.
    """
    abs_t = np.asarray(abs_t, dtype=float)
    if abs_t.shape != weights.w.shape:
        raise DomainError("abs_t and weights must align")
    factors = np.zeros_like(abs_t)
    for i, s in enumerate(signs):
        if abs_t[i] == 0.0:
            continue
        f = s.factor if isinstance(s, Sign) else float(s)
        if f is None or f == 0.0:
            raise InsufficientDataError(
                "directional combination requires a sign for every nonzero statistic",
                [i],
            )
        factors[i] = f
    return float(np.sum(weights.w * factors * abs_t))


def _unpack_triples(studies):
    arr = np.asarray([(t, nu, ss) for (t, nu, ss) in studies], dtype=float)
    if arr.size == 0:
        raise DomainError("at least one study required")
    return arr[:, 0], arr[:, 1], arr[:, 2]


def _signed_values(abs_t, signs):
    """Reconstruct signed statistics; zero stays zero whatever its sign."""
    out = np.zeros_like(abs_t)
    for i, (a, s) in enumerate(zip(abs_t, signs)):
        if a != 0.0:
            out[i] = s.factor * a
    return out


def _normalize_all(studies, g_rule, warnings):
    problems = []
    abs_ts, signs = [], []
    for record in studies:
        try:
            abs_t, sign = normalize_to_abs_t(record, g_rule, warnings)
        except (DomainError, RangeError, InsufficientDataError) as exc:
            problems.append((record.study_id, str(exc)))
            continue
        abs_ts.append(abs_t)
        signs.append(sign)
    if problems:
        raise InsufficientDataError(
            "studies could not be normalised: "
            + "; ".join(f"{sid} ({msg})" for sid, msg in problems),
            [sid for sid, _ in problems],
        )
    return np.asarray(abs_ts), signs


def _require(studies, *, need_sign: bool, need_ss: bool, method: MetaMethod):
    missing = []
    for record in studies:
        ok = True
        if need_sign and not _supports_direction(record):
            ok = False
        if need_ss and record.ss_x is None:
            ok = False
        if not ok:
            missing.append(record.study_id)
    if missing:
        what = []
        if need_sign:
            what.append("effect direction")
        if need_ss:
            what.append("covariate sum of squares")
        raise InsufficientDataError(
            f"{method.value} requires {' and '.join(what)}; "
            f"missing for studies: {', '.join(missing)}",
            missing,
        )


def _finish_gprior(studies, combined_t, weights, case, method, g_total, g_rule, warnings):
    n_total = int(sum(r.summary.n for r in studies))
    g_used = g_rule.total_g(n_total) if g_total is None else float(g_total)
    meta = gprior_bf10_from_t(combined_t * combined_t, n_total, g_used)
    return MetaResult(
        combined_t=float(combined_t),
        meta_bf=meta,
        weights=weights,
        case_used=case,
        method=method,
        n_total=n_total,
        g_used=g_used,
        warnings=tuple(warnings),
    )


def meta_bf_g_detailed(studies, g_total=None, g_rule: GRule = GRule()) -> MetaResult:
    """g-prior meta Bayes factor under DETAILED information.

    Variance weights from the per-study (T, nu, ss), signed inverse-normal
    combination, then the g-prior transform at ``(N, g)`` with ``N`` the
    pooled sample size and ``g = N`` unless overridden.
    """
    warnings: list[str] = []
    _require(studies, need_sign=True, need_ss=True, method=MetaMethod.META_BF_G_D)
    abs_t, signs = _normalize_all(studies, g_rule, warnings)
    signed_t = _signed_values(abs_t, signs)
    triples = [
        (t, r.summary.nu, r.summary.ss_x) for t, r in zip(signed_t, studies)
    ]
    weights = variance_weights(triples)
    combined = inverse_normal_combine(abs_t, signs, weights)
    return _finish_gprior(
        studies, combined, weights, InformationCase.DETAILED,
        MetaMethod.META_BF_G_D, g_total, g_rule, warnings,
    )


def meta_bf_g_partial(studies, g_total=None, g_rule: GRule = GRule()) -> MetaResult:
    """g-prior meta Bayes factor under PARTIAL information.

    As the detailed estimator but with sample-fraction weights
    ``w_k = sqrt(n_k / N)``, i.e. assuming equal known variances.
    """
    warnings: list[str] = []
    _require(studies, need_sign=True, need_ss=False, method=MetaMethod.META_BF_G_P)
    abs_t, signs = _normalize_all(studies, g_rule, warnings)
    weights = sample_fraction_weights([r.summary.n for r in studies])
    combined = inverse_normal_combine(abs_t, signs, weights)
    return _finish_gprior(
        studies, combined, weights, InformationCase.PARTIAL,
        MetaMethod.META_BF_G_P, g_total, g_rule, warnings,
    )


def meta_bf_g_limited(studies, g_total=None, g_rule: GRule = GRule()) -> MetaResult:
    """g-prior meta Bayes factor under LIMITED information.

    Combines the unsigned statistics, ``S = sum sqrt(n_k/N) |T_k|``, then
    applies the g-prior transform. With all effects genuinely positive this
    coincides exactly with the PARTIAL estimator; under the null it tends
    to overstate the evidence against it, which is the price of losing the
    directions.
    """
    warnings: list[str] = []
    abs_t, _ = _normalize_all(studies, g_rule, warnings)
    weights = sample_fraction_weights([r.summary.n for r in studies])
    combined = float(np.sum(weights.w * abs_t))
    return _finish_gprior(
        studies, combined, weights, InformationCase.LIMITED,
        MetaMethod.META_BF_G_L, g_total, g_rule, warnings,
    )


def meta_bf_jzs(studies, epsabs=1e-12, epsrel=1e-8) -> MetaResult:
    """Cauchy-prior meta Bayes factor from all (T_k, nu_k, ss_k).

    Evaluates ``int prod_k f_{nu_k}(T_k; sqrt(ss_k) b) cauchy(b) db /
    prod_k f_{nu_k}(T_k; 0)`` with the same tan substitution and adaptive
    Gauss-Kronrod rule as the single-study version. The density product is
    accumulated in log space and rescaled by the log denominator (plus an
    extra shift when the evidence is overwhelming) before exponentiation.
    """
    if isinstance(studies, (list, tuple)) and studies and isinstance(studies[0], StudyRecord):
        _require(studies, need_sign=True, need_ss=True, method=MetaMethod.META_BF_JZS)
        warnings: list[str] = []
        abs_t, signs = _normalize_all(studies, GRule(), warnings)
        ts = _signed_values(abs_t, signs)
        nus = np.asarray([r.summary.nu for r in studies], dtype=float)
        sss = np.asarray([r.summary.ss_x for r in studies], dtype=float)
        n_total = int(sum(r.summary.n for r in studies))
    else:
        ts, nus, sss = _unpack_triples(studies)
        warnings = []
        n_total = int(np.sum(nus + 2.0))
    if np.any(nus <= 0.0) or np.any(sss <= 0.0):
        raise DomainError("JZS synthesis requires nu > 0 and ss_x > 0 throughout")

    two_log = _jzs_product_two_log_bf(ts, nus, sss, epsabs, epsrel)
    return MetaResult(
        combined_t=None,
        meta_bf=LogBF(two_log, Orientation.BF10),
        weights=None,
        case_used=InformationCase.DETAILED,
        method=MetaMethod.META_BF_JZS,
        n_total=n_total,
        g_used=None,
        warnings=tuple(warnings),
    )


def _jzs_product_two_log_bf(ts, nus, sss, epsabs, epsrel):
    sq = np.sqrt(sss)
    ln_den = float(sum(t_logpdf(t, nu) for t, nu in zip(ts, nus)))
    total_info = float(np.sum(sss))
    center = float(np.sum(sq * ts) / total_info)
    scale = 1.0 / math.sqrt(total_info)

    def log_ratio(theta):
        effect = np.tan(theta)
        acc = np.zeros_like(effect)
        for t, nu, s in zip(ts, nus, sq):
            acc += nct_logpdf(float(t), float(nu), s * effect)
        return acc - ln_den

    # pre-shift so the integrand peak stays well inside double range
    peak = float(log_ratio(np.array([math.atan(center)]))[0])
    shift = max(peak - 600.0, 0.0)

    def integrand(theta):
        return np.exp(log_ratio(theta) - shift) / np.pi

    pts = cauchy_theta_breakpoints(center, scale)
    value, _ = adaptive_gauss_kronrod(integrand, pts, epsabs=epsabs, epsrel=epsrel)
    if value <= 0.0:
        raise QuadratureError("JZS product integral evaluated to a nonpositive value")
    return 2.0 * (math.log(value) + shift)


def fisher_combine(p_values) -> tuple[float, float]:
    """Fisher's method: ``S_F = -2 sum log p_k ~ chi^2_{2K}`` under the null."""
    p = np.asarray(p_values, dtype=float)
    if p.size == 0 or np.any(p <= 0.0) or np.any(p > 1.0):
        raise DomainError("Fisher combination requires p-values in (0, 1]")
    stat = float(-2.0 * np.sum(np.log(p)))
    return stat, float(chisq_sf(stat, 2 * p.size))


def stouffer_combine(p_values) -> tuple[float, float]:
    """Stouffer's method: ``S_S = sum Phi^{-1}(1 - p_k) ~ N(0, K)``."""
    p = np.asarray(p_values, dtype=float)
    if p.size == 0 or np.any(p <= 0.0) or np.any(p >= 1.0):
        raise DomainError("Stouffer combination requires p-values in (0, 1)")
    stat = float(np.sum(normal_quantile(1.0 - p)))
    return stat, float(1.0 - normal_cdf(stat / math.sqrt(p.size)))


def pearson_owen_stat(p_values) -> tuple[float, float, float]:
    """Two-sided Stouffer variants: left, right, and their extreme.

    ``S_L = sum Phi^{-1}(1 - p_k/2)``, ``S_R = -S_L`` and ``S_C = |S_L|``;
    the last two identities hold exactly by construction.
    """
    p = np.asarray(p_values, dtype=float)
    if p.size == 0 or np.any(p <= 0.0) or np.any(p >= 1.0):
        raise DomainError("Pearson-Owen statistic requires p-values in (0, 1)")
    s_left = float(np.sum(normal_quantile(1.0 - 0.5 * p)))
    return s_left, -s_left, abs(s_left)
