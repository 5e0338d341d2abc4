"""Bayes factors from summary statistics and their meta-analytic synthesis.

The package converts per-study frequentist summaries (t statistics,
likelihood ratios, p-values, or already-computed Bayes factors) into
Bayes factors under the Zellner g-prior and the JZS Cauchy prior, and
combines evidence from K studies into a single meta-analytic Bayes factor
under three regimes of information availability (detailed / partial /
limited).
"""

from ._version import __version__
from .bf_core import (
    LogBF,
    Orientation,
    RawDataset,
    Sign,
    StudySummary,
    bf_to_t2,
    gprior_bf01_nuisance,
    gprior_bf10_from_r2,
    gprior_bf10_from_t,
    jzs_bf10,
    lambda_to_t2,
    nig_bf10_rawdata,
    p_to_t2,
    t2_to_lambda,
    two_sample_ss,
)
from .evidence import AgreementTable, EvidenceLevel, classify, weighted_kappa
from .synthesis import (
    GRule,
    InformationCase,
    MetaMethod,
    MetaResult,
    ReportedAs,
    StudyRecord,
    StudyWeights,
    WeightScheme,
    build_record,
    detect_case,
    fisher_combine,
    inverse_normal_combine,
    meta_bf_g_detailed,
    meta_bf_g_limited,
    meta_bf_g_partial,
    meta_bf_jzs,
    normalize_to_abs_t,
    pearson_owen_stat,
    sample_fraction_weights,
    stouffer_combine,
    variance_weights,
)

__all__ = [
    "__version__",
    "LogBF",
    "Orientation",
    "Sign",
    "RawDataset",
    "StudySummary",
    "StudyRecord",
    "StudyWeights",
    "MetaResult",
    "MetaMethod",
    "ReportedAs",
    "InformationCase",
    "WeightScheme",
    "GRule",
    "EvidenceLevel",
    "AgreementTable",
    "two_sample_ss",
    "gprior_bf10_from_r2",
    "gprior_bf01_nuisance",
    "gprior_bf10_from_t",
    "nig_bf10_rawdata",
    "jzs_bf10",
    "lambda_to_t2",
    "t2_to_lambda",
    "bf_to_t2",
    "p_to_t2",
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
    "classify",
    "weighted_kappa",
]
