"""Analysis reports: per-study table, synthesized Bayes factors, rendering.

A report is a pure function of (records, config, package version) and the
renderers avoid timestamps, so the same input regenerates byte-identical
output. Text output rounds to six significant digits; JSON keeps full
precision.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

from ._version import __version__
from .bf_core import Sign, gprior_bf10_from_t, jzs_bf10
from .errors import BfMetaError, InsufficientDataError
from .evidence import classify
from .synthesis import (
    GRule,
    InformationCase,
    MetaMethod,
    MetaResult,
    StudyRecord,
    detect_case,
    fisher_combine,
    meta_bf_g_detailed,
    meta_bf_g_limited,
    meta_bf_g_partial,
    meta_bf_jzs,
    normalize_to_abs_t,
    sample_fraction_weights,
    stouffer_combine,
    variance_weights,
)

__all__ = ["AnalysisConfig", "StudyRow", "Report", "build_report", "render"]

_META_RUNNERS = {
    MetaMethod.META_BF_G_D: meta_bf_g_detailed,
    MetaMethod.META_BF_G_P: meta_bf_g_partial,
    MetaMethod.META_BF_G_L: meta_bf_g_limited,
    MetaMethod.META_BF_JZS: meta_bf_jzs,
}


@dataclass(frozen=True)
class AnalysisConfig:
    """What to compute and how to print it."""

    method: str = "auto"  # auto | meta_bf_g_D | meta_bf_g_P | meta_bf_g_L |
    #                       meta_bf_jzs | fisher | stouffer
    g_rule: GRule = GRule()
    nu_rule: str = "n_minus_2"
    output_format: str = "text"  # text | json | csv


@dataclass(frozen=True)
class StudyRow:
    """Normalised view of one study, mirroring the worked-example table."""

    study_id: str
    abs_t: float
    sign: Sign
    n: int
    n1: int | None
    n2: int | None
    nu: float
    ss_x: float | None
    two_log_bf_g: float
    two_log_bf_jzs: float | None
    w2_sample_fraction: float
    w2_variance: float | None


@dataclass(frozen=True)
class Report:
    version: str
    case: InformationCase
    rows: tuple[StudyRow, ...]
    meta: dict
    meta_errors: dict
    combiners: dict
    warnings: tuple[str, ...] = field(default=())

    def best_meta(self) -> MetaResult | None:
        for method in (
            MetaMethod.META_BF_JZS,
            MetaMethod.META_BF_G_D,
            MetaMethod.META_BF_G_P,
            MetaMethod.META_BF_G_L,
        ):
            if method in self.meta:
                return self.meta[method]
        return None


def build_report(records, config: AnalysisConfig = AnalysisConfig()) -> Report:
    """Compute per-study statistics and every requested synthesis method."""
    records = list(records)
    warnings: list[str] = []
    case = detect_case(records)
    rows = _study_rows(records, config, warnings)

    requested = _requested_methods(config.method)
    meta, meta_errors = {}, {}
    for method in requested:
        runner = _META_RUNNERS[method]
        try:
            if method is MetaMethod.META_BF_JZS:
                meta[method] = runner(records)
            else:
                meta[method] = runner(records, None, config.g_rule)
        except BfMetaError as exc:
            if config.method != "auto":
                raise
            meta_errors[method] = str(exc)

    combiners = {}
    if config.method in ("fisher", "stouffer", "auto"):
        p_values = [_two_sided_p(row) for row in rows]
        try:
            if config.method in ("fisher", "auto"):
                combiners["fisher"] = fisher_combine(p_values)
            if config.method in ("stouffer", "auto"):
                combiners["stouffer"] = stouffer_combine(
                    [min(p, 1.0 - 1e-16) for p in p_values]
                )
        except BfMetaError as exc:
            if config.method != "auto":
                raise
            meta_errors["combiners"] = str(exc)
    return Report(
        version=__version__,
        case=case,
        rows=tuple(rows),
        meta=meta,
        meta_errors=meta_errors,
        combiners=combiners,
        warnings=tuple(warnings),
    )


def _requested_methods(method: str):
    if method == "auto":
        return list(_META_RUNNERS)
    if method in ("fisher", "stouffer"):
        return []
    try:
        return [MetaMethod(method)]
    except ValueError:
        raise InsufficientDataError(f"unknown method {method!r}")


def _study_rows(records, config, warnings):
    rows = []
    normalized = []
    for record in records:
        abs_t, sign = normalize_to_abs_t(record, config.g_rule, warnings)
        normalized.append((record, abs_t, sign))
    frac = sample_fraction_weights([r.summary.n for r in records])
    detailed_ok = all(r.ss_x is not None for r in records)
    w2_var = None
    if detailed_ok:
        try:
            signed = [
                (0.0 if a == 0.0 else s.factor * a, r.summary.nu, r.summary.ss_x)
                for r, a, s in normalized
                if s is not Sign.UNKNOWN or a == 0.0
            ]
            if len(signed) == len(records):
                w2_var = variance_weights(signed).squared
        except BfMetaError:
            w2_var = None
    for i, (record, abs_t, sign) in enumerate(normalized):
        summary = record.summary
        g_k = config.g_rule.study_g(summary.n)
        bf_g = gprior_bf10_from_t(abs_t * abs_t, summary.n, g_k).two_log_bf
        bf_jzs = None
        if summary.ss_x is not None:
            bf_jzs = jzs_bf10(abs_t, summary.nu, summary.ss_x).two_log_bf
        rows.append(
            StudyRow(
                study_id=record.study_id,
                abs_t=abs_t,
                sign=sign,
                n=summary.n,
                n1=record.group_sizes[0] if record.group_sizes else None,
                n2=record.group_sizes[1] if record.group_sizes else None,
                nu=summary.nu,
                ss_x=summary.ss_x,
                two_log_bf_g=bf_g,
                two_log_bf_jzs=bf_jzs,
                w2_sample_fraction=float(frac.squared[i]),
                w2_variance=float(w2_var[i]) if w2_var is not None else None,
            )
        )
    return rows


def _two_sided_p(row: StudyRow) -> float:
    from .distributions import t_sf2

    return float(t_sf2(row.abs_t * row.abs_t, row.nu))


# ---------------------------------------------------------------- rendering

def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return _render_json(report)
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "text":
        return _render_text(report)
    raise InsufficientDataError(f"unknown output format {fmt!r}")


def _sig6(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and (math.isnan(x) or math.isinf(x)):
        return str(x)
    return f"{x:.6g}"


def _meta_dict(result: MetaResult) -> dict:
    return {
        "method": result.method.value,
        "combined_t": result.combined_t,
        "two_log_bf10": result.meta_bf.two_log_bf,
        "bayes_factor": result.meta_bf.bayes_factor,
        "evidence": classify(result.meta_bf.as_bf10()).label,
        "case_used": result.case_used.value,
        "n_total": result.n_total,
        "g_used": result.g_used,
        "weights_squared": list(map(float, result.weights.squared))
        if result.weights is not None
        else None,
    }


def _render_json(report: Report) -> str:
    payload = {
        "version": report.version,
        "case_detected": report.case.value,
        "studies": [
            {
                "study_id": r.study_id,
                "abs_t": r.abs_t,
                "sign": r.sign.value,
                "n": r.n,
                "n1": r.n1,
                "n2": r.n2,
                "nu": r.nu,
                "ss_x": r.ss_x,
                "two_log_bf_g": r.two_log_bf_g,
                "two_log_bf_jzs": r.two_log_bf_jzs,
                "w2_sample_fraction": r.w2_sample_fraction,
                "w2_variance": r.w2_variance,
            }
            for r in report.rows
        ],
        "meta": {m.value: _meta_dict(res) for m, res in report.meta.items()},
        "meta_errors": {
            (m.value if isinstance(m, MetaMethod) else m): msg
            for m, msg in report.meta_errors.items()
        },
        "combiners": {
            name: {"statistic": stat, "p_combined": p}
            for name, (stat, p) in report.combiners.items()
        },
        "warnings": list(report.warnings),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _render_csv(report: Report) -> str:
    """Per-study table in the ingestible CSV schema, plus comment summary.

    Rows with a known direction carry a signed ``t_stat``; unknown-sign
    rows emit ``t_squared`` so re-ingesting does not invent a direction.
    """
    out = io.StringIO()
    out.write(f"# bfmeta report v{report.version}\n")
    out.write(f"# case_detected = {report.case.value}\n")
    for method, result in report.meta.items():
        out.write(
            f"# {method.value}: two_log_bf10 = {result.meta_bf.two_log_bf!r}, "
            f"evidence = {classify(result.meta_bf.as_bf10()).label}\n"
        )
    for method, msg in report.meta_errors.items():
        name = method.value if isinstance(method, MetaMethod) else method
        out.write(f"# {name}: insufficient data ({msg})\n")
    for warning in report.warnings:
        out.write(f"# warning: {warning}\n")
    columns = [
        "study_id", "t_stat", "t_squared", "n", "n1", "n2", "ss_x", "sign",
        "abs_t", "bf_g_2log", "bf_jzs_2log", "w2_omega", "w2_v",
    ]
    out.write(",".join(columns) + "\n")
    for r in report.rows:
        known = r.sign is not Sign.UNKNOWN or r.abs_t == 0.0
        t_stat = 0.0
        if known and r.abs_t != 0.0:
            t_stat = r.sign.factor * r.abs_t
        fields = [
            r.study_id,
            repr(t_stat) if known else "",
            "" if known else repr(r.abs_t * r.abs_t),
            str(r.n),
            "" if r.n1 is None else str(r.n1),
            "" if r.n2 is None else str(r.n2),
            "" if r.ss_x is None else repr(r.ss_x),
            r.sign.value,
            repr(r.abs_t),
            repr(r.two_log_bf_g),
            "" if r.two_log_bf_jzs is None else repr(r.two_log_bf_jzs),
            repr(r.w2_sample_fraction),
            "" if r.w2_variance is None else repr(r.w2_variance),
        ]
        out.write(",".join(fields) + "\n")
    return out.getvalue()


def _render_text(report: Report) -> str:
    out = io.StringIO()
    out.write(f"bfmeta report (v{report.version})\n")
    out.write(f"information case detected: {report.case.value}\n\n")
    header = (
        f"{'study':>8} {'|T|':>10} {'sign':>4} {'n':>6} {'ss_x':>10} "
        f"{'2logBF(g)':>11} {'2logBF(JZS)':>12} {'w2_omega':>9} {'w2_v':>9}"
    )
    out.write(header + "\n")
    for r in report.rows:
        out.write(
            f"{r.study_id:>8} {_sig6(r.abs_t):>10} {r.sign.value:>4} {r.n:>6} "
            f"{_sig6(r.ss_x):>10} {_sig6(r.two_log_bf_g):>11} "
            f"{_sig6(r.two_log_bf_jzs):>12} {_sig6(r.w2_sample_fraction):>9} "
            f"{_sig6(r.w2_variance):>9}\n"
        )
    out.write("\nsynthesis:\n")
    for method, result in report.meta.items():
        level = classify(result.meta_bf.as_bf10()).label
        combined = (
            f" combined_t={_sig6(result.combined_t)}"
            if result.combined_t is not None
            else ""
        )
        out.write(
            f"  {method.value:<13} 2logBF10={_sig6(result.meta_bf.two_log_bf):>8} "
            f"BF10={_sig6(result.meta_bf.bayes_factor):>10}{combined}  [{level}]\n"
        )
    for method, msg in report.meta_errors.items():
        name = method.value if isinstance(method, MetaMethod) else method
        out.write(f"  {name:<13} insufficient data: {msg}\n")
    if report.combiners:
        out.write("\np-value combiners:\n")
        for name, (stat, p) in report.combiners.items():
            out.write(f"  {name:<13} statistic={_sig6(stat)} p={_sig6(p)}\n")
    if report.warnings:
        out.write("\nwarnings:\n")
        for warning in report.warnings:
            out.write(f"  - {warning}\n")
    return out.getvalue()
