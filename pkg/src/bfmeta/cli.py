"""Command-line interface.

Subcommands: ``bf`` (one study), ``meta`` (CSV synthesis), ``simulate``
(Monte Carlo scenarios), ``classify`` (evidence grading). Exit codes:
0 success, 2 input error, 3 configuration error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from ._version import __version__
from .bf_core import LogBF, Orientation, gprior_bf10_from_t, jzs_bf10, two_sample_ss
from .errors import (
    ConfigError,
    DomainError,
    InsufficientDataError,
    QuadratureError,
    RangeError,
    SingularMatrixError,
    ValidationError,
)
from .evidence import classify
from .ingest import ingest_csv
from .report import AnalysisConfig, build_report, render
from .simulation import (
    CLIP_RANGE,
    load_scenario_file,
    meta_methods,
    run_scenario,
)
from .synthesis import GRule

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValidationError, InsufficientDataError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, DomainError, RangeError, SingularMatrixError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="bfmeta",
        description="Bayes factors from summary statistics and their meta-analytic synthesis",
    )
    parser.add_argument("--version", action="version", version=f"bfmeta {__version__}")
    sub = parser.add_subparsers(required=True)

    p_bf = sub.add_parser("bf", help="Bayes factors for a single study")
    p_bf.add_argument("--t", type=float, required=True, help="observed t statistic")
    p_bf.add_argument("--n", type=int, help="total sample size")
    p_bf.add_argument("--n1", type=int, help="group 1 size (two-sample)")
    p_bf.add_argument("--n2", type=int, help="group 2 size (two-sample)")
    p_bf.add_argument("--ss", type=float, help="covariate sum of squares")
    p_bf.add_argument("--g", type=float, help="g-prior scale (default: n)")
    p_bf.add_argument("--nu", type=float, help="degrees of freedom (default: n - 2)")
    p_bf.add_argument("--format", choices=("text", "json"), default="text")
    p_bf.set_defaults(handler=cmd_bf)

    p_meta = sub.add_parser("meta", help="synthesize a CSV of study summaries")
    p_meta.add_argument("csv", help="input CSV path")
    p_meta.add_argument(
        "--method",
        default="auto",
        choices=(
            "auto", "meta_bf_g_D", "meta_bf_g_P", "meta_bf_g_L",
            "meta_bf_jzs", "fisher", "stouffer",
        ),
    )
    p_meta.add_argument("--g", type=float, help="fixed g-prior scale (default: N)")
    p_meta.add_argument(
        "--nu-rule", choices=("n_minus_2", "n_minus_1"), default="n_minus_2"
    )
    p_meta.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p_meta.add_argument("--out", help="write the report here instead of stdout")
    p_meta.set_defaults(handler=cmd_meta)

    p_sim = sub.add_parser("simulate", help="run simulation scenarios from a TOML file")
    p_sim.add_argument("scenario", help="scenario TOML path")
    p_sim.add_argument("--out", help="metrics CSV path (default: stdout)")
    p_sim.add_argument("--replicates-out", help="optional per-replicate CSV path")
    p_sim.add_argument(
        "--workers", type=int, default=None,
        help="worker processes (default: BFMETA_WORKERS or 1)",
    )
    p_sim.set_defaults(handler=cmd_simulate)

    p_cls = sub.add_parser("classify", help="grade a 2 log BF on the evidence scale")
    p_cls.add_argument("--two-log-bf", type=float, required=True)
    p_cls.add_argument("--orientation", choices=("BF10", "BF01"), default="BF10")
    p_cls.set_defaults(handler=cmd_classify)
    return parser


def cmd_bf(args) -> int:
    if (args.n1 is None) != (args.n2 is None):
        raise ValidationError("need both --n1 and --n2 or neither")
    n = args.n
    ss = args.ss
    if args.n1 is not None:
        derived = args.n1 + args.n2
        if n is not None and n != derived:
            raise ValidationError("--n must equal n1 + n2")
        n = derived
        if ss is None:
            ss = two_sample_ss(args.n1, args.n2)
    if n is None:
        raise ValidationError("sample size required: --n or --n1/--n2")
    g = args.g if args.g is not None else float(n)
    nu = args.nu if args.nu is not None else float(n - 2)
    bf_g = gprior_bf10_from_t(args.t * args.t, n, g)
    bf_j = jzs_bf10(args.t, nu, ss) if ss is not None else None

    if args.format == "json":
        import json

        payload = {
            "t": args.t, "n": n, "nu": nu, "ss_x": ss, "g": g,
            "two_log_bf_g": bf_g.two_log_bf,
            "bf_g": bf_g.bayes_factor,
            "evidence_g": classify(bf_g).label,
        }
        if bf_j is not None:
            payload.update(
                two_log_bf_jzs=bf_j.two_log_bf,
                bf_jzs=bf_j.bayes_factor,
                evidence_jzs=classify(bf_j).label,
            )
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"t={args.t:.6g} n={n} nu={nu:.6g} g={g:.6g}"
              + (f" ss={ss:.6g}" if ss is not None else ""))
        print(f"g-prior: 2logBF10={bf_g.two_log_bf:.6g} BF10={bf_g.bayes_factor:.6g}"
              f" [{classify(bf_g).label}]")
        if bf_j is not None:
            print(f"JZS:     2logBF10={bf_j.two_log_bf:.6g} BF10={bf_j.bayes_factor:.6g}"
                  f" [{classify(bf_j).label}]")
        else:
            print("JZS:     unavailable (needs --ss or --n1/--n2)")
    return EXIT_OK


def cmd_meta(args) -> int:
    result = ingest_csv(args.csv, nu_rule=args.nu_rule)
    config = AnalysisConfig(
        method=args.method,
        g_rule=GRule(fixed=args.g),
        nu_rule=args.nu_rule,
        output_format=args.format,
    )
    report = build_report(result.records, config)
    rendered = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(rendered)
    else:
        sys.stdout.write(rendered)
    return EXIT_OK


def cmd_simulate(args) -> int:
    specs = load_scenario_file(args.scenario)
    metrics_rows = []
    replicate_rows = []
    rng_name = None
    seed = None
    for index, spec in enumerate(specs):
        outcome = run_scenario(spec, workers=args.workers)
        rng_name = outcome.rng_algorithm
        seed = spec.seed
        for method in meta_methods():
            summary = outcome.metrics[method]
            metrics_rows.append({
                "scenario": index,
                "model": spec.model.value,
                "partition": spec.partition.value,
                "beta": spec.beta,
                "k": spec.k,
                "n_total": spec.n_total if spec.n_total is not None else "",
                "n_range": f"{spec.n_range[0]}-{spec.n_range[1]}" if spec.n_range else "",
                "method": method.value,
                "bias": repr(summary.bias),
                "rmse": repr(summary.rmse),
                "kappa": "" if summary.kappa is None else repr(summary.kappa),
                "n_used": summary.n_used,
                "failures": outcome.failures,
            })
        if args.replicates_out:
            for rep_index, rep in enumerate(outcome.outcomes):
                row = {
                    "scenario": index,
                    "beta": spec.beta,
                    "k": spec.k,
                    "replicate": rep_index,
                    "n_total": rep.n_total,
                    "full_g": repr(rep.full_g.two_log_bf),
                    "full_jzs": repr(rep.full_jzs.two_log_bf),
                }
                for method in meta_methods():
                    value = rep.meta[method].two_log_bf
                    row[method.value] = repr(value)
                    row[method.value + "_clipped"] = repr(_clip(value))
                replicate_rows.append(row)

    header = [
        f"# bfmeta simulate v{__version__}",
        f"# seed = {seed}",
        f"# rng = {rng_name}",
        "# note: t-test partitions keep within-part group allocation near 1:1",
        f"# note: clipped columns use the display range {CLIP_RANGE}",
    ]
    metrics_csv = _rows_to_csv(metrics_rows, header)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(metrics_csv)
    else:
        sys.stdout.write(metrics_csv)
    if args.replicates_out:
        with open(args.replicates_out, "w", encoding="utf-8") as handle:
            handle.write(_rows_to_csv(replicate_rows, header))
    return EXIT_OK


def _clip(value):
    return min(max(value, CLIP_RANGE[0]), CLIP_RANGE[1])


def _rows_to_csv(rows, header_lines):
    out = io.StringIO()
    for line in header_lines:
        out.write(line + "\n")
    if rows:
        writer = csv.DictWriter(out, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    return out.getvalue()


def cmd_classify(args) -> int:
    bf = LogBF(args.two_log_bf, Orientation(args.orientation)).as_bf10()
    level = classify(bf)
    print(f"2logBF10={bf.two_log_bf:.6g}: {level.label}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
