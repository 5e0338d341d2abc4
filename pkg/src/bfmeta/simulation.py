"""Monte-Carlo harness: split one dataset into studies, synthesize, compare.

Each replicate generates a full dataset from ``Y ~ N(beta * X1, 1)``,
computes the full-data Bayes factors (g-prior at ``g = N`` and JZS), splits
the data into K studies, runs every synthesis method on the per-study
summaries, and records the differences on the ``2 log BF`` scale. g-prior
meta estimators are scored against the g-prior full-data Bayes factor and
the JZS estimator against the JZS one.

Reproducibility: replicate ``r`` of a scenario draws from
``numpy.random.default_rng(SeedSequence(seed, spawn_key=(r,)))`` (PCG64),
so results are bitwise identical for any worker count; aggregation always
runs in replicate order. Worker processes are enabled with the
``BFMETA_WORKERS`` environment variable.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bf_core import LogBF, gprior_bf10_from_t, jzs_bf10
from .errors import ConfigError, DomainError, QuadratureError, UndefinedAgreementError
from .evidence import AgreementTable, classify, weighted_kappa
from .synthesis import (
    MetaMethod,
    meta_bf_jzs,
    sample_fraction_weights,
    variance_weights,
)

__all__ = [
    "ModelKind",
    "PartitionKind",
    "ScenarioSpec",
    "ReplicateOutcome",
    "MetricsSummary",
    "ScenarioResult",
    "UNEQ_PRESETS",
    "generate_dataset",
    "partition_sizes",
    "partition",
    "run_scenario",
    "expand_scenarios",
    "load_scenario_file",
]

RNG_ALGORITHM = "PCG64"
WORKERS_ENV_VAR = "BFMETA_WORKERS"
MIN_PART_SIZE = 4
# random splits keep every part at >= 5 so the variance weights (which
# need nu > 2) stay defined for all methods
MIN_RANDOM_PART_SIZE = 5
CLIP_RANGE = (-1.0, 12.0)

# unequal-partition presets, as squared weights
UNEQ_PRESETS = {
    2: (0.7, 0.3),
    5: (0.05, 0.1, 0.15, 0.3, 0.4),
    10: (0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.1, 0.2, 0.2, 0.2),
}

G_PRIOR_METHODS = (
    MetaMethod.META_BF_G_D,
    MetaMethod.META_BF_G_P,
    MetaMethod.META_BF_G_L,
)


class ModelKind(enum.Enum):
    T_TEST = "t_test"
    REGRESSION = "regression"


class PartitionKind(enum.Enum):
    EQ = "EQ"
    UNEQ = "UNEQ"
    RANDOM = "RANDOM"


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation scenario: a (model, beta, K) cell with its RNG seed."""

    model: ModelKind
    beta: float
    k: int
    partition: PartitionKind
    replicates: int
    seed: int
    n_total: int | None = None
    n_range: tuple[int, int] | None = None
    weights_sq: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("need at least K = 2 studies")
        if self.replicates < 1:
            raise ConfigError("need at least one replicate")
        if (self.n_total is None) == (self.n_range is None):
            raise ConfigError("exactly one of n_total / n_range must be set")
        if self.n_total is not None and self.n_total < 4 * self.k:
            raise ConfigError("need N >= 4K")
        if self.n_range is not None:
            lo, hi = self.n_range
            if lo > hi or lo < 4 * self.k:
                raise ConfigError("invalid N range")
        if self.partition is PartitionKind.UNEQ:
            w2 = self.weights_sq or UNEQ_PRESETS.get(self.k)
            if w2 is None:
                raise ConfigError(
                    f"UNEQ partition for K={self.k} needs explicit squared weights"
                )
            if len(w2) != self.k:
                raise ConfigError("need one squared weight per study")
            if any(w <= 0 for w in w2) or abs(sum(w2) - 1.0) > 1e-9:
                raise ConfigError("squared partition weights must be positive and sum to 1")
            object.__setattr__(self, "weights_sq", tuple(float(w) for w in w2))
        elif self.weights_sq is not None:
            raise ConfigError("weights_sq only applies to the UNEQ partition")


@dataclass(frozen=True)
class ReplicateOutcome:
    """Everything recorded for one replicate."""

    n_total: int
    full_g: LogBF
    full_jzs: LogBF
    meta: dict
    t_stats: np.ndarray
    nus: np.ndarray
    ss_x: np.ndarray
    sizes: np.ndarray


@dataclass(frozen=True)
class MetricsSummary:
    """Bias, RMSE and agreement for one method, on the 2 log BF scale."""

    bias: float
    rmse: float
    kappa: float | None
    n_used: int

    def __post_init__(self):
        if self.n_used > 0 and self.rmse < abs(self.bias) - 1e-12:
            raise DomainError("rmse cannot be smaller than |bias|")


@dataclass(frozen=True)
class ScenarioResult:
    spec: ScenarioSpec
    metrics: dict
    outcomes: tuple
    failures: int
    rng_algorithm: str = RNG_ALGORITHM
    notes: tuple = field(
        default=(
            "t-test partitions keep within-part group allocation near 1:1",
            "random splits are uniform compositions with min part size "
            f"{MIN_RANDOM_PART_SIZE}",
        )
    )


def generate_dataset(spec: ScenarioSpec, rng, n_total: int):
    """Draw one full dataset (y, x) of size ``n_total``.

    t-test: x is a balanced 0/1 group indicator. Regression: x is a fresh
    N(0, 1/4) draw per replicate, held fixed across the partitioning.
    """
    if spec.model is ModelKind.T_TEST:
        n1 = n_total // 2
        x = np.concatenate([np.zeros(n1), np.ones(n_total - n1)])
    else:
        x = rng.normal(0.0, 0.5, n_total)
    y = spec.beta * x + rng.standard_normal(n_total)
    return y, x


def partition_sizes(spec: ScenarioSpec, n_total: int, rng) -> np.ndarray:
    """Study sizes for one replicate; always sums to ``n_total`` exactly."""
    k = spec.k
    if spec.partition is PartitionKind.RANDOM:
        return _random_composition(rng, n_total, k, MIN_RANDOM_PART_SIZE)
    if spec.partition is PartitionKind.EQ:
        shares = np.full(k, n_total / k)
    else:
        shares = np.asarray(spec.weights_sq) * n_total
    sizes = _largest_remainder(shares, n_total)
    if np.any(sizes < MIN_PART_SIZE):
        raise ConfigError(
            f"partition produced a study smaller than {MIN_PART_SIZE} observations"
        )
    return sizes


def _largest_remainder(shares, total) -> np.ndarray:
    floors = np.floor(shares).astype(int)
    short = int(total - floors.sum())
    order = np.argsort(-(shares - floors), kind="stable")
    floors[order[:short]] += 1
    return floors


def _random_composition(rng, total, k, minimum) -> np.ndarray:
    """Uniform composition of ``total`` into k parts each >= ``minimum``."""
    rest = total - k * minimum
    if rest < 0:
        raise ConfigError("total too small for the requested number of studies")
    cuts = np.sort(rng.choice(np.arange(1, rest + k), size=k - 1, replace=False))
    edges = np.concatenate([[0], cuts, [rest + k]])
    return np.diff(edges) - 1 + minimum


def partition(data, spec: ScenarioSpec, rng) -> list:
    """Split (y, x) into K index arrays according to the scenario.

    For the t-test the two group pools are drawn down proportionally so
    each study keeps a near-balanced allocation; regression studies are
    consecutive blocks (the draws are exchangeable).
    """
    y, x = data
    n_total = y.size
    sizes = partition_sizes(spec, n_total, rng)
    if spec.model is not ModelKind.T_TEST:
        edges = np.concatenate([[0], np.cumsum(sizes)])
        return [np.arange(edges[i], edges[i + 1]) for i in range(spec.k)]
    group0 = np.flatnonzero(x == 0.0)
    group1 = np.flatnonzero(x == 1.0)
    remaining0, remaining1 = group0.size, group1.size
    used0 = used1 = 0
    parts = []
    for size in sizes:
        take0 = int(round(size * remaining0 / (remaining0 + remaining1)))
        take0 = min(max(take0, size - remaining1), remaining0, size)
        take1 = int(size - take0)
        parts.append(
            np.concatenate([group0[used0:used0 + take0], group1[used1:used1 + take1]])
        )
        used0 += take0
        used1 += take1
        remaining0 -= take0
        remaining1 -= take1
    return parts


def regression_stats(y, x):
    """(t, nu, ss) of the slope in a simple regression with intercept.

    For a 0/1 group indicator this is exactly the pooled-variance
    two-sample t statistic with ``ss = n1 n2 / n``.
    """
    n = y.size
    xc = x - x.mean()
    yc = y - y.mean()
    ss = float(xc @ xc)
    if ss <= 0.0:
        raise DomainError("covariate is constant within a study")
    slope = float(xc @ yc) / ss
    rss = float(yc @ yc) - slope * slope * ss
    sigma2 = rss / (n - 2)
    return slope * math.sqrt(ss / sigma2), float(n - 2), ss


def _replicate_rng(seed: int, replicate_index: int):
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(replicate_index,))
    )


def _compute_replicate(spec: ScenarioSpec, replicate_index: int) -> ReplicateOutcome:
    rng = _replicate_rng(spec.seed, replicate_index)
    if spec.n_total is not None:
        n_total = spec.n_total
    else:
        lo, hi = spec.n_range
        n_total = int(rng.integers(lo, hi + 1))
    y, x = generate_dataset(spec, rng, n_total)
    parts = partition((y, x), spec, rng)

    t_full, nu_full, ss_full = regression_stats(y, x)
    full_g = gprior_bf10_from_t(t_full * t_full, n_total, n_total)
    full_jzs = jzs_bf10(t_full, nu_full, ss_full)

    stats = [regression_stats(y[idx], x[idx]) for idx in parts]
    ts = np.array([s[0] for s in stats])
    nus = np.array([s[1] for s in stats])
    sss = np.array([s[2] for s in stats])
    sizes = np.array([idx.size for idx in parts])

    frac = sample_fraction_weights(sizes)
    signed = np.sign(ts) * np.abs(ts)
    t_partial = float(np.sum(frac.w * signed))
    t_limited = float(np.sum(frac.w * np.abs(ts)))
    var_w = variance_weights(list(zip(ts, nus, sss)))
    t_detailed = float(np.sum(var_w.w * signed))

    meta = {
        MetaMethod.META_BF_G_D: gprior_bf10_from_t(t_detailed**2, n_total, n_total),
        MetaMethod.META_BF_G_P: gprior_bf10_from_t(t_partial**2, n_total, n_total),
        MetaMethod.META_BF_G_L: gprior_bf10_from_t(t_limited**2, n_total, n_total),
        MetaMethod.META_BF_JZS: meta_bf_jzs(list(zip(ts, nus, sss))).meta_bf,
    }
    return ReplicateOutcome(
        n_total=n_total,
        full_g=full_g,
        full_jzs=full_jzs,
        meta=meta,
        t_stats=ts,
        nus=nus,
        ss_x=sss,
        sizes=sizes,
    )


def _try_replicate(args):
    spec, index = args
    try:
        return index, _compute_replicate(spec, index), None
    except (QuadratureError, DomainError) as exc:
        return index, None, str(exc)


def run_scenario(spec: ScenarioSpec, workers: int | None = None) -> ScenarioResult:
    """Run all replicates of a scenario and aggregate the metrics.

    A replicate is dropped (and counted in ``failures``) only when *any*
    method fails on it, keeping every cross-method comparison paired.
    Results are independent of ``workers``.
    """
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV_VAR, "1"))
    tasks = [(spec, r) for r in range(spec.replicates)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_try_replicate, tasks, chunksize=8))
    else:
        raw = [_try_replicate(task) for task in tasks]
    raw.sort(key=lambda item: item[0])
    outcomes = []
    failures = 0
    for _, outcome, error in raw:
        if outcome is None:
            failures += 1
        else:
            outcomes.append(outcome)

    metrics = {}
    for method in meta_methods():
        reference = "full_jzs" if method is MetaMethod.META_BF_JZS else "full_g"
        diffs = np.array(
            [o.meta[method].two_log_bf - getattr(o, reference).two_log_bf for o in outcomes]
        )
        if diffs.size == 0:
            metrics[method] = MetricsSummary(math.nan, math.nan, None, 0)
            continue
        bias = float(diffs.mean())
        rmse = float(np.sqrt(np.mean(diffs * diffs)))
        kappa = _agreement_kappa(spec, outcomes, method, reference)
        metrics[method] = MetricsSummary(bias, rmse, kappa, diffs.size)
    return ScenarioResult(
        spec=spec, metrics=metrics, outcomes=tuple(outcomes), failures=failures
    )


def meta_methods():
    return G_PRIOR_METHODS + (MetaMethod.META_BF_JZS,)


def _agreement_kappa(spec, outcomes, method, reference):
    """Weighted kappa between full-data and meta evidence levels.

    Under the null scenario (beta == 0) both Bayes factors are flipped to
    the BF01 orientation before grading, mirroring how evidence *for* the
    null is reported there; otherwise negative 2logBF10 values all fold
    into the lowest grade and the agreement statistic would be vacuous.
    """
    flip = spec.beta == 0.0
    ref_levels = []
    est_levels = []
    for o in outcomes:
        ref = getattr(o, reference)
        est = o.meta[method]
        if flip:
            ref, est = ref.flip().as_bf10(), est.flip().as_bf10()
        ref_levels.append(int(classify(ref)))
        est_levels.append(int(classify(est)))
    try:
        return weighted_kappa(AgreementTable.from_levels(ref_levels, est_levels))
    except UndefinedAgreementError:
        return None


def expand_scenarios(config: dict) -> list:
    """Expand a scenario mapping into the grid of ScenarioSpec cells.

    Recognised keys: model, betas (or beta), k_values (or k), partition,
    weights_sq, n_total or n_range, replicates, seed.
    """
    try:
        model = ModelKind(config["model"])
        partition_kind = PartitionKind(config.get("partition", "EQ"))
        betas = config.get("betas", None)
        if betas is None:
            betas = [config["beta"]]
        ks = config.get("k_values", None)
        if ks is None:
            ks = [config["k"]]
        replicates = int(config["replicates"])
        seed = int(config["seed"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid scenario configuration: {exc}") from exc
    n_total = config.get("n_total")
    n_range = config.get("n_range")
    weights_sq = config.get("weights_sq")
    specs = []
    for k in ks:
        for beta in betas:
            specs.append(
                ScenarioSpec(
                    model=model,
                    beta=float(beta),
                    k=int(k),
                    partition=partition_kind,
                    replicates=replicates,
                    seed=seed,
                    n_total=int(n_total) if n_total is not None else None,
                    n_range=tuple(int(v) for v in n_range) if n_range else None,
                    weights_sq=tuple(weights_sq) if weights_sq else None,
                )
            )
    return specs


def load_scenario_file(path) -> list:
    """Read a TOML scenario file and expand it into ScenarioSpec cells."""
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as handle:
        try:
            config = tomllib.load(handle)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse scenario file {path}: {exc}") from exc
    return expand_scenarios(config)
