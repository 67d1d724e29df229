"""Ensemble experiments on rescaled random triangulations.

Convergence in distribution of random metric spaces cannot be certified by a
finite computation.  What we can do is push each ensemble through an
observable that is continuous on Gromov-Hausdorff space and watch the
resulting real distributions settle as ``n`` grows.  The rescaled diameter
is 2-Lipschitz for d_GH; the two-point distance is a cheaper companion.

Every sample comes from its own flip chain started at the bipyramid, with a
seed derived from ``(master seed, "chain", n, index)``.  Results are labelled
MCMC-approximate.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import ks_2samp

from . import _kernels
from .errors import InsufficientData
from .maps import TriangulationClass
from .metric import edge_length, two_point_distance
from .sampler import EnsembleSpec, FlipChain, Method, sample_triangulations
from .seeding import derive_seed, make_rng

DEFAULT_KS_SLACK = 0.02
DEFAULT_DRIFT = 0.15


class Observable(enum.Enum):
    RESCALED_DIAMETER = "rescaled_diameter"
    TWO_POINT = "two_point"


@dataclass(frozen=True)
class ExperimentConfig:
    """``burn_in_per_edge`` is the burn-in in units of ``E = 3(n-2)`` proposals."""

    n_values: tuple
    samples_per_n: int = 500
    observable: Observable = Observable.RESCALED_DIAMETER
    cls: TriangulationClass = TriangulationClass.SIMPLE
    method: Method = Method.FLIP_MCMC
    burn_in_per_edge: float = 50.0
    master_seed: int = 0
    output_dir: str | None = None
    jobs: int = 1
    min_samples: int = 100

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "observable", Observable(self.observable))
        object.__setattr__(self, "cls", TriangulationClass.parse(self.cls))
        object.__setattr__(self, "method", Method(self.method))
        ns = self.n_values
        if not ns:
            raise ValueError("n_values is empty")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n_values must be strictly increasing")
        if self.samples_per_n < self.min_samples:
            raise ValueError(f"samples_per_n must be >= {self.min_samples}")
        if self.burn_in_per_edge < 0:
            raise ValueError("burn_in_per_edge must be >= 0")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        for n in ns:
            EnsembleSpec(n=n, cls=self.cls)

    def burn_in(self, n):
        return int(round(self.burn_in_per_edge * 3 * (n - 2)))

    def to_dict(self):
        return {
            "n_values": list(self.n_values),
            "samples_per_n": self.samples_per_n,
            "observable": self.observable.value,
            "cls": self.cls.value,
            "method": self.method.value,
            "burn_in_per_edge": self.burn_in_per_edge,
            "master_seed": self.master_seed,
            "min_samples": self.min_samples,
        }

    @classmethod
    def from_dict(cls, d, **overrides):
        kw = dict(d)
        kw["n_values"] = tuple(kw["n_values"])
        kw.update(overrides)
        return cls(**kw)


@dataclass(frozen=True)
class SampleRecord:
    n: int
    index: int
    seed: int
    value: float


@dataclass(frozen=True)
class EmpiricalDistribution:
    observable: Observable
    n: int
    samples: np.ndarray
    seeds: tuple = ()

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.size == 0:
            raise ValueError("empty distribution")
        if not np.all(np.isfinite(s)):
            raise ValueError("non-finite sample")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def median(self):
        return float(np.median(self.samples))

    @property
    def iqr(self):
        q1, q3 = np.percentile(self.samples, [25, 75])
        return float(q3 - q1)


def chain_seed(config, n, index):
    return derive_seed(config.master_seed, "chain", n, index)


def _sample_spec(config, n, seed):
    return EnsembleSpec(n=n, cls=config.cls, method=config.method,
                        burn_in=config.burn_in(n), seed=seed)


def evaluate_sample(config: ExperimentConfig, n: int, index: int) -> SampleRecord:
    """Draw sample ``index`` at size ``n`` and evaluate the observable."""
    seed = chain_seed(config, n, index)
    spec = _sample_spec(config, n, seed)
    if config.observable is Observable.RESCALED_DIAMETER:
        if spec.method is Method.FLIP_MCMC:
            # skip building a Triangulation; same chain as mcmc_sample(spec, 1)
            chain = FlipChain.start(n, spec.cls, seed)
            chain.run(spec.burn_in_steps)
            indptr, indices = chain.adjacency()
        else:
            t = next(sample_triangulations(spec, 1))
            indptr, indices = t.adjacency
        hops, _ = _kernels.exact_diameter(indptr, indices)
        value = float(hops) * edge_length(n)
    else:
        t = next(sample_triangulations(spec, 1))
        value = two_point_distance(t, make_rng(config.master_seed, "two-point", n, index))
    return SampleRecord(n=n, index=index, seed=seed, value=value)


def run_experiment(config: ExperimentConfig, progress=None):
    """Return ``(distributions, records)``; one distribution per ``n``.

    Records are ordered by ``(n, index)`` regardless of ``config.jobs``.
    """
    tasks = [(n, i) for n in config.n_values for i in range(config.samples_per_n)]
    if config.jobs == 1:
        records = []
        for n, i in tasks:
            records.append(evaluate_sample(config, n, i))
            if progress:
                progress(n, i)
    else:
        with ThreadPoolExecutor(config.jobs) as pool:
            records = list(pool.map(lambda a: evaluate_sample(config, *a), tasks))
    records.sort(key=lambda r: (r.n, r.index))
    dists = []
    for n in config.n_values:
        rs = [r for r in records if r.n == n]
        dists.append(EmpiricalDistribution(
            observable=config.observable,
            n=n,
            samples=[r.value for r in rs],
            seeds=tuple(r.seed for r in rs),
        ))
    return dists, records


def _values(x):
    if isinstance(x, EmpiricalDistribution):
        return x.samples
    return np.asarray(x, dtype=np.float64)


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = _values(a)
    b = _values(b)
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    return float(ks_2samp(a, b).statistic)


def ks_critical_value(n, m, alpha=0.01):
    """Asymptotic two-sample critical value ``c(alpha) sqrt((n+m)/(nm))``."""
    c = np.sqrt(-0.5 * np.log(alpha / 2.0))
    return float(c * np.sqrt((n + m) / (n * m)))


@dataclass
class StabilityReport:
    n_values: list
    medians: list
    iqrs: list
    ks_to_next: list
    drift: float
    ks_slack: float
    drift_tolerance: float
    ks_ok: bool
    drift_ok: bool
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.ks_ok and self.drift_ok

    def rows(self, observable):
        out = []
        for k, n in enumerate(self.n_values):
            ks = self.ks_to_next[k] if k < len(self.ks_to_next) else float("nan")
            out.append((n, observable, self.medians[k], self.iqrs[k], ks))
        return out

    def format(self):
        lines = [f"{'n':>8} {'median':>10} {'iqr':>8} {'ks_to_next':>10}"]
        for k, n in enumerate(self.n_values):
            ks = f"{self.ks_to_next[k]:.4f}" if k < len(self.ks_to_next) else "-"
            lines.append(f"{n:>8} {self.medians[k]:>10.5f} {self.iqrs[k]:>8.5f} {ks:>10}")
        lines.append(f"top-octave median drift {self.drift:.4f} "
                     f"(tolerance {self.drift_tolerance})")
        lines.append("KS non-increasing within slack "
                     f"{self.ks_slack}: {'yes' if self.ks_ok else 'no'}")
        lines.append("PASS" if self.passed else "FAIL")
        lines.extend(self.notes)
        return "\n".join(lines)


def median_drift(ns, medians):
    """Relative spread ``(max - min) / min`` of medians with ``n >= n_max / 2``."""
    top = max(ns)
    ms = [m for n, m in zip(ns, medians) if n >= top / 2]
    lo, hi = min(ms), max(ms)
    if hi == lo:
        return 0.0
    if lo <= 0:
        return float("inf")
    return (hi - lo) / lo


def stability_report(dists, ks_slack=DEFAULT_KS_SLACK, drift_tolerance=DEFAULT_DRIFT):
    """Consecutive KS statistics and median drift over increasing ``n``.

    PASS when each KS statistic exceeds its predecessor by at most
    ``ks_slack`` and the medians in the top octave of ``n`` stay within
    ``drift_tolerance`` of each other (relative).  Evidence only.
    """
    dists = sorted(dists, key=lambda d: d.n)
    if len(dists) < 3:
        raise InsufficientData("stability report needs at least three values of n")
    ns = [d.n for d in dists]
    medians = [d.median for d in dists]
    iqrs = [d.iqr for d in dists]
    ks = [ks_statistic(a, b) for a, b in zip(dists, dists[1:])]
    ks_ok = all(b <= a + ks_slack for a, b in zip(ks, ks[1:]))
    drift = median_drift(ns, medians)
    return StabilityReport(
        n_values=ns, medians=medians, iqrs=iqrs, ks_to_next=ks, drift=drift,
        ks_slack=ks_slack, drift_tolerance=drift_tolerance,
        ks_ok=ks_ok, drift_ok=drift < drift_tolerance,
        notes=["MCMC-approximate: no mixing-time bound is available."],
    )
