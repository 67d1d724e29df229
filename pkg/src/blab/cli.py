"""Command line entry point: ``blab <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 resource limit, 3 validation or
parse failure.  All randomness derives from ``--seed`` through
:func:`blab.seeding.derive_seed`; every run that writes files also writes a
``manifest.json`` that is enough to reproduce it.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io as bio
from .errors import DegenerateWindow, ParseError, ResourceLimit, ValidationError
from .gff import GAMMA_BROWNIAN, build_basis, lqg_measure, parse_mesh, pointwise_variance, sample_gff
from .gh import gh_distance_exact, gh_lower_bounds
from .lab import ExperimentConfig, Observable, run_experiment, stability_report
from .metric import ball_growth, dimension_estimate, edge_length, hop_diameter, two_point_distance
from .sampler import EnsembleSpec, Method, enumerate_triangulations, sample_triangulations
from .seeding import FORMAT_VERSION, derive_seed, make_rng

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_INVALID = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    output_dir: str | None = None
    format: str = FORMAT_VERSION
    extra: dict = field(default_factory=dict)

    def manifest(self, **records):
        out = asdict(self)
        out.update(records)
        return out


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser():
    p = _Parser(prog="blab", description="Random triangulations, GH distances, GFF and LQG.")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("sample", help="sample triangulations")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--class", dest="cls", choices=["simple", "general"], default="simple")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--burn-in", type=_nonneg, default=None)
    s.add_argument("--thin", type=_nonneg, default=None)
    s.add_argument("--method", choices=[m.value for m in Method], default="flip_mcmc")
    s.add_argument("--out", required=True)

    s = sub.add_parser("enumerate", help="list triangulation classes")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--class", dest="cls", choices=["simple", "general"], default="simple")
    s.add_argument("--out", default=None, help="codes file (default codes_n<N>_<class>.txt)")

    s = sub.add_parser("metric", help="metric observables of triangulation files")
    s.add_argument("files", nargs="+")
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--centers", type=int, default=0, help="ball-growth centers (0 = skip)")
    s.add_argument("--ensemble-out", default=None)
    s.add_argument("--profile-out", default=None, help="profile CSV of the first file")

    s = sub.add_parser("gh", help="Gromov-Hausdorff distance of two matrix files")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--budget", type=int, default=None)

    s = sub.add_parser("gff", help="sample a Gaussian free field")
    s.add_argument("--lmax", type=int, required=True)
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--grid", default="32x64")
    s.add_argument("--out", default=None)

    s = sub.add_parser("lqg", help="Liouville area measure")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma", type=float)
    g.add_argument("--gamma-brownian", action="store_true", help="gamma = sqrt(8/3)")
    s.add_argument("--mesh", default="128x256")
    s.add_argument("--lmax", type=int, default=16)
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--out", default=None)

    s = sub.add_parser("converge", help="scaling experiment over several n")
    s.add_argument("--n", type=int, nargs="+", required=True)
    s.add_argument("--samples", type=int, default=500)
    s.add_argument("--observable", choices=[o.value for o in Observable],
                   default="rescaled_diameter")
    s.add_argument("--class", dest="cls", choices=["simple", "general"], default="simple")
    s.add_argument("--burn-in-per-edge", type=float, default=50.0)
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--out", default=None)
    return p


def _outdir(path):
    d = Path(path)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_sample(a, out):
    spec = EnsembleSpec(n=a.n, cls=a.cls, method=a.method, burn_in=a.burn_in,
                        thinning=a.thin, seed=a.seed)
    if a.count < 1:
        raise ValueError("--count must be >= 1")
    d = _outdir(a.out)
    files = []
    for i, t in enumerate(sample_triangulations(spec, a.count)):
        name = f"sample_{i:05d}.tri"
        bio.save_triangulation(t, d / name)
        files.append(name)
    cfg = RunConfig("sample", {
        "n": spec.n, "class": spec.cls.value, "method": spec.method.value,
        "count": a.count, "seed": spec.seed, "burn_in": spec.burn_in_steps,
        "thinning": spec.thinning_steps,
    }, output_dir=str(a.out))
    label = "MCMC-approximate" if spec.method is Method.FLIP_MCMC else "exact"
    bio.save_manifest(d / "manifest.json", cfg.manifest(samples=files, label=label))
    out.write(f"wrote {len(files)} samples to {a.out} ({label})\n")


def cmd_enumerate(a, out):
    codes = enumerate_triangulations(a.n, a.cls)
    path = Path(a.out or f"codes_n{a.n}_{a.cls}.txt")
    path.write_text("".join(c.hex() + "\n" for c in codes), encoding="ascii")
    out.write(f"{len(codes)}\n")


def cmd_metric(a, out):
    rows = []
    for i, f in enumerate(a.files):
        t = bio.load_triangulation(f)
        seed = derive_seed(a.seed, "two-point", i)
        hops = hop_diameter(t)
        tp = two_point_distance(t, np.random.Generator(np.random.PCG64(seed)))
        rows.append((t.n, seed, hops * edge_length(t.n), tp))
        out.write(f"{f}: n={t.n} hop_diameter={hops} rescaled_diameter={hops * edge_length(t.n)!r}"
                  f" two_point={tp!r}\n")
        if i == 0 and a.centers > 0:
            prof = ball_growth(t, a.centers, make_rng(a.seed, "ball-growth"))
            try:
                out.write(f"{f}: dimension_estimate={dimension_estimate(prof)!r}\n")
            except DegenerateWindow as exc:
                out.write(f"{f}: dimension_estimate unavailable ({exc})\n")
            if a.profile_out:
                Path(a.profile_out).write_text(bio.format_profile(prof), encoding="ascii")
    if a.ensemble_out:
        Path(a.ensemble_out).write_text(bio.format_ensemble(rows), encoding="ascii")


def cmd_gh(a, out, err):
    X = bio.load_matrix(a.x)
    Y = bio.load_matrix(a.y)
    res = gh_distance_exact(X, Y, budget=a.budget)
    out.write(f"{res.value:.17g}\n")
    err.write(f"lower bound {gh_lower_bounds(X, Y):.17g}\n")


def cmd_gff(a, out):
    basis = build_basis(a.lmax)
    s = sample_gff(basis, a.seed)
    mesh = parse_mesh(a.grid)
    th, ph = mesh.centers
    vals = s(th, ph)
    out.write(f"lmax={a.lmax} seed={a.seed} pointwise_variance={pointwise_variance(a.lmax)!r}\n")
    out.write(f"grid {a.grid}: mean={float(vals.mean())!r} min={float(vals.min())!r} "
              f"max={float(vals.max())!r}\n")
    if a.out:
        Path(a.out).write_text(
            bio.format_field(th, ph, vals, header=f"lmax={a.lmax} seed={a.seed}"),
            encoding="ascii")


def cmd_lqg(a, out):
    gamma = GAMMA_BROWNIAN if a.gamma_brownian else a.gamma
    if gamma < 0:
        raise ValueError("--gamma must be >= 0")
    basis = build_basis(a.lmax)
    mesh = parse_mesh(a.mesh)
    m = lqg_measure(sample_gff(basis, a.seed), gamma, mesh)
    out.write(f"gamma={gamma!r} lmax={a.lmax} mesh={a.mesh} seed={a.seed} "
              f"total_mass={m.total_mass!r} (sphere area {4 * math.pi!r})\n")
    if a.out:
        Path(a.out).write_text(bio.format_measure(m), encoding="ascii")


def cmd_converge(a, out, jobs):
    cfg = ExperimentConfig(
        n_values=tuple(a.n), samples_per_n=a.samples, observable=a.observable,
        cls=a.cls, burn_in_per_edge=a.burn_in_per_edge, master_seed=a.seed,
        output_dir=a.out, jobs=jobs)
    dists, records = run_experiment(cfg)
    report = None
    if len(dists) >= 3:
        report = stability_report(dists)
        out.write(report.format() + "\n")
    else:
        for d in dists:
            out.write(f"n={d.n} median={d.median!r} iqr={d.iqr!r}\n")
    if a.out:
        d = _outdir(a.out)
        run = RunConfig("converge", cfg.to_dict(), output_dir=str(a.out))
        bio.save_manifest(d / "manifest.json", run.manifest(
            label="MCMC-approximate",
            records=[{"n": r.n, "index": r.index, "seed": r.seed, "value": r.value}
                     for r in records]))
        if report is not None:
            (d / "summary.csv").write_text(
                bio.format_summary(report, cfg.observable.value), encoding="ascii")


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        a = parser.parse_args(argv)
        if a.command is None:
            raise UsageError(parser.format_help())
        if a.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if a.command == "converge":
            cmd_converge(a, out, a.jobs)
        elif a.command == "gh":
            cmd_gh(a, out, err)
        else:
            globals()[f"cmd_{a.command}"](a, out)
    except UsageError as exc:
        err.write(str(exc).rstrip() + "\n")
        return EXIT_USAGE
    except ResourceLimit as exc:
        err.write(f"blab: resource limit: {exc}\n")
        return EXIT_RESOURCE
    except (ParseError, ValidationError) as exc:
        err.write(f"blab: invalid input: {exc}\n")
        return EXIT_INVALID
    except ValueError as exc:
        err.write(parser.format_usage())
        err.write(f"blab: error: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
