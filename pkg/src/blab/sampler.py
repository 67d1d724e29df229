"""Uniform random triangulations.

Small ``n`` is handled exactly: :func:`enumerate_triangulations` lists every
isomorphism class by closing the bipyramid under edge flips.  Large ``n``
uses a flip Markov chain (:func:`mcmc_sample`).

The chain proposes a uniformly random dart and flips its edge when the flip
is legal, otherwise it stays put.  The proposal probability of any flip is
``1/(2E)`` in both directions and ``E = 3(n-2)`` is the same in every state,
so the chain is symmetric and its stationary law is uniform over the labelled
states it can reach.  Projected to isomorphism classes this weights class
``T`` by ``1/|Aut(T)|``, which is the uniform law on *rooted* triangulations.
Large-``n`` output is MCMC-approximate: no mixing bound is claimed.
"""
from __future__ import annotations

import enum
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import NotFlippable, ResourceLimit
from .maps import (
    Triangulation,
    TriangulationClass,
    automorphism_count,
    build_from_rotation,
    canonical_code,
    from_canonical_code,
    initial_triangulation,
)
from .seeding import make_rng

_REASONS = {
    _kernels.FLIP_SAME_FACE: "same-face",
    _kernels.FLIP_LOOP: "loop",
    _kernels.FLIP_EXISTING: "existing-edge",
    _kernels.FLIP_NOT_TRIANGLE: "not-triangle",
}

DEFAULT_BUDGET = 2_000_000


def default_budget():
    return int(os.environ.get("BLAB_BUDGET_NODES", DEFAULT_BUDGET))


class Method(enum.Enum):
    ENUMERATE = "enumerate"
    FLIP_MCMC = "flip_mcmc"


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters of a random triangulation ensemble.

    ``burn_in`` and ``thinning`` default to ``50 E`` and ``E`` proposals with
    ``E = 3(n-2)``.
    """

    n: int
    cls: TriangulationClass = TriangulationClass.SIMPLE
    method: Method = Method.FLIP_MCMC
    burn_in: int | None = None
    thinning: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cls", TriangulationClass.parse(self.cls))
        object.__setattr__(self, "method", Method(self.method))
        lowest = 4 if self.cls is TriangulationClass.SIMPLE else 3
        if self.n < lowest:
            raise ValueError(f"{self.cls.value} triangulations need n >= {lowest}")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thinning is not None and self.thinning < 0:
            raise ValueError("thinning must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a u64")

    @property
    def edge_count(self):
        return 3 * (self.n - 2)

    @property
    def burn_in_steps(self):
        return 50 * self.edge_count if self.burn_in is None else self.burn_in

    @property
    def thinning_steps(self):
        return self.edge_count if self.thinning is None else self.thinning


# ---------------------------------------------------------------- flipping


def _inverse(p):
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p))
    return inv


def flip_edge(t: Triangulation, edge: int) -> Triangulation:
    """Flip edge ``edge`` (an index into ``t.edge_darts``).

    The flipped edge keeps its id and dart ids, so flipping the same edge id
    again undoes the move up to isomorphism.  Raises :class:`NotFlippable`
    when the two incident faces coincide or, for SIMPLE triangulations, when
    the new diagonal would be a loop or duplicate an existing edge.
    """
    if not 0 <= edge < t.edge_count:
        raise IndexError(f"edge {edge} out of range 0..{t.edge_count - 1}")
    d = int(t.edge_darts[edge])
    return _flip_dart(t, d)


def _flip_dart(t, d):
    simple = t.cls is TriangulationClass.SIMPLE
    status = _kernels.flip_check(t.twin, t.next, t.origin, d, simple)
    if status != _kernels.FLIP_OK:
        raise NotFlippable(_REASONS[status])
    nxt = np.array(t.next)
    origin = np.array(t.origin)
    prv = _inverse(nxt)
    _kernels.flip_apply(t.twin, nxt, prv, origin, d)
    return build_from_rotation((np.array(t.twin), nxt, origin), cls=t.cls)


def flippable_edges(t: Triangulation):
    simple = t.cls is TriangulationClass.SIMPLE
    return [k for k, d in enumerate(t.edge_darts)
            if _kernels.flip_check(t.twin, t.next, t.origin, int(d), simple)
            == _kernels.FLIP_OK]


# ------------------------------------------------------------- enumeration


def enumerate_classes(n, cls=TriangulationClass.SIMPLE, budget=None):
    """Map canonical code -> representative for every class with ``n`` vertices.

    Breadth-first closure of the flip graph starting from the bipyramid.
    ``budget`` caps the number of flip attempts; :class:`ResourceLimit` is
    raised when it is exhausted.
    """
    cls = TriangulationClass.parse(cls)
    budget = default_budget() if budget is None else budget
    start = initial_triangulation(n, cls)
    reps = {canonical_code(start): start}
    queue = deque([start])
    attempts = 0
    simple = cls is TriangulationClass.SIMPLE
    while queue:
        t = queue.popleft()
        for d in t.edge_darts:
            attempts += 1
            if attempts > budget:
                raise ResourceLimit(
                    f"enumeration of n={n} exceeded {budget} flip attempts")
            d = int(d)
            if _kernels.flip_check(t.twin, t.next, t.origin, d, simple) != _kernels.FLIP_OK:
                continue
            s = _flip_dart(t, d)
            code = canonical_code(s)
            if code not in reps:
                reps[code] = s
                queue.append(s)
    return dict(sorted(reps.items()))


def enumerate_triangulations(n, cls=TriangulationClass.SIMPLE, budget=None):
    """Sorted canonical codes of all triangulations with ``n`` vertices.

    Classes are taken up to orientation-preserving isomorphism, so a chiral
    triangulation and its mirror image are both listed.
    """
    return list(enumerate_classes(n, cls, budget))


def rooted_count(n, cls=TriangulationClass.SIMPLE, budget=None):
    """Number of rooted triangulations: sum over classes of ``2E / |Aut|``."""
    total = 0
    for t in enumerate_classes(n, cls, budget).values():
        total += Fraction(t.map.dart_count, automorphism_count(t))
    assert total.denominator == 1
    return int(total)


def flip_transitions(reps):
    """Exact one-step transition probabilities of the lazy chain between classes.

    ``reps`` maps canonical codes to representatives (as returned by
    :func:`enumerate_classes`).  Returns ``{(a, b): Fraction}``, including the
    holding probability ``(a, a)``.
    """
    out = {}
    for code, t in reps.items():
        m = t.map.dart_count
        simple = t.cls is TriangulationClass.SIMPLE
        for d in range(m):
            if _kernels.flip_check(t.twin, t.next, t.origin, d, simple) == _kernels.FLIP_OK:
                target = canonical_code(_flip_dart(t, d))
            else:
                target = code
            out[(code, target)] = out.get((code, target), 0) + Fraction(1, m)
    return out


def stationary_weights(reps):
    """Class weights ``1/|Aut|`` normalised to sum to one (exact)."""
    w = {code: Fraction(1, automorphism_count(t)) for code, t in reps.items()}
    z = sum(w.values())
    return {k: v / z for k, v in w.items()}


# ------------------------------------------------------------------- chain


@dataclass
class FlipChain:
    """Mutable flip-chain state.  Use :func:`mcmc_sample` for the public API."""

    n: int
    cls: TriangulationClass
    rng: np.random.Generator
    twin: np.ndarray = field(repr=False)
    nxt: np.ndarray = field(repr=False)
    prv: np.ndarray = field(repr=False)
    origin: np.ndarray = field(repr=False)
    steps: int = 0
    accepted: int = 0

    CHUNK = 1 << 20

    @classmethod
    def start(cls, n, tclass, seed, tag="flip-chain", index=()):
        t = initial_triangulation(n, tclass)
        # int32 state halves the memory traffic of the flip loop
        nxt = t.next.astype(np.int32)
        return cls(
            n=n,
            cls=t.cls,
            rng=make_rng(seed, tag, *index),
            twin=t.twin.astype(np.int32),
            nxt=nxt,
            prv=_inverse(nxt),
            origin=t.origin.astype(np.int32),
        )

    def run(self, steps):
        m = len(self.twin)
        simple = self.cls is TriangulationClass.SIMPLE
        left = steps
        while left > 0:
            k = min(left, self.CHUNK)
            proposals = self.rng.integers(0, m, size=k, dtype=np.int32)
            self.accepted += _kernels.run_flips(
                self.twin, self.nxt, self.prv, self.origin, proposals, simple)
            left -= k
        self.steps += steps

    def code(self):
        return canonical_code_arrays(self.twin, self.nxt)

    def adjacency(self):
        return _kernels.adjacency(self.twin, self.origin, self.n)

    def snapshot(self):
        return build_from_rotation(
            (self.twin.copy(), self.nxt.copy(), self.origin.copy()), cls=self.cls)


def canonical_code_arrays(twin, nxt):
    code, _ = _kernels.canonical_code(twin, nxt)
    return np.asarray(code, dtype=">u4").tobytes()


def mcmc_sample(spec: EnsembleSpec, count):
    """Yield ``count`` triangulations from the flip chain described by ``spec``.

    The chain starts from the bipyramid, runs ``burn_in`` proposals, then emits
    a snapshot every ``thinning`` proposals.  Deterministic given
    ``spec.seed``.
    """
    chain = FlipChain.start(spec.n, spec.cls, spec.seed)
    chain.run(spec.burn_in_steps)
    for i in range(count):
        if i:
            chain.run(spec.thinning_steps)
        yield chain.snapshot()


def sample_triangulations(spec: EnsembleSpec, count):
    """Like :func:`mcmc_sample` but dispatches on ``spec.method``.

    With ``ENUMERATE`` every sample is an independent draw from the exact
    rooted-uniform law (class weight ``1/|Aut|``).
    """
    if spec.method is Method.FLIP_MCMC:
        yield from mcmc_sample(spec, count)
        return
    reps = enumerate_classes(spec.n, spec.cls)
    weights = stationary_weights(reps)
    codes = list(reps)
    p = np.array([float(weights[c]) for c in codes])
    rng = make_rng(spec.seed, "enumerate-draw")
    for k in rng.choice(len(codes), size=count, p=p / p.sum()):
        yield from_canonical_code(codes[k], spec.cls)
