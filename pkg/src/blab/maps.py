"""Triangulations of the sphere as combinatorial maps.

A map is stored as three integer arrays indexed by dart id:

* ``twin[d]``   the opposite half of the edge carrying ``d``;
* ``next[d]``   the dart following ``d`` counterclockwise around its origin;
* ``origin[d]`` the vertex ``d`` leaves from.

Faces are the cycles of ``phi = next o twin`` (``phi(d) = next[twin[d]]``).
Two maps are the same triangulation when some dart bijection carries
``twin`` to ``twin`` and ``next`` to ``next``; this is the combinatorial form
of an orientation-preserving homeomorphism of the sphere that maps one
embedded graph onto the other.  Mirror images are *not* identified unless
``reflection=True`` is passed explicitly.

Two classes of triangulation are supported.  ``SIMPLE`` forbids loops and
multiple edges and is the default.  ``GENERAL`` allows both.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import (
    Disconnected,
    MalformedPermutation,
    NotSphere,
    NotTriangular,
    ValidationError,
)


class NotSimple(ValidationError):
    """A SIMPLE triangulation has a loop or a multiple edge."""


class TriangulationClass(enum.Enum):
    GENERAL = "general"
    SIMPLE = "simple"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown triangulation class {value!r}") from None


class Dart(NamedTuple):
    id: int
    twin: int
    next: int
    origin: int


def _frozen(a):
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def _cycles(perm):
    m = len(perm)
    seen = np.zeros(m, dtype=bool)
    out = []
    for start in range(m):
        if seen[start]:
            continue
        cyc = []
        d = start
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        out.append(cyc)
    return out


def _check_permutation(p, name):
    m = len(p)
    if m and (p.min() < 0 or p.max() >= m):
        raise MalformedPermutation(f"{name} has entries outside 0..{m - 1}")
    if len(np.unique(p)) != m:
        raise MalformedPermutation(f"{name} is not a permutation")


@dataclass(frozen=True, eq=False)
class RotationSystem:
    """An oriented combinatorial map.  Build it with :meth:`from_arrays`."""

    twin: np.ndarray
    next: np.ndarray
    origin: np.ndarray
    vertex_count: int
    edge_count: int
    face_count: int

    @classmethod
    def from_arrays(cls, twin, next, origin=None):
        """Validate the permutations and derive counts.

        ``origin`` may be omitted, in which case vertices are numbered by the
        first appearance of their rotation cycle.  When given, it must be
        constant on every ``next`` cycle and distinct across cycles, with
        vertex ids exactly ``0..V-1``.
        """
        twin = np.asarray(twin, dtype=np.int64)
        nxt = np.asarray(next, dtype=np.int64)
        m = len(twin)
        if len(nxt) != m:
            raise MalformedPermutation("twin and next differ in length")
        if m % 2:
            raise MalformedPermutation("odd number of darts")
        _check_permutation(twin, "twin")
        _check_permutation(nxt, "next")
        idx = np.arange(m)
        if np.any(twin[twin] != idx) or np.any(twin == idx):
            raise MalformedPermutation("twin is not a fixed-point-free involution")

        vcycles = _cycles(nxt)
        if origin is None:
            org = np.empty(m, dtype=np.int64)
            for v, cyc in enumerate(vcycles):
                org[cyc] = v
        else:
            org = np.asarray(origin, dtype=np.int64)
            if len(org) != m:
                raise MalformedPermutation("origin has the wrong length")
            seen = set()
            for cyc in vcycles:
                vs = set(org[cyc].tolist())
                if len(vs) != 1:
                    raise MalformedPermutation(
                        f"darts {cyc} share a rotation but not an origin")
                (v,) = vs
                if v in seen:
                    raise MalformedPermutation(
                        f"vertex {v} carries more than one rotation cycle")
                seen.add(v)
            if seen != set(range(len(vcycles))):
                raise MalformedPermutation("vertex ids are not 0..V-1")

        phi = nxt[twin]
        return cls(
            twin=_frozen(twin),
            next=_frozen(nxt),
            origin=_frozen(org),
            vertex_count=len(vcycles),
            edge_count=m // 2,
            face_count=len(_cycles(phi)),
        )

    @property
    def dart_count(self):
        return len(self.twin)

    def dart(self, d):
        return Dart(int(d), int(self.twin[d]), int(self.next[d]), int(self.origin[d]))

    def darts(self):
        return [self.dart(d) for d in range(self.dart_count)]

    @cached_property
    def phi(self):
        return _frozen(self.next[self.twin])

    def faces(self):
        return _cycles(self.phi)

    def vertex_rotations(self):
        return _cycles(self.next)

    def is_connected(self):
        if self.dart_count == 0:
            return True
        return _kernels.reachable_darts(self.twin, self.next) == self.dart_count

    def euler_characteristic(self):
        return self.vertex_count - self.edge_count + self.face_count


def euler_characteristic(m):
    """``V - E + F`` of a map (or of a triangulation's map)."""
    if isinstance(m, Triangulation):
        m = m.map
    return m.euler_characteristic()


@dataclass(frozen=True, eq=False)
class Triangulation:
    """A validated triangulation of the sphere with ``n`` vertices."""

    map: RotationSystem
    n: int
    cls: TriangulationClass = TriangulationClass.SIMPLE

    @property
    def twin(self):
        return self.map.twin

    @property
    def next(self):
        return self.map.next

    @property
    def origin(self):
        return self.map.origin

    @property
    def edge_count(self):
        return self.map.edge_count

    @property
    def face_count(self):
        return self.map.face_count

    @cached_property
    def edge_darts(self):
        """One representative dart per edge; edge ``k`` is ``edge_darts[k]``."""
        d = np.arange(self.map.dart_count)
        return _frozen(d[d < self.twin])

    @cached_property
    def adjacency(self):
        """CSR ``(indptr, indices)`` neighbour lists, repeated for multi-edges."""
        indptr, indices = _kernels.adjacency(self.twin, self.origin, self.n)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        return indptr, indices

    def degrees(self):
        return np.bincount(self.origin, minlength=self.n)

    def destination(self, d):
        return int(self.origin[self.twin[d]])

    def edges(self):
        """``(u, v)`` endpoint pairs, one per edge."""
        e = self.edge_darts
        return list(zip(self.origin[e].tolist(), self.origin[self.twin[e]].tolist()))

    def mirror(self):
        """The same triangulation with its orientation reversed."""
        inv = np.empty_like(self.next)
        inv[self.next] = np.arange(len(inv))
        return build_from_rotation(
            (self.twin, inv, self.origin), cls=self.cls)

    def canonical_code(self, reflection=False):
        return canonical_code(self, reflection=reflection)

    def __repr__(self):
        return (f"Triangulation(n={self.n}, E={self.edge_count}, "
                f"F={self.face_count}, cls={self.cls.value})")


def _dart_arrays(table):
    if isinstance(table, RotationSystem):
        return table.twin, table.next, table.origin
    if (isinstance(table, tuple) and len(table) == 3
            and all(x is None or isinstance(x, np.ndarray) for x in table)):
        return table
    rows = sorted((tuple(int(x) for x in r) for r in table), key=lambda r: r[0])
    ids = [r[0] for r in rows]
    if ids != list(range(len(rows))):
        raise MalformedPermutation("dart ids must be exactly 0..m-1")
    arr = np.array(rows, dtype=np.int64).reshape(-1, 4)
    return arr[:, 1], arr[:, 2], arr[:, 3]


def build_from_rotation(table, cls=TriangulationClass.SIMPLE):
    """Validate a dart table and return a :class:`Triangulation`.

    ``table`` is an iterable of ``(id, twin, next, origin)`` rows (or
    :class:`Dart` tuples), a :class:`RotationSystem`, or a
    ``(twin, next, origin)`` triple of arrays.

    Raises ``MalformedPermutation``, ``Disconnected``, ``NotTriangular``,
    ``NotSphere`` or ``NotSimple``, checked in that order.
    """
    cls = TriangulationClass.parse(cls)
    twin, nxt, origin = _dart_arrays(table)
    rs = RotationSystem.from_arrays(twin, nxt, origin)
    if rs.dart_count == 0:
        raise NotTriangular("empty map has no triangular faces")
    if not rs.is_connected():
        raise Disconnected("dart graph is not connected")
    for face in rs.faces():
        if len(face) != 3:
            raise NotTriangular(f"face {face} has degree {len(face)}")
    chi = rs.euler_characteristic()
    if chi != 2:
        raise NotSphere(f"Euler characteristic is {chi}, not 2")
    if cls is TriangulationClass.SIMPLE:
        seen = set()
        for d in range(rs.dart_count):
            u, v = int(rs.origin[d]), int(rs.origin[rs.twin[d]])
            if u == v:
                raise NotSimple(f"dart {d} is a loop at vertex {u}")
            if (u, v) in seen:
                raise NotSimple(f"multiple edges between {u} and {v}")
            seen.add((u, v))
    return Triangulation(map=rs, n=rs.vertex_count, cls=cls)


def from_faces(faces: Iterable[Sequence[int]], cls=TriangulationClass.SIMPLE):
    """Build a triangulation from consistently oriented vertex triples.

    Each triple ``(a, b, c)`` is a face traversed ``a -> b -> c``; every
    directed edge must occur exactly once.  Only meaningful for maps without
    multiple edges, since darts are identified by their endpoints.
    """
    faces = [tuple(int(v) for v in f) for f in faces]
    dart_of = {}
    for f in faces:
        for i in range(len(f)):
            key = (f[i], f[(i + 1) % len(f)])
            if key in dart_of:
                raise MalformedPermutation(f"directed edge {key} appears twice")
            dart_of[key] = len(dart_of)
    m = len(dart_of)
    twin = np.empty(m, dtype=np.int64)
    nxt = np.empty(m, dtype=np.int64)
    origin = np.empty(m, dtype=np.int64)
    phi = {}
    for f in faces:
        k = len(f)
        for i in range(k):
            phi[(f[i], f[(i + 1) % k])] = (f[(i + 1) % k], f[(i + 2) % k])
    for (u, v), d in dart_of.items():
        if (v, u) not in dart_of:
            raise MalformedPermutation(f"edge {u}-{v} has no twin")
        twin[d] = dart_of[(v, u)]
        origin[d] = u
        # next(d) = phi(twin(d))
        nxt[d] = dart_of[phi[(v, u)]]
    return build_from_rotation((twin, nxt, origin), cls=cls)


def tetrahedron():
    return from_faces([(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)])


def octahedron():
    """Apexes 0 and 5, equator 1-2-3-4."""
    return bipyramid(6)


def bipyramid(n):
    """Double fan: apexes ``0`` and ``n-1`` over an equator ``1..n-2``.

    For ``n = 4`` the SIMPLE bipyramid does not exist (its equator would be a
    double edge), so the tetrahedron is returned instead.
    """
    if n == 4:
        return tetrahedron()
    if n < 5:
        raise ValueError(f"bipyramid needs n >= 4, got {n}")
    k = n - 2
    north, south = 0, n - 1
    faces = []
    for i in range(k):
        a, b = 1 + i, 1 + (i + 1) % k
        faces.append((north, a, b))
        faces.append((south, b, a))
    return from_faces(faces)


def double_triangle():
    """The GENERAL triangulation with 3 vertices: two triangles glued."""
    return from_faces([(0, 1, 2), (0, 2, 1)], cls=TriangulationClass.GENERAL)


def initial_triangulation(n, cls=TriangulationClass.SIMPLE):
    cls = TriangulationClass.parse(cls)
    if cls is TriangulationClass.GENERAL:
        if n == 3:
            return double_triangle()
        if n < 3:
            raise ValueError("a GENERAL triangulation needs n >= 3")
        t = bipyramid(n)
        return Triangulation(map=t.map, n=t.n, cls=cls)
    if n < 4:
        raise ValueError("a SIMPLE triangulation needs n >= 4")
    return bipyramid(n)


# ------------------------------------------------------------ canonical form

def _raw_code(twin, nxt):
    code, n_best = _kernels.canonical_code(
        np.ascontiguousarray(twin, dtype=np.int64),
        np.ascontiguousarray(nxt, dtype=np.int64))
    return code, n_best


def _encode(code):
    return np.asarray(code, dtype=">u4").tobytes()


def canonical_code(t: Triangulation, reflection=False) -> bytes:
    """Isomorphism-invariant byte string.

    The map is relabelled by breadth-first search from every root dart and
    the lexicographically smallest ``(twin, next)`` label sequence is kept.
    With ``reflection=True`` the mirror image is also tried, so chiral pairs
    collapse; this is a diagnostic and is not the equivalence used elsewhere.
    """
    code, _ = _raw_code(t.twin, t.next)
    out = _encode(code)
    if reflection:
        m = t.mirror()
        out = min(out, _encode(_raw_code(m.twin, m.next)[0]))
    return out


def automorphism_count(t: Triangulation) -> int:
    """Order of the orientation-preserving automorphism group."""
    return int(_raw_code(t.twin, t.next)[1])


def are_isomorphic(a: Triangulation, b: Triangulation, reflection=False) -> bool:
    if a.n != b.n or a.map.dart_count != b.map.dart_count:
        return False
    return canonical_code(a, reflection) == canonical_code(b, reflection)


def from_canonical_code(code: bytes, cls=TriangulationClass.SIMPLE) -> Triangulation:
    arr = np.frombuffer(code, dtype=">u4").astype(np.int64)
    return build_from_rotation((arr[0::2], arr[1::2], None), cls=cls)
