"""Strictly convex rational polyhedral cones and their face lattices.

Faces are found by brute force over candidate supporting hyperplanes: every
facet normal is orthogonal to ``dim - 1`` independent rays, so it is enough to
try each such subset, keep the normals that are non-negative on all rays, and
close the resulting facets under intersection.  All arithmetic is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce as _fold
from itertools import combinations
from math import comb, gcd

from .errors import GradeBelowDimension, InvalidRay, NoStratumCone, NotSharp, SizeBudget
from .ring import ClassicalClass, GradedClass, torus_class

__all__ = [
    "Cone",
    "Face",
    "FaceLattice",
    "cone_from_rays",
    "face_lattice",
    "euler_number",
    "p_class_from_cone",
    "lef_minus_one_coefficients",
    "rank",
]

MAX_RANK = 8
MAX_RAYS = 16


def _pivots(rows):
    """Pivot columns of the row echelon form of an integer matrix."""
    m = [list(row) for row in rows]
    pivots = []
    ncols = len(m[0]) if m else 0
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        for i in range(r + 1, len(m)):
            f = m[i][col]
            if f:
                m[i] = [a * p - f * b for a, b in zip(m[i], m[r])]
                g = _fold(gcd, m[i], 0)
                if g > 1:
                    m[i] = [a // g for a in m[i]]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return pivots


def rank(vectors) -> int:
    vectors = [tuple(int(x) for x in v) for v in vectors]
    return len(_pivots(vectors)) if vectors else 0


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _primitive(v):
    g = _fold(gcd, (abs(x) for x in v), 0)
    return tuple(x // g for x in v)


@dataclass(frozen=True)
class Face:
    rays: tuple  # indices into Cone.rays
    dim: int

    def to_json(self):
        return {"rays": list(self.rays), "dim": self.dim}


@dataclass(frozen=True)
class FaceLattice:
    cone: "Cone"
    faces: tuple

    def counts_by_dim(self) -> list[int]:
        top = max(f.dim for f in self.faces)
        counts = [0] * (top + 1)
        for f in self.faces:
            counts[f.dim] += 1
        return counts

    def contains(self, small: Face, big: Face) -> bool:
        return set(small.rays) <= set(big.rays)

    def facets(self) -> list[Face]:
        top = self.cone.dim
        return [f for f in self.faces if f.dim == top - 1] if top else []

    def covers(self) -> list[tuple[Face, Face]]:
        out = []
        for a in self.faces:
            for b in self.faces:
                if a is not b and self.contains(a, b) and not any(
                        c is not a and c is not b and self.contains(a, c) and self.contains(c, b)
                        for c in self.faces):
                    out.append((a, b))
        return out

    def to_json(self):
        return {
            "cone": self.cone.to_json(),
            "faces": [f.to_json() for f in self.faces],
            "counts_by_dim": self.counts_by_dim(),
        }


@dataclass(frozen=True)
class Cone:
    ambient_rank: int
    rays: tuple
    dim: int
    _facets: tuple = ()

    def to_json(self):
        return {"rank": self.ambient_rank, "rays": [list(r) for r in self.rays]}


def _det(m):
    """Integer determinant by fraction-free elimination."""
    m = [list(row) for row in m]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1] if n else 1


@lru_cache(maxsize=1 << 16)
def _normal(rows):
    """Integer vector orthogonal to ``len(rows) = r - 1`` vectors in Z^r (zero if dependent)."""
    r = len(rows) + 1
    return tuple((-1) ** i * _det([row[:i] + row[i + 1:] for row in rows]) for i in range(r))


def _facets(rays):
    """Ray-index sets of the facets of cone(rays) and the dimension of its span.

    Returns ``None`` for the facet list when the cone contains a line.
    """
    r = rank(rays)
    if r == 0:
        return r, ()
    # coordinates at the pivot columns identify the span with Z^r
    pivots = _pivots(rays)
    proj = [tuple(v[p] for p in pivots) for v in rays]
    facets = set()
    for subset in combinations(range(len(rays)), r - 1):
        u = _normal(tuple(proj[i] for i in subset))
        if not any(u):
            continue
        w = [_dot(u, v) for v in proj]
        if all(x >= 0 for x in w) or all(x <= 0 for x in w):
            facets.add(frozenset(j for j, x in enumerate(w) if x == 0))
    if not facets:
        return r, None
    if _fold(frozenset.intersection, facets):
        return r, None
    return r, tuple(sorted(facets, key=lambda s: sorted(s)))


def _close(n_rays, facets):
    full = frozenset(range(n_rays))
    faces = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for g in frontier:
            for f in facets:
                h = g & f
                if h not in faces:
                    faces.add(h)
                    nxt.append(h)
        frontier = nxt
    return faces


def cone_from_rays(ambient_rank: int, rays) -> Cone:
    """Validated cone generated by ``rays``.

    Rays are made primitive and deduplicated; generators that are not extremal
    are dropped, so every stored ray spans a one-dimensional face.
    """
    if ambient_rank < 1:
        raise InvalidRay("ambient rank must be positive")
    clean = []
    for v in rays:
        v = tuple(int(x) for x in v)
        if len(v) != ambient_rank:
            raise InvalidRay(f"ray {v} has length {len(v)}, expected {ambient_rank}")
        if not any(v):
            raise InvalidRay("zero ray")
        p = _primitive(v)
        if p not in clean:
            clean.append(p)
    if ambient_rank > MAX_RANK or len(clean) > MAX_RAYS:
        raise SizeBudget(f"cone of rank {ambient_rank} with {len(clean)} rays exceeds "
                         f"{MAX_RANK}/{MAX_RAYS}")
    clean.sort()
    r, facets = _facets(clean)
    if facets is None:
        raise NotSharp(f"cone over {clean} contains a line")
    if r >= 2:
        extremal = sorted(
            next(iter(f)) for f in _close(len(clean), facets)
            if len(f) >= 1 and rank([clean[i] for i in f]) == 1)
        if len(extremal) < len(clean):
            clean = [clean[i] for i in extremal]
            r, facets = _facets(clean)
    return Cone(ambient_rank, tuple(clean), r, facets)


def face_lattice(c: Cone) -> FaceLattice:
    if c.ambient_rank > MAX_RANK or len(c.rays) > MAX_RAYS:
        raise SizeBudget("cone exceeds the face enumeration budget")
    if not c.rays:
        return FaceLattice(c, (Face((), 0),))
    faces = []
    for s in _close(len(c.rays), c._facets):
        idx = tuple(sorted(s))
        faces.append(Face(idx, rank([c.rays[i] for i in idx])))
    faces.sort(key=lambda f: (f.dim, f.rays))
    return FaceLattice(c, tuple(faces))


def euler_number(fl: FaceLattice) -> int:
    """Alternating face count; the compactly supported Euler characteristic."""
    return sum((-1) ** f.dim for f in fl.faces)


def p_class_from_cone(c: Cone, grade: int) -> GradedClass:
    """Class of the proper toric variety with torus orbits indexed by the
    positive-dimensional faces of ``c``, placed in ``grade``."""
    if c.dim == 0:
        raise NoStratumCone("the zero cone has no positive-dimensional faces")
    if grade < c.dim - 1:
        raise GradeBelowDimension(f"grade {grade} below {c.dim - 1}")
    total = GradedClass()
    for f in face_lattice(c).faces:
        if f.dim >= 1:
            total = total + torus_class(f.dim - 1, c.dim - 1)
    return total.shift(grade - (c.dim - 1))


def lef_minus_one_coefficients(x: ClassicalClass) -> list[int]:
    """Coefficients of a polynomial in ``L`` rewritten in the basis ``(L - 1)^j``."""
    poly = x.lef_polynomial()
    if not poly:
        return []
    top = max(poly)
    return [sum(a * comb(i, j) for i, a in poly.items() if i >= j) for j in range(top + 1)]
