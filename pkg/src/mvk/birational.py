"""Free abelian groups on birational and stable birational types.

A :class:`Label` names a (stable) birational type.  What is known about labels,
such as "these two are isomorphic", "this one is not stably rational" or "these
two are stably distinct", lives in a :class:`LabelStore`.  Since the groups are
free, deciding whether a class *can* equal a target given only partial knowledge
is a finite search over ways of identifying the unknown labels; see
:func:`can_equal`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import AmbiguousComponents, LabelConflict, NotHomogeneous, SearchBudget
from .ring import GradedClass

__all__ = [
    "Label",
    "point",
    "rational",
    "irrational",
    "unknown",
    "product",
    "LabelStore",
    "BirClass",
    "SBClass",
    "MergeSearch",
    "bir_of",
    "sb_of",
    "can_equal",
]

POINT = "POINT"
RATIONAL = "RATIONAL"
KNOWN_IRRATIONAL = "KNOWN_IRRATIONAL"
UNKNOWN = "UNKNOWN"
PRODUCT = "PRODUCT"

_ATOMIC = (KNOWN_IRRATIONAL, UNKNOWN)


@dataclass(frozen=True)
class Label:
    """A birational type.

    ``PRODUCT`` labels carry a sorted tuple of atomic ``bases`` and a projective
    ``power``; use :func:`product` rather than building them by hand so that
    rational factors get absorbed.
    """

    kind: str
    name: str = ""
    dim: int = 0
    bases: tuple = ()
    power: int = 0

    @property
    def is_rational(self) -> bool:
        return self.kind in (POINT, RATIONAL)

    @property
    def atomic_bases(self) -> tuple:
        if self.kind in _ATOMIC:
            return (self,)
        return self.bases

    @property
    def sort_key(self):
        # rational types first by dimension, then the rest from large to small
        return (0 if self.is_rational else 1, self.dim if self.is_rational else -self.dim,
                self.render())

    def render(self) -> str:
        if self.kind == POINT:
            return "pt"
        if self.kind == RATIONAL:
            return f"P^{self.dim}"
        if self.kind in _ATOMIC:
            return self.name
        parts = [b.render() for b in self.bases]
        if self.power:
            parts.append(f"P^{self.power}")
        return "×".join(parts)

    def __str__(self):
        return self.render()

    def to_json(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim}
        if self.kind in _ATOMIC:
            out["name"] = self.name
        elif self.kind == PRODUCT:
            out["bases"] = [b.to_json() for b in self.bases]
            out["power"] = self.power
        return out


def point() -> Label:
    return Label(POINT)


def rational(m: int) -> Label:
    if m < 0:
        raise ValueError("negative dimension")
    return Label(RATIONAL, dim=m) if m else point()


def irrational(name: str, dim: int) -> Label:
    return Label(KNOWN_IRRATIONAL, name, dim)


def unknown(name: str, dim: int) -> Label:
    return Label(UNKNOWN, name, dim)


def product(factors, power: int = 0) -> Label:
    """Birational type of ``factor_1 x ... x P^power``, normalized."""
    if isinstance(factors, Label):
        factors = (factors,)
    bases = []
    for f in factors:
        if f.is_rational:
            power += f.dim
        elif f.kind == PRODUCT:
            bases.extend(f.bases)
            power += f.power
        else:
            bases.append(f)
    if power < 0:
        raise ValueError("negative projective power")
    if not bases:
        return rational(power)
    if len(bases) == 1 and power == 0:
        return bases[0]
    bases = tuple(sorted(bases, key=lambda b: b.sort_key))
    return Label(PRODUCT, dim=sum(b.dim for b in bases) + power,
                 bases=bases, power=power)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def classes(self):
        out: dict = {}
        for x in list(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return out


class LabelStore:
    """Side knowledge about labels.

    Equivalences between labels of equal dimension are read as birational
    equivalences (and hence stable ones); across dimensions they only identify
    stable types.  Distinctions are stable: the two labels are not stably
    birational.
    """

    def __init__(self, labels: Iterable[Label] = (), equivalences=(), distinctions=(),
                 not_stably_rational=(), stably_rational=()):
        self.labels: dict[str, Label] = {}
        self._equivalences: list[tuple[Label, Label]] = []
        self._distinctions: list[tuple[Label, Label]] = []
        self._nsr: set[Label] = set()
        self._sr: set[Label] = set()
        self._cache = None
        for lab in labels:
            self.add(lab)
        for a, b in equivalences:
            self.declare_equivalent(a, b)
        for a, b in distinctions:
            self.declare_distinct(a, b)
        for a in not_stably_rational:
            self.declare_not_stably_rational(a)
        for a in stably_rational:
            self.declare_stably_rational(a)

    # building
    def add(self, label: Label) -> Label:
        if label.kind in _ATOMIC:
            old = self.labels.get(label.name)
            if old is not None and old != label:
                raise LabelConflict(f"label name {label.name!r} used with two meanings")
            self.labels[label.name] = label
            if label.kind == KNOWN_IRRATIONAL:
                self._nsr.add(label)
        self._cache = None
        return label

    def _resolve(self, x) -> Label:
        if isinstance(x, Label):
            if x.kind in _ATOMIC:
                self.add(x)
            return x
        try:
            return self.labels[x]
        except KeyError:
            raise LabelConflict(f"unknown label {x!r}") from None

    def declare_equivalent(self, a, b):
        self._equivalences.append((self._resolve(a), self._resolve(b)))
        self._cache = None

    def declare_distinct(self, a, b):
        self._distinctions.append((self._resolve(a), self._resolve(b)))
        self._cache = None

    def declare_not_stably_rational(self, a):
        self._nsr.add(self._resolve(a))
        self._cache = None

    def declare_stably_rational(self, a):
        self._sr.add(self._resolve(a))
        self._cache = None

    def copy(self) -> "LabelStore":
        other = LabelStore()
        other.labels = dict(self.labels)
        other._equivalences = list(self._equivalences)
        other._distinctions = list(self._distinctions)
        other._nsr = set(self._nsr)
        other._sr = set(self._sr)
        return other

    def merged(self, other: "LabelStore") -> "LabelStore":
        """Union of the knowledge in two stores."""
        out = self.copy()
        for lab in other.labels.values():
            out.add(lab)
        out._equivalences += other._equivalences
        out._distinctions += other._distinctions
        out._nsr |= other._nsr
        out._sr |= other._sr
        return out

    # closure
    def _closure(self):
        if self._cache is not None:
            return self._cache
        stable, bir = _UnionFind(), _UnionFind()
        for lab in self.labels.values():
            stable.find(lab)
            bir.find(lab)
        for a, b in self._equivalences:
            stable.union(a, b)
            if a.dim == b.dim:
                bir.union(a, b)

        def canon(uf):
            rep = {}
            for members in uf.classes().values():
                rational_members = [m for m in members if m.is_rational]
                if rational_members:
                    r = min(rational_members, key=lambda m: m.sort_key)
                else:
                    r = min(members, key=lambda m: m.sort_key)
                for m in members:
                    rep[m] = r
            return rep

        stable_rep, bir_rep = canon(stable), canon(bir)
        sr_roots = {stable_rep.get(x, x) for x in self._sr}
        sr_roots |= {r for r in stable_rep.values() if r.is_rational}
        nsr_roots = {stable_rep.get(x, x) for x in self._nsr}
        distinct = set()
        for a, b in self._distinctions:
            ra, rb = stable_rep.get(a, a), stable_rep.get(b, b)
            distinct.add((ra, rb))
            distinct.add((rb, ra))
        self._cache = (stable_rep, bir_rep, sr_roots, nsr_roots, distinct)
        return self._cache

    def conflicts(self) -> list[str]:
        stable_rep, _, sr_roots, nsr_roots, distinct = self._closure()
        problems = []
        for r in sorted(sr_roots & nsr_roots, key=lambda x: x.sort_key):
            problems.append(f"{r.render()} is declared both stably rational and not")
        for ra, rb in sorted(distinct, key=lambda p: (p[0].sort_key, p[1].sort_key)):
            if ra == rb:
                problems.append(f"{ra.render()} is declared distinct from an equivalent label")
                break
        return problems

    def check(self) -> "LabelStore":
        problems = self.conflicts()
        if problems:
            raise LabelConflict("; ".join(problems), problems)
        return self

    # queries
    def stable_image(self, label: Label) -> Label:
        """Stable birational type of ``label``: projective factors dropped and
        stably rational factors collapsed to the point."""
        stable_rep, _, sr_roots, _, _ = self._closure()
        bases = []
        for b in label.atomic_bases:
            r = stable_rep.get(b, b)
            if r in sr_roots or r.is_rational:
                continue
            bases.append(r)
        return product(bases, 0)

    def bir_image(self, label: Label) -> Label:
        """Birational type of ``label`` after applying declared equivalences."""
        _, bir_rep, _, _, _ = self._closure()
        if label.is_rational:
            return label
        return product([bir_rep.get(b, b) for b in label.atomic_bases],
                       label.power if label.kind == PRODUCT else 0)

    def known_stably_rational(self, label: Label) -> bool:
        return self.stable_image(label).kind == POINT

    def known_not_stably_rational(self, label: Label) -> bool:
        _, _, _, nsr_roots, _ = self._closure()
        s = self.stable_image(label)
        return s.kind == KNOWN_IRRATIONAL or (s.kind in _ATOMIC and s in nsr_roots)

    def known_distinct(self, a: Label, b: Label) -> bool:
        _, _, _, _, distinct = self._closure()
        sa, sb = self.stable_image(a), self.stable_image(b)
        if (sa.kind == POINT and self.known_not_stably_rational(b)) or \
                (sb.kind == POINT and self.known_not_stably_rational(a)):
            return True
        return (sa, sb) in distinct

    def to_json(self) -> dict:
        return {
            "labels": [self.labels[k].to_json() for k in sorted(self.labels)],
            "equivalences": sorted([a.render(), b.render()] for a, b in self._equivalences),
            "distinctions": sorted([a.render(), b.render()] for a, b in self._distinctions),
            "not_stably_rational": sorted(x.render() for x in self._nsr),
            "stably_rational": sorted(x.render() for x in self._sr),
        }


class _LabelCombination:
    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        acc: dict[Label, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for lab, c in items:
            if c:
                acc[lab] = acc.get(lab, 0) + c
        self._terms = {k: v for k, v in acc.items() if v}

    @property
    def terms(self) -> dict[Label, int]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda lc: lc[0].sort_key)

    def coefficient(self, label: Label) -> int:
        return self._terms.get(label, 0)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self._terms.items())))

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __add__(self, other):
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) + v
        return type(self)(acc)

    def __neg__(self):
        return type(self)({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int):
        return type(self)({k: n * v for k, v in self._terms.items()})

    def map(self, f):
        acc: dict[Label, int] = {}
        for k, v in self._terms.items():
            fk = f(k)
            acc[fk] = acc.get(fk, 0) + v
        return type(self)(acc)

    def render(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for i, (lab, c) in enumerate(self.items()):
            body = ("" if abs(c) == 1 else str(abs(c))) + "{" + lab.render() + "}"
            if i == 0:
                out.append(body if c > 0 else "−" + body)
            else:
                out.append((" + " if c > 0 else " − ") + body)
        return "".join(out)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"{type(self).__name__}({self.render()!r})"


class BirClass(_LabelCombination):
    """Element of the dimension-graded free group on birational types."""

    def __mul__(self, other):
        if isinstance(other, int):
            return other * self
        acc: dict[Label, int] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                k = product((a, b))
                acc[k] = acc.get(k, 0) + ca * cb
        return BirClass(acc)

    def to_json(self):
        return [{"label": lab.render(), "dim": lab.dim, "coeff": c} for lab, c in self.items()]


class SBClass(_LabelCombination):
    """Element of the free group on stable birational types."""

    def to_json(self):
        return [{"label": lab.render(), "coeff": c} for lab, c in self.items()]


def bir_of(x: GradedClass, d: int, atom_labels: Mapping[str, Label] | None = None) -> BirClass:
    """Image of a class homogeneous of grade ``d`` under reduction modulo ``t``.

    Each atom maps to ``atom_labels[name]`` (default: an unknown type named after
    the atom), and ``L^m`` contributes a factor ``P^m``.
    """
    atom_labels = atom_labels or {}
    g = x.grade()
    if g is not None and g != d:
        raise NotHomogeneous(f"class lives in grade {g}, not {d}")
    for a in x.atoms():
        if not getattr(a, "geom_irreducible", True):
            raise AmbiguousComponents(f"atom {a.name} is not geometrically irreducible")
    acc: dict[Label, int] = {}
    for m, c in x.terms.items():
        if m.tau:
            continue
        factors = [atom_labels.get(a.name) or unknown(a.name, a.dim) for a in m.atoms]
        for a, lab in zip(m.atoms, factors):
            if lab.dim != a.dim:
                raise LabelConflict(f"label {lab.render()} has dimension {lab.dim}, "
                                    f"atom {a.name} has {a.dim}")
        lab = product(factors, m.lef)
        acc[lab] = acc.get(lab, 0) + c
    return BirClass(acc)


def sb_of(b: BirClass, store: LabelStore | None = None) -> SBClass:
    store = store or LabelStore()
    return SBClass(b.map(store.stable_image).terms)


@dataclass(frozen=True)
class MergeSearch:
    """Outcome of :func:`can_equal`.  ``witness`` lists the non-trivial merge
    blocks; an empty tuple means no identification was needed."""

    possible: bool
    witness: tuple | None = None
    labels_considered: int = 0

    def __bool__(self):
        return self.possible

    @property
    def needs_merges(self) -> bool:
        return bool(self.witness)

    def witness_json(self):
        if self.witness is None:
            return None
        return [[lab.render() for lab in block] for block in self.witness]


def _collapse(x, store: LabelStore, graded: bool):
    if graded:
        return BirClass(x.map(store.bir_image).terms)
    return SBClass(x.map(store.stable_image).terms)


def can_equal(target, x, store: LabelStore | None = None, budget: int = 12,
              graded: bool | None = None) -> MergeSearch:
    """Can ``x`` equal ``target`` once some labels turn out to coincide?

    Searches set partitions of the labels whose coefficient differs between the
    two sides.  A block of a partition identifies its labels; it is admissible
    when no member is known to be stably distinct from another (which includes
    a not stably rational label meeting a stably rational one) and, for graded
    classes, all members share a dimension.  The answer is yes iff some
    admissible partition makes every block's coefficient difference vanish.
    """
    store = store or LabelStore()
    if graded is None:
        graded = isinstance(x, BirClass)
    tx, tt = _collapse(x, store, graded), _collapse(target, store, graded)
    diff = (tx - tt).terms
    items = sorted(diff, key=lambda lab: lab.sort_key)
    if not items:
        return MergeSearch(True, (), 0)
    if len(items) > budget:
        raise SearchBudget(f"{len(items)} labels exceed the merge-search budget {budget}")
    if sum(diff.values()) != 0:
        return MergeSearch(False, None, len(items))

    n = len(items)
    compatible = [[True] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = items[i], items[j]
            ok = not store.known_distinct(a, b)
            if graded and a.dim != b.dim:
                ok = False
            if a.is_rational and b.is_rational:
                ok = False  # distinct rational labels are distinct types
            compatible[i][j] = compatible[j][i] = ok
    values = [diff[lab] for lab in items]
    blocks: list[list[int]] = []
    sums: list[int] = []

    def search(i: int) -> bool:
        open_blocks = sum(1 for s in sums if s)
        if open_blocks > n - i:
            return False
        if i == n:
            return True
        for k, block in enumerate(blocks):
            if all(compatible[i][j] for j in block):
                block.append(i)
                sums[k] += values[i]
                if search(i + 1):
                    return True
                block.pop()
                sums[k] -= values[i]
        blocks.append([i])
        sums.append(values[i])
        if search(i + 1):
            return True
        blocks.pop()
        sums.pop()
        return False

    if not search(0):
        return MergeSearch(False, None, n)
    witness = tuple(tuple(items[j] for j in block) for block in blocks if len(block) > 1)
    return MergeSearch(True, witness, n)
