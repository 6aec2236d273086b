"""Combinatorial model of the special fiber of a strictly toroidal model.

A :class:`StrataComplex` is a finite poset of strata ordered by inclusion.  The
primitive data are the *open* strata, one atom each; closed classes are sums of
open ones.  Validation enforces the two Euler-type identities that toroidal
geometry imposes on the poset:

* interval condition: for ``E' <= E''`` the alternating count of strata between
  them is ``(-1)^codim(E')`` if they coincide and zero otherwise;
* star condition: for every ``E`` the alternating count of strata containing it
  is one (the faces of the local cone of dimension ``codim(E) + 1``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from . import errors
from .birational import Label, LabelStore, irrational, rational, unknown
from .errors import (
    GradeBelowDimension,
    NerveInconsistent,
    NoComponents,
    UnknownStratum,
    ValidationError,
)
from .ring import Atom, GradedClass, torus_class

__all__ = [
    "TAGS",
    "Stratum",
    "StrataComplex",
    "make_stratum",
    "validate",
    "build_complex",
    "from_snc_nerve",
    "closed_class",
    "p_class",
    "open_sum",
    "closed_sum",
]

TAGS = ("RATIONAL", "STABLY_RATIONAL", "IRRATIONAL", "UNKNOWN")


@dataclass(frozen=True)
class Stratum:
    id: str
    name: str
    codim: int
    open_atom: Atom
    label: Label | None = None
    tag: str = "UNKNOWN"

    @property
    def dim(self) -> int:
        return self.open_atom.dim

    @property
    def open_class(self) -> GradedClass:
        """Class of the interior in its own grade; a connected stratum of
        dimension zero is a point, i.e. the unit."""
        if self.dim == 0:
            return GradedClass.one()
        return GradedClass.atom(self.open_atom)

    def to_json(self) -> dict:
        out = {"id": self.id, "name": self.name, "codim": self.codim, "tag": self.tag,
               "open_atom": self.open_atom.name}
        if self.label is not None:
            out["label"] = self.label.render()
        return out


def make_stratum(id: str, codim: int, fiber_dim: int, *, name: str | None = None,
                 tag: str = "UNKNOWN", label=None, open_atom: str | None = None) -> Stratum:
    """Stratum with defaults filled in.

    ``label`` may be a :class:`Label`, a label name, or ``None``; names and
    ``None`` are turned into a label of the kind the tag implies.
    """
    name = name or id
    if tag not in TAGS:
        raise ValidationError(f"unknown tag {tag!r} on stratum {id}")
    dim = fiber_dim - codim
    if dim < 0:
        raise errors.CodimNotMonotone(f"stratum {id} has codimension {codim} > {fiber_dim}")
    if dim == 0 and tag in ("IRRATIONAL",):
        raise ValidationError(f"stratum {id} is a point and cannot be irrational")
    if dim == 0:
        tag = "RATIONAL" if tag == "UNKNOWN" else tag
    if not isinstance(label, Label):
        label_name = label or name
        if tag == "RATIONAL":
            label = rational(dim)
        elif tag == "IRRATIONAL":
            label = irrational(label_name, dim)
        else:
            label = unknown(label_name, dim)
    atom = Atom(open_atom or f"{name}°", dim)
    return Stratum(id, name, codim, atom, label, tag)


class StrataComplex:
    """Validated stratum poset; build with :func:`build_complex`."""

    def __init__(self, fiber_dim: int, strata: tuple, below: dict, store: LabelStore):
        self.fiber_dim = fiber_dim
        self.strata = strata
        self._by_id = {s.id: s for s in strata}
        self._below = below  # id -> frozenset of ids of strata contained in it (inclusive)
        self._above = {s.id: frozenset(t.id for t in strata if s.id in below[t.id])
                       for s in strata}
        self.store = store

    def __getitem__(self, id) -> Stratum:
        try:
            return self._by_id[id.id if isinstance(id, Stratum) else id]
        except KeyError:
            raise UnknownStratum(f"no stratum {id!r}") from None

    def __iter__(self):
        return iter(self.strata)

    def __len__(self):
        return len(self.strata)

    def leq(self, a, b) -> bool:
        return self[a].id in self._below[self[b].id]

    def below(self, e) -> list[Stratum]:
        ids = self._below[self[e].id]
        return [s for s in self.strata if s.id in ids]

    def above(self, e) -> list[Stratum]:
        ids = self._above[self[e].id]
        return [s for s in self.strata if s.id in ids]

    def components(self) -> list[Stratum]:
        return [s for s in self.strata if s.codim == 0]

    def containment(self) -> list[tuple[str, str]]:
        """Cover relations ``(sub, super)``."""
        out = []
        for t in self.strata:
            inside = self._below[t.id] - {t.id}
            for sub in inside:
                if not any(sub in self._below[u] for u in inside if u != sub):
                    out.append((sub, t.id))
        return sorted(out)

    def atom_labels(self) -> dict[str, Label]:
        """Birational label of each open atom (that of its closure)."""
        return {s.open_atom.name: s.label for s in self.strata if s.label is not None}

    def to_json(self) -> dict:
        return {
            "fiber_dim": self.fiber_dim,
            "strata": [s.to_json() for s in self.strata],
            "contains": [list(p) for p in self.containment()],
        }


def _diag(code, message, **extra):
    return {"code": code, "message": message, **extra}


def _closure(ids, pairs):
    """Reflexive-transitive closure: id -> set of ids below it."""
    direct = {i: set() for i in ids}
    for sub, sup in pairs:
        direct[sup].add(sub)
    below = {}
    for i in ids:
        seen = {i}
        stack = [i]
        while stack:
            x = stack.pop()
            for y in direct[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        below[i] = seen
    return below


def validate(fiber_dim: int, strata: Iterable[Stratum],
             containment: Iterable[tuple[str, str]]) -> list[dict]:
    """Every violated invariant of a candidate complex, as diagnostics."""
    strata = list(strata)
    containment = [tuple(p) for p in containment]
    if not strata:
        return [_diag("NoComponents", "a special fiber needs at least one stratum")]
    diags = []
    ids = [s.id for s in strata]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        diags.append(_diag("DuplicateId", f"duplicate stratum ids {dup}", strata=dup))
        return diags
    atoms = [s.open_atom.name for s in strata]
    dup = sorted({a for a in atoms if atoms.count(a) > 1})
    if dup:
        diags.append(_diag("DuplicateAtom", f"open atoms shared between strata: {dup}"))
    idset = set(ids)
    for sub, sup in containment:
        for x in (sub, sup):
            if x not in idset:
                diags.append(_diag("UnknownStratum", f"containment mentions unknown stratum {x!r}",
                                   strata=[x]))
    if diags:
        return diags
    by_id = {s.id: s for s in strata}
    for s in strata:
        if s.open_atom.dim != fiber_dim - s.codim:
            diags.append(_diag("DimensionMismatch",
                               f"{s.id}: open atom has dim {s.open_atom.dim}, expected "
                               f"{fiber_dim - s.codim}", strata=[s.id]))
        if s.label is not None and s.label.dim != s.open_atom.dim:
            diags.append(_diag("DimensionMismatch",
                               f"{s.id}: label {s.label.render()} has dim {s.label.dim}",
                               strata=[s.id]))
        if s.codim < 0:
            diags.append(_diag("CodimNotMonotone", f"{s.id}: negative codimension",
                               strata=[s.id]))
    below = _closure(ids, containment)
    cyc = sorted({tuple(sorted((a, b))) for a in ids for b in below[a]
                  if a != b and a in below[b]})
    selfloops = sorted(a for a, b in containment if a == b)
    if cyc or selfloops:
        for a, b in cyc:
            diags.append(_diag("PosetCycle", f"{a} and {b} contain each other", strata=[a, b]))
        for a in selfloops:
            diags.append(_diag("PosetCycle", f"{a} declared inside itself", strata=[a]))
        return diags
    for sup in ids:
        for sub in sorted(below[sup]):
            if sub != sup and by_id[sub].codim <= by_id[sup].codim:
                diags.append(_diag("CodimNotMonotone",
                                   f"{sub} < {sup} but codim {by_id[sub].codim} <= "
                                   f"{by_id[sup].codim}", strata=[sub, sup]))
    has_above = {sub for sup in ids for sub in below[sup] if sub != sup}
    for s in strata:
        maximal = s.id not in has_above
        if maximal and s.codim != 0:
            diags.append(_diag("CodimNotMonotone",
                               f"{s.id} is maximal but has codim {s.codim}", strata=[s.id]))
    if not any(s.codim == 0 for s in strata):
        diags.append(_diag("NoComponents", "no stratum of codimension 0"))
    if diags:
        return diags
    above = {i: set() for i in ids}
    for hi in ids:
        for lo in below[hi]:
            above[lo].add(hi)
    sign = {i: (-1) ** by_id[i].codim for i in ids}
    for lo in ids:
        for hi in sorted(above[lo]):
            total = sum(sign[m] for m in above[lo] & below[hi])
            expected = sign[lo] if lo == hi else 0
            if total != expected:
                diags.append(_diag("IntervalConditionFailed",
                                   f"interval [{lo}, {hi}] has alternating count {total}, "
                                   f"expected {expected}", strata=[lo, hi]))
    for i in ids:
        total = sum(sign[t] for t in above[i])
        if total != 1:
            diags.append(_diag("StarConditionFailed",
                               f"strata containing {i} have alternating count {total}, "
                               f"expected 1", strata=[i]))
    return diags


_CODE_TO_ERROR = {
    "NoComponents": errors.NoComponents,
    "UnknownStratum": errors.UnknownStratum,
    "PosetCycle": errors.PosetCycle,
    "CodimNotMonotone": errors.CodimNotMonotone,
    "IntervalConditionFailed": errors.IntervalConditionFailed,
    "StarConditionFailed": errors.StarConditionFailed,
}


def _default_store(strata, store: LabelStore | None) -> LabelStore:
    store = store.copy() if store is not None else LabelStore()
    for s in strata:
        if s.label is None:
            continue
        for b in s.label.atomic_bases:
            store.add(b)
        if s.tag == "STABLY_RATIONAL" and s.label.atomic_bases:
            for b in s.label.atomic_bases:
                store.declare_stably_rational(b)
        if s.tag == "IRRATIONAL" and not s.label.is_rational:
            store.declare_not_stably_rational(s.label.atomic_bases[0])
    return store.check()


def build_complex(fiber_dim: int, strata: Iterable[Stratum],
                  containment: Iterable[tuple[str, str]] = (),
                  store: LabelStore | None = None) -> StrataComplex:
    """Validate and freeze a complex.

    Raises the error class of the first violated invariant; the full report is
    attached as ``diagnostics``.
    """
    strata = tuple(strata)
    containment = [tuple(p) for p in containment]
    diags = validate(fiber_dim, strata, containment)
    if diags:
        cls = _CODE_TO_ERROR.get(diags[0]["code"], ValidationError)
        raise cls("; ".join(d["message"] for d in diags), diags)
    below = {k: frozenset(v) for k, v in _closure([s.id for s in strata], containment).items()}
    return StrataComplex(fiber_dim, strata, below, _default_store(strata, store))


def from_snc_nerve(fiber_dim: int, components, nerve=(), info: Mapping | None = None,
                   store: LabelStore | None = None) -> StrataComplex:
    """Complex of a strictly semi-stable fiber described by its nerve.

    ``components`` lists component names.  Each ``nerve`` entry is a mapping with
    ``subset`` (two or more component names), and either ``pieces`` (names of the
    connected components of that intersection) or ``count``; subsets not listed
    have empty intersection.  When an intersection one level up is disconnected,
    ``hints`` (piece name -> names of pieces containing it) says which piece
    contains it.  ``info`` maps piece names to ``{"tag": ..., "label": ...}``.
    A piece of ``E_J`` has codimension ``|J| - 1``.
    """
    info = info or {}
    components = list(components)
    if not components:
        raise NoComponents("no components")
    if len(set(components)) != len(components):
        raise NerveInconsistent("duplicate component names")
    order = {c: i for i, c in enumerate(components)}
    pieces: dict[frozenset, list[str]] = {frozenset([c]): [c] for c in components}
    hints: dict[str, set[str]] = {}
    for entry in nerve:
        subset = entry["subset"]
        for c in subset:
            if c not in order:
                raise NerveInconsistent(f"unknown component {c!r} in nerve")
        J = frozenset(subset)
        if len(J) != len(subset):
            raise NerveInconsistent(f"repeated component in {subset}")
        if len(J) < 2:
            raise NerveInconsistent("nerve entries need at least two components; "
                                    "components are irreducible")
        if J in pieces:
            raise NerveInconsistent(f"subset {sorted(subset)} listed twice")
        base = "∩".join(sorted(subset, key=order.get))
        if "pieces" in entry:
            names = list(entry["pieces"])
        else:
            count = entry.get("count", 1)
            names = [base] if count == 1 else [f"{base}#{i + 1}" for i in range(count)]
        if names:
            pieces[J] = names
        for p, sups in (entry.get("hints") or {}).items():
            if p not in names:
                raise NerveInconsistent(f"hint for unknown piece {p!r}")
            hints.setdefault(p, set()).update(sups)
    owner = {}
    for J, names in pieces.items():
        for p in names:
            if p in owner:
                raise NerveInconsistent(f"piece name {p!r} used twice")
            owner[p] = J
    for p, sups in hints.items():
        for q in sups:
            if q not in owner:
                raise NerveInconsistent(f"hint {p} -> {q}: unknown piece")

    def parent(p, K):
        if K not in pieces:
            raise NerveInconsistent(f"{p} lies in E_{sorted(K)}, which is empty "
                                    "(nerve not downward closed)")
        cands = pieces[K]
        if len(cands) == 1:
            return cands[0]
        chosen = [q for q in cands if q in hints.get(p, ())]
        if len(chosen) != 1:
            raise NerveInconsistent(f"{p}: need exactly one containing piece among {cands}")
        return chosen[0]

    memo = {}

    def containing(p, K):
        J = owner[p]
        if K == J:
            return p
        key = (p, K)
        if key not in memo:
            results = {containing(parent(p, J - {j}), K) for j in J - K}
            if len(results) != 1:
                raise NerveInconsistent(f"{p} would lie in several pieces of "
                                        f"E_{sorted(K)}: {sorted(results)}")
            memo[key] = results.pop()
        return memo[key]

    strata, contains = [], []
    for J in sorted(pieces, key=lambda J: (len(J), sorted(order[c] for c in J))):
        for p in pieces[J]:
            meta = info.get(p, {})
            strata.append(make_stratum(p, len(J) - 1, fiber_dim, tag=meta.get("tag", "UNKNOWN"),
                                       label=meta.get("label"), open_atom=meta.get("open_atom")))
            for r in range(1, len(J)):
                for K in combinations(sorted(J, key=order.get), r):
                    contains.append((p, containing(p, frozenset(K))))
    return build_complex(fiber_dim, strata, contains, store)


def closed_class(x: StrataComplex, e, grade: int) -> GradedClass:
    """``[E]_grade`` as the sum of the open strata it contains."""
    s = x[e]
    if grade < s.dim:
        raise GradeBelowDimension(f"{s.id} has dimension {s.dim} > grade {grade}")
    total = GradedClass()
    for t in x.below(s):
        total = total + t.open_class.shift(grade - t.dim)
    return total


def p_class(x: StrataComplex, e, grade: int | None = None) -> GradedClass:
    """Sum over strata ``E' >= E`` of ``[G_m^codim(E')]`` in grade ``codim(E)``,
    shifted to ``grade``."""
    s = x[e]
    grade = s.codim if grade is None else grade
    if grade < s.codim:
        raise GradeBelowDimension(f"grade {grade} below codim {s.codim}")
    total = GradedClass()
    for t in x.above(s):
        total = total + torus_class(t.codim, s.codim)
    return total.shift(grade - s.codim)


def _check_grade(x: StrataComplex, e: int):
    if e < x.fiber_dim:
        raise GradeBelowDimension(f"grade {e} below fiber dimension {x.fiber_dim}")


def open_sum(x: StrataComplex, e: int) -> GradedClass:
    _check_grade(x, e)
    total = GradedClass()
    for s in x.strata:
        term = s.open_class * torus_class(s.codim, s.codim)
        total = total + term * (-1) ** s.codim
    return total.shift(e - x.fiber_dim)


def closed_sum(x: StrataComplex, e: int) -> GradedClass:
    _check_grade(x, e)
    total = GradedClass()
    for s in x.strata:
        term = closed_class(x, s, e - s.codim) * p_class(x, s)
        total = total + term * (-1) ** s.codim
    return total
