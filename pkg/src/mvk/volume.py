"""Motivic volume of a toroidal model and the rationality obstructions built on it."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _pairs

from .birational import (
    BirClass,
    Label,
    LabelStore,
    SBClass,
    can_equal,
    point,
    product,
    rational,
)
from .errors import InvariantViolation, NotSmoothModel, UnlabeledStratum
from .ring import Atom, GradedClass
from .strata import StrataComplex, build_complex, closed_sum, make_stratum, open_sum

__all__ = [
    "OBSTRUCTED",
    "NOT_OBSTRUCTED",
    "INCONCLUSIVE",
    "Verdict",
    "vol",
    "vol_bir",
    "vol_sb",
    "obstruct_stable",
    "obstruct_rational",
    "parity_rule",
    "specialization_check",
    "product_complex",
]

OBSTRUCTED = "OBSTRUCTED"
NOT_OBSTRUCTED = "NOT_OBSTRUCTED"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Verdict:
    status: str
    evidence: object  # BirClass or SBClass
    rule: str
    witness: tuple | None = None
    reason: str | None = None

    def to_json(self) -> dict:
        out = {"status": self.status, "rule": self.rule,
               "class": self.evidence.render(), "terms": self.evidence.to_json()}
        if self.witness is not None:
            out["witness"] = [[lab.render() for lab in block] for block in self.witness]
        if self.reason:
            out["reason"] = self.reason
        return out

    def render(self) -> str:
        line = f"{self.status} [{self.rule}] {self.evidence.render()}"
        if self.witness:
            merges = "; ".join(" = ".join(lab.render() for lab in b) for b in self.witness)
            line += f" (needs: {merges})"
        if self.reason:
            line += f" ({self.reason})"
        return line


def vol(x: StrataComplex, e: int | None = None) -> GradedClass:
    """Volume of the generic fiber in grade ``e`` (default: the fiber dimension)."""
    e = x.fiber_dim if e is None else e
    value = open_sum(x, e)
    other = closed_sum(x, e)
    if value != other:
        raise InvariantViolation(f"open and closed sums differ: {value} vs {other}")
    return value


def _labels(x: StrataComplex):
    for s in x.strata:
        if s.label is None:
            raise UnlabeledStratum(f"stratum {s.id} has no label")
        yield s


def vol_bir(x: StrataComplex) -> BirClass:
    acc: dict[Label, int] = {}
    for s in _labels(x):
        lab = x.store.bir_image(product(s.label, s.codim))
        acc[lab] = acc.get(lab, 0) + (-1) ** s.codim
    return BirClass(acc)


def vol_sb(x: StrataComplex) -> SBClass:
    acc: dict[Label, int] = {}
    for s in _labels(x):
        lab = x.store.stable_image(s.label)
        acc[lab] = acc.get(lab, 0) + (-1) ** s.codim
    return SBClass(acc)


def _verdict(result, evidence, rule) -> Verdict:
    if not result.possible:
        return Verdict(OBSTRUCTED, evidence, rule)
    if result.needs_merges:
        return Verdict(INCONCLUSIVE, evidence, rule, result.witness, "UNRESOLVED_LABELS")
    return Verdict(NOT_OBSTRUCTED, evidence, rule, ())


def obstruct_stable(x: StrataComplex, budget: int = 12) -> Verdict:
    """Compare the stable birational volume with the class of a point."""
    cls = vol_sb(x)
    result = can_equal(SBClass({point(): 1}), cls, x.store, budget, graded=False)
    return _verdict(result, cls, "stable")


def obstruct_rational(x: StrataComplex, budget: int = 12, literal_point: bool = False) -> Verdict:
    """Compare the birational volume with that of a rational variety.

    The target is ``{P^n}`` in degree ``n = fiber_dim``, which is what a rational
    generic fiber produces.  ``literal_point`` compares with ``{pt}`` instead;
    since merges must respect dimension this obstructs every model with
    ``n > 0``, rational or not, and is kept only for comparison.
    """
    cls = vol_bir(x)
    target = point() if literal_point else rational(x.fiber_dim)
    result = can_equal(BirClass({target: 1}), cls, x.store, budget, graded=True)
    return _verdict(result, cls, "rational-literal" if literal_point else "rational")


def _stably_rational(x: StrataComplex, s) -> bool:
    return s.tag in ("RATIONAL", "STABLY_RATIONAL") or x.store.known_stably_rational(s.label)


def parity_rule(x: StrataComplex) -> Verdict:
    """All strata of one codimension parity stably rational and some stratum of
    the other parity not: then the volume cannot be the point."""
    cls = vol_sb(x)
    groups = {0: [], 1: []}
    for s in _labels(x):
        groups[s.codim % 2].append(s)
    for good, bad in ((0, 1), (1, 0)):
        if all(_stably_rational(x, s) for s in groups[good]) and any(
                s.tag == "IRRATIONAL" or x.store.known_not_stably_rational(s.label)
                for s in groups[bad]):
            return Verdict(OBSTRUCTED, cls, "parity")
    return Verdict(INCONCLUSIVE, cls, "parity", reason="NOT_APPLICABLE")


def specialization_check(x: StrataComplex, generic_label: Label) -> bool:
    """For a smooth model: the volume is the special fiber's type, and declaring
    the generic fiber birational to it must not contradict the store."""
    if len(x) != 1:
        raise NotSmoothModel(f"expected a single stratum, got {len(x)}")
    (s,) = x.strata
    got = vol_bir(x)
    if got != BirClass({s.label: 1}):
        raise InvariantViolation(f"smooth model volume is {got}, not {{{s.label}}}")
    if generic_label.dim != s.label.dim:
        return False
    store = x.store.copy()
    store.declare_equivalent(generic_label, s.label)
    return not store.conflicts()


def product_complex(x: StrataComplex, y: StrataComplex):
    """Product poset with added codimensions.

    Returns the complex and a map from each product open atom to the product of
    the two factor atoms, for comparing volumes with :func:`mvk.ring.substitute`.
    """
    strata, subst, ids = [], {}, {}
    n = x.fiber_dim + y.fiber_dim
    for s, t in _pairs(x.strata, y.strata):
        atom = Atom(f"{s.open_atom.name}×{t.open_atom.name}", s.dim + t.dim)
        label = product((s.label, t.label)) if s.label and t.label else None
        ids[s.id, t.id] = f"{s.id}×{t.id}"
        strata.append(make_stratum(ids[s.id, t.id], s.codim + t.codim, n,
                                   name=f"{s.name}×{t.name}", label=label,
                                   open_atom=atom.name))
        subst[atom.name] = s.open_class * t.open_class
    contains = []
    for (s1, t1), (s2, t2) in _pairs(_pairs(x.strata, y.strata), repeat=2):
        if (s1, t1) != (s2, t2) and x.leq(s1, s2) and y.leq(t1, t2):
            contains.append((ids[s1.id, t1.id], ids[s2.id, t2.id]))
    store: LabelStore = x.store.merged(y.store)
    return build_complex(n, strata, contains, store), subst
