"""Monodromy bookkeeping for models whose special fiber has multiplicities.

The cover strata (the normalized base-changed pieces over each open stratum)
are user input: for every stratum of the nerve one lists the atoms of its open
cover together with the order of the cyclic group through which the monodromy
acts.  Everything else is alternating-sum arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, lcm
from typing import Mapping

from .errors import (
    GradeBelowDimension,
    InvariantViolation,
    MissingCover,
    NoComponents,
    ValidationError,
)
from .ring import Atom, GradedClass, Monomial, projective_class, torus_class
from .strata import StrataComplex, from_snc_nerve
from .volume import vol

__all__ = [
    "ActionLabel",
    "EquivAtom",
    "EquivClass",
    "SncModelWithCovers",
    "snc_model",
    "trivial_covers",
    "lcm_mult",
    "vol_equivariant",
    "forget_action",
    "restrict_action",
    "check_commute",
]


@dataclass(frozen=True)
class ActionLabel:
    """Action through ``mu_order``; ``order == 1`` is the trivial action."""

    order: int = 1
    name: str = ""

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("action order must be positive")
        if self.order == 1 and self.name:
            object.__setattr__(self, "name", "")

    @property
    def trivial(self) -> bool:
        return self.order == 1

    def restrict(self, m: int) -> "ActionLabel":
        """Restriction to the kernel of ``mu_hat -> mu_m``."""
        if m < 1:
            raise ValueError("m must be positive")
        return ActionLabel(self.order // gcd(self.order, m), self.name)

    def render(self) -> str:
        if self.trivial:
            return ""
        return f"μ{self.order}" + (f":{self.name}" if self.name else "")


TRIVIAL = ActionLabel()


@dataclass(frozen=True)
class EquivAtom:
    atom: Atom
    action: ActionLabel = TRIVIAL

    @property
    def name(self) -> str:
        return self.render()

    @property
    def dim(self) -> int:
        return self.atom.dim

    @property
    def sort_key(self):
        return (self.atom.name, self.action.order, self.action.name)

    def render(self) -> str:
        if self.action.trivial:
            return self.atom.name
        return f"{self.atom.name}[{self.action.render()}]"


class EquivClass(GradedClass):
    """Graded class whose atoms carry action labels; ``t`` and ``L`` are trivial."""

    __slots__ = ()

    @classmethod
    def of(cls, atom: Atom, action: ActionLabel = TRIVIAL, grade: int | None = None):
        grade = atom.dim if grade is None else grade
        return cls({Monomial(tau=grade - atom.dim, atoms=(EquivAtom(atom, action),)): 1})

    def actions(self) -> set:
        return {a.action for a in self.atoms()}


@dataclass(frozen=True)
class SncModelWithCovers:
    fiber_dim: int
    multiplicities: dict
    complex: StrataComplex
    covers: dict = field(default_factory=dict)  # stratum id -> tuple of EquivAtom

    @property
    def n(self) -> int:
        return lcm_mult(self)


def lcm_mult(model) -> int:
    mults = model.multiplicities if isinstance(model, SncModelWithCovers) else model
    mults = list(mults.values()) if isinstance(mults, Mapping) else list(mults)
    if not mults:
        raise NoComponents("no components")
    return lcm(*mults)


def trivial_covers(x: StrataComplex) -> dict:
    """Covers of a reduced model: each open stratum covered by itself."""
    return {s.id: [EquivAtom(s.open_atom)] for s in x.strata}


def snc_model(fiber_dim: int, components, nerve=(), covers: Mapping | None = None,
              info: Mapping | None = None) -> SncModelWithCovers:
    """Validated model.  ``components`` is a list of ``(name, multiplicity)``;
    ``covers`` maps each stratum id to its open cover pieces, given as
    :class:`EquivAtom` or ``(atom, order)`` pairs, where a bare atom name takes
    the dimension of its stratum.  Omitting ``covers`` is only
    allowed when every multiplicity is one."""
    components = list(components)
    if not components:
        raise NoComponents("no components")
    mults = {}
    for name, m in components:
        if int(m) < 1:
            raise ValidationError(f"component {name} has multiplicity {m}")
        mults[name] = int(m)
    x = from_snc_nerve(fiber_dim, list(mults), nerve, info)
    n = lcm(*mults.values())
    if covers is None:
        if n != 1:
            raise MissingCover("covers are required when some multiplicity exceeds one")
        covers = trivial_covers(x)
    clean = {}
    for s in x.strata:
        if s.id not in covers:
            raise MissingCover(f"no cover declared for stratum {s.id}")
        pieces = []
        for p in covers[s.id]:
            if not isinstance(p, EquivAtom):
                atom, order = p
                if isinstance(atom, str):
                    atom = Atom(atom, s.dim)
                p = EquivAtom(atom, ActionLabel(order) if isinstance(order, int) else order)
            if p.dim != s.dim:
                raise ValidationError(f"cover piece {p.render()} of {s.id} has dim {p.dim}, "
                                      f"expected {s.dim}")
            if n % p.action.order:
                raise ValidationError(f"cover piece {p.render()}: order {p.action.order} "
                                      f"does not divide {n}")
            pieces.append(p)
        if not pieces:
            raise MissingCover(f"empty cover for stratum {s.id}")
        clean[s.id] = tuple(pieces)
    extra = sorted(set(covers) - set(clean))
    if extra:
        raise ValidationError(f"covers for unknown strata {extra}")
    return SncModelWithCovers(fiber_dim, mults, x, clean)


def _open_cover(model, sid, grade) -> EquivClass:
    total = EquivClass()
    for p in model.covers[sid]:
        # pieces are connected, so a zero-dimensional one with trivial action is a point
        atoms = () if p.dim == 0 and p.action.trivial else (p,)
        total = total + EquivClass({Monomial(tau=grade - p.dim, atoms=atoms): 1})
    return total


def vol_equivariant(model: SncModelWithCovers, e: int | None = None) -> EquivClass:
    x = model.complex
    e = x.fiber_dim if e is None else e
    if e < x.fiber_dim:
        raise GradeBelowDimension(f"grade {e} below fiber dimension {x.fiber_dim}")
    opened = EquivClass()
    closed = EquivClass()
    for s in x.strata:
        c = s.codim
        sign = (-1) ** c
        opened = opened + _open_cover(model, s.id, e - c) * torus_class(c, c) * sign
        cover = EquivClass()
        for t in x.below(s):
            cover = cover + _open_cover(model, t.id, e - c)
        closed = closed + cover * projective_class(c, c) * sign
    if opened != closed:
        raise InvariantViolation(f"equivariant open and closed sums differ: {opened} vs {closed}")
    return opened


def _map_atoms(x: GradedClass, f, cls):
    acc = {}
    for m, c in x.terms.items():
        key = Monomial(m.tau, m.lef, tuple(f(a) for a in m.atoms))
        acc[key] = acc.get(key, 0) + c
    return cls(acc)


def forget_action(x: EquivClass, identify: Mapping | None = None) -> GradedClass:
    """Drop action labels.  ``identify`` renames cover atoms (by name) to atoms
    or atom names of another model, merging them."""
    identify = identify or {}

    def strip(a):
        base = a.atom if isinstance(a, EquivAtom) else a
        target = identify.get(base.name)
        if target is None:
            return base
        return target if isinstance(target, Atom) else Atom(target, base.dim)

    return _map_atoms(x, strip, GradedClass)


def restrict_action(x: EquivClass, m: int) -> EquivClass:
    if m < 1:
        raise ValueError("m must be positive")
    return _map_atoms(x, lambda a: EquivAtom(a.atom, a.action.restrict(m)), EquivClass)


def check_commute(model: SncModelWithCovers, base_changed: StrataComplex,
                  identify: Mapping | None = None):
    """Forgetting the action of the equivariant volume gives the volume of the
    base-changed model.  Returns ``(ok, diagnostic)``; the diagnostic names the
    first monomial (in canonical order) where the two sides differ."""
    e = base_changed.fiber_dim
    atoms = {s.open_atom.name: s.open_atom for s in base_changed.strata}
    ident = {k: atoms.get(v, v) if isinstance(v, str) else v
             for k, v in (identify or {}).items()}
    lhs = forget_action(vol_equivariant(model, e), ident)
    rhs = vol(base_changed, e)
    diff = lhs - rhs
    if not diff:
        return True, None
    m, _ = diff.items()[0]
    return False, {
        "monomial": m.render() or "1",
        "equivariant": lhs.terms.get(m, 0),
        "base_changed": rhs.terms.get(m, 0),
    }
