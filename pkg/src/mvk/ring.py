"""Exact arithmetic in a free model of the dimension-graded Grothendieck ring.

Elements are integer combinations of monomials ``t^a * L^b * X1 * X2 ...`` where
``t`` is the point placed in degree one, ``L`` the affine line in degree one and
``Xi`` user-declared variety atoms sitting in degree ``dim(Xi)``.  The grade of a
monomial is ``a + b + sum(dim Xi)``.

Identities proved in this free model hold in the geometric ring under any
interpretation of the atoms, which is what the rest of the package relies on.
"""
from __future__ import annotations

import enum
import threading
from collections import Counter
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, Mapping

from .errors import (
    GradeBelowDimension,
    InvalidBlowup,
    NameClash,
    NotHomogeneous,
)

__all__ = [
    "Atom",
    "AtomTable",
    "Monomial",
    "GradedClass",
    "ClassicalClass",
    "Reduction",
    "Ideal",
    "atom_class",
    "projective_class",
    "torus_class",
    "reduce",
    "in_ideal",
    "blowup_delta",
    "substitute",
    "projective_congruence_failures",
]


@dataclass(frozen=True)
class Atom:
    name: str
    dim: int
    irreducible: bool = True
    geom_irreducible: bool = True

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError(f"atom {self.name!r} has negative dimension")

    @property
    def sort_key(self):
        return (self.name,)

    def render(self) -> str:
        return self.name


class AtomTable:
    """Append-only registry of atoms keyed by name."""

    def __init__(self, atoms: Iterable[Atom] = ()):
        self._atoms: dict[str, Atom] = {}
        self._lock = threading.Lock()
        for a in atoms:
            self.add(a)

    def define(self, name: str, dim: int, irreducible: bool = True,
               geom_irreducible: bool = True) -> Atom:
        return self.add(Atom(name, dim, irreducible, geom_irreducible))

    def add(self, atom: Atom) -> Atom:
        with self._lock:
            if atom.name in self._atoms:
                raise NameClash(f"atom {atom.name!r} already defined")
            self._atoms[atom.name] = atom
        return atom

    def __getitem__(self, name: str) -> Atom:
        return self._atoms[name]

    def get(self, name: str, default=None):
        return self._atoms.get(name, default)

    def __contains__(self, name) -> bool:
        return name in self._atoms

    def __iter__(self) -> Iterator[Atom]:
        return iter(list(self._atoms.values()))

    def __len__(self) -> int:
        return len(self._atoms)


@dataclass(frozen=True)
class Monomial:
    tau: int = 0
    lef: int = 0
    atoms: tuple = ()

    def __post_init__(self):
        if self.tau < 0 or self.lef < 0:
            raise ValueError("negative exponent in monomial")
        ordered = tuple(sorted(self.atoms, key=lambda a: a.sort_key))
        if ordered != self.atoms:
            object.__setattr__(self, "atoms", ordered)

    @property
    def grade(self) -> int:
        return self.tau + self.lef + sum(a.dim for a in self.atoms)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.tau + other.tau, self.lef + other.lef,
                        self.atoms + other.atoms)

    @property
    def order_key(self):
        # descending grade, tau, lef; then ascending atom names
        return (-self.grade, -self.tau, -self.lef,
                tuple(a.sort_key for a in self.atoms))

    def is_one(self) -> bool:
        return self.tau == 0 and self.lef == 0 and not self.atoms

    def render(self) -> str:
        parts = []
        if self.tau:
            parts.append("t" if self.tau == 1 else f"t^{self.tau}")
        if self.lef:
            parts.append("L" if self.lef == 1 else f"L^{self.lef}")
        counts = Counter(self.atoms)
        seen = []
        for a in self.atoms:
            if a not in seen:
                seen.append(a)
        for a in seen:
            k = counts[a]
            parts.append(a.render() if k == 1 else f"{a.render()}^{k}")
        return "*".join(parts)

    def to_json(self) -> dict:
        return {"tau": self.tau, "lef": self.lef,
                "atoms": [a.name for a in self.atoms]}


ONE = Monomial()


def _render_terms(items) -> str:
    """Join ``(coeff, body)`` pairs; an empty body means the unit monomial."""
    if not items:
        return "0"
    out = []
    for i, (c, body) in enumerate(items):
        mag = abs(c)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        if i == 0:
            out.append(text if c > 0 else f"-{text}")
        else:
            out.append(f" + {text}" if c > 0 else f" - {text}")
    return "".join(out)


class GradedClass:
    """Immutable sparse integer combination of :class:`Monomial`."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | Iterable = ()):
        acc: dict[Monomial, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for m, c in items:
            if c:
                acc[m] = acc.get(m, 0) + c
        self._terms = {m: c for m, c in acc.items() if c}
        self._hash = None

    # constructors
    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({ONE: 1})

    @classmethod
    def tau(cls, power: int = 1):
        return cls({Monomial(tau=power): 1})

    @classmethod
    def lef(cls, power: int = 1):
        return cls({Monomial(lef=power): 1})

    @classmethod
    def atom(cls, a):
        return cls({Monomial(atoms=(a,)): 1})

    @classmethod
    def from_int(cls, n: int):
        return cls({ONE: n})

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, GradedClass):
            return other
        if isinstance(other, int):
            return cls.from_int(other)
        return NotImplemented

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return dict(self._terms)

    def items(self):
        """Terms in canonical order."""
        return sorted(self._terms.items(), key=lambda mc: mc[0].order_key)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return type(self)(acc)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, int):
            return type(self)({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, GradedClass):
            return NotImplemented
        acc: dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                acc[m] = acc.get(m, 0) + c1 * c2
        return type(self)(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = type(self).one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def grades(self) -> set[int]:
        return {m.grade for m in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.grades()) <= 1

    def grade(self) -> int | None:
        """The common grade of all terms, ``None`` for zero."""
        g = self.grades()
        if not g:
            return None
        if len(g) > 1:
            raise NotHomogeneous(f"class has terms in grades {sorted(g)}")
        return g.pop()

    def shift(self, k: int):
        """Multiply by ``t^k``."""
        if k < 0:
            raise GradeBelowDimension(f"negative shift {k}")
        return self * type(self).tau(k) if k else self

    def atoms(self) -> set:
        return {a for m in self._terms for a in m.atoms}

    def render(self) -> str:
        return _render_terms([(c, m.render()) for m, c in self.items()])

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"{type(self).__name__}({self.render()!r})"

    def to_json(self) -> list[dict]:
        return [{"coeff": c, **m.to_json()} for m, c in self.items()]


class ClassicalClass:
    """Image of a graded class in the ungraded ring (``t`` set to one)."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        acc: dict[tuple, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, c in items:
            lef, atoms = key
            key = (lef, tuple(sorted(atoms, key=lambda a: a.sort_key)))
            acc[key] = acc.get(key, 0) + c
        self._terms = {k: c for k, c in acc.items() if c}

    @property
    def terms(self):
        return dict(self._terms)

    def __eq__(self, other):
        if not isinstance(other, ClassicalClass):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0) + c
        return ClassicalClass(acc)

    def __neg__(self):
        return ClassicalClass({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return ClassicalClass({k: c * other for k, c in self._terms.items()})
        acc: dict[tuple, int] = {}
        for (l1, a1), c1 in self._terms.items():
            for (l2, a2), c2 in other._terms.items():
                key = (l1 + l2, tuple(sorted(a1 + a2, key=lambda a: a.sort_key)))
                acc[key] = acc.get(key, 0) + c1 * c2
        return ClassicalClass(acc)

    def __bool__(self):
        return bool(self._terms)

    def items(self):
        def key(kc):
            (lef, atoms), _ = kc
            dim = lef + sum(a.dim for a in atoms)
            return (-dim, -lef, tuple(a.sort_key for a in atoms))
        return sorted(self._terms.items(), key=key)

    def lef_polynomial(self) -> dict[int, int]:
        """Coefficients by power of ``L``; only valid without atoms."""
        if any(atoms for (_, atoms) in self._terms):
            raise ValueError("class involves atoms")
        return {lef: c for (lef, _), c in self._terms.items()}

    def render(self) -> str:
        return _render_terms([(c, Monomial(0, lef, atoms).render())
                              for (lef, atoms), c in self.items()])

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"ClassicalClass({self.render()!r})"

    def to_json(self):
        return [{"coeff": c, "lef": lef, "atoms": [a.name for a in atoms]}
                for (lef, atoms), c in self.items()]


class Reduction(enum.Enum):
    TAU_TO_ONE = "tau-1"
    MOD_TAU = "tau"
    MOD_TAU_LEF = "tauL"


class Ideal(enum.Enum):
    TAU = "tau"
    TAU_LEF = "tauL"


def atom_class(a: Atom, d: int) -> GradedClass:
    """``[X]_d``, i.e. ``t^(d - dim X) * X``."""
    if d < a.dim:
        raise GradeBelowDimension(f"{a.name} has dimension {a.dim} > grade {d}")
    return GradedClass({Monomial(tau=d - a.dim, atoms=(a,)): 1})


def projective_class(n: int, d: int) -> GradedClass:
    """``[P^n]_d`` as the sum of its affine cells ``t^(d-i) L^i``."""
    if n < 0:
        raise ValueError("negative projective dimension")
    if d < n:
        raise GradeBelowDimension(f"P^{n} placed in grade {d}")
    return GradedClass({Monomial(tau=d - i, lef=i): 1 for i in range(n + 1)})


def torus_class(k: int, d: int) -> GradedClass:
    """``[G_m^k]_d = t^(d-k) (L - t)^k``, expanded."""
    if k < 0:
        raise ValueError("negative torus rank")
    if d < k:
        raise GradeBelowDimension(f"G_m^{k} placed in grade {d}")
    return GradedClass({
        Monomial(tau=d - k + (k - j), lef=j): comb(k, j) * (-1) ** (k - j)
        for j in range(k + 1)
    })


def reduce(x: GradedClass, mode: Reduction):
    """Image of ``x`` in one of the three quotients used throughout.

    ``TAU_TO_ONE`` returns a :class:`ClassicalClass`; the two ``MOD`` modes return
    the canonical representative obtained by deleting monomials in the ideal.
    """
    mode = Reduction(mode)
    if mode is Reduction.TAU_TO_ONE:
        return ClassicalClass(((m.lef, m.atoms), c) for m, c in x.terms.items())
    if mode is Reduction.MOD_TAU:
        return type(x)({m: c for m, c in x.terms.items() if m.tau == 0})
    return type(x)({m: c for m, c in x.terms.items()
                    if not (m.tau >= 1 and m.lef >= 1)})


def in_ideal(x: GradedClass, gen: Ideal):
    """Whether ``x`` lies in the monomial ideal generated by ``t`` or ``t*L``.

    Returns ``(True, quotient)`` with ``x == generator * quotient`` or
    ``(False, None)``.
    """
    gen = Ideal(gen)
    dl = 1 if gen is Ideal.TAU_LEF else 0
    quotient = {}
    for m, c in x.terms.items():
        if m.tau < 1 or m.lef < dl:
            return False, None
        quotient[Monomial(m.tau - 1, m.lef - dl, m.atoms)] = c
    return True, type(x)(quotient)


def blowup_delta(z_class: GradedClass, dim_Y: int, dim_Z: int, e: int) -> GradedClass:
    """``[E]_e - [Z]_e`` for the blow-up of a smooth ``Y`` along a smooth ``Z``.

    The exceptional divisor is the projective bundle ``Z x P^(c-1)`` with
    ``c = dim_Y - dim_Z``, so the value equals ``[Bl_Z Y]_e - [Y]_e`` under the
    blow-up relation.
    """
    if not (0 <= dim_Z < dim_Y <= e):
        raise InvalidBlowup(f"need 0 <= dim Z < dim Y <= e, got {dim_Z}, {dim_Y}, {e}")
    g = z_class.grade()
    if g is not None and g != dim_Z:
        raise InvalidBlowup(f"center class has grade {g}, expected {dim_Z}")
    c = dim_Y - dim_Z
    bracket = projective_class(c - 1, c - 1).shift(e - dim_Y + 1) - GradedClass.tau(e - dim_Z)
    return z_class * bracket


def substitute(x: GradedClass, mapping: Mapping[str, GradedClass], cls=GradedClass) -> GradedClass:
    """Replace atoms by classes; each replacement must sit in the atom's own grade."""
    for name, repl in mapping.items():
        g = repl.grade()
        atom_dims = {a.dim for a in x.atoms() if a.name == name}
        if g is not None and atom_dims and g not in atom_dims:
            raise NotHomogeneous(f"replacement for {name} has grade {g}")
    total = cls()
    for m, c in x.terms.items():
        term = cls({Monomial(m.tau, m.lef): c})
        for a in m.atoms:
            repl = mapping.get(a.name)
            if repl is None:
                term = term * cls.atom(a)
            else:
                term = term * repl
        total = total + term
    return total


def projective_congruence_failures(limit: int) -> list[tuple[int, int]]:
    """Pairs ``0 <= n <= d <= limit`` where ``[P^n]_d - t^d`` is not a multiple of ``t*L``.

    In the free model these are exactly the diagonal ``d == n >= 1``.
    """
    bad = []
    for d in range(limit + 1):
        for n in range(d + 1):
            ok, _ = in_ideal(projective_class(n, d) - GradedClass.tau(d), Ideal.TAU_LEF)
            if not ok:
                bad.append((n, d))
    return bad
