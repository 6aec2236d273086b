import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvk.errors import GradeBelowDimension, InvalidBlowup, NameClash, NotHomogeneous
from mvk.ring import (
    Atom,
    AtomTable,
    ClassicalClass,
    GradedClass,
    Ideal,
    Monomial,
    Reduction,
    atom_class,
    blowup_delta,
    in_ideal,
    projective_class,
    projective_congruence_failures,
    reduce,
    substitute,
    torus_class,
)
from strategies import ATOMS, graded_classes, homogeneous_classes

T, L = GradedClass.tau(), GradedClass.lef()


def evaluate(x, t, lef, values):
    """Evaluation homomorphism to the integers; an oracle independent of the
    class arithmetic."""
    total = 0
    for m, c in x.terms.items():
        v = c * t ** m.tau * lef ** m.lef
        for a in m.atoms:
            v *= values[a.name]
        total += v
    return total


def random_point(rng):
    return rng.randint(-4, 4), rng.randint(-4, 4), {a.name: rng.randint(-4, 4) for a in ATOMS}


def test_atom_table_rejects_duplicates():
    table = AtomTable()
    table.define("E", 2)
    assert table["E"].dim == 2 and "E" in table and len(table) == 1
    with pytest.raises(NameClash):
        table.define("E", 3)


def test_atom_class_shifts_into_grade():
    e = Atom("E", 2)
    assert atom_class(e, 2).render() == "E"
    assert atom_class(e, 4).render() == "t^2*E"
    with pytest.raises(GradeBelowDimension):
        atom_class(e, 1)


def test_projective_and_torus_examples():
    assert projective_class(0, 0) == 1
    assert projective_class(1, 1) == T + L
    assert projective_class(2, 3).render() == "t^3 + t^2*L + t*L^2"
    assert torus_class(0, 2) == T ** 2
    assert torus_class(1, 1) == L - T
    assert torus_class(2, 3).render() == "t^3 - 2*t^2*L + t*L^2"
    with pytest.raises(GradeBelowDimension):
        projective_class(3, 2)


@pytest.mark.parametrize("n", range(6))
def test_projective_space_is_union_of_tori(n):
    # P^n is the disjoint union of C(n+1, k+1) tori of dimension k
    total = GradedClass()
    for k in range(n + 1):
        total = total + torus_class(k, n) * comb(n + 1, k + 1)
    assert total == projective_class(n, n)


def test_render_canonical_order():
    e = Atom("E1", 1)
    x = GradedClass.atom(e) * L * 3 + T ** 2 * L - 1
    assert x.render() == "t^2*L + 3*L*E1 - 1"
    assert GradedClass().render() == "0"
    assert (-T).render() == "-t"


def test_grade_and_homogeneity():
    assert (T * L).grade() == 2
    assert GradedClass().grade() is None
    with pytest.raises(NotHomogeneous):
        (T + L * L).grade()


@given(graded_classes(), graded_classes(), graded_classes())
def test_ring_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    assert x * 1 == x


@given(graded_classes(), graded_classes(), st.randoms(use_true_random=False))
def test_arithmetic_matches_evaluation(x, y, rng):
    t, lef, vals = random_point(rng)
    ex, ey = evaluate(x, t, lef, vals), evaluate(y, t, lef, vals)
    assert evaluate(x + y, t, lef, vals) == ex + ey
    assert evaluate(x * y, t, lef, vals) == ex * ey
    assert evaluate(x ** 2, t, lef, vals) == ex ** 2


@given(graded_classes())
def test_tau_to_one_preserves_evaluation(x):
    c = reduce(x, Reduction.TAU_TO_ONE)
    assert isinstance(c, ClassicalClass)
    back = GradedClass({Monomial(0, lef, atoms): k for (lef, atoms), k in c.terms.items()})
    assert evaluate(back, 1, 3, {"A": 2, "B": -1, "C": 5, "P": 7}) == \
        evaluate(x, 1, 3, {"A": 2, "B": -1, "C": 5, "P": 7})


def test_reductions_on_example():
    e = Atom("E", 1)
    x = T * L * GradedClass.atom(e) + T * T + L * L + GradedClass.atom(e) * T
    assert reduce(x, "tau") == L * L
    assert reduce(x, Reduction.MOD_TAU_LEF) == T * T + L * L + GradedClass.atom(e) * T
    assert reduce(x, Reduction.TAU_TO_ONE).render() == "L^2 + L*E + E + 1"


def test_in_ideal():
    ok, q = in_ideal(T * L * 3 + T * T * L, Ideal.TAU_LEF)
    assert ok and q == 3 + T
    assert in_ideal(T + L, Ideal.TAU) == (False, None)
    ok, q = in_ideal(GradedClass(), Ideal.TAU)
    assert ok and q == 0


@given(homogeneous_classes(grade=3))
def test_in_ideal_quotient_reconstructs(x):
    ok, q = in_ideal(x * T, Ideal.TAU)
    assert ok and q * T == x * T


def test_blowup_delta_examples():
    z = GradedClass.atom(Atom("Z", 1))
    assert blowup_delta(z, 2, 1, 2) == 0
    assert blowup_delta(z, 3, 1, 3) == z * T * L
    # a point blown up in a surface: the exceptional curve minus the point
    assert blowup_delta(GradedClass.one(), 2, 0, 2) == T * L
    with pytest.raises(InvalidBlowup):
        blowup_delta(z, 1, 1, 3)
    with pytest.raises(InvalidBlowup):
        blowup_delta(z, 3, 1, 2)


def test_substitute():
    a, b = Atom("A", 1), Atom("B", 2)
    x = GradedClass.atom(a) * T + 2
    y = substitute(x, {"A": L + T})
    assert y == T * L + T * T + 2
    with pytest.raises(NotHomogeneous):
        substitute(x, {"A": GradedClass.atom(b)})


def test_projective_congruence_fails_exactly_on_the_diagonal():
    assert projective_congruence_failures(6) == [(n, n) for n in range(1, 7)]


def test_classical_class_arithmetic():
    c = reduce(projective_class(2, 2), Reduction.TAU_TO_ONE)
    assert c.lef_polynomial() == {0: 1, 1: 1, 2: 1}
    assert (c * c - c).render() == "L^4 + 2*L^3 + 2*L^2 + L"


@settings(max_examples=50)
@given(st.integers(0, 6), st.integers(0, 6))
def test_torus_class_grade(k, extra):
    x = torus_class(k, k + extra)
    assert x.grade() == k + extra
    assert evaluate(x, 1, 1, {}) == (0 if k else 1)
    assert evaluate(x, 2, 5, {}) == 2 ** extra * 3 ** k


def test_random_graded_products_are_homogeneous():
    rng = random.Random(7)
    for _ in range(20):
        d1, d2 = rng.randint(0, 4), rng.randint(0, 4)
        x = projective_class(rng.randint(0, d1), d1) + torus_class(rng.randint(0, d1), d1)
        y = projective_class(rng.randint(0, d2), d2)
        assert (x * y).grade() in (d1 + d2, None)
