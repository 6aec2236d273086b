"""Acceptance suite: one test per criterion, summarized at the end of the run."""
import json
import subprocess
import sys
from itertools import combinations

import pytest
from hypothesis import HealthCheck, given, settings

from mvk import scenario as sc
from mvk.birational import bir_of, sb_of
from mvk.cli import scenario_report
from mvk.equivariant import (
    ActionLabel,
    SncModelWithCovers,
    check_commute,
    forget_action,
    trivial_covers,
    vol_equivariant,
)
from mvk.errors import NotSharp
from mvk.ring import (
    Atom,
    GradedClass,
    Ideal,
    Reduction,
    blowup_delta,
    in_ideal,
    projective_class,
    projective_congruence_failures,
    reduce,
)
from mvk.strata import build_complex, closed_sum, from_snc_nerve, make_stratum, open_sum, p_class
from mvk.toric import MAX_RANK, cone_from_rays, euler_number, face_lattice, p_class_from_cone
from mvk.volume import vol, vol_bir, vol_sb
from strategies import graded_classes, snc_nerves

T, L = GradedClass.tau(), GradedClass.lef()

# alternating sums and verdicts of the worked examples, read off by hand
CORPUS = {
    "ex-4.2-double-solid": ("{AM}", "stable", "OBSTRUCTED"),
    "ex-4.3-quartic": ("2{E1} − {E1∩E2}", "stable", "OBSTRUCTED"),
    "ex-4.4-sextic": ("{X_222}", "parity", "OBSTRUCTED"),
    "ex-4.5-bidegree": ("{X_{2,d-1}}", "stable", "OBSTRUCTED"),
    "ex-4.6-del-pezzo": ("2{pt} − {E1∩E2}", "parity", "OBSTRUCTED"),
    "ex-4.7-conic-bundle": ("{E1} + {E2} − {E1∩E2}", "stable", "OBSTRUCTED"),
    "smooth-specialization": ("{P^3}", "rational", "NOT_OBSTRUCTED"),
}


def corpus_scenarios():
    return [sc.load(sc.corpus_dir() / m["file"]) for m in sc.corpus_manifest()]


@pytest.mark.criterion(1, "corpus reproduction (7 scenarios, exact)")
def test_criterion_1_corpus():
    scenarios = corpus_scenarios()
    assert sorted(s.name for s in scenarios) == sorted(CORPUS)
    for s in scenarios:
        cls, rule, status = CORPUS[s.name]
        rep = scenario_report(s)
        verdict = rep["verdicts"][rule]
        got = rep["vol_bir"] if rule == "rational" else rep["vol_sb"]
        assert (got, verdict["status"]) == (cls, status), s.name
        assert verdict["class"] == cls
    # ex-4.4: three rational components against three rational double curves
    x = sc.load(sc.resolve_path("ex-4.4-sextic")).complex
    even = sum(1 for s in x if s.codim % 2 == 0 and s.tag == "RATIONAL")
    odd = sum(1 for s in x if s.codim % 2 == 1 and s.tag == "RATIONAL")
    assert (even, odd) == (3, 3)
    assert vol_sb(x).render() == "{X_222}"


@pytest.mark.criterion(2, "open sum = closed sum on >= 100 random complexes x 3 grades")
def test_criterion_2_inclusion_exclusion():
    seen = set()

    @settings(max_examples=180, deadline=None, database=None,
              suppress_health_check=list(HealthCheck))
    @given(snc_nerves(max_components=6))
    def check(nv):
        x = from_snc_nerve(nv["fiber_dim"], nv["components"], nv["nerve"])
        for e in range(x.fiber_dim, x.fiber_dim + 3):
            assert open_sum(x, e) == closed_sum(x, e)
        seen.add(json.dumps(nv, sort_keys=True, ensure_ascii=False))

    check()
    assert len(seen) >= 100, f"only {len(seen)} distinct complexes"


@pytest.mark.criterion(3, "[P^n]_d - t^d divisible by tL for d >= max(n+1, 2), n <= 12; "
                          "diagonal reported")
def test_criterion_3_projective_congruence():
    for n in range(0, 13):
        for d in range(max(n + 1, 2), 25):
            ok, q = in_ideal(projective_class(n, d) - T ** d, Ideal.TAU_LEF)
            assert ok, (n, d)
            assert q * T * L == projective_class(n, d) - T ** d
    # the stated range also contains d = n, where the difference is L^n plus
    # divisible terms; these are the failures the ring reports
    failures = projective_congruence_failures(12)
    assert failures == [(n, n) for n in range(1, 13)]
    for n, d in failures:
        assert not in_ideal(projective_class(n, d) - T ** d, Ideal.TAU_LEF)[0]


def _full_nerve(c):
    comps = [f"E{i}" for i in range(c + 1)]
    nerve = [{"subset": list(J)} for k in range(2, c + 2) for J in combinations(comps, k)]
    return from_snc_nerve(c, comps, nerve), "∩".join(comps) if c else comps[0]


@pytest.mark.criterion(4, "p_class of a minimal stratum is P^c for c <= 8; cone agrees")
def test_criterion_4_simplicial_p_class():
    for c in range(0, 9):
        x, deepest = _full_nerve(c)
        assert x[deepest].codim == c
        assert p_class(x, deepest) == projective_class(c, c)
        if c + 1 <= MAX_RANK:
            rays = [tuple(int(i == j) for j in range(c + 1)) for i in range(c + 1)]
            assert p_class_from_cone(cone_from_rays(c + 1, rays), c) == p_class(x, deepest)
    # a non-simplicial match: four surfaces around a point, dual to the square cone
    strata = [make_stratum(f"S{i}", 0, 2) for i in range(4)]
    strata += [make_stratum(f"C{i}", 1, 2) for i in range(4)]
    strata.append(make_stratum("p", 2, 2))
    contains = [(f"C{i}", f"S{i}") for i in range(4)] + \
        [(f"C{i}", f"S{(i + 1) % 4}") for i in range(4)] + [("p", f"C{i}") for i in range(4)]
    sq = build_complex(2, strata, contains)
    cone = cone_from_rays(3, [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])
    assert p_class(sq, "p") == p_class_from_cone(cone, 2)


def _pool(r):
    if r == 1:
        return [(1,), (-1,)]
    basis = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    extra = [(1,) * r, (-1,) + (0,) * (r - 1), (1, -1) + (1,) * (r - 2),
             (2, 1) + (1,) * (r - 2), (0, 1) + (-1,) * (r - 2) if r > 2 else (1, -1),
             (1,) * (r - 1) + (2,), (-1, -1) + (0,) * (r - 2),
             (1, 0) + (2,) * (r - 2) if r > 2 else (2, 1)]
    out = list(basis)
    for v in extra:
        if v not in out and len(out) < 10:
            out.append(v)
    return out


@pytest.mark.criterion(5, "Euler number = [dim 0] on every cone from the rank <= 5 pools")
def test_criterion_5_euler_identity():
    checked = 0
    for r in range(1, 6):
        pool = _pool(r)
        for k in range(0, len(pool) + 1):
            for rays in combinations(pool, k):
                try:
                    c = cone_from_rays(r, rays)
                except NotSharp:
                    continue
                assert euler_number(face_lattice(c)) == (1 if c.dim == 0 else 0), rays
                checked += 1
    assert checked > 1000


@pytest.mark.criterion(6, "reductions are ring maps; vol -> vol_bir -> vol_sb commute on the corpus")
def test_criterion_6_commutation():
    @settings(max_examples=150, deadline=None, database=None)
    @given(graded_classes(), graded_classes())
    def ring_maps(x, y):
        for r in Reduction:
            assert reduce(x + y, r) == reduce(x, r) + reduce(y, r)
            lhs = reduce(x * y, r)
            if r is Reduction.TAU_TO_ONE:
                assert lhs == reduce(x, r) * reduce(y, r)
            else:
                assert lhs == reduce(reduce(x, r) * reduce(y, r), r)
            one = reduce(GradedClass.one(), r)
            assert one * one == one and reduce(x, r) * one == reduce(x, r)

    ring_maps()
    for s in corpus_scenarios():
        x = s.complex
        via_ring = bir_of(reduce(vol(x), Reduction.MOD_TAU), x.fiber_dim, x.atom_labels())
        assert via_ring.map(x.store.bir_image) == vol_bir(x), s.name
        assert sb_of(vol_bir(x), x.store) == vol_sb(x), s.name
        assert scenario_report(s)["reductions_commute"]


@pytest.mark.criterion(7, "blow-up difference vanishes for c = 1, tL-divisible for 2 <= c <= 10")
def test_criterion_7_blowup():
    for e in range(1, 13):
        for dim_y in range(1, e + 1):
            for dim_z in range(0, dim_y):
                c = dim_y - dim_z
                if c > 10:
                    continue
                z = GradedClass.atom(Atom("Z", dim_z)) if dim_z else GradedClass.one()
                delta = blowup_delta(z, dim_y, dim_z, e)
                if c == 1:
                    assert delta == 0
                else:
                    ok, q = in_ideal(delta, Ideal.TAU_LEF)
                    assert ok and delta and q * T * L == delta, (dim_y, dim_z, e)


def _order_by_counting(m, n):
    k = 1
    while (k * m) % n:
        k += 1
    return k


@pytest.mark.criterion(8, "forgetting the action recovers vol; restriction orders for n <= 24")
def test_criterion_8_equivariant():
    fixtures = []
    for name in ("eq-reduced-pair",):
        s = sc.load(sc.resolve_path(name))
        fixtures.append(s.model)
        assert check_commute(s.model, s.base_changed)[0]
    for s in corpus_scenarios():
        x = s.complex
        comps = {t.id: 1 for t in x if t.codim == 0}
        fixtures.append(SncModelWithCovers(x.fiber_dim, comps, x, trivial_covers(x)))
    for m in fixtures:
        for e in (m.fiber_dim, m.fiber_dim + 1, m.fiber_dim + 2):
            assert forget_action(vol_equivariant(m, e)) == vol(m.complex, e)
    cover = sc.load(sc.resolve_path("eq-double-cover"))
    assert check_commute(cover.model, cover.base_changed,
                         cover.raw["equivariant"]["identification"])[0]
    for n in range(1, 25):
        for m in range(1, 25):
            assert ActionLabel(n).restrict(m).order == _order_by_counting(m, n)


@pytest.mark.criterion(9, "corpus --json is byte-identical across two runs")
def test_criterion_9_determinism():
    cmd = [sys.executable, "-m", "mvk.cli", "--json", "corpus"]
    runs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1]
    assert json.loads(runs[0].decode("utf-8"))
