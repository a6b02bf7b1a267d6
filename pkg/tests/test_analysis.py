"""Truncated cohomology, presentation equality, rank compatibility."""

import pytest

from semifree.algebra import (
    Generator,
    INTEGERS,
    NcPoly,
    RATIONALS,
    integers_mod,
)
from semifree.analysis import (
    change_coefficients,
    exact_rank,
    functor_rank_compat,
    presentation_equal,
    truncated_cohomology,
)
from semifree.dgcat import DgFunctor, new_semifree, validate_functor
from semifree.fukaya import ModelId, build
from semifree.twisted import build_d12, build_e12

ring = INTEGERS
Q = RATIONALS
P = integers_mod(10007)


# ---------------------------------------------------------------------------
# exact rank
# ---------------------------------------------------------------------------

def test_exact_rank_small_cases():
    assert exact_rank([], ring) == 0
    assert exact_rank([{0: 1}, {0: 2}], ring) == 1
    assert exact_rank([{0: 1, 1: 1}, {1: 1}], ring) == 2
    assert exact_rank([{0: 2, 1: 4}, {0: 1, 1: 2}], Q) == 1


def test_exact_rank_fractions_and_mod():
    from fractions import Fraction
    rows = [{0: Fraction(1, 2), 1: Fraction(1, 3)},
            {0: Fraction(3, 2), 1: Fraction(1, 1)}]
    assert exact_rank(rows, Q) == 1  # proportional rows
    rows2 = [{0: Fraction(1, 2), 1: Fraction(1, 3)},
             {0: Fraction(3, 2), 1: Fraction(2, 1)}]
    assert exact_rank(rows2, Q) == 2
    assert exact_rank([{0: 10007}], P) == 0
    assert exact_rank([{0: 10008}], P) == 1


def test_non_field_rejected():
    d12 = build_d12(3, ring)
    with pytest.raises(ValueError):
        truncated_cohomology(d12, "L1", "L1", (-3, 0), 8, INTEGERS)
    with pytest.raises(ValueError):
        truncated_cohomology(d12, "L1", "L1", (-3, 0), 8, integers_mod(6))


# ---------------------------------------------------------------------------
# truncated cohomology
# ---------------------------------------------------------------------------

def test_d12_ranks_are_free_powers():
    d12 = build_d12(3, ring)
    table = truncated_cohomology(d12, "L1", "L1", (-3, 0), 8, Q)
    assert table.ranks == {0: 1, -1: 1, -2: 1, -3: 1}
    assert all(table.exact.values())


def test_zero_differential_counts_words():
    cat = build(ModelId.parse("S:3,2,0"), ring)
    # restrict to the closed part: a category with d = 0
    free = new_semifree(ring, ("L",),
                        tuple(Generator(f"a{i}", "L", "L", -2, i - 1)
                              for i in (1, 2)),
                        {f"a{i}": NcPoly.zero(ring, "L", "L")
                         for i in (1, 2)})
    from semifree.dgcat import hom_slice
    table = truncated_cohomology(free, "L", "L", (-4, 0), 4, Q)
    slice_ = hom_slice(free, "L", "L", (-4, 0), 4)
    for k, rank in table.ranks.items():
        assert rank == len(slice_.words_by_degree.get(k, []))


def test_e12_matches_d12_on_window():
    e12 = build_e12(3, ring)
    d12 = build_d12(3, ring)
    te = truncated_cohomology(e12, "L2", "L1", (-3, 1), 8, Q)
    td = truncated_cohomology(d12, "L2", "L1", (-3, 1), 8, Q)
    assert te.ranks == td.ranks
    assert te.ranks == {1: 0, 0: 0, -1: 1, -2: 1, -3: 1}


def test_rational_and_modular_ranks_agree():
    # word enumeration is exponential in the bound, so the densely
    # generated localized surface gets a short one
    for spec, bound in (("D12:3", 8), ("S:3,2,0", 6), ("M:1,1", 2)):
        cat = build(ModelId.parse(spec), ring)
        src = cat.objects[0]
        tq = truncated_cohomology(cat, src, src, (-3, 0), bound, Q)
        tp = truncated_cohomology(cat, src, src, (-3, 0), bound, P)
        assert tq.ranks == tp.ranks


def test_truncation_caveat_flagged():
    # dh = a2 a1 - 1 grows word length, so this slice never saturates and
    # every degree carries the caveat; a zero-differential slice is exact
    cat = build(ModelId.parse("S:2,2,0"), ring, {"localize": False})
    table = truncated_cohomology(cat, "L", "L", (-1, 0), 4, Q)
    assert not any(table.exact.values())
    d12 = build_d12(3, ring)
    free = truncated_cohomology(d12, "L1", "L1", (-2, 0), 6, Q)
    assert all(free.exact.values())


def test_change_coefficients_roundtrip():
    cat = build(ModelId.parse("S:2,2,0"), ring)
    over_q = change_coefficients(cat, Q)
    assert over_q.ring == Q
    over_p = change_coefficients(cat, P)
    assert over_p.ring == P


# ---------------------------------------------------------------------------
# presentation equality
# ---------------------------------------------------------------------------

def test_presentation_equal_reflexive_symmetric_transitive():
    a = build(ModelId.parse("S:3,2,0"), ring)
    ident = {g.name: g.name for g in a.generators}
    assert presentation_equal(a, a, {"L": "L"}, ident)["equal"]
    b = build(ModelId.parse("S:3,2,0"), ring)
    assert presentation_equal(a, b, {"L": "L"}, ident)["equal"]
    assert presentation_equal(b, a, {"L": "L"}, ident)["equal"]


def test_presentation_unequal_pinpoints_generator():
    a = build(ModelId.parse("S:3,2,0"), ring)
    from semifree.reduce import change_basis
    b = change_basis(a, "a1", -1)
    rep = presentation_equal(
        a, b, {"L": "L"}, {g.name: g.name for g in a.generators})
    assert not rep["equal"]
    assert "d(h)" in rep["mismatches"][0]


def test_presentation_equal_with_units():
    a = build(ModelId.parse("S:3,2,0"), ring)
    from semifree.reduce import change_basis
    b = change_basis(a, "a1", -1)
    rep = presentation_equal(a, b, {"L": "L"},
                             {"a1": ("a1", -1), "a2": "a2", "h": "h"})
    assert rep["equal"]


def test_presentation_equal_checks_bijection():
    a = build(ModelId.parse("S:3,2,0"), ring)
    b = build(ModelId.parse("S:3,1,0"), ring)
    rep = presentation_equal(a, b, {"L": "L"}, {"a1": "a1", "a2": "a1",
                                                "h": "h"})
    assert not rep["equal"]


# ---------------------------------------------------------------------------
# functor rank compatibility
# ---------------------------------------------------------------------------

def test_identity_functor_trivially_compatible():
    from semifree.dgcat import identity_functor
    cat = build_d12(3, ring)
    report = functor_rank_compat(identity_functor(cat), (-2, 0), 6, Q)
    assert report["agree"]
    assert report["status"] == "evidence-only"


def test_generator_change_rank_compatible():
    from semifree.twisted import generator_change_d12
    _, functor, _ = generator_change_d12(3, ring)
    report = functor_rank_compat(functor, (-2, 1), 6, Q)
    assert report["agree"]


def test_free_to_relational_inclusion_rank_compatible():
    # x -> x, y -> y from the free x/y presentation into the cone-side one
    d12 = build_d12(3, ring)
    e12 = build_e12(3, ring)
    f = DgFunctor(d12, e12, {"L1": "L1", "L2": "L2"},
                  {"x": NcPoly.gen(ring, e12.gen("x")),
                   "y": NcPoly.gen(ring, e12.gen("y"))})
    validate_functor(f)
    report = functor_rank_compat(f, (-3, 1), 8, Q)
    assert report["agree"]


def test_non_quasi_iso_detected():
    # z -> 0 from the 2-sphere algebra into the point: rank 1 vs 0 in deg -1
    c2 = build(ModelId.parse("C:2"), ring)
    a1 = build(ModelId("A1"), ring)
    f = DgFunctor(c2, a1, {"L": "K"}, {"z": NcPoly.zero(ring, "K", "K")})
    validate_functor(f)
    report = functor_rank_compat(f, (-1, 0), 4, Q)
    assert not report["agree"]
    pair = report["pairs"][0]
    assert pair["source_ranks"]["-1"] == 1
    assert pair["target_ranks"]["-1"] == 0
