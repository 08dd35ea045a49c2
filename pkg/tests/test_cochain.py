"""Cochain storage, differentials, validation, and the gauge move."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from deligne import (
    CochainError,
    attach_cover,
    build_cochain,
    build_complex,
    cech_delta,
    chern_cocycle,
    discrete_d,
    disjoint_union_cochains,
    dual,
    exact_shift,
    glue_cochains,
    random_cochain,
    restrict_cochain,
    reverse_cochain,
    star_cover,
    tensor,
    validate_cocycle,
    verify_trivialization,
    zero_cochain,
)
from deligne.cochain import cech_delta_level
from deligne._scalars import TWO_PI

TRIANGLE = build_complex([(0, 1, 2)])
TRI_COVER = attach_cover(TRIANGLE, 3, {(0, 1, 2): (0, 1, 2)})

TWO_TRIS = build_complex([(0, 1, 2), (1, 3, 2)])
SHARED_COVER = attach_cover(
    TWO_TRIS, 3, {(0, 1, 2): (0, 1, 2), (1, 2, 3): (0, 1, 2)}
)


def degree1_sample():
    entries = [
        (0, (0, 1), (0,), 0.25),
        (0, (0, 2), (0,), -0.5),
        (0, (1, 2), (0,), 1.0),
        (1, (0,), (0, 1), 2.0),
        (1, (1,), (1, 2), -0.75),
    ]
    return build_cochain(TRI_COVER, 1, entries)


# -- storage and antisymmetry -------------------------------------------------


def test_component_antisymmetric_in_indices():
    c = degree1_sample()
    assert c.component(0, (0,), (0, 1)) == 0.25
    assert c.component(0, (0,), (1, 0)) == -0.25
    assert c.component(0, (0,), (1, 1)) == 0.0


def test_component_antisymmetric_in_simplex():
    c = degree1_sample()
    assert c.component(1, (0, 1), (0,)) == 2.0
    assert c.component(1, (1, 0), (0,)) == -2.0


def test_component_missing_entries_are_typed_zero():
    c = degree1_sample()
    assert c.component(1, (0, 2), (2,)) == 0.0
    e = zero_cochain(TRI_COVER, 1, exact=True)
    v = e.component(0, (0,), (0, 1))
    assert v == 0 and isinstance(v, Fraction)


def test_build_absorbs_input_parities():
    c = build_cochain(TRI_COVER, 1, [(0, (1, 0), (2,), 3.0)])
    assert c.component(0, (2,), (0, 1)) == -3.0
    assert c.component(0, (2,), (1, 0)) == 3.0
    d = build_cochain(TRI_COVER, 1, [(1, (0,), (2, 1), 4.0)])
    assert d.component(1, (1, 2), (0,)) == -4.0
    assert d.component(1, (2, 1), (0,)) == 4.0


def test_entries_iterate_in_canonical_order():
    c = degree1_sample()
    keys = [(k, s, J) for k, s, J, _ in c.entries()]
    assert keys == sorted(keys)


def test_zero_entries_are_dropped():
    c = build_cochain(TRI_COVER, 1, [(1, (0,), (0, 1), 0.0)])
    assert list(c.entries()) == []


def test_duplicate_entries_merge_or_conflict():
    same = [(1, (0,), (0, 1), 2.0), (1, (0,), (1, 0), -2.0)]
    c = build_cochain(TRI_COVER, 1, same)
    assert c.component(1, (0, 1), (0,)) == 2.0
    clash = [(1, (0,), (0, 1), 2.0), (1, (0,), (0, 1), 3.0)]
    with pytest.raises(CochainError):
        build_cochain(TRI_COVER, 1, clash)


def test_build_rejections():
    with pytest.raises(CochainError):
        build_cochain(TRI_COVER, -1, [])
    with pytest.raises(CochainError):
        build_cochain(TRI_COVER, 1, [(2, (0,), (0, 1, 2), 1.0)])
    with pytest.raises(CochainError):
        build_cochain(TRI_COVER, 1, [(0, (0, 1), (0, 1), 1.0)])  # not a vertex
    with pytest.raises(CochainError):
        build_cochain(TRI_COVER, 1, [(0, (0,), (0,), 1.0)])  # short index
    with pytest.raises(CochainError):
        build_cochain(TRI_COVER, 1, [(1, (0,), (5,), 1.0)])  # inadmissible
    with pytest.raises(CochainError):
        build_cochain(TRI_COVER, 1, [(0, (0, 0), (0,), 1.0)])  # repeated index
    with pytest.raises(TypeError):
        build_cochain(TRI_COVER, 1, [(1, (0,), (0, 1), 0.5)], exact=True)


def test_repeated_index_zero_value_is_dropped():
    c = build_cochain(TRI_COVER, 1, [(0, (1, 1), (0,), 0.0)])
    assert list(c.entries()) == []


@given(st.permutations([0, 1, 2]))
def test_index_permutation_parity(perm):
    c = build_cochain(TRI_COVER, 2, [(0, (0, 1, 2), (0,), 1.5)])
    from oracles import sorted_sign

    assert c.component(0, (0,), tuple(perm)) == sorted_sign(perm) * 1.5


# -- differentials -------------------------------------------------------------


def test_cech_delta_alternating_sum():
    c = degree1_sample()
    v = (0,)
    expected = (
        c.component(0, v, (1, 2))
        - c.component(0, v, (0, 2))
        + c.component(0, v, (0, 1))
    )
    assert cech_delta(c, v, (0, 1, 2)) == pytest.approx(expected)
    assert expected == pytest.approx(1.0 + 0.5 + 0.25)


def test_discrete_d_uses_incidence():
    c = degree1_sample()
    val = discrete_d(c, (0, 1), (0,))
    expected = c.component(0, (1,), (0,)) - c.component(0, (0,), (0,))
    assert val == pytest.approx(expected)
    # orientation of the argument flips the result
    assert discrete_d(c, (1, 0), (0,)) == pytest.approx(-expected)


def test_cech_delta_level_matches_inline_expansion():
    b = random_cochain(TRI_COVER, 0, seed=4)
    J = (0, 1, 2)
    v = (1,)
    expect = (
        b.component(0, v, (1, 2))
        - b.component(0, v, (0, 2))
        + b.component(0, v, (0, 1))
    )
    assert cech_delta_level(b, 0, v, J) == pytest.approx(expect)


# -- validation ----------------------------------------------------------------


def test_zero_cochain_validates_and_is_flagged():
    c = zero_cochain(TRI_COVER, 1)
    assert c.cocycle
    report = validate_cocycle(c)
    assert report.passed
    assert report.checked[0] == 3  # one chart triple per vertex
    assert all(w == 0 for w in report.worst.values())


def test_constant_turn_cochain_validates_with_witness():
    entries = [
        (0, (a, b), (v,), TWO_PI)
        for v in (0, 1, 2)
        for (a, b) in ((0, 1), (0, 2), (1, 2))
    ]
    c = build_cochain(TRI_COVER, 1, entries)
    report = validate_cocycle(c)
    assert report.passed
    n = chern_cocycle(c)
    for v in (0, 1, 2):
        assert n.value((v,), (0, 1, 2)) == 1
        assert n.value((v,), (2, 1, 0)) == -1


def test_validation_localizes_single_corruption():
    c = zero_cochain(TRI_COVER, 1)
    broken = tensor(
        c, build_cochain(TRI_COVER, 1, [(1, (0,), (0, 2), 0.5)])
    )
    report = validate_cocycle(broken)
    assert not report.passed
    assert {f.level for f in report.failing} == {1}
    assert all(f.simplex == (0, 2) for f in report.failing)
    # only chart pairs containing 0 feel the corruption through delta
    assert all(0 in f.indices for f in report.failing)


def test_validation_level0_residual_in_turns():
    c = build_cochain(TRI_COVER, 1, [(0, (0, 1), (0,), math.pi)])
    report = validate_cocycle(c)
    zero_level = [f for f in report.failing if f.level == 0]
    assert zero_level
    for f in zero_level:
        assert f.residual == pytest.approx(0.5)
        assert f.witness in (0, 1)


def test_exact_mode_requires_exact_zero():
    tiny = Fraction(1, 10**12)
    c = build_cochain(
        TRI_COVER, 1, [(0, (0, 1), (0,), tiny)], exact=True
    )
    report = validate_cocycle(c, tol=1e-3)
    assert not report.passed


def test_gauge_orbit_validates_exactly():
    b = random_cochain(SHARED_COVER, 1, seed=9, exact=True)
    c = exact_shift(zero_cochain(SHARED_COVER, 2, exact=True), b)
    report = validate_cocycle(c)
    assert report.passed
    assert all(w == 0 for w in report.worst.values())
    assert c.cocycle


def test_gauge_orbit_validates_float():
    b = random_cochain(SHARED_COVER, 1, seed=10)
    c = exact_shift(zero_cochain(SHARED_COVER, 2), b)
    assert validate_cocycle(c, tol=1e-9).passed


def test_exact_shift_degree_requirements():
    c = zero_cochain(TRI_COVER, 1)
    with pytest.raises(CochainError):
        exact_shift(c, zero_cochain(TRI_COVER, 1))
    with pytest.raises(CochainError):
        exact_shift(zero_cochain(TRI_COVER, 0), zero_cochain(TRI_COVER, 0))
    with pytest.raises(CochainError):
        exact_shift(c, zero_cochain(TRI_COVER, 0, exact=True))


# -- trivialization -------------------------------------------------------------


def test_trivialization_recognizes_its_own_shift():
    b = random_cochain(TRI_COVER, 1, seed=21)
    c = exact_shift(zero_cochain(TRI_COVER, 2), b)
    report = verify_trivialization(c, b)
    assert report.is_trivial
    assert not report.lower_failing
    assert report.top_spread == pytest.approx(0.0, abs=1e-12)
    for s, r in report.top_residuals.items():
        assert r == pytest.approx(0.0, abs=1e-12)


def test_trivialization_flags_obstruction():
    b = random_cochain(TRI_COVER, 1, seed=22)
    c = exact_shift(zero_cochain(TRI_COVER, 2), b)
    bump = build_cochain(TRI_COVER, 2, [(2, (0,), (0, 1, 2), 1.0)])
    report = verify_trivialization(tensor(c, bump), b)
    assert not report.is_trivial
    assert not report.lower_failing  # only the top level was disturbed
    assert report.top_residuals[(0, 1, 2)] == pytest.approx(1.0)


def test_trivialization_degree_check():
    with pytest.raises(CochainError):
        verify_trivialization(
            zero_cochain(TRI_COVER, 2), zero_cochain(TRI_COVER, 0)
        )


# -- integer class extraction ----------------------------------------------------


def test_chern_requires_cocycle_flag():
    c = build_cochain(TRI_COVER, 1, [(0, (0, 1), (0,), 0.3)])
    with pytest.raises(CochainError):
        chern_cocycle(c)


def test_chern_rejects_non_integral_despite_flag():
    c = build_cochain(TRI_COVER, 1, [(0, (0, 1), (0,), 0.3)])
    c.cocycle = True
    with pytest.raises(CochainError):
        chern_cocycle(c)


def test_chern_of_gauge_orbit_vanishes():
    b = random_cochain(TRI_COVER, 1, seed=33, exact=True)
    c = exact_shift(zero_cochain(TRI_COVER, 2, exact=True), b)
    validate_cocycle(c)
    n = chern_cocycle(c)
    assert dict(n.entries) == {}


# -- algebra ----------------------------------------------------------------------


def test_tensor_adds_componentwise():
    c = degree1_sample()
    t = tensor(c, c)
    assert t.component(1, (0, 1), (0,)) == pytest.approx(4.0)
    assert t.component(0, (0,), (0, 2)) == pytest.approx(-1.0)


def test_tensor_dual_cancels():
    c = degree1_sample()
    z = tensor(c, dual(c))
    assert list(z.entries()) == []


def test_tensor_mode_and_degree_mismatch():
    c = degree1_sample()
    with pytest.raises(CochainError):
        tensor(c, zero_cochain(TRI_COVER, 2))
    with pytest.raises(CochainError):
        tensor(c, zero_cochain(TRI_COVER, 1, exact=True))


def test_restrict_cochain_drops_foreign_simplices():
    from deligne import restrict_cover

    c = build_cochain(
        SHARED_COVER,
        1,
        [
            (1, (0,), (0, 1), 2.0),
            (1, (0,), (1, 3), -1.0),
            (0, (0, 1), (3,), 0.5),
        ],
    )
    sub = restrict_cover(SHARED_COVER, build_complex([(0, 1, 2)]))
    r = restrict_cochain(c, sub)
    assert r.component(1, (0, 1), (0,)) == 2.0
    assert r.component(0, (3,), (0, 1)) == 0.0
    assert r.component(1, (1, 3), (0,)) == 0.0 or not r.base.complex.has((1, 3))


def test_reverse_cochain_keeps_data_flips_complex():
    c = degree1_sample()
    r = reverse_cochain(c)
    assert r.base.complex.orientation((0, 1, 2)) == -TRIANGLE.orientation((0, 1, 2))
    assert r.component(1, (0, 1), (0,)) == c.component(1, (0, 1), (0,))


def test_disjoint_union_cochains_carry_entries():
    c1 = degree1_sample()
    c2 = degree1_sample()
    u, shift = disjoint_union_cochains(c1, c2)
    assert u.component(1, (0, 1), (0,)) == 2.0
    s = tuple(sorted((shift[0], shift[1])))
    assert abs(u.component(1, s, (0,))) == 2.0
    assert len(list(u.entries())) == 2 * len(list(c1.entries()))
    with pytest.raises(CochainError):
        disjoint_union_cochains(c1, zero_cochain(TRI_COVER, 2))


def test_glue_cochains_seam_agreement():
    K1 = build_complex([(0, 1), (1, 2)])
    K2 = build_complex([(0, 1), (1, 2)])
    cov1 = attach_cover(K1, 2, {(0, 1): (0, 1), (1, 2): (0, 1)})
    cov2 = attach_cover(K2, 2, {(0, 1): (0, 1), (1, 2): (0, 1)})
    mk = lambda cov, vals: build_cochain(
        cov, 1, [(0, (0, 1), (v,), vals[v]) for v in (0, 1, 2)]
    )
    c1 = mk(cov1, {0: 0.1, 1: 0.2, 2: 0.3})
    # matched seam: K2's 0 lands on K1's 2 and vice versa
    c2 = mk(cov2, {0: 0.3, 1: 0.9, 2: 0.1})
    glued, relabel = glue_cochains(c1, c2, {0: 2, 2: 0})
    assert glued.base.complex.closed
    assert glued.component(0, (relabel[1],), (0, 1)) == pytest.approx(0.9)
    assert glued.component(0, (0,), (0, 1)) == pytest.approx(0.1)

    bad = mk(cov2, {0: 0.35, 1: 0.9, 2: 0.1})
    with pytest.raises(CochainError):
        glue_cochains(c1, bad, {0: 2, 2: 0})


def test_glue_cochains_mode_checks():
    c = degree1_sample()
    with pytest.raises(CochainError):
        glue_cochains(c, zero_cochain(TRI_COVER, 1, exact=True), {})


def test_glue_transports_edge_parity():
    K1 = build_complex([(0, 1), (1, 2)])
    K2 = build_complex([(0, 1), (1, 2)])
    cov1 = attach_cover(K1, 2, {(0, 1): (0, 1), (1, 2): (0, 1)})
    cov2 = attach_cover(K2, 2, {(0, 1): (0, 1), (1, 2): (0, 1)})
    c1 = zero_cochain(cov1, 1)
    c2 = build_cochain(cov2, 1, [(1, (0,), (1, 2), 5.0)])
    glued, relabel = glue_cochains(c1, c2, {0: 2, 2: 0})
    # edge (1,2) of K2 becomes (relabel[1], 0); the component evaluated in
    # the renamed vertex order must equal the original value
    assert glued.component(1, (relabel[1], relabel[2]), (0,)) == pytest.approx(5.0)


# -- random material ---------------------------------------------------------------


def test_random_cochain_reproducible():
    a = random_cochain(SHARED_COVER, 2, seed=7)
    b = random_cochain(SHARED_COVER, 2, seed=7)
    assert list(a.entries()) == list(b.entries())
    c = random_cochain(SHARED_COVER, 2, seed=8)
    assert list(a.entries()) != list(c.entries())


def test_random_cochain_exact_denominators():
    c = random_cochain(TRI_COVER, 1, seed=5, exact=True, denominator=16)
    assert c.exact
    for _, _, _, v in c.entries():
        assert isinstance(v, Fraction)
        assert 16 % v.denominator == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_gauge_orbit_always_validates(seed):
    b = random_cochain(TRI_COVER, 1, seed=seed, exact=True)
    c = exact_shift(zero_cochain(TRI_COVER, 2, exact=True), b)
    assert validate_cocycle(c).passed
