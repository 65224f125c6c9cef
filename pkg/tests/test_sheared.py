import random

import pytest
from hypothesis import given, strategies as st

from shearwitt.errors import DepthExhausted, LevelMismatch, NotAdmissible
from shearwitt.finring import get_ring, make_ring
from shearwitt.sheared import (GermQ, SWRing, admissible, check_mu_shadow,
                               check_one_minus_tildeV, check_q_structure, check_q_towers,
                               check_splitting, check_sw_sequences, check_zpn_decomposition,
                               enumerate_towers, pair_from_sw, splitting_s, sw_arith, sw_F,
                               sw_from_pair, sw_make, sw_semiperfect_stage, sw_tildeV,
                               tower_from_top, tower_ops)
from shearwitt.witt import WittVec, arith, special_units

ADMISSIBLE = ["zmod:2:2", "zmod:2:3", "zmod:3:2", "fpk:2:2", "fpk:3:3", "zmodeps:2:2",
              "prod:zmod:2:2+fpk:2:2"]


def test_s_of_one_is_one():
    R = get_ring("zmod:2:2")
    assert splitting_s(WittVec(get_ring("fp:2"), (1, 0)), R).comps == (1, 0)


@pytest.mark.parametrize("key", ["zmod:2:2", "fpk:2:2", "zmod:3:2", "zmod:2:3"])
def test_splitting_is_a_section_and_ring_map(key):
    rep = check_splitting(get_ring(key), 2)
    assert rep["splits_projection"] and rep["multiplicative"] and rep["additive"], rep
    assert rep["sum_is_everything"] and rep["intersection_trivial"]


def test_splitting_exhaustive_z4_level3():
    rep = check_splitting(get_ring("zmod:2:2"), 3)
    assert all(rep[k] for k in ("splits_projection", "multiplicative", "additive",
                                "sum_is_everything", "intersection_trivial"))


def test_splitting_charp_lands_in_constants():
    # over F_2[x]/(x^2) the section takes values in vectors over {0, 1}
    R = get_ring("fpk:2:2")
    ad = admissible(R)
    for a in [(0, 1, 1), (1, 0, 1), (1, 1, 1)]:
        assert set(ad.s(a, 3)) <= {0, R.one}


def test_admissibility_bound():
    # every finite ring is admissible; only the search bound can fail
    from shearwitt.finring import check_admissible
    R = get_ring("fpk:2:4")
    assert check_admissible(R) == 2
    with pytest.raises(NotAdmissible):
        check_admissible(R, bound=1)


def test_field_with_four_elements():
    sc = [[[1, 0], [0, 1]], [[0, 1], [1, 1]]]
    F4 = make_ring(2, 1, sc, [1, 0])
    assert admissible(F4).J == 0
    S = SWRing(F4, 2)
    assert all(x.nil == () for x in S.elements(2))


def test_perfect_ring_has_no_nil_part():
    S = SWRing(get_ring("fp:3"), 2)
    for x in S.elements(3):
        assert x.nil == ()
        assert (x * x).nil == () and x.tilde_V().nil == ()


def test_reduced_level_lower_bound():
    with pytest.raises(LevelMismatch):
        SWRing(get_ring("zmod:2:3"), 1)


@pytest.mark.parametrize("key", ADMISSIBLE)
def test_pair_arithmetic_agrees_with_embedding(key):
    R = get_ring(key)
    S = SWRing.embeddable(R, 2)
    rng = random.Random(7)
    els = S.elements(3)
    for _ in range(40):
        x, y = rng.choice(els), rng.choice(els)
        sw_arith(x, y, "add", 2)
        sw_arith(x, y, "mul", 2)
        sw_F(x, 2)
        sw_tildeV(x, 2)


@pytest.mark.parametrize("key", ADMISSIBLE)
def test_F_tildeV_is_bp(key):
    R = get_ring(key)
    S = SWRing.embeddable(R, 2)
    bp = special_units(R, 2).bp.comps
    A = arith(R)
    rng = random.Random(3)
    for x in rng.sample(S.elements(2), 12):
        lhs = S.embed(S.F(S.tilde_V(x)), 1)
        rhs = A.mul(bp, S.embed(x, 2))[:1]
        assert lhs == rhs


@pytest.mark.parametrize("key", ["zmod:2:2", "fpk:2:2", "zmod:3:2"])
def test_sw_make_roundtrip(key):
    R = get_ring(key)
    S = SWRing.embeddable(R, 2)
    for x in S.elements(2):
        w = WittVec(R, S.embed(x, 2))
        y = sw_make(w, S.L)
        assert S.embed(y, 2) == w.comps


@pytest.mark.parametrize("key", ADMISSIBLE)
def test_pair_tower_converter(key):
    R = get_ring(key)
    S = SWRing.embeddable(R, 2)
    rng = random.Random(5)
    for x in rng.sample(S.elements(2), 10):
        t = pair_from_sw(x, 2, 3)
        assert t.check()
        a, h = sw_from_pair(t, S)
        assert a == x.red[:2] and S.H.pad(h, 2) == S.H.pad(x.nil[:2], 2)
        v = S.tilde_V(x)
        a2, h2 = sw_from_pair(tower_ops(t, "tilde_V"), S, 2)
        assert a2 == v.red[:2] and S.H.pad(h2, 2) == S.H.pad(v.nil[:2], 2)


def test_tower_F_and_F_inv():
    R = get_ring("zmod:2:2")
    A = arith(R)
    top = WittVec(R, (3, 2, 1, 0))
    t = tower_from_top(top, 3)
    assert t.check()
    back = tower_ops(tower_ops(t, "F_inv"), "F")
    assert back.check()
    assert back.entries == t.entries[:2]
    small = tower_ops(tower_ops(t, "F_inv"), "F_inv")
    with pytest.raises(DepthExhausted):
        tower_ops(small, "F_inv")
    assert tower_ops(t, "tilde_V").check()
    assert tower_ops(t, "p_mul").check()
    assert A  # arithmetic object shared with the towers


@pytest.mark.parametrize("key", ["fpk:2:2", "fpk:3:2", "fpk:3:3"])
def test_q_towers(key):
    rep = check_q_towers(get_ring(key))
    assert rep["F_on_Qperf_bijective"]
    assert rep["tildeV_on_TFQ_bijective"]
    assert rep["one_minus_F_on_TFQ_bijective"]


def test_tfq_towers_start_at_zero():
    M = GermQ(get_ring("fpk:2:2"), 2, 2)
    for t in enumerate_towers(M, "TFQ", 3):
        assert t.entries[0] == M.zero() and t.check()


@pytest.mark.parametrize("key", ["fpk:2:2", "fpk:3:2"])
def test_q_structure(key):
    rep = check_q_structure(get_ring(key), N=3)
    assert rep["kerV_zero"]
    assert rep["F_on_Q_mod_VQ"]
    assert rep["Q_mod_VQ_size"] == rep["R_red_size"]
    assert all(ok for _, _, ok in rep["tildeV_on_Q_Fi"])


def test_q_structure_mixed():
    rep = check_q_structure(get_ring("zmod:2:2"), N=3)
    assert rep["kerV_zero"] and rep["F_on_Q_mod_VQ"]


@pytest.mark.parametrize("key", ["fp:2", "fp:3"])
def test_sequences_perfect(key):
    rep = check_sw_sequences(get_ring(key), 2, S=1)
    assert rep["cokernel_count"] == rep["Wn_size"]
    assert rep["tildeVn_injective"] and rep["image_equals_kernel"]


def test_sequences_z4():
    rep = check_sw_sequences(get_ring("zmod:2:2"), 1, L=3, S=2)
    assert rep["tildeVn_injective"] and rep["image_equals_kernel"] and rep["cokernel_is_Wn"]
    assert rep["kerFn_equals_hatW_Fn"]


def test_kernel_of_F2_fpk():
    rep = check_sw_sequences(get_ring("fpk:2:2"), 2, S=2)
    assert rep["kerFn_equals_hatW_Fn"] and rep["kerFn_count"] == rep["hatW_Fn_count"]
    assert rep["cokernel_is_Wn"]


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (2, 3)])
def test_zpn_decomposition(p, n):
    rep = check_zpn_decomposition(p, n)
    assert rep["s_is_canonical"] and rep["direct"] and rep["sum_covers"]
    assert rep["product_size"] == rep["W_N_size"]


def test_semiperfect_stage_trivial():
    rep = sw_semiperfect_stage(2, 0, 2, [0])
    assert rep["stages"][0]["J_size"] == 1 and rep["stages"][0]["quotient_size"] == 4


def test_semiperfect_stage_compatible():
    rep = sw_semiperfect_stage(2, 1, 2, [1, 2])
    assert rep["compatible"]
    for s in rep["stages"]:
        assert s["ideal"] and s["ring_map"] and s["quotient_size"] == s["W_N_R_size"]


@pytest.mark.parametrize("key,S", [("fpk:2:2", 3), ("zmod:2:2", 3), ("zmod:3:3", 2)])
def test_one_minus_tildeV(key, S):
    rep = check_one_minus_tildeV(get_ring(key), S)
    assert rep["injective"] and rep["lambda_kills_image"]
    assert rep["image_is_kernel"] and rep["lambda_onto_1_plus_nil"]


@pytest.mark.parametrize("key,n,S", [("fpk:2:2", 1, 3), ("zmod:3:3", 1, 2), ("zmod:2:3", 2, 2)])
def test_mu_shadow(key, n, S):
    rep = check_mu_shadow(get_ring(key), n, S)
    assert rep["agree"] and rep["image_is_mu"]


def test_mu_shadow_detects_proper_subgroup():
    rep = check_mu_shadow(get_ring("zmod:3:3"), 1, 2)
    assert rep["mu_size"] == 3 and rep["roots_hit"] == 3


@given(st.data())
def test_pair_ring_axioms(data):
    R = get_ring(data.draw(st.sampled_from(["zmod:2:2", "fpk:2:2", "zmodeps:2:2"])))
    S = SWRing(R, 3)
    els = S.elements(2)
    x, y, z = (data.draw(st.sampled_from(els)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y).F() == x.F() + y.F()
    assert (x * y).F() == x.F() * y.F()
    assert (x + y).tilde_V() == x.tilde_V() + y.tilde_V()


@given(st.data())
def test_tildeV_projection_formula(data):
    # V~(x F(y)) = V~(x) y
    R = get_ring(data.draw(st.sampled_from(["zmod:2:2", "fpk:2:2", "zmod:3:2"])))
    S = SWRing(R, 3)
    els = S.elements(2)
    x, y = data.draw(st.sampled_from(els)), data.draw(st.sampled_from(els))
    assert S.tilde_V(x * y.F()) == S.tilde_V(x) * y
