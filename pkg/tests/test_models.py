import pytest
from hypothesis import given, settings, strategies as st

from shearwitt.errors import BudgetExceeded, CharMismatch, DeltaPViolation
from shearwitt.finring import get_ring
from shearwitt.models import (DualityModel, berthelot_check, check_G_pairing,
                              check_inclusion_Iprime, check_quasi_ideal, check_Yhat_in_I,
                              compare_naive_cone, cover_for, delta_p, duality_suite, homology,
                              map_At_to_A, map_B_to_A, map_B_to_C, materialize_Inm, model_A,
                              model_Atilde, model_B, model_C, model_G, model_Inm,
                              model_quasi_iso_suite, quotient_iso_Yhat, transition_suite)


@pytest.mark.parametrize("key", ["fpk:2:2", "fpk:3:2", "zmod:2:2", "zmod:3:2"])
def test_models_are_quasi_ideals(key):
    R = get_ring(key)
    for build in (model_A, model_B, model_Atilde):
        mi = build(R, 1, 1)
        assert check_quasi_ideal(mi.q)["ok"], mi.kind


def test_B_homology_is_Z_mod_pn():
    R = get_ring("fpk:2:2")
    for n in (1, 2):
        h = homology(model_B(R, n, 1).q, 2)
        assert h.h0_is_Z_mod() == 2 ** n


def test_B_elements_satisfy_both_conditions():
    R = get_ring("fpk:3:2")
    els, xl, yl = materialize_Inm(R, 1, 0, 1)
    assert (xl, yl) == (2, 1)
    # y = 0 forces F x = 0, i.e. x has nilpotent components
    nil = R.reduction().nil
    assert all(set(x) <= set(nil) for x, y in els if y == (0,))


@pytest.mark.parametrize("key", ["fpk:2:2", "fpk:3:2"])
def test_model_suite_charp(key):
    rep = model_quasi_iso_suite(get_ring(key), 1, 1)
    ba = rep["B_to_A"]
    assert ba["Hm1_injective"] and ba["Hm1_surjective"] and ba["H0_injective"]
    # pointwise the nilpotent part of A^0 is missed; the cover hits it
    assert not ba["H0_surjective"] and ba["H0_locally_surjective"] and ba["quasi_iso"]
    assert rep["At_to_A"]["pointwise_quasi_iso"] and rep["At_to_A"]["surjective"]
    assert rep["B_to_C"]["pointwise_quasi_iso"] and rep["B_to_C"]["surjective"]
    assert rep["naive_vs_pnu"]["H_match"]


def test_model_suite_n2():
    rep = model_quasi_iso_suite(get_ring("fpk:2:2"), 2, 1)
    assert rep["B_to_A"]["quasi_iso"] and rep["At_to_A"]["quasi_iso"]
    assert rep["B_to_C"]["quasi_iso"]
    assert rep["B_to_C"]["source"]["H0_factors"] == [4]


def test_model_suite_z4():
    rep = model_quasi_iso_suite(get_ring("zmod:2:2"), 1, 1)
    assert rep["At_to_A"]["pointwise_quasi_iso"]
    ba = rep["B_to_A"]
    assert ba["Hm1_injective"] and ba["Hm1_surjective"] and ba["H0_injective"]
    assert ba["H0_missed"] > 0 and ba["H0_locally_surjective"] is None
    assert rep["B_to_C"].startswith("skipped")


def test_C_needs_m_for_p2_mixed():
    with pytest.raises(DeltaPViolation):
        model_C(get_ring("zmod:2:2"), 1, 0, 2)
    assert delta_p(2) == 1 and delta_p(3) == 0


def test_C_homology():
    C = model_C(get_ring("fpk:3:2"), 1, 0, 2)
    h = homology(C.q, 3)
    assert h.h0_is_Z_mod() == 3


def test_maps_are_chain_maps():
    R = get_ring("fpk:2:2")
    A, B, At = model_A(R, 1, 1), model_B(R, 1, 1), model_Atilde(R, 1, 1)
    C = model_C(R, 1, 0, 2)
    for f in (map_B_to_A(B, A), map_At_to_A(At, A), map_B_to_C(B, C)):
        f.verify()


def test_cover_ring():
    R = get_ring("fpk:2:2")
    Rc, phi, root = cover_for(R, 1)
    assert Rc.d == 4
    for c in range(R.size):
        assert Rc.pow(root(c), 2) == phi(c)
    assert cover_for(get_ring("zmod:2:2"), 1) is None


@pytest.mark.parametrize("key,n,m,holds", [
    ("zmod:3:2", 1, 0, True), ("zmod:2:2", 1, 1, True), ("zmod:2:2", 1, 0, False),
    ("zmod:2:3", 1, 0, False), ("zmod:2:2", 2, 1, True), ("fpk:2:2", 1, 0, True),
    ("zmod:5:1", 1, 0, True)])
def test_inclusion_Iprime(key, n, m, holds):
    rep = check_inclusion_Iprime(key, n, m)
    assert rep["frobenius_equation"]
    assert rep["inclusion_holds"] == holds and rep["ok"]
    if not holds:
        assert rep["counterexample"] == "1"


def test_inclusion_invisible_at_finite_level():
    rep = check_inclusion_Iprime("zmod:2:2", 1, 0)
    assert rep["finite_level_inclusion"] and not rep["inclusion_holds"]


@pytest.mark.parametrize("key,n,m,S", [("fpk:2:3", 1, 1, 2), ("fpk:2:3", 1, 0, 2),
                                       ("fpk:3:2", 1, 0, 2), ("fpk:2:2", 2, 0, 2)])
def test_quotient_iso_Yhat(key, n, m, S):
    rep = quotient_iso_Yhat(key, n, m, S)
    assert rep["bijective"], rep
    assert rep["domain"] > 1


def test_Yhat_degenerate_domain():
    # with k <= p the Frobenius image is tiny and so is the domain
    rep = quotient_iso_Yhat("fpk:2:2", 1, 1, 3)
    assert rep["bijective"] and rep["domain"] < rep["Yhat"]


def test_Yhat_meets_I_in_nilpotents():
    rep = check_Yhat_in_I("zmod:2:2", 1, 1, 2)
    assert rep["all_nilpotent"] and rep["elements"] > 0


@pytest.mark.parametrize("key,m", [("fpk:2:2", 0), ("fpk:2:2", 1), ("fpk:2:3", 1),
                                   ("fpk:3:2", 1)])
def test_berthelot(key, m):
    rep = berthelot_check(key, m)
    assert rep["descriptions_agree"] and rep["injective"] and rep["onto_targets"]
    assert rep["inverse_ok"] and rep["nonnil_excluded"]


def test_berthelot_charp_only():
    with pytest.raises(CharMismatch):
        berthelot_check("zmod:2:2", 0)


def test_G_is_kernel():
    G = model_G(get_ring("fpk:2:2"), 1, 1).group
    assert len(G) == 8  # first component nilpotent, second free


@pytest.mark.parametrize("key,m", [("fpk:2:2", 0), ("fpk:2:2", 1), ("fpk:3:2", 0)])
def test_G_pairing(key, m):
    rep = check_G_pairing(key, 1, m, 2)
    assert rep["lift_independent"] and rep["coset_independent"]
    assert rep["biadditive"] and rep["FV_adjoint"]


@pytest.mark.parametrize("key", ["fpk:2:2", "zmod:3:2"])
def test_transitions(key):
    rep = transition_suite(key, 1)
    assert rep["chain_map"] and rep["F_equivariant"] and rep["gamma_to_p_gamma"]


def test_transition_tildeV_witness():
    rep = transition_suite("zmod:2:3", 1, 2)
    assert rep["chain_map"] and not rep["tildeV_commutes"]
    assert rep["tildeV_witness"] is not None
    assert transition_suite("fpk:2:2", 1)["tildeV_commutes"]


@pytest.mark.parametrize("key,n", [("fpk:2:2", 1), ("fpk:2:2", 2), ("fpk:3:2", 1)])
def test_duality(key, n):
    rep = duality_suite(key, n, samples=60)
    assert rep["ok"], rep
    # the right square commutes only after raising xi to the p^n
    assert not rep["right_square_plain"]


def test_duality_mixed_unsupported():
    with pytest.raises(CharMismatch):
        DualityModel("zmod:2:2", 1)


@settings(max_examples=25)
@given(st.data())
def test_pairing_adjunction_property(data):
    M = DualityModel("fpk:2:2", 1, S=2)
    X, Y = M.deg0(), M.deg1()
    x, y = data.draw(st.sampled_from(X)), data.draw(st.sampled_from(Y))
    assert M.pair(M.F0(x), y) == M.pair(x, M.V1(y))
    assert M.pair(M.V0(x), y) == M.pair(x, M.F1(y))
    assert M.xi(M.V1(y)) == M.xi(y)


@settings(max_examples=25)
@given(st.data())
def test_pairing_bilinear(data):
    M = DualityModel("fpk:3:2", 1)
    X, Y = M.deg0(), M.deg1()
    x = data.draw(st.sampled_from(X))
    y, z = data.draw(st.sampled_from(Y)), data.draw(st.sampled_from(Y))
    s = (M.A.add(y[0], z[0]), M.H.add(y[1], z[1]))
    R = M.R
    assert M.pair(x, s) == R.mul(M.pair(x, y), M.pair(x, z))


def test_naive_cone_roof():
    rep = compare_naive_cone(get_ring("fpk:2:2"), 1)
    assert rep["E_to_naive"]["pointwise_quasi_iso"]
    assert rep["E_to_pnu"]["H0_missed"] > 0 and rep["E_to_pnu"]["quasi_iso"]
    assert rep["un_over_u_unipotent"] and rep["FnVn_equals_pnu"]


def test_budget():
    with pytest.raises(BudgetExceeded):
        model_Atilde(get_ring("fpk:3:2"), 2, 2, budget=1000)


def test_Inm_general():
    mi = model_Inm(get_ring("zmod:3:2"), 1, 1, 1)
    assert mi.levels["x"] == 3 and check_quasi_ideal(mi.q, mode=300)["ok"]
