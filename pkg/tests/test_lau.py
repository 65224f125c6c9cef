import pytest
from hypothesis import given, settings, strategies as st

from shearwitt.errors import AxiomViolation, CharMismatch, NotAUnit
from shearwitt.finring import get_ring
from shearwitt.lau import (B_to_C_graded, EconFrame, GradedFrame, build_frames,
                           graded_degree_check, lau_contract, lau_expand, roundtrip_check,
                           sw_frame, tildeC_construct, truncated_witt_frame, unit_twist,
                           witt_frame)
from shearwitt.witt import arith


def test_witt_frame_of_fp_is_classical():
    e = witt_frame(get_ring("fp:2"), 3)
    assert e.p_bold == arith(get_ring("fp:2")).from_int(2, 2)
    assert e.check()["ok"]


@pytest.mark.parametrize("key,N", [("zmod:2:2", 3), ("fpk:2:2", 3), ("zmod:3:2", 2)])
def test_witt_frame_roundtrip(key, N):
    assert roundtrip_check(witt_frame(get_ring(key), N))["ok"]


def test_truncated_frame_exhaustive():
    e = truncated_witt_frame(get_ring("fpk:2:2"), 2)
    assert e.check(samples=None)["ok"]
    assert roundtrip_check(e, samples=None)["ok"]


def test_truncated_frame_needs_charp():
    with pytest.raises(CharMismatch):
        truncated_witt_frame(get_ring("zmod:2:2"), 2)


@pytest.mark.parametrize("key", ["zmod:2:2", "fpk:2:2", "zmod:3:2"])
def test_sw_frame(key):
    e = sw_frame(get_ring(key))
    assert e.check()["ok"]
    g = lau_expand(e, 2)
    assert g.check()["ok"]
    assert roundtrip_check(e)["ok"]
    # each graded piece is parametrized by the sheared carrier
    assert all(v == len(e.A0.elements) for v in g.check()["sizes"].values())


def test_expansion_relations():
    e = witt_frame(get_ring("zmod:2:2"), 3)
    g = lau_expand(e, 2)
    A = arith(get_ring("zmod:2:2"))
    for a in e.A0.elements[:10]:
        x = g.lift(-2, a)
        assert x[1] == A.mul(A.mul(e.p_bold, e.p_bold), e.F(a))
    for c in e.A1.elements[:10]:
        y = g.lift(2, c)
        assert y[0] == e.V(A.mul(e.p_bold, c))
    # t u acts on degree 0 as multiplication by V(1)
    tu = g.mul(g.t, g.u)
    assert tu[0] == e.V(e.A1.one)


def test_degree_one_is_A1():
    e = witt_frame(get_ring("zmod:2:2"), 3)
    g = lau_expand(e, 2)
    c = lau_contract(g)
    assert list(c.A1.elements) == list(e.A1.elements)
    assert list(c.A0.elements) == list(e.A0.elements)


def test_broken_frame_raises():
    e = witt_frame(get_ring("zmod:2:2"), 3)
    bad = EconFrame(e.A0, e.A1, e.F, lambda c: e.A0.add(e.V(c), e.A0.one))
    with pytest.raises(AxiomViolation):
        lau_expand(bad, 2)


def test_unit_twist_identity():
    e = witt_frame(get_ring("zmod:2:2"), 3)
    assert unit_twist(e, e.A1.one)["ok"]


def test_unit_twist_minus_one():
    R = get_ring("zmod:2:2")
    A = arith(R)
    e = witt_frame(R, 3)
    assert unit_twist(e, A.teich(3, 2))["ok"]


def test_unit_twist_sw():
    e = sw_frame(get_ring("fpk:2:2"))
    S = e.A1
    assert unit_twist(e, S.neg(S.one))["ok"]


def test_non_unit():
    e = witt_frame(get_ring("zmod:2:2"), 3)
    with pytest.raises(NotAUnit):
        unit_twist(e, arith(get_ring("zmod:2:2")).from_int(2, 2))


@pytest.mark.parametrize("kind", ["graded_cone_A", "graded_cone_B", "graded_cone_C"])
@pytest.mark.parametrize("key", ["fpk:2:2", "fpk:3:2", "fp:2"])
def test_dg_frames(kind, key):
    dg = build_frames(kind, key, window=2)
    assert dg.check()["ok"]
    rep = graded_degree_check(dg)
    assert rep["ok"]


def test_degree_minus_one_u_side_not_required():
    rep = graded_degree_check(build_frames("graded_cone_C", "fpk:2:2"))
    assert rep["ok"] and not rep["degree_-1_vs_u_side"]["quasi_iso"]


def test_dg_frames_need_charp():
    for kind in ("graded_cone_B", "graded_cone_C", "hatW_Fn", "truncated_witt"):
        with pytest.raises(CharMismatch):
            build_frames(kind, "zmod:2:2")


def test_B_to_C_graded():
    rep = B_to_C_graded("fpk:2:2", 1)
    assert rep["ok"]
    assert all(r["surjective"] for r in rep["degrees"].values())


@pytest.mark.parametrize("key", ["fpk:2:2", "fpk:3:2"])
def test_tildeC_exactness(key):
    rep = tildeC_construct(key, 1, window=2)
    assert rep["ok"] and rep["degree0_strictly_larger"]
    for i, r in rep["degrees"].items():
        if i > 0:
            assert r["complex1"]["exact"]
        else:
            assert r["complex2"]["exact"]


def test_tildeC_sequences_fail_outside_range():
    rep = tildeC_construct("fpk:2:2", 1, window=2)
    assert not rep["degrees"][0]["complex1"]["exact"]
    assert not rep["degrees"][1]["complex2"]["exact"]


def test_tildeC_over_fp_is_trivial():
    rep = tildeC_construct("fp:2", 1, window=1)
    assert rep["ok"] and all(r["size"] == r["economic_size"] for r in rep["degrees"].values())


def test_unknown_kind():
    with pytest.raises(ValueError):
        build_frames("nope", "fp:2")


@settings(max_examples=30)
@given(st.integers(-2, 2), st.integers(-2, 2), st.data())
def test_expansion_products_land_in_degree(i, j, data):
    if abs(i + j) > 2:
        return
    e = witt_frame(get_ring("zmod:2:2"), 3)
    g = GradedFrame(e, 2)
    x = data.draw(st.sampled_from(g.component(i)))
    y = data.draw(st.sampled_from(g.component(j)))
    assert g.relation(i + j, g.mul(x, y))
