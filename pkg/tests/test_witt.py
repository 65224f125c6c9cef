import random

import pytest
from hypothesis import given, strategies as st

from shearwitt.errors import LevelTooLarge, NotInHatW
from shearwitt.finring import catalog_keys, get_ring
from shearwitt.witt import (QClass, U, WittVec, arith, hatw, in_hatW, in_hatW_Fk,
                            lambda_AH, q_eq, special_units, teichmuller, tilde_V,
                            tilde_lambda, zp_beta, zp_in_hatW, zp_int, zp_u)

from oracles import oracle_op

RINGS = ["zmod:2:2", "zmod:2:3", "zmod:3:2", "fpk:2:2", "fpk:3:3", "zmodeps:2:2",
         "prod:fp:2+fpk:2:2", "perfstage:2:1"]


def rand_vec(R, N, rnd):
    return tuple(rnd.randrange(R.size) for _ in range(N))


def test_add_example():
    R = get_ring("zmod:2:2")
    one = teichmuller(R.elem(1), 2)
    assert repr(one + one) == "(2,3)"


def test_teichmuller_and_ghost_examples():
    R = get_ring("zmod:3:2")
    assert teichmuller(R.elem(3), 2).comps == (3, 0)
    assert [g.code for g in WittVec.of(R, [0, 1]).ghost()] == [0, 3]


@pytest.mark.parametrize("key", RINGS)
def test_against_integer_lift(key):
    R = get_ring(key)
    A = arith(R)
    rnd = random.Random(key)
    N = 3
    for _ in range(40):
        x, y = rand_vec(R, N, rnd), rand_vec(R, N, rnd)
        assert A.add(x, y) == oracle_op(R, "add", x, y)
        assert A.mul(x, y) == oracle_op(R, "mul", x, y)
        assert A.neg(x) == oracle_op(R, "neg", x)
        assert A.frob(x) == oracle_op(R, "frob", x)
        assert A.delta(x) == oracle_op(R, "delta", x)


@pytest.mark.parametrize("key", RINGS)
def test_teichmuller_multiplicative(key):
    R = get_ring(key)
    A = arith(R)
    for a in range(0, R.size, max(1, R.size // 8)):
        for b in range(0, R.size, max(1, R.size // 8)):
            assert A.mul(A.teich(a, 3), A.teich(b, 3)) == A.teich(R.mul(a, b), 3)
            assert A.frob(A.teich(a, 3)) == A.teich(R.frob(a), 2)
        assert A.delta(A.teich(a, 3)) == (0, 0)


@given(st.sampled_from(RINGS), st.randoms(use_true_random=False))
def test_classical_identities(key, rnd):
    R = get_ring(key)
    A = arith(R)
    N = 3
    x, y = rand_vec(R, N, rnd), rand_vec(R, N + 1, rnd)
    assert A.add(x, (0,) * N) == x
    assert A.frob(A.ver(x)) == A.scalar(R.p, x)
    assert A.mul(A.ver(x), y) == A.ver(A.mul(x, A.frob(y)))
    g = A.ghost(A.add(x, y[:N]))
    assert g == tuple(R.add(a, b) for a, b in zip(A.ghost(x), A.ghost(y[:N])))


@given(st.sampled_from(RINGS), st.randoms(use_true_random=False))
def test_twisted_verschiebung(key, rnd):
    R = get_ring(key)
    A = arith(R)
    N = 3
    su = special_units(R, N)
    x = WittVec(R, rand_vec(R, N, rnd))
    assert tilde_V(x).F() == su.bp * x
    y = WittVec(R, rand_vec(R, N + 1, rnd))
    assert tilde_V(y.F()) == su.Vu * y
    # F^n V~^n = p^n u_n at level N
    z = WittVec(R, rand_vec(R, N, rnd))
    assert tilde_V(tilde_V(z)).F().F() == WittVec(R, A.from_int(R.p ** 2, N)) * su.un(2) * z


def test_char_p_frobenius():
    R = get_ring("fpk:2:2")
    x = WittVec.of(R, [[0, 1], 1])
    assert x.F_charp().comps == (0, 1)
    assert x.F_charp().restrict(1) == x.F()


@pytest.mark.parametrize("p,m,N,expected", [(3, 2, 1, (1,)), (2, 2, 1, (3,))])
def test_u_examples(p, m, N, expected):
    R = get_ring(f"zmod:{p}:{m}")
    assert special_units(R, N).u.comps == expected


@pytest.mark.parametrize("p", [2, 3, 5])
def test_u_classes(p):
    consts = U(p)
    for m in (2, 3):
        assert zp_in_hatW(consts["u"].V() - consts["p"], m)[0]
        assert zp_in_hatW(consts["u"] - consts["1"], m)[0] == (p > 2)
        if p == 2:
            assert zp_in_hatW(consts["u"] - consts["[-1]"], m)[0]


def test_u_is_unit_and_beta_relation():
    for key in ("zmod:2:3", "zmod:3:2", "zmod:5:2"):
        R = get_ring(key)
        su = special_units(R, 3)
        A = arith(R)
        inv = WittVec(R, A.zp(U(R.p)["uinv"], 3))
        assert (su.u * inv).comps == A.from_int(1, 3)
        beta, used = su.beta()
        assert beta.comps == A.zp(zp_beta(R.p), 3)
        # beta = u * F(beta)
        b4 = WittVec(R, A.zp(zp_beta(R.p), 4))
        assert beta == su.u * b4.F()


def test_in_hatW_examples():
    R = get_ring("zmod:2:2")
    assert in_hatW(WittVec.of(R, [2, 2]))
    assert not in_hatW(WittVec.of(R, [1, 0]))
    S = get_ring("fpk:3:3")
    assert in_hatW_Fk(WittVec.of(S, [[0, 1, 0], 0]), 1)


def test_level_too_large():
    R = get_ring("zmod:5:2")
    x = WittVec(R, (1,) * 6)
    with pytest.raises(LevelTooLarge):
        x + x


def test_q_classes():
    F3 = get_ring("fp:3")
    A = arith(F3)
    for x in range(9):
        for y in range(9):
            a = QClass(WittVec(F3, (x % 3, x // 3)))
            b = QClass(WittVec(F3, (y % 3, y // 3)))
            assert q_eq(a, b) == (x == y)
    R = get_ring("fpk:2:2")
    A = arith(R)
    for x in range(16):
        v = (x % 4, x // 4)
        for w in range(16):
            y = (w % 4, w // 4)
            same = q_eq(QClass(WittVec(R, v)), QClass(WittVec(R, y)))
            assert same == (QClass(WittVec(R, v)).key() == QClass(WittVec(R, y)).key())


@pytest.mark.parametrize("key", ["fpk:2:2", "fpk:3:3", "zmod:2:2", "zmod:3:2", "fpk:2:3", "zmod:2:3"])
def test_lambda_homomorphism(key):
    R = get_ring(key)
    H = hatw(R)
    els = H.support_bounded(2)
    rnd = random.Random(3)
    assert H.lam(()) == R.one
    for _ in range(60):
        x, y = rnd.choice(els), rnd.choice(els)
        assert H.lam(H.add(x, y)) == R.mul(H.lam(x), H.lam(y))
        assert H.lam_tilde(H.add(x, y)) == R.mul(H.lam_tilde(x), H.lam_tilde(y))
        assert H.lam_tilde(H.tilde_V(x)) == H.lam_tilde(x)


def test_lambda_public_api():
    R = get_ring("fpk:2:2")
    assert lambda_AH(WittVec(R, (0, 0))).code == R.one
    with pytest.raises(NotInHatW):
        tilde_lambda(WittVec(R, (1, 0)))


@pytest.mark.parametrize("key", ["fpk:2:3", "zmod:2:3", "fpk:3:3", "zmodeps:2:2"])
def test_hatw_engine_matches_truncated(key):
    R = get_ring(key)
    H = hatw(R)
    A = arith(R)
    els = H.support_bounded(2)
    rnd = random.Random(5)
    for _ in range(40):
        x, y = rnd.choice(els), rnd.choice(els)
        for op, ref in ((H.add, A.add), (H.mul, A.mul)):
            z = op(x, y)
            assert H.pad(z, 4) == ref(H.pad(x, 4), H.pad(y, 4))
        assert H.pad(H.frob(x), 3) == A.frob(H.pad(x, 4))
        assert H.pad(H.tilde_V(x), 4) == tilde_V(WittVec(R, H.pad(x, 3))).comps
