"""Economic frames A0 <-> A1 and their windowed graded expansions.

An economic frame is a ring map F: A0 -> A1 with an additive V: A1 -> A0
such that a V(a') = V(F(a) a') and F V(a') = p a', p := F(V(1)).  Its
expansion is the graded ring whose degree i piece consists of pairs
(a, a') with

    a' = p^(-i) F(a)        for i <= 0
    a  = V(p^(i-1) a')      for i > 0,

multiplied componentwise; t = (1, p) has degree -1, u = (V(1), 1) degree 1.
Only the degrees |i| <= window are materialized.  Graded pieces are
parametrized by a (i <= 0) or a' (i > 0).
"""
import random
from itertools import product as iproduct

from .errors import AxiomViolation, BudgetExceeded, CharMismatch, NotAUnit
from .finring import get_ring
from .models import _ops, _tr, materialize_Inm
from .quasideal import CarrierGroup, Quotient, RingCarrier
from .sheared import SWRing
from .witt import arith

DEFAULT_BUDGET = 10**5
FRAME_KINDS = ("witt", "truncated_witt", "sw", "hatW_Fn", "graded_cone_A", "graded_cone_B",
               "graded_cone_C")


def _pairs(X, Y, samples, rng):
    if samples is None:
        return iproduct(X, Y)
    return ((rng.choice(X), rng.choice(Y)) for _ in range(samples))


def _auto(nx, ny, limit=20000, samples=1500):
    return None if nx * ny <= limit else samples


class EconFrame:
    """A0 --F--> A1, A1 --V--> A0 on finite (or sampled) carriers."""

    def __init__(self, A0, A1, F, V, name="frame"):
        self.A0, self.A1 = A0, A1
        self.F, self.V = F, V
        self.name = name
        self.p_bold = F(V(A1.one))

    def ppow(self, k):
        x = self.A1.one
        for _ in range(k):
            x = self.A1.mul(x, self.p_bold)
        return x

    def check(self, samples="auto", seed=0):
        A0, A1, F, V = self.A0, self.A1, self.F, self.V
        rng = random.Random(seed)
        X, Y = list(A0.elements), list(A1.elements)
        if samples == "auto":
            samples = _auto(len(X), len(Y))
        rep = {"F_unit": F(A0.one) == A1.one}
        wit = None
        laws = {"F_additive": True, "F_multiplicative": True, "V_additive": True,
                "aV": True, "FV_is_p": True}
        for a, b in _pairs(X, X, samples, rng):
            if F(A0.add(a, b)) != A1.add(F(a), F(b)):
                laws["F_additive"] = False
                wit = wit or ("F_additive", a, b)
            if F(A0.mul(a, b)) != A1.mul(F(a), F(b)):
                laws["F_multiplicative"] = False
                wit = wit or ("F_multiplicative", a, b)
        for a, c in _pairs(X, Y, samples, rng):
            if A0.mul(a, V(c)) != V(A1.mul(F(a), c)):
                laws["aV"] = False
                wit = wit or ("aV", a, c)
        for c, e in _pairs(Y, Y, samples, rng):
            if V(A1.add(c, e)) != A0.add(V(c), V(e)):
                laws["V_additive"] = False
                wit = wit or ("V_additive", c, e)
        for c in Y:
            if F(V(c)) != A1.mul(self.p_bold, c):
                laws["FV_is_p"] = False
                wit = wit or ("FV_is_p", c)
        rep.update(laws)
        rep["witness"] = wit
        rep["ok"] = all(v for k, v in rep.items() if k != "witness")
        return rep


class EconModule:
    """An economic module M0 <-> M1 over an economic frame."""

    def __init__(self, base, M0, M1, F, V, act0, act1, name="module"):
        self.base = base
        self.M0, self.M1 = M0, M1
        self.F, self.V = F, V
        self.act0, self.act1 = act0, act1
        self.name = name

    def pmul(self, k, m):
        for _ in range(k):
            m = self.act1(self.base.p_bold, m)
        return m

    def check(self, samples="auto", seed=0):
        B, F, V = self.base, self.F, self.V
        rng = random.Random(seed)
        X, Y = list(B.A0.elements), list(self.M1.elements)
        M0 = list(self.M0.elements)
        if samples == "auto":
            samples = _auto(len(X), max(len(Y), len(M0)))
        rep = {"aV": True, "FV_is_p": True, "F_linear": True, "closed": True}
        wit = None
        for a, m in _pairs(X, Y, samples, rng):
            if self.act0(a, V(m)) != V(self.act1(B.F(a), m)):
                rep["aV"] = False
                wit = wit or ("aV", a, m)
        for a, m in _pairs(X, M0, samples, rng):
            if F(self.act0(a, m)) != self.act1(B.F(a), F(m)):
                rep["F_linear"] = False
                wit = wit or ("F_linear", a, m)
        for m in Y:
            if F(V(m)) != self.act1(B.p_bold, m):
                rep["FV_is_p"] = False
                wit = wit or ("FV_is_p", m)
            if V(m) not in self.M0:
                rep["closed"] = False
                wit = wit or ("V leaves the carrier", m)
        for m in M0:
            if F(m) not in self.M1:
                rep["closed"] = False
                wit = wit or ("F leaves the carrier", m)
        rep["witness"] = wit
        rep["ok"] = all(v for k, v in rep.items() if k != "witness")
        return rep


# -- expansion -------------------------------------------------------------------------

class GradedFrame:
    """The windowed expansion of an economic frame."""

    def __init__(self, econ, window):
        self.econ = econ
        self.window = window
        E = econ
        self.t = (E.A0.one, E.p_bold)
        self.u = (E.V(E.A1.one), E.A1.one)

    def lift(self, i, x):
        E = self.econ
        if i <= 0:
            return (x, E.A1.mul(E.ppow(-i), E.F(x)))
        return (E.V(E.A1.mul(E.ppow(i - 1), x)), x)

    @staticmethod
    def index(i, pair):
        return pair[0] if i <= 0 else pair[1]

    def component(self, i):
        E = self.econ
        src = E.A0.elements if i <= 0 else E.A1.elements
        return [self.lift(i, x) for x in src]

    def relation(self, i, pair):
        return self.lift(i, self.index(i, pair)) == pair

    def mul(self, x, y):
        E = self.econ
        return (E.A0.mul(x[0], y[0]), E.A1.mul(x[1], y[1]))

    def add(self, x, y):
        E = self.econ
        return (E.A0.add(x[0], y[0]), E.A1.add(x[1], y[1]))

    def neg(self, x):
        E = self.econ
        return (E.A0.neg(x[0]), E.A1.neg(x[1]))

    def zero(self):
        return (self.econ.A0.zero, self.econ.A1.zero)

    def one(self):
        return (self.econ.A0.one, self.econ.A1.one)

    def check(self, samples=300, seed=0):
        """Axioms (u and t bijective in their ranges), closure and associativity."""
        w = self.window
        rng = random.Random(seed)
        comps = {i: self.component(i) for i in range(-w, w + 1)}
        rep = {"t_in_degree_-1": self.relation(-1, self.t), "u_in_degree_1": self.relation(1, self.u)}
        wit = None
        u_ok = True
        for i in range(1, w):
            img = [self.mul(self.u, x) for x in comps[i]]
            if not all(self.relation(i + 1, y) for y in img) or \
                    len({self.index(i + 1, y) for y in img}) != len(comps[i + 1]):
                u_ok = False
                wit = wit or ("u", i)
        t_ok = True
        for i in range(-w + 1, 1):
            img = [self.mul(self.t, x) for x in comps[i]]
            if not all(self.relation(i - 1, y) for y in img) or \
                    len({self.index(i - 1, y) for y in img}) != len(comps[i - 1]):
                t_ok = False
                wit = wit or ("t", i)
        closed = True
        assoc = True
        degs = list(comps)
        for _ in range(samples):
            i, j = rng.choice(degs), rng.choice(degs)
            if abs(i + j) > w:
                continue
            x, y = rng.choice(comps[i]), rng.choice(comps[j])
            if not self.relation(i + j, self.mul(x, y)):
                closed = False
                wit = wit or ("closure", i, j, x, y)
            k = rng.choice(degs)
            z = rng.choice(comps[k])
            if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)):
                assoc = False
        rep.update({"u_bijective": u_ok, "t_bijective": t_ok, "closed": closed,
                    "associative": assoc, "sizes": {i: len(c) for i, c in comps.items()},
                    "witness": wit})
        rep["ok"] = all(v for k, v in rep.items() if isinstance(v, bool))
        return rep

    def describe(self):
        return {"window": self.window, "frame": self.econ.name,
                "sizes": {str(i): len(self.econ.A0.elements if i <= 0 else self.econ.A1.elements)
                          for i in range(-self.window, self.window + 1)},
                "t": repr(self.t), "u": repr(self.u), "p": repr(self.econ.p_bold)}


class GradedModule:
    """The windowed expansion of an economic module."""

    def __init__(self, emod, window):
        self.emod = emod
        self.window = window

    def lift(self, i, m):
        E = self.emod
        if i <= 0:
            return (m, E.pmul(-i, E.F(m)))
        return (E.V(E.pmul(i - 1, m)), m)

    index = staticmethod(GradedFrame.index)

    def component(self, i):
        src = self.emod.M0.elements if i <= 0 else self.emod.M1.elements
        return [self.lift(i, m) for m in src]

    def relation(self, i, pair):
        return self.lift(i, self.index(i, pair)) == pair

    def act(self, a, m):
        return (self.emod.act0(a[0], m[0]), self.emod.act1(a[1], m[1]))

    def add(self, x, y):
        return (self.emod.M0.add(x[0], y[0]), self.emod.M1.add(x[1], y[1]))

    def neg(self, x):
        return (self.emod.M0.neg(x[0]), self.emod.M1.neg(x[1]))

    def zero(self):
        return (self.emod.M0.zero, self.emod.M1.zero)


def lau_expand(e, window=2, check=True):
    if check:
        rep = e.check()
        if not rep["ok"]:
            raise AxiomViolation(f"economic frame {e.name}", rep["witness"])
    return GradedFrame(e, window)


class _Contracted:
    """Ring structure on a graded piece, read off from a graded frame."""

    def __init__(self, g, i, name):
        self.g, self.i = g, i
        self.elements = [g.index(i, x) for x in g.component(i)]
        self.index = {x: k for k, x in enumerate(self.elements)}
        self.name = name
        self.zero = g.index(i, g.zero())
        # the unit of degree 0, and u for degree 1
        self.one = g.index(0, g.one()) if i == 0 else g.index(1, g.u)

    def __contains__(self, x):
        return x in self.index

    def add(self, x, y):
        g, i = self.g, self.i
        return g.index(i, g.add(g.lift(i, x), g.lift(i, y)))

    def neg(self, x):
        g, i = self.g, self.i
        return g.index(i, g.neg(g.lift(i, x)))

    def mul(self, x, y):
        g, i = self.g, self.i
        prod = g.mul(g.lift(i, x), g.lift(i, y))
        if i == 0:
            return g.index(0, prod)
        # prod lies in degree 2; undo multiplication by u
        return g.index(2, prod)


def lau_contract(g):
    """Degree 0 and degree 1 with the u-untwisted product, F = u., V = t."""
    if g.window < 2:
        raise ValueError("contraction reads degree 2, use window >= 2")
    A0 = _Contracted(g, 0, "A0")
    A1 = _Contracted(g, 1, "A1")

    def F(a):
        return g.index(1, g.mul(g.lift(0, a), g.u))

    def V(c):
        return g.index(0, g.mul(g.lift(1, c), g.t))

    return EconFrame(A0, A1, F, V, name=f"contract({g.econ.name})")


def roundtrip_check(e, window=2, samples="auto", seed=0):
    """contract(expand(e)) = e on the nose, and expand(contract(g)) = g per degree."""
    g = lau_expand(e, window)
    c = lau_contract(g)
    rng = random.Random(seed)
    X, Y = list(e.A0.elements), list(e.A1.elements)
    if samples == "auto":
        samples = _auto(len(Y), len(Y))
    same = {
        "A0": list(c.A0.elements) == X,
        "A1": list(c.A1.elements) == Y,
        "F": all(c.F(a) == e.F(a) for a in X),
        "V": all(c.V(b) == e.V(b) for b in Y),
        "A0_mul": all(c.A0.mul(a, b) == e.A0.mul(a, b) for a, b in _pairs(X, X, samples, rng)),
        "A1_mul": all(c.A1.mul(a, b) == e.A1.mul(a, b) for a, b in _pairs(Y, Y, samples, rng)),
        "p": c.p_bold == e.p_bold,
    }
    g2 = GradedFrame(c, window)
    same["reexpand"] = all(g2.component(i) == g.component(i)
                           for i in range(-window, window + 1))
    same["contracted_laws"] = c.check(samples=samples if samples else None, seed=seed)["ok"]
    same["ok"] = all(same.values())
    return same


def _find_inverse(A1, alpha):
    for b in A1.elements:
        if A1.mul(alpha, b) == A1.one:
            return b
    raise NotAUnit(f"{alpha!r} has no inverse in {getattr(A1, 'name', 'A1')}")


def unit_twist(e, alpha, window=2, samples=300, seed=0):
    """Expansion with V' = V(alpha .) is the expansion of e with u replaced by alpha u.

    The isomorphism sends (a, a') in degree i to (a, alpha^i a').
    """
    A1 = e.A1
    inv = _find_inverse(A1, alpha)
    e2 = EconFrame(e.A0, A1, e.F, lambda c: e.V(A1.mul(alpha, c)), name=f"{e.name}*alpha")
    rep2 = e2.check()
    g, g2 = lau_expand(e, window), GradedFrame(e2, window)

    def apow(i):
        x, b = A1.one, (alpha if i >= 0 else inv)
        for _ in range(abs(i)):
            x = A1.mul(x, b)
        return x

    def phi(i, x):
        return (x[0], A1.mul(apow(i), x[1]))

    rng = random.Random(seed)
    bij = True
    for i in range(-window, window + 1):
        img = [phi(i, x) for x in g2.component(i)]
        if not all(g.relation(i, y) for y in img) or len(set(img)) != len(img) \
                or len(img) != len(g.component(i)):
            bij = False
    mult = True
    degs = list(range(-window, window + 1))
    for _ in range(samples):
        i, j = rng.choice(degs), rng.choice(degs)
        if abs(i + j) > window:
            continue
        x, y = rng.choice(g2.component(i)), rng.choice(g2.component(j))
        if phi(i + j, g2.mul(x, y)) != g.mul(phi(i, x), phi(j, y)):
            mult = False
    t_ok = phi(-1, g2.t) == g.t
    u_ok = phi(1, g2.u) == g.lift(1, alpha)
    out = {"twisted_frame_ok": rep2["ok"], "degreewise_bijective": bij, "multiplicative": mult,
           "t_to_t": t_ok, "u_to_alpha_u": u_ok}
    out["ok"] = all(out.values())
    return out


# -- DG frames -------------------------------------------------------------------------

class GradedDGFrame:
    """Expansion of a two-term complex I -> A of economic objects, degree by degree."""

    def __init__(self, base, mod, d, window, name="dg"):
        self.base = GradedFrame(base, window)
        self.mod = GradedModule(mod, window)
        self.d = d
        self.window = window
        self.name = name

    def dpair(self, m):
        return (self.d(m[0]), self.d(m[1]))

    def complex(self, i):
        """(source group, target group, differential) in graded degree i."""
        b, m = self.base, self.mod
        src = CarrierGroup(m.component(i), m.add, m.neg, m.zero(), name=f"I_{i}")
        tgt = CarrierGroup(b.component(i), b.add, b.neg, b.zero(), name=f"A_{i}")
        return src, tgt, self.dpair

    def check(self, samples=200, seed=0):
        rng = random.Random(seed)
        w = self.window
        rep = {"base": self.base.check(samples, seed)["ok"],
               "base_laws": self.base.econ.check()["ok"],
               "module_laws": self.mod.emod.check()["ok"]}
        d_ok = True
        for i in range(-w, w + 1):
            for m in self.mod.component(i):
                if not self.base.relation(i, self.dpair(m)):
                    d_ok = False
        rep["d_preserves_grading"] = d_ok
        lin = True
        law = True
        degs = list(range(-w, w + 1))
        for _ in range(samples):
            i, j = rng.choice(degs), rng.choice(degs)
            if abs(i + j) > w:
                continue
            a = rng.choice(self.base.component(i))
            x, y = rng.choice(self.mod.component(j)), rng.choice(self.mod.component(i))
            ax = self.mod.act(a, x)
            if not self.mod.relation(i + j, ax):
                lin = False
            if self.dpair(ax) != self.base.mul(a, self.dpair(x)):
                lin = False
            if self.mod.act(self.dpair(y), x) != self.mod.act(self.dpair(x), y):
                law = False
        rep["linear"] = lin
        rep["quasi_ideal_law"] = law
        rep["ok"] = all(rep.values())
        return rep


def complex_homology(src, tgt, d):
    """H^-1 = ker d and H0 = coker d of a map of finite groups."""
    ker = [x for x in src.elements if d(x) == tgt.zero]
    img = sorted({d(x) for x in src.elements}, key=repr)
    return ker, Quotient(tgt, img)


def homology_iso(c1, c2, f0, f1):
    """Whether (f0, f1) from complex c1 to complex c2 is bijective on H^-1 and H0."""
    s1, t1, d1 = c1
    s2, t2, d2 = c2
    chain = all(f0(d1(x)) == d2(f1(x)) for x in s1.elements)
    k1, q1 = complex_homology(s1, t1, d1)
    k2, q2 = complex_homology(s2, t2, d2)
    hm1 = {f1(x) for x in k1}
    hm1_bij = len(hm1) == len(k1) == len(k2) and hm1 <= set(k2)
    h0 = {}
    for a in t1.elements:
        h0.setdefault(q1.cls(a), set()).add(q2.cls(f0(a)))
    well = all(len(v) == 1 for v in h0.values())
    vals = [next(iter(v)) for v in h0.values()]
    h0_bij = well and len(set(vals)) == len(q1) == len(q2)
    return {"chain_map": chain, "Hm1": [len(k1), len(k2)], "H0": [len(q1), len(q2)],
            "Hm1_bijective": hm1_bij, "H0_bijective": h0_bij,
            "quasi_iso": chain and hm1_bij and h0_bij}


def graded_degree_check(dg, window=None):
    """Compare degree i with the u-side (i > 0) and the t-side (i <= 0).

    The u-side of a degree-i pair is a', the t-side is a; both are complexes
    M1 -> A1 and M0 -> A0.  Degree -1 against the u-side is only logged.
    """
    w = window or dg.window
    E, M = dg.base.econ, dg.mod.emod
    u_side = (CarrierGroup(M.M1.elements, M.M1.add, M.M1.neg, M.M1.zero),
              CarrierGroup(E.A1.elements, E.A1.add, E.A1.neg, E.A1.zero), dg.d)
    t_side = (CarrierGroup(M.M0.elements, M.M0.add, M.M0.neg, M.M0.zero),
              CarrierGroup(E.A0.elements, E.A0.add, E.A0.neg, E.A0.zero), dg.d)
    degrees = {}
    ok = True
    for i in range(-w, w + 1):
        c = dg.complex(i)
        if i > 0:
            r = homology_iso(c, u_side, lambda x: x[1], lambda x: x[1])
            r["side"] = "u"
            ok = ok and r["quasi_iso"]
        else:
            r = homology_iso(c, t_side, lambda x: x[0], lambda x: x[0])
            r["side"] = "t"
            ok = ok and r["quasi_iso"]
        degrees[i] = r
    logged = homology_iso(dg.complex(-1), u_side, lambda x: x[1], lambda x: x[1]) if w >= 1 \
        else None
    return {"degrees": degrees, "ok": ok, "degree_-1_vs_u_side": logged}


# -- concrete frames ---------------------------------------------------------------------

def _witt_carrier(R, N, budget):
    A = arith(R)
    if R.size ** N > budget:
        raise BudgetExceeded(R.size ** N, budget)
    els = list(iproduct(range(R.size), repeat=N))
    return RingCarrier(els, A.add, A.neg, (0,) * N, A.mul, A.from_int(1, N), name=f"W_{N}")


def witt_frame(R, N, budget=DEFAULT_BUDGET):
    """W_N(R) --F--> W_(N-1)(R) with V back up; p is p."""
    o = _ops(R)
    A0, A1 = _witt_carrier(R, N, budget), _witt_carrier(R, N - 1, budget)
    F = (lambda x: o.Fn(x, 1)[:N - 1]) if R.char_p else (lambda x: o.A.frob(x))
    return EconFrame(A0, A1, F, lambda c: (0,) + tuple(c), name=f"W_{N}({R.name})")


def truncated_witt_frame(R, n, budget=DEFAULT_BUDGET):
    if not R.char_p:
        raise CharMismatch("the truncated Witt frame needs an F_p-algebra")
    o = _ops(R)
    A = _witt_carrier(R, n, budget)
    return EconFrame(A, A, lambda x: o.Fn(x, 1), lambda c: _tr((0,) + tuple(c), n),
                     name=f"W_{n}({R.name})")


def sw_frame(R, L=None, S=1, budget=DEFAULT_BUDGET):
    """The sheared ring with F and V~ on elements of nilpotent support < S."""
    Sw = SWRing(R, L)
    els = Sw.elements(S, budget)
    A = RingCarrier(els, Sw.add, Sw.neg, Sw.zero(), Sw.mul, Sw.one(), name="SW")
    return EconFrame(A, A, Sw.F, Sw.tilde_V, name=f"SW({R.name})")


def hatW_Fn_module(R, n, N, base, budget=DEFAULT_BUDGET):
    """ker(F^n) on W_N(R) as a module over the truncated Witt frame W_n."""
    o = _ops(R)
    A = o.A
    nil = sorted(R.reduction().nil)
    if len(nil) ** N > budget:
        raise BudgetExceeded(len(nil) ** N, budget)
    els = [h for h in iproduct(nil, repeat=N) if not any(o.Fn(h, n))]
    K = CarrierGroup(els, A.add, A.neg, (0,) * N, name=f"W^(F^{n})_{N}")

    def act(a, h):
        return A.mul(_tr(a, N), h)

    return EconModule(base, K, K, lambda h: o.Fn(h, 1), lambda h: _tr((0,) + tuple(h), N),
                      act, act, name=K.name)


def graded_cone_C(R, n, N=None, window=2, budget=DEFAULT_BUDGET):
    """W^(F^n) -> W_n, with W^ cut at level N >= n."""
    N = N or n + 1
    base = truncated_witt_frame(R, n, budget)
    mod = hatW_Fn_module(R, n, N, base, budget)
    return GradedDGFrame(base, mod, lambda h: tuple(h[:n]), window, name=f"C_{n}")


def graded_cone_B(R, n, L=1, window=2, budget=DEFAULT_BUDGET):
    if not R.char_p:
        raise CharMismatch("B is expanded over F_p-algebras")
    o = _ops(R)
    A = o.A
    base = truncated_witt_frame(R, L + n, budget)
    els, xl, yl = materialize_Inm(R, n, 0, L, budget)
    add = lambda a, b: (A.add(a[0], b[0]), A.add(a[1], b[1]))
    neg = lambda a: (A.neg(a[0]), A.neg(a[1]))
    I = CarrierGroup(els, add, neg, ((0,) * xl, (0,) * yl), name=f"I_{n}")

    def F(e):
        return (o.Fn(e[0], 1), o.Fn(e[1], 1))

    def V(e):
        return (_tr((0,) + e[0], xl), _tr((0,) + e[1], yl))

    def act(a, e):
        return (A.mul(a, e[0]), A.mul(_tr(o.Fn(a, n), yl), e[1]))

    mod = EconModule(base, I, I, F, V, act, act, name=I.name)
    return GradedDGFrame(base, mod, lambda e: e[0], window, name=f"B_{n}")


def graded_cone_A(R, n, L=1, window=2, budget=DEFAULT_BUDGET):
    """A_n over an F_p-algebra with F and V (= V~ in characteristic p)."""
    if not R.char_p:
        raise CharMismatch("A is expanded here over F_p-algebras")
    from .models import model_A
    o = _ops(R)
    A, Ar = o.A, o.Ar
    mi = model_A(R, n, L, budget)
    A0, Am1 = mi.q.A, mi.q.I
    wl, ql = mi.levels["w"], mi.levels["q"]
    Rr = o.Rred

    def F0(x):
        return (o.Fn(x[0], 1), tuple(Rr.frob(c) for c in x[1]))

    def V0(x):
        return (_tr((0,) + x[0], wl), _tr((0,) + x[1], ql))

    base = EconFrame(A0, A0, F0, V0, name=f"A_{n}^0")
    mod = EconModule(base, Am1, Am1, lambda y: o.Fn(y, 1), lambda y: _tr((0,) + y, L),
                     mi.q.act, mi.q.act, name=f"A_{n}^-1")
    return GradedDGFrame(base, mod, mi.q.d, window, name=f"A_{n}")


def build_frames(kind, R, window=2, budget=DEFAULT_BUDGET, **params):
    if isinstance(R, str):
        R = get_ring(R)
    if kind == "witt":
        return lau_expand(witt_frame(R, params.get("N", 3), budget), window)
    if kind == "truncated_witt":
        return lau_expand(truncated_witt_frame(R, params.get("n", 2), budget), window)
    if kind == "sw":
        return lau_expand(sw_frame(R, params.get("L"), params.get("S", 1), budget), window)
    if kind == "hatW_Fn":
        if not R.char_p:
            raise CharMismatch("hatW_Fn is built over F_p-algebras")
        n = params.get("n", 1)
        base = truncated_witt_frame(R, n, budget)
        return GradedModule(hatW_Fn_module(R, n, params.get("N", n + 1), base, budget), window)
    if kind == "graded_cone_A":
        return graded_cone_A(R, params.get("n", 1), params.get("L", 1), window, budget)
    if kind == "graded_cone_B":
        return graded_cone_B(R, params.get("n", 1), params.get("L", 1), window, budget)
    if kind == "graded_cone_C":
        if not R.char_p:
            raise CharMismatch("C is expanded over F_p-algebras")
        return graded_cone_C(R, params.get("n", 1), params.get("N"), window, budget)
    raise ValueError(f"unknown frame kind {kind!r}; expected one of {FRAME_KINDS}")


def B_to_C_graded(R, n=1, L=1, window=2, budget=DEFAULT_BUDGET):
    """B -> C expanded degree-wise; each degree should be a quasi-isomorphism."""
    if isinstance(R, str):
        R = get_ring(R)
    B = graded_cone_B(R, n, L, window, budget)
    C = graded_cone_C(R, n, L + n, window, budget)
    A = arith(R)

    def g0(x):
        return tuple(x[:n])

    def g1(e):
        x, y = e
        return A.sub(x, _tr((0,) * n + tuple(y), len(x)))

    out = {}
    for i in range(-window, window + 1):
        out[i] = homology_iso(B.complex(i), C.complex(i), lambda p: (g0(p[0]), g0(p[1])),
                              lambda m: (g1(m[0]), g1(m[1])))
        out[i]["surjective"] = ({(g0(p[0]), g0(p[1])) for p in B.complex(i)[1].elements}
                                == set(C.complex(i)[1].elements))
    return {"degrees": out, "ok": all(r["quasi_iso"] for r in out.values())}


# -- the tilde-C construction ------------------------------------------------------------

def tildeC_construct(R, n=1, N=None, window=2, budget=DEFAULT_BUDGET):
    """Tilde C for the input W^(F^n) -> W_n over an F_p-algebra.

    In degree i it is the pushout of C_i <- (W^(F^n))_i -> I x I: triples
    (c, h_u, h_t) modulo (d h, -h', -h) for (h, h') in the expanded module.
    The maps to C[u, 1/u] and C[t, 1/t] send (c, h_u, h_t) to c' + d h_u and
    c + d h_t.  Checks both short sequences in their degree ranges, logs the
    others, and compares the economic row with the pushout row.
    """
    if isinstance(R, str):
        R = get_ring(R)
    dg = graded_cone_C(R, n, N, window, budget)
    E, M = dg.base.econ, dg.mod.emod
    K = M.M0
    Wn = E.A0
    d = dg.d
    Kz = K.zero
    out = {"ring": R.name, "n": n, "window": window, "degrees": {}}
    ok = True
    for i in range(-window, window + 1):
        base_i = dg.base.component(i)
        mod_i = dg.mod.component(i)
        trip = [(c, hu, ht) for c in base_i for hu in K.elements for ht in K.elements]
        if len(trip) > budget:
            raise BudgetExceeded(len(trip), budget)
        tadd = lambda x, y: (dg.base.add(x[0], y[0]), K.add(x[1], y[1]), K.add(x[2], y[2]))
        tneg = lambda x: (dg.base.neg(x[0]), K.neg(x[1]), K.neg(x[2]))
        T = CarrierGroup(trip, tadd, tneg, (dg.base.zero(), Kz, Kz))
        rel = sorted({(dg.dpair(h), K.neg(h[1]), K.neg(h[0])) for h in mod_i}, key=repr)
        Ct = Quotient(T, rel)
        to_u = lambda x: Wn.add(x[0][1], d(x[1]))
        to_t = lambda x: Wn.add(x[0][0], d(x[2]))
        from_t = lambda h: Ct.cls((dg.base.zero(), Kz, h))
        from_u = lambda h: Ct.cls((dg.base.zero(), h, Kz))

        def seq(inc, proj):
            # proj must be constant on classes
            well = True
            val = {}
            for x in trip:
                c = Ct.cls(x)
                v = proj(x)
                if val.setdefault(c, v) != v:
                    well = False
            inj = len({inc(h) for h in K.elements}) == len(K)
            image = {inc(h) for h in K.elements}
            kernel = {c for c, v in val.items() if v == Wn.zero}
            onto = set(val.values()) == set(Wn.elements)
            return {"well_defined": well, "injective": inj, "middle_exact": image == kernel,
                    "surjective": onto,
                    "exact": well and inj and image == kernel and onto}

        s1 = seq(from_t, to_u)
        s2 = seq(from_u, to_t)
        # economic row -> pushout row, as a map of two-term complexes
        src = (CarrierGroup(mod_i, dg.mod.add, dg.mod.neg, dg.mod.zero()),
               CarrierGroup(base_i, dg.base.add, dg.base.neg, dg.base.zero()), dg.dpair)
        pairs_II = [(a, b) for a in K.elements for b in K.elements]
        II = CarrierGroup(pairs_II, lambda x, y: (K.add(x[0], y[0]), K.add(x[1], y[1])),
                          lambda x: (K.neg(x[0]), K.neg(x[1])), (Kz, Kz))
        tgt = (II, Ct.group, lambda h: Ct.cls((dg.base.zero(), h[0], h[1])))
        qi = homology_iso(src, tgt, lambda c: Ct.cls((c, Kz, Kz)), lambda h: (h[1], h[0]))
        rec = {"size": len(Ct), "economic_size": len(base_i), "complex1": s1,
               "complex2": s2, "rows_quasi_iso": qi["quasi_iso"]}
        if i > 0:
            ok = ok and s1["exact"]
        else:
            ok = ok and s2["exact"]
        ok = ok and qi["quasi_iso"]
        out["degrees"][i] = rec
    out["ok"] = ok
    out["degree0_strictly_larger"] = out["degrees"][0]["size"] > out["degrees"][0]["economic_size"]
    return out
