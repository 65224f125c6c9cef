"""Sheared Witt vectors of admissible finite rings.

For an admissible ring R (perfect R_red, nilpotents killed mod p by a power
of Frobenius) the sheared ring is s(W(R_red)) + (nilpotent part), where s is
the multiplicative section obtained from Frobenius twisted lifts.

Two finite models are used.  The *semidirect* model stores an element as a
pair (a, h) with a in W_L(R_red) and h a finitely supported vector with
nilpotent components, which is exact in the nilpotent part; the level L is
chosen so that p^L kills every nilpotent Witt vector, which makes
V^L W(R_red) an ideal and the pair arithmetic well defined.  The *tower*
model stores a pair (x, (y_0, y_1, ...)) in the fibre product of W with its
Frobenius limit and is evaluated at a fixed level.  The converter between
them is part of the test suite.
"""
from itertools import product as iproduct

from .errors import (BudgetExceeded, CharMismatch, DecompositionFailure, DepthExhausted,
                     LevelMismatch, LevelTooLarge, NoStabilization, NotAdmissible)
from .finring import check_admissible, get_ring, perfstage, is_perfect
from .witt import (U, WittVec, _trim, arith, fcomps, hatw, un_const)

DEFAULT_BUDGET = 10**6


# -- admissibility data ------------------------------------------------------------

class Admissible:
    """Everything about R needed to split W(R) -> W(R_red)."""

    def __init__(self, R, bound=8):
        self.R = R
        self.p = R.p
        self.kill = check_admissible(R, bound)
        self.red = R.reduction()
        self.Rred = self.red.Rred
        Rr = self.Rred
        finv = [0] * Rr.size
        for a in range(Rr.size):
            finv[Rr.frob(a)] = a
        self.finv = finv
        self.H = hatw(R)
        self._s = {}
        self._eW = None
        self._eN = {}

    @property
    def J(self):
        return self.H.J

    def frob_inv(self, a, k=1):
        for _ in range(k):
            a = tuple(self.finv[c] for c in a)
        return a

    def frob_red(self, a, k=1):
        Rr = self.Rred
        for _ in range(k):
            a = tuple(Rr.frob(c) for c in a)
        return a

    def proj(self, w):
        return tuple(self.red.proj(c) for c in w)

    @property
    def e_W(self):
        """Smallest e with p^e killing every nilpotent Witt vector."""
        if self._eW is None:
            H = self.H
            gens = [(a,) for a in sorted(self.red.nil) if a]
            e = 0
            for e in range(64):
                if all(not H.scalar(self.p ** e, g) for g in gens):
                    break
            else:
                raise NoStabilization("p-power torsion of nilpotent vectors not reached")
            # V^i[a] is killed by the same power as [a]
            self._eW = e
        return self._eW

    def e_N(self, N):
        """Exponent of the additive group of W_N(R)."""
        if N not in self._eN:
            A = arith(self.R)
            one = A.from_int(1, N)
            x, e = one, 0
            while any(x):
                x = A.scalar(self.p, x)
                e += 1
                if e > 64:
                    raise NoStabilization("exponent of W_N(R) not found")
            self._eN[N] = e
        return self._eN[N]

    def s(self, a, N, cap=12):
        """s(a)|_N for a in W(R_red) given by finitely many components (zero padded)."""
        a = tuple(a)
        key = (a, N)
        hit = self._s.get(key)
        if hit is not None:
            return hit
        R, A, lift = self.R, arith(self.R), self.red.lift

        def twisted(k):
            M = N if R.char_p else N + k
            b = self.frob_inv(a, k)
            y = tuple(lift(c) for c in b[:M]) + (0,) * max(0, M - len(b))
            for _ in range(k):
                y = A.frob_charp(y) if R.char_p else A.frob(y)
            return y

        # two lifts differ by a vector of nilpotents, which F^J kills, so
        # J twists suffice; one more twist (when the cache allows) confirms it
        k = self.J
        if k > cap:
            raise NoStabilization(f"s needs {k} Frobenius twists, cap is {cap}")
        try:
            y = twisted(k)
        except (LevelMismatch, LevelTooLarge):
            raise NoStabilization(f"s at level {N} needs {k} twists beyond the polynomial cache")
        if R.char_p or N + k + 1 <= _cache_level(self.p) + 1:
            if twisted(k + 1) != y:
                raise NoStabilization(f"s not stationary after {k} twists")
        self._s[key] = y
        return y


_ADM = {}


def admissible(R):
    key = id(R)
    if key not in _ADM:
        _ADM[key] = (Admissible(R), R)
    return _ADM[key][0]


def splitting_s(x, R, N=None, cap=12):
    """The section s: W(R_red) -> W(R) applied to x, returned at level N.

    x is read as a Witt vector with zero components beyond its level.  In
    mixed characteristic s(x)|_N can depend on those higher components, so
    the padding is part of the input.
    """
    ad = admissible(R)
    comps = x.comps if isinstance(x, WittVec) else tuple(x)
    N = len(comps) if N is None else N
    return WittVec(R, ad.s(comps, N, cap))


# -- the semidirect model --------------------------------------------------------------

class SWRing:
    """The sheared ring of R truncated in the reduced direction at level L."""

    def __init__(self, R, L=None):
        self.R = R
        self.ad = ad = admissible(R)
        self.H = ad.H
        self.p = R.p
        self.Rred = ad.Rred
        self.Ared = arith(ad.Rred)
        lo = max(ad.e_W, ad.J, 1)
        self.L = lo if L is None else L
        if self.L < lo:
            raise LevelMismatch(f"reduced level must be at least {lo}")
        self.J = ad.J
        self._ps = None

    @classmethod
    def embeddable(cls, R, N):
        """The smallest truncation whose elements have a well defined image in W_N(R)."""
        ad = admissible(R)
        return cls(R, max(ad.e_W, ad.J, ad.e_N(N), 1))

    def __repr__(self):
        return f"SWRing({self.R.name}, L={self.L})"

    # elements
    def elem(self, a=None, h=()):
        a = tuple(a or ())
        a = (a + (0,) * self.L)[:self.L]
        return SWElem(self, a, _trim(h))

    def zero(self):
        return self.elem()

    def one(self):
        return self.elem(self.Ared.from_int(1, self.L))

    def s_head(self, a, M=None):
        """Leading components of s(a) as needed for products with nilpotent vectors."""
        M = max(self.J, 1) if M is None else M
        return self.ad.s(a, M)

    def _p_teich_s(self, a):
        # [p] * s(a); only components i with p^(p^i) != 0 survive
        R, H = self.R, self.H
        pe = R.from_int(self.p)
        M = 0
        while R.pow(pe, self.p ** M) != 0:
            M += 1
        if M == 0:
            return ()
        y = self.ad.s(a, M)
        return H.teich_mul(pe, y)

    # arithmetic
    def add(self, x, y):
        Ar = self.Ared
        return SWElem(self, Ar.add(x.red, y.red), self.H.add(x.nil, y.nil))

    def neg(self, x):
        return SWElem(self, self.Ared.neg(x.red), self.H.neg(x.nil))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        H = self.H
        a = self.Ared.mul(x.red, y.red)
        h = H.add(H.wmul(self.s_head(x.red), y.nil), H.wmul(self.s_head(y.red), x.nil))
        h = H.add(h, H.mul(x.nil, y.nil))
        return SWElem(self, a, h)

    def F(self, x):
        return SWElem(self, self.ad.frob_red(x.red), self.H.frob(x.nil))

    def tilde_V(self, x):
        """V(u x); on s(a) this is s(Va) - [p] s(F^{-1} a)."""
        H = self.H
        Va = ((0,) + x.red)[:self.L]
        corr = self._p_teich_s(self.ad.frob_inv(x.red))
        return SWElem(self, Va, H.sub(H.tilde_V(x.nil), corr))

    def tilde_V_n(self, x, n):
        for _ in range(n):
            x = self.tilde_V(x)
        return x

    # embedding into W_N(R)
    def embed(self, x, N):
        A = arith(self.R)
        sa = self.ad.s(x.red, N)
        return A.add(sa, self.H.pad(x.nil[:N], N) if len(x.nil) > N else self.H.pad(x.nil, N))

    def embed_ok(self, N):
        """Whether embedding at level N is compatible with the truncation at L."""
        return self.ad.e_N(N) <= self.L

    def decompose(self, w):
        """Split w in W_N(R) as s(a) + h with a = projection of w."""
        A = arith(self.R)
        a = self.ad.proj(w)
        h = A.sub(tuple(w), self.ad.s(a, len(w)))
        if not all(self.ad.red.is_nil(c) for c in h):
            raise DecompositionFailure(f"residual {h} has a non-nilpotent component")
        return a, _trim(h)

    # enumeration
    def elements(self, S, budget=DEFAULT_BUDGET):
        """All (a, h) with a in W_L(R_red) and h of support < S."""
        hs = self.H.support_bounded(S)
        n = self.Rred.size ** self.L * len(hs)
        if n > budget:
            raise BudgetExceeded(f"{n} sheared elements exceed budget {budget}")
        reds = list(iproduct(range(self.Rred.size), repeat=self.L))
        return [SWElem(self, a, h) for a in reds for h in hs]


class SWElem:
    """(reduced part, nilpotent part) of a sheared Witt vector."""

    __slots__ = ("ring", "red", "nil")

    def __init__(self, ring, red, nil):
        self.ring = ring
        self.red = tuple(red)
        self.nil = tuple(nil)

    @property
    def level(self):
        return self.ring.L

    @property
    def reduced_part(self):
        return WittVec(self.ring.Rred, self.red)

    @property
    def nil_part(self):
        return WittVec(self.ring.R, self.nil) if self.nil else WittVec(self.ring.R, (0,))

    def __add__(self, o):
        return self.ring.add(self, o)

    def __sub__(self, o):
        return self.ring.sub(self, o)

    def __neg__(self):
        return self.ring.neg(self)

    def __mul__(self, o):
        return self.ring.mul(self, o)

    def F(self):
        return self.ring.F(self)

    def tilde_V(self):
        return self.ring.tilde_V(self)

    def embed(self, N):
        return WittVec(self.ring.R, self.ring.embed(self, N))

    def __eq__(self, o):
        return isinstance(o, SWElem) and self.red == o.red and self.nil == o.nil

    def __hash__(self):
        return hash((self.red, self.nil))

    def serialize(self):
        R, Rr = self.ring.R, self.ring.Rred
        return {"reduced": [Rr.fmt(c) for c in self.red], "nil": [R.fmt(c) for c in self.nil]}

    def __repr__(self):
        d = self.serialize()
        return f"SW({','.join(d['reduced'])} | {','.join(d['nil'])})"


def sw_make(w, L=None):
    """Decompose a truncated Witt vector over an admissible ring."""
    S = SWRing(w.ring, L)
    a, h = S.decompose(w.comps)
    return S.elem(a, h)


def sw_arith(a, b, kind, N=None):
    """Add or multiply in the sheared ring, cross-checked inside W_N(R).

    The pair formula is the result.  The embedded route computes in W_N(R),
    re-decomposes (the residual must be nilpotent) and must agree with the
    embedding of the pair result.  Comparing reduced parts directly would be
    wrong in mixed characteristic: s at level N sees reduced components
    above N.
    """
    S = a.ring
    if kind == "add":
        out = S.add(a, b)
        emb = arith(S.R).add
    elif kind == "mul":
        out = S.mul(a, b)
        emb = arith(S.R).mul
    else:
        raise ValueError(kind)
    N = _check_level(S, N)
    if N:
        w = emb(S.embed(a, N), S.embed(b, N))
        S.decompose(w)
        if w != S.embed(out, N):
            raise DecompositionFailure(f"{kind}: pair {out!r} vs embedded {w}")
    return out


def sw_F(a, N=None):
    S = a.ring
    out = S.F(a)
    N = _check_level(S, N)
    if N and N >= 2 and not S.R.char_p:
        w = arith(S.R).frob(S.embed(a, N))
        if tuple(w) != S.embed(out, N - 1):
            raise DecompositionFailure(f"F: {out!r} vs embedded {w}")
    elif N and S.R.char_p:
        w = arith(S.R).frob_charp(S.embed(a, N))
        if tuple(w) != S.embed(out, N):
            raise DecompositionFailure(f"F: {out!r} vs embedded {w}")
    return out


def sw_tildeV(a, N=None):
    S = a.ring
    out = S.tilde_V(a)
    N = _check_level(S, N)
    if N:
        A = arith(S.R)
        u = fcomps(S.R, U(S.p)["u"], N)
        w = A.ver(A.mul(u, S.embed(a, N)))[:N]
        if tuple(w) != S.embed(out, N):
            raise DecompositionFailure(f"tilde V: {out!r} vs embedded {w}")
    return out


def _check_level(S, N):
    if N is None:
        N = 1
        while N < 8 and S.embed_ok(N + 1) and N + 1 <= _cache_level(S.p):
            N += 1
        return N if S.embed_ok(N) else 0
    if not S.embed_ok(N):
        raise LevelMismatch(f"level {N} embedding needs reduced level >= {S.ad.e_N(N)}")
    return N


def _cache_level(p):
    from .wittpoly import shared_cache
    return shared_cache(p).max_index


# -- F-towers ------------------------------------------------------------------------

class FTower:
    """A finite piece (q_0, ..., q_{D-1}) of a Frobenius-compatible sequence.

    For "Wperf" the entries are WittVecs with F(q_{i+1}) = q_i exactly; in
    mixed characteristic entry i sits at level N + i.  For "Qperf" and "TFQ"
    the entries live in a Q-model (see GermQ) and the relation holds there;
    TFQ additionally has q_0 = 0.  A "pair" tower carries an extra x in W
    with x - q_0 nilpotent, modelling the fibre product of W and W^perf.
    """

    def __init__(self, tag, entries, model=None, x=None):
        self.tag = tag
        self.entries = list(entries)
        self.model = model
        self.x = x

    @property
    def depth(self):
        return len(self.entries)

    def __eq__(self, o):
        return (self.tag, self.entries, self.x) == (o.tag, o.entries, o.x)

    def __hash__(self):
        return hash((self.tag, tuple(map(_key, self.entries)), _key(self.x)))

    def __repr__(self):
        return f"FTower({self.tag}, {self.entries!r})"

    def check(self):
        if self.tag == "Wperf" or self.tag == "pair":
            for i in range(self.depth - 1):
                if _wF(self.entries[i + 1]) != self.entries[i].restrict(_lvl(self.entries[i], self.entries[i + 1])):
                    return False
            if self.tag == "pair":
                x, y0 = self.x, self.entries[0]
                N = min(x.level, y0.level)
                if not (x.restrict(N) - y0.restrict(N)).in_hatW():
                    return False
            return True
        M = self.model
        for i in range(self.depth - 1):
            if M.F(self.entries[i + 1]) != self.entries[i]:
                return False
        if self.tag == "TFQ" and self.entries and self.entries[0] != M.zero():
            return False
        return True


def _key(v):
    if v is None:
        return None
    return v.comps if isinstance(v, WittVec) else v


def _wF(x):
    return x.F_charp() if x.ring.char_p else x.F()


def _lvl(a, b):
    return min(a.level, b.level - (0 if a.ring.char_p else 1))


def tower_from_top(top, depth, tag="Wperf"):
    """The W-tower determined by its last entry."""
    entries = [top]
    for _ in range(depth - 1):
        entries.append(_wF(entries[-1]))
    return FTower(tag, entries[::-1])


def tower_ops(t, kind):
    """F, F_inv, tilde_V and p_mul on towers."""
    if kind == "F":
        if t.tag in ("Wperf", "pair"):
            ent = [_wF(q) for q in t.entries]
            x = _wF(t.x) if t.x is not None else None
            return FTower(t.tag, ent, x=x)
        return FTower(t.tag, [t.model.F(q) for q in t.entries], t.model)
    if kind == "F_inv":
        if t.depth < 2:
            raise DepthExhausted("F^{-1} needs depth >= 2")
        if t.tag == "pair":
            raise ValueError("F_inv is not defined on the pair type")
        return FTower(t.tag, t.entries[1:], t.model)
    if kind == "p_mul":
        if t.tag in ("Wperf", "pair"):
            p = t.entries[0].ring.p
            ent = [q * p for q in t.entries]
            return FTower(t.tag, ent, x=(t.x * p if t.x is not None else None))
        return FTower(t.tag, [t.model.scalar(t.model.p, q) for q in t.entries], t.model)
    if kind == "tilde_V":
        if t.tag == "Wperf":
            if t.depth < 2:
                raise DepthExhausted("p F^{-1} needs depth >= 2")
            return FTower(t.tag, [q * q.ring.p for q in t.entries[1:]])
        if t.tag == "pair":
            if t.depth < 2:
                raise DepthExhausted("p F^{-1} needs depth >= 2")
            from .witt import tilde_V
            x = tilde_V(t.x)
            return FTower("pair", [q * q.ring.p for q in t.entries[1:]], x=x)
        return FTower(t.tag, [t.model.tilde_V(q) for q in t.entries], t.model)
    raise ValueError(kind)


def pair_from_sw(x, N, depth):
    """The fibre-product tower of a sheared element at level N."""
    S = x.ring
    ad = S.ad
    A = arith(S.R)
    step = 0 if S.R.char_p else 1
    ys = []
    for i in range(depth):
        ys.append(WittVec(S.R, ad.s(ad.frob_inv(x.red, i), N + step * i)))
    return FTower("pair", ys, x=WittVec(S.R, S.embed(x, N)))


def sw_from_pair(t, S, N=None):
    """Inverse of pair_from_sw at level N: a = projection of y_0, h = x - y_0."""
    ad = S.ad
    y0 = t.entries[0]
    top = min(t.x.level, y0.level)
    N = top if N is None else min(N, top)
    a = ad.proj(y0.comps[:N])
    h = (t.x.restrict(N) - y0.restrict(N)).comps
    return a, _trim(h)


# -- a model of the quotient Q for rings of characteristic p --------------------------

class GermQ:
    """Q(R) = W(R_red) + (W(Nil)/finitely supported), for char-p rings.

    The second summand consists of germs at infinity of Witt vectors with
    nilpotent components.  When the nilpotency index is at most p, addition
    on W(Nil) is componentwise and so is the germ model: an element is a
    pair (a, g) with a in W_N(R_red) and g a window of w components.  F acts
    by Frobenius on both parts and V shifts, which does not change a germ
    window; u acts trivially in characteristic p.
    """

    def __init__(self, R, N, w):
        if not R.char_p:
            raise CharMismatch("the germ model of Q needs p*1 = 0")
        H = hatw(R)
        if H.k > R.p:
            raise CharMismatch("the germ model of Q needs nilpotency index <= p")
        ones = fcomps(R, U(R.p)["u"], max(N, 2))
        if ones != arith(R).from_int(1, max(N, 2)):
            raise CharMismatch("u is not 1 in this ring")
        self.R = R
        self.p = R.p
        self.N = N
        self.w = w
        self.ad = admissible(R)
        self.nil = sorted(self.ad.red.nil)

    def zero(self):
        return ((0,) * self.N, (0,) * self.w)

    def add(self, x, y):
        Rr, R = self.ad.Rred, self.R
        return (arith(Rr).add(x[0], y[0]), tuple(R.add(a, b) for a, b in zip(x[1], y[1])))

    def neg(self, x):
        return (arith(self.ad.Rred).neg(x[0]), tuple(self.R.neg(a) for a in x[1]))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def scalar(self, n, x):
        acc = self.zero()
        for _ in range(n):
            acc = self.add(acc, x)
        return acc

    def F(self, x):
        return (self.ad.frob_red(x[0]), tuple(self.R.frob(a) for a in x[1]))

    def V(self, x):
        return (((0,) + x[0])[:self.N], x[1])

    def tilde_V(self, x):
        return self.V(x)

    def elements(self, budget=DEFAULT_BUDGET):
        Rr = self.ad.Rred
        n = Rr.size ** self.N * len(self.nil) ** self.w
        if n > budget:
            raise BudgetExceeded(f"{n} germ classes exceed budget {budget}")
        reds = list(iproduct(range(Rr.size), repeat=self.N))
        gs = list(iproduct(self.nil, repeat=self.w))
        return [(a, g) for a in reds for g in gs]

    def germs(self):
        """The nilpotent summand alone (reduced part zero)."""
        z = (0,) * self.N
        return [(z, g) for g in iproduct(self.nil, repeat=self.w)]

    def F_kernel(self, i):
        """Q^{(F^i)}: classes killed by F^i."""
        out = []
        for x in self.elements():
            y = x
            for _ in range(i):
                y = self.F(y)
            if y == self.zero():
                out.append(x)
        return out


def stable_image(model, pool=None):
    """Elements of the model lying in the image of every power of F."""
    cur = set(model.elements() if pool is None else pool)
    while True:
        nxt = {model.F(x) for x in cur}
        if nxt == cur:
            return sorted(cur)
        cur = nxt


def enumerate_towers(model, tag, depth, pool=None, liftable=False):
    """All towers of the given depth whose entries lie in the model.

    With liftable=True only truncations of infinite towers are produced,
    i.e. the top entry ranges over the stable image of F.
    """
    pool = model.elements() if pool is None else pool
    if liftable:
        pool = stable_image(model, pool)
    out = []
    for top in pool:
        ent = [top]
        for _ in range(depth - 1):
            ent.append(model.F(ent[-1]))
        ent = ent[::-1]
        t = FTower(tag, ent, model)
        if tag == "TFQ" and ent[0] != model.zero():
            continue
        out.append(t)
    return out


def check_q_towers(R, N=2, w=2, depth=3):
    """Bijectivity of F on Qperf towers and of V~ and 1-F on TFQ towers.

    Qperf towers are truncations of infinite ones.  TFQ towers are all
    depth-limited ones (q_0 = 0, F q_{i+1} = q_i), a larger set on which the
    maps are still bijective.
    """
    M = GermQ(R, N, w)
    qp = enumerate_towers(M, "Qperf", depth, liftable=True)
    tf = enumerate_towers(M, "TFQ", depth)
    qs = set(qp)
    ts = set(tf)
    fq = {tower_ops(t, "F") for t in qp}
    vt = {tower_ops(t, "tilde_V") for t in tf}
    one_minus_F = set()
    for t in tf:
        ent = [M.sub(q, M.F(q)) for q in t.entries]
        one_minus_F.add(FTower("TFQ", ent, M))
    return {
        "Qperf": len(qs), "TFQ": len(ts),
        "F_on_Qperf_bijective": fq == qs and all(t.check() for t in fq),
        "tildeV_on_TFQ_bijective": vt == ts and all(t.check() for t in vt),
        "one_minus_F_on_TFQ_bijective": one_minus_F == ts,
    }


def check_q_structure(R, N=3, w=2, imax=2):
    """Ker V = 0 on Q, F bijective on Q/V~Q, and V~ bijective on Q^{(F^i)}.

    The first two are checked on Q_N = W_N(R)/W_N(Nil) by exhaustion; the
    third on the germ model, where Q^{(F^i)} lives.
    """
    A = arith(R)
    red = R.reduction()
    out = {}
    els = list(iproduct(range(R.size), repeat=N))
    isnil = red.is_nil
    # Ker V: V x nilpotent => x nilpotent (compare at level N)
    bad = [x for x in els
           if all(isnil(c) for c in A.ver(x)[:N]) and not all(isnil(c) for c in x[:N - 1])]
    out["kerV_zero"] = not bad
    out["kerV_witness"] = list(bad[:1])
    # Q/V~Q = W/(V~W + nilpotent vectors); modulo the nilpotent vectors we
    # are in W(R_red), where the subgroup is the projection of V~W
    Rr = red.Rred
    Ar = arith(Rr)
    u = fcomps(R, U(R.p)["u"], N - 1)
    sub = frozenset(tuple(red.proj(c) for c in A.ver(A.mul(u, y)))
                    for y in iproduct(range(R.size), repeat=N - 1))

    def coset(x):
        px = tuple(red.proj(c) for c in x)
        return min(Ar.add(px, s) for s in sub)

    cos = {}
    for x in els:
        cos.setdefault(coset(x), x)
    if R.char_p:
        img = {coset(A.frob_charp(x)) for x in cos.values()}
        agrees = all(coset(A.frob_charp(x))[0] == Rr.frob(c[0]) for c, x in cos.items())
        out["F_on_Q_mod_VQ"] = img == set(cos) and agrees
    else:
        # F lowers the level; compare cosets one level down
        subN = frozenset(s[:N - 1] for s in sub)
        low = {}
        for x in els:
            px = tuple(red.proj(c) for c in x[:N - 1])
            low.setdefault(min(Ar.add(px, s) for s in subN), x)
        img = {min(Ar.add(tuple(red.proj(c) for c in A.frob(x)), s) for s in subN)
               for x in cos.values()}
        out["F_on_Q_mod_VQ"] = img == set(low) and len(cos) == len(low)
    out["Q_mod_VQ_size"] = len(cos)
    out["R_red_size"] = Rr.size
    # V~ on Q^{(F^i)} in the germ model
    try:
        M = GermQ(R, N, w)
        res = []
        for i in range(1, imax + 1):
            ker = M.F_kernel(i)
            ks = set(ker)
            img = {M.tilde_V(x) for x in ker}
            res.append((i, len(ks), img == ks))
        out["tildeV_on_Q_Fi"] = res
    except CharMismatch as e:
        out["tildeV_on_Q_Fi"] = str(e)
    return out


# -- exact sequences -------------------------------------------------------------------

def _vn_preimage(S, y, n):
    """Solve V~^n(x) = y in the pair model, or return None."""
    if any(y.red[:n]):
        return None
    a = y.red[n:] + (0,) * n
    H = S.H
    # V~^n(a, 0) = (V^n a, c); the nilpotent part of x must solve V~^n h = y.nil - c
    c = S.tilde_V_n(S.elem(a), n).nil
    r = H.sub(y.nil, c)
    if any(r[:n]):
        return None
    core = r[n:]
    h = H.zp_mul(un_const(S.p, n).inverse(), core) if core else ()
    x = S.elem(a, h)
    return x if S.tilde_V_n(x, n) == y else None


def check_sw_sequences(R, n=1, N=None, S=None, L=None, budget=DEFAULT_BUDGET):
    """The cokernel of V~^n and the kernel of F^n on finite pair carriers.

    Carriers: reduced level L (and L + n for the target of V~^n), nilpotent
    support < S.  Returns a dict of counts, verdicts and witnesses.
    """
    ad = admissible(R)
    L0 = max(ad.e_W, ad.J, ad.e_N(n), 1)
    L = max(L or 0, L0)
    src = SWRing(R, L)
    tgt = SWRing(R, L + n)
    S = S if S is not None else n + 2
    report = {"ring": R.name, "n": n, "L": L, "support": S}

    # V~^n injective
    xs = src.elements(S, budget)
    imgs = {}
    inj_wit = None
    for x in xs:
        y = tgt.tilde_V_n(tgt.elem(x.red, x.nil), n)
        if y in imgs and inj_wit is None:
            inj_wit = (imgs[y], x)
        imgs[y] = x
    report["tildeVn_injective"] = inj_wit is None
    report["witness_injectivity"] = repr(inj_wit) if inj_wit else None

    # image of V~^n = kernel of the projection to W_n(R)
    ys = tgt.elements(S + n, budget)
    proj = {}
    exact_wit = None
    in_kernel = 0
    for y in ys:
        w = tgt.embed(y, n)
        proj[w] = proj.get(w, 0) + 1
        zero = not any(w)
        in_kernel += zero
        if zero != (_vn_preimage(tgt, y, n) is not None) and exact_wit is None:
            exact_wit = y
    report["image_equals_kernel"] = exact_wit is None
    report["witness_exactness"] = repr(exact_wit) if exact_wit else None
    report["kernel_count"] = in_kernel
    report["cokernel_count"] = len(proj)
    report["Wn_size"] = R.size ** n
    report["cokernel_is_Wn"] = len(proj) == R.size ** n and all(
        len(w) == n for w in proj)
    report["Wn_exponent"] = R.p ** ad.e_N(n)

    # kernel of F^n on the pair carrier equals {(0, h) : F^n h = 0}
    H = src.H
    kerF = [x for x in xs if _is_zero_sw(_fn(src, x, n))]
    hat_ker = [h for h in H.support_bounded(S) if not H.frob_n(h, n)]
    report["kerFn_count"] = len(kerF)
    report["hatW_Fn_count"] = len(hat_ker)
    report["kerFn_equals_hatW_Fn"] = sorted((x.red, x.nil) for x in kerF) == sorted(
        ((0,) * L, h) for h in hat_ker)
    # F^n is surjective on the reduced part; on the nilpotent part only locally
    fimg = {_fn(src, x, n) for x in xs}
    report["Fn_image_count"] = len(fimg)
    report["Fn_surjective_on_reduced"] = {y.red for y in fimg} == {x.red for x in xs}
    return report


def _fn(S, x, n):
    for _ in range(n):
        x = S.F(x)
    return x


def _is_zero_sw(x):
    return not any(x.red) and not x.nil


def check_splitting(R, N, budget=DEFAULT_BUDGET):
    """s splits the projection, is a ring map, and W_N(R) is the direct sum
    of s(W_N(R_red)) and W_N(Nil).

    Sums and products of reduced vectors are formed at a level L large enough
    that p^L kills W_N(R), so the carries dropped by truncation cannot
    change s at level N.
    """
    ad = admissible(R)
    A = arith(R)
    Ar = arith(ad.Rred)
    L = max(N, ad.e_N(N))
    reds = list(iproduct(range(ad.Rred.size), repeat=N))
    if len(reds) ** 2 > budget:
        raise BudgetExceeded(f"{len(reds) ** 2} pairs exceed budget {budget}")
    pad = (0,) * (L - N)
    splits = all(ad.proj(ad.s(a, N)) == a for a in reds)
    mult = add = True
    wit = None
    for a in reds:
        for b in reds:
            if ad.s(Ar.mul(a + pad, b + pad), N) != A.mul(ad.s(a, N), ad.s(b, N)):
                mult = False
                wit = wit or ("mul", a, b)
            if ad.s(Ar.add(a + pad, b + pad), N) != A.add(ad.s(a, N), ad.s(b, N)):
                add = False
                wit = wit or ("add", a, b)
    nil = sorted(ad.red.nil)
    sums = set()
    for a in reds:
        sa = ad.s(a, N)
        for h in iproduct(nil, repeat=N):
            sums.add(A.add(sa, h))
    inter = [a for a in reds if any(a) and all(ad.red.is_nil(c) for c in ad.s(a, N))]
    return {"ring": R.name, "N": N, "splits_projection": splits, "multiplicative": mult,
            "additive": add, "witness": wit, "sum_is_everything": len(sums) == R.size ** N,
            "intersection_trivial": not inter}


def check_zpn_decomposition(p, n, N=2, L=None):
    """Over Z/p^n: s is the canonical map from Z_p = W(F_p), and W_N(R) is
    the direct sum of s(W_N(F_p)) and W_N(pZ/p^n).

    W(F_p) is identified with Z_p by (a_0, a_1, ...) -> sum p^i w(a_i), w the
    Teichmuller lift.  Returns counts.
    """
    R = get_ring(f"zmod:{p}:{n}")
    ad = admissible(R)
    A = arith(R)
    L = L or max(ad.e_N(N), ad.e_W, 1)
    M = L + ad.e_N(N)
    mod = p ** M

    def teich(c):
        return pow(c, p ** (M - 1), mod)

    agree = True
    wit = None
    for a in iproduct(range(p), repeat=L):
        integer = sum(teich(c) * p ** i for i, c in enumerate(a)) % mod
        if ad.s(a, N) != A.from_int(integer, N):
            agree = False
            wit = wit or a
    image = {ad.s(a, N) for a in iproduct(range(p), repeat=N)}
    nil = sorted(ad.red.nil)
    nilv = set(iproduct(nil, repeat=N))
    total = {A.add(s, h) for s in image for h in nilv}
    return {"ring": R.name, "N": N, "L": L, "s_is_canonical": agree, "witness": wit,
            "image_size": len(image), "nil_size": len(nilv),
            "product_size": len(image) * len(nilv), "W_N_size": R.size ** N,
            "sum_covers": len(total) == R.size ** N,
            "direct": len(image) * len(nilv) == len(total)}


# -- semiperfect stages -----------------------------------------------------------------

class Stage:
    """Stage e' of the Frobenius limit approximating R = F_p[x^{1/p^e}]/(x).

    The stage ring is F_p[x^{1/p^{e'}}]/(x), and the map to R sends
    x^{1/p^{e'}} to x^{1/p^e}; its kernel J is generated by x^{1/p^{e'-e}}.
    """

    def __init__(self, p, e, e1):
        if e1 < e:
            raise ValueError("stage must be at least e")
        self.p, self.e, self.e1 = p, e, e1
        self.S = perfstage(p, e1)
        self.R = perfstage(p, e)
        q = p ** e
        # basis t^i of S maps to t^i in R (zero once i >= p^e)
        S, R = self.S, self.R
        tbl = []
        for a in range(S.size):
            c = S.coords(a)
            tbl.append(R.encode([c[i] if i < len(c) else 0 for i in range(q)]))
        self.map = tbl
        self.J = [a for a in range(S.size) if tbl[a] == 0]


def transition(p, e1):
    """F_p[x^{1/p^{e1+1}}]/(x) -> F_p[x^{1/p^{e1}}]/(x), t -> t."""
    S1, S0 = perfstage(p, e1 + 1), perfstage(p, e1)
    q = p ** e1
    return [S0.encode([S1.coords(a)[i] if i < S1.d else 0 for i in range(q)]) for a in range(S1.size)]


def sw_semiperfect_stage(p, e, N, stages=None, budget=DEFAULT_BUDGET):
    """W_N(stage) modulo Witt vectors with components in J, stage by stage."""
    stages = stages or [e, e + 1]
    out = {"p": p, "e": e, "N": N, "stages": []}
    classes = {}
    R = perfstage(p, e)
    for e1 in stages:
        st = Stage(p, e, e1)
        S = st.S
        n = S.size ** N
        if n > budget:
            raise BudgetExceeded(f"{n} stage vectors exceed budget {budget}")
        jset = set(st.J)
        # the quotient of W_N(S) by J-supported vectors; classes are read off
        # componentwise through the map to R, which is valid since J-vectors
        # form the kernel of W_N(S) -> W_N(R)
        A = arith(S)
        ideal_ok = True
        jv = list(iproduct(st.J, repeat=N))
        for a in jv[:64]:
            for b in list(iproduct(range(S.size), repeat=N))[:64]:
                if not all(c in jset for c in A.mul(a, b)):
                    ideal_ok = False
        vecs = list(iproduct(range(S.size), repeat=N))
        q = {tuple(st.map[c] for c in w) for w in vecs}
        # the componentwise map W_N(stage) -> W_N(R) is a ring map
        AR = arith(R)
        hom = True
        for a in vecs[::max(1, len(vecs) // 24)]:
            for b in vecs[::max(1, len(vecs) // 24)]:
                ma = tuple(st.map[c] for c in a)
                mb = tuple(st.map[c] for c in b)
                if tuple(st.map[c] for c in A.mul(a, b)) != AR.mul(ma, mb):
                    hom = False
                if tuple(st.map[c] for c in A.add(a, b)) != AR.add(ma, mb):
                    hom = False
        out["stages"].append({"stage": e1, "stage_size": S.size, "J_size": len(st.J),
                              "ideal": ideal_ok, "ring_map": hom, "quotient_size": len(q),
                              "W_N_R_size": R.size ** N})
        classes[e1] = st
    compat = True
    for e1 in stages:
        if e1 + 1 in classes:
            tr = transition(p, e1)
            hi, lo = classes[e1 + 1], classes[e1]
            for a in range(hi.S.size):
                if lo.map[tr[a]] != hi.map[a]:
                    compat = False
    out["compatible"] = compat
    return out


# -- the operator 1 - V~ ---------------------------------------------------------------

def check_one_minus_tildeV(R, S, budget=DEFAULT_BUDGET):
    """1 - V~ on nilpotent vectors of support < S.

    Checks injectivity, that the Artin-Hasse map kills the image, and that
    the image has the size of ker(lambda~) on the next support bound, so
    that the cokernel is 1 + Nil(R) through lambda~.
    """
    H = hatw(R)
    hs = H.support_bounded(S)
    img = {}
    wit = None
    lam_ok = True
    grow = S
    for h in hs:
        y = H.sub(h, H.tilde_V(h))
        grow = max(grow, len(y))
        if y in img and wit is None:
            wit = (img[y], h)
        img[y] = h
        if H.lam_tilde(y) != R.one:
            lam_ok = False
    big = H.support_bounded(grow)
    if len(big) > budget:
        raise BudgetExceeded(f"{len(big)} vectors exceed budget {budget}")
    units = set()
    ker = 0
    for h in big:
        v = H.lam_tilde(h)
        units.add(v)
        ker += v == R.one
    red = R.reduction()
    one_plus_nil = {R.add(R.one, a) for a in red.nil}
    return {"ring": R.name, "support": S, "injective": wit is None, "witness": wit,
            "lambda_kills_image": lam_ok, "image": len(img), "target_support": grow,
            "kernel_of_lambda": ker, "image_is_kernel": ker == len(img) and lam_ok,
            "lambda_onto_1_plus_nil": units == one_plus_nil, "one_plus_nil": len(one_plus_nil)}


def check_mu_shadow(R, n, S, K=None):
    """Kernel of 1 - V~ on Q^{(F^n)} against the p^n-th roots of unity.

    For h of support < S the class of x = sum_i V~^i h lies in the kernel of
    1 - V~ on Q and corresponds to lambda~(h).  Its F^n lies in the
    nilpotent ideal iff a tail window of F^n(sum_{i<K} V~^i h) vanishes;
    components below K - n agree with those of F^n x.  The verdict must
    match lambda~(h)^(p^n) = 1.
    """
    H = hatw(R)
    K = K or 4 * (n + S) + 4
    q = R.p ** n
    agree = True
    wit = None
    hits = set()
    total = 0
    for h in H.support_bounded(S):
        g = ()
        term = h
        for _ in range(K):
            g = H.add(g, term)
            term = H.tilde_V(term)
        f = H.frob_n(g, n)
        window = f[K // 2:K - n]
        tail_zero = not any(window)
        lam = H.lam_tilde(h)
        root = R.pow(lam, q) == R.one
        total += 1
        if tail_zero != root:
            agree = False
            wit = wit or h
        if tail_zero:
            hits.add(lam)
    from .witt import mu_pn
    mu = set(mu_pn(R, n))
    return {"ring": R.name, "n": n, "support": S, "window": K, "elements": total,
            "agree": agree, "witness": wit, "roots_hit": len(hits), "mu_size": len(mu),
            "image_is_mu": hits == mu}
