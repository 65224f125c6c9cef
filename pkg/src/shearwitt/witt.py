"""Truncated p-typical Witt vectors over finite rings.

Level discipline: ``frobenius`` drops the level by one (it needs x_{i+1}
to produce component i), ``verschiebung`` and ``tilde_V`` raise it by one,
``delta_W`` drops it by one.  In characteristic p the componentwise
Frobenius keeps the level.

Besides W_N(R) this module carries two other engines:

* ``ZpConst``: elements of W(Z_p) described by their ghost components
  (u, [p], beta, F^i(u), ...); components are recovered modulo p^m at any
  level and pushed into W_N(R) along Z/p^m -> R.
* ``HatW``: finitely supported Witt vectors with nilpotent components
  (the ideal of such vectors inside W(R)), with no truncation at all.
  Arithmetic uses the degree-truncated universal polynomials, which are
  exact because every product of nil_index(R) nilpotents vanishes.
"""
from __future__ import annotations

from math import ceil, log

from .errors import (LevelMismatch, LevelTooLarge, NoStabilization, NotInHatW,
                     ParentMismatch, ShiftFailure, CharMismatch, IntegralityFailure)
from .finring import nil_index
from .wittpoly import MASK, BITS, TWO_INPUT, ah_series, shared_cache, unpack, family_slots


# -- compiled polynomial evaluation ------------------------------------------------

def compile_packed(packed, nslots, R):
    """Turn a packed integral polynomial into a list of (coef code, ((slot, exp), ...))."""
    mod = R.p ** R.m
    out = []
    for key, c in packed.items():
        c %= mod
        if not c:
            continue
        exps = unpack(key, nslots)
        mons = tuple((s, e) for s, e in enumerate(exps) if e)
        out.append((R.from_int(c), mons))
    out.sort(key=lambda t: len(t[1]))
    return out


def evaluate(R, terms, vals):
    mul, add, pw = R.mul, R.add, R.pow
    acc = 0
    for c, mons in terms:
        t = c
        for s, e in mons:
            v = vals[s]
            if not v:
                t = 0
                break
            t = mul(t, v if e == 1 else pw(v, e))
        if t:
            acc = add(acc, t)
    return acc


class _Compiled:
    """Per-ring compiled polynomial families for one PolyCache."""

    def __init__(self, R, cache):
        self.R = R
        self.cache = cache
        self._c = {}

    def get(self, family, i):
        key = (family, i)
        hit = self._c.get(key)
        if hit is None:
            hit = compile_packed(self.cache.packed(family, i), family_slots(family, i), self.R)
            self._c[key] = hit
        return hit


# -- W(Z_p) constants through ghost components ---------------------------------------

class ZpConst:
    """An element of W(Z_p) given by a ghost function (k, M) -> w_k mod p^M."""

    def __init__(self, p, ghost, name="c"):
        self.p = p
        self.ghost = ghost
        self.name = name
        self._memo = {}

    def components(self, N, m):
        """First N components modulo p^m."""
        key = (N, m)
        if key in self._memo:
            return self._memo[key]
        p = self.p
        M = m + N + 1
        mod = p ** M
        xs = []
        for n in range(N):
            s = 0
            for j, xj in enumerate(xs):
                s += p ** j * pow(xj, p ** (n - j), mod)
            diff = (self.ghost(n, M) - s) % mod
            q, r = divmod(diff, p ** n)
            if r:
                raise IntegralityFailure(f"{self.name}: ghost data not integral at index {n}")
            xs.append(q)
        out = tuple(x % p ** m for x in xs)
        self._memo[key] = out
        return out

    # ghost-side algebra
    def __mul__(self, other):
        return ZpConst(self.p, lambda k, M: self.ghost(k, M) * other.ghost(k, M) % p_pow(self.p, M),
                       f"({self.name}*{other.name})")

    def __add__(self, other):
        return ZpConst(self.p, lambda k, M: (self.ghost(k, M) + other.ghost(k, M)) % p_pow(self.p, M),
                       f"({self.name}+{other.name})")

    def __sub__(self, other):
        return ZpConst(self.p, lambda k, M: (self.ghost(k, M) - other.ghost(k, M)) % p_pow(self.p, M),
                       f"({self.name}-{other.name})")

    def F(self, i=1):
        return ZpConst(self.p, lambda k, M: self.ghost(k + i, M), f"F^{i}{self.name}")

    def V(self):
        p = self.p
        return ZpConst(p, lambda k, M: 0 if k == 0 else p * self.ghost(k - 1, M) % p_pow(p, M),
                       f"V{self.name}")

    def inverse(self):
        p = self.p
        return ZpConst(p, lambda k, M: pow(self.ghost(k, M), -1, p_pow(p, M)), f"{self.name}^-1")


def p_pow(p, M):
    return p ** M


def zp_int(p, n):
    return ZpConst(p, lambda k, M: n % p ** M, str(n))


def zp_teich(p, a):
    return ZpConst(p, lambda k, M: pow(a, p ** k, p ** M), f"[{a}]")


def zp_u(p):
    """The unit u with V(u) = p - [p]: ghost components 1 - p^(p^(k+1)-1)."""
    return ZpConst(p, lambda k, M: (1 - pow(p, p ** (k + 1) - 1, p ** M)) % p ** M, "u")


def zp_un(p, n):
    """u_n = u * F(u) * ... * F^(n-1)(u)."""
    def g(k, M):
        mod = p ** M
        r = 1
        for i in range(n):
            r = r * (1 - pow(p, p ** (k + i + 1) - 1, mod)) % mod
        return r
    return ZpConst(p, g, f"u_{n}")


def zp_beta(p):
    """beta = prod_{i>=0} F^i(u); the factors are 1 mod p^M once p^(k+i+1)-1 >= M."""
    def g(k, M):
        mod = p ** M
        r, i = 1, 0
        while p ** (k + i + 1) - 1 < M:
            r = r * (1 - pow(p, p ** (k + i + 1) - 1, mod)) % mod
            i += 1
        return r
    return ZpConst(p, g, "beta")


def zp_in_hatW(c, m, window=None):
    """Whether a W(Z_p) constant maps into the finitely supported nilpotent
    vectors of W(Z/p^m).

    Components are computed on [0, K) and the vector is accepted when all
    are divisible by p and they vanish on the second half of the window.
    Returns (verdict, last nonzero index, components).
    """
    K = window or (4 * m + 12)
    comps = c.components(K, m)
    nilp = all(x % c.p == 0 for x in comps)
    last = max((i for i, x in enumerate(comps) if x), default=-1)
    return nilp and last < K // 2, last, comps


# -- W_N(R) --------------------------------------------------------------------------

class WittArith:
    """Witt vector arithmetic on tuples of ring codes for one ring."""

    def __init__(self, R):
        self.R = R
        self.p = R.p
        self.polys = _Compiled(R, shared_cache(R.p))
        self._zp = {}

    def _two(self, family, x, y):
        N = len(x)
        if len(y) != N:
            raise LevelMismatch(f"levels {len(x)} and {len(y)}")
        vals = [0] * (2 * N)
        vals[0::2] = x
        vals[1::2] = y
        R, get = self.R, self.polys.get
        return tuple(evaluate(R, get(family, i), vals) for i in range(N))

    def add(self, x, y):
        if not any(y):
            return tuple(x)
        if not any(x):
            return tuple(y)
        return self._two("sum", x, y)

    def mul(self, x, y):
        return self._two("prod", x, y)

    def neg(self, x):
        R, get = self.R, self.polys.get
        return tuple(evaluate(R, get("neg", i), x) for i in range(len(x)))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def frob(self, x):
        N = len(x)
        if N < 2:
            raise LevelMismatch("mixed-characteristic Frobenius needs level >= 2")
        R, get = self.R, self.polys.get
        return tuple(evaluate(R, get("frob", i), x) for i in range(N - 1))

    def frob_n(self, x, n):
        for _ in range(n):
            x = self.frob(x)
        return x

    def frob_charp(self, x):
        if not self.R.char_p:
            raise CharMismatch("componentwise Frobenius needs p*1 = 0")
        return tuple(self.R.frob(c) for c in x)

    def ver(self, x):
        return (0,) + tuple(x)

    def delta(self, x):
        N = len(x)
        if N < 2:
            raise LevelMismatch("delta needs level >= 2")
        R, get = self.R, self.polys.get
        return tuple(evaluate(R, get("delta", i), x) for i in range(N - 1))

    def teich(self, a, N):
        return (a,) + (0,) * (N - 1)

    def ghost(self, x):
        R, p = self.R, self.p
        out = []
        for i in range(len(x)):
            acc = 0
            for j in range(i + 1):
                acc = R.add(acc, R.mul(R.from_int(p ** j), R.pow(x[j], p ** (i - j))))
            out.append(acc)
        return tuple(out)

    def zp(self, c, N):
        key = (id(c), N)
        hit = self._zp.get(key)
        if hit is None:
            hit = tuple(self.R.from_int(v) for v in c.components(N, self.R.m))
            self._zp[key] = (hit, c)
            return hit
        return hit[0]

    def from_int(self, n, N):
        return self.zp(_int_const(self.p, n), N)

    def scalar(self, n, x):
        return self.mul(self.from_int(n, len(x)), x)

    def is_hat(self, x):
        return all(self.R.is_nilpotent(c) for c in x)


_INT_CONSTS = {}


def _int_const(p, n):
    key = (p, n)
    if key not in _INT_CONSTS:
        _INT_CONSTS[key] = zp_int(p, n)
    return _INT_CONSTS[key]


def arith(R):
    a = getattr(R, "_witt_arith", None)
    if a is None:
        a = WittArith(R)
        R._witt_arith = a
    return a


class WittVec:
    """An element of W_N(R); components are ring codes."""

    __slots__ = ("ring", "comps")

    def __init__(self, ring, comps):
        self.ring = ring
        self.comps = tuple(comps)

    @classmethod
    def of(cls, ring, values):
        """Build from integers or coordinate lists."""
        return cls(ring, [ring.elem(v).code for v in values])

    @property
    def level(self):
        return len(self.comps)

    @property
    def A(self):
        return arith(self.ring)

    def _coerce(self, other):
        if isinstance(other, WittVec):
            if other.ring is not self.ring:
                raise ParentMismatch("Witt vectors over different rings")
            return other.comps
        if isinstance(other, int):
            return self.A.from_int(other, self.level)
        raise TypeError(other)

    def _pair(self, other):
        y = self._coerce(other)
        N = min(self.level, len(y))
        return self.comps[:N], y[:N]

    def __add__(self, other):
        x, y = self._pair(other)
        return WittVec(self.ring, self.A.add(x, y))

    __radd__ = __add__

    def __sub__(self, other):
        x, y = self._pair(other)
        return WittVec(self.ring, self.A.sub(x, y))

    def __rsub__(self, other):
        x, y = self._pair(other)
        return WittVec(self.ring, self.A.sub(y, x))

    def __mul__(self, other):
        x, y = self._pair(other)
        return WittVec(self.ring, self.A.mul(x, y))

    __rmul__ = __mul__

    def __neg__(self):
        return WittVec(self.ring, self.A.neg(self.comps))

    def __eq__(self, other):
        return isinstance(other, WittVec) and other.ring is self.ring and other.comps == self.comps

    def __hash__(self):
        return hash(self.comps)

    def F(self):
        return WittVec(self.ring, self.A.frob(self.comps))

    def F_charp(self):
        return WittVec(self.ring, self.A.frob_charp(self.comps))

    def V(self):
        return WittVec(self.ring, self.A.ver(self.comps))

    def delta(self):
        return WittVec(self.ring, self.A.delta(self.comps))

    def ghost(self):
        return [_el(self.ring, g) for g in self.A.ghost(self.comps)]

    def restrict(self, N):
        if N > self.level:
            raise LevelMismatch(f"cannot restrict level {self.level} to {N}")
        return WittVec(self.ring, self.comps[:N])

    def in_hatW(self):
        return self.A.is_hat(self.comps)

    def serialize(self):
        return {"ring_key": getattr(self.ring, "key", self.ring.name), "level": self.level,
                "components": [list(self.ring.coords(c)) for c in self.comps]}

    def __repr__(self):
        return "(" + ",".join(self.ring.fmt(c) for c in self.comps) + ")"


def _el(R, code):
    from .finring import RingElem
    return RingElem(R, code)


def w_arith(x, y, kind):
    if kind == "add":
        return x + y
    if kind == "mul":
        return x * y
    if kind == "neg":
        return -x
    raise ValueError(kind)


def teichmuller(r, N):
    R = r.parent
    return WittVec(R, arith(R).teich(r.code, N))


def ghost(x):
    return x.ghost()


def frobenius_map(x):
    return x.F()


def frobenius_charp(x):
    return x.F_charp()


def verschiebung(x):
    return x.V()


def delta_W(x):
    return x.delta()


def in_hatW(x):
    return x.in_hatW()


def in_hatW_Fk(x, k):
    if k >= x.level:
        raise LevelMismatch("need k < N")
    if not x.in_hatW():
        return False
    y = x.comps
    for _ in range(k):
        y = arith(x.ring).frob(y)
    return not any(y)


# -- special units ----------------------------------------------------------------------

def fcomps(R, c, N):
    """A W(Z_p) constant as a tuple of codes in W_N(R)."""
    return arith(R).zp(c, N)


_U = {}


def U(p):
    if p not in _U:
        _U[p] = {"u": zp_u(p), "beta": zp_beta(p), "p": zp_int(p, p), "[p]": zp_teich(p, p),
                 "1": zp_int(p, 1), "[-1]": zp_teich(p, -1), "uinv": zp_u(p).inverse()}
    return _U[p]


def un_const(p, n):
    key = ("un", n)
    d = U(p)
    if key not in d:
        d[key] = zp_un(p, n)
        d[("uninv", n)] = d[key].inverse()
    return d[key]


class SpecialUnits:
    """u, V(u), p*u, u_n and beta inside W_N(R)."""

    def __init__(self, ring, N, cross_check=True):
        self.ring = ring
        self.N = N
        A = arith(ring)
        p = ring.p
        top = N + 1
        if top - 1 <= shared_cache(p).max_index:
            pv = A.from_int(p, top)
            tp = A.teich(ring.from_int(p), top)
            diff = A.sub(pv, tp)
            if diff[0] != 0:
                raise ShiftFailure(f"component 0 of p-[p] is {ring.fmt(diff[0])}")
            u = diff[1:]
            if cross_check and u != fcomps(ring, U(p)["u"], N):
                raise ShiftFailure("u from p-[p] disagrees with its ghost description")
            self.route = "shift"
        else:
            u = fcomps(ring, U(p)["u"], N)
            self.route = "ghost"
        self.u = WittVec(ring, u)
        self.Vu = self.u.V()
        self.bp = WittVec(ring, A.mul(A.from_int(p, N), u))

    def un(self, n):
        return WittVec(self.ring, fcomps(self.ring, un_const(self.ring.p, n), self.N))

    def Fi_u(self, i):
        return WittVec(self.ring, fcomps(self.ring, U(self.ring.p)["u"].F(i), self.N))

    def beta(self, cutoff=64):
        """Partial products of F^i(u) until two consecutive factors are 1."""
        A = arith(self.ring)
        one = A.from_int(1, self.N)
        prod = one
        trivial = 0
        for i in range(cutoff):
            f = self.Fi_u(i).comps
            prod = A.mul(prod, f)
            trivial = trivial + 1 if f == one else 0
            if trivial >= 2:
                return WittVec(self.ring, prod), i + 1
        raise NoStabilization(f"beta not stationary after {cutoff} factors")


def compute_special_units(ring, N):
    return SpecialUnits(ring, N)


_SU = {}


def special_units(R, N):
    key = (id(R), N)
    if key not in _SU:
        _SU[key] = SpecialUnits(R, N)
    return _SU[key]


def tilde_V(x):
    """V(u x); level N -> N+1."""
    R = x.ring
    u = fcomps(R, U(R.p)["u"], x.level)
    return WittVec(R, arith(R).ver(arith(R).mul(u, x.comps)))


def tilde_V_tuple(R, x):
    A = arith(R)
    return A.ver(A.mul(fcomps(R, U(R.p)["u"], len(x)), x))


def tilde_V_n(R, x, n):
    for _ in range(n):
        x = tilde_V_tuple(R, x)
    return x


# -- the quotient Q = W/W^ ----------------------------------------------------------------

class QClass:
    """A class in Q_N(R) = W_N(R)/(vectors with nilpotent components)."""

    __slots__ = ("rep",)

    def __init__(self, rep):
        self.rep = rep

    @property
    def level(self):
        return self.rep.level

    def key(self):
        red = self.rep.ring.reduction()
        return tuple(red.proj(c) for c in self.rep.comps)

    def __eq__(self, other):
        return q_eq(self, other)

    def __hash__(self):
        return hash(self.key())

    def __add__(self, o):
        return QClass(self.rep + o.rep)

    def __sub__(self, o):
        return QClass(self.rep - o.rep)

    def __mul__(self, o):
        return QClass(self.rep * o.rep)

    def F(self):
        return QClass(self.rep.F())

    def V(self):
        return QClass(self.rep.V())

    def tilde_V(self):
        return QClass(tilde_V(self.rep))

    def __repr__(self):
        return f"Q{self.rep!r}"


def q_eq(x, y):
    N = min(x.level, y.level)
    return (x.rep.restrict(N) - y.rep.restrict(N)).in_hatW()


def q_ops(x, y, kind):
    if kind == "add":
        return x + y
    if kind == "mul":
        return x * y
    if kind == "F":
        return x.F()
    if kind == "V":
        return x.V()
    if kind == "tilde_V":
        return x.tilde_V()
    raise ValueError(kind)


# -- finitely supported nilpotent vectors ------------------------------------------------

def _trim(x):
    x = list(x)
    while x and x[-1] == 0:
        x.pop()
    return tuple(x)


class HatW:
    """The ideal of finitely supported Witt vectors with nilpotent components.

    Elements are tuples of ring codes with no trailing zeros.  Sums and
    products are exact: the degree-truncated polynomials describe the
    arithmetic on nilpotent entries and the support of a result is bounded
    by (support) - 1 + ceil(log_p k), k the nilpotency index of Nil(R).
    """

    def __init__(self, R, k=None):
        self.R = R
        self.p = R.p
        self.k = nil_index(R) if k is None else k
        c = 0
        while self.p ** c < self.k:
            c += 1
        self.grow = c
        self.polys = _Compiled(R, shared_cache(R.p, trunc=max(self.k, 1)))
        self.ah = ah_series(R.p, R.m, max(self.k, 1) + 1)
        self._J = None
        self._zpc = {}

    # -- basic arithmetic
    def check(self, h):
        if not all(self.R.is_nilpotent(c) for c in h):
            raise NotInHatW(tuple(self.R.fmt(c) for c in h))
        return _trim(h)

    def _two(self, family, x, y, L):
        vals = [0] * (2 * L)
        vals[0:2 * len(x):2] = x
        vals[1:2 * len(y):2] = y
        R, get = self.R, self.polys.get
        out = [evaluate(R, get(family, i), vals) for i in range(L)]
        return _trim(out)

    def _bound(self, L):
        return max(L - 1 + self.grow, L) + 1

    def add(self, x, y):
        if not x:
            return y
        if not y:
            return x
        if self.k <= self.p:
            L = max(len(x), len(y))
            R = self.R
            xs = x + (0,) * (L - len(x))
            ys = y + (0,) * (L - len(y))
            return _trim(R.add(a, b) for a, b in zip(xs, ys))
        L = max(len(x), len(y))
        return self._two("sum", x, y, self._bound(L))

    def neg(self, x):
        if self.k <= self.p:
            return tuple(self.R.neg(a) for a in x)
        R, get = self.R, self.polys.get
        vals = list(x) + [0] * (self._bound(len(x)) - len(x))
        return _trim(evaluate(R, get("neg", i), vals) for i in range(len(vals)))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if not x or not y:
            return ()
        L = max(len(x), len(y))
        return self._two("prod", x, y, self._bound(L))

    def frob(self, x):
        if not x:
            return ()
        L = self._bound(len(x))
        vals = list(x) + [0] * (L + 1 - len(x))
        R, get = self.R, self.polys.get
        return _trim(evaluate(R, get("frob", i), vals) for i in range(L))

    def frob_n(self, x, n):
        for _ in range(n):
            x = self.frob(x)
        return x

    def ver(self, x):
        return (0,) + tuple(x) if x else ()

    def ver_n(self, x, n):
        return (0,) * n + tuple(x) if x else ()

    def teich_mul(self, b, x):
        """[b] * x = (b x_0, b^p x_1, b^(p^2) x_2, ...)."""
        R = self.R
        return _trim(R.mul(R.pow(b, self.p ** i), c) for i, c in enumerate(x))

    # -- the W(R)-module structure
    @property
    def J(self):
        """Smallest J with F^J = 0 on this ideal."""
        if self._J is None:
            self._J = self._kill_exponent()
        return self._J

    def _kill_exponent(self, cap=16):
        nil = [a for a in self.R.reduction().nil if a]
        for J in range(cap + 1):
            ok = True
            for a in nil:
                for i in range(J + 1):
                    if self.frob_n(self.ver_n((a,), i), J):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return J
        raise NoStabilization(f"Frobenius does not kill the nilpotent Witt vectors within {cap}")

    def wmul(self, a, x):
        """a * x for a in W(R) given by at least J leading components."""
        if not x:
            return ()
        J = self.J
        if len(a) < J:
            raise LevelMismatch(f"need {J} components of the W(R) factor, got {len(a)}")
        acc = ()
        fx = x
        for j in range(J):
            if a[j] and fx:
                acc = self.add(acc, self.ver_n(self.teich_mul(a[j], fx), j))
            fx = self.frob(fx)
            if not fx:
                break
        return acc

    def zp_comps(self, c):
        key = id(c)
        if key not in self._zpc:
            self._zpc[key] = (fcomps(self.R, c, max(self.J, 1)), c)
        return self._zpc[key][0]

    def zp_mul(self, c, x):
        return self.wmul(self.zp_comps(c), x)

    def tilde_V(self, x):
        return self.ver(self.zp_mul(U(self.p)["u"], x))

    def tilde_V_n(self, x, n):
        for _ in range(n):
            x = self.tilde_V(x)
        return x

    def scalar(self, n, x):
        return self.zp_mul(_int_const(self.p, n), x)

    # -- Artin-Hasse maps
    def lam(self, x):
        R = self.R
        acc = R.one
        for c in x:
            if c:
                acc = R.mul(acc, self.ah.evaluate(R, c))
        return acc

    def lam_tilde(self, x):
        return self.lam(self.zp_mul(U(self.p)["beta"], x))

    # -- enumeration
    def support_bounded(self, L):
        """All elements of support < L (components drawn from Nil(R))."""
        nil = sorted(self.R.reduction().nil)
        out = [()]
        for _ in range(L):
            out = [h + (a,) for h in out for a in nil]
        return [_trim(h) for h in out]

    def pad(self, x, L):
        if len(x) > L:
            raise LevelMismatch(f"support {len(x)} exceeds level {L}")
        return tuple(x) + (0,) * (L - len(x))


def hatw(R):
    h = getattr(R, "_hatw", None)
    if h is None:
        h = HatW(R)
        R._hatw = h
    return h


def lambda_AH(x):
    if not x.in_hatW():
        raise NotInHatW(repr(x))
    H = hatw(x.ring)
    return _el(x.ring, H.lam(_trim(x.comps)))


def tilde_lambda(x):
    if not x.in_hatW():
        raise NotInHatW(repr(x))
    H = hatw(x.ring)
    return _el(x.ring, H.lam_tilde(_trim(x.comps)))


def mu_pn(R, n):
    q = R.p ** n
    return [a for a in R.elements() if R.pow(a, q) == R.one]
