"""Finite commutative Z/p^m-algebras given by structure constants.

Elements are handled internally as integer codes: the coordinate vector
(c_0, ..., c_{d-1}) with c_i in Z/p^{e_i} is packed in mixed radix.  Small
rings get full addition and multiplication tables, larger ones fall back to
coordinate arithmetic with a memo for products.
"""
from __future__ import annotations

import json
from functools import lru_cache
from math import ceil, log2, prod

import numpy as np

from .errors import (AxiomViolation, BudgetExceeded, CharMismatch,
                     NotAdmissible, NotPNilpotent, ParentMismatch)

DEFAULT_BUDGET = 10**6
TABLE_LIMIT = 1024


class FiniteRing:
    """A finite commutative ring with a Z-module basis e_0..e_{d-1}.

    ``structure_constants[i][j]`` is the coordinate vector of e_i*e_j and
    ``orders[i]`` is the exponent e with p^e * e_i = 0 (defaults to m for
    every basis element, i.e. a free Z/p^m-module).
    """

    def __init__(self, p, m, structure_constants, unit_coords, labels=None,
                 orders=None, name=None, check=True, budget=DEFAULT_BUDGET):
        self.p = int(p)
        self.m = int(m)
        d = len(unit_coords)
        if d < 1:
            raise ValueError("basis must be non-empty")
        self.d = d
        self.orders = tuple(orders) if orders is not None else (self.m,) * d
        if len(self.orders) != d or max(self.orders) > self.m or min(self.orders) < 1:
            raise ValueError("bad basis orders")
        self.moduli = tuple(self.p ** e for e in self.orders)
        self.labels = tuple(labels) if labels else tuple(f"e{i}" for i in range(d))
        self.name = name or f"ring[{self.p},{self.m},{d}]"
        self.budget = budget
        radix, r = [], 1
        for q in self.moduli:
            radix.append(r)
            r *= q
        self.radix = tuple(radix)
        self.size = r
        sc = []
        for i in range(d):
            row = []
            for j in range(d):
                vec = structure_constants[i][j]
                if len(vec) != d:
                    raise ValueError("structure constant vector has wrong length")
                row.append(tuple(int(c) % q for c, q in zip(vec, self.moduli)))
            sc.append(row)
        self.sc = tuple(tuple(r) for r in sc)
        self._sparse = tuple(tuple(tuple((k, c) for k, c in enumerate(v) if c)
                                   for v in row) for row in self.sc)
        self.unit_coords = tuple(int(c) % q for c, q in zip(unit_coords, self.moduli))
        self.zero = 0
        self.one = self.encode(self.unit_coords)
        self._add = self._mul = self._neg = None
        self._coords_cache = None
        self._pow_cache = {}
        self._inv = None
        self._reduction = None
        self._reduction_hint = None
        if check:
            self._validate()

    # -- coordinates ---------------------------------------------------------
    def encode(self, coords):
        return sum((int(c) % q) * r for c, q, r in zip(coords, self.moduli, self.radix))

    def coords(self, a):
        if self._coords_cache is not None:
            return self._coords_cache[a]
        out = []
        for q in self.moduli:
            a, c = divmod(a, q)
            out.append(c)
        return tuple(out)

    @property
    def small(self):
        return self.size <= TABLE_LIMIT

    def _build_tables(self):
        n = self.size
        C = np.zeros((n, self.d), dtype=np.int64)
        codes = np.arange(n, dtype=np.int64)
        for k, q in enumerate(self.moduli):
            C[:, k] = codes % q
            codes //= q
        self._coords_cache = [tuple(int(c) for c in row) for row in C]
        mods = np.array(self.moduli, dtype=np.int64)
        rad = np.array(self.radix, dtype=np.int64)
        S = C[:, None, :] + C[None, :, :]
        self._add = ((S % mods) @ rad).tolist()
        self._neg = (((-C) % mods) @ rad).tolist()
        T = np.array(self.sc, dtype=np.int64)
        X = np.einsum("ai,ijk->ajk", C, T)
        mul = []
        step = max(1, 200000 // max(1, n * self.d))
        for s in range(0, n, step):
            P = np.einsum("ajk,bj->abk", X[s:s + step], C)
            mul.extend(((P % mods) @ rad).tolist())
        self._mul = mul

    def _tables(self):
        if self._add is None:
            self._build_tables()

    # -- arithmetic on codes -------------------------------------------------
    def add(self, a, b):
        if self.small:
            if self._add is None:
                self._build_tables()
            return self._add[a][b]
        ca, cb = self.coords(a), self.coords(b)
        return self.encode([x + y for x, y in zip(ca, cb)])

    def neg(self, a):
        if self.small:
            if self._add is None:
                self._build_tables()
            return self._neg[a]
        return self.encode([-x for x in self.coords(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.small:
            if self._add is None:
                self._build_tables()
            return self._mul[a][b]
        if a > b:
            a, b = b, a
        return self._mul_big(a, b)

    @lru_cache(maxsize=1 << 17)
    def _mul_big(self, a, b):
        ca, cb = self.coords(a), self.coords(b)
        acc = [0] * self.d
        sp = self._sparse
        for i, x in enumerate(ca):
            if not x:
                continue
            row = sp[i]
            for j, y in enumerate(cb):
                if not y:
                    continue
                xy = x * y
                for k, c in row[j]:
                    acc[k] += xy * c
        return self.encode(acc)

    def smul(self, n, a):
        """Integer multiple n*a."""
        if self.small and self._add is not None and n >= 0 and n < 8:
            r = 0
            for _ in range(n):
                r = self._add[r][a]
            return r
        return self.encode([n * x for x in self.coords(a)])

    def from_int(self, n):
        return self.smul(int(n), self.one)

    def pow(self, a, e):
        if e == 0:
            return self.one
        key = (a, e)
        hit = self._pow_cache.get(key)
        if hit is not None:
            return hit
        result, base, k = self.one, a, e
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        if len(self._pow_cache) < 1 << 18:
            self._pow_cache[key] = result
        return result

    def frob(self, a):
        return self.pow(a, self.p)

    def is_nilpotent(self, a):
        x = a
        for _ in range(max(1, ceil(log2(self.size)))):
            if x == 0:
                return True
            x = self.mul(x, x)
        return x == 0

    def is_unit(self, a):
        return self.inverse(a) is not None

    def inverse(self, a):
        """Multiplicative inverse, or None."""
        if self.small:
            if self._inv is None:
                self._tables()
                self._inv = {}
                for x in range(self.size):
                    row = self._mul[x]
                    for y in range(x, self.size):
                        if row[y] == self.one:
                            self._inv[x] = y
                            self._inv[y] = x
                            break
            return self._inv.get(a)
        red = self.reduction()
        c = red.proj(a)
        cinv = red.Rred.inverse(c)
        if cinv is None:
            return None
        b0 = red.lift(cinv)
        # a*b0 = 1 - n with n nilpotent; invert by the geometric series
        n = self.sub(self.one, self.mul(a, b0))
        acc, term = self.one, self.one
        for _ in range(self.size.bit_length() + 2):
            term = self.mul(term, n)
            if term == 0:
                break
            acc = self.add(acc, term)
        return self.mul(b0, acc)

    @property
    def char_p(self):
        return self.smul(self.p, self.one) == 0

    # -- enumeration ---------------------------------------------------------
    def elements(self, budget=None):
        b = self.budget if budget is None else budget
        if self.size > b:
            raise BudgetExceeded(self.size, b)
        return range(self.size)

    def elem(self, x):
        if isinstance(x, RingElem):
            if x.parent is not self:
                raise ParentMismatch(f"{x.parent.name} vs {self.name}")
            return x
        if isinstance(x, (list, tuple)):
            return RingElem(self, self.encode(x))
        return RingElem(self, self.from_int(x))

    def fmt(self, a):
        return RingElem(self, a).__repr__()

    # -- validation ----------------------------------------------------------
    def _vec_mul(self, u, v):
        acc = [0] * self.d
        for i, x in enumerate(u):
            if not x:
                continue
            for j, y in enumerate(v):
                if not y:
                    continue
                for k, c in self._sparse[i][j]:
                    acc[k] += x * y * c
        return tuple(c % q for c, q in zip(acc, self.moduli))

    def _validate(self):
        d, p = self.d, self.p
        basis = [tuple(1 if k == i else 0 for k in range(d)) for i in range(d)]
        for i in range(d):
            for j in range(d):
                # p^{e_i} e_i = 0 must force p^{e_i} e_i e_j = 0
                for k, c in enumerate(self.sc[i][j]):
                    if (self.moduli[i] * c) % self.moduli[k] or (self.moduli[j] * c) % self.moduli[k]:
                        raise AxiomViolation("well-defined", (self.labels[i], self.labels[j]))
        for i in range(d):
            for j in range(d):
                if self.sc[i][j] != self.sc[j][i]:
                    raise AxiomViolation("commutativity", (self.labels[i], self.labels[j]))
        for i in range(d):
            if self._vec_mul(self.unit_coords, basis[i]) != basis[i]:
                raise AxiomViolation("unit", (self.labels[i],))
        for i in range(d):
            for j in range(d):
                ij = self.sc[i][j]
                for k in range(d):
                    if self._vec_mul(ij, basis[k]) != self._vec_mul(basis[i], self.sc[j][k]):
                        raise AxiomViolation("associativity",
                                             (self.labels[i], self.labels[j], self.labels[k]))
        one = self.unit_coords
        pm = tuple((p ** self.m * c) % q for c, q in zip(one, self.moduli))
        pm1 = tuple((p ** (self.m - 1) * c) % q for c, q in zip(one, self.moduli))
        if any(pm):
            raise NotPNilpotent(f"p^{self.m}*1 != 0")
        if not any(pm1) and self.m > 0:
            raise AxiomViolation("exact exponent", self.m)

    # -- reduction -----------------------------------------------------------
    def reduction(self):
        """Nilradical, reduced quotient and a set-theoretic section."""
        if self._reduction is None:
            if self._reduction_hint is not None:
                self._reduction = self._reduction_hint(self)
            else:
                self._reduction = nilradical(self)
        return self._reduction

    def descriptor(self):
        return {
            "name": self.name,
            "p": self.p,
            "m": self.m,
            "labels": list(self.labels),
            "orders": list(self.orders),
            "structure_constants": [[[str(c) for c in v] for v in row] for row in self.sc],
            "unit": [str(c) for c in self.unit_coords],
        }

    def to_json(self):
        return json.dumps(self.descriptor(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        sc = [[[int(c) for c in v] for v in row] for row in obj["structure_constants"]]
        return cls(obj["p"], obj["m"], sc, [int(c) for c in obj["unit"]],
                   labels=obj["labels"], orders=obj["orders"], name=obj.get("name"))

    def __repr__(self):
        return f"FiniteRing({self.name})"

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other


class RingElem:
    __slots__ = ("parent", "code")

    def __init__(self, parent, code):
        self.parent = parent
        self.code = code

    @property
    def coords(self):
        return self.parent.coords(self.code)

    def _other(self, b):
        if isinstance(b, RingElem):
            if b.parent is not self.parent:
                raise ParentMismatch(f"{b.parent.name} vs {self.parent.name}")
            return b.code
        return self.parent.from_int(b)

    def __add__(self, b):
        return RingElem(self.parent, self.parent.add(self.code, self._other(b)))

    __radd__ = __add__

    def __sub__(self, b):
        return RingElem(self.parent, self.parent.sub(self.code, self._other(b)))

    def __rsub__(self, b):
        return RingElem(self.parent, self.parent.sub(self._other(b), self.code))

    def __mul__(self, b):
        return RingElem(self.parent, self.parent.mul(self.code, self._other(b)))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElem(self.parent, self.parent.neg(self.code))

    def __pow__(self, e):
        return RingElem(self.parent, self.parent.pow(self.code, e))

    def __eq__(self, b):
        if isinstance(b, RingElem):
            return self.parent is b.parent and self.code == b.code
        if isinstance(b, int):
            return self.code == self.parent.from_int(b)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.parent), self.code))

    def is_nilpotent(self):
        return self.parent.is_nilpotent(self.code)

    def __repr__(self):
        R = self.parent
        parts = []
        for c, lab in zip(self.coords, R.labels):
            if not c:
                continue
            if lab == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(lab)
            else:
                parts.append(f"{c}{lab}")
        return "+".join(parts) if parts else "0"


def ring_ops(a, b, kind):
    """Dispatch helper: kind is 'add', 'mul', 'neg' or ('pow', k)."""
    if kind == "neg":
        return -a
    if isinstance(kind, tuple) and kind[0] == "pow":
        return a ** kind[1]
    if b is not None and isinstance(a, RingElem) and isinstance(b, RingElem) and a.parent is not b.parent:
        raise ParentMismatch("operands live in different rings")
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown ring operation {kind!r}")


def make_ring(p, m, structure_constants, unit_coords, **kw):
    return FiniteRing(p, m, structure_constants, unit_coords, **kw)


# -- homomorphisms and quotients ---------------------------------------------

class RingHom:
    """A ring map given by a python callable on codes, memoized on small sources."""

    def __init__(self, src, dst, fn, name=""):
        self.src, self.dst, self.fn, self.name = src, dst, fn, name
        self._table = None

    def __call__(self, a):
        if self._table is None and self.src.small:
            self._table = [self.fn(x) for x in range(self.src.size)]
        if self._table is not None:
            return self._table[a]
        return self.fn(a)


class Reduction:
    """Nilradical data of a ring R: Nil(R), R_red, projection and a section."""

    def __init__(self, R, nil, Rred, proj, lift):
        self.R = R
        self.nil = nil          # frozenset of codes, or None when not enumerated
        self.Rred = Rred
        self.proj = proj        # RingHom R -> R_red
        self.lift = lift        # callable R_red -> R (set-theoretic section)

    def is_nil(self, a):
        if self.nil is not None:
            return a in self.nil
        return self.proj(a) == 0


def quotient_ring(R, ideal, name=None):
    """R/I for an ideal I containing pR; returns (Q, projection table, lift table)."""
    ideal = sorted(set(ideal))
    p = R.p
    if any(R.smul(p, a) not in set(ideal) for a in (R.one,)):
        raise ValueError("quotient_ring needs pR inside the ideal")
    R.elements()
    rep = [None] * R.size
    reps = []
    for a in range(R.size):
        if rep[a] is not None:
            continue
        coset = [R.add(a, i) for i in ideal]
        r = min(coset)
        for c in coset:
            rep[c] = r
        reps.append(r)
    reps.sort()
    span = {0: ()}
    basis = []
    for r in reps:
        if r in span:
            continue
        basis.append(r)
        new = {}
        for s, cs in span.items():
            for c in range(p):
                v = rep[R.add(s, R.smul(c, r))]
                if v not in new:
                    new[v] = cs + (c,)
        span = new
    dim = len(basis)
    span = {k: v + (0,) * (dim - len(v)) for k, v in span.items()}
    if len(span) != len(reps):
        raise AxiomViolation("quotient is not an F_p-vector space", len(reps))
    if dim == 0:
        raise ValueError("quotient by the unit ideal")
    sc = [[list(span[rep[R.mul(bi, bj)]]) for bj in basis] for bi in basis]
    unit = list(span[rep[R.one]])
    labels = [f"[{R.fmt(b)}]" for b in basis]
    Q = FiniteRing(p, 1, sc, unit, labels=labels, name=name or f"{R.name}/I")
    proj = [Q.encode(span[rep[a]]) for a in range(R.size)]
    lift = [None] * Q.size
    for a in range(R.size):
        q = proj[a]
        if lift[q] is None:
            lift[q] = a
    return Q, proj, lift


def nilradical(R, budget=None):
    """Enumerate Nil(R), verify it is an ideal, and build R_red."""
    els = R.elements(budget)
    nil = [a for a in els if R.is_nilpotent(a)]
    nset = frozenset(nil)
    for a in nil:
        for b in nil:
            if R.add(a, b) not in nset:
                raise AxiomViolation("nilradical additive closure", (R.fmt(a), R.fmt(b)))
    for a in nil:
        for r in els:
            if R.mul(a, r) not in nset:
                raise AxiomViolation("nilradical ideal closure", (R.fmt(a), R.fmt(r)))
    Q, proj, lift = quotient_ring(R, nil, name=f"{R.name}_red")
    return Reduction(R, nset, Q, RingHom(R, Q, proj.__getitem__, "proj"), lift.__getitem__)


def nil_index(R):
    """Smallest k with Nil(R)^k = 0 (products of k nilpotents vanish)."""
    hint = getattr(R, "_nil_index_hint", None)
    if hint is not None:
        return hint
    red = R.reduction()
    if red.nil is not None:
        nil = sorted(red.nil)
    else:
        nil = None
    if nil is not None:
        if nil == [0]:
            return 1
        k, cur = 1, set(nil)
        while cur != {0}:
            cur = {R.mul(a, b) for a in cur for b in nil}
            k += 1
            if k > R.size:
                raise AxiomViolation("nilradical not nilpotent", k)
        return k
    raise BudgetExceeded(R.size, R.budget)


# -- Frobenius and semiperfectness --------------------------------------------

def frobenius_pth(a):
    return a ** a.parent.p


def _fr_image(R, subset):
    return frozenset(R.frob(a) for a in subset)


def semiperfect_class(A, budget=None):
    """Classify an F_p-algebra as semiperfect / weakly semiperfect(n) / neither.

    Returns (label, n, detail) where n is the first index with
    im Fr^n = im Fr^{n+1}.  The second characterization (A/Ker Fr^n is
    semiperfect) is checked for every index up to n and must agree.
    """
    if not A.char_p:
        raise CharMismatch("semiperfect_class needs p*1 = 0")
    els = A.elements(budget)
    images = [frozenset(els)]
    while True:
        nxt = _fr_image(A, images[-1])
        if nxt == images[-1]:
            break
        images.append(nxt)
        if len(images) > A.size + 1:
            break
    n = len(images) - 1
    agree = []
    for j in range(n + 1):
        first = (images[j] == _fr_image(A, images[j]))
        second = quotient_by_frobenius_kernel_is_semiperfect(A, j)
        agree.append((j, first, second))
        if first != second:
            raise AxiomViolation("(i)<=>(ii) for Frobenius powers", (A.name, j, first, second))
    label = "semiperfect" if n == 0 else "weakly_semiperfect"
    return label, n, agree


def quotient_by_frobenius_kernel_is_semiperfect(A, n):
    """Whether Frobenius is surjective on A/Ker(Fr^n)."""
    q = A.p ** n
    ker = [a for a in range(A.size) if A.pow(a, q) == 0]
    if len(ker) == A.size:
        return True
    Q, proj, _ = quotient_ring(A, ker)
    image = {Q.frob(x) for x in range(Q.size)}
    return len(image) == Q.size


def is_perfect(R):
    if not R.char_p:
        return False
    return len({R.frob(a) for a in R.elements()}) == R.size


def frobenius_kill_exponent(R, bound=8):
    """Smallest k with a^{p^k} in pR for every nilpotent a (admissibility)."""
    red = R.reduction()
    pR = {R.smul(R.p, a) for a in R.elements()}
    for k in range(bound + 1):
        if all(R.pow(a, R.p ** k) in pR for a in red.nil):
            return k
    raise NotAdmissible(f"nilradical of {R.name} mod p not killed by Fr^{bound}")


def check_admissible(R, bound=8):
    red = R.reduction()
    if not is_perfect(red.Rred):
        raise NotAdmissible(f"reduced quotient of {R.name} is not perfect")
    return frobenius_kill_exponent(R, bound)


# -- catalog -------------------------------------------------------------------

def _monomial_hint(p, k):
    def hint(R):
        Fp = fp(p)
        proj = RingHom(R, Fp, lambda a: R.coords(a)[0] % p, "const")
        return Reduction(R, None if R.size > 10**5 else frozenset(
            a for a in range(R.size) if R.coords(a)[0] == 0), Fp, proj, lambda c: R.from_int(c))
    return hint


def zmod(p, m):
    return FiniteRing(p, m, [[[1]]], [1], labels=["1"], name=f"Z/{p**m}")


def fp(p):
    return FiniteRing(p, 1, [[[1]]], [1], labels=["1"], name=f"F_{p}")


def truncated_poly(p, k, labels=None, name=None):
    sc = [[[1 if (i + j == l) else 0 for l in range(k)] for j in range(k)] for i in range(k)]
    unit = [1] + [0] * (k - 1)
    labels = labels or (["1"] + ["x" if i == 1 else f"x^{i}" for i in range(1, k)])
    R = FiniteRing(p, 1, sc, unit, labels=labels, name=name or f"F_{p}[x]/(x^{k})")
    R._reduction_hint = _monomial_hint(p, k) if not R.small else None
    R._nil_index_hint = k
    return R


def fpk(p, k):
    return truncated_poly(p, k)


def perfstage(p, e):
    """F_p[x^{1/p^e}]/(x), realized as F_p[t]/(t^{p^e}) with t = x^{1/p^e}."""
    q = p ** e
    if e == 0:
        return fp(p)
    labels = ["1"] + [f"x^({i}/{q})" for i in range(1, q)]
    return truncated_poly(p, q, labels=labels, name=f"F_{p}[x^(1/{q})]/(x)")


def zmodeps(p, m):
    """(Z/p^m)[x]/(x^2, p x)."""
    sc = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    return FiniteRing(p, m, sc, [1, 0], labels=["1", "x"], orders=[m, 1],
                      name=f"(Z/{p**m})[x]/(x^2,{p}x)")


def product(A, B):
    if A.p != B.p:
        raise ValueError("factors must share the prime")
    dA, dB = A.d, B.d
    d = dA + dB
    sc = [[[0] * d for _ in range(d)] for _ in range(d)]
    for i in range(dA):
        for j in range(dA):
            for k, c in enumerate(A.sc[i][j]):
                sc[i][j][k] = c
    for i in range(dB):
        for j in range(dB):
            for k, c in enumerate(B.sc[i][j]):
                sc[dA + i][dA + j][dA + k] = c
    unit = list(A.unit_coords) + list(B.unit_coords)
    labels = [f"({l},0)" for l in A.labels] + [f"(0,{l})" for l in B.labels]
    return FiniteRing(A.p, max(A.m, B.m), sc, unit, labels=labels,
                      orders=list(A.orders) + list(B.orders), name=f"{A.name} x {B.name}")


_CATALOG = {}


def get_ring(key):
    """Look up a catalog ring by key, e.g. 'zmod:2:3', 'fpk:3:3', 'prod:fp:2+fpk:2:2'."""
    key = key.strip()
    if key in _CATALOG:
        return _CATALOG[key]
    if key.startswith("prod:"):
        left, right = key[5:].split("+", 1)
        R = product(get_ring(left), get_ring(right))
    else:
        parts = key.split(":")
        kind, args = parts[0], [int(a) for a in parts[1:]]
        if kind == "zmod":
            R = zmod(*args)
        elif kind == "fp":
            R = fp(*args)
        elif kind == "fpk":
            R = fpk(*args)
        elif kind == "perfstage":
            R = perfstage(*args)
        elif kind == "zmodeps":
            R = zmodeps(*args)
        else:
            raise KeyError(f"unknown ring key {key!r}")
    R.key = key
    _CATALOG[key] = R
    return R


def catalog_keys():
    """The built-in test rings."""
    keys = []
    for p in (2, 3, 5):
        for m in (1, 2, 3):
            keys.append(f"zmod:{p}:{m}")
    for p in (2, 3, 5):
        for k in (2, 3, 4):
            keys.append(f"fpk:{p}:{k}")
    for p in (2, 3):
        for e in (1, 2):
            keys.append(f"perfstage:{p}:{e}")
    keys.append("zmodeps:2:2")
    keys += ["prod:fp:2+fp:2", "prod:fp:2+fpk:2:2", "prod:zmod:2:2+fpk:2:2", "prod:fp:3+fpk:3:2"]
    return keys


def fp_algebra_keys():
    return [k for k in catalog_keys() if get_ring(k).char_p]
