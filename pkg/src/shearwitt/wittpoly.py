"""Universal integral polynomials for p-typical Witt vector arithmetic.

Each family is solved from its ghost identity one index at a time:

    sum:   w_i(S)   = w_i(x) + w_i(y)
    prod:  w_i(P)   = w_i(x) * w_i(y)
    neg:   w_i(N)   = -w_i(x)
    frob:  w_i(F)   = w_{i+1}(x)
    delta: w_i(D)   = (w_{i+1}(x) - w_i(x)^p) / p

and every division by p^i is checked to be exact.

Internally a polynomial is a dict from a packed monomial key to an integer.
The key stores the total degree in the low bits followed by one 16-bit
exponent slot per variable, so multiplying monomials is integer addition and
a truncation "drop everything of total degree >= k" is a mask test.  For the
two-input families variable x_j sits in slot 2j and y_j in slot 2j+1, which
keeps the layout of S_j a prefix of the layout of S_i.
"""
from __future__ import annotations

import json
import os
from fractions import Fraction

from .errors import CorruptCache, IntegralityFailure, LevelTooLarge

BITS = 16
MASK = (1 << BITS) - 1
FAMILIES = ("sum", "prod", "neg", "frob", "delta")
TWO_INPUT = ("sum", "prod")
DEFAULT_MAX_INDEX = {2: 5, 3: 4, 5: 3}


def default_max_index(p):
    return DEFAULT_MAX_INDEX.get(p, 2)


def mono(slot, e):
    return (e << (BITS * (slot + 1))) + e


def degree(key):
    return key & MASK


def unpack(key, nslots):
    return tuple((key >> (BITS * (v + 1))) & MASK for v in range(nslots))


def pack(exps):
    key = sum(exps)
    for v, e in enumerate(exps):
        key += e << (BITS * (v + 1))
    return key


# -- sparse polynomial arithmetic ---------------------------------------------

def padd(a, b, scale=1):
    out = dict(a)
    for k, c in b.items():
        v = out.get(k, 0) + scale * c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def pmul(a, b, trunc=None):
    out = {}
    get = out.get
    if trunc is None:
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
    else:
        for ka, ca in a.items():
            da = ka & MASK
            if da >= trunc:
                continue
            for kb, cb in b.items():
                if da + (kb & MASK) >= trunc:
                    continue
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def ppow(a, e, trunc=None):
    result = {0: 1}
    base = a
    while e:
        if e & 1:
            result = pmul(result, base, trunc)
        e >>= 1
        if e:
            base = pmul(base, base, trunc)
    return result


def pscale(a, c):
    return {k: v * c for k, v in a.items()} if c else {}


def pdiv_exact(a, d, what):
    out = {}
    for k, c in a.items():
        q, r = divmod(c, d)
        if r:
            raise IntegralityFailure(f"{what}: coefficient {c} not divisible by {d}")
        out[k] = q
    return out


def ghost_packed(p, i, stride=1, offset=0, trunc=None):
    """w_i = sum_j p^j x_j^(p^(i-j)) with x_j in slot stride*j+offset."""
    out = {}
    for j in range(i + 1):
        e = p ** (i - j)
        if trunc is not None and e >= trunc:
            continue
        out[mono(stride * j + offset, e)] = p ** j
    return out


# -- the public polynomial type ------------------------------------------------

class UnivPoly:
    """An integral polynomial in named variables x_0.., y_0.."""

    def __init__(self, variables, terms):
        self.variables = tuple(variables)
        self.terms = {tuple(e): int(c) for e, c in terms.items() if c}
        for e in self.terms:
            if len(e) != len(self.variables):
                raise ValueError("exponent vector length mismatch")

    def __eq__(self, other):
        return (isinstance(other, UnivPoly) and self.variables == other.variables
                and self.terms == other.terms)

    def __len__(self):
        return len(self.terms)

    def evaluate(self, values):
        """Evaluate at integers given as a dict name -> value."""
        vals = [values[v] for v in self.variables]
        total = 0
        for exps, c in self.terms.items():
            t = c
            for x, e in zip(vals, exps):
                if e:
                    t *= x ** e
            total += t
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            mon = "*".join(v if e == 1 else f"{v}^{e}"
                           for v, e in zip(self.variables, exps) if e)
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{c}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")


def family_slots(family, i):
    """Number of packed slots used by the index-i polynomial of a family."""
    if family in TWO_INPUT:
        return 2 * (i + 1)
    if family == "neg":
        return i + 1
    return i + 2


def family_variables(family, i):
    if family in TWO_INPUT:
        return [f"x_{j}" for j in range(i + 1)] + [f"y_{j}" for j in range(i + 1)]
    return [f"x_{j}" for j in range(family_slots(family, i))]


def to_univ(family, i, packed):
    n = family_slots(family, i)
    names = family_variables(family, i)
    terms = {}
    for k, c in packed.items():
        slots = unpack(k, n)
        if family in TWO_INPUT:
            exps = tuple(slots[2 * j] for j in range(i + 1)) + tuple(
                slots[2 * j + 1] for j in range(i + 1))
        else:
            exps = slots
        terms[exps] = c
    return UnivPoly(names, terms)


def from_univ(family, i, poly):
    out = {}
    for exps, c in poly.terms.items():
        if family in TWO_INPUT:
            h = i + 1
            slots = []
            for j in range(h):
                slots += [exps[j], exps[h + j]]
        else:
            slots = list(exps)
        out[pack(slots)] = c
    return out


def ghost_poly(p, i):
    return to_univ("neg", i, ghost_packed(p, i))


# -- the cache -------------------------------------------------------------------

class PolyCache:
    """Lazily computed structural polynomials for one prime.

    With ``trunc=k`` every monomial of total degree >= k is dropped; since
    Z[x]/(monomials of degree >= k) is torsion free the same recursion stays
    exact, and the result governs Witt arithmetic of vectors whose
    components lie in an ideal with vanishing k-fold products.
    """

    def __init__(self, p, max_index=None, trunc=None):
        self.p = p
        self.trunc = trunc
        if max_index is None:
            max_index = default_max_index(p) if trunc is None else 10**6
        self.max_index = max_index
        self.entries = {}
        self._powers = {}

    def _check(self, family, i):
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        if i < 0:
            raise ValueError("negative index")
        if i > self.max_index:
            raise LevelTooLarge(f"{family} index {i} exceeds max {self.max_index} for p={self.p}")

    def packed(self, family, i):
        self._check(family, i)
        key = (family, i)
        if key not in self.entries:
            for j in range(i):
                self.packed(family, j)
            self.entries[key] = self._solve(family, i)
        return self.entries[key]

    def poly(self, family, i):
        return to_univ(family, i, self.packed(family, i))

    def _power(self, family, j, k):
        """S_j^(p^k) for the family, cached incrementally."""
        lst = self._powers.setdefault((family, j), [self.entries[(family, j)]])
        while len(lst) <= k:
            lst.append(ppow(lst[-1], self.p, self.trunc))
        return lst[k]

    def _target(self, family, i):
        p, t = self.p, self.trunc
        if family == "sum":
            return padd(ghost_packed(p, i, 2, 0, t), ghost_packed(p, i, 2, 1, t))
        if family == "prod":
            return pmul(ghost_packed(p, i, 2, 0, t), ghost_packed(p, i, 2, 1, t), t)
        if family == "neg":
            return pscale(ghost_packed(p, i, 1, 0, t), -1)
        if family == "frob":
            return ghost_packed(p, i + 1, 1, 0, t)
        num = padd(ghost_packed(p, i + 1, 1, 0, t), ppow(ghost_packed(p, i, 1, 0, t), p, t), -1)
        return pdiv_exact(num, p, f"delta target {i}")

    def _solve(self, family, i):
        p = self.p
        rem = self._target(family, i)
        for j in range(i):
            rem = padd(rem, self._power(family, j, i - j), -(p ** j))
        return pdiv_exact(rem, p ** i, f"{family} index {i}")

    # -- persistence ------------------------------------------------------------
    def to_document(self):
        entries = []
        for (family, i) in sorted(self.entries, key=lambda t: (FAMILIES.index(t[0]), t[1])):
            poly = self.poly(family, i)
            terms = [{"exps": list(e), "coeff": str(c)} for e, c in sorted(poly.terms.items())]
            entries.append({"family": family, "i": i, "vars": list(poly.variables), "terms": terms})
        return {"p": self.p, "max_levels": self.max_index, "entries": entries}

    def dumps(self):
        return json.dumps(self.to_document(), sort_keys=True, separators=(",", ":")) + "\n"

    def save(self, path):
        if self.trunc is not None:
            raise ValueError("truncated caches are kept in memory only")
        tmp = f"{path}.tmp{os.getpid()}"
        with open(tmp, "w") as fh:
            fh.write(self.dumps())
        os.replace(tmp, path)

    @classmethod
    def loads(cls, text):
        try:
            doc = json.loads(text)
            cache = cls(int(doc["p"]), int(doc["max_levels"]))
        except (ValueError, KeyError, TypeError) as e:
            raise CorruptCache("header", -1, f"unreadable cache document: {e}") from None
        for ent in doc["entries"]:
            family, i = ent["family"], int(ent["i"])
            if family not in FAMILIES:
                raise CorruptCache(family, i, "unknown family")
            if list(ent["vars"]) != family_variables(family, i):
                raise CorruptCache(family, i, "variable list")
            terms = {tuple(int(e) for e in t["exps"]): int(t["coeff"]) for t in ent["terms"]}
            try:
                poly = UnivPoly(ent["vars"], terms)
            except ValueError:
                raise CorruptCache(family, i, "exponent length") from None
            cache.entries[(family, i)] = from_univ(family, i, poly)
        return cache

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.loads(fh.read())

    def verify(self):
        """Re-check every stored entry against its ghost identity."""
        p = self.p
        for (family, i) in sorted(self.entries, key=lambda t: (FAMILIES.index(t[0]), t[1])):
            for j in range(i + 1):
                if (family, j) not in self.entries:
                    raise CorruptCache(family, i, f"missing lower index {j}")
            lhs = {}
            for j in range(i + 1):
                lhs = padd(lhs, ppow(self.entries[(family, j)], p ** (i - j)), p ** j)
            if lhs != self._target_full(family, i):
                raise CorruptCache(family, i)
        return True

    def _target_full(self, family, i):
        saved, self.trunc = self.trunc, None
        try:
            return self._target(family, i)
        finally:
            self.trunc = saved


_SHARED = {}


def shared_cache(p, trunc=None):
    key = (p, trunc)
    if key not in _SHARED:
        _SHARED[key] = PolyCache(p, trunc=trunc)
    return _SHARED[key]


def install_cache(cache):
    """Make a loaded cache the shared one for its prime (entries are merged)."""
    cur = shared_cache(cache.p)
    for k, v in cache.entries.items():
        cur.entries.setdefault(k, v)
    return cur


def structural_poly(p, family, i):
    return shared_cache(p).poly(family, i)


def cache_io(path, mode, p=None, families=FAMILIES, max_index=None):
    """save: build (or reuse) the shared cache for p and write it;
    load: read a file and install it; verify: read and re-check."""
    if mode == "save":
        cache = shared_cache(p)
        top = cache.max_index if max_index is None else max_index
        for fam in families:
            for i in range(top + 1):
                cache.packed(fam, i)
        cache.save(path)
        return cache
    if mode == "load":
        return install_cache(PolyCache.load(path))
    if mode == "verify":
        cache = PolyCache.load(path)
        cache.verify()
        return cache
    raise ValueError(f"unknown mode {mode!r}")


# -- Artin-Hasse exponential ------------------------------------------------------

def ah_rational(p, D):
    """Exact coefficients of exp(sum_i T^(p^i)/p^i) up to degree D-1.

    From E' = E * sum_i T^(p^i - 1) one gets n c_n = sum_{p^i <= n} c_{n-p^i}.
    """
    c = [Fraction(1)]
    for n in range(1, D):
        s = Fraction(0)
        q = 1
        while q <= n:
            s += c[n - q]
            q *= p
        c.append(s / n)
    return c


class AHSeries:
    def __init__(self, p, m, D, coeffs):
        self.p, self.m, self.D = p, m, D
        self.modulus = p ** m
        self.coeffs = tuple(coeffs)

    def __repr__(self):
        return f"AHSeries(p={self.p}, mod {self.modulus}, {list(self.coeffs)})"

    def evaluate(self, R, a):
        """Sum of c_j a^j in a ring code space; requires a^D = 0."""
        total, power = 0, R.one
        for j, c in enumerate(self.coeffs):
            if j:
                power = R.mul(power, a)
                if power == 0:
                    break
            if c:
                total = R.add(total, R.mul(R.from_int(c), power))
        return total


def ah_series(p, m, D):
    mod = p ** m
    out = []
    for c in ah_rational(p, D):
        if c.denominator % p == 0:
            raise IntegralityFailure(f"Artin-Hasse coefficient {c} is not p-integral")
        out.append(c.numerator * pow(c.denominator, -1, mod) % mod)
    return AHSeries(p, m, D, out)
