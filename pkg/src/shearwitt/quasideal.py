"""Quasi-ideals, their cones and homology of finite instances.

Groups here are presented operationally: an explicit list of hashable
elements together with the ambient addition.  Nothing assumes that the
addition is linear in coordinates, so Witt vectors, sheared pairs and
quotient classes all fit.
"""
import random
from collections import deque

from .errors import BudgetExceeded, NotAChainMap

DEFAULT_BUDGET = 10**5


class CarrierGroup:
    """A finite abelian group given by its elements and the ambient operations."""

    def __init__(self, elements, add, neg, zero, name=""):
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError(f"{name}: repeated elements")
        self.add = add
        self.neg = neg
        self.zero = zero
        self.name = name
        self._orders = None

    @classmethod
    def closure(cls, gens, add, neg, zero, name="", budget=DEFAULT_BUDGET):
        """The subgroup generated by gens, found by breadth-first search."""
        seen = {zero}
        queue = deque([zero])
        gens = [g for g in gens if g != zero]
        while queue:
            x = queue.popleft()
            for g in gens:
                y = add(x, g)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > budget:
                        raise BudgetExceeded(len(seen), budget)
                    queue.append(y)
        return cls(sorted(seen, key=repr), add, neg, zero, name)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.index

    def __iter__(self):
        return iter(self.elements)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def check_closed(self):
        """None if closed under + and -, else a witness."""
        if self.zero not in self.index:
            return ("zero", self.zero)
        for x in self.elements:
            if self.neg(x) not in self.index:
                return ("neg", x)
            for y in self.elements:
                if self.add(x, y) not in self.index:
                    return ("add", x, y)
        return None

    def multiple(self, n, x):
        acc = self.zero
        for _ in range(n):
            acc = self.add(acc, x)
        return acc

    def orders(self, p):
        """Order of every element, assuming a p-group."""
        if self._orders is None:
            out = {}
            for x in self.elements:
                k, y = 0, x
                while y != self.zero:
                    y = self.multiple(p, y)
                    k += 1
                    if k > 64:
                        raise ValueError(f"{self.name or 'group'}: element of order not a power of {p}")
                out[x] = p ** k
            self._orders = out
        return self._orders

    def invariant_factors(self, p):
        """Sorted cyclic factor orders, read off from the counts |G[p^k]|."""
        orders = self.orders(p)
        logs = {}
        for o in orders.values():
            k = 0
            while p ** k < o:
                k += 1
            logs[k] = logs.get(k, 0) + 1
        top = max(logs) if logs else 0
        torsion = []
        acc = 0
        for k in range(top + 1):
            acc += logs.get(k, 0)
            torsion.append(acc)
        rank = []
        for k in range(1, top + 1):
            r = 0
            q = torsion[k] // torsion[k - 1]
            while q > 1:
                q //= p
                r += 1
            rank.append(r)
        factors = []
        for k in range(1, top + 1):
            nxt = rank[k] if k < top else 0
            factors += [p ** k] * (rank[k - 1] - nxt)
        return sorted(factors)

    def is_cyclic(self, p):
        return len(self.invariant_factors(p)) <= 1


class RingCarrier(CarrierGroup):
    """A finite commutative ring given by elements, +, -, * and 1."""

    def __init__(self, elements, add, neg, zero, mul, one, name=""):
        super().__init__(elements, add, neg, zero, name)
        self.mul = mul
        self.one = one


class QuasiIdealInstance:
    """d: I -> A with an A-action on I, A-linear and with d(x) y = d(y) x."""

    def __init__(self, A, I, act, d, name=""):
        self.A = A
        self.I = I
        self.act = act
        self.d = d
        self.name = name


def _pairs(X, Y, mode, rng, budget):
    if mode == "exhaustive":
        need = len(X) * len(Y)
        if need > budget:
            raise BudgetExceeded(need, budget)
        for x in X:
            for y in Y:
                yield x, y
    else:
        xs, ys = X.elements, Y.elements
        for _ in range(int(mode)):
            yield rng.choice(xs), rng.choice(ys)


def check_quasi_ideal(q, mode="exhaustive", seed=0, budget=10**6):
    """Check A-linearity, additivity of d and the quasi-ideal law.

    mode is "exhaustive" or a sample count.
    """
    A, I = q.A, q.I
    rng = random.Random(seed)
    rep = {"linear": True, "additive": True, "law": True, "closed": True, "witness": None}

    def fail(key, w):
        rep[key] = False
        if rep["witness"] is None:
            rep["witness"] = (key, w)

    for a, x in _pairs(A, I, mode, rng, budget):
        ax = q.act(a, x)
        if ax not in I:
            fail("closed", (a, x))
        elif q.d(ax) != A.mul(a, q.d(x)):
            fail("linear", (a, x))
    for x, y in _pairs(I, I, mode, rng, budget):
        if q.d(I.add(x, y)) != A.add(q.d(x), q.d(y)):
            fail("additive", (x, y))
        if q.act(q.d(x), y) != q.act(q.d(y), x):
            fail("law", (x, y))
    rep["ok"] = rep["linear"] and rep["additive"] and rep["law"] and rep["closed"]
    return rep


class ConeInstance:
    """The DG ring A + I[1]: (a, x)(b, y) = (ab, a y + b x), D(a, x) = (d x, 0)."""

    def __init__(self, q):
        self.q = q

    def mul(self, u, v):
        q = self.q
        A, I = q.A, q.I
        (a, x), (b, y) = u, v
        return (A.mul(a, b), I.add(q.act(a, y), q.act(b, x)))

    def add(self, u, v):
        return (self.q.A.add(u[0], v[0]), self.q.I.add(u[1], v[1]))

    def D(self, u):
        return (self.q.d(u[1]), self.q.I.zero)

    def homogeneous(self):
        A, I = self.q.A, self.q.I
        return ([(a, I.zero) for a in A] + [(A.zero, x) for x in I if x != I.zero])

    def check(self, budget=10**6, samples=None, seed=0):
        """Associativity and the graded Leibniz rule on homogeneous elements."""
        q = self.q
        A, I = q.A, q.I
        hom = self.homogeneous()
        rng = random.Random(seed)

        def deg(u):
            return -1 if u[0] == A.zero and u[1] != I.zero else 0

        def sign(u, v):
            return v if deg(u) == 0 else (A.neg(v[0]), I.neg(v[1]))

        if samples is None:
            need = len(hom) ** 3
            if need > budget:
                raise BudgetExceeded(need, budget)
            triples = ((u, v, w) for u in hom for v in hom for w in hom)
            pairs = ((u, v) for u in hom for v in hom)
        else:
            triples = ((rng.choice(hom), rng.choice(hom), rng.choice(hom)) for _ in range(samples))
            pairs = ((rng.choice(hom), rng.choice(hom)) for _ in range(samples))
        rep = {"associative": True, "leibniz": True, "witness": None}
        for u, v, w in triples:
            if self.mul(self.mul(u, v), w) != self.mul(u, self.mul(v, w)):
                rep["associative"] = False
                rep["witness"] = ("associative", u, v, w)
                break
        for u, v in pairs:
            lhs = self.D(self.mul(u, v))
            rhs = self.add(self.mul(self.D(u), v), sign(u, self.mul(u, self.D(v))))
            if lhs != rhs:
                rep["leibniz"] = False
                rep["witness"] = rep["witness"] or ("leibniz", u, v)
                break
        rep["ok"] = rep["associative"] and rep["leibniz"]
        return rep


# -- homology -------------------------------------------------------------------------

class Quotient:
    """A / S for a subgroup S of a carrier, with cosets labelled by integers."""

    def __init__(self, G, S):
        self.G = G
        label = {}
        reps = []
        for x in G.elements:
            if x in label:
                continue
            c = len(reps)
            reps.append(x)
            for s in S:
                label[G.add(x, s)] = c
        self.label = label
        self.reps = reps
        sub_size = len(S)
        if len(reps) * sub_size != len(G):
            raise ValueError("subgroup does not partition the group")
        self.group = CarrierGroup(range(len(reps)), self._add, self._neg, label[G.zero],
                                  name=f"{G.name}/im")

    def cls(self, x):
        return self.label[x]

    def _add(self, c, e):
        return self.label[self.G.add(self.reps[c], self.reps[e])]

    def _neg(self, c):
        return self.label[self.G.neg(self.reps[c])]

    def __len__(self):
        return len(self.reps)


class Homology:
    """H0 = coker d with its ring structure, H^-1 = ker d."""

    def __init__(self, q, p):
        A, I = q.A, q.I
        self.q = q
        self.p = p
        self.dtab = {x: q.d(x) for x in I}
        image = sorted(set(self.dtab.values()), key=repr)
        self.image = image
        self.kernel = CarrierGroup([x for x in I if self.dtab[x] == A.zero], I.add, I.neg,
                                   I.zero, name=f"ker {q.name}")
        self.H0 = Quotient(A, image)

    def h0_mul(self, c, e):
        Q = self.H0
        return Q.cls(self.q.A.mul(Q.reps[c], Q.reps[e]))

    def h0_is_ring_quotient(self):
        """im d is an ideal, so the product of classes is well defined."""
        A = self.q.A
        return all(A.mul(a, i) in self.H0.label and self.H0.cls(A.mul(a, i)) == self.H0.cls(A.zero)
                   for a in A for i in self.image)

    def h0_is_Z_mod(self):
        """H0 is cyclic and generated by the class of 1; returns its order or None."""
        Q = self.H0
        one = Q.cls(self.q.A.one)
        G = Q.group
        seen, x = {G.zero}, one
        while x not in seen:
            seen.add(x)
            x = G.add(x, one)
        return len(Q) if len(seen) == len(Q) else None

    def counts_consistent(self):
        A, I = self.q.A, self.q.I
        return (len(self.H0) * len(self.image) == len(A)
                and len(self.kernel) * len(self.image) == len(I))

    def summary(self):
        return {"A": len(self.q.A), "I": len(self.q.I), "image": len(self.image),
                "H0": len(self.H0), "Hm1": len(self.kernel),
                "H0_factors": self.H0.group.invariant_factors(self.p),
                "Hm1_factors": self.kernel.invariant_factors(self.p)}


def homology(q, p, budget=DEFAULT_BUDGET):
    if len(q.A) > budget or len(q.I) > budget:
        raise BudgetExceeded(max(len(q.A), len(q.I)), budget)
    return Homology(q, p)


# -- chain maps -----------------------------------------------------------------------

class ChainMap:
    """f0: A -> A', f1: I -> I' between two quasi-ideal instances."""

    def __init__(self, src, tgt, f0, f1, name=""):
        self.src = src
        self.tgt = tgt
        self.f0 = f0
        self.f1 = f1
        self.name = name

    def verify(self, samples=None, seed=0):
        """Raise NotAChainMap with a witness if a required identity fails."""
        s, t = self.src, self.tgt
        f0, f1 = self.f0, self.f1
        for x in s.I:
            y = f1(x)
            if y not in t.I:
                raise NotAChainMap("f1 lands outside the target", x)
            if f0(s.d(x)) != t.d(y):
                raise NotAChainMap("d commutes", x)
        for a in s.A:
            if f0(a) not in t.A:
                raise NotAChainMap("f0 lands outside the target", a)
        if f0(s.A.one) != t.A.one:
            raise NotAChainMap("unit", s.A.one)
        rng = random.Random(seed)
        if samples is None:
            pa = ((a, b) for a in s.A for b in s.A)
            pi = ((a, x) for a in s.A for x in s.I)
        else:
            pa = ((rng.choice(s.A.elements), rng.choice(s.A.elements)) for _ in range(samples))
            pi = ((rng.choice(s.A.elements), rng.choice(s.I.elements)) for _ in range(samples))
        for a, b in pa:
            if f0(s.A.add(a, b)) != t.A.add(f0(a), f0(b)):
                raise NotAChainMap("f0 additive", (a, b))
            if f0(s.A.mul(a, b)) != t.A.mul(f0(a), f0(b)):
                raise NotAChainMap("f0 multiplicative", (a, b))
        for a, x in pi:
            if f1(s.act(a, x)) != t.act(f0(a), f1(x)):
                raise NotAChainMap("f1 linear", (a, x))
        xs = s.I.elements
        pairs = ((x, y) for x in xs for y in xs) if samples is None else \
            ((rng.choice(xs), rng.choice(xs)) for _ in range(samples))
        for x, y in pairs:
            if f1(s.I.add(x, y)) != t.I.add(f1(x), f1(y)):
                raise NotAChainMap("f1 additive", (x, y))
        return True


def quasi_iso(f, p, samples=None, seed=0, cover=None, budget=DEFAULT_BUDGET):
    """Certify that a chain map induces bijections on H0 and H^-1.

    cover, if given, is a callable taking a target H0 representative not hit
    pointwise and returning True when it is hit after passing to a cover of
    the base; this is how local surjectivity is certified.
    """
    f.verify(samples=samples, seed=seed)
    hs = homology(f.src, p, budget)
    ht = homology(f.tgt, p, budget)
    m1 = {x: f.f1(x) for x in hs.kernel}
    m1_inj = len(set(m1.values())) == len(m1)
    m1_surj = set(m1.values()) == set(ht.kernel.elements)
    m0 = {c: ht.H0.cls(f.f0(hs.H0.reps[c])) for c in range(len(hs.H0))}
    zero_t = ht.H0.group.zero
    kernel0 = [c for c, e in m0.items() if e == zero_t]
    m0_inj = len(kernel0) == 1
    hit = set(m0.values())
    missed = [c for c in range(len(ht.H0)) if c not in hit]
    m0_surj = not missed
    local = None
    if missed and cover is not None:
        local = all(cover(ht.H0.reps[c]) for c in missed)
    rep = {"source": hs.summary(), "target": ht.summary(),
           "Hm1_injective": m1_inj, "Hm1_surjective": m1_surj,
           "H0_injective": m0_inj, "H0_surjective": m0_surj,
           "H0_missed": len(missed), "H0_locally_surjective": local,
           "counts_consistent": hs.counts_consistent() and ht.counts_consistent()}
    rep["pointwise_quasi_iso"] = m1_inj and m1_surj and m0_inj and m0_surj
    rep["quasi_iso"] = m1_inj and m1_surj and m0_inj and (m0_surj or bool(local))
    if len(hs.H0) <= 64:
        rep["H0_table"] = [m0[c] for c in range(len(hs.H0))]
    return rep


def compose(g, f, name=""):
    return ChainMap(f.src, g.tgt, lambda a: g.f0(f.f0(a)), lambda x: g.f1(f.f1(x)), name)


def induced_h0(f, hs, ht):
    return {c: ht.H0.cls(f.f0(hs.H0.reps[c])) for c in range(len(hs.H0))}


# -- small instances ------------------------------------------------------------------

def zmod_ring(n):
    return RingCarrier(range(n), lambda a, b: (a + b) % n, lambda a: -a % n, 0,
                       lambda a, b: a * b % n, 1 % n, name=f"Z/{n}")


def ideal_instance(n, k):
    """The honest ideal k Z/n -> Z/n."""
    A = zmod_ring(n)
    I = CarrierGroup(sorted({k * a % n for a in range(n)}), A.add, A.neg, 0, name=f"{k}Z/{n}")
    return QuasiIdealInstance(A, I, lambda a, x: a * x % n, lambda x: x, name=f"{k}Z/{n}")


def zero_differential(n):
    """I = A with d = 0: the square-zero extension."""
    A = zmod_ring(n)
    I = CarrierGroup(range(n), A.add, A.neg, 0, name=f"Z/{n}")
    return QuasiIdealInstance(A, I, lambda a, x: a * x % n, lambda x: 0, name="d=0")
