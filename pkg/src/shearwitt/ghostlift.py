"""Witt arithmetic through integer ghost data.

A second route to Witt vector operations that never touches the universal
polynomials: vectors over R are lifted to the integer lift of R (structure
constants read in Z), where the ghost map is injective, and components are
recovered by exact division.
"""
from .errors import IntegralityFailure


class IntLift:
    """Z^d with the structure constants of R read as integers."""

    def __init__(self, R):
        self.R = R
        self.d = R.d
        self.sc = [[list(v) for v in row] for row in R.sc]
        self.one = list(R.unit_coords)

    def lift(self, code):
        return list(self.R.coords(code))

    def reduce(self, v):
        return self.R.encode(v)

    def add(self, a, b):
        return [x + y for x, y in zip(a, b)]

    def scale(self, c, a):
        return [c * x for x in a]

    def mul(self, a, b):
        acc = [0] * self.d
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        for k, c in enumerate(self.sc[i][j]):
                            if c:
                                acc[k] += x * y * c
        return acc

    def pow(self, a, e):
        r = list(self.one)
        for _ in range(e):
            r = self.mul(r, a)
        return r

    def zero(self):
        return [0] * self.d


def ghost_int(L, p, x):
    out = []
    for i in range(len(x)):
        acc = L.zero()
        for j in range(i + 1):
            acc = L.add(acc, L.scale(p ** j, L.pow(x[j], p ** (i - j))))
        out.append(acc)
    return out


def solve_components(L, p, g):
    xs = []
    for n in range(len(g)):
        acc = list(g[n])
        for j in range(n):
            t = L.scale(p ** j, L.pow(xs[j], p ** (n - j)))
            acc = [a - b for a, b in zip(acc, t)]
        q = []
        for c in acc:
            if c % p ** n:
                raise IntegralityFailure("ghost data is not integral")
            q.append(c // p ** n)
        xs.append(q)
    return xs


def oracle_op(R, kind, x, y=None):
    """Witt add/mul/neg/frob/delta of code tuples through integer ghost data."""
    L, p = IntLift(R), R.p
    X = [L.lift(c) for c in x]
    gx = ghost_int(L, p, X)
    if kind == "add":
        gy = ghost_int(L, p, [L.lift(c) for c in y])
        g = [L.add(a, b) for a, b in zip(gx, gy)]
    elif kind == "mul":
        gy = ghost_int(L, p, [L.lift(c) for c in y])
        g = [L.mul(a, b) for a, b in zip(gx, gy)]
    elif kind == "neg":
        g = [L.scale(-1, a) for a in gx]
    elif kind == "frob":
        g = gx[1:]
    elif kind == "delta":
        g = []
        for i in range(len(gx) - 1):
            num = [a - b for a, b in zip(gx[i + 1], L.pow(gx[i], p))]
            if any(c % p for c in num):
                raise IntegralityFailure("delta ghost data is not integral")
            g.append([c // p for c in num])
    else:
        raise ValueError(kind)
    return tuple(L.reduce(v) for v in solve_components(L, p, g))
