"""Independent reference computations used by the tests.

Nothing here touches the universal polynomials: Witt arithmetic is redone
over the integer lift of a ring (structure constants read in Z), where the
ghost map is injective and components can be solved for by exact division.
"""
from fractions import Fraction

from shearwitt.ghostlift import IntLift, ghost_int, oracle_op, solve_components  # noqa: F401


def mobius(n):
    r, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            r = -r
        k += 1
    return -r if n > 1 else r


def binom_series(alpha, D):
    """(1 + S)^alpha coefficients for a Fraction alpha, S a formal variable."""
    out, c = [], Fraction(1)
    for k in range(D):
        out.append(c)
        c = c * (alpha - k) / (k + 1)
    return out


def series_mul(a, b, D):
    out = [Fraction(0)] * D
    for i, x in enumerate(a[:D]):
        if x:
            for j, y in enumerate(b[:D - i]):
                out[i + j] += x * y
    return out


def dwork_product(p, D):
    """E_p(T) = prod_{(n,p)=1} (1 - T^n)^(-mu(n)/n), truncated at degree D."""
    res = [Fraction(1)] + [Fraction(0)] * (D - 1)
    for n in range(1, D):
        if n % p == 0 or mobius(n) == 0:
            continue
        coeffs = binom_series(Fraction(-mobius(n), n), D)
        fac = [Fraction(0)] * D
        for k, c in enumerate(coeffs):
            if n * k < D:
                fac[n * k] += c * (-1) ** k
        res = series_mul(res, fac, D)
    return res


def series_inverse(a, D):
    inv = [Fraction(0)] * D
    inv[0] = 1 / a[0]
    for n in range(1, D):
        inv[n] = -sum(a[k] * inv[n - k] for k in range(1, n + 1)) / a[0]
    return inv


def nilpotent_by_search(R, a):
    x = a
    for _ in range(R.size + 1):
        if x == 0:
            return True
        x = R.mul(x, a)
    return x == 0
