"""Brute-force arithmetic in F_q = F_p[x]/(f), for test oracles only."""

from __future__ import annotations

from functools import cached_property
from itertools import product


def _factor_prime_power(q):
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    assert r == 1, f"{q} is not a prime power"
    return p, k


class GF:
    def __init__(self, q: int):
        self.q = q
        self.p, self.k = _factor_prime_power(q)
        self.modulus = self._irreducible()
        self.elements = list(product(range(self.p), repeat=self.k))
        self.zero = (0,) * self.k
        self.one = (1,) + (0,) * (self.k - 1)

    def _irreducible(self):
        # monic, degree k, no root and no factor of degree <= k/2 (checked by brute force)
        p, k = self.p, self.k
        if k == 1:
            return None
        for tail in product(range(p), repeat=k):
            poly = list(tail) + [1]  # coefficients low to high
            if all(not _divides(d, poly, p) for d in _monics_up_to(k // 2, p)):
                return poly
        raise AssertionError("no irreducible polynomial found")

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        if k > 1:
            for d in range(len(prod) - 1, k - 1, -1):
                c = prod[d]
                if c:
                    for i, m in enumerate(self.modulus):
                        prod[d - k + i] = (prod[d - k + i] - c * m) % p
        return tuple(prod[:k])

    def power(self, a, e):
        out = self.one
        for _ in range(e):
            out = self.mul(out, a)
        return out

    @cached_property
    def units(self):
        return [a for a in self.elements if a != self.zero]

    @cached_property
    def generator(self):
        for g in self.units:
            seen, x = set(), self.one
            for _ in range(self.q - 1):
                x = self.mul(x, g)
                seen.add(x)
            if len(seen) == self.q - 1:
                return g
        raise AssertionError("no generator")

    def from_int(self, n):
        return tuple([n % self.p] + [0] * (self.k - 1))

    @cached_property
    def squares(self):
        return {self.mul(a, a) for a in self.units}


def _monics_up_to(deg, p):
    for d in range(1, deg + 1):
        for tail in product(range(p), repeat=d):
            yield list(tail) + [1]


def _divides(d, poly, p):
    rem = list(poly)
    while len(rem) >= len(d):
        c = rem[-1]
        shift = len(rem) - len(d)
        for i, x in enumerate(d):
            rem[shift + i] = (rem[shift + i] - c * x) % p
        rem.pop()
        while rem and rem[-1] == 0:
            rem.pop()
    return not any(rem)
