"""Truncated power series with exact rational coefficients, and the melonic
two- and four-point generating functions built on them."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache


class PowerSeries:
    """Power series truncated after ``x**order``.

    Binary operations truncate to the smaller order of the operands.
    Coefficients are kept as Fractions (ints are promoted).
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order=None):
        coeffs = [Fraction(c) for c in coeffs]
        if order is None:
            order = max(len(coeffs) - 1, 0)
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        coeffs = coeffs[: order + 1]
        coeffs += [Fraction(0)] * (order + 1 - len(coeffs))
        self.coeffs = coeffs
        self.order = order

    # constructors ---------------------------------------------------------
    @classmethod
    def x(cls, order):
        return cls([0, 1], order)

    @classmethod
    def const(cls, c, order):
        return cls([c], order)

    def __getitem__(self, n):
        if n < 0:
            return Fraction(0)
        if n > self.order:
            raise IndexError(f"coefficient {n} beyond truncation order {self.order}")
        return self.coeffs[n]

    def __repr__(self):
        terms = [f"{c}*x^{n}" for n, c in enumerate(self.coeffs) if c]
        return "PowerSeries(" + (" + ".join(terms) or "0") + f" + O(x^{self.order + 1}))"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PowerSeries.const(other, self.order)
        if not isinstance(other, PowerSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return self.coeffs[: n + 1] == other.coeffs[: n + 1]

    __hash__ = None

    def _coerce(self, other):
        if isinstance(other, PowerSeries):
            return other
        return PowerSeries.const(other, self.order)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        return PowerSeries([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            c = Fraction(other)
            return PowerSeries([c * a for a in self.coeffs], self.order)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            if a[i]:
                ai = a[i]
                for j in range(n + 1 - i):
                    out[i + j] += ai * b[j]
        return PowerSeries(out, n)

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        inv0 = 1 / a[0]
        b = [inv0]
        for n in range(1, self.order + 1):
            s = sum(a[k] * b[n - k] for k in range(1, n + 1))
            b.append(-s * inv0)
        return PowerSeries(b, self.order)

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            return self * (1 / Fraction(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        out = PowerSeries.const(1, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int):
        """Multiply by x**k (k may be negative if the low coefficients vanish)."""
        if k >= 0:
            return PowerSeries([0] * k + self.coeffs, self.order + k)
        if any(self.coeffs[:-k]):
            raise ValueError("cannot divide by x: low coefficients are non-zero")
        return PowerSeries(self.coeffs[-k:], self.order + k)

    def truncate(self, order: int):
        return PowerSeries(self.coeffs, min(order, self.order))

    def derivative(self):
        return PowerSeries([k * c for k, c in enumerate(self.coeffs)][1:], max(self.order - 1, 0))

    def integral(self, c0=0):
        return PowerSeries([Fraction(c0)] + [c / (k + 1) for k, c in enumerate(self.coeffs)],
                           self.order + 1)

    def compose(self, inner):
        """self(inner(x)); requires inner(0) = 0."""
        if inner.coeffs[0] != 0:
            raise ValueError("composition needs an inner series without constant term")
        n = min(self.order, inner.order)
        out = PowerSeries.const(self.coeffs[n], n)
        for c in reversed(self.coeffs[:n]):
            out = out * inner.truncate(n) + c
        return out

    def sqrt(self):
        """Square root with constant term 1 (requires self(0) = 1)."""
        a = self.coeffs
        if a[0] != 1:
            raise ValueError("sqrt implemented for series with constant term 1")
        b = [Fraction(1)]
        for n in range(1, self.order + 1):
            s = sum(b[k] * b[n - k] for k in range(1, n))
            b.append((a[n] - s) / 2)
        return PowerSeries(b, self.order)

    def log(self):
        """Logarithm of a series with constant term 1."""
        if self.coeffs[0] != 1:
            raise ValueError("log implemented for series with constant term 1")
        return (self.derivative() / self.truncate(self.order - 1 if self.order else 0)).integral()

    def exp(self):
        if self.coeffs[0] != 0:
            raise ValueError("exp implemented for series without constant term")
        a = self.coeffs
        b = [Fraction(1)]
        # b' = a' b  =>  n b_n = sum_k k a_k b_{n-k}
        for n in range(1, self.order + 1):
            b.append(sum(k * a[k] * b[n - k] for k in range(1, n + 1)) / n)
        return PowerSeries(b, self.order)

    def __call__(self, x):
        out = 0
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def is_zero(self):
        return not any(self.coeffs)


# ---------------------------------------------------------------------------
# melonic counting
# ---------------------------------------------------------------------------

N_COLOURS = 5


def catalan(n: int) -> int:
    if n < 0:
        raise ValueError("Catalan numbers need n >= 0")
    return math.comb(2 * n, n) // (n + 1)


def sigma_gf_coefficient(n: int) -> int:
    """Number of melonic 2-point graphs of order n (colour of the root fixed)."""
    if n < 1:
        raise ValueError("order must be >= 1")
    return N_COLOURS ** (n - 1) * catalan(n - 1)


def sigma_gf_series(order: int) -> PowerSeries:
    """Solution of 5 S^2 - S + x = 0 with S(0) = 0, built coefficient by coefficient."""
    if order < 1:
        raise ValueError("order must be >= 1")
    s = [Fraction(0)] * (order + 1)
    s[1] = Fraction(1)
    for n in range(2, order + 1):
        s[n] = N_COLOURS * sum(s[k] * s[n - k] for k in range(1, n))
    return PowerSeries(s, order)


def sigma_closed_form(order: int) -> PowerSeries:
    """(1 - sqrt(1 - 20 x)) / 10, expanded with the series square root."""
    x = PowerSeries.x(order)
    return (1 - (1 - 20 * x).sqrt()) / 10


def gamma4_gf_series(order: int) -> PowerSeries:
    """x (1 - 5x - 5S) / (1 - 6x - 5S) with S the melonic self-energy series."""
    if order < 1:
        raise ValueError("order must be >= 1")
    x = PowerSeries.x(order)
    S = sigma_gf_series(order)
    return x * (1 - 5 * x - 5 * S) / (1 - 6 * x - 5 * S)


def gamma4_asymptotic(n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    # 20^n overflows floats past n ~ 236; go through logs
    return math.exp(n * math.log(20.0) - math.log(64.0) - 0.5 * math.log(math.pi * n ** 3))


@lru_cache(maxsize=None)
def _plane_trees(edges: int) -> tuple:
    """All rooted plane trees with ``edges`` edges as nested tuples of children."""
    if edges == 0:
        return ((),)
    out = []
    # first child subtree takes k edges (plus its connecting edge), the rest stay at the root
    for k in range(edges):
        for first in _plane_trees(k):
            for rest in _plane_trees(edges - 1 - k):
                out.append((first,) + rest)
    return tuple(out)


def _tree_edges(t) -> int:
    return sum(1 + _tree_edges(c) for c in t)


def enumerate_melonic_2pt(n: int) -> int:
    """Brute-force count: list the rooted plane trees with n-1 edges, each
    edge carrying one of five colours."""
    if not 1 <= n <= 8:
        raise ValueError("enumeration is limited to 1 <= n <= 8")
    total = 0
    for t in _plane_trees(n - 1):
        total += N_COLOURS ** _tree_edges(t)
    return total


def plane_tree_count(edges: int) -> int:
    return len(_plane_trees(edges))
