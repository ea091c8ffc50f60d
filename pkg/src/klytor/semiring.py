"""Idempotent semifields used here: (Q ∪ {∞}, min, +) and (PL(N, Z) ∪ {∞}, min, +)."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Sequence


@total_ordering
class _Infinity:
    """The absorbing element for + and neutral element for min."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("klytor-infinity")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__


INF = _Infinity()


def is_inf(x) -> bool:
    return x is INF


class Semifield:
    """Interface: ``plus`` is the idempotent addition (min), ``times`` is +."""

    zero = INF

    def plus(self, a, b):
        raise NotImplementedError

    def times(self, a, b):
        raise NotImplementedError

    def equal(self, a, b) -> bool:
        raise NotImplementedError

    def total(self, terms: Sequence):
        acc = self.zero
        for t in terms:
            acc = self.plus(acc, t)
        return acc

    def is_tropically_singular(self, terms: Sequence) -> bool:
        """Every term can be dropped from the sum without changing it."""
        full = self.total(terms)
        for j in range(len(terms)):
            rest = self.total([t for i, t in enumerate(terms) if i != j])
            if not self.equal(rest, full):
                return False
        return True


class RationalMinPlus(Semifield):
    one = Fraction(0)

    def plus(self, a, b):
        if a is INF:
            return b
        if b is INF:
            return a
        return min(a, b)

    def times(self, a, b):
        if a is INF or b is INF:
            return INF
        return a + b

    def equal(self, a, b) -> bool:
        if a is INF or b is INF:
            return a is b
        return a == b


class PLMinPlus(Semifield):
    """PL functions with pointwise min and sum."""

    def plus(self, a, b):
        from .plfunc import min_pl
        if a is INF:
            return b
        if b is INF:
            return a
        return min_pl(a, b)

    def times(self, a, b):
        from .plfunc import add_pl
        if a is INF or b is INF:
            return INF
        return add_pl(a, b)

    def equal(self, a, b) -> bool:
        from .plfunc import pl_equal
        if a is INF or b is INF:
            return a is b
        return pl_equal(a, b)


RATIONAL = RationalMinPlus()
PL = PLMinPlus()
