"""Exact Hilbert series: windowed values plus rational forms.

Every catalogued module has a rational form numerator over the fixed
denominator prod_i (1 - t^{w_i}); equality of rational forms is equality of
integer Laurent polynomials, so Hilbert comparisons are window-free.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RationalForm:
    """numerator / prod(1 - t^w), numerator a sorted integer Laurent polynomial."""

    numerator: tuple[tuple[int, int], ...]  # (degree, coefficient)
    weights: tuple[int, ...]

    @staticmethod
    def from_dict(num: dict[int, int], weights) -> RationalForm:
        return RationalForm(
            tuple(sorted((d, c) for d, c in num.items() if c != 0)), tuple(weights)
        )

    def is_zero(self) -> bool:
        return not self.numerator

    def __add__(self, other: RationalForm) -> RationalForm:
        if self.weights != other.weights:
            raise ValueError("rational forms over different denominators")
        acc = dict(self.numerator)
        for d, c in other.numerator:
            acc[d] = acc.get(d, 0) + c
        return RationalForm.from_dict(acc, self.weights)

    def __sub__(self, other: RationalForm) -> RationalForm:
        return self + other.scale(-1)

    def scale(self, k: int) -> RationalForm:
        return RationalForm(
            tuple((d, c * k) for d, c in self.numerator), self.weights
        )

    def shift(self, s: int) -> RationalForm:
        """Rational form of M(s): multiply numerator by t^{-s}."""
        return RationalForm(
            tuple((d - s, c) for d, c in self.numerator), self.weights
        )

    def min_degree(self) -> int | None:
        """Least degree with a nonzero value, None for the zero series."""
        if not self.numerator:
            return None
        return self.numerator[0][0]

    def expand(self, lo: int, hi: int) -> list[int]:
        """Series coefficients on [lo, hi]."""
        if not self.numerator:
            return [0] * (hi - lo + 1)
        base = self.numerator[0][0]
        n = hi - base + 1
        if n <= 0:
            return [0] * (hi - lo + 1)
        # ambient series 1/prod(1-t^w) by repeated prefix sums
        s = [0] * n
        s[0] = 1
        for w in self.weights:
            for i in range(w, n):
                s[i] += s[i - w]
        out = []
        for d in range(lo, hi + 1):
            v = 0
            for k, c in self.numerator:
                if d - k >= 0 and d - k < n:
                    v += c * s[d - k]
            out.append(v)
        return out

    def value_at(self, d: int) -> int:
        return self.expand(d, d)[0]

    def free_decomposition(self, relation_degree: int) -> dict[int, int] | None:
        """Write self as a sum of free-module series, if possible.

        Returns {shift: multiplicity} with the series equal to
        sum R(shift)^mult, or None if the numerator is not a non-negative
        combination of t^{-shift} (1 - t^e).
        """
        rem = dict(self.numerator)
        out: dict[int, int] = {}
        guard = 0
        while rem:
            guard += 1
            if guard > 10000:
                return None
            d = min(rem)
            c = rem[d]
            if c < 0:
                return None
            out[-d] = out.get(-d, 0) + c
            for k, v in ((d, -c), (d + relation_degree, c)):
                nv = rem.get(k, 0) + v
                if nv == 0:
                    rem.pop(k, None)
                else:
                    rem[k] = nv
        return out


@dataclass(frozen=True)
class HilbertSeries:
    window: tuple[int, int]
    values: tuple[int, ...]
    rational_form: RationalForm | None = None

    def value(self, d: int) -> int:
        lo, hi = self.window
        if lo <= d <= hi:
            return self.values[d - lo]
        if self.rational_form is not None:
            return self.rational_form.value_at(d)
        raise IndexError(f"degree {d} outside window {self.window}")
