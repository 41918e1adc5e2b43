"""Sparse homogeneous polynomials over the rationals.

Monomials are exponent tuples, one slot per ring variable.  Coefficients are
exact ``fractions.Fraction`` values; nothing here ever touches floats.  Poly
objects are immutable and hashable so they can key memo tables.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Mono = tuple[int, ...]


def parse_fraction(s: str) -> Fraction:
    """Parse 'n' or 'n/d' with arbitrary-precision integers."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def format_fraction(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Poly:
    """A polynomial as a sorted tuple of (exponent tuple, coefficient) terms."""

    terms: tuple[tuple[Mono, Fraction], ...]

    @staticmethod
    def zero() -> Poly:
        return Poly(())

    @staticmethod
    def from_dict(d: dict[Mono, Fraction]) -> Poly:
        items = tuple(sorted((m, c) for m, c in d.items() if c != 0))
        return Poly(items)

    @staticmethod
    def from_pairs(pairs, nvars: int) -> Poly:
        """Build from [(coeff, exponents), ...]; coeff may be str/int/Fraction."""
        acc: dict[Mono, Fraction] = {}
        for coeff, expo in pairs:
            if isinstance(coeff, str):
                c = parse_fraction(coeff)
            else:
                c = Fraction(coeff)
            m = tuple(int(e) for e in expo)
            if len(m) != nvars:
                raise ValueError(f"exponent vector {m} has wrong length (want {nvars})")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            acc[m] = acc.get(m, Fraction(0)) + c
        return Poly.from_dict(acc)

    @staticmethod
    def monomial(m: Mono, coeff: Fraction | int = 1) -> Poly:
        c = Fraction(coeff)
        if c == 0:
            return Poly(())
        return Poly(((tuple(m), c),))

    def to_pairs(self) -> list[list]:
        return [[format_fraction(c), list(m)] for m, c in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: Poly) -> Poly:
        acc = dict(self.terms)
        for m, c in other.terms:
            v = acc.get(m, Fraction(0)) + c
            if v == 0:
                acc.pop(m, None)
            else:
                acc[m] = v
        return Poly(tuple(sorted(acc.items())))

    def __neg__(self) -> Poly:
        return Poly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        acc: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(a + b for a, b in zip(m1, m2))
                v = acc.get(m, Fraction(0)) + c1 * c2
                if v == 0:
                    acc.pop(m, None)
                else:
                    acc[m] = v
        return Poly(tuple(sorted(acc.items())))

    def scale(self, q: Fraction | int) -> Poly:
        q = Fraction(q)
        if q == 0:
            return Poly(())
        return Poly(tuple((m, c * q) for m, c in self.terms))

    def weighted_degree(self, weights: tuple[int, ...]) -> int | None:
        """Common weighted degree of all terms; None for zero, error if mixed."""
        if not self.terms:
            return None
        degs = {sum(e * w for e, w in zip(m, weights)) for m, _ in self.terms}
        if len(degs) != 1:
            raise ValueError(f"inhomogeneous polynomial: degrees {sorted(degs)}")
        return degs.pop()

    def substitute(self, images: list[list[Fraction]]) -> list[Fraction]:
        """Evaluate at univariate polynomials (dense coefficient lists in t)."""
        out = [Fraction(0)]
        for m, c in self.terms:
            term = [c]
            for e, img in zip(m, images):
                for _ in range(e):
                    term = uni_mul(term, img)
            out = uni_add(out, term)
        return uni_trim(out)

    def pretty(self, names: tuple[str, ...]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            factors = []
            for name, e in zip(names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(format_fraction(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{format_fraction(c)}*{body}")
        s = parts[0]
        for p in parts[1:]:
            s += p if p.startswith("-") else "+" + p
        return s


# Dense univariate polynomials over Q (coefficient lists, lowest degree first).
# Used for rank computations along a parametrized minimal prime.

def uni_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def uni_add(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return uni_trim(out)


def uni_sub(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    return uni_add(p, [-c for c in q])


def uni_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return uni_trim(out)


def uni_div_exact(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    """Exact division; raises if q does not divide p."""
    if not q:
        raise ZeroDivisionError("univariate division by zero")
    if not p:
        return []
    rem = list(p)
    out = [Fraction(0)] * (len(p) - len(q) + 1)
    lead = q[-1]
    for k in range(len(out) - 1, -1, -1):
        c = rem[k + len(q) - 1] / lead
        out[k] = c
        if c != 0:
            for j, b in enumerate(q):
                rem[k + j] -= c * b
    if any(c != 0 for c in rem):
        raise ArithmeticError("inexact univariate division")
    return uni_trim(out)
