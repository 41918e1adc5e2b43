"""Weighted hypersurface rings R = Q[x_1..x_n]/(f) and their graded pieces.

The relation ideal is principal, so the degree-d relations inside the
ambient polynomial ring are exactly f * S_{d-e}.  Normal forms per degree
come from row reduction of that space against the monomial basis of S_d;
no Groebner machinery is needed or wanted here.

Memo tables allow concurrent reads; insertion is serialized per ring.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import reduce_mod, rref
from .poly import Mono, Poly


class CatalogError(ValueError):
    """Structured failure while validating catalogued data."""


@dataclass(frozen=True)
class MinimalPrime:
    """A graded minimal prime with a one-parameter parametrization.

    ``param`` maps each ring variable to a dense univariate polynomial in the
    parameter t, substituting which kills exactly the functions vanishing on
    the branch.  Only meaningful for reduced catalog rings.
    """

    name: str
    param: tuple[tuple[Fraction, ...], ...]  # per variable, coefficients in t


@dataclass(frozen=True)
class RingSpec:
    """A graded Gorenstein hypersurface Q[x_i]/(f) with weighted variables."""

    name: str
    variables: tuple[tuple[str, int], ...]
    relation: Poly
    canonical_twist: int
    minimal_primes: tuple[MinimalPrime, ...] = ()
    gorenstein: bool = True
    isolated: bool = True
    finite_type: bool = True
    _memo: dict = field(default_factory=dict, compare=False, hash=False, repr=False)
    _lock: threading.Lock = field(
        default_factory=threading.Lock, compare=False, hash=False, repr=False
    )

    def __post_init__(self):
        if not self.variables:
            raise CatalogError(f"ring {self.name}: no variables")
        if any(w < 1 for _, w in self.variables):
            raise CatalogError(f"ring {self.name}: weights must be >= 1")
        deg = self.relation.weighted_degree(self.weights)
        if deg is None:
            raise CatalogError(f"ring {self.name}: zero relation")
        expected = deg - sum(self.weights)
        if self.canonical_twist != expected:
            raise CatalogError(
                f"ring {self.name}: canonical twist {self.canonical_twist} != "
                f"relation degree - weight sum = {expected}"
            )

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(w for _, w in self.variables)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.variables)

    @property
    def relation_degree(self) -> int:
        return self.relation.weighted_degree(self.weights)

    @property
    def dim(self) -> int:
        return self.nvars - 1

    def __hash__(self):
        return hash((self.name, self.variables, self.relation))

    def __eq__(self, other):
        return (
            isinstance(other, RingSpec)
            and self.name == other.name
            and self.variables == other.variables
            and self.relation == other.relation
        )

    def _memoized(self, key, compute):
        # computations are pure and may recurse into other memoized entries,
        # so evaluate outside the lock and serialize only the insertion
        memo = self._memo
        hit = memo.get(key)
        if hit is not None:
            return hit
        value = compute()
        with self._lock:
            return memo.setdefault(key, value)

    def monomials(self, d: int) -> tuple[Mono, ...]:
        """Monomial basis of the ambient S_d, lexicographically descending."""
        if d < 0:
            return ()
        return self._memoized(("S", d), lambda: self._monomials(d))

    def _monomials(self, d: int) -> tuple[Mono, ...]:
        w = self.weights
        out: list[Mono] = []

        def rec(i: int, rem: int, prefix: tuple[int, ...]):
            if i == len(w) - 1:
                if rem % w[i] == 0:
                    out.append(prefix + (rem // w[i],))
                return
            for e in range(rem // w[i], -1, -1):
                rec(i + 1, rem - e * w[i], prefix + (e,))

        rec(0, d, ())
        return tuple(out)

    def _reducer(self, d: int):
        """RREF of the degree-d relation space f*S_{d-e} in S_d coordinates."""
        return self._memoized(("red", d), lambda: self._compute_reducer(d))

    def _compute_reducer(self, d: int):
        monos = self.monomials(d)
        index = {m: i for i, m in enumerate(monos)}
        rows = []
        for m in self.monomials(d - self.relation_degree):
            prod = self.relation * Poly.monomial(m)
            row = [Fraction(0)] * len(monos)
            for mm, c in prod.terms:
                row[index[mm]] = c
            rows.append(row)
        pivots, red = rref(rows) if rows else ([], [])
        return pivots, red

    def basis(self, d: int) -> tuple[Mono, ...]:
        """Monomial basis of R_d (non-pivot monomials of the relation space)."""
        if d < 0:
            return ()
        return self._memoized(("R", d), lambda: self._basis(d))

    def _basis(self, d: int) -> tuple[Mono, ...]:
        monos = self.monomials(d)
        pivots, _ = self._reducer(d)
        pivset = set(pivots)
        return tuple(m for i, m in enumerate(monos) if i not in pivset)

    def dim_piece(self, d: int) -> int:
        return len(self.basis(d))

    def nf_coords(self, p: Poly, d: int) -> list[Fraction]:
        """Coordinates of a degree-d polynomial in the R_d basis."""
        basis = self.basis(d)
        if not p.terms:
            return [Fraction(0)] * len(basis)
        if p.weighted_degree(self.weights) != d:
            raise ValueError(f"polynomial not homogeneous of degree {d}")
        monos = self.monomials(d)
        index = {m: i for i, m in enumerate(monos)}
        vec = [Fraction(0)] * len(monos)
        for m, c in p.terms:
            vec[index[m]] = c
        pivots, red = self._reducer(d)
        residual = reduce_mod(vec, pivots, red)
        pivset = set(pivots)
        return [residual[i] for i in range(len(monos)) if i not in pivset]

    def is_zero_in_R(self, p: Poly) -> bool:
        if not p.terms:
            return True
        d = p.weighted_degree(self.weights)
        return all(c == 0 for c in self.nf_coords(p, d))

    def mult_columns(self, p: Poly, a: int) -> tuple[tuple[Fraction, ...], ...]:
        """Columns of multiplication by homogeneous p as a map R_a -> R_{a+deg p}.

        Column j is the normal form of p * (j-th basis monomial of R_a).
        """
        if not p.terms:
            raise ValueError("mult_columns of the zero polynomial; skip zero entries")
        d = p.weighted_degree(self.weights)
        return self._memoized(("mul", p, a), lambda: self._mult_columns(p, a, d))

    def _mult_columns(self, p: Poly, a: int, d: int):
        cols = []
        for m in self.basis(a):
            cols.append(tuple(self.nf_coords(p * Poly.monomial(m), a + d)))
        return tuple(cols)
