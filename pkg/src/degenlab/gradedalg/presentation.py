"""Graded matrices and module presentations over hypersurface rings.

A graded module M is stored through a presentation matrix phi: F1 -> F0 of
graded free modules; entry (i, j) is homogeneous of degree
col_degrees[j] - row_degrees[i].  Generators of F0 sit in the row degrees.

For Cohen-Macaulay modules the catalog also carries the matrix-factorization
partner psi with phi*psi = psi*phi = f*I as polynomial identities; the free
resolution is then 2-periodic, which gives exact rational Hilbert forms and
makes syzygies, cosyzygies and canonical duals pure bookkeeping:

    syzygy:   coker(phi) -> coker(psi)            (swap the pair, shift by e)
    dual:     coker(phi) -> coker(phi^T)          (twist by a - e)
    transpose (Auslander): coker(phi^T) with negated generator degrees

Free modules are carried as the trivial factorization (f, 1), so one code
path covers every catalogued module including the zero module (0x0).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .poly import Poly, format_fraction
from .ring import CatalogError, RingSpec


@dataclass(frozen=True)
class GradedMatrix:
    entries: tuple[tuple[Poly, ...], ...]  # entries[i][j], i over rows
    row_degrees: tuple[int, ...]
    col_degrees: tuple[int, ...]

    @property
    def nrows(self) -> int:
        return len(self.row_degrees)

    @property
    def ncols(self) -> int:
        return len(self.col_degrees)

    def check_homogeneous(self, ring: RingSpec, what: str = "matrix") -> None:
        if len(self.entries) != self.nrows or any(
            len(r) != self.ncols for r in self.entries
        ):
            raise CatalogError(f"{what}: shape does not match degree lists")
        for i, ri in enumerate(self.row_degrees):
            for j, cj in enumerate(self.col_degrees):
                p = self.entries[i][j]
                if p.is_zero():
                    continue
                d = p.weighted_degree(ring.weights)
                if d != cj - ri:
                    raise CatalogError(
                        f"{what}: entry ({i},{j}) has degree {d}, "
                        f"bookkeeping wants {cj - ri}"
                    )

    def twist(self, n: int) -> GradedMatrix:
        """Degree bookkeeping of the same matrix for M(n)."""
        return GradedMatrix(
            self.entries,
            tuple(r - n for r in self.row_degrees),
            tuple(c - n for c in self.col_degrees),
        )

    def transpose(
        self, row_degrees: tuple[int, ...], col_degrees: tuple[int, ...]
    ) -> GradedMatrix:
        ent = tuple(
            tuple(self.entries[i][j] for i in range(self.nrows))
            for j in range(self.ncols)
        )
        return GradedMatrix(ent, row_degrees, col_degrees)

    def matmul(self, other: GradedMatrix) -> tuple[tuple[Poly, ...], ...]:
        """Plain polynomial matrix product (bookkeeping handled by callers)."""
        if self.ncols != other.nrows:
            raise ValueError("matrix shapes do not compose")
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = Poly.zero()
                for k in range(self.ncols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return tuple(out)

    def to_data(self) -> dict:
        return {
            "rows": list(self.row_degrees),
            "cols": list(self.col_degrees),
            "entries": [[p.to_pairs() for p in row] for row in self.entries],
        }

    @staticmethod
    def from_data(data: dict, nvars: int) -> GradedMatrix:
        rows = tuple(int(r) for r in data["rows"])
        cols = tuple(int(c) for c in data["cols"])
        ent = tuple(
            tuple(Poly.from_pairs([(c, e) for c, e in cell], nvars) for cell in row)
            for row in data["entries"]
        )
        if not ent:
            ent = tuple(() for _ in rows)
        return GradedMatrix(ent, rows, cols)


def zero_matrix(row_degrees, col_degrees) -> GradedMatrix:
    return GradedMatrix(
        tuple(tuple(Poly.zero() for _ in col_degrees) for _ in row_degrees),
        tuple(row_degrees),
        tuple(col_degrees),
    )


@dataclass(frozen=True)
class Presentation:
    """coker(phi: F1 -> F0); psi present iff the module is certified CM."""

    ring: RingSpec
    phi: GradedMatrix
    psi: GradedMatrix | None = None

    def __post_init__(self):
        self.phi.check_homogeneous(self.ring, "phi")
        if self.psi is not None:
            self.psi.check_homogeneous(self.ring, "psi")

    @property
    def gen_degrees(self) -> tuple[int, ...]:
        return self.phi.row_degrees

    @property
    def ngens(self) -> int:
        return self.phi.nrows

    @property
    def is_cm(self) -> bool:
        return self.psi is not None

    def verify_mf(self) -> None:
        """Check phi*psi = psi*phi = f*I as polynomial identities."""
        if self.psi is None:
            raise CatalogError("presentation is not certified Cohen-Macaulay")
        f = self.ring.relation
        e = self.ring.relation_degree
        if self.psi.row_degrees != self.phi.col_degrees or self.psi.col_degrees != tuple(
            r + e for r in self.phi.row_degrees
        ):
            raise CatalogError("matrix-factorization degree bookkeeping broken")
        for name, prod, n in (
            ("phi*psi", self.phi.matmul(self.psi), self.phi.nrows),
            ("psi*phi", self.psi.matmul(self.phi), self.phi.ncols),
        ):
            for i in range(n):
                for j in range(n):
                    want = f if i == j else Poly.zero()
                    if prod[i][j] != want:
                        raise CatalogError(f"{name} != f*I at entry ({i},{j})")

    def twist(self, n: int) -> Presentation:
        if n == 0:
            return self
        return Presentation(
            self.ring,
            self.phi.twist(n),
            self.psi.twist(n) if self.psi is not None else None,
        )

    def syzygy(self) -> Presentation:
        """First syzygy: swap the factorization pair, shifting psi's slot by e."""
        if self.psi is None:
            raise CatalogError("syzygy needs a certified CM presentation")
        e = self.ring.relation_degree
        new_psi = GradedMatrix(
            self.phi.entries,
            tuple(r + e for r in self.phi.row_degrees),
            tuple(c + e for c in self.phi.col_degrees),
        )
        return Presentation(self.ring, self.psi, new_psi)

    def transpose_presentation(self) -> Presentation:
        """Auslander transpose coker(phi^T), generator degrees negated."""
        if self.psi is None:
            raise CatalogError("transpose needs a certified CM presentation")
        e = self.ring.relation_degree
        phi_t = self.phi.transpose(
            tuple(-c for c in self.phi.col_degrees),
            tuple(-r for r in self.phi.row_degrees),
        )
        psi_t = self.psi.transpose(
            tuple(-r for r in self.phi.row_degrees),
            tuple(e - c for c in self.phi.col_degrees),
        )
        return Presentation(self.ring, phi_t, psi_t)

    def canonical_dual(self) -> Presentation:
        """*Hom(-, omega): transpose with degrees twisted by the canonical twist."""
        if self.psi is None:
            raise CatalogError("not certified Cohen-Macaulay")
        a = self.ring.canonical_twist
        e = self.ring.relation_degree
        # coker(phi)^* = coker(phi^T) with generators in degrees e - a - c_j
        return self.transpose_presentation().twist(a - e)

    def cosyzygy(self) -> Presentation:
        """Omega^{-1}: dualize, take a syzygy, dualize back."""
        return self.canonical_dual().syzygy().canonical_dual()

    def direct_sum(self, other: Presentation) -> Presentation:
        if self.ring != other.ring:
            raise CatalogError("direct sum across different rings")
        return direct_sum([self, other])

    def hilbert_numerator(self) -> dict[int, int]:
        """Numerator of the Hilbert series over prod(1 - t^w), from 2-periodicity."""
        if self.psi is None:
            raise CatalogError("rational Hilbert form needs the factorization")
        num: dict[int, int] = {}
        for r in self.phi.row_degrees:
            num[r] = num.get(r, 0) + 1
        for c in self.phi.col_degrees:
            num[c] = num.get(c, 0) - 1
        return {d: v for d, v in num.items() if v != 0}

    def pretty(self) -> str:
        names = self.ring.names
        rows = [
            "[" + ", ".join(p.pretty(names) for p in row) + "]"
            for row in self.phi.entries
        ]
        return (
            f"<{self.ring.name}: gens {list(self.gen_degrees)}, "
            f"rels {list(self.phi.col_degrees)}, phi = [{'; '.join(rows)}]>"
        )


def direct_sum(parts: list[Presentation]) -> Presentation:
    """Block-diagonal presentation; the empty sum is the zero module."""
    if not parts:
        raise ValueError("direct_sum needs at least one part (ring is unknown)")
    ring = parts[0].ring
    rows: list[int] = []
    cols: list[int] = []
    for p in parts:
        if p.ring != ring:
            raise CatalogError("direct sum across different rings")
        rows.extend(p.phi.row_degrees)
        cols.extend(p.phi.col_degrees)
    all_cm = all(p.psi is not None for p in parts)

    def block_diag(mats: list[GradedMatrix]) -> tuple[tuple[Poly, ...], ...]:
        total_cols = sum(m.ncols for m in mats)
        ent: list[tuple[Poly, ...]] = []
        off = 0
        for m in mats:
            for r in range(m.nrows):
                row = [Poly.zero()] * total_cols
                row[off : off + m.ncols] = list(m.entries[r])
                ent.append(tuple(row))
            off += m.ncols
        return tuple(ent)

    phi = GradedMatrix(block_diag([p.phi for p in parts]), tuple(rows), tuple(cols))
    psi = None
    if all_cm:
        e = ring.relation_degree
        psi = GradedMatrix(
            block_diag([p.psi for p in parts]),
            tuple(cols),
            tuple(r + e for r in rows),
        )
    return Presentation(ring, phi, psi)


def zero_module(ring: RingSpec) -> Presentation:
    m = GradedMatrix((), (), ())
    return Presentation(ring, m, m)


def free_module(ring: RingSpec, shift: int = 0) -> Presentation:
    """R(shift) with the trivial factorization (f, 1)."""
    e = ring.relation_degree
    gen = -shift
    phi = GradedMatrix(((ring.relation,),), (gen,), (gen + e,))
    one = Poly.from_pairs([(1, (0,) * ring.nvars)], ring.nvars)
    psi = GradedMatrix(((one,),), (gen + e,), (gen + e,))
    return Presentation(ring, phi, psi)
