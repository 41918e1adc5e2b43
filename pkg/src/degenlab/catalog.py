"""Catalog files: schema-versioned ring + indecomposable + quiver data.

Catalogs are data shipped in-repo and re-verified at load: the trusted
computing base is the exact-linear-algebra verifier, never the data author.
Load-time checks per ring:

  * ring invariants (weights, homogeneity, canonical twist),
  * matrix-factorization identities and Hilbert consistency per module,
  * for quiver rings: split endomorphism rings (End = Q), translation
    consistency against the transpose/syzygy/dual formula, exactness and
    non-splitness of every almost-split sequence, the arrow list against
    the sequences, and representation-directedness against the flag.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .gradedalg import (
    CatalogError,
    GradedMatrix,
    MinimalPrime,
    Poly,
    Presentation,
    RingSpec,
    end_structure,
    hilbert_series,
    hom_dim,
    parse_fraction,
)
from .gradedalg.hilbert import RationalForm
from .gradedalg.presentation import direct_sum, zero_module
from .modexpr import ModuleExpr

SCHEMA = "degenlab-catalog/1"


@dataclass(frozen=True)
class MeshVertex:
    vertex: str
    shift: int

    def format(self) -> str:
        return self.vertex if self.shift == 0 else f"{self.vertex}({self.shift})"


@dataclass(frozen=True)
class CatalogVertex:
    id: str
    is_free: bool
    pres: Presentation
    form: RationalForm
    dual_form: RationalForm
    min_degree: int | None  # least nonzero degree of the module


@dataclass
class ARSequenceData:
    end: str
    tau: MeshVertex
    middle: tuple[MeshVertex, ...]
    alpha: GradedMatrix
    beta: GradedMatrix


@dataclass
class CatalogRing:
    spec: RingSpec
    vertices: dict[str, CatalogVertex]
    arrows: tuple[tuple[str, str, int], ...]
    tau: dict[str, MeshVertex]
    sequences: dict[str, ARSequenceData]
    support_radius: int
    directed_flag: bool | None
    has_quiver: bool

    _twist_cache: dict | None = None

    def vertex_pres(self, vertex: str, shift: int = 0) -> Presentation:
        if self._twist_cache is None:
            self._twist_cache = {}
        key = (vertex, shift)
        hit = self._twist_cache.get(key)
        if hit is None:
            hit = self.vertices[vertex].pres.twist(shift)
            self._twist_cache[key] = hit
        return hit

    def realize(self, expr: ModuleExpr) -> Presentation:
        """Block-diagonal presentation of a ModuleExpr, summands in canonical order."""
        parts = [self.vertex_pres(v, s) for v, s in expr.pairs()]
        if not parts:
            return zero_module(self.spec)
        if len(parts) == 1:
            return parts[0]
        return direct_sum(parts)

    def expr_form(self, expr: ModuleExpr) -> RationalForm:
        acc = RationalForm((), self.spec.weights)
        for v, s, m in expr.summands:
            acc = acc + self.vertices[v].form.shift(s).scale(m)
        return acc

    def free_vertex(self) -> str:
        frees = [v.id for v in self.vertices.values() if v.is_free]
        if len(frees) != 1:
            raise CatalogError(f"ring {self.spec.name}: expected one free vertex")
        return frees[0]

    def is_free_expr(self, expr: ModuleExpr) -> bool:
        return all(self.vertices[v].is_free for v, _, _ in expr.summands)


@dataclass
class Catalog:
    rings: dict[str, CatalogRing]
    content_hash: str

    def ring(self, name: str) -> CatalogRing:
        if name not in self.rings:
            raise CatalogError(
                f"unknown ring {name!r}; catalog has: {', '.join(sorted(self.rings))}"
            )
        return self.rings[name]


def _poly(data, nvars: int) -> Poly:
    return Poly.from_pairs([(c, e) for c, e in data], nvars)


def _matrix(data, nvars: int) -> GradedMatrix:
    return GradedMatrix.from_data(data, nvars)


def load_catalog(path: str | None = None, verify: bool = True) -> Catalog:
    if path is None:
        raw = (
            resources.files("degenlab").joinpath("data/catalog.json").read_bytes()
        )
    else:
        with open(path, "rb") as fh:
            raw = fh.read()
    data = json.loads(raw)
    content_hash = hashlib.sha256(raw).hexdigest()
    if data.get("schema") != SCHEMA:
        raise CatalogError(
            f"catalog schema {data.get('schema')!r} is not {SCHEMA!r}"
        )
    rings: dict[str, CatalogRing] = {}
    for entry in data.get("rings", []):
        ring = _load_ring(entry, verify=verify)
        rings[ring.spec.name] = ring
    return Catalog(rings, content_hash)


def _load_ring(entry: dict, verify: bool) -> CatalogRing:
    name = entry["name"]
    variables = tuple((str(s), int(w)) for s, w in entry["variables"])
    nvars = len(variables)
    relation = _poly(entry["relation"], nvars)
    primes = tuple(
        MinimalPrime(
            p["name"],
            tuple(
                tuple(parse_fraction(str(c)) for c in coeffs)
                for coeffs in p["param"]
            ),
        )
        for p in entry.get("minimal_primes", [])
    )
    flags = entry.get("flags", {})
    spec = RingSpec(
        name,
        variables,
        relation,
        int(entry["canonical_twist"]),
        primes,
        gorenstein=bool(flags.get("gorenstein", True)),
        isolated=bool(flags.get("isolated", True)),
        finite_type=bool(flags.get("finite_type", True)),
    )

    vertices: dict[str, CatalogVertex] = {}
    for vdata in entry["indecomposables"]:
        vid = vdata["id"]
        phi = _matrix(vdata["phi"], nvars)
        psi = _matrix(vdata["psi"], nvars)
        pres = Presentation(spec, phi, psi)
        if verify:
            pres.verify_mf()
        form = RationalForm.from_dict(pres.hilbert_numerator(), spec.weights)
        if verify:
            degs = list(phi.row_degrees) + list(phi.col_degrees)
            lo = min(degs, default=0) - 1
            hi = max(degs, default=0) + 2 * spec.relation_degree
            hilbert_series(pres, (lo, hi))  # raises on inconsistency
        dual_form = RationalForm.from_dict(
            pres.canonical_dual().hilbert_numerator(), spec.weights
        )
        vertices[vid] = CatalogVertex(
            vid, bool(vdata.get("is_free", False)), pres, form, dual_form,
            form.min_degree(),
        )

    quiver = entry.get("quiver")
    arrows: tuple = ()
    tau: dict[str, MeshVertex] = {}
    sequences: dict[str, ARSequenceData] = {}
    directed_flag = None
    if quiver is not None:
        arrows = tuple((a[0], a[1], int(a[2])) for a in quiver["arrows"])
        tau = {k: MeshVertex(v[0], int(v[1])) for k, v in quiver["tau"].items()}
        directed_flag = quiver.get("directed")
        for sdata in quiver["ar_sequences"]:
            seq = ARSequenceData(
                sdata["end"],
                MeshVertex(sdata["tau"][0], int(sdata["tau"][1])),
                tuple(MeshVertex(m[0], int(m[1])) for m in sdata["middle"]),
                _matrix(sdata["alpha"], nvars),
                _matrix(sdata["beta"], nvars),
            )
            if seq.end in sequences:
                raise CatalogError(f"{name}: duplicate almost-split sequence for {seq.end}")
            sequences[seq.end] = seq

    ring = CatalogRing(
        spec,
        vertices,
        arrows,
        tau,
        sequences,
        int(entry.get("support_radius", 8)),
        directed_flag,
        quiver is not None,
    )
    if verify and quiver is not None:
        _verify_quiver(ring)
    return ring


def _verify_quiver(ring: CatalogRing) -> None:
    """Re-verify every structural claim of a quiver section."""
    from .gradedalg.homs import verify_exact  # local import to keep load cheap

    spec = ring.spec
    name = spec.name
    for vid in list(ring.tau) + [s for s in ring.sequences]:
        if vid not in ring.vertices:
            raise CatalogError(f"{name}: unknown vertex {vid!r} in quiver data")
    for src, tgt, shift in ring.arrows:
        if src not in ring.vertices or tgt not in ring.vertices:
            raise CatalogError(f"{name}: arrow ({src}, {tgt}, {shift}) names unknown vertex")
        if shift > 0:
            raise CatalogError(
                f"{name}: arrow ({src}, {tgt}, {shift}) has positive shift; "
                "catalogs are normalized so arrows never decrease degree"
            )

    nonfree = [v for v in ring.vertices.values() if not v.is_free]
    for v in nonfree:
        n, ss = end_structure(v.pres)
        if (n, ss) != (1, 1):
            raise CatalogError(
                f"{name}: vertex {v.id} has End of dim {n}; quiver vertices must "
                "have split endomorphism rings"
            )
        if v.id not in ring.tau or v.id not in ring.sequences:
            raise CatalogError(f"{name}: non-free vertex {v.id} lacks translation data")
    for v in ring.vertices.values():
        if v.is_free and (v.id in ring.tau or v.id in ring.sequences):
            raise CatalogError(
                f"{name}: free vertex {v.id} must not end an almost-split sequence"
            )

    tau_targets = [t.vertex for t in ring.tau.values()]
    if len(tau_targets) != len(set(tau_targets)):
        raise CatalogError(f"{name}: translation map is not injective on vertices")
    for end, t in ring.tau.items():
        if t.shift >= 0:
            raise CatalogError(
                f"{name}: tau({end}) has non-negative shift {t.shift}; knitting "
                "needs translations to strictly decrease degree"
            )

    # translation check: tau X == dual of the d-th syzygy of the transpose
    d = spec.dim
    for v in nonfree:
        t = v.pres.transpose_presentation()
        for _ in range(d):
            t = t.syzygy()
        computed = t.canonical_dual()
        claimed = ring.tau[v.id]
        claimed_pres = ring.vertex_pres(claimed.vertex, claimed.shift)
        comp_form = RationalForm.from_dict(computed.hilbert_numerator(), spec.weights)
        claim_form = ring.vertices[claimed.vertex].form.shift(claimed.shift)
        if comp_form != claim_form:
            raise CatalogError(
                f"{name}: translation of {v.id} has wrong Hilbert series "
                f"(catalog claims {claimed.format()})"
            )
        if hom_dim(computed, claimed_pres, 0) < 1 or hom_dim(claimed_pres, computed, 0) < 1:
            raise CatalogError(
                f"{name}: translation of {v.id} is not isomorphic to {claimed.format()}"
            )

    derived_arrows = set()
    for seq in ring.sequences.values():
        if seq.tau != ring.tau[seq.end]:
            raise CatalogError(f"{name}: sequence for {seq.end} disagrees with tau map")
        tau_pres = ring.vertex_pres(seq.tau.vertex, seq.tau.shift)
        mid_parts = [ring.vertex_pres(m.vertex, m.shift) for m in seq.middle]
        mid_pres = direct_sum(mid_parts) if mid_parts else zero_module(spec)
        end_pres = ring.vertex_pres(seq.end)
        cert = verify_exact(tau_pres, seq.alpha, mid_pres, seq.beta, end_pres)
        if not cert.ok:
            raise CatalogError(
                f"{name}: almost-split sequence ending at {seq.end} fails "
                f"verification: {cert.status}: {cert.detail}"
            )
        # non-splitness as decompositions
        middle_ms = sorted((m.vertex, m.shift) for m in seq.middle)
        split_ms = sorted([(seq.tau.vertex, seq.tau.shift), (seq.end, 0)])
        if middle_ms == split_ms:
            raise CatalogError(
                f"{name}: sequence ending at {seq.end} is split (middle = tau + end)"
            )
        for m in seq.middle:
            derived_arrows.add((seq.tau.vertex, m.vertex, seq.tau.shift - m.shift))
            derived_arrows.add((m.vertex, seq.end, m.shift))
    if derived_arrows != set(ring.arrows):
        missing = derived_arrows - set(ring.arrows)
        extra = set(ring.arrows) - derived_arrows
        raise CatalogError(
            f"{name}: arrow list disagrees with almost-split sequences"
            + (f"; missing {sorted(missing)}" if missing else "")
            + (f"; spurious {sorted(extra)}" if extra else "")
        )

    from .mesh import is_representation_directed

    computed_directed = is_representation_directed(ring)
    if ring.directed_flag is not None and bool(ring.directed_flag) != computed_directed:
        raise CatalogError(
            f"{name}: catalog flag directed={ring.directed_flag} contradicts the "
            f"computed value {computed_directed}"
        )
