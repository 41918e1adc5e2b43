"""Knitting on verified Auslander-Reiten quivers.

For a non-free vertex X with almost-split sequence 0 -> tau X -> E -> X -> 0
and any module M with known decomposition, the four-term exact sequence

    0 -> Hom(M, tau X) -> Hom(M, E) -> Hom(M, X) -> k^{mu(M, X)} -> 0

turns hom dimensions into the mesh recursion

    [M, X] = [M, E] - [M, tau X] + mu(M, X),

grounded at free vertices where [M, R(n)] is a Hilbert value of the
canonical dual.  Every value the recursion produces is checkable against
the degreewise oracle; the acceptance suite does exactly that.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .catalog import ARSequenceData, CatalogRing, MeshVertex
from .gradedalg import CatalogError, GradedMatrix
from .modexpr import ModuleExpr


class SupportBoundExceeded(CatalogError):
    """Raised when hom values fail to stabilize inside the configured window."""


@dataclass(frozen=True)
class HomVector:
    source: ModuleExpr
    support: tuple[tuple[MeshVertex, int], ...]  # nonzero values, sorted
    window: tuple[int, int]

    def value(self, vertex: str, shift: int) -> int:
        for mv, val in self.support:
            if mv.vertex == vertex and mv.shift == shift:
                return val
        return 0

    def as_dict(self) -> dict[MeshVertex, int]:
        return dict(self.support)


def _require_quiver(ring: CatalogRing) -> None:
    if not ring.has_quiver:
        raise CatalogError(
            f"ring {ring.spec.name} carries no verified translation quiver"
        )


class KnitTable:
    """Memoized hom dimensions [U, X(n)] for catalog vertices U, X.

    The recursion walks translations downward in shift and middle terms
    toward the free vertex, so it terminates on catalogs whose arrows never
    decrease shift (checked at load).  One table per ring, shared by every
    order decision.
    """

    def __init__(self, ring: CatalogRing):
        _require_quiver(ring)
        self.ring = ring
        self._memo: dict[tuple[str, str, int], int] = {}
        self._dual_values: dict[tuple[str, int], int] = {}

    def _dual_value(self, u: str, d: int) -> int:
        key = (u, d)
        hit = self._dual_values.get(key)
        if hit is None:
            hit = self.ring.vertices[u].dual_form.value_at(d)
            self._dual_values[key] = hit
        return hit

    def value(self, u: str, x: str, n: int) -> int:
        """[U, X(n)] for indecomposable catalog vertices (U unshifted)."""
        ring = self.ring
        vx = ring.vertices[x]
        vu = ring.vertices[u]
        if vu.is_free and vu.pres.gen_degrees == (0,):
            # maps out of R evaluate a graded piece
            return vx.form.value_at(n)
        if vx.is_free:
            # [U, R(n)] = h(U^*)_{n - a}
            return self._dual_value(u, n - ring.spec.canonical_twist)
        key = (u, x, n)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        # vanishing cutoff: no generator of U can map anywhere in X(n)
        maxgen = max(vu.pres.gen_degrees, default=0)
        if vx.min_degree is None or n < vx.min_degree - maxgen:
            self._memo[key] = 0
            return 0
        stack = [(u, x, n)]
        while stack:
            cu, cx, cn = stack[-1]
            ck = (cu, cx, cn)
            if ck in self._memo:
                stack.pop()
                continue
            cvx = ring.vertices[cx]
            cvu = ring.vertices[cu]
            if cvx.is_free:
                self._memo[ck] = self._dual_value(cu, cn - ring.spec.canonical_twist)
                stack.pop()
                continue
            mg = max(cvu.pres.gen_degrees, default=0)
            if cvx.min_degree is None or cn < cvx.min_degree - mg:
                self._memo[ck] = 0
                stack.pop()
                continue
            seq = ring.sequences[cx]
            deps = [(cu, seq.tau.vertex, cn + seq.tau.shift)]
            for m in seq.middle:
                deps.append((cu, m.vertex, cn + m.shift))
            missing = [d for d in deps if d not in self._memo]
            if missing:
                if len(stack) > 100000:
                    raise SupportBoundExceeded(
                        f"knitting recursion for [{cu}, {cx}({cn})] does not ground; "
                        "quiver data admits no finite support"
                    )
                stack.extend(missing)
                continue
            val = -self._memo[deps[0]]
            for d in deps[1:]:
                val += self._memo[d]
            if cu == cx and cn == 0:
                val += 1  # mu(U, X(n)) for an indecomposable source
            if val < 0:
                raise CatalogError(
                    f"mesh recursion produced a negative dimension at "
                    f"[{cu}, {cx}({cn})]; quiver data is wrong"
                )
            self._memo[ck] = val
            stack.pop()
        return self._memo[key]


_TABLES: dict[int, KnitTable] = {}


def knit_table(ring: CatalogRing) -> KnitTable:
    key = id(ring)
    tab = _TABLES.get(key)
    if tab is None:
        tab = KnitTable(ring)
        _TABLES[key] = tab
    return tab


def hom_value(ring: CatalogRing, source: ModuleExpr, target: MeshVertex) -> int:
    """[M, X(n)] by knitting, additive over the decomposition of M."""
    tab = knit_table(ring)
    total = 0
    for v, s, m in source.summands:
        total += m * tab.value(v, target.vertex, target.shift - s)
    return total


def mu(expr: ModuleExpr, target: MeshVertex) -> int:
    return expr.multiplicity(target.vertex, target.shift)


def knit_window(ring: CatalogRing, exprs: list[ModuleExpr], bound: int | None = None) -> tuple[int, int]:
    """Shift window guaranteed to contain every hom-difference support."""
    radius = ring.support_radius if bound is None else bound
    shifts = [s for e in exprs for _, s, _ in e.summands] or [0]
    return (min(shifts) - radius, max(shifts) + radius)


def knit_hom_vector(
    ring: CatalogRing, source: ModuleExpr, bound: int | None = None
) -> HomVector:
    """Hom vector of M on the configured window, every value by knitting."""
    _require_quiver(ring)
    lo, hi = knit_window(ring, [source], bound)
    support = []
    for x in sorted(ring.vertices):
        for n in range(lo, hi + 1):
            val = hom_value(ring, source, MeshVertex(x, n))
            if val:
                support.append((MeshVertex(x, n), val))
    return HomVector(source, tuple(support), (lo, hi))


@dataclass(frozen=True)
class LiftedARSequence:
    """An almost-split sequence 0 -> tau -> E -> end -> 0 lifted by a shift.

    middle_parts keeps the catalogued summand order, which is the order the
    alpha/beta matrix blocks are written in; middle_expr is the canonical
    multiset view.
    """

    tau: MeshVertex
    middle_parts: tuple[MeshVertex, ...]
    end: MeshVertex
    alpha: GradedMatrix
    beta: GradedMatrix
    ring_name: str

    @property
    def middle_expr(self) -> ModuleExpr:
        return ModuleExpr.make(
            self.ring_name, [(m.vertex, m.shift) for m in self.middle_parts]
        )


def ar_sequence(ring: CatalogRing, x: MeshVertex) -> LiftedARSequence:
    """The verified almost-split sequence ending at x, lifted by its shift."""
    _require_quiver(ring)
    if x.vertex not in ring.vertices:
        raise CatalogError(f"unknown vertex {x.vertex!r}")
    if ring.vertices[x.vertex].is_free:
        raise CatalogError("no almost-split sequence ends in a free vertex")
    seq = ring.sequences[x.vertex]
    return LiftedARSequence(
        MeshVertex(seq.tau.vertex, seq.tau.shift + x.shift),
        tuple(MeshVertex(m.vertex, m.shift + x.shift) for m in seq.middle),
        MeshVertex(x.vertex, x.shift),
        seq.alpha.twist(x.shift),
        seq.beta.twist(x.shift),
        ring.spec.name,
    )


def ar_sequence_starting(ring: CatalogRing, x: MeshVertex):
    """The almost-split sequence starting at x (ending at tau^{-1} x)."""
    inv = tau_inverse(ring, x)
    return ar_sequence(ring, inv)


def tau_inverse(ring: CatalogRing, x: MeshVertex) -> MeshVertex:
    _require_quiver(ring)
    for end, t in ring.tau.items():
        if t.vertex == x.vertex:
            # tau(end(n)) = t.vertex(t.shift + n); solve for end shift
            return MeshVertex(end, x.shift - t.shift)
    raise CatalogError(f"no almost-split sequence starts at {x.format()}")


def is_representation_directed(ring: CatalogRing) -> bool:
    """No oriented cycle of zero net shift in the lifted quiver.

    A zero-net closed walk exists iff some strongly connected component of
    the vertex digraph carries cycles of both signs or a zero cycle; cycle
    sign reach is decided by min/max walk weights up to the component size.
    """
    _require_quiver(ring)
    verts = sorted(ring.vertices)
    index = {v: i for i, v in enumerate(verts)}
    edges = [(index[a], index[b], -s) for a, b, s in ring.arrows]
    n = len(verts)

    # Tarjan strongly connected components
    sccs = _sccs(n, [(a, b) for a, b, _ in edges])
    comp = {}
    for ci, members in enumerate(sccs):
        for v in members:
            comp[v] = ci
    for members in sccs:
        ms = set(members)
        internal = [(a, b, w) for a, b, w in edges if a in ms and b in ms]
        if not internal:
            continue
        k = len(members)
        remap = {v: i for i, v in enumerate(sorted(ms))}
        INF = float("inf")
        # min/max weight over walks with exactly L edges, L = 1..k; simple
        # cycles have length <= k, and their weight signs decide the question
        mn = [[INF] * k for _ in range(k)]
        mx = [[-INF] * k for _ in range(k)]
        for a, b, w in internal:
            ra, rb = remap[a], remap[b]
            mn[ra][rb] = min(mn[ra][rb], w)
            mx[ra][rb] = max(mx[ra][rb], w)
        curmn, curmx = [r[:] for r in mn], [r[:] for r in mx]
        best_lo = min(curmn[i][i] for i in range(k))
        best_hi = max(curmx[i][i] for i in range(k))
        for _ in range(k - 1):
            nmn = [[INF] * k for _ in range(k)]
            nmx = [[-INF] * k for _ in range(k)]
            for a in range(k):
                for b in range(k):
                    for c in range(k):
                        if curmn[a][b] != INF and mn[b][c] != INF:
                            nmn[a][c] = min(nmn[a][c], curmn[a][b] + mn[b][c])
                        if curmx[a][b] != -INF and mx[b][c] != -INF:
                            nmx[a][c] = max(nmx[a][c], curmx[a][b] + mx[b][c])
            curmn, curmx = nmn, nmx
            best_lo = min(best_lo, min(curmn[i][i] for i in range(k)))
            best_hi = max(best_hi, max(curmx[i][i] for i in range(k)))
        if best_lo <= 0 <= best_hi:
            return False
    return True


def _sccs(n: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
    index = [None] * n
    low = [0] * n
    onstack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = [0]

    def strongconnect(v0: int):
        work = [(v0, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                onstack[v] = True
            recurse = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i]
                if index[w] is None:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if onstack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                scc = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    scc.append(w)
                    if w == v:
                        break
                out.append(scc)
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])

    for v in range(n):
        if index[v] is None:
            strongconnect(v)
    return out


def path_leq(ring: CatalogRing, a: MeshVertex, b: MeshVertex) -> bool:
    """Path order: a == b or a finite path a -> b in the lifted quiver.

    Arrows never decrease shift (load invariant), so the search is confined
    to shifts in [a.shift, b.shift].
    """
    if a == b:
        return True
    if b.shift < a.shift:
        return False
    seen = {a}
    frontier = [a]
    while frontier:
        nxt = []
        for cur in frontier:
            for src, tgt, s in ring.arrows:
                if src != cur.vertex:
                    continue
                step = MeshVertex(tgt, cur.shift - s)
                if step.shift > b.shift:
                    continue
                if step == b:
                    return True
                if step not in seen:
                    seen.add(step)
                    nxt.append(step)
        frontier = nxt
    return False


def decompose_from_hom(ring: CatalogRing, hv: HomVector) -> ModuleExpr:
    """Recover the unique decomposition with the given hom vector.

    Non-free multiplicities come from mu(M, X) = [M, X] + [M, tau X] - [M, E_X];
    free multiplicities from deconvolving the residual free-vertex values by
    the Hilbert function of the ring.
    """
    _require_quiver(ring)
    values = hv.as_dict()
    lo, hi = hv.window

    def val(mv: MeshVertex) -> int:
        return values.get(mv, 0)

    summands: list[tuple[str, int, int]] = []
    for x in sorted(ring.vertices):
        if ring.vertices[x].is_free:
            continue
        seq = ring.sequences[x]
        for n in range(lo, hi + 1):
            m = val(MeshVertex(x, n)) + val(MeshVertex(seq.tau.vertex, n + seq.tau.shift))
            for mid in seq.middle:
                m -= val(MeshVertex(mid.vertex, n + mid.shift))
            if m < 0:
                raise CatalogError(
                    f"not a hom vector of a module: negative multiplicity at {x}({n})"
                )
            if m:
                summands.append((x, n, m))
    partial = ModuleExpr.make(ring.spec.name, summands)

    free_id = ring.free_vertex()
    a = ring.spec.canonical_twist
    tab = knit_table(ring)
    residual: dict[int, int] = {}
    for n in range(lo, hi + 1):
        r = val(MeshVertex(free_id, n))
        for v, s, m in partial.summands:
            r -= m * tab.value(v, free_id, n - s)
        if r:
            residual[n] = r
    # residual[n] = sum_m mult_m * h(R)_{(n - a) - ...}; deconvolve by h(R^*)
    free_dual = ring.vertices[free_id].dual_form
    while residual:
        n = min(residual)
        c = residual[n]
        if c < 0:
            raise CatalogError(
                f"not a hom vector of a module: negative free residual at shift {n}"
            )
        # a copy of R(n0) contributes h(R^*)_{n - n0 - a} at the free vertex;
        # its lowest nonzero value sits where the dual form starts
        start = free_dual.min_degree()
        n0 = n - a - start
        summands.append((free_id, n0, c))
        for d in range(n, hi + 1):
            v = residual.get(d, 0) - c * free_dual.value_at(d - a - n0)
            if v:
                residual[d] = v
            else:
                residual.pop(d, None)
    return ModuleExpr.make(ring.spec.name, summands)
