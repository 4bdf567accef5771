"""Loop-span obstruction machinery on Hom-decorated vertex graphs.

A graph has r vertices with sizes g_1..g_r over one shared involutive base
algebra; the edge for a pair i < j is a (g_j, g_i) matrix over the base,
modeling the homomorphism component from factor i to factor j. Reverse
traversal synthesizes the dagger-transpose on the fly, so the two directions
can never disagree.

``compute_obstruction`` returns the span of all loop values based at a
vertex (loops of at least two edges; the identity is never seeded). It is
computed as the least fixed point of the path-span table: cell (a, b) holds
the span of all path values from b to a, and grows by composing cells
through every intermediate vertex until all dimensions stabilize.

``loop_oracle`` is the independent cross-check: literal enumeration of loop
sequences up to a bounded number of edges, composing actual matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .algebra import (
    AlgElement,
    DMatrix,
    StructureAlgebra,
    invert_element,
)
from .errors import (
    AlgebraValidationError,
    CoverValidationError,
    DimensionMismatchError,
    GraphValidationError,
    MapValidationError,
)
from .linalg import Echelon, Subspace, Vec, echelonize, ratio, solve_linear

_ZERO = Fraction(0)
_ONE = Fraction(1)


class ObstructionGraph:
    """r vertices with sizes over a shared base; edges stored only for i < j.

    Vertices are 1-based in the public API. ``edges`` maps (i, j) with i < j
    to the component from factor i to factor j, a (g_j, g_i) matrix over the
    base. Zero edges are dropped; a missing edge reads back as the zero
    matrix. Instances are immutable.
    """

    __slots__ = ("base", "sizes", "edges", "_table")

    def __init__(self, base: StructureAlgebra, sizes: Sequence[int],
                 edges: Mapping[tuple, DMatrix]):
        if base.unit is None or base.involution is None:
            raise GraphValidationError("base algebra must be unital with involution")
        sizes = tuple(int(g) for g in sizes)
        if len(sizes) < 2:
            raise GraphValidationError("a graph needs at least two vertices")
        if any(g < 1 for g in sizes):
            raise GraphValidationError("vertex sizes must be positive")
        clean = {}
        for (i, j), m in dict(edges).items():
            if not (1 <= i < j <= len(sizes)):
                raise GraphValidationError(
                    f"edge key ({i},{j}) must satisfy 1 <= i < j <= {len(sizes)}")
            if not isinstance(m, DMatrix) or m.base is not base:
                raise GraphValidationError(
                    f"edge ({i},{j}) is not a matrix over the graph base")
            if (m.rows, m.cols) != (sizes[j - 1], sizes[i - 1]):
                raise GraphValidationError(
                    f"edge ({i},{j}) has shape ({m.rows},{m.cols}), "
                    f"expected ({sizes[j - 1]},{sizes[i - 1]})")
            if not m.is_zero():
                clean[(i, j)] = m
        self.base = base
        self.sizes = sizes
        self.edges = clean
        self._table = None

    @property
    def r(self) -> int:
        return len(self.sizes)

    def size(self, v: int) -> int:
        self._check_vertex(v)
        return self.sizes[v - 1]

    def _check_vertex(self, v: int):
        if not (1 <= v <= self.r):
            raise GraphValidationError(f"vertex {v} out of range 1..{self.r}")

    def hom_map(self, a: int, b: int) -> DMatrix:
        """The component from factor b to factor a (shape (g_a, g_b)); the
        reverse of a stored edge is its dagger-transpose."""
        self._check_vertex(a)
        self._check_vertex(b)
        if a == b:
            raise GraphValidationError("hom_map needs two distinct vertices")
        if b < a:
            m = self.edges.get((b, a))
            if m is not None:
                return m
        else:
            m = self.edges.get((a, b))
            if m is not None:
                return m.dagger_transpose()
        return DMatrix.zero(self.base, self.size(a), self.size(b))

    def hom_ambient(self, a: int, b: int) -> int:
        return self.base.dim * self.size(a) * self.size(b)

    def __repr__(self):
        return (f"ObstructionGraph(r={self.r}, sizes={self.sizes}, "
                f"edges={sorted(self.edges)})")


@dataclass(frozen=True)
class PathSpanTable:
    """Least fixed point of the path-span iteration.

    ``spans[(a, b)]`` is the subspace of the (g_a, g_b) hom coefficient space
    spanned by all path values from b to a (diagonal cells: loops of two or
    more edges). ``rounds`` counts the passes that enlarged some cell.
    """

    spans: dict
    rounds: int


# -- coefficient-level composition kernel ------------------------------------


def _compose_rule(base: StructureAlgebra, ga: int, gc: int, gb: int):
    key = (ga, gc, gb)
    rule = base._rule_cache.get(key)
    if rule is not None:
        return rule
    d = base.dim
    out: list[list] = [[] for _ in range(ga * gc * d)]
    for p in range(ga):
        for s in range(gc):
            for t1 in range(d):
                c1 = (p * gc + s) * d + t1
                bucket = out[c1]
                for q in range(gb):
                    for t2 in range(d):
                        terms = base._sc.get((t1, t2))
                        if not terms:
                            continue
                        c2 = (s * gb + q) * d + t2
                        at = (p * gb + q) * d
                        for k, cf in terms:
                            bucket.append((c2, at + k, cf))
    rule = tuple(tuple(b) for b in out)
    base._rule_cache[key] = rule
    return rule


def _compose_vec(rule, u: Vec, v: Vec, out_len: int) -> Vec:
    acc: dict[int, Fraction] = {}
    for c1, a in enumerate(u):
        if not a:
            continue
        for c2, out, cf in rule[c1]:
            b = v[c2]
            if b:
                acc[out] = acc.get(out, _ZERO) + a * b * cf
    res = [_ZERO] * out_len
    for k, c in acc.items():
        if c:
            res[k] = c
    return tuple(res)


def path_span_table(graph: ObstructionGraph) -> PathSpanTable:
    """Compute (and cache on the graph) the full path-span fixed point."""
    if graph._table is not None:
        return graph._table
    r = graph.r
    base = graph.base
    verts = range(1, r + 1)
    ech: dict[tuple, Echelon] = {}
    spanning: dict[tuple, list[Vec]] = {}
    for a in verts:
        for b in verts:
            ech[(a, b)] = Echelon(graph.hom_ambient(a, b))
            spanning[(a, b)] = []
    for a in verts:
        for b in verts:
            if a == b:
                continue
            m = graph.hom_map(a, b)
            if not m.is_zero():
                v = m.flatten()
                if ech[(a, b)].add(v):
                    spanning[(a, b)].append(v)

    marks: dict[tuple, tuple] = {}
    triples = [(a, c, b) for a in verts for c in verts for b in verts]
    rounds = 0
    while True:
        changed = False
        for a, c, b in triples:
            target = ech[(a, b)]
            us = spanning[(a, c)]
            vs = spanning[(c, b)]
            n1, n2 = marks.get((a, c, b), (0, 0))
            if len(us) == n1 and len(vs) == n2:
                continue
            marks[(a, c, b)] = (len(us), len(vs))
            if target.is_full() or not us or not vs:
                continue
            rule = _compose_rule(base, graph.size(a), graph.size(c), graph.size(b))
            out_len = graph.hom_ambient(a, b)
            bucket = spanning[(a, b)]
            for x in range(len(us)):
                lo = n2 if x < n1 else 0
                for y in range(lo, len(vs)):
                    prod = _compose_vec(rule, us[x], vs[y], out_len)
                    if target.add(prod):
                        bucket.append(prod)
                        changed = True
                        if target.is_full():
                            break
                if target.is_full():
                    break
        if changed:
            rounds += 1
        else:
            break
    table = PathSpanTable(
        spans={k: e.to_subspace() for k, e in ech.items()}, rounds=rounds)
    graph._table = table
    return table


def compute_obstruction(graph: ObstructionGraph, vertex: int) -> Subspace:
    """Span of all loop values based at ``vertex`` (canonical subspace of the
    endomorphism coefficient space, ambient dim base.dim * g_v^2)."""
    graph._check_vertex(vertex)
    return path_span_table(graph).spans[(vertex, vertex)]


def loop_oracle(graph: ObstructionGraph, vertex: int, max_len: int) -> Subspace:
    """Span of literal loop compositions at ``vertex`` with 2..max_len edges.

    Enumerates every vertex sequence with distinct consecutive entries whose
    traversed edges are nonzero, composing actual matrices; monotone in
    ``max_len``. Exponential in ``max_len``; meant as an oracle, not a
    production path.
    """
    graph._check_vertex(vertex)
    if max_len < 2:
        raise ValueError("max_len must be >= 2 (shortest loop has two edges)")
    # steps[v] lists (w, component J_w -> J_v): appending w to a path ending
    # at v composes that component on the right.
    steps: dict[int, list] = {}
    for v in range(1, graph.r + 1):
        outs = []
        for w in range(1, graph.r + 1):
            if w != v:
                m = graph.hom_map(v, w)
                if not m.is_zero():
                    outs.append((w, m))
        steps[v] = outs
    ech = Echelon(graph.hom_ambient(vertex, vertex))
    # A frontier item is (endpoint, composed value J_endpoint -> J_vertex).
    frontier = list(steps[vertex])
    length = 1
    while frontier and length < max_len:
        nxt = []
        for v, val in frontier:
            for w, step in steps[v]:
                newval = val @ step
                if newval.is_zero():
                    continue
                if w == vertex:
                    ech.add(newval.flatten())
                nxt.append((w, newval))
        frontier = nxt
        length += 1
    return ech.to_subspace()


# -- corner detection and verdicts --------------------------------------------


@dataclass(frozen=True)
class CornerReport:
    """Whether a subspace of a unital algebra is a corner p*A*p."""

    is_corner: bool
    idempotent: Optional[AlgElement]
    factor_dim: Optional[int]
    is_full: bool
    is_zero: bool


@dataclass(frozen=True)
class ObstructionVerdict:
    verdict: str  # OBSTRUCTED | NOT-OBSTRUCTED | INCONCLUSIVE
    reason: str
    power_note: str = ("every positive tensor power shares this verdict: "
                       "scaling components by a nonzero integer leaves the "
                       "generated span unchanged")


def corner_detect(e_span: Subspace, algebra: StructureAlgebra) -> CornerReport:
    """Decide whether ``e_span`` equals p * algebra * p for an idempotent p.

    Algorithm: the zero span is the corner of p = 0. Otherwise solve the
    linear system for a two-sided unit e of the span; without one the span is
    not a corner. With one, verify e is idempotent and compare the span
    against span{e * b_k * e} over the algebra basis; equality is required,
    not containment.
    """
    n = algebra.dim
    if e_span.ambient_dim != n:
        raise DimensionMismatchError(
            f"subspace ambient {e_span.ambient_dim} does not match algebra dim {n}")
    if algebra.unit is None:
        raise AlgebraValidationError("corner detection needs a unital algebra")
    if e_span.dim == 0:
        return CornerReport(is_corner=True, idempotent=algebra.zero(),
                            factor_dim=0, is_full=False, is_zero=True)
    if e_span.is_full():
        return CornerReport(is_corner=True, idempotent=algebra.one(),
                            factor_dim=n, is_full=True, is_zero=False)
    basis = e_span.basis
    d = len(basis)
    mulc = algebra.mul_coeffs
    # Solve the left-unit system e * u_t = u_t only. When a two-sided unit u
    # exists, any left unit e satisfies e = e*u = u, so verifying the right
    # side on the solution loses nothing and halves the system.
    rows = []
    rhs = []
    for v in basis:
        left = [mulc(u, v) for u in basis]
        for c in range(n):
            rows.append(tuple(left[t][c] for t in range(d)))
            rhs.append(v[c])
    sol = solve_linear(tuple(rows), tuple(rhs))
    if sol is None:
        return CornerReport(is_corner=False, idempotent=None, factor_dim=None,
                            is_full=False, is_zero=False)
    e = [_ZERO] * n
    for t, x in enumerate(sol):
        if x:
            for c, bc in enumerate(basis[t]):
                e[c] += x * bc
    e = tuple(e)
    if any(mulc(v, e) != v for v in basis) or mulc(e, e) != e:
        return CornerReport(is_corner=False, idempotent=None, factor_dim=None,
                            is_full=False, is_zero=False)
    corner_vecs = []
    for k in range(n):
        bk = algebra.basis_vector(k)
        corner_vecs.append(mulc(mulc(e, bk), e))
    corner_span = echelonize(corner_vecs, ambient_dim=n)
    if corner_span != e_span:
        return CornerReport(is_corner=False, idempotent=None, factor_dim=None,
                            is_full=False, is_zero=False)
    return CornerReport(is_corner=True, idempotent=AlgElement(algebra, e),
                        factor_dim=e_span.dim, is_full=(e == algebra.unit),
                        is_zero=False)


def flag_nonliftable(report: CornerReport, base_is_ramified: bool) -> ObstructionVerdict:
    """Map a corner report to a lifting-obstruction verdict.

    OBSTRUCTED requires a nonzero corner over a ramified (supersingular-type)
    base. A non-corner span supports no conclusion either way.
    """
    if not report.is_corner:
        return ObstructionVerdict(
            verdict="INCONCLUSIVE",
            reason="span is not a corner, so the criterion does not apply")
    if report.is_zero:
        return ObstructionVerdict(
            verdict="NOT-OBSTRUCTED",
            reason="zero span corresponds to the zero factor")
    if not base_is_ramified:
        return ObstructionVerdict(
            verdict="NOT-OBSTRUCTED",
            reason="base algebra is not of ramified (supersingular) type")
    return ObstructionVerdict(
        verdict="OBSTRUCTED",
        reason="nonzero corner over a ramified base")


# -- pullback ------------------------------------------------------------------


@dataclass(frozen=True)
class Cover:
    """Cover datum at one vertex: iota (g' x g), pi (g x g'), degree >= 1 with
    pi @ iota = degree * identity and pi proportional to dagger(iota)."""

    iota: DMatrix
    pi: DMatrix
    degree: int


def _is_rational_multiple(u: Vec, w: Vec) -> bool:
    lam = None
    for a, b in zip(u, w):
        if not a and not b:
            continue
        if not b:
            return False
        cand = a / b
        if lam is None:
            lam = cand
        elif cand != lam:
            return False
    return lam is not None and lam != 0


def _validate_cover(cov: Cover, g: int, base: StructureAlgebra):
    if cov.iota.base is not base or cov.pi.base is not base:
        raise CoverValidationError("cover matrices over a different base")
    if cov.iota.cols != g or cov.pi.rows != g:
        raise CoverValidationError(
            f"cover shapes ({cov.iota.rows},{cov.iota.cols}) / "
            f"({cov.pi.rows},{cov.pi.cols}) do not frame size {g}")
    if cov.pi.cols != cov.iota.rows:
        raise CoverValidationError("pi and iota have incompatible shapes")
    if cov.degree < 1:
        raise CoverValidationError("cover degree must be >= 1")
    prod = cov.pi @ cov.iota
    want = DMatrix.scalar(base, g, cov.degree)
    if prod.flatten() != want.flatten():
        raise CoverValidationError("pi . iota is not degree * identity")
    # The transformation law needs pi ~ dagger(iota) (adjoint up to a nonzero
    # rational); both the identity and pure-scaling covers satisfy this.
    if not _is_rational_multiple(cov.pi.flatten(),
                                 cov.iota.dagger_transpose().flatten()):
        raise CoverValidationError(
            "pi must be a nonzero rational multiple of dagger_transpose(iota)")


def pullback_transform(graph: ObstructionGraph,
                       covers: Sequence[Cover]) -> ObstructionGraph:
    """Edge-wise transport along covers: the (i, j) component becomes
    iota_j @ edge @ pi_i, with new vertex sizes taken from the iotas.

    Guaranteed law: the loop span at i of the new graph equals
    span{ iota_i . e . pi_i } over a basis e of the old loop span.
    """
    covers = list(covers)
    if len(covers) != graph.r:
        raise CoverValidationError(
            f"need one cover per vertex ({graph.r}), got {len(covers)}")
    for v, cov in enumerate(covers, start=1):
        _validate_cover(cov, graph.size(v), graph.base)
    new_sizes = [cov.iota.rows for cov in covers]
    new_edges = {}
    for (i, j), m in graph.edges.items():
        new_edges[(i, j)] = covers[j - 1].iota @ m @ covers[i - 1].pi
    return ObstructionGraph(graph.base, new_sizes, new_edges)


def transport_span(cov: Cover, span: Subspace, g: int) -> Subspace:
    """span{ iota . e . pi } for e running over the basis of ``span``."""
    base = cov.iota.base
    out = []
    for v in span.basis:
        m = DMatrix.from_flat(base, g, g, v)
        out.append((cov.iota @ m @ cov.pi).flatten())
    return echelonize(out, ambient_dim=base.dim * cov.iota.rows * cov.iota.rows)


# -- specialization -------------------------------------------------------------


class SpecializationMap:
    """Injective multiplicative map applied componentwise to a graph.

    Two flavors: a base-algebra map applied entrywise to every matrix (must
    be unital, multiplicative, involution-compatible, injective -- validated
    exhaustively on basis pairs at construction), or per-vertex conjugation
    m -> U_a m U_b^(-1) by invertible matrices with U^dagger U a shared
    rational scalar (which makes the map commute with the dagger-transpose).
    """

    def __init__(self, base: StructureAlgebra, kind: str, base_rows=None,
                 units=None, inverses=None):
        self.base = base
        self.kind = kind
        self.base_rows = base_rows
        self.units = units
        self.inverses = inverses

    # -- constructors --

    @classmethod
    def base_linear(cls, base: StructureAlgebra, rows) -> "SpecializationMap":
        """Entrywise map of the base given by images of the basis elements."""
        rows = tuple(tuple(ratio(c) for c in r) for r in rows)
        if len(rows) != base.dim or any(len(r) != base.dim for r in rows):
            raise MapValidationError("map matrix must be dim x dim")
        rank = echelonize(rows, ambient_dim=base.dim).dim
        if rank != base.dim:
            raise MapValidationError("map is not injective")

        def h(v: Vec) -> Vec:
            out = [_ZERO] * base.dim
            for j, c in enumerate(v):
                if c:
                    for k, rc in enumerate(rows[j]):
                        if rc:
                            out[k] += c * rc
            return tuple(out)

        if base.unit is not None and h(base.unit) != base.unit:
            raise MapValidationError("map does not fix the unit")
        for i in range(base.dim):
            for j in range(base.dim):
                lhs = h(base.mul_coeffs(base.basis_vector(i), base.basis_vector(j)))
                rhs = base.mul_coeffs(h(base.basis_vector(i)), h(base.basis_vector(j)))
                if lhs != rhs:
                    raise MapValidationError(
                        f"map is not multiplicative on basis pair ({i},{j})")
        if base.involution is not None:
            for j in range(base.dim):
                lhs = h(base.involution_coeffs(base.basis_vector(j)))
                rhs = base.involution_coeffs(h(base.basis_vector(j)))
                if lhs != rhs:
                    raise MapValidationError(
                        f"map does not commute with the involution on basis {j}")
        return cls(base, "base", base_rows=rows)

    @classmethod
    def base_conjugation(cls, u: AlgElement) -> "SpecializationMap":
        """d -> u d u^(-1) for an invertible base element."""
        base = u.algebra
        u_inv = invert_element(u)
        if u_inv is None:
            raise MapValidationError("conjugating element is not invertible")
        rows = []
        for t in range(base.dim):
            img = u * base.basis_element(t) * u_inv
            rows.append(img.coeffs)
        return cls.base_linear(base, rows)

    @classmethod
    def vertex_conjugation(cls, base: StructureAlgebra,
                           units: Sequence[DMatrix]) -> "SpecializationMap":
        """m -> U_a m U_b^(-1); every U must satisfy U^dagger U = s * identity
        with one shared nonzero rational s."""
        units = list(units)
        shared = None
        inverses = []
        for u in units:
            if u.base is not base:
                raise MapValidationError("conjugating matrix over a different base")
            if u.rows != u.cols:
                raise MapValidationError("conjugating matrices must be square")
            gram = u.dagger_transpose() @ u
            s = gram.scalar_value()
            if s is None:
                raise MapValidationError("U^dagger U is not scalar")
            coeffs = s.coeffs
            rat = coeffs[0]
            if any(coeffs[1:]) or not rat:
                raise MapValidationError("U^dagger U is not a nonzero rational scalar")
            if shared is None:
                shared = rat
            elif rat != shared:
                raise MapValidationError(
                    "conjugating matrices have different similitude scalars")
            inverses.append(u.inverse())
        return cls(base, "vertex", units=units, inverses=inverses)

    # -- application --

    def apply_element(self, x: AlgElement) -> AlgElement:
        if self.kind != "base":
            raise MapValidationError("not an entrywise base map")
        out = [_ZERO] * self.base.dim
        for j, c in enumerate(x.coeffs):
            if c:
                for k, rc in enumerate(self.base_rows[j]):
                    if rc:
                        out[k] += c * rc
        return AlgElement(self.base, tuple(out))

    def apply_hom(self, a: int, b: int, m: DMatrix) -> DMatrix:
        """Image of a component from factor b to factor a (1-based vertices)."""
        if self.kind == "base":
            return DMatrix(self.base, tuple(
                tuple(self.apply_element(e) for e in row) for row in m.entries))
        ua = self.units[a - 1]
        ub_inv = self.inverses[b - 1]
        return ua @ m @ ub_inv

    def apply_subspace(self, a: int, b: int, span: Subspace,
                       rows_: int, cols_: int) -> Subspace:
        base = self.base
        out = []
        for v in span.basis:
            m = DMatrix.from_flat(base, rows_, cols_, v)
            out.append(self.apply_hom(a, b, m).flatten())
        return echelonize(out, ambient_dim=span.ambient_dim)


def specialize_transform(graph: ObstructionGraph,
                         h: SpecializationMap) -> ObstructionGraph:
    """Edge-wise image graph under a validated specialization map.

    Law (testable downstream): the image of the loop span at i equals the
    loop span at i of the image graph.
    """
    if h.base is not graph.base:
        raise MapValidationError("map base does not match the graph base")
    if h.kind == "vertex":
        if len(h.units) != graph.r:
            raise MapValidationError(
                f"need one conjugating matrix per vertex ({graph.r})")
        for v, u in enumerate(h.units, start=1):
            if u.rows != graph.size(v):
                raise MapValidationError(
                    f"conjugating matrix at vertex {v} has size {u.rows}, "
                    f"expected {graph.size(v)}")
    new_edges = {}
    for (i, j), m in graph.edges.items():
        new_edges[(i, j)] = h.apply_hom(j, i, m)
    return ObstructionGraph(graph.base, graph.sizes, new_edges)


# -- helpers used by tests and the CLI ------------------------------------------


def scale_edges(graph: ObstructionGraph, m: int) -> ObstructionGraph:
    """The graph of the m-th tensor power: every component scaled by m."""
    if m == 0:
        return ObstructionGraph(graph.base, graph.sizes, {})
    return ObstructionGraph(graph.base, graph.sizes,
                            {k: e * m for k, e in graph.edges.items()})


def relabel_vertices(graph: ObstructionGraph, perm: Sequence[int]) -> ObstructionGraph:
    """Relabeled graph: new vertex v plays the role of old vertex perm[v-1]."""
    if sorted(perm) != list(range(1, graph.r + 1)):
        raise GraphValidationError("perm must be a permutation of 1..r")
    sizes = [graph.size(perm[v - 1]) for v in range(1, graph.r + 1)]
    edges = {}
    for i in range(1, graph.r + 1):
        for j in range(i + 1, graph.r + 1):
            m = graph.hom_map(perm[j - 1], perm[i - 1])
            if not m.is_zero():
                edges[(i, j)] = m
    return ObstructionGraph(graph.base, sizes, edges)


def dagger_span(span: Subspace, base: StructureAlgebra, g: int) -> Subspace:
    """span{ dagger_transpose(e) } for e over the basis of an End-space span."""
    out = []
    for v in span.basis:
        m = DMatrix.from_flat(base, g, g, v)
        out.append(m.dagger_transpose().flatten())
    return echelonize(out, ambient_dim=span.ambient_dim)
