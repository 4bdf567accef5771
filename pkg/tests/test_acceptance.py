"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`. Every tolerance is exact
(subspace and coefficient equality over Q); the only numeric bounds are the
stated wall-clock budgets and the statistical bound of criterion 9.
"""

import random
import time
from fractions import Fraction as F

import pytest

from obstructor.algebra import (
    INF,
    DMatrix,
    hilbert_symbol,
    matrix_algebra,
    matrix_unit,
    quaternion_algebra,
    quaternion_for_prime,
    ramified_places,
    rationals,
    reduced_norm,
    split_model,
)
from obstructor.closure import (
    generates_fully,
    stabilized_word_span,
    subrng_closure,
)
from obstructor.divisor import (
    contains_double_fiber,
    parse_poly,
    substitute_powers,
    verify_factorization,
)
from obstructor.linalg import echelonize
from obstructor.obstruction import (
    Cover,
    ObstructionGraph,
    SpecializationMap,
    compute_obstruction,
    corner_detect,
    flag_nonliftable,
    loop_oracle,
    pullback_transform,
    specialize_transform,
    transport_span,
)
from obstructor.witness import (
    build_r3_graph,
    build_r4_graph,
    random_rosati_generator,
    shift_witness,
)


def _report(num, ok, desc):
    print(f"\nACCEPTANCE {num:2d}: {'PASS' if ok else 'FAIL'} - {desc}")
    assert ok, f"criterion {num} failed: {desc}"


@pytest.fixture(scope="module")
def models():
    return {g: split_model(g) for g in (2, 3, 4, 5)}


def rand_elt(rng, base, bound=2):
    return base.element(tuple(rng.randint(-bound, bound) for _ in range(base.dim)))


def rand_graph(rng, base, r, maxg=2, density=0.8):
    sizes = [rng.randint(1, maxg) for _ in range(r)]
    edges = {}
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            if rng.random() < density:
                edges[(i, j)] = DMatrix.from_entries(base, [
                    [rand_elt(rng, base) for _ in range(sizes[i - 1])]
                    for _ in range(sizes[j - 1])])
    return ObstructionGraph(base, sizes, edges)


def test_criterion_1_identity_chain(models):
    start = time.perf_counter()
    discrepancies_seen = 0
    ok = True
    for g in (2, 3, 4, 5):
        model = models[g]
        n = 2 * g
        x = shift_witness(g)
        a = x ** (n - 1)
        b = x.dagger() ** (n - 3)
        ok &= a == matrix_unit(model, 1, n)
        low = x ** (n - 3)
        want = (matrix_unit(model, 1, n - 2) + matrix_unit(model, 2, n - 1)
                + matrix_unit(model, 3, n))
        ok &= low == want
        ok &= b == -(matrix_unit(model, n - 3, 2) + matrix_unit(model, n, 1)
                     + matrix_unit(model, n - 1, 4))
        ok &= (a * b) == -matrix_unit(model, 1, 1)
        # Documented chain lists bab = -e(2g,1); exact computation gives the
        # opposite sign, which must be reported, not hidden.
        bab = b * a * b
        documented = -matrix_unit(model, n, 1)
        computed = matrix_unit(model, n, 1)
        ok &= bab != documented
        ok &= bab == computed
        discrepancies_seen += 1
        rho = sum((matrix_unit(model, t - 1, t) for t in range(3, n + 1)),
                  matrix_unit(model, 1, 2)) + matrix_unit(model, n, 1)
        ok &= (x - bab) != rho       # documented form fails with computed bab
        ok &= (x + bab) == rho       # and holds with the computed sign
    elapsed = time.perf_counter() - start
    ok &= discrepancies_seen == 4
    ok &= elapsed < 1.0
    _report(1, ok, f"identity chain g=2..5 exact, sign discrepancy reported "
                   f"({elapsed:.3f} s < 1 s)")


def test_criterion_2_generation(models):
    ok = True
    elapsed_g5 = None
    for g in (2, 3, 4, 5):
        start = time.perf_counter()
        model = models[g]
        x = shift_witness(g)
        closure = subrng_closure(model, [x, x.dagger()])
        oracle, _ = stabilized_word_span(model, [x, x.dagger()])
        took = time.perf_counter() - start
        ok &= closure.span.dim == (2 * g) ** 2
        ok &= closure.span.is_full()
        ok &= oracle == closure.span
        if g == 5:
            elapsed_g5 = took
            ok &= took < 30.0
    _report(2, ok, f"closure of witness pair is full M_2g(Q), word-oracle "
                   f"cross-checked (g=5 in {elapsed_g5:.2f} s < 30 s)")


def test_criterion_3_g1_impossibility():
    ok = True
    for p in (2, 3, 5):
        base = quaternion_for_prime(p)
        rng = random.Random(1000 + p)
        failures = 0
        for _ in range(100):
            x = base.element(tuple(rng.randint(-10, 10) for _ in range(4)))
            res = subrng_closure(base, [x, x.dagger()])
            dim_ok = res.span.dim <= 3
            comm = all(base.mul_coeffs(u, v) == base.mul_coeffs(v, u)
                       for u in res.span.basis for v in res.span.basis)
            if dim_ok and comm:
                failures += 1
        ok &= failures == 100
    _report(3, ok, "100/100 seeded pairs per prime p in {2,3,5}: closure of "
                   "{x, dagger(x)} in D has dim <= 3 and is commutative")


@pytest.mark.parametrize("g,p", [(2, 2), (2, 3), (3, 2)])
def test_criterion_4_main_construction(g, p):
    start = time.perf_counter()
    graph = build_r3_graph(g, p, seed=0)
    span = compute_obstruction(graph, 1)
    end_alg = matrix_algebra(graph.base, g)
    report = corner_detect(span, end_alg)
    verdict = flag_nonliftable(report, True)
    x = graph.edges[(1, 2)]
    closure = subrng_closure(end_alg, [
        end_alg.element(x.flatten()),
        end_alg.element(x.dagger_transpose().flatten())])
    elapsed = time.perf_counter() - start
    ok = (span.dim == 4 * g * g and report.is_full
          and verdict.verdict == "OBSTRUCTED" and closure.span == span
          and elapsed < 60.0)
    _report(4, ok, f"three-vertex construction (g={g}, p={p}): full span, "
                   f"is_full corner, OBSTRUCTED, equals generator closure "
                   f"({elapsed:.1f} s < 60 s)")


def test_criterion_5_albert_construction():
    graph = build_r4_graph(2, 2, seed=0)
    span = compute_obstruction(graph, 1)
    end_alg = matrix_algebra(graph.base, 2)
    # the three short loops at vertex 1 produce exactly 1, x, y
    one = DMatrix.identity(graph.base, 2)
    x = graph.edges[(2, 4)]
    y = graph.edges[(3, 4)]
    loop_131 = graph.hom_map(1, 3) @ graph.hom_map(3, 1)
    loop_1421 = graph.hom_map(1, 4) @ graph.hom_map(4, 2) @ graph.hom_map(2, 1)
    loop_1431 = graph.hom_map(1, 4) @ graph.hom_map(4, 3) @ graph.hom_map(3, 1)
    ok = loop_131.flatten() == one.flatten()
    ok &= loop_1421.flatten() == x.flatten()
    ok &= loop_1431.flatten() == y.flatten()
    ok &= span.dim == 16 and span.is_full()
    ok &= corner_detect(span, end_alg).is_full
    ok &= generates_fully(end_alg, [end_alg.one(), end_alg.element(x.flatten()),
                                    end_alg.element(y.flatten())])
    _report(5, ok, "four-vertex construction (g=2, p=2): loops give {1, x, y} "
                   "and the span is everything")


def _rand_cover(rng, base, g, unit_elts):
    gp = g + rng.randint(0, 1)
    q = unit_elts[rng.randrange(len(unit_elts))] * rng.randint(1, 2)
    if rng.random() < 0.5:
        q = -q
    rows = list(range(gp))
    rng.shuffle(rows)
    ents = [[base.zero() for _ in range(g)] for _ in range(gp)]
    for c in range(g):
        ents[rows[c]][c] = q
    iota = DMatrix.from_entries(base, ents)
    mu = rng.randint(1, 2)
    return Cover(iota=iota, pi=iota.dagger_transpose() * F(mu),
                 degree=int(reduced_norm(q) * mu))


def test_criterion_6_pullback_law():
    base = quaternion_for_prime(2)
    unit_elts = [base.one(), base.basis_element(1), base.basis_element(2),
                 base.basis_element(3)]
    rng = random.Random(606)
    laws = 0
    corners_checked = 0
    ok = True
    for trial in range(20):
        graph = rand_graph(rng, base, rng.randint(2, 4))
        covers = [_rand_cover(rng, base, graph.size(v), unit_elts)
                  for v in range(1, graph.r + 1)]
        lifted = pullback_transform(graph, covers)
        law_holds = True
        for v in range(1, graph.r + 1):
            span = compute_obstruction(graph, v)
            transported = transport_span(covers[v - 1], span, graph.size(v))
            law_holds &= transported == compute_obstruction(lifted, v)
            report = corner_detect(span, matrix_algebra(base, graph.size(v)))
            if report.is_corner:
                lifted_report = corner_detect(
                    compute_obstruction(lifted, v),
                    matrix_algebra(base, lifted.size(v)))
                ok &= lifted_report.is_corner
                corners_checked += 1
        if law_holds:
            laws += 1
    ok &= laws == 20
    _report(6, ok, f"pullback law exact on 20/20 seeded graphs; corner status "
                   f"transported in all {corners_checked} corner cases")


def test_criterion_7_specialization_law():
    base = quaternion_for_prime(2)
    rng = random.Random(707)
    laws = 0
    for trial in range(20):
        graph = rand_graph(rng, base, rng.randint(2, 3))
        if trial % 2 == 0:
            while True:
                u = rand_elt(rng, base, bound=3)
                if reduced_norm(u):
                    break
            h = SpecializationMap.base_conjugation(u)
        else:
            q = [base.one(), base.basis_element(1), base.basis_element(2),
                 base.basis_element(3)][rng.randrange(4)]
            units = []
            for v in range(1, graph.r + 1):
                n = graph.size(v)
                perm = list(range(n))
                rng.shuffle(perm)
                ents = [[base.zero()] * n for _ in range(n)]
                for c in range(n):
                    ents[perm[c]][c] = q if rng.random() < 0.5 else -q
                units.append(DMatrix.from_entries(base, ents))
            h = SpecializationMap.vertex_conjugation(base, units)
        image = specialize_transform(graph, h)
        law_holds = True
        for v in range(1, graph.r + 1):
            span = compute_obstruction(graph, v)
            pushed = h.apply_subspace(v, v, span, graph.size(v), graph.size(v))
            law_holds &= pushed == compute_obstruction(image, v)
        if law_holds:
            laws += 1
    _report(7, laws == 20, "specialization law exact on 20/20 seeded "
                           "injective multiplicative maps")


def test_criterion_8_ramification():
    ok = True
    for p in (2, 3, 5, 7, 11, 13):
        alg = quaternion_for_prime(p)
        a, b = alg.quaternion_params
        ok &= ramified_places(a, b) == [p, INF]
    rng = random.Random(808)
    for _ in range(50):
        a = F(rng.choice([n for n in range(-40, 41) if n]))
        b = F(rng.choice([n for n in range(-40, 41) if n]),
              rng.randint(1, 10))
        prod = 1
        places = set([2, INF])
        for q in (a, b):
            for n in (abs(q.numerator), q.denominator):
                f = 2
                while f * f <= n:
                    while n % f == 0:
                        places.add(f)
                        n //= f
                    f += 1
                if n > 1:
                    places.add(n)
        for v in places:
            prod *= hilbert_symbol(a, b, v)
        ok &= prod == 1
    _report(8, ok, "quaternion_for_prime ramified exactly at {p, inf} for "
                   "p in {2,3,5,7,11,13}; product formula 50/50")


def test_criterion_9_genericity_sampling():
    alg = matrix_algebra(quaternion_for_prime(2), 2)
    hits = 0
    for seed in range(100):
        search = random_rosati_generator(alg, seed=seed, max_tries=5,
                                         coeff_bound=10)
        if search.found:
            hits += 1
    _report(9, hits >= 95, f"random witness search: {hits}/100 seeds succeed "
                           f"within 5 tries (need >= 95)")


def test_criterion_10_divisor_example():
    start = time.perf_counter()
    f = parse_poly("x1*x2*x3 - y1*y2*y3", 3)
    ok = f.degrees == (1, 1, 1)
    ok &= contains_double_fiber(f, 1, ("0", "1"), 2, ("1", "0"))
    lifted = substitute_powers(f, (2, 2, 2))
    plus = parse_poly("x1*x2*x3 + y1*y2*y3", 3)
    ok &= verify_factorization(lifted, [f, plus])
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1.0
    _report(10, ok, f"hypersurface example: double-fiber containment and "
                    f"exact splitting under the squaring cover "
                    f"({elapsed:.3f} s < 1 s)")


def test_criterion_11_oracle_equivalence():
    base = quaternion_for_prime(2)
    rng = random.Random(1111)
    loops_ok = 0
    for trial in range(25):
        graph = rand_graph(rng, base, rng.randint(2, 4), density=0.7)
        span = compute_obstruction(graph, 1)
        agreed = False
        for max_edges in range(2, 12):
            if loop_oracle(graph, 1, max_edges) == span:
                agreed = True
                break
        if agreed:
            loops_ok += 1
    arenas = [
        quaternion_algebra(-1, -1),
        matrix_algebra(rationals(), 2),
        matrix_algebra(rationals(), 3),
        matrix_algebra(quaternion_for_prime(2), 2),
        split_model(2),
        matrix_algebra(quaternion_for_prime(3), 3),
    ]
    words_ok = 0
    for trial in range(50):
        alg = arenas[trial % len(arenas)]
        gens = [rand_elt(rng, alg, bound=3) for _ in range(1 + trial % 2)]
        res = subrng_closure(alg, gens)
        oracle, _ = stabilized_word_span(alg, gens)
        if oracle == res.span:
            words_ok += 1
    ok = loops_ok == 25 and words_ok == 50
    _report(11, ok, f"loop oracle = fixed point on {loops_ok}/25 graphs; "
                    f"word oracle = closure on {words_ok}/50 generator sets")
