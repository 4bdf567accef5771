"""Command-line front end.

Subcommands: verify, obstruction, find-generator, corner, hilbert, divisor.
All output is JSON on stdout with rationals as strings; identical invocations
produce byte-identical output. Exit codes: 0 success, 1 verification failure,
2 usage or parse error. The environment variable OBSTRUCTOR_SEED overrides
the default seed wherever a seed applies.
"""

from __future__ import annotations

import json
import os
import sys
from fractions import Fraction

import click

from .algebra import (
    INF,
    hilbert_symbol,
    is_definite_rational_quaternion,
    matrix_algebra,
    quaternion_for_prime,
    ramified_places,
    relevant_places,
    split_model,
)
from .arith import is_prime
from .closure import stabilized_word_span, subrng_closure
from .divisor import contains_double_fiber, parse_poly, substitute_powers, verify_factorization
from .errors import ObstructorError
from .linalg import echelonize, ratio
from .obstruction import (
    compute_obstruction,
    corner_detect,
    flag_nonliftable,
    loop_oracle,
    path_span_table,
)
from .serialize import (
    SchemaError,
    algebra_from_json,
    coeffs_from_json,
    coeffs_to_json,
    dump_json,
    graph_from_json,
    subspace_basis_json,
)
from .witness import (
    build_r3_graph,
    random_rosati_generator,
    shift_witness,
    verify_identity_chain,
)

# Identities whose documented right-hand side is known to disagree with exact
# computation by one sign; reported, never hidden, fatal only under --strict.
_DOCUMENTED_DISCREPANCIES = {"bab", "x_minus_bab_is_rotation"}


def _default_seed() -> int:
    env = os.environ.get("OBSTRUCTOR_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise click.UsageError(f"OBSTRUCTOR_SEED must be an integer, got {env!r}")


def _emit(obj) -> None:
    sys.stdout.write(dump_json(obj))


def _parse_rat_flag(value: str, name: str) -> Fraction:
    try:
        return ratio(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise click.UsageError(f"--{name} must be a rational like -3 or 3/4")


def _load_json(path: str, what: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise click.UsageError(f"{what} file not found: {path}")
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"{what} file {path}: invalid JSON: {exc}")


@click.group()
def main():
    """Exact-arithmetic engine for loop-span lifting obstructions."""


# -- verify -----------------------------------------------------------------


def _chain_section(g: int) -> tuple[dict, bool, bool]:
    rep = verify_identity_chain(g, check_generation=False)
    entries = []
    any_fail = False
    any_disc = False
    for ident in rep.identities:
        if ident.holds:
            status = "PASS"
        elif ident.name in _DOCUMENTED_DISCREPANCIES:
            status = "PAPER-DISCREPANCY"
            any_disc = True
        else:
            status = "FAIL"
            any_fail = True
        entry = {"name": ident.name, "status": status,
                 "computed": ident.computed, "stated": ident.stated}
        if ident.note:
            entry["note"] = ident.note
        entries.append(entry)
    return {"g": g, "identities": entries}, any_fail, any_disc


def _generation_section(g: int) -> tuple[dict, bool]:
    model = split_model(g)
    x = shift_witness(g)
    closure = subrng_closure(model, [x, x.dagger()])
    oracle, length = stabilized_word_span(model, [x, x.dagger()])
    expected = (2 * g) ** 2
    ok = closure.span.dim == expected and oracle == closure.span
    return ({"g": g, "dim": closure.span.dim, "expected": expected,
             "rounds": closure.rounds, "oracle_dim": oracle.dim,
             "oracle_stable_len": length,
             "oracle_equal": oracle == closure.span, "ok": ok}, not ok)

def _ramification_section(p: int) -> tuple[dict, bool]:
    alg = quaternion_for_prime(p)
    a, b = alg.quaternion_params
    ram = ramified_places(a, b)
    want = [p, INF]
    ok = ram == want
    return ({"p": p, "a": str(a), "b": str(b),
             "ramified": [str(v) for v in ram],
             "expected": [str(v) for v in want], "ok": ok}, not ok)


def _impossibility_section(g: int, p: int, seed: int, trials: int) -> tuple[dict, bool]:
    import random

    base = quaternion_for_prime(p)
    rng = random.Random(seed)
    non_generating = 0
    max_dim = 0
    all_comm = True
    for _ in range(trials):
        x = base.element(tuple(rng.randint(-10, 10) for _ in range(4)))
        res = subrng_closure(base, [x, x.dagger()])
        d = res.span.dim
        max_dim = max(max_dim, d)
        if d < 4:
            non_generating += 1
        vecs = res.span.basis
        for u in vecs:
            for v in vecs:
                if base.mul_coeffs(u, v) != base.mul_coeffs(v, u):
                    all_comm = False
    ok = non_generating == trials and max_dim <= 3 and all_comm
    return ({"g": 1, "p": p, "seed": seed, "trials": trials,
             "non_generating": non_generating, "max_closure_dim": max_dim,
             "all_commutative": all_comm, "ok": ok}, not ok)


def _construction_section(g: int, p: int, seed: int) -> tuple[dict, bool]:
    graph = build_r3_graph(g, p, seed=seed)
    end_alg = matrix_algebra(graph.base, g)
    span = compute_obstruction(graph, 1)
    report = corner_detect(span, end_alg)
    verdict = flag_nonliftable(report, is_definite_rational_quaternion(graph.base))
    x = graph.edges[(1, 2)]
    closure = subrng_closure(end_alg, [end_alg.element(x.flatten()),
                                       end_alg.element(x.dagger_transpose().flatten())])
    expected = 4 * g * g
    ok = (span.dim == expected and report.is_full
          and verdict.verdict == "OBSTRUCTED" and closure.span == span)
    return ({"g": g, "p": p, "seed": seed, "e_dim": span.dim,
             "expected": expected, "is_full": report.is_full,
             "verdict": verdict.verdict,
             "matches_generator_closure": closure.span == span, "ok": ok}, not ok)


def _divisor_section() -> tuple[dict, bool]:
    f = parse_poly("x1*x2*x3 - y1*y2*y3", 3)
    hit = contains_double_fiber(f, 1, ("0", "1"), 2, ("1", "0"))
    lifted = substitute_powers(f, (2, 2, 2))
    plus = parse_poly("x1*x2*x3 + y1*y2*y3", 3)
    split = verify_factorization(lifted, [f, plus])
    ok = hit and split
    return ({"poly": f.to_string(), "double_fiber": hit,
             "splitting_verified": split, "ok": ok}, not ok)


@main.command()
@click.option("--g", "g", type=int, required=True, help="Vertex size (1 runs the impossibility suite).")
@click.option("--p", "p", type=int, required=True, help="Base prime.")
@click.option("--all", "run_all", is_flag=True, help="Run the full identity battery.")
@click.option("--strict", is_flag=True,
              help="Treat documented sign discrepancies as fatal.")
@click.option("--seed", type=int, default=None, help="Seed override.")
@click.option("--trials", type=int, default=100, show_default=True,
              help="Trials for the g = 1 impossibility suite.")
def verify(g, p, run_all, strict, seed, trials):
    """Run the exact identity suite and report each check."""
    if g < 1:
        raise click.UsageError("--g must be >= 1")
    if not is_prime(p):
        raise click.UsageError("--p must be prime")
    seed = _default_seed() if seed is None else seed
    any_fail = False
    any_disc = False
    report: dict = {"seed": seed}
    if run_all:
        chains = []
        gens = []
        for gg in (2, 3, 4, 5):
            sec, fail, disc = _chain_section(gg)
            chains.append(sec)
            any_fail |= fail
            any_disc |= disc
            gsec, gfail = _generation_section(gg)
            gens.append(gsec)
            any_fail |= gfail
        report["chain"] = chains
        report["generation"] = gens
        rams = []
        for pp in (2, 3, 5, 7, 11, 13):
            sec, fail = _ramification_section(pp)
            rams.append(sec)
            any_fail |= fail
        report["ramification"] = rams
        imps = []
        for pp in (2, 3, 5):
            sec, fail = _impossibility_section(1, pp, seed, trials)
            imps.append(sec)
            any_fail |= fail
        report["impossibility"] = imps
        sec, fail = _construction_section(2, p, seed)
        report["construction"] = [sec]
        any_fail |= fail
        sec, fail = _divisor_section()
        report["divisor"] = sec
        any_fail |= fail
    elif g == 1:
        sec, fail = _impossibility_section(1, p, seed, trials)
        report["impossibility"] = sec
        # Failure to generate is the expected (PASS) outcome here.
        any_fail |= fail
    else:
        sec, fail, disc = _chain_section(g)
        report["chain"] = sec
        any_fail |= fail
        any_disc |= disc
        gsec, gfail = _generation_section(g)
        report["generation"] = gsec
        any_fail |= gfail
        rsec, rfail = _ramification_section(p)
        report["ramification"] = rsec
        any_fail |= rfail
        csec, cfail = _construction_section(g, p, seed)
        report["construction"] = csec
        any_fail |= cfail
    failed = any_fail or (strict and any_disc)
    report["status"] = "FAIL" if failed else "PASS"
    _emit(report)
    sys.exit(1 if failed else 0)


# -- obstruction ---------------------------------------------------------------


@main.command()
@click.option("--graph", "graph_path", type=str, required=True,
              help="Graph descriptor JSON file.")
@click.option("--vertex", type=int, required=True, help="Base vertex (1-based).")
@click.option("--oracle-len", type=int, default=None,
              help="Also run the literal loop oracle up to this many edges.")
def obstruction(graph_path, vertex, oracle_len):
    """Loop span, corner report, and verdict for one vertex of a graph."""
    payload = _load_json(graph_path, "graph")
    try:
        graph = graph_from_json(payload)
    except (SchemaError, ObstructorError) as exc:
        raise click.UsageError(str(exc))
    if not (1 <= vertex <= graph.r):
        raise click.UsageError(f"--vertex must be in 1..{graph.r}")
    span = compute_obstruction(graph, vertex)
    table = path_span_table(graph)
    end_alg = matrix_algebra(graph.base, graph.size(vertex))
    report = corner_detect(span, end_alg)
    ramified = is_definite_rational_quaternion(graph.base)
    verdict = flag_nonliftable(report, ramified)
    out = {
        "vertex": vertex,
        "e_dim": span.dim,
        "rounds": table.rounds,
        "basis": subspace_basis_json(span),
        "is_corner": report.is_corner,
        "is_full": report.is_full,
        "is_zero": report.is_zero,
        "factor_dim": report.factor_dim,
        "idempotent": (None if report.idempotent is None
                       else coeffs_to_json(report.idempotent.coeffs)),
        "base_ramified": ramified,
        "verdict": verdict.verdict,
        "verdict_reason": verdict.reason,
        "power_note": verdict.power_note,
    }
    if oracle_len is not None:
        if oracle_len < 2:
            raise click.UsageError("--oracle-len must be >= 2")
        oracle = loop_oracle(graph, vertex, oracle_len)
        out["oracle_len"] = oracle_len
        out["oracle_dim"] = oracle.dim
        out["oracle_equal"] = oracle == span
    _emit(out)


# -- find-generator --------------------------------------------------------------


@main.command("find-generator")
@click.option("--g", "g", type=int, required=True, help="Matrix size (>= 2).")
@click.option("--p", "p", type=int, required=True, help="Base prime.")
@click.option("--seed", type=int, default=None, help="Seed (default 0 / OBSTRUCTOR_SEED).")
@click.option("--tries", type=int, default=200, show_default=True)
@click.option("--bound", type=int, default=10, show_default=True,
              help="Coefficients are sampled in [-bound, bound].")
def find_generator(g, p, seed, tries, bound):
    """Search for x with {x, dagger(x)} generating the matrix quaternion algebra."""
    if g < 1:
        raise click.UsageError("--g must be >= 1")
    if not is_prime(p):
        raise click.UsageError("--p must be prime")
    if tries < 1 or bound < 1:
        raise click.UsageError("--tries and --bound must be >= 1")
    seed = _default_seed() if seed is None else seed
    alg = matrix_algebra(quaternion_for_prime(p), g)
    search = random_rosati_generator(alg, seed=seed, max_tries=tries,
                                     coeff_bound=bound)
    out = {"g": g, "p": p, "seed": seed, "bound": bound,
           "found": search.found, "tries": search.tries}
    if search.found:
        from .algebra import element_to_dmatrix
        from .serialize import dmatrix_to_json

        out["element"] = coeffs_to_json(search.element.coeffs)
        out["matrix"] = dmatrix_to_json(element_to_dmatrix(search.element))
    _emit(out)
    sys.exit(0 if search.found else 1)


# -- corner -----------------------------------------------------------------------


@main.command()
@click.option("--algebra", "algebra_path", type=str, required=True,
              help="Algebra descriptor JSON file.")
@click.option("--elements", "elements_path", type=str, required=True,
              help="JSON file: list of coefficient vectors spanning the subspace.")
def corner(algebra_path, elements_path):
    """Corner/idempotent detection for a spanned subspace of an algebra."""
    alg_payload = _load_json(algebra_path, "algebra")
    try:
        alg = algebra_from_json(alg_payload)
    except (SchemaError, ObstructorError) as exc:
        raise click.UsageError(str(exc))
    span_payload = _load_json(elements_path, "elements")
    if not isinstance(span_payload, list):
        raise click.UsageError("elements file must be a JSON list of coefficient vectors")
    try:
        vecs = [coeffs_from_json(v, f"elements[{t}]")
                for t, v in enumerate(span_payload)]
    except SchemaError as exc:
        raise click.UsageError(str(exc))
    for t, v in enumerate(vecs):
        if len(v) != alg.dim:
            raise click.UsageError(
                f"elements[{t}] has {len(v)} coefficients, algebra dim is {alg.dim}")
    span = echelonize(vecs, ambient_dim=alg.dim)
    report = corner_detect(span, alg)
    _emit({
        "dim": span.dim,
        "is_corner": report.is_corner,
        "is_full": report.is_full,
        "is_zero": report.is_zero,
        "factor_dim": report.factor_dim,
        "idempotent": (None if report.idempotent is None
                       else coeffs_to_json(report.idempotent.coeffs)),
    })


# -- hilbert -----------------------------------------------------------------------


@main.command()
@click.option("--a", "a_str", type=str, required=True)
@click.option("--b", "b_str", type=str, required=True)
@click.option("--place", type=str, default=None,
              help="A prime or 'inf'; default: all places dividing 2ab plus inf.")
def hilbert(a_str, b_str, place):
    """Local Hilbert symbols of the pair (a, b) over Q."""
    a = _parse_rat_flag(a_str, "a")
    b = _parse_rat_flag(b_str, "b")
    if not a or not b:
        raise click.UsageError("--a and --b must be nonzero")
    if place is not None:
        if place == INF:
            v = INF
        else:
            try:
                v = int(place)
            except ValueError:
                raise click.UsageError("--place must be a prime or 'inf'")
            if not is_prime(v):
                raise click.UsageError("--place must be a prime or 'inf'")
        _emit({"a": str(a), "b": str(b), "place": str(v),
               "symbol": hilbert_symbol(a, b, v)})
        return
    places = relevant_places(a, b)
    symbols = {str(v): hilbert_symbol(a, b, v) for v in places}
    product = 1
    for s in symbols.values():
        product *= s
    _emit({"a": str(a), "b": str(b), "symbols": symbols,
           "ramified": [str(v) for v in places if symbols[str(v)] == -1],
           "product": product})


# -- divisor -----------------------------------------------------------------------


def _parse_fiber_spec(spec: str):
    import re

    m = re.fullmatch(r"\s*(\d+)\s*:\s*\[([^:\]]+):([^:\]]+)\]\s*", spec)
    if not m:
        raise click.UsageError(
            f"fiber spec {spec!r} must look like 1:[0:1]")
    idx = int(m.group(1))
    try:
        pt = (ratio(m.group(2).strip()), ratio(m.group(3).strip()))
    except (ValueError, TypeError, ZeroDivisionError):
        raise click.UsageError(f"fiber spec {spec!r}: coordinates must be rational")
    return idx, pt


@main.command()
@click.option("--poly", "poly_text", type=str, required=True)
@click.option("--r", "r", type=int, required=True, help="Number of projective-line factors.")
@click.option("--subst", type=str, default=None,
              help="Comma-separated cover exponents, e.g. 2,2,2.")
@click.option("--fiber", "fibers", type=str, multiple=True,
              help="Two specs i:[a:b] selecting points in two factors.")
@click.option("--factors", "factor_texts", type=str, multiple=True,
              help="Exact factorization of the (substituted) polynomial.")
def divisor(poly_text, r, subst, fibers, factor_texts):
    """Multihomogeneous polynomial checks on a product of projective lines."""
    if r < 1:
        raise click.UsageError("--r must be >= 1")
    try:
        f = parse_poly(poly_text, r)
    except ObstructorError as exc:
        raise click.UsageError(f"--poly: {exc}")
    out = {"poly": f.to_string(), "r": r, "multidegree": list(f.degrees)}
    if fibers:
        if len(fibers) != 2:
            raise click.UsageError("--fiber must be given exactly twice")
        (i, pt_i) = _parse_fiber_spec(fibers[0])
        (j, pt_j) = _parse_fiber_spec(fibers[1])
        try:
            hit = contains_double_fiber(f, i, pt_i, j, pt_j)
        except ObstructorError as exc:
            raise click.UsageError(str(exc))
        out["double_fiber_hits"] = [{
            "i": i, "point_i": f"[{pt_i[0]}:{pt_i[1]}]",
            "j": j, "point_j": f"[{pt_j[0]}:{pt_j[1]}]",
            "contained": hit,
        }]
    target = f
    if subst is not None:
        try:
            exps = [int(e) for e in subst.split(",")]
        except ValueError:
            raise click.UsageError("--subst must be comma-separated integers")
        try:
            target = substitute_powers(f, exps)
        except ObstructorError as exc:
            raise click.UsageError(str(exc))
        out["substituted"] = {"exponents": exps, "poly": target.to_string(),
                              "multidegree": list(target.degrees)}
    if factor_texts:
        try:
            factors = [parse_poly(t, r) for t in factor_texts]
            ok = verify_factorization(target, factors)
        except ObstructorError as exc:
            raise click.UsageError(str(exc))
        out["splitting_verified"] = ok
    _emit(out)


if __name__ == "__main__":
    main()
