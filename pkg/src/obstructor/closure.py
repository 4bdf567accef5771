"""Q-subrng closure: the smallest subspace containing a generating set and
closed under multiplication. The unit is never adjoined.

The primary algorithm is a fixed point on subspaces: each round adjoins the
span of all products of current spanning vectors. Rounds are incremental --
only products with at least one factor that is new since the last round are
computed, which is span-equivalent because old-by-old products were already
adjoined. Termination is guaranteed in at most dim(A) growth rounds.

``word_span_oracle`` is the independent cross-check: the span of all words in
the generators up to a given length, built length by length. Every word of
length L+1 is a generator times a word of length L, so the leveled
construction enumerates exactly the word values up to span equivalence, and
stabilization over one length step is genuinely permanent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .algebra import AlgElement, StructureAlgebra
from .errors import AlgebraValidationError
from .linalg import Echelon, Subspace, Vec

__all__ = ["SubrngResult", "subrng_closure", "generates_fully", "word_span_oracle"]


@dataclass(frozen=True)
class SubrngResult:
    """Outcome of a subrng closure computation.

    ``rounds`` counts the product passes that enlarged the span; ``closed``
    certifies the fixed point was reached (always true on normal return, and
    trivially true when the span saturated the whole algebra early).
    """

    span: Subspace
    generators: tuple[AlgElement, ...]
    closed: bool
    rounds: int


def _check_gens(algebra: StructureAlgebra, gens) -> tuple[AlgElement, ...]:
    out = tuple(gens)
    for x in out:
        if not isinstance(x, AlgElement) or x.algebra is not algebra:
            raise AlgebraValidationError("generator outside the given algebra")
    return out


def _closure_span(algebra: StructureAlgebra, vecs: Sequence[Vec],
                  stop_at_full: bool) -> tuple[Echelon, int]:
    ech = Echelon(algebra.dim)
    spanning: list[Vec] = []
    for v in vecs:
        if ech.add(v):
            spanning.append(v)
    mul = algebra.mul_coeffs
    rounds = 0
    watermark = 0
    while True:
        if stop_at_full and ech.is_full():
            break
        n = len(spanning)
        if watermark == n:
            break
        fresh: list[Vec] = []
        full = False
        for a in range(n):
            lo = watermark if a < watermark else 0
            for b in range(lo, n):
                prod = mul(spanning[a], spanning[b])
                if ech.add(prod):
                    fresh.append(prod)
                    if stop_at_full and ech.is_full():
                        full = True
                        break
            if full:
                break
        watermark = n
        spanning.extend(fresh)
        if fresh:
            rounds += 1
        if full or not fresh:
            break
    return ech, rounds


def subrng_closure(algebra: StructureAlgebra, gens: Iterable[AlgElement],
                   allow_empty: bool = False) -> SubrngResult:
    """Smallest Q-subspace of ``algebra`` containing ``gens`` and closed under
    multiplication, as a canonical echelonized subspace.

    An empty generator list is only legal with ``allow_empty=True`` and yields
    the zero subrng.
    """
    gens = _check_gens(algebra, gens)
    if not gens and not allow_empty:
        raise AlgebraValidationError(
            "empty generator set (pass allow_empty=True for the zero subrng)")
    ech, rounds = _closure_span(algebra, [g.coeffs for g in gens],
                                stop_at_full=False)
    return SubrngResult(span=ech.to_subspace(), generators=gens, closed=True,
                        rounds=rounds)


def generates_fully(algebra: StructureAlgebra, gens: Iterable[AlgElement]) -> bool:
    """True when the subrng generated by ``gens`` is all of ``algebra``."""
    gens = _check_gens(algebra, gens)
    if not gens:
        return False
    ech, _ = _closure_span(algebra, [g.coeffs for g in gens], stop_at_full=True)
    return ech.is_full()


def word_span_oracle(algebra: StructureAlgebra, gens: Iterable[AlgElement],
                     max_len: int) -> Subspace:
    """Span of all products of 1 to ``max_len`` generators, in order.

    Independent of :func:`subrng_closure`: words are enumerated by length,
    with each length's values spanned before extension (a basis of the
    length-L values yields the same length-(L+1) span by bilinearity).
    Monotone in ``max_len``.
    """
    gens = _check_gens(algebra, gens)
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    total = Echelon(algebra.dim)
    level = Echelon(algebra.dim)
    gen_vecs = [g.coeffs for g in gens]
    for v in gen_vecs:
        total.add(v)
        level.add(v)
    mul = algebra.mul_coeffs
    for _ in range(max_len - 1):
        prev = level.basis_vectors()
        if not prev:
            break
        level = Echelon(algebra.dim)
        for g in gen_vecs:
            for w in prev:
                val = mul(g, w)
                level.add(val)
                total.add(val)
    return total.to_subspace()


def stabilized_word_span(algebra: StructureAlgebra,
                         gens: Iterable[AlgElement]) -> tuple[Subspace, int]:
    """Word span run until one length step adds nothing, which is permanent:
    every longer word is a generator times a shorter one, so a stable span
    absorbs all further products. Returns (span, stabilization length)."""
    gens = _check_gens(algebra, gens)
    total = Echelon(algebra.dim)
    level = Echelon(algebra.dim)
    for g in gens:
        total.add(g.coeffs)
        level.add(g.coeffs)
    mul = algebra.mul_coeffs
    length = 1
    while True:
        prev = level.basis_vectors()
        if not prev:
            break
        level = Echelon(algebra.dim)
        grew = False
        for g in gens:
            for w in prev:
                val = mul(g.coeffs, w)
                level.add(val)
                if total.add(val):
                    grew = True
        length += 1
        if not grew:
            break
    return total.to_subspace(), length
