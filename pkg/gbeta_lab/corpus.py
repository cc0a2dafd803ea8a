"""Deterministic generators of generalized Parry numbers: criterion
sequences M and classical words w, whose periodic expansion w^∞ of 1
defines β."""

from dataclasses import dataclass
from fractions import Fraction
import itertools
from typing import Iterator, Optional, Sequence

import numpy as np

from gbeta_lab.algebraic import AlgebraicReal, IntPolynomial, ZBetaRing
from gbeta_lab.errors import HypothesisViolation
from gbeta_lab.gbeta_map import GBetaMap, Itinerary, Shape, SignConfiguration, is_admissible
from gbeta_lab.logger import get_logger
from gbeta_lab.parry import CriterionSequence, make_criterion

logger = get_logger(__name__)

MAX_DRAWS_PER_SOURCE = 200


def source_id(prefix: str, values: Sequence[int]) -> str:
    return f"{prefix}:" + ",".join(str(v) for v in values)


def parse_source_id(text: str) -> tuple[str, tuple[int, ...]]:
    prefix, _, body = text.partition(":")
    return prefix, tuple(int(v) for v in body.split(","))


def _draw_M(rng: np.random.Generator, n: int, bound: int) -> list[int]:
    M1 = int(rng.integers(3, bound + 1))
    rest = []
    for _ in range(n - 1):
        magnitude = int(rng.integers(1, M1 - 1))
        rest.append(magnitude if rng.random() < 0.5 else -magnitude)
    return [M1] + rest


def random_criteria(
    rng: np.random.Generator,
    n_range: tuple[int, int],
    bound: int,
    count: int,
) -> list[CriterionSequence]:
    """`count` valid criterion sequences, lengths drawn uniformly from n_range."""
    lo, hi = n_range
    if lo > hi or count <= 0 or bound < 3:
        return []

    out: list[CriterionSequence] = []
    seen: set[tuple[int, ...]] = set()

    for _ in range(count):
        n = int(rng.integers(max(lo, 2), max(hi, 2) + 1))
        for _ in range(MAX_DRAWS_PER_SOURCE):
            M = _draw_M(rng, n, bound)
            if tuple(M) in seen:
                continue
            try:
                c = make_criterion(M)
            except HypothesisViolation:
                continue
            seen.add(c.M)
            out.append(c)
            break
        else:
            logger.debug(f"No valid M of length {n} with |M| ≤ {bound} after {MAX_DRAWS_PER_SOURCE} draws")

    return out


def exhaustive_criteria(n_range: tuple[int, int], bound: int, limit: Optional[int] = None) -> Iterator[CriterionSequence]:
    """Every valid M with length in n_range and M(1) ≤ bound, by length then lexicographically."""
    lo, hi = n_range
    produced = 0

    for n in range(max(lo, 2), hi + 1):
        for M1 in range(3, bound + 1):
            magnitudes = [v for v in range(-(M1 - 2), M1 - 1) if v != 0]
            for rest in itertools.product(magnitudes, repeat=n - 1):
                try:
                    c = make_criterion((M1,) + rest)
                except HypothesisViolation:
                    continue

                yield c
                produced += 1
                if limit is not None and produced >= limit:
                    return


def is_primitive(word: Sequence[int]) -> bool:
    p = len(word)
    return all(any(word[i] != word[(i + q) % p] for i in range(p)) for q in range(1, p) if p % q == 0)


def is_classical_word(word: Sequence[int]) -> bool:
    """w^∞ is the quasi-greedy expansion of 1 for some β: every shift is ≤ w^∞."""
    word = tuple(word)
    if not word or word[0] < 1 or not is_primitive(word):
        return False
    if any(not 0 <= d <= word[0] for d in word):
        return False

    E = SignConfiguration.classical(word[0])
    itinerary = Itinerary(word, Shape.periodic(len(word)))
    return is_admissible(itinerary, itinerary, E)


def random_classical_words(
    rng: np.random.Generator,
    n_range: tuple[int, int],
    max_digit: int,
    count: int,
) -> list[tuple[int, ...]]:
    lo, hi = n_range
    if lo > hi or count <= 0:
        return []

    out: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()

    for _ in range(count):
        p = int(rng.integers(max(lo, 1), hi + 1))
        for _ in range(MAX_DRAWS_PER_SOURCE):
            m = int(rng.integers(1, max_digit + 1))
            word = (m,) + tuple(int(d) for d in rng.integers(0, m + 1, p - 1))
            if word in seen or not is_classical_word(word):
                continue
            seen.add(word)
            out.append(word)
            break

    return out


def classical_polynomial(word: Sequence[int]) -> IntPolynomial:
    """z^p − Σ d_j z^{p−j} − 1, from 1 = Σ d_j β^{-j} / (1 − β^{-p})."""
    p = len(word)
    coeffs = [0] * (p + 1)
    coeffs[p] = 1
    for j, d in enumerate(word, start=1):
        coeffs[p - j] -= d
    coeffs[0] -= 1
    return IntPolynomial(tuple(coeffs))


def classical_beta(word: Sequence[int]) -> AlgebraicReal:
    # the only positive root, and it lies in (d_1, d_1 + 1]
    m = word[0]
    return AlgebraicReal(classical_polynomial(word), Fraction(m), Fraction(m + 1))


def classical_map(word: Sequence[int]) -> GBetaMap:
    beta = classical_beta(word)
    ring = ZBetaRing(beta)
    return GBetaMap(ring, SignConfiguration.classical(ring.beta.ceil() - 1))


@dataclass(frozen=True)
class Corpus:
    criteria: tuple[CriterionSequence, ...]
    words: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.criteria) + len(self.words)


def build_corpus(
    seed: int,
    criterion_count: int,
    classical_count: int,
    n_range: tuple[int, int] = (2, 6),
    bound: int = 50,
    max_digit: int = 3,
) -> Corpus:
    rng = np.random.default_rng(seed)
    criteria = random_criteria(rng, n_range, bound, criterion_count)
    words = random_classical_words(rng, n_range, max_digit, classical_count)
    return Corpus(tuple(criteria), tuple(words))

