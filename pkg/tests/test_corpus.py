import numpy as np
import pytest

from gbeta_lab.corpus import (
    build_corpus,
    classical_beta,
    classical_map,
    classical_polynomial,
    exhaustive_criteria,
    is_classical_word,
    is_primitive,
    parse_source_id,
    random_classical_words,
    random_criteria,
    source_id,
)
from gbeta_lab.parry import make_criterion


def test_source_ids():
    assert source_id("M", (3, 1, -1)) == "M:3,1,-1"
    assert parse_source_id("W:2,0,1") == ("W", (2, 0, 1))


@pytest.mark.parametrize(
    "word, expected",
    [
        ((1, 0), True),
        ((2, 1), True),
        ((1,), True),
        ((1, 1), False),
        ((0, 1), False),
        ((1, 2), False),
        ((1, 0, 1), False),
    ],
)
def test_classical_words(word, expected):
    assert is_classical_word(word) == expected


def test_primitive_words():
    assert is_primitive((1, 0, 0))
    assert not is_primitive((1, 0, 1, 0))


def test_classical_polynomial():
    assert classical_polynomial((1, 0)).coeffs == (-1, -1, 1)
    assert classical_polynomial((2, 1)).coeffs == (-2, -2, 1)
    assert float(classical_beta((1, 0))) == pytest.approx(1.6180339887498949)


def test_classical_map_is_classical():
    map = classical_map((2, 1))

    assert map.is_classical
    assert map.m == 2


def test_exhaustive_criteria():
    found = [c.M for c in exhaustive_criteria((2, 2), 4)]

    assert found == [(3, -1), (3, 1), (4, -2), (4, -1), (4, 1), (4, 2)]
    assert [c.M for c in exhaustive_criteria((2, 2), 4, limit=2)] == [(3, -1), (3, 1)]


def test_random_criteria_are_deterministic_and_valid():
    first = random_criteria(np.random.default_rng(3), (2, 5), 20, 10)
    second = random_criteria(np.random.default_rng(3), (2, 5), 20, 10)

    assert [c.M for c in first] == [c.M for c in second]
    assert len({c.M for c in first}) == len(first)
    for c in first:
        assert make_criterion(c.M) == c
        assert 2 <= c.n <= 5


def test_random_criteria_empty_cases():
    rng = np.random.default_rng(0)

    assert random_criteria(rng, (2, 4), 2, 5) == []
    assert random_criteria(rng, (4, 2), 10, 5) == []


def test_random_classical_words():
    words = random_classical_words(np.random.default_rng(1), (1, 4), 3, 8)

    assert words
    assert all(is_classical_word(word) for word in words)


def test_build_corpus():
    corpus = build_corpus(5, 4, 3)

    assert len(corpus) == len(corpus.criteria) + len(corpus.words)
    assert [c.M for c in build_corpus(5, 4, 3).criteria] == [c.M for c in corpus.criteria]
