from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rowdefect.words import (apply_multiindex, apply_word, enumerate_multiindices,
                             enumerate_words, max_count, monomial_vectors,
                             word_to_multiindex, word_vectors)


def test_enumerate_words_small():
    assert enumerate_words(2, 1) == [(), (1,), (2,)]
    assert len(enumerate_words(2, 3)) == 15
    assert enumerate_words(1, 4) == [(), (1,), (1, 1), (1, 1, 1), (1, 1, 1, 1)]


def test_words_are_length_then_lex():
    ws = enumerate_words(3, 3)
    keys = [(len(w), w) for w in ws]
    assert keys == sorted(keys)


def test_enumerate_multiindices():
    assert enumerate_multiindices(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(enumerate_multiindices(1, 3)) == 4
    assert len(enumerate_multiindices(3, 2)) == 10


@pytest.mark.parametrize('d, n, commuting, expected', [
    (2, 3, False, 7), (2, 3, True, 6), (1, 5, False, 5), (1, 5, True, 5),
])
def test_max_count_examples(d, n, commuting, expected):
    assert max_count(d, n, 1, commuting) == expected


@given(st.integers(1, 4), st.integers(1, 5), st.integers(1, 3))
def test_max_count_formulas(d, n, delta):
    assert max_count(d, n, delta) == delta * len(enumerate_words(d, n - 1))
    assert max_count(d, n, delta, True) == delta * comb(n - 1 + d, d)


def test_apply_word_order():
    rng = np.random.default_rng(1)
    A, B = rng.standard_normal((2, 3, 3))
    assert np.allclose(apply_word((A, B), ()), np.eye(3))
    assert np.allclose(apply_word((A, B), (1, 2)), A @ B)
    S = np.diag(np.ones(2), -1)
    assert np.allclose(apply_word((S,), (1, 1, 1)), 0)


def test_word_to_multiindex():
    assert word_to_multiindex((1, 2, 1), 2) == (2, 1)
    assert word_to_multiindex((), 3) == (0, 0, 0)


def test_word_vectors_match_apply_word():
    rng = np.random.default_rng(2)
    T = tuple(rng.standard_normal((2, 4, 4)))
    X = rng.standard_normal((4, 2))
    vecs = word_vectors(T, X, 3)
    for f in enumerate_words(2, 3):
        assert np.allclose(vecs[f], apply_word(T, f) @ X)


def test_monomial_vectors_order():
    rng = np.random.default_rng(3)
    T = tuple(rng.standard_normal((2, 3, 3)))
    X = rng.standard_normal((3, 1))
    vecs = monomial_vectors(T, X, 3)
    for a in enumerate_multiindices(2, 3):
        assert np.allclose(vecs[a], apply_multiindex(T, a) @ X)
    A, B = T
    assert np.allclose(apply_multiindex(T, (1, 2)), A @ B @ B)
