"""Free words and commuting multi-indices.

A word over ``{1, ..., d}`` is a tuple of ints; the empty tuple is the empty
word. A multi-index is a tuple of ``d`` nonnegative exponents. Both are
enumerated in one canonical order used everywhere in the package: by length
(degree) first, then lexicographically.
"""
from itertools import combinations_with_replacement, product
from math import comb

import numpy as np

__all__ = ['enumerate_words', 'words_of_length', 'enumerate_multiindices',
           'multiindices_of_degree', 'max_count', 'apply_word',
           'apply_multiindex', 'word_vectors', 'monomial_vectors',
           'word_to_multiindex']


def words_of_length(d, k):
    return [tuple(w) for w in product(range(1, d + 1), repeat=k)]


def enumerate_words(d, n):
    """All words of length ``<= n`` over ``d`` letters, shortest first.

    >>> enumerate_words(2, 1)
    [(), (1,), (2,)]
    """
    if d < 1 or n < 0:
        raise ValueError('need d >= 1 and n >= 0')
    out = []
    for k in range(n + 1):
        out.extend(words_of_length(d, k))
    return out


def multiindices_of_degree(d, k):
    # sorted letter multisets 11 < 12 < 22 give (2,0), (1,1), (0,2)
    out = []
    for letters in combinations_with_replacement(range(d), k):
        alpha = [0] * d
        for i in letters:
            alpha[i] += 1
        out.append(tuple(alpha))
    return out


def enumerate_multiindices(d, n):
    """All exponent vectors with total degree ``<= n``, lowest degree first.

    >>> enumerate_multiindices(2, 2)
    [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    """
    if d < 1 or n < 0:
        raise ValueError('need d >= 1 and n >= 0')
    out = []
    for k in range(n + 1):
        out.extend(multiindices_of_degree(d, k))
    return out


def max_count(d, n, delta=1, commuting=False):
    """Largest possible ``n``-th defect index given the first one.

    Non-commuting: ``(1 + d + ... + d^(n-1)) * delta``.
    Commuting: ``sum_{k<n} C(k+d-1, d-1) * delta``.
    """
    if d < 1 or n < 1 or delta < 0:
        raise ValueError('need d >= 1, n >= 1, delta >= 0')
    if commuting:
        return delta * sum(comb(k + d - 1, d - 1) for k in range(n))
    return delta * sum(d ** k for k in range(n))


def word_to_multiindex(word, d):
    alpha = [0] * d
    for letter in word:
        alpha[letter - 1] += 1
    return tuple(alpha)


def _matrices(T):
    return T.matrices if hasattr(T, 'matrices') else tuple(np.asarray(M) for M in T)


def apply_word(T, word):
    """The product ``T_{f(1)} T_{f(2)} ... T_{f(k)}``; the empty word gives ``I``."""
    mats = _matrices(T)
    d = len(mats)
    m = mats[0].shape[0]
    out = np.eye(m, dtype=np.complex128)
    for letter in word:
        if not 1 <= letter <= d:
            raise ValueError('letter %d outside 1..%d' % (letter, d))
        out = out @ mats[letter - 1]
    return out


def apply_multiindex(T, alpha):
    """``T_1^{a_1} ... T_d^{a_d}``."""
    word = tuple(i + 1 for i, a in enumerate(alpha) for _ in range(a))
    return apply_word(T, word)


def word_vectors(T, X, n):
    """``{f: T_f @ X}`` for every word of length ``<= n``.

    ``X`` may be a vector or a matrix of column vectors. Words are built by
    prepending letters, so each product costs one matrix application.
    """
    mats = _matrices(T)
    X = np.asarray(X, dtype=np.complex128)
    out = {(): X}
    layer = [()]
    for _ in range(n):
        nxt = []
        for f in layer:
            for i, M in enumerate(mats, start=1):
                g = (i,) + f
                out[g] = M @ out[f]
                nxt.append(g)
        layer = nxt
    return out


def monomial_vectors(T, X, n):
    """``{alpha: T_1^{a_1} ... T_d^{a_d} @ X}`` for ``|alpha| <= n``."""
    mats = _matrices(T)
    d = len(mats)
    X = np.asarray(X, dtype=np.complex128)
    out = {(0,) * d: X}
    for alpha in enumerate_multiindices(d, n)[1:]:
        # leftmost factor first: T^alpha = T_i T^{alpha - e_i}, i the first nonzero slot
        i = next(j for j, a in enumerate(alpha) if a)
        prev = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
        out[alpha] = mats[i] @ out[prev]
    return out
