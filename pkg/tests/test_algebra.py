import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netsdp.algebra import (
    CLASSICAL,
    IDENTITY,
    QUANTUM,
    IndependenceStructure,
    Letter,
    adjoint,
    canonical_entry_key,
    canonicalize,
    concat,
    independence_components,
)
from netsdp.scenario import ExtendedGenerator

from oracles import line_state, random_dichotomic, random_pvm, random_rewrite, random_word, word_operator

A0, A1 = Letter(0, 0), Letter(0, 1)
B0, B1 = Letter(1, 0), Letter(1, 1)
C0, C1 = Letter(2, 0), Letter(2, 1)
PA00, PA01 = Letter(0, 0, 0), Letter(0, 0, 1)
PB00 = Letter(1, 0, 0)

LINE = IndependenceStructure([[0, 1], [1, 2]])


def test_idempotency():
    assert canonicalize([PA00, PA00]) == (PA00,)


def test_orthogonality():
    assert canonicalize([PA00, PA01]) is None


def test_cross_party_commutation():
    assert canonicalize([C0, A0], QUANTUM) == (A0, C0)


def test_classical_full_commutation():
    assert canonicalize([A1, A0], CLASSICAL) == (A0, A1)
    assert canonicalize([A1, A0], QUANTUM) == (A1, A0)


def test_involution_twice():
    assert canonicalize([A0, A1, A1, A0], QUANTUM) == IDENTITY


def test_mixed_kinds_rejected():
    with pytest.raises(ValueError):
        canonicalize([Letter(0, 0, -1), Letter(0, 0, 0)])


def test_adjoint_examples():
    assert adjoint((A0, A1)) == (A1, A0)
    assert adjoint(IDENTITY) == IDENTITY
    assert adjoint((A0, C1)) == (A0, C1)


def test_concat_examples():
    assert concat(adjoint((A0, A1)), (A0, A1)) == IDENTITY
    assert concat((A0,), (PB00,)) == (A0, PB00)
    assert concat((PA00,), (PA01,)) is None


def test_independence_components():
    assert independence_components((A1, A0, C0, C1), LINE) == [(A1, A0), (C0, C1)]
    assert independence_components((A0, PB00, C0), LINE) == [(A0, PB00, C0)]
    assert independence_components((A0,), LINE) == [(A0,)]
    with pytest.raises(ValueError):
        independence_components((Letter(5, 0),), LINE)


def test_isolated_party_gets_private_source():
    s = IndependenceStructure([[0, 1]], n_parties=3)
    assert independence_components((A0, C0), s) == [(A0,), (C0,)]


def _gen(word=(), tags=()):
    return ExtendedGenerator(tuple(word), tuple(tags))


def test_entry_keys_of_scalar_extension():
    one, aa, cc, ext = _gen(), _gen((A0, A1)), _gen((C0, C1)), _gen((), [(A0, A1)])
    key = lambda r, c: canonical_entry_key(r, c, QUANTUM, LINE)
    # v1 = v3
    assert key(one, ext) == key(one, aa)
    assert key(one, aa) in {((A0, A1),), ((A1, A0),)}
    # v5 = v7
    assert key(aa, ext) == key(ext, ext) == tuple(sorted([(A1, A0), (A0, A1)]))
    # v4 = v6*
    assert key(aa, cc) == key(cc, ext)
    assert set(key(aa, cc)) in ({(A1, A0), (C0, C1)}, {(A0, A1), (C1, C0)})


# -- fuzzing -------------------------------------------------------------------------

ALPHABET = [Letter(p, x, -1) for p in range(3) for x in range(2)] + \
           [Letter(3, x, o) for x in range(2) for o in range(2)]


def test_idempotence_and_confluence_fuzz():
    rnd = random.Random(7)
    for mode in (QUANTUM, CLASSICAL):
        for _ in range(3000):
            w = random_word(rnd, ALPHABET, 9)
            c = canonicalize(w, mode)
            assert random_rewrite(w, mode, rnd) == c
            if c is not None:
                assert canonicalize(c, mode) == c


words = st.lists(st.sampled_from(ALPHABET), max_size=8).map(tuple)
modes = st.sampled_from([QUANTUM, CLASSICAL])


@given(words, modes)
def test_idempotence_property(w, mode):
    c = canonicalize(w, mode)
    if c is not None:
        assert canonicalize(c, mode) == c


@given(words, modes)
def test_adjoint_involution(w, mode):
    c = canonicalize(w, mode)
    if c is not None:
        assert adjoint(adjoint(c, mode), mode) == c


@given(words, words, modes)
def test_concat_respects_adjoint(a, b, mode):
    a, b = canonicalize(a, mode), canonicalize(b, mode)
    if a is None or b is None:
        return
    ab = concat(a, b, mode)
    ba = concat(adjoint(b, mode), adjoint(a, mode), mode)
    assert (ab is None and ba is None) or adjoint(ab, mode) == ba


@given(words)
def test_classical_is_a_coarsening(w):
    q = canonicalize(w, QUANTUM)
    c = canonicalize(w, CLASSICAL)
    if q is None:
        assert c is None
    elif c is not None:
        assert canonicalize(q, CLASSICAL) == c


# -- numerical oracles -----------------------------------------------------------------

def test_canonical_form_matches_operators(rng):
    """Raw and canonical words are the same operator in an explicit model."""
    dims = (3, 3, 2, 3)
    ops = {}
    for p in range(3):
        for x in range(2):
            ops[Letter(p, x, -1)] = random_dichotomic(rng, dims[p])
    for x in range(2):
        pvm = random_pvm(rng, 3, 3)
        for o in range(2):
            ops[Letter(3, x, o)] = pvm[o]
    rnd = random.Random(3)
    for _ in range(200):
        w = random_word(rnd, ALPHABET, 6)
        c = canonicalize(w, QUANTUM)
        raw = word_operator(w, ops, dims)
        if c is None:
            assert np.abs(raw).max() < 1e-10
        else:
            assert np.abs(raw - word_operator(c, ops, dims)).max() < 1e-10


def test_factorization_on_tensor_product_states(rng):
    """<W> = prod of component expectations for line states and A/C words."""
    dims = (2, 4, 2)  # A, B = B1 B2, C
    ac = [A0, A1, C0, C1]
    rnd = random.Random(11)
    for trial in range(30):
        psi = line_state(rng, 2, 2, 2, 2)
        ops = {l: random_dichotomic(rng, 2) for l in ac}
        for _ in range(10):
            w = canonicalize(random_word(rnd, ac, 6), QUANTUM)
            if w is None:
                continue
            expect = lambda word: psi.conj() @ word_operator(word, ops, dims) @ psi
            total = expect(w)
            prod = 1.0 + 0j
            for sub in independence_components(w, LINE):
                prod *= expect(sub)
            assert abs(total - prod) <= 1e-10
