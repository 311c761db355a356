import random

from latgenus.jordan import (
    is_padically_squarefree,
    is_squarefree,
    is_strongly_primitive,
    jordan_decompose,
    len_p,
)
from latgenus.lattice import GramLattice
from latgenus.matrixops import random_unimodular


def test_identity_single_block():
    for p in (2, 3, 5):
        dec = jordan_decompose(GramLattice.identity(4), p)
        assert len(dec.blocks) == 1
        assert dec.blocks[0].scale == 0 and dec.blocks[0].rank == 4
        assert dec.length == 1


def test_diag23_at_2():
    dec = jordan_decompose(GramLattice.diagonal([2, 3]), 2)
    assert [(b.scale, b.rank) for b in dec.blocks] == [(0, 1), (1, 1)]


def test_diag114_at_2():
    L = GramLattice.diagonal([1, 1, 4])
    dec = jordan_decompose(L, 2)
    assert [(b.scale, b.rank) for b in dec.blocks] == [(0, 2), (2, 1)]
    assert len_p(L, 2) == 3
    assert not is_padically_squarefree(L, 2)


def test_len_examples():
    assert len_p(GramLattice.identity(3), 2) == 1
    assert len_p(GramLattice.diagonal([1, 3]), 3) == 2


def test_valuation_bookkeeping():
    rng = random.Random(4)
    for _ in range(15):
        L = GramLattice.diagonal([rng.choice([1, 2, 3, 4, 9, 12]) for _ in range(4)])
        for p in (2, 3):
            dec = jordan_decompose(L, p)
            v = 0
            d = L.det
            while d % p == 0:
                d //= p
                v += 1
            assert dec.valuation_of_det() == v


def test_odd_p_invariance_under_rebasis():
    rng = random.Random(5)
    L = GramLattice.diagonal([1, 3, 9, 5])
    ref = jordan_decompose(L, 3)
    for _ in range(40):
        u = random_unimodular(4, rng)
        assert jordan_decompose(L.transformed(u), 3) == ref


def test_squarefree_predicates():
    assert is_squarefree(GramLattice.identity(6))
    assert is_strongly_primitive(GramLattice.identity(6))
    assert not is_squarefree(GramLattice.diagonal([1, 1, 4]))
    L = GramLattice.diagonal([1, 3, 3])
    assert is_squarefree(L)
    assert not is_strongly_primitive(L)  # rank(L_0) = 1 < 2 = rank(L_1) at 3
