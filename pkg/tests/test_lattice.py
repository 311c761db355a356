import random
from fractions import Fraction

import pytest

from latgenus.lattice import (
    GramLattice,
    gram_from_text,
    gram_to_text,
    is_maximal,
    is_qf_maximal,
    maximal_integral_overlattice,
    partial_dual,
    rescale_primitive,
    sublattice_from_fp_subspace,
)
from latgenus.matrixops import random_unimodular


def test_determinants():
    assert GramLattice.identity(8).det == 1
    assert GramLattice.diagonal([1, 1, 3]).det == 3


def test_e8_det(E8):
    assert E8.det == 1
    assert E8.is_even()


def test_dual_is_inverse():
    L = GramLattice.diagonal([1, 1, 4])
    dual = L.dual_gram()
    assert dual[2][2] == Fraction(1, 4)
    # dual of dual is the gram again
    from latgenus.matrixops import mat_inverse

    back = mat_inverse(dual)
    assert [[int(x) for x in row] for row in back] == [list(r) for r in L.gram]


def test_dual_denominator_divides_det():
    rng = random.Random(0)
    for _ in range(10):
        base = GramLattice.diagonal([rng.randrange(1, 6) for _ in range(3)])
        u = random_unimodular(3, rng)
        L = base.transformed(u)
        d = L.det
        for row in L.dual_gram():
            for x in row:
                assert (Fraction(x) * d).denominator == 1


def test_rescale_primitive():
    assert rescale_primitive(GramLattice.diagonal([4, 4, 4]).gram).gram == \
        GramLattice.identity(3).gram
    got = rescale_primitive([[Fraction(1), 0, 0], [0, 1, 0], [0, 0, Fraction(1, 3)]])
    assert got.gram == GramLattice.diagonal([3, 3, 1]).gram
    prim = GramLattice.diagonal([2, 3])
    assert rescale_primitive(prim.gram).gram == prim.gram


def test_rescale_idempotent_and_primitive():
    rng = random.Random(1)
    for _ in range(20):
        L = GramLattice.diagonal([rng.randrange(1, 9) * 2 for _ in range(3)])
        r = rescale_primitive(L.gram)
        assert r.is_primitive()
        assert rescale_primitive(r.gram).gram == r.gram


def test_is_primitive():
    assert GramLattice.identity(4).is_primitive()
    assert not GramLattice.identity(4).scaled(2).is_primitive()
    assert GramLattice.diagonal([2, 3]).is_primitive()


def test_partial_dual_cases():
    L = GramLattice.diagonal([1, 1, 3])
    assert partial_dual(L, 5).det == L.det  # p not dividing det
    P = partial_dual(L, 3)
    assert P.det == 9
    assert sorted(P.gram[i][i] for i in range(3)) == [1, 3, 3]
    # applying twice returns a rescaling of L
    again = partial_dual(P, 3)
    assert again.det == 3


def test_partial_dual_prime_support():
    rng = random.Random(2)
    from sympy import factorint

    for _ in range(8):
        L = GramLattice.diagonal([rng.choice([1, 2, 3, 6]) for _ in range(3)])
        for p in (2, 3):
            D = partial_dual(L, p)
            sup = set(factorint(L.det)) - {p}
            assert sup <= set(factorint(D.det)) | {p}


def test_sublattice_from_subspace():
    I3 = GramLattice.identity(3)
    full = sublattice_from_fp_subspace(I3, 2, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert full.det == 1
    zero = sublattice_from_fp_subspace(I3, 2, [])
    assert zero.gram == I3.scaled(4).gram
    rng = random.Random(3)
    for _ in range(10):
        w = [[rng.randrange(2) for _ in range(3)], [rng.randrange(2) for _ in range(3)]]
        from latgenus.matrixops import rref_mod_p

        dim = len(rref_mod_p(w, 2))
        sub = sublattice_from_fp_subspace(I3, 2, w)
        index = 2 ** (3 - dim)
        assert sub.det == I3.det * index * index


def test_subspace_input_validated():
    with pytest.raises(ValueError):
        sublattice_from_fp_subspace(GramLattice.identity(3), 2, [[1, 0]])


def test_maximality(E8):
    assert is_maximal(GramLattice.identity(5))
    assert not is_maximal(GramLattice.diagonal([1, 1, 4]))
    assert maximal_integral_overlattice(GramLattice.diagonal([1, 1, 4])).det == 1
    assert is_maximal(E8)
    assert is_qf_maximal(E8)
    assert not is_qf_maximal(GramLattice.identity(8))
    assert is_qf_maximal(GramLattice.identity(3))


def test_gram_roundtrip():
    L = GramLattice.diagonal([1, 2, 6])
    assert gram_from_text(gram_to_text(L)).gram == L.gram
    with pytest.raises(ValueError):
        gram_from_text("2\n1 0\n")
