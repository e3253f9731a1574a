"""Chain complexes, hom complexes, homotopy classes, and homology.

Expected values for the cyclic-cell computations are frozen from the
direct brute-force oracles implemented below (enumeration of chain maps
and homotopies as explicit linear conditions).
"""

import itertools
import random

import pytest

from hhops.complexes import ChainComplex, ChainMap
from hhops.exact_linalg import ExactMatrix
from hhops.homotopy import find_homotopy, hom_complex, homotopy_classes, is_nullhomotopic
from hhops.rings import GF, ZZ

from helpers import random_complex, random_chain_map, perturb_within_class


def M(ring, p):
    return ChainComplex.cyclic_cell(ring, p, top=1)


def S0(ring):
    return ChainComplex.sphere(ring, 0)


def test_complex_validation_rejects_bad_differential():
    ring = ZZ
    with pytest.raises(ValueError):
        ChainComplex.build(
            ring,
            {0: 1, 1: 1, 2: 1},
            {1: ExactMatrix.from_rows(ring, [[1]]), 2: ExactMatrix.from_rows(ring, [[1]])},
        )


def test_homology_of_cyclic_cell():
    mp = M(ZZ, 5)
    assert mp.homology(0).describe() == "C5"
    assert mp.homology(1).is_trivial()
    assert S0(ZZ).homology(0).describe() == "Z"


def test_shift_negates_differential():
    mp = M(ZZ, 3)
    sh = mp.shift(1)
    assert sh.rank(2) == 1 and sh.rank(1) == 1
    assert sh.d(2).entries == ((-3,),)
    assert sh.homology(1).describe() == "C3"


# -- brute-force oracles over small prime fields ---------------------------


def enumerate_chain_maps(X, Y):
    """All chain maps X -> Y over a prime field, by brute force."""
    p = X.ring.p
    slots = []
    for n in X.degrees():
        for i in range(Y.rank(n)):
            for j in range(X.rank(n)):
                slots.append((n, i, j))
    for vals in itertools.product(range(p), repeat=len(slots)):
        mats = {}
        for (n, i, j), v in zip(slots, vals):
            if n not in mats:
                mats[n] = [[0] * X.rank(n) for _ in range(Y.rank(n))]
            mats[n][i][j] = v
        try:
            yield ChainMap.build(X, Y, {n: ExactMatrix.from_rows(X.ring, m) for n, m in mats.items()})
        except ValueError:
            continue


def brute_force_class_count(X, Y):
    """Number of chain-homotopy classes of maps X -> Y, by enumeration."""
    maps = list(enumerate_chain_maps(X, Y))
    classes = []
    for f in maps:
        if not any(find_homotopy(f, g) is not None for g in classes):
            classes.append(f)
    return len(classes)


def test_hom_complex_unit_case():
    X = S0(ZZ)
    h = hom_complex(X, X)
    assert h.degrees() == [0] and h.rank(0) == 1


def test_hom_classes_cell_to_cell_matches_enumeration():
    # the pipeline count must agree with brute force whatever the cell
    for p, m in ((2, 2), (2, 1), (3, 3), (3, 2)):
        ring = GF(p)
        X = M(ring, m)
        assert homotopy_classes(X, X).group.order == brute_force_class_count(X, X)


def test_hom_classes_cell_to_cell_integer():
    g = homotopy_classes(M(ZZ, 5), M(ZZ, 5))
    assert g.describe() == "C5"


def test_hom_classes_suspended_cell_is_trivial():
    X = M(ZZ, 5).shift(1)
    Y = M(ZZ, 5)
    g = homotopy_classes(X, Y)
    assert g.group.is_trivial()


def test_hom_classes_sphere_to_cell():
    # frozen from the oracle: [S0, M_p] = Z/p over Z (f0 modulo p*s)
    for p, m in ((2, 2), (3, 3)):
        ring = GF(p)
        assert homotopy_classes(S0(ring), M(ring, m)).group.order == \
            brute_force_class_count(S0(ring), M(ring, m))
    g = homotopy_classes(S0(ZZ), M(ZZ, 5))
    assert g.describe() == "C5"


def test_hom_classes_cell_to_sphere():
    # frozen from the oracle: every chain map M_p -> S0 vanishes over Z
    for p, m in ((2, 2), (3, 3)):
        ring = GF(p)
        assert homotopy_classes(M(ring, m), S0(ring)).group.order == \
            brute_force_class_count(M(ring, m), S0(ring))
    g = homotopy_classes(M(ZZ, 5), S0(ZZ))
    assert g.group.is_trivial()


def test_class_of_distinguishes_generators():
    ring = GF(3)
    X = M(ring, 3)
    g = homotopy_classes(X, X)
    ident = ChainMap.identity(X)
    twice = ident + ident
    assert g.class_of(ident) != g.class_of(twice)
    assert g.class_of(ident + twice) == g.class_of(ChainMap.zero(X, X))


def test_find_homotopy_equal_maps():
    X = M(ZZ, 4)
    f = ChainMap.identity(X)
    h = find_homotopy(f, f)
    assert h is not None
    h.validate()


def test_find_homotopy_p_times_identity():
    X = M(ZZ, 4)
    f = ChainMap.identity(X).scale(4)
    h = find_homotopy(f, ChainMap.zero(X, X))
    assert h is not None
    h.validate()
    assert (X.d(1) @ h.mat(0)).entries == ((4,),)


def test_find_homotopy_absent_for_identity():
    X = M(ZZ, 4)
    assert not is_nullhomotopic(ChainMap.identity(X))


def test_find_homotopy_consistent_with_classes():
    rng = random.Random(3)
    for ring in (ZZ, GF(2), GF(3)):
        for _ in range(8):
            X = random_complex(ring, rng)
            Y = random_complex(ring, rng)
            if X.is_zero() or Y.is_zero():
                continue
            f = random_chain_map(X, Y, rng)
            g_cls = homotopy_classes(X, Y)
            f2 = perturb_within_class(f, rng)
            assert g_cls.class_of(f) == g_cls.class_of(f2)
            assert find_homotopy(f, f2) is not None


def test_hom_complex_h0_presents_classes():
    rng = random.Random(5)
    for _ in range(5):
        X = random_complex(GF(2), rng)
        Y = random_complex(GF(2), rng)
        if X.is_zero() or Y.is_zero() or X.total_rank() > 4 or Y.total_rank() > 4:
            continue
        g = homotopy_classes(X, Y)
        assert g.group.order == brute_force_class_count(X, Y)
