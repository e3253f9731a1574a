"""Smith form, solving, kernels and cokernel presentations, checked
against independent elementary-operation and rational-arithmetic
oracles."""

from fractions import Fraction
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hhops.exact_linalg import (
    ExactMatrix,
    cokernel_presentation,
    is_split_injective,
    is_surjective,
    kernel_basis,
    smith_normal_form,
    solve,
)
from hhops.rings import GF, ZZ


def mat(ring, rows):
    return ExactMatrix.from_rows(ring, rows)


# -- independent oracles -------------------------------------------------


def oracle_invariant_factors(rows):
    """Naive recursive Smith reduction over Z without transform tracking."""
    a = [list(r) for r in rows]
    if not a or not a[0]:
        return []
    nr, nc = len(a), len(a[0])
    if all(a[i][j] == 0 for i in range(nr) for j in range(nc)):
        return [0] * min(nr, nc)
    # move a minimal nonzero entry to (0, 0)
    best = min(
        ((i, j) for i in range(nr) for j in range(nc) if a[i][j]),
        key=lambda ij: (abs(a[ij[0]][ij[1]]), ij),
    )
    a[0], a[best[0]] = a[best[0]], a[0]
    for r in a:
        r[0], r[best[1]] = r[best[1]], r[0]
    while True:
        pivot = a[0][0]
        changed = False
        for i in range(1, nr):
            q = a[i][0] // pivot
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[0])]
            if a[i][0]:
                a[0], a[i] = a[i], a[0]
                changed = True
                break
        if changed:
            continue
        for j in range(1, nc):
            q = a[0][j] // pivot
            if q:
                for r in a:
                    r[j] -= q * r[0]
            if a[0][j]:
                for r in a:
                    r[0], r[j] = r[j], r[0]
                changed = True
                break
        if not changed:
            break
    pivot = abs(a[0][0])
    rest = [r[1:] for r in a[1:]]
    if any(x % pivot for r in rest for x in r):
        # fold a bad row back in and retry
        for i in range(1, nr):
            if any(x % pivot for x in a[i]):
                a[0] = [x + y for x, y in zip(a[0], a[i])]
                return oracle_invariant_factors(a)
    tail = oracle_invariant_factors(rest)
    return [x for x in [pivot] + tail if x != 0] + [0] * ([pivot] + tail).count(0)


def rational_inverse(rows):
    """Exact inverse over Q, or None if singular."""
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [x - c * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def is_unimodular(m: ExactMatrix) -> bool:
    if m.rows != m.cols:
        return False
    inv = rational_inverse([list(r) for r in m.entries])
    if inv is None:
        return False
    return all(x.denominator == 1 for row in inv for x in row)


def check_snf(m: ExactMatrix):
    s = smith_normal_form(m)
    assert (s.u @ m @ s.v).entries == s.d.entries
    assert (s.u @ s.u_inv).entries == ExactMatrix.identity(m.ring, m.rows).entries
    for i in range(min(m.rows, m.cols)):
        for j in range(min(m.rows, m.cols)):
            if i != j:
                assert s.d.entries[i][j] == 0
    for i in range(len(s.invariants) - 1):
        if not m.ring.p:
            assert s.invariants[i + 1] % s.invariants[i] == 0
    if not m.ring.p:
        assert is_unimodular(s.u)
        assert is_unimodular(s.v)
        assert sorted(x for x in s.invariants) == sorted(
            x for x in oracle_invariant_factors([list(r) for r in m.entries]) if x
        )
    return s


# -- spec-pinned cases ----------------------------------------------------


def test_smith_identity():
    m = ExactMatrix.identity(ZZ, 3)
    s = check_snf(m)
    assert s.d.entries == m.entries


def test_smith_diag_2_3():
    m = mat(ZZ, [[2, 0], [0, 3]])
    s = check_snf(m)
    assert [s.d.entries[i][i] for i in range(2)] == [1, 6]


def test_smith_zero():
    m = ExactMatrix.zeros(ZZ, 2, 2)
    s = check_snf(m)
    assert s.d.is_zero()


def test_solve_forced():
    m = mat(ZZ, [[2]])
    b = mat(ZZ, [[4]])
    x = solve(m, b)
    assert x.entries == ((2,),)


def test_solve_parity_obstruction():
    assert solve(mat(ZZ, [[2]]), mat(ZZ, [[3]])) is None


def test_solve_constructed():
    rng = random.Random(7)
    for ring in (ZZ, GF(2), GF(5)):
        for _ in range(20):
            m = mat(ring, [[rng.randint(-3, 3) for _ in range(3)] for _ in range(2)])
            x0 = mat(ring, [[rng.randint(-3, 3)] for _ in range(3)])
            b = m @ x0
            x = solve(m, b)
            assert x is not None
            assert (m @ x).entries == b.entries


def test_kernel_nonzero_scalar():
    assert kernel_basis(mat(ZZ, [[5]])).cols == 0


def test_kernel_zero_scalar():
    k = kernel_basis(mat(ZZ, [[0]]))
    assert k.cols == 1 and k.entries == ((1,),)


def test_kernel_sum_map():
    k = kernel_basis(mat(ZZ, [[1, 1]]))
    assert k.cols == 1
    v = [k.entries[0][0], k.entries[1][0]]
    assert v in ([1, -1], [-1, 1])


def test_cokernel_z2():
    pres = cokernel_presentation(mat(ZZ, [[2]]))
    assert pres.torsion == (2,) and pres.free_rank == 0
    assert pres.describe() == "C2"


def test_cokernel_identity():
    pres = cokernel_presentation(ExactMatrix.identity(ZZ, 3))
    assert pres.is_trivial()


def test_cokernel_diag_2_3():
    pres = cokernel_presentation(mat(ZZ, [[2, 0], [0, 3]]))
    assert pres.torsion == (6,) and pres.free_rank == 0


def test_cokernel_coords_and_lifts():
    m = mat(ZZ, [[2, 0], [0, 0]])
    pres = cokernel_presentation(m)
    assert pres.torsion == (2,) and pres.free_rank == 1
    for j in range(pres.gen_lifts.cols):
        col = pres.gen_lifts.column(j)
        coords = pres.to_coords(col)
        expect = tuple(1 if i == j else 0 for i in range(pres.gen_lifts.cols))
        assert coords == expect
    assert pres.is_zero_class(m @ mat(ZZ, [[3], [5]]))


# -- randomized properties -------------------------------------------------

small_entries = st.integers(min_value=-6, max_value=6)


@st.composite
def int_matrices(draw):
    rows = draw(st.integers(min_value=0, max_value=4))
    cols = draw(st.integers(min_value=0, max_value=4))
    data = [[draw(small_entries) for _ in range(cols)] for _ in range(rows)]
    return ExactMatrix.from_rows(ZZ, data)


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_smith_properties_integer(m):
    check_snf(m)


@settings(max_examples=60, deadline=None)
@given(int_matrices(), st.sampled_from([2, 3, 5]))
def test_smith_properties_prime_field(m, p):
    fm = ExactMatrix.from_rows(GF(p), m.to_lists())
    s = check_snf(fm)
    for x in s.invariants:
        assert x == 1


@settings(max_examples=40, deadline=None)
@given(int_matrices())
def test_kernel_membership_and_completeness(m):
    k = kernel_basis(m)
    if k.cols:
        assert (m @ k).is_zero()
    # completeness: every kernel vector found by rational elimination is
    # an integer combination of the basis
    if k.cols:
        assert solve(k, m_null_vector(m)) is not None


def m_null_vector(m):
    k = kernel_basis(m)
    # integer combination of kernel columns is in the kernel
    comb = [[sum(k.entries[i][j] * (j + 1) for j in range(k.cols))] for i in range(m.cols)]
    return ExactMatrix.from_rows(ZZ, comb)


@settings(max_examples=40, deadline=None)
@given(int_matrices())
def test_solve_iff_in_column_span(m):
    rng = random.Random(11)
    x0 = ExactMatrix.from_rows(ZZ, [[rng.randint(-2, 2)] for _ in range(m.cols)])
    b = m @ x0
    assert solve(m, b) is not None


def test_surjective_split_flags():
    assert is_surjective(mat(ZZ, [[1, 0], [3, 1]]))
    assert not is_surjective(mat(ZZ, [[2]]))
    assert is_surjective(mat(GF(2), [[1, 1]]))
    assert is_split_injective(mat(ZZ, [[1], [4]]))
    assert not is_split_injective(mat(ZZ, [[2], [4]]))
    assert is_split_injective(mat(GF(3), [[2], [4]]))


def test_kernel_saturated_over_z():
    # kernel of [[2, 4]] is spanned by (2,-1); the primitive vector, not (4,-2)
    k = kernel_basis(mat(ZZ, [[2, 4]]))
    assert k.cols == 1
    col = [k.entries[0][0], k.entries[1][0]]
    from math import gcd

    assert gcd(col[0], col[1]) == 1
