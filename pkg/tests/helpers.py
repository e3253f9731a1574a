"""Shared builders for randomized test instances."""

from __future__ import annotations

import random

from hhops.complexes import ChainComplex, ChainMap
from hhops.exact_linalg import ExactMatrix
from hhops.rings import Ring


def random_unimodular(ring: Ring, n: int, rng: random.Random) -> ExactMatrix:
    """Product of a few elementary matrices; always invertible."""
    m = ExactMatrix.identity(ring, n).to_lists()
    for _ in range(2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.choice([-1, 1, 2])
        for k in range(n):
            m[i][k] = ring.normalize(m[i][k] + c * m[j][k])
    return ExactMatrix.from_rows(ring, m)


def random_complex(ring: Ring, rng: random.Random, max_rank: int = 2,
                   lo: int = 0, hi: int = 2) -> ChainComplex:
    """Random bounded complex: a sum of spheres and cells, conjugated by
    a random basis change so the presentation is not diagonal."""
    pieces = []
    for n in range(lo, hi + 1):
        for _ in range(rng.randint(0, max_rank)):
            kind = rng.random()
            if kind < 0.4:
                pieces.append(ChainComplex.sphere(ring, n))
            else:
                m = rng.choice([0, 1, 1, 2, 3])
                if n < hi:
                    pieces.append(ChainComplex.cyclic_cell(ring, m, top=n + 1))
                else:
                    pieces.append(ChainComplex.sphere(ring, n))
    total = ChainComplex.zero(ring)
    for p in pieces:
        total = total.direct_sum(p)
    # conjugate the differential by random unimodular basis changes
    changes = {n: random_unimodular(ring, r, rng) for n, r in total.ranks.items()}
    inverses = {}
    for n, u in changes.items():
        from hhops.exact_linalg import solve

        inv = solve(u, ExactMatrix.identity(ring, u.rows))
        inverses[n] = inv
    diffs = {}
    for n in total.ranks:
        if total.rank(n - 1) and total.rank(n):
            diffs[n] = changes[n - 1] @ total.d(n) @ inverses[n]
    return ChainComplex.build(ring, dict(total.ranks), diffs)


def random_chain_map(src: ChainComplex, dst: ChainComplex,
                     rng: random.Random) -> ChainMap:
    """Random chain map obtained as d s + s d plus a solved particular
    part; always a genuine chain map (possibly zero)."""
    ring = src.ring
    s = {}
    for n in src.degrees():
        if dst.rank(n + 1):
            s[n] = ExactMatrix.from_rows(
                ring,
                [[rng.randint(-2, 2) for _ in range(src.rank(n))] for _ in range(dst.rank(n + 1))],
            )
    mats = {}
    for n in src.degrees():
        sn = s.get(n, ExactMatrix.zeros(ring, dst.rank(n + 1), src.rank(n)))
        sp = s.get(n - 1, ExactMatrix.zeros(ring, dst.rank(n), src.rank(n - 1)))
        mats[n] = dst.d(n + 1) @ sn + sp @ src.d(n)
    return ChainMap.build(src, dst, mats)


def random_homotopy_blocks(src: ChainComplex, dst: ChainComplex,
                           rng: random.Random, spread: int = 2):
    s = {}
    for n in src.degrees():
        if dst.rank(n + 1):
            s[n] = ExactMatrix.from_rows(
                dst.ring,
                [[rng.randint(-spread, spread) for _ in range(src.rank(n))]
                 for _ in range(dst.rank(n + 1))],
            )
    return s


def perturb_within_class(f: ChainMap, rng: random.Random) -> ChainMap:
    """f + d s + s d for random s: a different representative of [f]."""
    ring = f.src.ring
    s = random_homotopy_blocks(f.src, f.dst, rng)
    mats = {}
    for n in f.src.degrees():
        sn = s.get(n, ExactMatrix.zeros(ring, f.dst.rank(n + 1), f.src.rank(n)))
        sp = s.get(n - 1, ExactMatrix.zeros(ring, f.dst.rank(n), f.src.rank(n - 1)))
        mats[n] = f.mat(n) + f.dst.d(n + 1) @ sn + sp @ f.src.d(n)
    return ChainMap.build(f.src, f.dst, mats)
