"""Independent rectifiability oracle.

Decides: can the designated maps out of x into degree-k targets be
varied within their homotopy classes (by boundaries d s + s d) so that
the whole stage strictly commutes against the frozen lower truncation?
The system is assembled directly, entry by entry, sharing nothing with
the pullback-grid pipeline except the base matrix solver.
"""

from __future__ import annotations

from .complexes import ChainComplex, ChainMap
from .exact_linalg import ExactMatrix, solve
from .index_cat import Morphism, WeakLattice
from .matching import DiagramPart, degree_slice_coords


def _kron_rows(post: ExactMatrix, pre: ExactMatrix, p: int) -> list[list[int]]:
    """Rows of F |-> post @ F @ pre on row-major vec(F)."""
    rows = []
    for r in range(post.rows):
        for c in range(pre.cols):
            row = [0] * (post.cols * pre.rows)
            for i in range(post.cols):
                pri = post.entries[r][i]
                if not pri:
                    continue
                for j in range(pre.rows):
                    q = pre.entries[j][c]
                    if q:
                        v = row[i * pre.rows + j] + pri * q
                        row[i * pre.rows + j] = v % p if p else v
            rows.append(row)
    return rows


def vanish_oracle(part: DiagramPart, x: str, k: int, Yx: ChainComplex,
                  lower: dict[tuple, ChainMap],
                  sigma_k: dict[tuple, ChainMap],
                  pointed: bool | None = None) -> bool:
    """True iff some variation sigma_g + d s_g + s_g d makes every
    composite Y(f) (sigma_g + ...) equal the frozen lower choice (zero
    for ideal composites in the pointed case)."""
    pointed = part.pointed if pointed is None else pointed
    lat = part.lattice
    ring = Yx.ring
    p = ring.p
    coords = degree_slice_coords(lat, x, k, k, pointed)
    # variable layout: blocks (g, n) for s_g components Yx_n -> Y(s)_{n+1}
    layout = []
    offset = 0
    for g in coords:
        Ys = part.value(g.dst)
        for n in Yx.degrees():
            size = Ys.rank(n + 1) * Yx.rank(n)
            if size:
                layout.append((g.word, n, offset, size, Ys))
                offset += size
    total = offset
    pos = {(w, n): (off, size) for (w, n, off, size, _) in layout}

    rows: list[list[int]] = []
    rhs: list[int] = []
    for g in coords:
        Ys = part.value(g.dst)
        sg = sigma_k[g.word]
        for f in lat.nonidentity_from(g.dst):
            if not part.has_object(f.dst):
                continue
            if pointed and f.in_ideal:
                continue
            comp = lat.compose(f, g)
            Yv = part.value(f.dst)
            if pointed and comp.in_ideal:
                target = ChainMap.zero(Yx, Yv)
            else:
                target = lower[comp.word]
            yfm = part.map_of(f)
            for n in Yx.degrees():
                out_r = Yv.rank(n)
                out_c = Yx.rank(n)
                if out_r == 0 or out_c == 0:
                    continue
                block = [[0] * total for _ in range(out_r * out_c)]
                # Y(f) d_{Ys} acting on s_g at degree n
                got = pos.get((g.word, n))
                if got and Ys.rank(n + 1):
                    off, _ = got
                    kr = _kron_rows(
                        yfm.mat(n) @ Ys.d(n + 1),
                        ExactMatrix.identity(ring, out_c),
                        p,
                    )
                    for i, row in enumerate(kr):
                        for j, v in enumerate(row):
                            if v:
                                block[i][off + j] = ring.normalize(block[i][off + j] + v)
                # Y(f) s_g d_{Yx} at degree n - 1
                got = pos.get((g.word, n - 1))
                if got and Ys.rank(n):
                    off, _ = got
                    kr = _kron_rows(yfm.mat(n), Yx.d(n), p)
                    for i, row in enumerate(kr):
                        for j, v in enumerate(row):
                            if v:
                                block[i][off + j] = ring.normalize(block[i][off + j] + v)
                rows.extend(block)
                want = target.mat(n) - (yfm.mat(n) @ sg.mat(n))
                for i in range(out_r):
                    for j in range(out_c):
                        rhs.append(want.entries[i][j])
    if not rows:
        return True
    mat = ExactMatrix.from_rows(ring, rows)
    b = ExactMatrix.from_rows(ring, [[v] for v in rhs])
    return solve(mat, b) is not None
