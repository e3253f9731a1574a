"""Exact matrices over Z or F_p: Smith normal form, solving, kernels,
cokernel presentations.

Conventions used throughout the package:
  - matrices are stored row-major as tuples of tuples of ints;
  - Smith pivoting is deterministic (smallest nonzero |entry|, then
    lowest (row, col)), so every derived basis choice is reproducible;
  - over F_p the same pipeline runs with field inverses, producing a
    0/1 diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd

from .rings import Ring, ZZ

Rows = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ExactMatrix:
    ring: Ring
    rows: int
    cols: int
    entries: Rows

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry grid does not match declared shape")

    # -- constructors ------------------------------------------------

    @staticmethod
    def from_rows(ring: Ring, data) -> "ExactMatrix":
        p = ring.p
        if p:
            rows = tuple(tuple(int(x) % p for x in row) for row in data)
        else:
            rows = tuple(tuple(int(x) for x in row) for row in data)
        ncols = len(rows[0]) if rows else 0
        return ExactMatrix(ring, len(rows), ncols, rows)

    @staticmethod
    def _raw(ring: Ring, data) -> "ExactMatrix":
        """Wrap already-normalized row data without re-reducing."""
        rows = tuple(tuple(row) for row in data)
        ncols = len(rows[0]) if rows else 0
        return ExactMatrix(ring, len(rows), ncols, rows)

    @staticmethod
    def zeros(ring: Ring, rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix(ring, rows, cols, tuple((0,) * cols for _ in range(rows)))

    @staticmethod
    def identity(ring: Ring, n: int) -> "ExactMatrix":
        return ExactMatrix(
            ring, n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
        )

    # -- basics ------------------------------------------------------

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.entries[ij[0]][ij[1]]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.ring,
            self.cols,
            self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        _check_same_shape(self, other)
        ring = self.ring
        return ExactMatrix(
            ring,
            self.rows,
            self.cols,
            tuple(
                tuple(ring.add(a, b) for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        _check_same_shape(self, other)
        ring = self.ring
        return ExactMatrix(
            ring,
            self.rows,
            self.cols,
            tuple(
                tuple(ring.sub(a, b) for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def __neg__(self) -> "ExactMatrix":
        ring = self.ring
        return ExactMatrix(
            ring,
            self.rows,
            self.cols,
            tuple(tuple(ring.neg(a) for a in row) for row in self.entries),
        )

    def scale(self, c: int) -> "ExactMatrix":
        ring = self.ring
        return ExactMatrix(
            ring,
            self.rows,
            self.cols,
            tuple(tuple(ring.mul(c, a) for a in row) for row in self.entries),
        )

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        if self.ring != other.ring:
            raise ValueError("ring mismatch")
        p = self.ring.p
        ot = other.transpose().entries
        out = []
        for row in self.entries:
            out_row = []
            for col in ot:
                s = sum(a * b for a, b in zip(row, col))
                out_row.append(s % p if p else s)
            out.append(tuple(out_row))
        return ExactMatrix(self.ring, self.rows, other.cols, tuple(out))

    def column(self, j: int) -> "ExactMatrix":
        return ExactMatrix(self.ring, self.rows, 1, tuple((row[j],) for row in self.entries))

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows or self.ring != other.ring:
            raise ValueError("hstack mismatch")
        return ExactMatrix(
            self.ring,
            self.rows,
            self.cols + other.cols,
            tuple(ra + rb for ra, rb in zip(self.entries, other.entries)),
        )

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.cols or self.ring != other.ring:
            raise ValueError("vstack mismatch")
        return ExactMatrix(self.ring, self.rows + other.rows, self.cols, self.entries + other.entries)

    def __str__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.entries)
        return f"[{body}]({self.rows}x{self.cols} over {self.ring})"


def _check_same_shape(a: ExactMatrix, b: ExactMatrix) -> None:
    if a.rows != b.rows or a.cols != b.cols or a.ring != b.ring:
        raise ValueError("matrix shape/ring mismatch")


def hstack_all(ring: Ring, rows: int, mats: list[ExactMatrix]) -> ExactMatrix:
    out = ExactMatrix.zeros(ring, rows, 0)
    for m in mats:
        out = out.hstack(m)
    return out


def vstack_all(ring: Ring, cols: int, mats: list[ExactMatrix]) -> ExactMatrix:
    out = ExactMatrix.zeros(ring, 0, cols)
    for m in mats:
        out = out.vstack(m)
    return out


def block_diag(ring: Ring, mats: list[ExactMatrix]) -> ExactMatrix:
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    grid = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m.entries):
            for j, x in enumerate(row):
                grid[r0 + i][c0 + j] = x
        r0 += m.rows
        c0 += m.cols
    return ExactMatrix.from_rows(ring, grid)


# -- Smith normal form --------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """u @ m @ v == d with u, v invertible over the ring.

    `u_inv` is the inverse of `u` (tracked during the reduction).
    `invariants` is the list of diagonal entries of d up to the rank;
    over Z they form a divisibility chain, over F_p they are all 1.
    """

    matrix: ExactMatrix
    u: ExactMatrix
    d: ExactMatrix
    v: ExactMatrix
    u_inv: ExactMatrix | None
    rank: int
    invariants: tuple[int, ...]
    u_det: int
    v_det: int


def smith_normal_form(m: ExactMatrix, with_u_inv: bool = True) -> SmithForm:
    ring = m.ring
    p = ring.p
    nr, nc = m.rows, m.cols
    a = m.to_lists()
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    uinv = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)] if with_u_inv else None
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]
    u_det = 1
    v_det = 1

    def row_add(i: int, j: int, c: int) -> None:
        # row_i += c * row_j  (on a and u); uinv column j -= c * column i
        ai, aj = a[i], a[j]
        if p:
            for k in range(nc):
                ai[k] = (ai[k] + c * aj[k]) % p
        else:
            for k in range(nc):
                ai[k] += c * aj[k]
        ui, uj = u[i], u[j]
        if p:
            for k in range(nr):
                ui[k] = (ui[k] + c * uj[k]) % p
        else:
            for k in range(nr):
                ui[k] += c * uj[k]
        if uinv is not None:
            for r in range(nr):
                x = uinv[r][j] - c * uinv[r][i]
                uinv[r][j] = x % p if p else x

    def col_add(j: int, i: int, c: int) -> None:
        # col_j += c * col_i (on a and v)
        if p:
            for r in range(nr):
                a[r][j] = (a[r][j] + c * a[r][i]) % p
            for r in range(nc):
                v[r][j] = (v[r][j] + c * v[r][i]) % p
        else:
            for r in range(nr):
                a[r][j] += c * a[r][i]
            for r in range(nc):
                v[r][j] += c * v[r][i]

    def row_swap(i: int, j: int) -> None:
        nonlocal u_det
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        if uinv is not None:
            for r in range(nr):
                uinv[r][i], uinv[r][j] = uinv[r][j], uinv[r][i]
        u_det = ring.neg(u_det)

    def col_swap(i: int, j: int) -> None:
        nonlocal v_det
        if i == j:
            return
        for r in range(nr):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(nc):
            v[r][i], v[r][j] = v[r][j], v[r][i]
        v_det = ring.neg(v_det)

    def row_scale(i: int, c: int) -> None:
        # multiply row i by unit c; uinv column i by c^{-1}
        nonlocal u_det
        cinv = ring.inv(c)
        a[i] = [ring.mul(c, x) for x in a[i]]
        u[i] = [ring.mul(c, x) for x in u[i]]
        if uinv is not None:
            for r in range(nr):
                uinv[r][i] = ring.mul(cinv, uinv[r][i])
        u_det = ring.mul(u_det, c)

    size = ring.size
    t = 0
    limit = min(nr, nc)
    while t < limit:
        # locate pivot: minimal nonzero size, lowest (row, col)
        best = None
        best_size = None
        for i in range(t, nr):
            ai = a[i]
            for j in range(t, nc):
                x = ai[j]
                if x:
                    s = size(x)
                    if best is None or s < best_size:
                        best, best_size = (i, j), s
                        if s == 1:
                            break
            if best_size == 1:
                break
        if best is None:
            break
        row_swap(t, best[0])
        col_swap(t, best[1])

        while True:
            pivot = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                x = a[i][t]
                if x:
                    q, r = ring.divmod(x, pivot)
                    if q:
                        row_add(i, t, ring.neg(q))
                    if r:
                        row_swap(t, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, nc):
                x = a[t][j]
                if x:
                    q, r = ring.divmod(x, pivot)
                    if q:
                        col_add(j, t, ring.neg(q))
                    if r:
                        col_swap(t, j)
                        dirty = True
                        break
            if dirty:
                continue
            if all(a[i][t] == 0 for i in range(t + 1, nr)) and all(
                a[t][j] == 0 for j in range(t + 1, nc)
            ):
                break

        # divisibility fix-up over Z: pivot must divide the rest
        if not p:
            pivot = a[t][t]
            fixed = True
            for i in range(t + 1, nr):
                ai = a[i]
                for j in range(t + 1, nc):
                    if ai[j] % pivot:
                        row_add(t, i, 1)
                        fixed = False
                        break
                if not fixed:
                    break
            if not fixed:
                continue  # re-run clearing at the same t
        # normalize the pivot to a canonical unit multiple
        if p:
            if a[t][t] != 1:
                row_scale(t, ring.inv(a[t][t]))
        elif a[t][t] < 0:
            row_scale(t, -1)
        t += 1

    rank = sum(1 for i in range(limit) if a[i][i])
    d = ExactMatrix._raw(ring, a) if nr and nc else ExactMatrix.zeros(ring, nr, nc)
    invariants = tuple(a[i][i] for i in range(rank))
    return SmithForm(
        matrix=m,
        u=ExactMatrix._raw(ring, u) if nr else ExactMatrix.zeros(ring, 0, 0),
        d=d,
        v=ExactMatrix._raw(ring, v) if nc else ExactMatrix.zeros(ring, 0, 0),
        u_inv=(
            (ExactMatrix._raw(ring, uinv) if nr else ExactMatrix.zeros(ring, 0, 0))
            if uinv is not None
            else None
        ),
        rank=rank,
        invariants=invariants,
        u_det=u_det,
        v_det=v_det,
    )


# -- derived operations -------------------------------------------------


def solve(m: ExactMatrix, b: ExactMatrix, snf: SmithForm | None = None) -> ExactMatrix | None:
    """One solution x of m @ x = b (columnwise), or None when unsolvable."""
    if b.rows != m.rows:
        raise ValueError("right-hand side has wrong height")
    if b.ring != m.ring:
        raise ValueError("ring mismatch")
    s = snf or smith_normal_form(m, with_u_inv=False)
    ring = m.ring
    c = s.u @ b  # d @ y = c with x = v @ y
    y = [[0] * b.cols for _ in range(m.cols)]
    for j in range(b.cols):
        for i in range(m.rows):
            ci = c.entries[i][j]
            di = s.d.entries[i][i] if i < min(m.rows, m.cols) else 0
            if di == 0:
                if ci != 0:
                    return None
                continue
            if ring.p:
                y[i][j] = ring.mul(ci, ring.inv(di))
            else:
                q, r = divmod(ci, di)
                if r:
                    return None
                y[i][j] = q
    y_mat = ExactMatrix(ring, m.cols, b.cols, tuple(tuple(row) for row in y))
    return s.v @ y_mat


def kernel_basis(m: ExactMatrix, snf: SmithForm | None = None) -> ExactMatrix:
    """Matrix whose columns freely generate {x : m @ x = 0}."""
    s = snf or smith_normal_form(m, with_u_inv=False)
    free_cols = [j for j in range(m.cols) if j >= m.rows or s.d.entries[j][j] == 0]
    cols = [tuple(s.v.entries[r][j] for j in free_cols) for r in range(m.cols)]
    return ExactMatrix(m.ring, m.cols, len(free_cols), tuple(cols))


def is_surjective(m: ExactMatrix, snf: SmithForm | None = None) -> bool:
    s = snf or smith_normal_form(m, with_u_inv=False)
    return s.rank == m.rows and all(m.ring.is_unit(x) for x in s.invariants)


def is_split_injective(m: ExactMatrix, snf: SmithForm | None = None) -> bool:
    """Injective with free (torsion-free, complemented) cokernel."""
    s = snf or smith_normal_form(m, with_u_inv=False)
    return s.rank == m.cols and all(m.ring.is_unit(x) for x in s.invariants)


@dataclass(frozen=True)
class AbGroupPresentation:
    """Invariant-factor presentation of cokernel(relations) in Z^n / F_p^n.

    `torsion` is the divisibility chain of factors > 1 (empty over F_p),
    `free_rank` the number of infinite-cyclic (or F_p-line) summands.
    `gen_lifts` expresses each presentation generator in the ambient
    target coordinates; `to_coords` reduces an ambient vector to
    canonical coordinates (torsion first, then free part).
    """

    ring: Ring
    ambient_rank: int
    torsion: tuple[int, ...]
    free_rank: int
    gen_lifts: ExactMatrix  # ambient_rank x (len(torsion) + free_rank)
    _u: ExactMatrix
    _torsion_pos: tuple[int, ...]
    _free_pos: tuple[int, ...]

    @property
    def order(self) -> int:
        """Group order; 0 means infinite."""
        if self.free_rank:
            return 0 if not self.ring.p else self.ring.p ** self.free_rank * _prod(self.torsion)
        return _prod(self.torsion)

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def to_coords(self, vec: ExactMatrix) -> tuple[int, ...]:
        if vec.rows != self.ambient_rank or vec.cols != 1:
            raise ValueError("vector has wrong shape")
        y = self._u @ vec
        coords = []
        for pos, t in zip(self._torsion_pos, self.torsion):
            coords.append(y.entries[pos][0] % t)
        for pos in self._free_pos:
            coords.append(y.entries[pos][0])
        return tuple(coords)

    def is_zero_class(self, vec: ExactMatrix) -> bool:
        return all(c == 0 for c in self.to_coords(vec))

    def same_class(self, a: ExactMatrix, b: ExactMatrix) -> bool:
        return self.to_coords(a) == self.to_coords(b)

    def describe(self) -> str:
        parts = [f"C{t}" for t in self.torsion]
        base = "Z" if not self.ring.p else f"F{self.ring.p}"
        parts.extend([base] * self.free_rank)
        return " x ".join(parts) if parts else "0"


def _prod(xs) -> int:
    return reduce(lambda a, b: a * b, xs, 1)


def cokernel_presentation(m: ExactMatrix, snf: SmithForm | None = None) -> AbGroupPresentation:
    """Presentation of target / column-span of m."""
    if snf is None or snf.u_inv is None:
        snf = smith_normal_form(m, with_u_inv=True)
    s = snf
    ring = m.ring
    torsion_pos = []
    torsion = []
    free_pos = []
    for i in range(m.rows):
        d = s.d.entries[i][i] if i < min(m.rows, m.cols) else 0
        if d == 0:
            free_pos.append(i)
        elif not ring.is_unit(d):
            torsion_pos.append(i)
            torsion.append(d)
    lift_cols = [s.u_inv.column(i) for i in torsion_pos + free_pos]
    lifts = hstack_all(ring, m.rows, lift_cols) if lift_cols else ExactMatrix.zeros(ring, m.rows, 0)
    return AbGroupPresentation(
        ring=ring,
        ambient_rank=m.rows,
        torsion=tuple(torsion),
        free_rank=len(free_pos),
        gen_lifts=lifts,
        _u=s.u,
        _torsion_pos=tuple(torsion_pos),
        _free_pos=tuple(free_pos),
    )


def gcd_all(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g
