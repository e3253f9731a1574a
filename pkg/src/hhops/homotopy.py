"""Hom complexes, homotopy classes of chain maps, and a small solver
for linear systems whose unknowns are graded maps.

The hom-complex differential is delta(f) = d f - (-1)^n f d in degree n,
so degree-0 cycles are chain maps and degree-1 elements s satisfy
delta(s) = d s + s d, matching the homotopy identity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import ChainComplex, ChainHomotopy, ChainMap
from .exact_linalg import (
    AbGroupPresentation,
    ExactMatrix,
    cokernel_presentation,
    hstack_all,
    kernel_basis,
    solve,
    vstack_all,
)
from .rings import Ring


def linearize_post_pre(post: ExactMatrix, pre: ExactMatrix) -> ExactMatrix:
    """Matrix of F |-> post @ F @ pre acting on row-major vectorizations.

    F has shape (post.cols x pre.rows); the result maps vec(F) to
    vec(post @ F @ pre), shape (post.rows * pre.cols) x (post.cols * pre.rows).
    """
    ring = post.ring
    p = ring.p
    out_rows = post.rows * pre.cols
    in_cols = post.cols * pre.rows
    grid = [[0] * in_cols for _ in range(out_rows)]
    for r in range(post.rows):
        pr = post.entries[r]
        for c in range(pre.cols):
            row = grid[r * pre.cols + c]
            for i in range(post.cols):
                pri = pr[i]
                if not pri:
                    continue
                base = i * pre.rows
                for j in range(pre.rows):
                    q = pre.entries[j][c]
                    if q:
                        x = row[base + j] + pri * q
                        row[base + j] = x % p if p else x
    return ExactMatrix.from_rows(ring, grid) if out_rows else ExactMatrix.zeros(ring, 0, in_cols)


# -- hom complex and homotopy classes -----------------------------------


@dataclass(frozen=True)
class HomLayout:
    """Row-major block layout of hom_n = sum_k Hom(X_k, Y_{k+n})."""

    X: ChainComplex
    Y: ChainComplex
    degree: int
    blocks: tuple[int, ...]  # source degrees k with both ranks positive

    @staticmethod
    def of(X: ChainComplex, Y: ChainComplex, degree: int) -> "HomLayout":
        ks = tuple(k for k in X.degrees() if Y.rank(k + degree) > 0)
        return HomLayout(X, Y, degree, ks)

    def dim(self) -> int:
        return sum(self.Y.rank(k + self.degree) * self.X.rank(k) for k in self.blocks)

    def block_slice(self, k: int) -> tuple[int, int]:
        off = 0
        for b in self.blocks:
            size = self.Y.rank(b + self.degree) * self.X.rank(b)
            if b == k:
                return off, off + size
            off += size
        raise KeyError(k)

    def vec(self, mats: dict[int, ExactMatrix]) -> ExactMatrix:
        ring = self.X.ring
        col = []
        for k in self.blocks:
            m = mats.get(k)
            rk, ck = self.Y.rank(k + self.degree), self.X.rank(k)
            if m is None:
                col.extend([0] * (rk * ck))
            else:
                col.extend(x for row in m.entries for x in row)
        return ExactMatrix.from_rows(ring, [[x] for x in col]) if col else ExactMatrix.zeros(ring, 0, 1)

    def unvec(self, column: ExactMatrix) -> dict[int, ExactMatrix]:
        vals = [column.entries[i][0] for i in range(column.rows)]
        mats = {}
        off = 0
        for k in self.blocks:
            rk, ck = self.Y.rank(k + self.degree), self.X.rank(k)
            block = [vals[off + i * ck:off + (i + 1) * ck] for i in range(rk)]
            mats[k] = ExactMatrix.from_rows(self.X.ring, block)
            off += rk * ck
        return mats


def hom_differential(X: ChainComplex, Y: ChainComplex, n: int) -> tuple[ExactMatrix, HomLayout, HomLayout]:
    """delta_n : hom_n -> hom_{n-1} on vectorized blocks."""
    ring = X.ring
    if X.ring != Y.ring:
        raise ValueError("ring mismatch")
    src = HomLayout.of(X, Y, n)
    dst = HomLayout.of(X, Y, n - 1)
    rows = dst.dim()
    cols = src.dim()
    grid = [[0] * cols for _ in range(rows)]
    sign = -1 if n % 2 else 1

    def add_block(out_k: int, in_k: int, post: ExactMatrix, pre: ExactMatrix, coeff: int) -> None:
        if in_k not in src.blocks or out_k not in dst.blocks:
            return
        lin = linearize_post_pre(post, pre)
        r0, _ = dst.block_slice(out_k)
        c0, _ = src.block_slice(in_k)
        for i in range(lin.rows):
            row = grid[r0 + i]
            for j in range(lin.cols):
                x = lin.entries[i][j]
                if x:
                    v = row[c0 + j] + coeff * x
                    row[c0 + j] = ring.normalize(v)

    for k in src.blocks:
        # d_Y o f_k lands in the block at source degree k
        add_block(k, k, Y.d(k + n), ExactMatrix.identity(ring, X.rank(k)), 1)
        # -(-1)^n f_k o d_X lands in the block at source degree k + 1
        if X.rank(k + 1):
            add_block(k + 1, k, ExactMatrix.identity(ring, Y.rank(k + n)), X.d(k + 1), -sign)
    m = ExactMatrix.from_rows(ring, grid) if rows else ExactMatrix.zeros(ring, 0, cols)
    return m, src, dst


def hom_complex(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """Total hom complex; degree-n rank = sum_k rank X_k * rank Y_{k+n}."""
    if X.ring != Y.ring:
        raise ValueError("ring mismatch")
    lo = (min(Y.degrees()) - max(X.degrees())) if not X.is_zero() and not Y.is_zero() else 0
    hi = (max(Y.degrees()) - min(X.degrees())) if not X.is_zero() and not Y.is_zero() else -1
    ranks = {}
    diffs = {}
    for n in range(lo, hi + 1):
        ranks[n] = HomLayout.of(X, Y, n).dim()
    for n in range(lo, hi + 1):
        if ranks.get(n) and ranks.get(n - 1):
            diffs[n], _, _ = hom_differential(X, Y, n)
    return ChainComplex.build(X.ring, ranks, diffs)


@dataclass(frozen=True)
class HomClasses:
    """H_0 of the hom complex: chain-homotopy classes of maps X -> Y."""

    X: ChainComplex
    Y: ChainComplex
    layout: HomLayout
    cycle_basis: ExactMatrix  # hom_0-dim x z
    pres: AbGroupPresentation  # cokernel of boundaries in cycle coordinates

    @property
    def group(self) -> AbGroupPresentation:
        return self.pres

    def generator_maps(self) -> list[ChainMap]:
        gens = []
        for j in range(self.pres.gen_lifts.cols):
            col = self.cycle_basis @ self.pres.gen_lifts.column(j)
            gens.append(ChainMap.build(self.X, self.Y, self.layout.unvec(col)))
        return gens

    def class_of(self, f: ChainMap) -> tuple[int, ...]:
        vec = self.layout.vec(f.mats)
        coords = solve(self.cycle_basis, vec)
        if coords is None:
            raise ValueError("map is not a cycle in the hom complex (not a chain map?)")
        return self.pres.to_coords(coords)

    def is_null(self, f: ChainMap) -> bool:
        return all(c == 0 for c in self.class_of(f))

    def same_class(self, f: ChainMap, g: ChainMap) -> bool:
        return self.class_of(f) == self.class_of(g)

    def describe(self) -> str:
        return self.pres.describe()


def homotopy_classes(X: ChainComplex, Y: ChainComplex) -> HomClasses:
    d0, layout0, _ = hom_differential(X, Y, 0)
    d1, _, _ = hom_differential(X, Y, 1)
    cycles = kernel_basis(d0)
    rels = solve(cycles, d1)
    if rels is None:
        raise AssertionError("hom-complex boundary is not a cycle")
    return HomClasses(X, Y, layout0, cycles, cokernel_presentation(rels))


def find_homotopy(f: ChainMap, g: ChainMap) -> ChainHomotopy | None:
    """Witness s with d s + s d = f - g, or None when f and g are not
    chain homotopic."""
    if f.src.ranks != g.src.ranks or f.dst.ranks != g.dst.ranks:
        raise ValueError("maps do not share source/target shapes")
    X, Y = f.src, f.dst
    d1, src1, dst0 = hom_differential(X, Y, 1)
    rhs = dst0.vec((f - g).mats)
    sol = solve(d1, rhs)
    if sol is None:
        return None
    return ChainHomotopy(f, g, src1.unvec(sol))


def is_nullhomotopic(f: ChainMap) -> bool:
    return find_homotopy(f, ChainMap.zero(f.src, f.dst)) is not None


# -- linear systems in graded-map unknowns -------------------------------


@dataclass(frozen=True)
class VarSpec:
    """Unknown graded map src -> dst of degree `offset` (0 = chain-map
    shaped, 1 = homotopy shaped). Components V_k : src_k -> dst_{k+offset}."""

    name: str
    src: ChainComplex
    dst: ChainComplex
    offset: int
    chain_condition: bool  # impose d V = (-1)^offset V d

    def support(self) -> tuple[int, ...]:
        return tuple(k for k in self.src.degrees() if self.dst.rank(k + self.offset) > 0)

    def dim(self) -> int:
        return sum(self.dst.rank(k + self.offset) * self.src.rank(k) for k in self.support())


@dataclass(frozen=True)
class Term:
    """Contribution post o V o pre to an equation; either side may be None.

    The equation component at source degree n reads the var block at
    degree k = n + pre_offset; `pre` is indexed by n (matrix eq.src_n ->
    var.src_k) and `post` by k + var.offset (matrix var.dst_{k+offset} ->
    eq.tgt_{n+eq.offset}).
    """

    var: str
    post: dict[int, ExactMatrix] | None
    pre: dict[int, ExactMatrix] | None
    pre_offset: int
    coeff: int = 1


@dataclass(frozen=True)
class Equation:
    """sum of terms = rhs, as graded maps S -> T of degree `offset`."""

    src: ChainComplex
    tgt: ChainComplex
    offset: int
    terms: tuple[Term, ...]
    rhs: dict[int, ExactMatrix]


class ChainSystem:
    """Assemble and solve linear systems over graded-map unknowns."""

    def __init__(self, ring: Ring):
        self.ring = ring
        self.vars: list[VarSpec] = []
        self.equations: list[Equation] = []

    def add_map_var(self, name: str, src: ChainComplex, dst: ChainComplex) -> None:
        self.vars.append(VarSpec(name, src, dst, 0, True))

    def add_homotopy_var(self, name: str, src: ChainComplex, dst: ChainComplex) -> None:
        self.vars.append(VarSpec(name, src, dst, 1, False))

    def var(self, name: str) -> VarSpec:
        for v in self.vars:
            if v.name == name:
                return v
        raise KeyError(name)

    def add_equation(self, src: ChainComplex, tgt: ChainComplex, offset: int,
                     terms: list[Term], rhs: dict[int, ExactMatrix] | ChainMap | None) -> None:
        if isinstance(rhs, ChainMap):
            rhs = dict(rhs.mats)
        self.equations.append(Equation(src, tgt, offset, tuple(terms), dict(rhs or {})))

    # term builders ----------------------------------------------------

    @staticmethod
    def term(var: str, post: ChainMap | None = None, pre: ChainMap | None = None,
             coeff: int = 1) -> Term:
        return Term(
            var,
            dict(post.mats) if post is not None else None,
            dict(pre.mats) if pre is not None else None,
            0,
            coeff,
        )

    @staticmethod
    def term_d_after(var: str, var_dst: ChainComplex, post: ChainMap | None = None,
                     coeff: int = 1) -> Term:
        """(post o) d o V with d in the var's target complex."""
        fam = {m: var_dst.d(m) for m in var_dst.degrees()}
        if post is not None:
            fam = {m: post.mat(m - 1) @ d for m, d in fam.items()}
        return Term(var, fam, None, 0, coeff)

    @staticmethod
    def term_d_before(var: str, var_src: ChainComplex, post: ChainMap | None = None,
                      coeff: int = 1) -> Term:
        """(post o) V o d with d in the var's source complex.

        Reads the var block one degree below the equation degree.
        """
        fam = {n: var_src.d(n) for n in var_src.degrees()}
        post_fam = dict(post.mats) if post is not None else None
        return Term(var, post_fam, fam, -1, coeff)

    # assembly ----------------------------------------------------------

    def _layout(self) -> list[tuple[VarSpec, int, int, int]]:
        """(var, degree, offset-in-vector, block-size) entries."""
        out = []
        off = 0
        for v in self.vars:
            for k in v.support():
                size = v.dst.rank(k + v.offset) * v.src.rank(k)
                out.append((v, k, off, size))
                off += size
        return out

    def _block(self, layout, var: str, k: int):
        for v, kk, off, size in layout:
            if v.name == var and kk == k:
                return v, off, size
        return None

    def assemble(self) -> tuple[ExactMatrix, ExactMatrix, list]:
        ring = self.ring
        layout = self._layout()
        total = sum(size for _, _, _, size in layout)
        rows: list[list[int]] = []
        rhs_col: list[int] = []

        def emit(eq_rows: int, eq_cols_pairs, rhs_mat: ExactMatrix) -> None:
            base = [[0] * total for _ in range(eq_rows)]
            for lin, col_off in eq_cols_pairs:
                for i in range(lin.rows):
                    row = base[i]
                    for j in range(lin.cols):
                        x = lin.entries[i][j]
                        if x:
                            row[col_off + j] = ring.normalize(row[col_off + j] + x)
            rows.extend(base)
            for i in range(rhs_mat.rows):
                rhs_col.extend(rhs_mat.entries[i])

        # chain-map conditions
        for v in self.vars:
            if not v.chain_condition:
                continue
            sign = -1 if v.offset % 2 else 1
            for k in v.src.degrees():
                out_r = v.dst.rank(k + v.offset - 1)
                out_c = v.src.rank(k)
                if out_r == 0 or out_c == 0:
                    continue
                pairs = []
                blk = self._block(layout, v.name, k)
                if blk is not None:
                    lin = linearize_post_pre(
                        v.dst.d(k + v.offset), ExactMatrix.identity(ring, v.src.rank(k))
                    )
                    pairs.append((lin, blk[1]))
                blk2 = self._block(layout, v.name, k - 1)
                if blk2 is not None:
                    lin2 = linearize_post_pre(
                        ExactMatrix.identity(ring, v.dst.rank(k - 1 + v.offset)), v.src.d(k)
                    ).scale(-sign)
                    pairs.append((lin2, blk2[1]))
                if pairs:
                    emit(out_r * out_c, pairs, ExactMatrix.zeros(ring, out_r * out_c, 1))

        for eq in self.equations:
            for n in eq.src.degrees():
                out_r = eq.tgt.rank(n + eq.offset)
                out_c = eq.src.rank(n)
                if out_r == 0 or out_c == 0:
                    continue
                pairs = []
                for t in eq.terms:
                    v = self.var(t.var)
                    k = n + t.pre_offset
                    blk = self._block(layout, t.var, k)
                    if blk is None:
                        continue
                    pre = t.pre.get(n) if t.pre is not None else None
                    if t.pre is not None and pre is None:
                        continue
                    if pre is None:
                        pre = ExactMatrix.identity(ring, v.src.rank(k))
                    post = t.post.get(k + v.offset) if t.post is not None else None
                    if t.post is not None and post is None:
                        continue
                    if post is None:
                        post = ExactMatrix.identity(ring, v.dst.rank(k + v.offset))
                    if post.rows != out_r or pre.cols != out_c:
                        raise ValueError(f"term {t.var} shape mismatch at degree {n}")
                    lin = linearize_post_pre(post, pre)
                    if t.coeff != 1:
                        lin = lin.scale(t.coeff)
                    pairs.append((lin, blk[1]))
                rhs = eq.rhs.get(n)
                if rhs is None:
                    rhs = ExactMatrix.zeros(ring, out_r, out_c)
                rhs_vec = ExactMatrix.from_rows(
                    ring, [[x] for row in rhs.entries for x in row]
                ) if out_r * out_c else ExactMatrix.zeros(ring, 0, 1)
                emit(out_r * out_c, pairs, rhs_vec)

        mat = (
            ExactMatrix.from_rows(ring, rows)
            if rows
            else ExactMatrix.zeros(ring, 0, total)
        )
        rhs_m = (
            ExactMatrix.from_rows(ring, [[x] for x in rhs_col])
            if rhs_col
            else ExactMatrix.zeros(ring, 0, 1)
        )
        return mat, rhs_m, layout

    def solve(self) -> dict[str, dict[int, ExactMatrix]] | None:
        mat, rhs, layout = self.assemble()
        sol = solve(mat, rhs)
        if sol is None:
            return None
        return self._extract(sol, layout)

    def solve_with_kernel(self):
        """(particular, kernel-generators) or None; each entry maps var
        names to graded components."""
        mat, rhs, layout = self.assemble()
        from .exact_linalg import smith_normal_form

        snf = smith_normal_form(mat)
        sol = solve(mat, rhs, snf)
        if sol is None:
            return None
        kern = kernel_basis(mat, snf)
        gens = [self._extract(kern.column(j), layout) for j in range(kern.cols)]
        return self._extract(sol, layout), gens

    def _extract(self, column: ExactMatrix, layout) -> dict[str, dict[int, ExactMatrix]]:
        vals = [column.entries[i][0] for i in range(column.rows)]
        out: dict[str, dict[int, ExactMatrix]] = {v.name: {} for v in self.vars}
        for v, k, off, size in layout:
            r, c = v.dst.rank(k + v.offset), v.src.rank(k)
            block = [vals[off + i * c:off + (i + 1) * c] for i in range(r)]
            out[v.name][k] = ExactMatrix.from_rows(self.ring, block)
        return out
