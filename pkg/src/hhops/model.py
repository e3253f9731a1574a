"""The concrete model structure on bounded complexes of f.g. free
modules and its constructive toolkit.

Structure classes: fibration = degreewise surjection, weak equivalence =
quasi-isomorphism, cofibration = degreewise split mono with degreewise
free cokernel.  Every object is fibrant and cofibrant.

Limits are realized on explicit free bases via deterministic Smith
pivoting, so pullbacks, path objects and friends are ordinary
ChainComplex values with stored structure maps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import ChainComplex, ChainHomotopy, ChainMap
from .exact_linalg import ExactMatrix, block_diag, hstack_all, kernel_basis, solve, vstack_all
from .homotopy import ChainSystem, find_homotopy
from .rings import Ring


def is_fibration(f: ChainMap) -> bool:
    return f.is_degreewise_surjective()


def is_cofibration(f: ChainMap) -> bool:
    return f.is_degreewise_split_injective()


def is_weak_equivalence(f: ChainMap) -> bool:
    return f.is_quasi_iso()


def is_acyclic_cofibration(f: ChainMap) -> bool:
    return is_cofibration(f) and is_weak_equivalence(f)


# -- products ------------------------------------------------------------


@dataclass(frozen=True)
class Product:
    """Degreewise direct sum with projections (the categorical product)."""

    factors: tuple[ChainComplex, ...]
    complex: ChainComplex
    projections: tuple[ChainMap, ...]
    inclusions: tuple[ChainMap, ...]

    def tuple_map(self, comps: list[ChainMap]) -> ChainMap:
        """The map (f_1, ..., f_k) : T -> product."""
        if len(comps) != len(self.factors):
            raise ValueError("wrong number of components")
        if not comps:
            raise ValueError("use Product.of with a source for empty tuples")
        src = comps[0].src
        mats = {}
        for n in src.degrees():
            cols = src.rank(n)
            if cols == 0 or self.complex.rank(n) == 0:
                continue
            stacked = [c.mat(n) for c in comps]
            ring = src.ring
            mats[n] = ExactMatrix.from_rows(
                ring, [row for m in stacked for row in m.to_lists()]
            )
        return ChainMap.build(src, self.complex, mats)

    def zero_tuple(self, src: ChainComplex) -> ChainMap:
        return ChainMap.zero(src, self.complex)


def product(factors: list[ChainComplex], ring: Ring | None = None) -> Product:
    """Empty product = the zero complex (the zero object is final)."""
    if not factors:
        if ring is None:
            raise ValueError("ring required for the empty product")
        z = ChainComplex.zero(ring)
        return Product((), z, (), ())
    ring = factors[0].ring
    total = ChainComplex.zero(ring)
    for f in factors:
        total = total.direct_sum(f)
    projections = []
    inclusions = []
    offset_at = {n: 0 for n in total.degrees()}
    for f in factors:
        proj_mats = {}
        inc_mats = {}
        for n in f.degrees():
            r = f.rank(n)
            tot = total.rank(n)
            off = offset_at.get(n, 0)
            rows = [[0] * tot for _ in range(r)]
            for i in range(r):
                rows[i][off + i] = 1
            pm = ExactMatrix.from_rows(ring, rows)
            proj_mats[n] = pm
            inc_mats[n] = pm.transpose()
            offset_at[n] = off + r
        projections.append(ChainMap.build(total, f, proj_mats, check=False))
        inclusions.append(ChainMap.build(f, total, inc_mats, check=False))
    return Product(tuple(factors), total, tuple(projections), tuple(inclusions))


# -- pullbacks -----------------------------------------------------------


@dataclass(frozen=True)
class Pullback:
    """W = X x_Z Y on an explicit free basis, with the two projections."""

    f: ChainMap  # X -> Z
    g: ChainMap  # Y -> Z
    complex: ChainComplex
    to_x: ChainMap
    to_y: ChainMap
    _basis: dict[int, ExactMatrix]  # columns: basis of ker(f, -g) in X + Y coords

    def factor(self, u: ChainMap, v: ChainMap) -> ChainMap:
        """Universal map T -> W for u : T -> X, v : T -> Y with f u = g v."""
        if not self.f.compose(u).equal(self.g.compose(v)):
            raise ValueError("square does not commute; no induced map")
        ring = self.complex.ring
        mats = {}
        for n in u.src.degrees():
            if self.complex.rank(n) == 0:
                if (u.mat(n).is_zero() and v.mat(n).is_zero()):
                    continue
                raise ValueError("no induced map (pullback vanishes in degree)")
            stacked = ExactMatrix.from_rows(
                ring, u.mat(n).to_lists() + v.mat(n).to_lists()
            )
            coeffs = solve(self._basis[n], stacked)
            if coeffs is None:
                raise AssertionError("pullback factorization failed; invariant broken")
            mats[n] = coeffs
        return ChainMap.build(u.src, self.complex, mats)


def pullback(f: ChainMap, g: ChainMap) -> Pullback:
    if f.dst.ranks != g.dst.ranks or f.dst.diffs != g.dst.diffs or f.src.ring != g.src.ring:
        raise ValueError("pullback needs a common target")
    ring = f.src.ring
    X, Y, Z = f.src, g.src, f.dst
    degs = sorted(set(X.degrees()) | set(Y.degrees()))
    basis: dict[int, ExactMatrix] = {}
    ranks: dict[int, int] = {}
    for n in degs:
        fx = f.mat(n)
        gy = g.mat(n)
        m = fx.hstack(-gy) if Z.rank(n) else ExactMatrix.zeros(ring, 0, X.rank(n) + Y.rank(n))
        k = kernel_basis(m)
        basis[n] = k
        ranks[n] = k.cols
    diffs: dict[int, ExactMatrix] = {}
    for n in degs:
        if ranks.get(n) and ranks.get(n - 1):
            dxy = block_diag(ring, [X.d(n), Y.d(n)])
            image = dxy @ basis[n]
            coeffs = solve(basis[n - 1], image)
            if coeffs is None:
                raise AssertionError("pullback differential not expressible in kernel basis")
            diffs[n] = coeffs
    W = ChainComplex.build(ring, ranks, diffs)
    px_mats = {}
    py_mats = {}
    for n in degs:
        if not ranks.get(n):
            continue
        k = basis[n]
        px_mats[n] = ExactMatrix(ring, X.rank(n), k.cols, tuple(k.entries[:X.rank(n)]))
        py_mats[n] = ExactMatrix(ring, Y.rank(n), k.cols, tuple(k.entries[X.rank(n):]))
    to_x = ChainMap.build(W, X, px_mats)
    to_y = ChainMap.build(W, Y, py_mats)
    return Pullback(f, g, W, to_x, to_y, basis)


# -- pushouts (along cofibrations) ----------------------------------------


@dataclass(frozen=True)
class Pushout:
    """Z = X u_W Y for i : W -> Y a cofibration, alpha : W -> X."""

    i: ChainMap
    alpha: ChainMap
    complex: ChainComplex
    from_x: ChainMap
    from_y: ChainMap

    def factor(self, p: ChainMap, q: ChainMap) -> ChainMap:
        """Universal map Z -> V for p : X -> V, q : Y -> V, p alpha = q i."""
        if not p.compose(self.alpha).equal(q.compose(self.i)):
            raise ValueError("square does not commute; no induced map")
        ring = self.complex.ring
        # from_x/from_y columns jointly span Z; solve transpose system
        mats = {}
        for n in self.complex.degrees():
            rz = self.complex.rank(n)
            span = self.from_x.mat(n).hstack(self.from_y.mat(n))
            want = p.mat(n).hstack(q.mat(n))
            # find h with h @ span = want  <=>  span^T h^T = want^T
            ht = solve(span.transpose(), want.transpose())
            if ht is None:
                raise AssertionError("pushout factorization failed; invariant broken")
            mats[n] = ht.transpose()
        return ChainMap.build(self.complex, p.dst, mats)


def pushout(i: ChainMap, alpha: ChainMap) -> Pushout:
    """Degreewise cokernel of (alpha, -i) : W -> X + Y; free because i
    is a degreewise split mono."""
    if i.src.ranks != alpha.src.ranks:
        raise ValueError("pushout legs need a common source")
    from .exact_linalg import smith_normal_form

    ring = i.src.ring
    W, Y, X = i.src, i.dst, alpha.dst
    degs = sorted(set(X.degrees()) | set(Y.degrees()))
    proj: dict[int, ExactMatrix] = {}
    ranks: dict[int, int] = {}
    for n in degs:
        total = X.rank(n) + Y.rank(n)
        inc = ExactMatrix.from_rows(
            ring, alpha.mat(n).to_lists() + (-i.mat(n)).to_lists()
        ) if W.rank(n) else ExactMatrix.zeros(ring, total, 0)
        s = smith_normal_form(inc)
        if any(not ring.is_unit(x) for x in s.invariants) or s.rank != inc.cols:
            raise ValueError("pushout leg is not a split mono; cokernel not free")
        rows = [s.u.entries[r] for r in range(s.rank, total)]
        proj[n] = (
            ExactMatrix.from_rows(ring, rows)
            if rows
            else ExactMatrix.zeros(ring, 0, total)
        )
        ranks[n] = total - s.rank
    diffs: dict[int, ExactMatrix] = {}
    for n in degs:
        if ranks.get(n) and ranks.get(n - 1):
            dxy = block_diag(ring, [X.d(n), Y.d(n)])
            # the differential descends; compute it through any section
            sec = solve(proj[n], ExactMatrix.identity(ring, ranks[n]))
            if sec is None:
                raise AssertionError("cokernel projection not split")
            diffs[n] = proj[n - 1] @ (dxy @ sec)
    Z = ChainComplex.build(ring, ranks, diffs)
    fx = {}
    fy = {}
    for n in degs:
        if not ranks.get(n):
            continue
        pm = proj[n]
        fx[n] = ExactMatrix(ring, pm.rows, X.rank(n), tuple(tuple(r[:X.rank(n)]) for r in pm.entries))
        fy[n] = ExactMatrix(ring, pm.rows, Y.rank(n), tuple(tuple(r[X.rank(n):]) for r in pm.entries))
    return Pushout(i, alpha, Z, ChainMap.build(X, Z, fx), ChainMap.build(Y, Z, fy))


# -- path, cylinder, cone -------------------------------------------------


@dataclass(frozen=True)
class PathObject:
    """P_n = Y_n + Y_n + Y_{n+1}, d(a,b,h) = (da, db, a - b - dh)."""

    base: ChainComplex
    complex: ChainComplex
    const: ChainMap      # acyclic cofibration Y -> P
    ends: ChainMap       # fibration P -> Y x Y
    end0: ChainMap
    end1: ChainMap


def path_object(Y: ChainComplex) -> PathObject:
    ring = Y.ring
    ranks = {}
    degs = Y.degrees()
    for n in set(degs) | {n - 1 for n in degs}:
        r = 2 * Y.rank(n) + Y.rank(n + 1)
        if r:
            ranks[n] = r
    diffs = {}
    for n in ranks:
        if not ranks.get(n - 1):
            continue
        ra, rh = Y.rank(n), Y.rank(n + 1)
        oa, oh = Y.rank(n - 1), Y.rank(n)
        d = Y.d(n)
        z_ah = ExactMatrix.zeros(ring, oa, rh)
        ident = ExactMatrix.identity(ring, ra) if ra == oh else ExactMatrix.zeros(ring, oh, ra)
        rows = [
            hstack_all(ring, oa, [d, ExactMatrix.zeros(ring, oa, ra), z_ah]),
            hstack_all(ring, oa, [ExactMatrix.zeros(ring, oa, ra), d, z_ah]),
            hstack_all(ring, oh, [ident, -ident, -Y.d(n + 1)]),
        ]
        diffs[n] = vstack_all(ring, 2 * ra + rh, rows)
    P = ChainComplex.build(ring, ranks, diffs)
    const_mats = {}
    e0_mats = {}
    e1_mats = {}
    ends_mats = {}
    for n in degs:
        r = Y.rank(n)
        rh = Y.rank(n + 1)
        ident = ExactMatrix.identity(ring, r)
        const_mats[n] = vstack_all(ring, r, [ident, ident, ExactMatrix.zeros(ring, rh, r)])
        e0_mats[n] = hstack_all(ring, r, [ident, ExactMatrix.zeros(ring, r, r), ExactMatrix.zeros(ring, r, rh)])
        e1_mats[n] = hstack_all(ring, r, [ExactMatrix.zeros(ring, r, r), ident, ExactMatrix.zeros(ring, r, rh)])
        ends_mats[n] = e0_mats[n].vstack(e1_mats[n])
    YY = Y.direct_sum(Y)
    return PathObject(
        Y,
        P,
        ChainMap.build(Y, P, const_mats),
        ChainMap.build(P, YY, ends_mats),
        ChainMap.build(P, Y, e0_mats),
        ChainMap.build(P, Y, e1_mats),
    )


@dataclass(frozen=True)
class ReducedPath:
    """PW_n = W_n + W_{n+1}, d(a,h) = (da, a - dh); weakly contractible,
    and f : X -> W is nullhomotopic iff it factors through `out`."""

    base: ChainComplex
    complex: ChainComplex
    out: ChainMap  # fibration PW -> W


def reduced_path(W: ChainComplex) -> ReducedPath:
    ring = W.ring
    ranks = {}
    for n in set(W.degrees()) | {n - 1 for n in W.degrees()}:
        r = W.rank(n) + W.rank(n + 1)
        if r:
            ranks[n] = r
    diffs = {}
    for n in ranks:
        if not ranks.get(n - 1):
            continue
        ra, rh = W.rank(n), W.rank(n + 1)
        oa, oh = W.rank(n - 1), W.rank(n)
        ident = ExactMatrix.identity(ring, ra) if ra == oh else ExactMatrix.zeros(ring, oh, ra)
        top = W.d(n).hstack(ExactMatrix.zeros(ring, oa, rh))
        bot = ident.hstack(-W.d(n + 1))
        diffs[n] = top.vstack(bot)
    P = ChainComplex.build(ring, ranks, diffs)
    out_mats = {}
    for n in W.degrees():
        ident = ExactMatrix.identity(ring, W.rank(n))
        out_mats[n] = ident.hstack(ExactMatrix.zeros(ring, W.rank(n), W.rank(n + 1)))
    return ReducedPath(W, P, ChainMap.build(P, W, out_mats))


def factor_through_reduced_path(f: ChainMap, rp: ReducedPath | None = None) -> ChainMap | None:
    """A lift of f across PW -> W (exists iff f is nullhomotopic)."""
    rp = rp or reduced_path(f.dst)
    s = find_homotopy(f, ChainMap.zero(f.src, f.dst))
    if s is None:
        return None
    mats = {}
    for n in f.src.degrees():
        if rp.complex.rank(n) == 0:
            continue
        mats[n] = f.mat(n).vstack(s.mat(n))
    return ChainMap.build(f.src, rp.complex, mats)


@dataclass(frozen=True)
class Cylinder:
    """Cyl_n = X_n + X_n + X_{n-1}, d(a,b,h) = (da + h, db - h, -dh)."""

    base: ChainComplex
    complex: ChainComplex
    end0: ChainMap
    end1: ChainMap
    collapse: ChainMap  # weak equivalence Cyl -> X


def cylinder(X: ChainComplex) -> Cylinder:
    ring = X.ring
    ranks = {}
    for n in set(X.degrees()) | {n + 1 for n in X.degrees()}:
        r = 2 * X.rank(n) + X.rank(n - 1)
        if r:
            ranks[n] = r
    diffs = {}
    for n in ranks:
        if not ranks.get(n - 1):
            continue
        ra, rh = X.rank(n), X.rank(n - 1)
        oa, oh = X.rank(n - 1), X.rank(n - 2)
        d = X.d(n)
        ident = ExactMatrix.identity(ring, rh) if rh == oa else ExactMatrix.zeros(ring, oa, rh)
        rows = [
            hstack_all(ring, oa, [d, ExactMatrix.zeros(ring, oa, ra), ident]),
            hstack_all(ring, oa, [ExactMatrix.zeros(ring, oa, ra), d, -ident]),
            hstack_all(ring, oh, [ExactMatrix.zeros(ring, oh, ra), ExactMatrix.zeros(ring, oh, ra), -X.d(n - 1)]),
        ]
        diffs[n] = vstack_all(ring, 2 * ra + rh, rows)
    C = ChainComplex.build(ring, ranks, diffs)
    e0 = {}
    e1 = {}
    fold = {}
    for n in X.degrees():
        r = X.rank(n)
        rh = X.rank(n - 1)
        ident = ExactMatrix.identity(ring, r)
        e0[n] = vstack_all(ring, r, [ident, ExactMatrix.zeros(ring, r, r), ExactMatrix.zeros(ring, rh, r)])
        e1[n] = vstack_all(ring, r, [ExactMatrix.zeros(ring, r, r), ident, ExactMatrix.zeros(ring, rh, r)])
        fold[n] = hstack_all(ring, r, [ident, ident, ExactMatrix.zeros(ring, r, rh)])
    return Cylinder(
        X,
        C,
        ChainMap.build(X, C, e0),
        ChainMap.build(X, C, e1),
        ChainMap.build(C, X, fold),
    )


@dataclass(frozen=True)
class ConeData:
    """CX_n = X_n + X_{n-1}, d(x,h) = (dx + h, -dh); acyclic, with the
    cofibration X -> CX and suspension = cokernel (degree shift up,
    negated differential)."""

    base: ChainComplex
    complex: ChainComplex
    include: ChainMap             # cofibration X -> CX
    suspension: ChainComplex      # X shifted up by one
    collapse: ChainMap            # CX -> suspension


def cone(X: ChainComplex) -> ConeData:
    ring = X.ring
    ranks = {}
    for n in set(X.degrees()) | {n + 1 for n in X.degrees()}:
        r = X.rank(n) + X.rank(n - 1)
        if r:
            ranks[n] = r
    diffs = {}
    for n in ranks:
        if not ranks.get(n - 1):
            continue
        ra, rh = X.rank(n), X.rank(n - 1)
        oa, oh = X.rank(n - 1), X.rank(n - 2)
        ident = ExactMatrix.identity(ring, rh) if rh == oa else ExactMatrix.zeros(ring, oa, rh)
        top = X.d(n).hstack(ident)
        bot = ExactMatrix.zeros(ring, oh, ra).hstack(-X.d(n - 1))
        diffs[n] = top.vstack(bot)
    C = ChainComplex.build(ring, ranks, diffs)
    inc = {}
    collapse = {}
    susp = X.shift(1)
    for n in C.degrees():
        ra, rh = X.rank(n), X.rank(n - 1)
        if ra:
            inc[n] = ExactMatrix.identity(ring, ra).vstack(ExactMatrix.zeros(ring, rh, ra))
        if rh:
            collapse[n] = ExactMatrix.zeros(ring, rh, ra).hstack(ExactMatrix.identity(ring, rh))
    return ConeData(X, C, ChainMap.build(X, C, inc), susp, ChainMap.build(C, susp, collapse))


def suspension(X: ChainComplex) -> ChainComplex:
    return X.shift(1)


def factor_through_cone(f: ChainMap, cn: ConeData | None = None) -> ChainMap | None:
    """Extension of f : X -> W over X -> CX (exists iff f nullhomotopic)."""
    cn = cn or cone(f.src)
    s = find_homotopy(f, ChainMap.zero(f.src, f.dst))
    if s is None:
        return None
    # g(x, h) = f(x) + s(h): using d s + s d = f this is a chain map
    mats = {}
    for n in cn.complex.degrees():
        ra, rh = f.src.rank(n), f.src.rank(n - 1)
        if f.dst.rank(n) == 0:
            continue
        left = f.mat(n) if ra else ExactMatrix.zeros(f.src.ring, f.dst.rank(n), 0)
        right = s.mat(n - 1) if rh else ExactMatrix.zeros(f.src.ring, f.dst.rank(n), 0)
        mats[n] = left.hstack(right)
    return ChainMap.build(cn.complex, f.dst, mats)


# -- factorizations -------------------------------------------------------


@dataclass(frozen=True)
class WeFibFactorization:
    """f = fib o we with we an acyclic cofibration (mapping path space).

    When f is the zero map out of the zero complex, `middle` is exactly
    the reduced path object of the target.
    """

    f: ChainMap
    middle: ChainComplex
    we: ChainMap   # acyclic cofibration src -> middle
    fib: ChainMap  # fibration middle -> dst
    retract: ChainMap  # middle -> src, a deformation retraction


def factor_we_fib(f: ChainMap) -> WeFibFactorization:
    """Mapping path space F_n = X_n + Y_n + Y_{n+1},
    d(x, b, h) = (dx, db, b - f(x) - dh); for f = 0 out of the zero
    complex this is literally the reduced path object."""
    ring = f.src.ring
    X, Y = f.src, f.dst
    ranks = {}
    for n in set(X.degrees()) | set(Y.degrees()) | {n - 1 for n in Y.degrees()}:
        r = X.rank(n) + Y.rank(n) + Y.rank(n + 1)
        if r:
            ranks[n] = r
    diffs = {}
    for n in ranks:
        if not ranks.get(n - 1):
            continue
        rx, ry, rh = X.rank(n), Y.rank(n), Y.rank(n + 1)
        ox, oy, oh = X.rank(n - 1), Y.rank(n - 1), Y.rank(n)
        rows = [
            hstack_all(ring, ox, [X.d(n), ExactMatrix.zeros(ring, ox, ry), ExactMatrix.zeros(ring, ox, rh)]),
            hstack_all(ring, oy, [ExactMatrix.zeros(ring, oy, rx), Y.d(n), ExactMatrix.zeros(ring, oy, rh)]),
            hstack_all(ring, oh, [-f.mat(n), ExactMatrix.identity(ring, ry) if ry == oh else ExactMatrix.zeros(ring, oh, ry), -Y.d(n + 1)]),
        ]
        diffs[n] = vstack_all(ring, rx + ry + rh, rows)
    F = ChainComplex.build(ring, ranks, diffs)
    we_mats = {}
    fib_mats = {}
    ret_mats = {}
    for n in F.degrees():
        rx, ry, rh = X.rank(n), Y.rank(n), Y.rank(n + 1)
        if rx:
            we_mats[n] = vstack_all(
                ring, rx, [ExactMatrix.identity(ring, rx), f.mat(n), ExactMatrix.zeros(ring, rh, rx)]
            )
        fib_mats[n] = hstack_all(
            ring, ry,
            [ExactMatrix.zeros(ring, ry, rx), ExactMatrix.identity(ring, ry), ExactMatrix.zeros(ring, ry, rh)],
        )
        ret_mats[n] = hstack_all(
            ring, rx,
            [ExactMatrix.identity(ring, rx), ExactMatrix.zeros(ring, rx, ry), ExactMatrix.zeros(ring, rx, rh)],
        )
    return WeFibFactorization(
        f,
        F,
        ChainMap.build(X, F, we_mats),
        ChainMap.build(F, Y, fib_mats),
        ChainMap.build(F, X, ret_mats),
    )


@dataclass(frozen=True)
class CofWeFactorization:
    """f = we o cof via the mapping cylinder M_n = X_n + Y_n + X_{n-1}."""

    f: ChainMap
    middle: ChainComplex
    cof: ChainMap  # cofibration src -> middle
    we: ChainMap   # weak equivalence middle -> dst


def factor_cof_we(f: ChainMap) -> CofWeFactorization:
    ring = f.src.ring
    X, Y = f.src, f.dst
    ranks = {}
    for n in set(X.degrees()) | set(Y.degrees()) | {n + 1 for n in X.degrees()}:
        r = X.rank(n) + Y.rank(n) + X.rank(n - 1)
        if r:
            ranks[n] = r
    diffs = {}
    for n in ranks:
        if not ranks.get(n - 1):
            continue
        rx, ry, rh = X.rank(n), Y.rank(n), X.rank(n - 1)
        ox, oy, oh = X.rank(n - 1), Y.rank(n - 1), X.rank(n - 2)
        ident = ExactMatrix.identity(ring, rh) if rh == ox else ExactMatrix.zeros(ring, ox, rh)
        rows = [
            hstack_all(ring, ox, [X.d(n), ExactMatrix.zeros(ring, ox, ry), ident]),
            hstack_all(ring, oy, [ExactMatrix.zeros(ring, oy, rx), Y.d(n), -f.mat(n - 1)]),
            hstack_all(ring, oh, [ExactMatrix.zeros(ring, oh, rx), ExactMatrix.zeros(ring, oh, ry), -X.d(n - 1)]),
        ]
        diffs[n] = vstack_all(ring, rx + ry + rh, rows)
    M = ChainComplex.build(ring, ranks, diffs)
    cof_mats = {}
    we_mats = {}
    for n in M.degrees():
        rx, ry, rh = X.rank(n), Y.rank(n), X.rank(n - 1)
        if rx:
            cof_mats[n] = vstack_all(
                ring, rx,
                [ExactMatrix.identity(ring, rx), ExactMatrix.zeros(ring, ry, rx), ExactMatrix.zeros(ring, rh, rx)],
            )
        we_mats[n] = hstack_all(
            ring, ry, [f.mat(n), ExactMatrix.identity(ring, ry), ExactMatrix.zeros(ring, ry, rh)]
        )
    return CofWeFactorization(f, M, ChainMap.build(X, M, cof_mats), ChainMap.build(M, Y, we_mats))


# -- lifting lemmas --------------------------------------------------------


def lift_llp(i: ChainMap, p: ChainMap, top: ChainMap, bottom: ChainMap) -> ChainMap:
    """Diagonal filler for an acyclic cofibration i : A -> B against a
    fibration p : E -> X, given top : A -> E and bottom : B -> X with
    p top = bottom i.  Both triangles commute exactly."""
    if not p.compose(top).equal(bottom.compose(i)):
        raise ValueError("lifting square does not commute")
    sys = ChainSystem(i.src.ring)
    B, E = i.dst, p.src
    sys.add_map_var("l", B, E)
    sys.add_equation(i.src, E, 0, [ChainSystem.term("l", pre=i)], top)
    sys.add_equation(B, p.dst, 0, [ChainSystem.term("l", post=p)], bottom)
    sol = sys.solve()
    if sol is None:
        raise AssertionError("lifting failed; model-category invariant broken")
    return ChainMap.build(B, E, sol["l"])


def rectify_along_fibration(psi: ChainMap, f: ChainMap, q: ChainMap,
                            H: ChainHomotopy) -> tuple[ChainMap, ChainHomotopy]:
    """Homotopy lifting: given a fibration q : Y -> Z, f : T -> Y and a
    homotopy H : psi ~ q f, return f' ~ f with q f' = psi exactly,
    together with the witness f' ~ f."""
    if not H.f.equal(psi) or not H.g.equal(q.compose(f)):
        raise ValueError("homotopy does not connect psi and q f")
    ring = f.src.ring
    T, Y = f.src, f.dst
    lifted: dict[int, ExactMatrix] = {}
    for n in T.degrees():
        h = H.mat(n)
        target = Y.rank(n + 1)
        if target == 0:
            if not h.is_zero():
                raise ValueError("homotopy has a component the fibration cannot lift")
            continue
        qs = q.mat(n + 1)
        s = solve(qs, h)
        if s is None:
            raise AssertionError("fibration component not surjective")
        lifted[n] = s
    sT = {n: m for n, m in lifted.items()}
    # f' = f + d s + s d
    mats = {}
    for n in T.degrees():
        s_n = sT.get(n, ExactMatrix.zeros(ring, Y.rank(n + 1), T.rank(n)))
        s_prev = sT.get(n - 1, ExactMatrix.zeros(ring, Y.rank(n), T.rank(n - 1)))
        mats[n] = f.mat(n) + Y.d(n + 1) @ s_n + s_prev @ T.d(n)
    fp = ChainMap.build(T, Y, mats)
    if not q.compose(fp).equal(psi):
        raise AssertionError("rectified map does not satisfy q f' = psi")
    witness = ChainHomotopy(fp, f, sT)
    witness.validate()
    return fp, witness


def homotopy_pullback_lift(square: Pullback, p: ChainMap, f: ChainMap,
                           H: ChainHomotopy) -> tuple[ChainMap, ChainHomotopy]:
    """Given the strict pullback square (W -> X over Z <- Y) with q = square.g
    a fibration, p : T -> X, f : T -> Y and H : i p ~ q f, return g : T -> W
    with square.to_x g = p exactly and a witness square.to_y g ~ f."""
    i, q = square.f, square.g
    fp, wit = rectify_along_fibration(i.compose(p), f, q, H)
    g = square.factor(p, fp)
    witness = ChainHomotopy(square.to_y.compose(g), f, wit.s)
    witness.validate()
    return g, witness


@dataclass(frozen=True)
class LadderLift:
    kappa: ChainMap
    theta: ChainMap
    phi_witness: ChainHomotopy  # phi ~ q theta


def ladder_lift(top: Pullback, bottom: Pullback, sigma: ChainMap, phi: ChainMap,
                H: ChainHomotopy) -> LadderLift:
    """Two stacked pullbacks U = W x_X V (top) and W = Y x_Z X (bottom),
    horizontal legs fibrations; inputs sigma : T -> V, phi : T -> Y with
    H : u phi ~ s t sigma.  Produces kappa and theta with
    r kappa = sigma, p theta = t sigma, theta = Phi kappa, phi ~ q theta."""
    u, s_map = bottom.f, bottom.g
    t_map = top.g  # V -> X
    sts = s_map.compose(t_map.compose(sigma))
    if not H.f.equal(u.compose(phi)) or not H.g.equal(sts):
        raise ValueError("homotopy does not connect u phi and s t sigma")
    flipped = ChainHomotopy(sts, u.compose(phi), {n: m.scale(-1) for n, m in H.s.items()})
    phi2, wit = rectify_along_fibration(sts, phi, u, flipped)
    theta = bottom.factor(phi2, t_map.compose(sigma))
    kappa = top.factor(theta, sigma)
    q_theta = bottom.to_x.compose(theta)  # equals phi2
    witness = ChainHomotopy(q_theta, phi, dict(wit.s))
    witness.validate()
    return LadderLift(kappa, theta, witness)


# -- duals -----------------------------------------------------------------


def rectify_along_cofibration(psi: ChainMap, g: ChainMap, i: ChainMap,
                              H: ChainHomotopy) -> tuple[ChainMap, ChainHomotopy]:
    """Dual homotopy lifting: i : A -> B a cofibration, g : B -> V, and
    H : psi ~ g i; returns g' ~ g with g' i = psi exactly."""
    if not H.f.equal(psi) or not H.g.equal(g.compose(i)):
        raise ValueError("homotopy does not connect psi and g i")
    ring = g.src.ring
    A, B, V = i.src, i.dst, g.dst
    # choose a degreewise retraction rho of i, then s := H o rho
    sB: dict[int, ExactMatrix] = {}
    for n in B.degrees():
        if A.rank(n) == 0:
            continue
        rho_t = solve(i.mat(n).transpose(), ExactMatrix.identity(ring, A.rank(n)))
        if rho_t is None:
            raise ValueError("leg is not degreewise split injective")
        h = H.mat(n)
        if V.rank(n + 1):
            sB[n] = h @ rho_t.transpose()
    mats = {}
    for n in B.degrees():
        s_n = sB.get(n, ExactMatrix.zeros(ring, V.rank(n + 1), B.rank(n)))
        s_prev = sB.get(n - 1, ExactMatrix.zeros(ring, V.rank(n), B.rank(n - 1)))
        mats[n] = g.mat(n) + V.d(n + 1) @ s_n + s_prev @ B.d(n)
    gp = ChainMap.build(B, V, mats)
    if not gp.compose(i).equal(psi):
        raise AssertionError("rectified map does not satisfy g' i = psi")
    witness = ChainHomotopy(gp, g, sB)
    witness.validate()
    return gp, witness


def homotopy_pushout_lift(square: Pushout, p: ChainMap, f: ChainMap,
                          H: ChainHomotopy) -> tuple[ChainMap, ChainHomotopy]:
    """Dual of homotopy_pullback_lift for a pushout Z = X u_W Y along a
    cofibration i: given p : X -> V, f : Y -> V and H : p alpha ~ f i,
    produce g : Z -> V with g from_x = p and a witness g from_y ~ f."""
    fp, wit = rectify_along_cofibration(p.compose(square.alpha), f, square.i, H)
    g = square.factor(p, fp)
    witness = ChainHomotopy(g.compose(square.from_y), f, wit.s)
    witness.validate()
    return g, witness
