"""Rectification of homotopy-commutative diagrams by double induction.

Outer induction over degree levels; for each object x of the next degree
an inner induction over k chooses strict representatives for the maps
out of x into degree-k targets.  The k >= 2 steps build the pullback
grid whose total operation decides, by exact linear solvability, whether
the current truncation extends.

All choices (kernel bases, particular solutions) are deterministic;
alternative choices are exposed through an explicit seed that offsets
solutions by kernel generators, never through hidden state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import ChainComplex, ChainHomotopy, ChainMap
from .exact_linalg import ExactMatrix, hstack_all, solve
from .homotopy import ChainSystem, HomClasses, find_homotopy, homotopy_classes
from .index_cat import Morphism, WeakLattice
from .matching import (
    DiagramPart,
    MatchingObject,
    degree_slice_coords,
    generalized_diagonal,
    matching_object,
    reedy_fibrant_replacement,
)
from .model import Pullback, Product, factor_we_fib, product, pullback, rectify_along_fibration
from .rings import Ring


class DiagramError(ValueError):
    pass


# -- homotopy-commutative input diagrams ------------------------------------


class HoDiagram:
    """Representatives per generating arrow of a diagram commuting up to
    homotopy; pointed inputs have their ideal generators normalized to
    the strict zero map (after checking they are nullhomotopic)."""

    def __init__(self, lattice: WeakLattice, objects: dict[str, ChainComplex],
                 reps: dict[str, ChainMap], pointed: bool | None = None):
        self.lattice = lattice
        self.objects = dict(objects)
        self.reps = dict(reps)
        self.pointed = lattice.pointed if pointed is None else pointed
        self._rep_cache: dict[tuple, ChainMap] = {}

    def ring(self) -> Ring:
        return next(iter(self.objects.values())).ring

    def rep_of(self, m: Morphism) -> ChainMap:
        key = (m.src, m.dst, m.word)
        got = self._rep_cache.get(key)
        if got is None:
            if m.is_identity():
                got = ChainMap.identity(self.objects[m.src])
            else:
                out = None
                for lbl in m.word:
                    nxt = self.reps[lbl]
                    out = nxt if out is None else nxt.compose(out)
                got = out
            self._rep_cache[key] = got
        return got

    def normalize(self) -> None:
        """Zero out ideal generator representatives (pointed case)."""
        if not self.pointed:
            return
        for a in self.lattice.arrows:
            gen = self.lattice.canonical((a.label,))
            if gen.in_ideal:
                self.reps[a.label] = ChainMap.zero(
                    self.objects[a.src], self.objects[a.dst]
                )
        self._rep_cache.clear()

    def validate(self) -> None:
        """Raise DiagramError naming the first failing coherence pair."""
        lat = self.lattice
        for a in self.lattice.arrows:
            f = self.reps.get(a.label)
            if f is None:
                raise DiagramError(f"missing representative for arrow {a.label}")
            if f.src.ranks != self.objects[a.src].ranks or f.dst.ranks != self.objects[a.dst].ranks:
                raise DiagramError(f"representative for {a.label} has wrong endpoints")
            f.validate()
        for x in lat.object_names():
            for m in lat.nonidentity_from(x):
                canon_rep = self.rep_of(m)
                from .matching import _class_words

                for w in _class_words(lat, m):
                    comp = None
                    for lbl in w:
                        nxt = self.reps[lbl]
                        comp = nxt if comp is None else nxt.compose(comp)
                    if find_homotopy(comp, canon_rep) is None:
                        raise DiagramError(
                            f"relation words {w} and {m.word} are not homotopic"
                        )
                if self.pointed and m.in_ideal:
                    zero = ChainMap.zero(canon_rep.src, canon_rep.dst)
                    if find_homotopy(canon_rep, zero) is None:
                        raise DiagramError(f"ideal morphism {m} is not nullhomotopic")


def strict_to_ho(part: DiagramPart) -> HoDiagram:
    return HoDiagram(part.lattice, dict(part.objects), dict(part.gen_maps), part.pointed)


# -- value sets --------------------------------------------------------------


@dataclass(frozen=True)
class ValueSet:
    """Affine set of homotopy classes: base + span of generators, inside
    an ambient presentation of [Y(x), F2], plus the class whose
    membership constitutes vanishing."""

    ambient: HomClasses
    base: tuple[int, ...]
    gens: tuple[tuple[int, ...], ...]
    null_class: tuple[int, ...]

    def contains(self, target: tuple[int, ...]) -> bool:
        ring = self.ambient.X.ring
        pres = self.ambient.pres
        n = len(self.base)
        if n == 0:
            return True
        diff = [target[i] - self.base[i] for i in range(n)]
        cols = [list(g) for g in self.gens]
        # add torsion relation columns so membership is an exact solve
        tcount = len(pres.torsion)
        for i, t in enumerate(pres.torsion):
            col = [0] * n
            col[i] = t
            cols.append(col)
        if ring.p:
            mat_rows = [[c[i] for c in cols] for i in range(n)]
            m = ExactMatrix.from_rows(ring, mat_rows) if cols else ExactMatrix.zeros(ring, n, 0)
            b = ExactMatrix.from_rows(ring, [[x] for x in diff])
            return solve(m, b) is not None
        from .rings import ZZ

        mat_rows = [[c[i] for c in cols] for i in range(n)]
        m = ExactMatrix.from_rows(ZZ, mat_rows) if cols else ExactMatrix.zeros(ZZ, n, 0)
        b = ExactMatrix.from_rows(ZZ, [[x] for x in diff])
        return solve(m, b) is not None

    def contains_null(self) -> bool:
        return self.contains(self.null_class)

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient.describe(),
            "base": list(self.base),
            "generators": sorted(set(tuple(g) for g in self.gens if any(g))),
            "null_class": list(self.null_class),
            "vanishes": self.contains_null(),
        }


@dataclass
class ObstructionReport:
    x: str
    k: int
    pointed: bool
    verdict: str                       # "vanishes" | "obstructed"
    target: ChainComplex               # the F2 object
    theta: ChainMap | None             # a value representative
    value_set: ValueSet | None
    kappa: ChainMap | None = None
    alpha: ChainMap | None = None
    new_sigma: dict[tuple, ChainMap] | None = None

    @property
    def vanishes(self) -> bool:
        return self.verdict == "vanishes"

    def summary(self) -> dict:
        out = {
            "stage": [self.x, self.k],
            "verdict": self.verdict,
            "target_ranks": {str(n): self.target.rank(n) for n in self.target.degrees()},
        }
        if self.value_set is not None:
            out["value_set"] = self.value_set.to_json()
        return out


# -- the stage grid -----------------------------------------------------------


@dataclass
class StageGrid:
    """The pullback grid for one inner-induction stage (x, k >= 2)."""

    part: DiagramPart
    x: str
    k: int
    pointed: bool
    coords_k: list[Morphism]
    prod_Ys: Product
    prod_Ms: Product
    matchings: dict[str, MatchingObject]
    big_m: ChainMap                  # prod Y(s) -> prod M^s (fibration)
    forget_prod: ChainMap            # prod M^s -> target product
    psi: ChainMap
    src_prod: Product
    tgt_prod: Product
    m_prev: MatchingObject           # M^x_{k-1}
    Q: Pullback
    N: Pullback
    P: Pullback
    F1: ChainComplex
    iota: ChainMap
    psi_fib: ChainMap
    F2: Pullback
    F3: Pullback
    gamma: ChainMap                  # Q -> F2
    eta: ChainMap                    # Y(x) -> Q
    m_prev_map: ChainMap             # Y(x) -> M^x_{k-1}
    sigma_below: ChainMap            # Y(x) -> prod_{|t|<k} Y(t)


def lower_of(part: DiagramPart, lower: dict[tuple, ChainMap], m: Morphism,
             src: ChainComplex) -> ChainMap:
    if part.pointed and m.in_ideal:
        return ChainMap.zero(src, part.value(m.dst))
    return lower[m.word]


def stage_grid(part: DiagramPart, x: str, k: int, Yx: ChainComplex,
               lower: dict[tuple, ChainMap], pointed: bool) -> StageGrid:
    """Assemble the grid objects for the stage (x, k).

    `part` holds the strict diagram on the objects of degree <= k under
    x (and their maps); `lower` holds the strict choices for morphisms
    x -> t with |t| < k.
    """
    lat = part.lattice
    ring = Yx.ring
    coords_k = degree_slice_coords(lat, x, k, k, pointed)
    prod_Ys = product([part.value(g.dst) for g in coords_k], ring=ring)
    matchings: dict[str, MatchingObject] = {}
    for g in coords_k:
        if g.dst not in matchings:
            matchings[g.dst] = matching_object(part, g.dst, k - 1, pointed)
    # fibrancy precondition: each structure map Y(s) -> M^s_{k-1} onto
    m_maps = {}
    for s, mo in matchings.items():
        comps = {c.word: part.map_of(c) for c in mo.coords}
        m_s = mo.induce(part.value(s), comps)
        if not m_s.is_degreewise_surjective():
            raise DiagramError(
                f"stage ({x},{k}): structure map of {s} is not a fibration; "
                "apply Reedy fibrant replacement first"
            )
        m_maps[s] = m_s
    prod_Ms = product([matchings[g.dst].complex for g in coords_k], ring=ring)
    big_m = _block_map(prod_Ys, prod_Ms, [m_maps[g.dst] for g in coords_k])
    psi, src_prod, tgt_prod, tgt_index = generalized_diagonal(part, x, k, pointed)
    # the target product is flat over (g, f) pairs in g-major order, so
    # the combined forgetful map is the degreewise block diagonal
    from .exact_linalg import block_diag

    forget_mats = {}
    for n in set(prod_Ms.complex.degrees()) | set(tgt_prod.complex.degrees()):
        blocks = [matchings[g.dst].forget.mat(n) for g in coords_k]
        if blocks:
            forget_mats[n] = block_diag(ring, blocks)
    forget_prod = ChainMap.build(prod_Ms.complex, tgt_prod.complex, forget_mats)
    m_prev = matching_object(part, x, k - 1, pointed)
    # maps out of Y(x) determined by the lower truncation
    src_coords = degree_slice_coords(lat, x, 0, k - 1, pointed)
    if src_coords:
        sigma_below = src_prod.tuple_map(
            [lower_of(part, lower, m, Yx) for m in src_coords]
        )
    else:
        sigma_below = ChainMap.zero(Yx, src_prod.complex)
    rho_comps = []
    for g in coords_k:
        mo = matchings[g.dst]
        comps = {}
        for c in mo.coords:
            comp = lat.compose(c, g)
            comps[c.word] = lower_of(part, lower, comp, Yx)
        rho_comps.append(mo.induce(Yx, comps))
    rho = (
        prod_Ms.tuple_map(rho_comps)
        if coords_k
        else ChainMap.zero(Yx, prod_Ms.complex)
    )
    m_prev_comps = {c.word: lower_of(part, lower, c, Yx) for c in m_prev.coords}
    m_prev_map = m_prev.induce(Yx, m_prev_comps)
    # grid pullbacks
    Q = pullback(psi, forget_prod)
    N = pullback(_as_map(m_prev.forget, src_prod), Q.to_x)
    P = pullback(Q.to_y, big_m)
    fac = factor_we_fib(psi)
    F1, iota, psi_fib = fac.middle, fac.we, fac.fib
    F2 = pullback(psi_fib, forget_prod)
    F3 = pullback(F2.to_y, big_m)
    gamma = F2.factor(iota.compose(Q.to_x), Q.to_y)
    eta = Q.factor(sigma_below, rho)
    return StageGrid(
        part=part, x=x, k=k, pointed=pointed, coords_k=coords_k,
        prod_Ys=prod_Ys, prod_Ms=prod_Ms, matchings=matchings, big_m=big_m,
        forget_prod=forget_prod, psi=psi, src_prod=src_prod, tgt_prod=tgt_prod,
        m_prev=m_prev, Q=Q, N=N, P=P, F1=F1, iota=iota, psi_fib=psi_fib,
        F2=F2, F3=F3, gamma=gamma, eta=eta, m_prev_map=m_prev_map,
        sigma_below=sigma_below,
    )


def _block_map(src: Product, dst: Product, comps: list[ChainMap]) -> ChainMap:
    """Coordinatewise map between products with matching factor lists."""
    if not comps:
        return ChainMap.zero(src.complex, dst.complex)
    out = None
    for i, f in enumerate(comps):
        piece = dst.inclusions[i].compose(f).compose(src.projections[i])
        out = piece if out is None else out + piece
    return out


def _as_map(f: ChainMap, prod_to: Product) -> ChainMap:
    return ChainMap.build(f.src, prod_to.complex, dict(f.mats))


# -- the total operation -------------------------------------------------------


def total_operation(grid: StageGrid, sigma_k: dict[tuple, ChainMap],
                    check_defined: bool = True, seed: int = 0,
                    want_value_set: bool = True) -> ObstructionReport:
    """Decide vanishing of the total (pointed) operation at this stage.

    `sigma_k` assigns each degree-k coordinate morphism its chosen
    representative.  Vanishing is decided by one exact linear system in
    the unknowns (kappa, homotopy witness); the admissible value classes
    are reported as base-plus-generators in [Y(x), F2].
    """
    part, lat = grid.part, grid.part.lattice
    Yx = grid.eta.src
    ring = Yx.ring
    if check_defined:
        for g in grid.coords_k:
            sg = sigma_k[g.word]
            for c in grid.matchings[g.dst].coords:
                comp = lat.compose(c, g)
                target = lower_of_from_grid(grid, comp, Yx)
                if find_homotopy(part.map_of(c).compose(sg), target) is None:
                    raise DiagramError(
                        f"stage ({grid.x},{grid.k}): composite along {c.word} after "
                        f"{g.word} is not homotopic to the lower choice; "
                        "operation undefined"
                    )
    sigma_stack = (
        grid.prod_Ys.tuple_map([sigma_k[g.word] for g in grid.coords_k])
        if grid.coords_k
        else ChainMap.zero(Yx, grid.prod_Ys.complex)
    )
    gamma_eta = grid.gamma.compose(grid.eta)

    sysv = ChainSystem(ring)
    sysv.add_map_var("kappa", Yx, grid.F3.complex)
    sysv.add_homotopy_var("h", Yx, grid.F2.complex)
    sysv.add_equation(
        Yx, grid.prod_Ys.complex, 0,
        [ChainSystem.term("kappa", post=grid.F3.to_y)], sigma_stack,
    )
    sysv.add_equation(
        Yx, grid.F2.complex, 0,
        [
            ChainSystem.term("kappa", post=grid.F3.to_x),
            ChainSystem.term_d_after("h", grid.F2.complex, coeff=-1),
            ChainSystem.term_d_before("h", Yx, coeff=-1),
        ],
        gamma_eta,
    )
    from .exact_linalg import kernel_basis, smith_normal_form

    mat, rhs, layout = sysv.assemble()
    snf = smith_normal_form(mat)
    vec = solve(mat, rhs, snf)

    value_set = None
    theta = None
    if want_value_set:
        value_set, theta = _value_set(grid, sigma_stack, gamma_eta)
        if value_set is not None:
            if value_set.contains_null() != (vec is not None):
                raise AssertionError(
                    "value-set membership disagrees with the vanishing system"
                )

    if vec is None:
        return ObstructionReport(
            x=grid.x, k=grid.k, pointed=grid.pointed, verdict="obstructed",
            target=grid.F2.complex, theta=theta, value_set=value_set,
        )

    if seed:
        import random as _random

        kern = kernel_basis(mat, snf)
        if kern.cols:
            rng = _random.Random(seed)
            coeffs = [[rng.randint(0, 1)] for _ in range(kern.cols)]
            vec = vec + (kern @ ExactMatrix.from_rows(ring, coeffs))
    sol = sysv._extract(vec, layout)
    kappa = ChainMap.build(Yx, grid.F3.complex, sol["kappa"])
    wit = ChainHomotopy(
        grid.F3.to_x.compose(kappa), gamma_eta,
        {n: m for n, m in sol["h"].items() if m.rows and m.cols},
    )
    wit.validate()
    # make mu kappa' = gamma eta exact, then induce alpha into P
    kappa2, _ = _rectify_kappa(grid, kappa, gamma_eta, wit)
    alpha = grid.P.factor(grid.eta, grid.F3.to_y.compose(kappa2))
    new_sigma = {}
    for i, g in enumerate(grid.coords_k):
        new_sigma[g.word] = grid.prod_Ys.projections[i].compose(
            grid.F3.to_y.compose(kappa2)
        )
    return ObstructionReport(
        x=grid.x, k=grid.k, pointed=grid.pointed, verdict="vanishes",
        target=grid.F2.complex,
        theta=grid.F3.to_x.compose(kappa2),
        value_set=value_set,
        kappa=kappa2, alpha=alpha, new_sigma=new_sigma,
    )


def lower_of_from_grid(grid: StageGrid, m: Morphism, src: ChainComplex) -> ChainMap:
    if grid.pointed and m.in_ideal:
        return ChainMap.zero(src, grid.part.value(m.dst))
    # reconstruct from sigma_below coordinates
    src_coords = degree_slice_coords(grid.part.lattice, grid.x, 0, grid.k - 1, grid.pointed)
    for i, c in enumerate(src_coords):
        if c.word == m.word and c.dst == m.dst:
            return grid.src_prod.projections[i].compose(grid.sigma_below)
    raise KeyError(f"{m} not in the lower truncation")


def _rectify_kappa(grid: StageGrid, kappa: ChainMap, gamma_eta: ChainMap,
                   wit: ChainHomotopy):
    mu = grid.F3.to_x
    flipped = ChainHomotopy(
        gamma_eta, mu.compose(kappa), {n: m.scale(-1) for n, m in wit.s.items()}
    )
    kappa2, _ = rectify_along_fibration(gamma_eta, kappa, mu, flipped)
    return kappa2, None


def _value_set(grid: StageGrid, sigma_stack: ChainMap, gamma_eta: ChainMap):
    """Admissible theta = mu kappa classes: r' kappa = sigma exactly and
    q mu kappa homotopic to iota sigma_below."""
    Yx = gamma_eta.src
    ring = Yx.ring
    sysa = ChainSystem(ring)
    sysa.add_map_var("kappa", Yx, grid.F3.complex)
    sysa.add_homotopy_var("h1", Yx, grid.F1)
    sysa.add_equation(
        Yx, grid.prod_Ys.complex, 0,
        [ChainSystem.term("kappa", post=grid.F3.to_y)], sigma_stack,
    )
    q_mu = grid.F2.to_x.compose(grid.F3.to_x)
    sysa.add_equation(
        Yx, grid.F1, 0,
        [
            ChainSystem.term("kappa", post=q_mu),
            ChainSystem.term_d_after("h1", grid.F1, coeff=-1),
            ChainSystem.term_d_before("h1", Yx, coeff=-1),
        ],
        grid.iota.compose(grid.sigma_below),
    )
    got = sysa.solve_with_kernel()
    if got is None:
        return None, None
    particular, gens = got
    mu = grid.F3.to_x
    theta0 = mu.compose(ChainMap.build(Yx, grid.F3.complex, particular["kappa"]))
    ambient = homotopy_classes(Yx, grid.F2.complex)
    base = ambient.class_of(theta0)
    gen_classes = []
    for g in gens:
        km = ChainMap(Yx, grid.F3.complex,
                      {n: m for n, m in g["kappa"].items() if m.rows and m.cols})
        if not km.is_chain_map():
            continue
        cls = ambient.class_of(mu.compose(km))
        if any(cls):
            gen_classes.append(cls)
    null_class = ambient.class_of(gamma_eta)
    vs = ValueSet(ambient, base, tuple(sorted(set(gen_classes))), null_class)
    return vs, theta0


# -- extension assembly ---------------------------------------------------------


def extend_with(grid: StageGrid, report: ObstructionReport,
                lower: dict[tuple, ChainMap]) -> dict[tuple, ChainMap]:
    """New lower truncation including the degree-k choices; validates
    strict commutativity of every composite through the new maps."""
    if not report.vanishes:
        raise DiagramError("cannot extend an obstructed stage")
    out = dict(lower)
    lat = grid.part.lattice
    Yx = grid.eta.src
    for g in grid.coords_k:
        new_map = report.new_sigma[g.word]
        out[g.word] = new_map
        for c in grid.matchings[g.dst].coords:
            comp = lat.compose(c, g)
            expect = lower_of(grid.part, lower, comp, Yx)
            got = grid.part.map_of(c).compose(new_map)
            if not got.equal(expect):
                raise AssertionError(
                    f"extension is not strictly functorial along {c.word} after {g.word}"
                )
    return out


# -- base cases and the full driver ---------------------------------------------


def lift_base(ho: HoDiagram, transports: dict[str, ChainMap], x: str,
              pointed: bool) -> dict[tuple, ChainMap]:
    """k = 0: any choice of representatives works (no compositions);
    ideal morphisms are sent to zero in the pointed case."""
    lat = ho.lattice
    out: dict[tuple, ChainMap] = {}
    for m in degree_slice_coords(lat, x, 0, 0, pointed):
        out[m.word] = transports[m.dst].compose(ho.rep_of(m))
    return out


def extend_degree_one(part: DiagramPart, ho: HoDiagram,
                      transports: dict[str, ChainMap], x: str,
                      lower: dict[tuple, ChainMap], pointed: bool) -> dict[tuple, ChainMap]:
    """k = 1: produce strict choices for x -> (degree 1) by the homotopy
    pullback property applied to the matching square."""
    lat = part.lattice
    Yx = ho.objects[x]
    ring = Yx.ring
    coords1 = degree_slice_coords(lat, x, 1, 1, pointed)
    if not coords1:
        return dict(lower)
    psi, src_prod, tgt_prod, tgt_index = generalized_diagonal(part, x, 1, pointed)
    src_coords = degree_slice_coords(lat, x, 0, 0, pointed)
    prod_Ys = product([part.value(g.dst) for g in coords1], ring=ring)
    # right leg: stacked sigma^s_{<1} (coordinatewise maps to degree 0)
    right = _right_leg(part, tgt_prod, tgt_index, prod_Ys, coords1)
    if src_coords:
        m0 = src_prod.tuple_map([lower_of(part, lower, m, Yx) for m in src_coords])
    else:
        m0 = ChainMap.zero(Yx, src_prod.complex)
    sigma1 = prod_Ys.tuple_map(
        [transports[g.dst].compose(ho.rep_of(g)) for g in coords1]
    )
    # homotopy between the two composites into the target product
    smats: dict[int, ExactMatrix] = {}
    psi_m0 = psi.compose(m0)
    right_sigma = right.compose(sigma1)
    H = find_homotopy(psi_m0, right_sigma)
    if H is None:
        raise DiagramError(
            f"object {x}: degree-one truncation is not homotopy-commutative"
        )
    square = pullback(psi, right)
    gmap, _wit = _hpl(square, m0, sigma1, H)
    out = dict(lower)
    for i, g in enumerate(coords1):
        out[g.word] = prod_Ys.projections[i].compose(square.to_y.compose(gmap))
    return out


def _right_leg(part: DiagramPart, tgt_prod: Product, tgt_index, prod_Ys: Product,
               coords_k) -> ChainMap:
    """prod sigma^s_{<k} : prod Y(s) -> target product, routing the
    (g, f) coordinate through Y(f)."""
    ring = prod_Ys.complex.ring
    out = None
    pos = {(g.word, g.dst): i for i, g in enumerate(coords_k)}
    for idx, (g, f) in enumerate(tgt_index):
        piece = tgt_prod.inclusions[idx].compose(
            part.map_of(f).compose(prod_Ys.projections[pos[(g.word, g.dst)]])
        )
        out = piece if out is None else out + piece
    if out is None:
        out = ChainMap.zero(prod_Ys.complex, tgt_prod.complex)
    return out


def _hpl(square: Pullback, p: ChainMap, f: ChainMap, H):
    from .model import homotopy_pullback_lift

    return homotopy_pullback_lift(square, p, f, H)


@dataclass
class StageRecord:
    x: str
    k: int
    report: ObstructionReport
    separated: list | None = None


@dataclass
class RectifyResult:
    status: str                           # "rectified" | "obstructed"
    part: DiagramPart | None
    transports: dict[str, ChainMap]
    stages: list[StageRecord]
    obstruction: ObstructionReport | None = None

    @property
    def rectified(self) -> bool:
        return self.status == "rectified"


def rectify(ho: HoDiagram, pointed: bool | None = None, separate: bool = False,
            seed: int = 0, check: bool = True, value_sets: bool = True) -> RectifyResult:
    """Run the double induction.  On success the result carries a strict
    (pointed) Reedy fibrant diagram together with objectwise weak
    equivalences from the input objects; on obstruction, the first
    failing stage and its report."""
    pointed = ho.pointed if pointed is None else pointed
    if pointed and not ho.lattice.pointed:
        raise DiagramError("pointed rectification needs a pointed shape")
    ho = HoDiagram(ho.lattice, ho.objects, dict(ho.reps), pointed)
    ho.normalize()
    if check:
        ho.validate()
    lat = ho.lattice
    stages: list[StageRecord] = []
    transports = {t: ChainMap.identity(ho.objects[t]) for t in lat.objects_of_degree(0)}
    part = DiagramPart(
        lat, {t: ho.objects[t] for t in lat.objects_of_degree(0)}, {}, pointed
    )
    maxdeg = lat.max_degree()
    for n in range(maxdeg):
        level_outputs = {}
        for x in lat.objects_of_degree(n + 1):
            lower = lift_base(ho, transports, x, pointed)
            if n >= 1:
                lower = extend_degree_one(part, ho, transports, x, lower, pointed)
            for k in range(2, n + 1):
                Yx = ho.objects[x]
                grid = stage_grid(part, x, k, Yx, lower, pointed)
                sigma_k = {
                    g.word: transports[g.dst].compose(ho.rep_of(g))
                    for g in grid.coords_k
                }
                if separate:
                    from .separation import separate_total

                    sep_reports, report = separate_total(grid, sigma_k, seed=seed)
                else:
                    sep_reports = None
                    report = total_operation(
                        grid, sigma_k, seed=seed, want_value_set=value_sets
                    )
                stages.append(StageRecord(x, k, report, sep_reports))
                if not report.vanishes:
                    return RectifyResult("obstructed", None, transports, stages, report)
                lower = extend_with(grid, report, lower)
            level_outputs[x] = lower
        # assemble the next level
        new_objects = dict(part.objects)
        new_gens = dict(part.gen_maps)
        for x, lower in level_outputs.items():
            new_objects[x] = ho.objects[x]
            transports[x] = ChainMap.identity(ho.objects[x])
            for a in lat.arrows:
                if a.src != x:
                    continue
                gen = lat.canonical((a.label,))
                if pointed and gen.in_ideal:
                    new_gens[a.label] = ChainMap.zero(new_objects[x], new_objects[a.dst])
                else:
                    new_gens[a.label] = lower[gen.word]
        part = DiagramPart(lat, new_objects, new_gens, pointed)
        part.validate_strict()
        if n + 1 < maxdeg:
            rep = reedy_fibrant_replacement(part, pointed)
            part = rep.part
            transports = {
                t: rep.equivalences[t].compose(transports[t]) for t in transports
            }
    return RectifyResult("rectified", part, transports, stages)


def verify_rectification(ho: HoDiagram, result: RectifyResult) -> bool:
    """The output diagram strictly commutes and every generator map is
    homotopic to the transported input representative."""
    if not result.rectified:
        return False
    result.part.validate_strict()
    for a in ho.lattice.arrows:
        gen = ho.lattice.canonical((a.label,))
        old = ho.rep_of(gen)
        if result.part.pointed and gen.in_ideal:
            old_t = result.transports[a.dst].compose(old)
            if find_homotopy(old_t, ChainMap.zero(old_t.src, old_t.dst)) is None:
                return False
            continue
        lhs = result.part.map_of(gen).compose(result.transports[a.src])
        rhs = result.transports[a.dst].compose(old)
        if find_homotopy(lhs, rhs) is None:
            return False
    return True


def delta_rectify(ho: HoDiagram, seed: int = 0, separate: bool = False) -> RectifyResult:
    """Driver for truncated face-map diagrams (unpointed); refuses
    truncations deeper than 3."""
    if ho.lattice.max_degree() > 3:
        raise DiagramError("face-map rectification is implemented for n <= 3")
    return rectify(ho, pointed=False, separate=separate, seed=seed)
