"""Strict diagrams on weak lattices and their (reduced) matching
objects, structure maps, Reedy fibrancy, and fibrant replacement.

A matching object is the limit over the comma category of morphisms
x -> t with |t| <= k, computed degreewise as the kernel of the standard
difference map out of the ambient product.  Limits live on explicit
free bases (deterministic Smith pivoting), so they are ordinary
ChainComplex values with stored projection matrices.

Coordinate order inside every product: (target degree, target name,
canonical word), fixed once so all routing matrices are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import ChainComplex, ChainMap
from .exact_linalg import ExactMatrix, is_surjective, kernel_basis, solve, vstack_all
from .homotopy import find_homotopy
from .index_cat import Morphism, WeakLattice
from .model import Product, WeFibFactorization, factor_we_fib, product


def _coord_key(lattice: WeakLattice, m: Morphism):
    return (lattice.degree(m.dst), m.dst, m.word)


class DiagramPart:
    """A strict functor on (a full subcategory of) a weak lattice:
    chain complexes per object, chain maps per generating arrow; in the
    pointed case every ideal morphism is sent to the zero map."""

    def __init__(self, lattice: WeakLattice, objects: dict[str, ChainComplex],
                 gen_maps: dict[str, ChainMap], pointed: bool = False):
        self.lattice = lattice
        self.objects = dict(objects)
        self.gen_maps = dict(gen_maps)
        self.pointed = pointed
        self._map_cache: dict[tuple[str, str, tuple], ChainMap] = {}
        self._matching_cache: dict = {}

    def has_object(self, name: str) -> bool:
        return name in self.objects

    def value(self, name: str) -> ChainComplex:
        return self.objects[name]

    def map_of(self, m: Morphism) -> ChainMap:
        key = (m.src, m.dst, m.word)
        got = self._map_cache.get(key)
        if got is not None:
            return got
        if m.is_identity():
            out = ChainMap.identity(self.objects[m.src])
        elif self.pointed and m.in_ideal:
            out = ChainMap.zero(self.objects[m.src], self.objects[m.dst])
        else:
            out = None
            cur_src = self.objects[m.src]
            for lbl in m.word:
                nxt = self.gen_maps[lbl]
                out = nxt if out is None else nxt.compose(out)
            assert out is not None
        self._map_cache[key] = out
        return out

    def restricted_objects(self, names: list[str]) -> "DiagramPart":
        objs = {n: self.objects[n] for n in names}
        gens = {}
        for lbl, f in self.gen_maps.items():
            a = self.lattice.arrow(lbl)
            if a.src in objs and a.dst in objs:
                gens[lbl] = f
        return DiagramPart(self.lattice, objs, gens, self.pointed)

    def validate_strict(self) -> None:
        """Functoriality on the nose: all words of each morphism class
        compose to the same map; pointed parts send ideals to zero."""
        lat = self.lattice
        for lbl, f in self.gen_maps.items():
            a = lat.arrow(lbl)
            if f.src.ranks != self.objects[a.src].ranks or f.dst.ranks != self.objects[a.dst].ranks:
                raise ValueError(f"map for arrow {lbl} has wrong endpoints")
            f.validate()
        for x in self.objects:
            for m in lat.nonidentity_from(x):
                if not self.has_object(m.dst):
                    continue
                canon = self.map_of(m)
                for w in _class_words(lat, m):
                    comp = None
                    for l2 in w:
                        nxt = self.gen_maps[l2]
                        comp = nxt if comp is None else nxt.compose(comp)
                    if self.pointed and m.in_ideal:
                        if not comp.is_zero():
                            raise ValueError(
                                f"ideal morphism {m} has a nonzero composite along {w}"
                            )
                    elif not comp.equal(canon):
                        raise ValueError(f"functoriality fails for {m} along {w}")

    def is_strict(self) -> bool:
        try:
            self.validate_strict()
            return True
        except ValueError:
            return False


def _class_words(lat: WeakLattice, m: Morphism):
    canon = lat._closure()
    return [w for w, rep in canon.items() if rep == m.word and lat.word_endpoints(w) == (m.src, m.dst)]


# -- matching objects -----------------------------------------------------


@dataclass(frozen=True)
class MatchingObject:
    x: str
    k: int
    pointed: bool
    coords: tuple[Morphism, ...]
    ambient: Product
    complex: ChainComplex
    forget: ChainMap                       # limit -> ambient product
    _basis: dict[int, ExactMatrix] = field(repr=False, default=None)

    def projection(self, m: Morphism) -> ChainMap:
        for i, c in enumerate(self.coords):
            if c.word == m.word and c.dst == m.dst:
                return self.ambient.projections[i].compose(self.forget)
        raise KeyError(f"{m} is not a coordinate of this matching object")

    def induce(self, src: ChainComplex, components: dict[tuple, ChainMap]) -> ChainMap:
        """Cone into the limit: components keyed by coordinate word."""
        ring = src.ring
        mats = {}
        for n in src.degrees():
            if self.complex.rank(n) == 0:
                stacked_zero = all(
                    components[c.word].mat(n).is_zero() for c in self.coords
                ) if self.coords else True
                if stacked_zero:
                    continue
                raise ValueError("cone does not factor: limit vanishes in degree")
            rows = []
            for c in self.coords:
                rows.extend(components[c.word].mat(n).to_lists())
            stacked = ExactMatrix.from_rows(ring, rows) if rows else ExactMatrix.zeros(
                ring, 0, src.rank(n)
            )
            coeffs = solve(self._basis[n], stacked)
            if coeffs is None:
                raise ValueError("cone components do not satisfy the limit equations")
            mats[n] = coeffs
        return ChainMap.build(src, self.complex, mats)


def matching_object(part: DiagramPart, x: str, k: int,
                    pointed: bool | None = None) -> MatchingObject:
    """The limit over (x | J^x_k); in the pointed case coordinates
    indexed by ideal morphisms are replaced by the zero object."""
    pointed = part.pointed if pointed is None else pointed
    cache_key = (x, k, pointed)
    got = part._matching_cache.get(cache_key)
    if got is not None:
        return got
    lat = part.lattice
    all_coords = sorted(lat.comma_objects(x, k), key=lambda m: _coord_key(lat, m))
    coords = tuple(m for m in all_coords if not (pointed and m.in_ideal))
    ring = next(iter(part.objects.values())).ring if part.objects else None
    factors = [part.value(m.dst) for m in coords]
    amb = product(factors, ring=ring)
    # difference-map rows: one block per comma arrow with usable source
    rows_idx = []
    for (f, h, fp) in lat.comma_arrows(x, k):
        if pointed and f.in_ideal:
            continue
        rows_idx.append((f, h, fp))
    coord_pos = {c.word: i for i, c in enumerate(coords)}
    basis: dict[int, ExactMatrix] = {}
    ranks: dict[int, int] = {}
    degs = amb.complex.degrees()
    for n in degs:
        blocks = []
        for (f, h, fp) in rows_idx:
            tgt = part.value(fp.dst)
            out_r = tgt.rank(n)
            if out_r == 0:
                continue
            row = [[0] * amb.complex.rank(n) for _ in range(out_r)]
            hmap = part.map_of(h).mat(n)
            # Y(h) o proj_f
            pi_f = amb.projections[coord_pos[f.word]].mat(n)
            add = hmap @ pi_f
            for i in range(out_r):
                for j in range(amb.complex.rank(n)):
                    row[i][j] += add.entries[i][j]
            if not (pointed and fp.in_ideal):
                pi_fp = amb.projections[coord_pos[fp.word]].mat(n)
                for i in range(out_r):
                    for j in range(amb.complex.rank(n)):
                        row[i][j] -= pi_fp.entries[i][j]
            blocks.extend(row)
        m = (
            ExactMatrix.from_rows(ring, blocks)
            if blocks
            else ExactMatrix.zeros(ring, 0, amb.complex.rank(n))
        )
        kb = kernel_basis(m)
        basis[n] = kb
        ranks[n] = kb.cols
    diffs = {}
    for n in degs:
        if ranks.get(n) and ranks.get(n - 1):
            image = amb.complex.d(n) @ basis[n]
            coeffs = solve(basis[n - 1], image)
            if coeffs is None:
                raise AssertionError("matching differential not expressible in basis")
            diffs[n] = coeffs
    M = ChainComplex.build(ring, ranks, diffs)
    forget = ChainMap.build(
        M, amb.complex, {n: basis[n] for n in degs if ranks.get(n)}
    )
    out = MatchingObject(x, k, pointed, coords, amb, M, forget, basis)
    part._matching_cache[cache_key] = out
    return out


def matching_map(part: DiagramPart, x: str, k: int,
                 pointed: bool | None = None) -> ChainMap:
    """The canonical map Y(x) -> M^x_k induced by the diagram itself."""
    mo = matching_object(part, x, k, pointed)
    comps = {c.word: part.map_of(c) for c in mo.coords}
    return mo.induce(part.value(x), comps)


# -- generalized diagonal and sigma maps ------------------------------------


def _homs(lat: WeakLattice, x: str, t: str, pointed: bool):
    return lat.solid_hom(x, t) if pointed else lat.hom(x, t)


def degree_slice_coords(lat: WeakLattice, x: str, lo: int, hi: int, pointed: bool):
    """Morphisms x -> t with lo <= |t| <= hi, in canonical coordinate order."""
    out = []
    for t in lat.object_names():
        if t == x:
            continue
        if lo <= lat.degree(t) <= hi:
            out.extend(_homs(lat, x, t, pointed))
    return sorted(out, key=lambda m: _coord_key(lat, m))


def generalized_diagonal(part: DiagramPart, x: str, k: int,
                         pointed: bool | None = None) -> tuple[ChainMap, Product, Product, list]:
    """Psi : prod_{|v|<k} Y(v) -> prod_{|s|=k, g} prod_{|v|<k, f} Y(v),
    routing the (g, f) coordinate from the coordinate of f o g.

    Returns (map, source product, target product, target index) where
    the target index lists (g, f) pairs in coordinate order.
    """
    pointed = part.pointed if pointed is None else pointed
    lat = part.lattice
    ring = next(iter(part.objects.values())).ring
    src_coords = degree_slice_coords(lat, x, 0, k - 1, pointed)
    src_prod = product([part.value(m.dst) for m in src_coords], ring=ring)
    tgt_index: list[tuple[Morphism, Morphism]] = []
    for g in degree_slice_coords(lat, x, k, k, pointed):
        for f in degree_slice_coords(lat, g.dst, 0, k - 1, pointed):
            tgt_index.append((g, f))
    tgt_prod = product([part.value(f.dst) for (_, f) in tgt_index], ring=ring)
    src_pos = {m.word: i for i, m in enumerate(src_coords)}
    mats = {}
    for n in tgt_prod.complex.degrees():
        grid = [[0] * src_prod.complex.rank(n) for _ in range(tgt_prod.complex.rank(n))]
        for idx, (g, f) in enumerate(tgt_index):
            comp = lat.compose(f, g)
            if pointed and comp.in_ideal:
                continue
            j = src_pos[comp.word]
            inc = tgt_prod.inclusions[idx].mat(n)
            pr = src_prod.projections[j].mat(n)
            add = inc @ pr
            for r in range(len(grid)):
                for c in range(len(grid[0])):
                    grid[r][c] += add.entries[r][c]
        if grid and grid[0]:
            mats[n] = ExactMatrix.from_rows(ring, grid)
    psi = ChainMap.build(src_prod.complex, tgt_prod.complex, mats)
    return psi, src_prod, tgt_prod, tgt_index


def sigma_map(part_values, lat: WeakLattice, x: str, lo: int, hi: int,
              rep_of, pointed: bool, ring) -> tuple[ChainMap, Product, list]:
    """Tuple map Y(x) -> prod of targets over coordinates in [lo, hi],
    with components given by rep_of(morphism)."""
    coords = degree_slice_coords(lat, x, lo, hi, pointed)
    prod = product([part_values(m.dst) for m in coords], ring=ring)
    comps = [rep_of(m) for m in coords]
    if not coords:
        src = None
        return None, prod, coords
    out = prod.tuple_map(comps)
    return out, prod, coords


# -- fibrancy and replacement -------------------------------------------------


def is_reedy_fibrant(part: DiagramPart, pointed: bool | None = None) -> bool:
    pointed = part.pointed if pointed is None else pointed
    lat = part.lattice
    for x in part.objects:
        if lat.degree(x) == 0:
            continue
        if not all(part.has_object(t) for t in lat.under(x) if t != x):
            continue
        m = matching_map(part, x, lat.degree(x) - 1, pointed)
        if not m.is_degreewise_surjective():
            return False
    return True


def fibrancy_report(part: DiagramPart, pointed: bool | None = None) -> dict[str, bool]:
    pointed = part.pointed if pointed is None else pointed
    lat = part.lattice
    out = {}
    for x in part.objects:
        if lat.degree(x) == 0:
            continue
        m = matching_map(part, x, lat.degree(x) - 1, pointed)
        out[x] = m.is_degreewise_surjective()
    return out


@dataclass
class Replacement:
    part: DiagramPart
    equivalences: dict[str, ChainMap]  # old Y(x) -> new Y(x), quasi-isos


def reedy_fibrant_replacement(part: DiagramPart, pointed: bool | None = None) -> Replacement:
    """Inductive by degree: factor each canonical map to the (reduced)
    matching object of the already-replaced diagram as an acyclic
    cofibration followed by a fibration; skip the factorization when the
    map is already a fibration so strict inputs stay put."""
    pointed = part.pointed if pointed is None else pointed
    lat = part.lattice
    new_objects: dict[str, ChainComplex] = {}
    new_gens: dict[str, ChainMap] = {}
    iotas: dict[str, ChainMap] = {}
    names = sorted(part.objects, key=lambda x: (lat.degree(x), x))
    for x in names:
        deg = lat.degree(x)
        if deg == 0:
            new_objects[x] = part.value(x)
            iotas[x] = ChainMap.identity(part.value(x))
            continue
        stage = DiagramPart(lat, new_objects, new_gens, pointed)
        mo = matching_object(stage, x, deg - 1, pointed)
        comps = {}
        for c in mo.coords:
            comps[c.word] = iotas[c.dst].compose(part.map_of(c))
        m = mo.induce(part.value(x), comps)
        if m.is_degreewise_surjective():
            new_objects[x] = part.value(x)
            iotas[x] = ChainMap.identity(part.value(x))
            structure = m
        else:
            fac = factor_we_fib(m)
            new_objects[x] = fac.middle
            iotas[x] = fac.we
            structure = fac.fib
        for a in lat.arrows:
            if a.src != x or a.dst not in new_objects:
                continue
            gen = lat.canonical((a.label,))
            if pointed and gen.in_ideal:
                new_gens[a.label] = ChainMap.zero(new_objects[x], new_objects[a.dst])
            else:
                new_gens[a.label] = mo.projection(gen).compose(structure)
    new_part = DiagramPart(lat, new_objects, new_gens, pointed)
    return Replacement(new_part, iotas)


# -- the matching-pullback cross-check ----------------------------------------


def matching_pullback_check(part: DiagramPart, x: str, k: int,
                            pointed: bool | None = None) -> bool:
    """Recompute the matching object as the pullback of the lower-right
    cospan (forget then the generalized diagonal, against the product of
    sigma maps) and verify the two computations are isomorphic via
    mutually inverse maps commuting with all projections."""
    from .model import pullback

    pointed = part.pointed if pointed is None else pointed
    if k <= 0:
        raise ValueError("need k > 0")
    lat = part.lattice
    ring = next(iter(part.objects.values())).ring
    mo = matching_object(part, x, k, pointed)
    mo_prev = matching_object(part, x, k - 1, pointed)
    psi, src_prod, tgt_prod, tgt_index = generalized_diagonal(part, x, k, pointed)
    # right leg: product over (g, s) of sigma^s_{<k}
    top_coords = degree_slice_coords(lat, x, k, k, pointed)
    top_prod = product([part.value(g.dst) for g in top_coords], ring=ring)
    tgt_pos = {(g.word, f.word): i for i, (g, f) in enumerate(tgt_index)}
    right_mats = {}
    for n in tgt_prod.complex.degrees():
        grid = [[0] * top_prod.complex.rank(n) for _ in range(tgt_prod.complex.rank(n))]
        for i, (g, f) in enumerate(tgt_index):
            ymap = part.map_of(f).mat(n)
            inc = tgt_prod.inclusions[i].mat(n)
            pr = top_prod.projections[top_coords.index(g)].mat(n)
            add = inc @ (ymap @ pr)
            for r in range(len(grid)):
                for c in range(len(grid[0])):
                    grid[r][c] += add.entries[r][c]
        if grid and grid[0]:
            right_mats[n] = ExactMatrix.from_rows(ring, grid)
    right = ChainMap.build(top_prod.complex, tgt_prod.complex, right_mats)
    # lower-left leg: forget then Psi (source coordinate orders agree)
    left = psi.compose(_reindex(mo_prev.forget, mo_prev, src_prod))
    pb = pullback(left, right)
    # mutually inverse comparison maps
    to_prev = mo_prev.induce(
        mo.complex, {c.word: mo.projection(c) for c in mo_prev.coords}
    )
    to_top = top_prod.tuple_map([mo.projection(g) for g in top_coords]) if top_coords \
        else ChainMap.zero(mo.complex, top_prod.complex)
    fwd = pb.factor(to_prev, to_top)
    comps = {}
    for c in mo.coords:
        if lat.degree(c.dst) == k:
            comps[c.word] = top_prod.projections[top_coords.index(c)].compose(pb.to_y)
        else:
            comps[c.word] = mo_prev.projection(c).compose(pb.to_x)
    bwd = mo.induce(pb.complex, comps)
    if not bwd.compose(fwd).equal(ChainMap.identity(mo.complex)):
        return False
    if not fwd.compose(bwd).equal(ChainMap.identity(pb.complex)):
        return False
    for c in mo.coords:
        lhs = mo.projection(c)
        rhs = comps[c.word].compose(fwd)
        if not lhs.equal(rhs):
            return False
    return True


def _reindex(f: ChainMap, mo_from: MatchingObject, prod_to: Product) -> ChainMap:
    """View the forget map of a matching object as landing in a product
    built with the same coordinate order."""
    return ChainMap.build(f.src, prod_to.complex, dict(f.mats))
