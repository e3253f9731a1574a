"""The double-induction rectifier: base cases, stage grids, total
operations against the independent oracle, and end-to-end runs."""

import random

import pytest

from hhops.complexes import ChainComplex, ChainMap
from hhops.exact_linalg import ExactMatrix
from hhops.homotopy import find_homotopy
from hhops.index_cat import branching_lattice, delta_truncated, massey_shape, toda_chain
from hhops.matching import DiagramPart, degree_slice_coords, is_reedy_fibrant, reedy_fibrant_replacement
from hhops.oracle import vanish_oracle
from hhops.rectifier import (
    DiagramError,
    HoDiagram,
    delta_rectify,
    rectify,
    stage_grid,
    strict_to_ho,
    total_operation,
    verify_rectification,
)
from hhops.rings import GF, ZZ

from helpers import perturb_within_class, random_homotopy_blocks
from test_matching import free_diagram


def perturbed_ho(part, rng):
    """Reingest a strict diagram with every generator rep moved inside
    its homotopy class by a random boundary."""
    ho = strict_to_ho(part)
    reps = {}
    for lbl, f in ho.reps.items():
        gen = part.lattice.canonical((lbl,))
        if part.pointed and gen.in_ideal:
            reps[lbl] = f
        else:
            reps[lbl] = perturb_within_class(f, rng)
    return HoDiagram(part.lattice, ho.objects, reps, part.pointed)


# -- end-to-end: strict and perturbed inputs rectify -------------------------


@pytest.mark.parametrize("ring_token", ["f2", "f3", "z"])
@pytest.mark.parametrize("shape", ["toda3", "delta2", "branching", "massey"])
def test_strict_inputs_rectify(ring_token, shape):
    ring = {"f2": GF(2), "f3": GF(3), "z": ZZ}[ring_token]
    lat = {
        "toda3": toda_chain(3),
        "delta2": delta_truncated(2),
        "branching": branching_lattice(),
        "massey": massey_shape(),
    }[shape]
    part = free_diagram(lat, ring, rng=random.Random(41))
    ho = strict_to_ho(part)
    result = rectify(ho)
    assert result.rectified
    assert verify_rectification(ho, result)


@pytest.mark.parametrize("shape", ["toda3", "toda4", "delta2", "delta3", "branching"])
def test_perturbed_inputs_rectify(shape):
    lat = {
        "toda3": toda_chain(3),
        "toda4": toda_chain(4),
        "delta2": delta_truncated(2),
        "delta3": delta_truncated(3),
        "branching": branching_lattice(),
    }[shape]
    rng = random.Random(42)
    ring = GF(2)
    part = free_diagram(lat, ring, rng=rng)
    ho = perturbed_ho(part, rng)
    result = rectify(ho)
    assert result.rectified
    assert verify_rectification(ho, result)


def test_obstructed_never_for_strict_many_seeds():
    for seed in range(5):
        rng = random.Random(seed)
        part = free_diagram(branching_lattice(), GF(3), rng=rng)
        result = rectify(strict_to_ho(part))
        assert result.rectified


def test_pointed_output_kills_ideals():
    part = free_diagram(toda_chain(3), GF(2), rng=random.Random(2))
    result = rectify(strict_to_ho(part))
    assert result.rectified
    lat = part.lattice
    out = result.part
    for x in lat.object_names():
        for m in lat.nonidentity_from(x):
            if m.in_ideal:
                assert out.map_of(m).is_zero()


def test_delta_rectify_depth_guard():
    lat = delta_truncated(2)
    part = free_diagram(lat, GF(2))
    res = delta_rectify(strict_to_ho(part))
    assert res.rectified
    with pytest.raises(DiagramError):
        delta_rectify(strict_to_ho(free_diagram(delta_truncated(4), GF(2))))


# -- stage-level: total operation vs the independent oracle -------------------


def stage_instance(lat, ring, seed, pointed=None, perturb_lower=True):
    """A fibrant stage instance at the top object and k = top-1, with
    the lower truncation perturbed within its classes."""
    rng = random.Random(seed)
    part0 = free_diagram(lat, ring, rng=rng)
    pointed = part0.pointed if pointed is None else pointed
    rep = reedy_fibrant_replacement(part0, pointed)
    part = rep.part
    x = max(part.objects, key=lambda t: lat.degree(t))
    n = lat.degree(x)
    k = n - 1
    if k < 2:
        return None
    Yx = part.value(x)
    # frozen lower truncation and top classes from the strict diagram
    lower = {}
    for m in degree_slice_coords(lat, x, 0, k - 1, pointed):
        lower[m.word] = part.map_of(m)
    sigma = {}
    for g in degree_slice_coords(lat, x, k, k, pointed):
        sigma[g.word] = part.map_of(g)
    if perturb_lower:
        for w in list(lower):
            lower[w] = perturb_within_class(lower[w], rng)
        for w in list(sigma):
            sigma[w] = perturb_within_class(sigma[w], rng)
        # strictness of the lower part itself must be restored: lower
        # choices must still compose correctly among themselves
        lower = _restrict_lower(lat, part, x, k, Yx, lower, pointed, rng)
        if lower is None:
            return None
    level = part.restricted_objects([t for t in part.objects if lat.degree(t) <= k])
    return level, x, k, Yx, lower, sigma


def _restrict_lower(lat, part, x, k, Yx, lower, pointed, rng):
    """Fix up a perturbed lower truncation so it strictly commutes:
    keep the degree <= k-2 choices, then re-solve each degree-(k-1)
    choice so its own composites are strict (if possible)."""
    from hhops.rectifier import lower_of

    for m in degree_slice_coords(lat, x, 0, k - 1, pointed):
        deg = lat.degree(m.dst)
        if deg == 0:
            continue
        f = lower[m.word]
        ok = True
        for h in lat.nonidentity_from(m.dst):
            if pointed and h.in_ideal:
                continue
            if not part.has_object(h.dst):
                ok = False
                break
            comp = lat.compose(h, m)
            want = (
                ChainMap.zero(Yx, part.value(comp.dst))
                if (pointed and comp.in_ideal)
                else lower[comp.word]
            )
            if not part.map_of(h).compose(f).equal(want):
                ok = False
                break
        if not ok:
            return None
    return lower


def test_total_operation_strict_vanishes():
    for lat in (toda_chain(3), branching_lattice(), massey_shape()):
        ring = GF(2)
        got = stage_instance(lat, ring, seed=7, perturb_lower=False)
        if got is None:
            continue
        level, x, k, Yx, lower, sigma = got
        grid = stage_grid(level, x, k, Yx, lower, level.pointed)
        report = total_operation(grid, sigma)
        assert report.vanishes
        assert vanish_oracle(level, x, k, Yx, lower, sigma, level.pointed)


def test_total_operation_agrees_with_oracle_randomized():
    agree = 0
    obstructed_seen = 0
    vanish_seen = 0
    for shape_name, lat in (
        ("toda3", toda_chain(3)),
        ("branching", branching_lattice()),
        ("delta3", delta_truncated(3)),
    ):
        for ring in (GF(2), GF(3)):
            for seed in range(6):
                got = stage_instance(lat, ring, seed=seed)
                if got is None:
                    continue
                level, x, k, Yx, lower, sigma = got
                grid = stage_grid(level, x, k, Yx, lower, level.pointed)
                try:
                    report = total_operation(grid, sigma)
                except DiagramError:
                    continue
                expected = vanish_oracle(level, x, k, Yx, lower, sigma, level.pointed)
                assert report.vanishes == expected, (shape_name, ring, seed)
                agree += 1
                if report.vanishes:
                    vanish_seen += 1
                else:
                    obstructed_seen += 1
    assert agree >= 10


def test_extension_after_vanishing_is_strict():
    from hhops.rectifier import extend_with

    got = stage_instance(branching_lattice(), GF(2), seed=3, perturb_lower=False)
    assert got is not None
    level, x, k, Yx, lower, sigma = got
    grid = stage_grid(level, x, k, Yx, lower, level.pointed)
    report = total_operation(grid, sigma)
    assert report.vanishes
    new_lower = extend_with(grid, report, lower)
    # the new maps stay in the prescribed homotopy classes
    for g in grid.coords_k:
        assert find_homotopy(new_lower[g.word], sigma[g.word]) is not None


def test_rectify_reports_obstruction_stage():
    # an artificial obstructed instance: toda chain of operators with a
    # nonvanishing triple product (built in the bracket tests) is
    # exercised there; here check the obstructed path wiring on a
    # manufactured non-commutative class assignment
    lat = branching_lattice()
    ring = GF(2)
    part = free_diagram(lat, ring, rng=random.Random(9))
    ho = strict_to_ho(part)
    # sabotage one top-level class: x -> s factors are forced to clash
    s0 = ChainComplex.sphere(ring, 0)
    with pytest.raises(DiagramError):
        bad = HoDiagram(
            lat, ho.objects,
            {**ho.reps, "xa": perturb_within_class(ho.reps["xa"], random.Random(1)) +
             _nontrivial_cycle_map(ho.objects["x"], ho.objects["a"], ring)},
            ho.pointed,
        )
        rectify(bad)


def _nontrivial_cycle_map(X, A, ring):
    # a chain map X -> A that is not a boundary, if one exists; else zero
    from hhops.homotopy import homotopy_classes

    g = homotopy_classes(X, A)
    for gen in g.generator_maps():
        if not g.is_null(gen):
            return gen
    return ChainMap.zero(X, A)


def test_outer_level_independence():
    # reports for distinct x of the same degree do not depend on order
    lat = delta_truncated(3)
    ring = GF(2)
    part = free_diagram(lat, ring, rng=random.Random(12))
    ho = strict_to_ho(part)
    r1 = rectify(ho)
    r2 = rectify(ho)
    assert r1.rectified and r2.rectified
    assert [s.report.summary() for s in r1.stages] == [s.report.summary() for s in r2.stages]
