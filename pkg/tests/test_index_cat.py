"""Weak lattices: validation, hom-set enumeration, comma categories,
ideals, and the standard shape builders."""

from math import comb

import pytest

from hhops.index_cat import (
    Arrow,
    LatticeError,
    WeakLattice,
    branching_lattice,
    delta_truncated,
    massey_shape,
    toda_chain,
)


def test_branching_lattice_valid():
    J = branching_lattice()
    assert J.validate() == []


def test_single_object_valid():
    J = WeakLattice({"pt": 0}, [])
    assert J.validate() == []


def test_degree_violation_reported():
    J = WeakLattice({"x": 1, "y": 1}, [Arrow("x", "y", "f")])
    assert any("degree" in p for p in J.validate())


def test_disconnected_reported():
    J = WeakLattice({"x": 1, "y": 0, "z": 0, "w": 1},
                    [Arrow("x", "y", "f"), Arrow("w", "z", "g")])
    assert any("connectivity" in p for p in J.validate())


def test_hom_sets_branching():
    J = branching_lattice()
    # commutativity collapses all routes to s and t into one morphism each
    assert len(J.hom("x", "s")) == 1
    assert len(J.hom("x", "t")) == 1
    assert len(J.hom("x", "v")) == 1
    assert len(J.hom("x", "u")) == 1
    assert len(J.hom("a", "s")) == 1
    ident = J.hom("x", "x")
    assert len(ident) == 1 and ident[0].is_identity()


def test_hom_set_toda():
    J = toda_chain(3)
    h = J.hom("3", "0")
    assert len(h) == 1
    assert h[0].in_ideal
    h2 = J.hom("3", "2")
    assert len(h2) == 1 and not h2[0].in_ideal


def test_toda_ideal_exactly_gap_two():
    J = toda_chain(3)
    ideal_pairs = set()
    for x in J.object_names():
        for m in J.nonidentity_from(x):
            if m.in_ideal:
                ideal_pairs.add((m.src, m.dst))
    assert ideal_pairs == {("3", "1"), ("3", "0"), ("2", "0")}
    assert J.validate() == []
    assert J.is_fully_reduced()


def test_delta_hom_counts():
    J = delta_truncated(2)
    assert len(J.hom("2", "0")) == 3
    assert len(J.hom("2", "1")) == 3
    assert len(J.hom("1", "0")) == 2
    # canonical representatives are lex-least in each relation class
    words = sorted(m.word for m in J.hom("2", "0"))
    assert words == [("d0@2", "d0@1"), ("d0@2", "d1@1"), ("d1@2", "d1@1")]


def test_delta_hom_counts_match_monotone_injections():
    J = delta_truncated(3)
    for m in range(1, 4):
        for k in range(1, m + 1):
            assert len(J.hom(str(m), str(m - k))) == comb(m + 1, k)
    assert J.validate() == []


def test_massey_shape_structure():
    J = massey_shape()
    assert J.validate() == []
    solid = [m for m in J.nonidentity_from("g") if not m.in_ideal]
    dashed = [m for m in J.nonidentity_from("g") if m.in_ideal]
    assert len(solid) == 4 and len(dashed) == 3
    assert len(J.hom("g", "a")) == 2
    assert len(J.hom("f", "a")) == 2
    assert not J.is_fully_reduced()
    # absorbing: solid composites collapsing onto ideal classes
    gb = J.hom("g", "b")
    assert len(gb) == 1 and gb[0].in_ideal


def test_ideal_absorption_property():
    for J in (toda_chain(4), massey_shape()):
        for x in J.object_names():
            for m in J.nonidentity_from(x):
                for h in J.nonidentity_from(m.dst):
                    comp = J.compose(h, m)
                    if m.in_ideal or h.in_ideal:
                        assert comp.in_ideal


def test_subcategories_branching():
    J = branching_lattice()
    assert J.boundary_objects("x", 0) == ["s", "t"]
    assert set(J.subcategory_objects("x", 2)) == set(J.object_names())
    with pytest.raises(LatticeError):
        J.subcategory_objects("s", 0)


def test_comma_category_branching():
    J = branching_lattice()
    objs0 = J.comma_objects("x", 0)
    assert len(objs0) == 2
    assert J.comma_arrows("x", 0) == []
    objs1 = J.comma_objects("x", 1)
    # one morphism each to u, v, w, s, t
    assert len(objs1) == 5
    arrows = J.comma_arrows("x", 1)
    # triangles: u->s, v->s, v->t, w->t over the respective objects
    assert len(arrows) == 4


def test_comma_category_toda():
    J = toda_chain(3)
    assert len(J.comma_objects("3", 1)) == 2
    arrows = J.comma_arrows("3", 1)
    assert len(arrows) == 1


def test_comma_category_delta():
    J = delta_truncated(4)
    assert len(J.comma_objects("4", 1)) == comb(5, 3) + comb(5, 4)


def test_compose_and_canonical():
    J = delta_truncated(2)
    d2 = J.canonical(("d2@2",))
    d0 = J.canonical(("d0@1",))
    comp = J.compose(d0, d2)
    # the simplicial relation identifies the two factorizations
    assert comp.word == J.canonical(("d0@2", "d1@1")).word
    assert J.canonical(("d2@2", "d0@1")).word == J.canonical(("d0@2", "d1@1")).word


def test_fully_reduced_trivial_single_object():
    J = WeakLattice({"pt": 0}, [], pointed=True)
    assert J.is_fully_reduced()
