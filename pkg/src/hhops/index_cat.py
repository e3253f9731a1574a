"""Finite weak-lattice indexing categories.

A weak lattice is a finite directed category presented by generating
arrows that strictly decrease a degree function, plus explicit relations
between parallel words.  Hom-sets are computed by exhaustive word
enumeration with a union-find congruence closure, which is sound and
complete here because strict degree decrease bounds word length.

Words are tuples of generator labels listed first-applied-first, so
(f, g) means "g after f".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

Word = tuple[str, ...]


@dataclass(frozen=True)
class Arrow:
    src: str
    dst: str
    label: str
    ideal: bool = False


@dataclass(frozen=True)
class Morphism:
    src: str
    dst: str
    word: Word  # canonical representative (shortest, then lexicographic)
    in_ideal: bool

    def is_identity(self) -> bool:
        return not self.word

    def __str__(self) -> str:
        return "id_" + self.src if not self.word else "*".join(reversed(self.word))


class LatticeError(ValueError):
    pass


class WeakLattice:
    """objects: name -> degree; arrows: generating Arrow list;
    relations: pairs of parallel words declared equal;
    ideal_homs: (src, dst) pairs whose whole hom-set lies in the ideal."""

    def __init__(self, objects: dict[str, int], arrows: list[Arrow],
                 relations: list[tuple[Word, Word]] | None = None,
                 ideal_homs: list[tuple[str, str]] | None = None,
                 pointed: bool = False):
        self.objects = dict(objects)
        self.arrows = list(arrows)
        self.relations = [(tuple(a), tuple(b)) for a, b in (relations or [])]
        self.ideal_homs = set(tuple(x) for x in (ideal_homs or []))
        self.pointed = pointed or any(a.ideal for a in arrows) or bool(self.ideal_homs)
        self._by_label = {a.label: a for a in self.arrows}
        self._out: dict[str, list[Arrow]] = {x: [] for x in self.objects}
        for a in self.arrows:
            self._out[a.src].append(a)
        self._hom_cache: dict[tuple[str, str], list[Morphism]] | None = None
        self._canon: dict[Word, Word] | None = None

    # -- basic structure ---------------------------------------------

    def degree(self, x: str) -> int:
        return self.objects[x]

    def arrow(self, label: str) -> Arrow:
        return self._by_label[label]

    def object_names(self) -> list[str]:
        return sorted(self.objects, key=lambda x: (self.objects[x], x))

    def objects_of_degree(self, k: int) -> list[str]:
        return [x for x in self.object_names() if self.objects[x] == k]

    def max_degree(self) -> int:
        return max(self.objects.values()) if self.objects else 0

    def word_endpoints(self, w: Word) -> tuple[str, str]:
        if not w:
            raise LatticeError("empty word has no endpoints without context")
        src = self._by_label[w[0]].src
        cur = src
        for lbl in w:
            a = self._by_label[lbl]
            if a.src != cur:
                raise LatticeError(f"word {w} is not composable at {lbl}")
            cur = a.dst
        return src, cur

    # -- word enumeration and congruence closure ----------------------

    def _all_words(self) -> dict[tuple[str, str], list[Word]]:
        """Every composable nonempty word, grouped by endpoints."""
        out: dict[tuple[str, str], list[Word]] = {}
        frontier: list[tuple[str, str, Word]] = [
            (a.src, a.dst, (a.label,)) for a in self.arrows
        ]
        while frontier:
            new_frontier = []
            for src, dst, w in frontier:
                out.setdefault((src, dst), []).append(w)
                for a in self._out.get(dst, ()):
                    new_frontier.append((src, a.dst, w + (a.label,)))
            frontier = new_frontier
        return out

    def _closure(self) -> dict[Word, Word]:
        """Map every word to its canonical representative."""
        if self._canon is not None:
            return self._canon
        groups = self._all_words()
        words = [w for ws in groups.values() for w in ws]
        parent: dict[Word, Word] = {w: w for w in words}

        def find(w: Word) -> Word:
            root = w
            while parent[root] != root:
                root = parent[root]
            while parent[w] != root:
                parent[w], w = root, parent[w]
            return root

        def union(a: Word, b: Word) -> bool:
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            # prefer shortest-then-lex canonical representative
            keep, drop = sorted([ra, rb], key=lambda w: (len(w), w))
            parent[drop] = keep
            return True

        for a, b in self.relations:
            if a not in parent or b not in parent:
                raise LatticeError(f"relation mentions a non-composable word: {a} = {b}")
            if self.word_endpoints(a) != self.word_endpoints(b):
                raise LatticeError(f"relation between non-parallel words: {a} = {b}")
            union(a, b)

        changed = True
        while changed:
            changed = False
            # congruence: w ~ w' implies u w v ~ u w' v; it suffices to
            # close under single-generator extension on both sides
            roots: dict[Word, list[Word]] = {}
            for w in words:
                roots.setdefault(find(w), []).append(w)
            for cls in roots.values():
                if len(cls) < 2:
                    continue
                rep = cls[0]
                _, dst = self.word_endpoints(rep)
                src, _ = self.word_endpoints(rep)
                for other in cls[1:]:
                    for a in self._out.get(dst, ()):
                        if union(rep + (a.label,), other + (a.label,)):
                            changed = True
                    for b in self.arrows:
                        if b.dst == src:
                            if union((b.label,) + rep, (b.label,) + other):
                                changed = True
        self._canon = {w: find(w) for w in words}
        return self._canon

    def _ideal_words(self) -> set[Word]:
        """Canonical words whose class touches an ideal generator or an
        ideal_homs pair; closed under the absorption property by
        construction."""
        canon = self._closure()
        ideal: set[Word] = set()
        for w, rep in canon.items():
            if any(self._by_label[lbl].ideal for lbl in w):
                ideal.add(rep)
            src, dst = self.word_endpoints(w)
            if (src, dst) in self.ideal_homs:
                ideal.add(rep)
        # absorption: any composite through an ideal word is ideal
        changed = True
        while changed:
            changed = False
            for w, rep in canon.items():
                if rep in ideal:
                    continue
                for cut in range(1, len(w)):
                    left, right = w[:cut], w[cut:]
                    if canon.get(left) in ideal or canon.get(right) in ideal:
                        ideal.add(rep)
                        changed = True
                        break
        return ideal

    # -- public interface ---------------------------------------------

    def hom(self, x: str, t: str) -> list[Morphism]:
        """All morphisms x -> t (including the identity when x == t)."""
        if self._hom_cache is None:
            canon = self._closure()
            ideal = self._ideal_words()
            cache: dict[tuple[str, str], list[Morphism]] = {}
            seen: dict[tuple[str, str], set[Word]] = {}
            for w, rep in sorted(canon.items(), key=lambda kv: (len(kv[0]), kv[0])):
                if w != rep:
                    continue
                src, dst = self.word_endpoints(w)
                if rep not in seen.setdefault((src, dst), set()):
                    seen[(src, dst)].add(rep)
                    cache.setdefault((src, dst), []).append(
                        Morphism(src, dst, rep, rep in ideal)
                    )
            for key in cache:
                cache[key].sort(key=lambda m: (len(m.word), m.word))
            self._hom_cache = cache
        if x == t:
            return [Morphism(x, x, (), False)] + self._hom_cache.get((x, t), [])
        return list(self._hom_cache.get((x, t), []))

    def canonical(self, word: Word) -> Morphism:
        """The morphism represented by a composable word."""
        if not word:
            raise LatticeError("identity words need explicit endpoints; use hom")
        src, dst = self.word_endpoints(word)
        rep = self._closure()[tuple(word)]
        for m in self.hom(src, dst):
            if m.word == rep:
                return m
        raise AssertionError("canonical form missing from hom-set")

    def compose(self, second: Morphism, first: Morphism) -> Morphism:
        """second after first."""
        if first.dst != second.src:
            raise LatticeError("morphisms not composable")
        if first.is_identity():
            return second
        if second.is_identity():
            return first
        return self.canonical(first.word + second.word)

    def nonidentity_from(self, x: str) -> list[Morphism]:
        out = []
        for t in self.object_names():
            if t != x:
                out.extend(self.hom(x, t))
        return out

    # -- validation -----------------------------------------------------

    def validate(self) -> list[str]:
        """Structural diagnostics; empty list means valid."""
        problems = []
        for a in self.arrows:
            if a.src not in self.objects or a.dst not in self.objects:
                problems.append(f"arrow {a.label} has unknown endpoint")
                continue
            if self.objects[a.dst] >= self.objects[a.src]:
                problems.append(
                    f"degree: arrow {a.label} does not strictly decrease degree"
                )
        if self.objects:
            # connectivity of the underlying undirected graph
            names = self.object_names()
            seen = {names[0]}
            frontier = [names[0]]
            while frontier:
                cur = frontier.pop()
                for a in self.arrows:
                    for nxt in ((a.dst,) if a.src == cur else ()) + (
                        (a.src,) if a.dst == cur else ()
                    ):
                        if nxt not in seen:
                            seen.add(nxt)
                            frontier.append(nxt)
            if seen != set(names):
                problems.append("connectivity: category is not connected")
            # every object reaches degree zero
            for x in names:
                if self.objects[x] == 0:
                    continue
                reach = {x}
                frontier = [x]
                ok = False
                while frontier and not ok:
                    cur = frontier.pop()
                    for a in self._out.get(cur, ()):
                        if self.objects[a.dst] == 0:
                            ok = True
                            break
                        if a.dst not in reach:
                            reach.add(a.dst)
                            frontier.append(a.dst)
                if not ok:
                    problems.append(f"reach: object {x} does not map to degree zero")
        if any("degree" in p for p in problems):
            return problems  # word enumeration may not terminate
        try:
            ideal = self._ideal_words()
            canon = self._closure()
        except LatticeError as e:
            problems.append(str(e))
            return problems
        if self.pointed:
            # absorption is enforced by construction; check the declared
            # generators are consistent with their classes
            for w, rep in canon.items():
                if any(self._by_label[lbl].ideal for lbl in w) and rep not in ideal:
                    problems.append(f"ideal: word {w} lost its ideal marking")
            # identities are never ideal (no zero objects here)
        return problems

    def is_valid(self) -> bool:
        return not self.validate()

    # -- subcategories, comma categories --------------------------------

    def under(self, x: str) -> list[str]:
        """Objects t with hom(x, t) nonempty, including x."""
        out = [x]
        for t in self.object_names():
            if t != x and self.hom(x, t):
                out.append(t)
        return out

    def subcategory_objects(self, x: str | None, k: int) -> list[str]:
        """Objects of the slice: degree <= k objects under x, plus x."""
        if x is None:
            return [t for t in self.object_names() if self.objects[t] <= k]
        if self.objects[x] <= k:
            raise LatticeError("need |x| > k")
        return [x] + [t for t in self.under(x) if t != x and self.objects[t] <= k]

    def boundary_objects(self, x: str, k: int) -> list[str]:
        return [t for t in self.subcategory_objects(x, k) if t != x]

    def comma_objects(self, x: str, k: int) -> list[Morphism]:
        """Morphisms x -> t with |t| <= k: the comma category objects."""
        if self.objects[x] <= k:
            raise LatticeError("need |x| > k")
        out = []
        for t in self.object_names():
            if t != x and self.objects[t] <= k:
                out.extend(self.hom(x, t))
        return out

    def comma_arrows(self, x: str, k: int) -> list[tuple[Morphism, Morphism, Morphism]]:
        """(f, h, f') with f' = h o f, h a non-identity morphism."""
        objs = self.comma_objects(x, k)
        canon_set = {(m.src, m.dst, m.word) for m in objs}
        out = []
        for f in objs:
            for h in self.nonidentity_from(f.dst):
                if self.objects[h.dst] > k:
                    continue
                fp = self.compose(h, f)
                if (fp.src, fp.dst, fp.word) in canon_set:
                    out.append((f, h, fp))
        return out

    def is_fully_reduced(self) -> bool:
        """Every morphism dropping degree by at least 2 lies in the ideal."""
        if not self.pointed:
            raise LatticeError("fully-reduced is a pointed notion")
        for x in self.object_names():
            for m in self.nonidentity_from(x):
                if self.objects[x] - self.objects[m.dst] >= 2 and not m.in_ideal:
                    return False
        return True

    def solid_hom(self, x: str, t: str) -> list[Morphism]:
        return [m for m in self.hom(x, t) if not m.in_ideal]


# -- standard shapes ---------------------------------------------------


def toda_chain(n: int) -> WeakLattice:
    """The decreasing poset n > n-1 > ... > 0, pointed so that exactly
    the composites dropping degree >= 2 are ideal."""
    if n < 1:
        raise ValueError("need n >= 1")
    objects = {str(i): i for i in range(n + 1)}
    arrows = [Arrow(str(i), str(i - 1), f"f{i}") for i in range(n, 0, -1)]
    ideal = [(str(i), str(j)) for i in range(n + 1) for j in range(i - 1) if i - j > 1]
    return WeakLattice(objects, arrows, ideal_homs=ideal, pointed=True)


def delta_truncated(n: int) -> WeakLattice:
    """Objects 0..n with face arrows d_i : m -> m-1 (0 <= i <= m) subject
    to d_i d_j = d_{j-1} d_i for i < j."""
    if n < 1:
        raise ValueError("need n >= 1")
    objects = {str(i): i for i in range(n + 1)}
    arrows = []
    for m in range(1, n + 1):
        for i in range(m + 1):
            arrows.append(Arrow(str(m), str(m - 1), f"d{i}@{m}"))
    relations = []
    for m in range(2, n + 1):
        for j in range(m + 1):
            for i in range(j):
                # word order is first-applied-first: (d_j at m, d_i at m-1)
                lhs = (f"d{j}@{m}", f"d{i}@{m-1}")
                rhs = (f"d{i}@{m}", f"d{j-1}@{m-1}")
                relations.append((lhs, rhs))
    return WeakLattice(objects, arrows, relations=relations)


def massey_shape() -> WeakLattice:
    """The eight-object pointed category for triple products: g above a
    coherence diamond, with the product-killing slots b, e and two
    parallel maps f -> a (one solid, one ideal).

    The two same-degree projection arrows of the motivating picture are
    omitted: they would break strict degree decrease, and their content
    is already forced by the composite relations through f.
    """
    objects = {"g": 3, "f": 2, "b": 1, "c": 1, "d": 1, "e": 1, "a": 0}
    arrows = [
        Arrow("g", "f", "gf"),
        Arrow("g", "c", "gc"),
        Arrow("g", "d", "gd"),
        Arrow("g", "b", "gb", ideal=True),
        Arrow("g", "e", "ge", ideal=True),
        Arrow("f", "b", "fb"),
        Arrow("f", "c", "fc"),
        Arrow("f", "d", "fd"),
        Arrow("f", "e", "fe"),
        Arrow("f", "a", "fa"),
        Arrow("f", "a", "fz", ideal=True),
        Arrow("c", "a", "ca"),
        Arrow("d", "a", "da"),
        Arrow("b", "a", "ba", ideal=True),
        Arrow("e", "a", "ea", ideal=True),
    ]
    relations = [
        (("gf", "fc"), ("gc",)),
        (("gf", "fd"), ("gd",)),
        (("gf", "fb"), ("gb",)),
        (("gf", "fe"), ("ge",)),
        (("fc", "ca"), ("fa",)),
        (("fd", "da"), ("fa",)),
        (("fb", "ba"), ("fz",)),
        (("fe", "ea"), ("fz",)),
    ]
    return WeakLattice(objects, arrows, relations=relations, pointed=True)


def branching_lattice() -> WeakLattice:
    """Eight objects in degrees 3,2,2,1,1,1,0,0 with all squares
    commuting: the standard small unpointed test shape."""
    objects = {"x": 3, "a": 2, "b": 2, "u": 1, "v": 1, "w": 1, "s": 0, "t": 0}
    arrows = [
        Arrow("x", "a", "xa"),
        Arrow("x", "b", "xb"),
        Arrow("a", "u", "au"),
        Arrow("a", "v", "av"),
        Arrow("b", "v", "bv"),
        Arrow("b", "w", "bw"),
        Arrow("u", "s", "us"),
        Arrow("v", "s", "vs"),
        Arrow("v", "t", "vt"),
        Arrow("w", "t", "wt"),
    ]
    relations = [
        (("xa", "av"), ("xb", "bv")),
        (("au", "us"), ("av", "vs")),
        (("bw", "wt"), ("bv", "vt")),
    ]
    return WeakLattice(objects, arrows, relations=relations)
