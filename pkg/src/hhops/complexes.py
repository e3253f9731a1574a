"""Bounded chain complexes of finitely generated free modules, chain
maps, and homotopy witnesses.

Grading and sign conventions (fixed once, used everywhere):
  - d_n : C_n -> C_{n-1}, d_{n-1} @ d_n = 0;
  - shift(k): (C[k])_n = C_{n-k}, differential scaled by (-1)^k;
  - a homotopy s between f and g has components s_n : C_n -> D_{n+1}
    with d s + s d = f - g.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exact_linalg import AbGroupPresentation, ExactMatrix, cokernel_presentation, kernel_basis, smith_normal_form, solve
from .rings import Ring


def _as_grid(ring: Ring, mats: dict[int, ExactMatrix]) -> dict[int, ExactMatrix]:
    return {n: m for n, m in mats.items() if m.rows or m.cols}


@dataclass(frozen=True)
class ChainComplex:
    ring: Ring
    ranks: dict[int, int]
    diffs: dict[int, ExactMatrix]  # diffs[n] : C_n -> C_{n-1}

    @staticmethod
    def build(ring: Ring, ranks: dict[int, int], diffs: dict[int, ExactMatrix] | None = None,
              check: bool = True) -> "ChainComplex":
        ranks = {n: r for n, r in ranks.items() if r > 0}
        diffs = dict(diffs or {})
        full = {}
        for n in sorted(ranks):
            if ranks.get(n) and ranks.get(n - 1):
                m = diffs.get(n)
                if m is None:
                    m = ExactMatrix.zeros(ring, ranks[n - 1], ranks[n])
                full[n] = m
        c = ChainComplex(ring, ranks, full)
        if check:
            c.validate()
        return c

    @staticmethod
    def zero(ring: Ring) -> "ChainComplex":
        return ChainComplex(ring, {}, {})

    @staticmethod
    def sphere(ring: Ring, degree: int = 0, rank: int = 1) -> "ChainComplex":
        """Free module of the given rank concentrated in one degree."""
        return ChainComplex.build(ring, {degree: rank})

    @staticmethod
    def cyclic_cell(ring: Ring, m: int, top: int = 1) -> "ChainComplex":
        """[R --m--> R] in degrees (top, top-1)."""
        return ChainComplex.build(
            ring, {top: 1, top - 1: 1}, {top: ExactMatrix.from_rows(ring, [[m]])}
        )

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def d(self, n: int) -> ExactMatrix:
        m = self.diffs.get(n)
        if m is None:
            return ExactMatrix.zeros(self.ring, self.rank(n - 1), self.rank(n))
        return m

    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def degree_span(self) -> tuple[int, int]:
        degs = self.degrees()
        return (degs[0], degs[-1]) if degs else (0, -1)

    def is_zero(self) -> bool:
        return not self.ranks

    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def validate(self) -> None:
        for n, m in self.diffs.items():
            if m.rows != self.rank(n - 1) or m.cols != self.rank(n):
                raise ValueError(f"differential at degree {n} has shape {m.rows}x{m.cols}")
            if m.ring != self.ring:
                raise ValueError("differential ring mismatch")
        for n in self.degrees():
            if self.rank(n - 2) and self.rank(n):
                if not (self.d(n - 1) @ self.d(n)).is_zero():
                    raise ValueError(f"d@d != 0 at degree {n}")

    def shift(self, k: int) -> "ChainComplex":
        sign = -1 if k % 2 else 1
        ranks = {n + k: r for n, r in self.ranks.items()}
        diffs = {n + k: (m if sign == 1 else m.scale(-1)) for n, m in self.diffs.items()}
        return ChainComplex(self.ring, ranks, diffs)

    def direct_sum(self, other: "ChainComplex") -> "ChainComplex":
        from .exact_linalg import block_diag

        if other.ring != self.ring:
            raise ValueError("ring mismatch")
        ranks = dict(self.ranks)
        for n, r in other.ranks.items():
            ranks[n] = ranks.get(n, 0) + r
        diffs = {}
        for n in set(self.diffs) | set(other.diffs):
            diffs[n] = block_diag(self.ring, [self.d(n), other.d(n)])
        return ChainComplex.build(self.ring, ranks, diffs, check=False)

    def homology(self, n: int) -> AbGroupPresentation:
        """ker d_n / im d_{n+1} as an invariant-factor presentation."""
        k = kernel_basis(self.d(n))
        rels = solve(k, self.d(n + 1))
        if rels is None:  # boundaries are always cycles
            raise AssertionError("boundary not a cycle; corrupt complex")
        return cokernel_presentation(rels)

    def is_acyclic(self) -> bool:
        degs = self.degrees()
        if not degs:
            return True
        return all(self.homology(n).is_trivial() for n in range(degs[0], degs[-1] + 1))

    def summary(self) -> str:
        return " ".join(f"{n}:{self.rank(n)}" for n in self.degrees()) or "0"


@dataclass(frozen=True)
class ChainMap:
    src: ChainComplex
    dst: ChainComplex
    mats: dict[int, ExactMatrix] = field(default_factory=dict)

    @staticmethod
    def build(src: ChainComplex, dst: ChainComplex, mats: dict[int, ExactMatrix],
              check: bool = True) -> "ChainMap":
        mats = {n: m for n, m in mats.items() if m.rows and m.cols}
        f = ChainMap(src, dst, mats)
        if check:
            f.validate()
        return f

    @staticmethod
    def zero(src: ChainComplex, dst: ChainComplex) -> "ChainMap":
        return ChainMap(src, dst, {})

    @staticmethod
    def identity(c: ChainComplex) -> "ChainMap":
        return ChainMap(c, c, {n: ExactMatrix.identity(c.ring, r) for n, r in c.ranks.items()})

    def mat(self, n: int) -> ExactMatrix:
        m = self.mats.get(n)
        if m is None:
            return ExactMatrix.zeros(self.src.ring, self.dst.rank(n), self.src.rank(n))
        return m

    def validate(self) -> None:
        for n, m in self.mats.items():
            if m.rows != self.dst.rank(n) or m.cols != self.src.rank(n):
                raise ValueError(f"component at degree {n} has wrong shape")
        lo1, hi1 = self.src.degree_span()
        for n in range(lo1, hi1 + 1):
            left = self.dst.d(n) @ self.mat(n)
            right = self.mat(n - 1) @ self.src.d(n)
            if left.entries != right.entries:
                raise ValueError(f"does not commute with differentials at degree {n}")

    def is_chain_map(self) -> bool:
        try:
            self.validate()
            return True
        except ValueError:
            return False

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self after first."""
        if first.dst is not self.src and (
            first.dst.ranks != self.src.ranks or first.dst.diffs != self.src.diffs
        ):
            raise ValueError("composition mismatch")
        mats = {}
        for n in first.src.degrees():
            if self.dst.rank(n) and first.src.rank(n):
                mats[n] = self.mat(n) @ first.mat(n)
        return ChainMap(first.src, self.dst, _as_grid(self.src.ring, mats))

    def __add__(self, other: "ChainMap") -> "ChainMap":
        mats = {}
        for n in set(self.mats) | set(other.mats):
            mats[n] = self.mat(n) + other.mat(n)
        return ChainMap(self.src, self.dst, _as_grid(self.src.ring, mats))

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        mats = {}
        for n in set(self.mats) | set(other.mats):
            mats[n] = self.mat(n) - other.mat(n)
        return ChainMap(self.src, self.dst, _as_grid(self.src.ring, mats))

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.src, self.dst, {n: -m for n, m in self.mats.items()})

    def scale(self, c: int) -> "ChainMap":
        return ChainMap(self.src, self.dst,
                        _as_grid(self.src.ring, {n: m.scale(c) for n, m in self.mats.items()}))

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.mats.values())

    def equal(self, other: "ChainMap") -> bool:
        for n in set(self.mats) | set(other.mats):
            if self.mat(n).entries != other.mat(n).entries:
                return False
        return True

    def is_degreewise_surjective(self) -> bool:
        from .exact_linalg import is_surjective

        return all(is_surjective(self.mat(n)) for n in self.dst.degrees())

    def is_degreewise_split_injective(self) -> bool:
        from .exact_linalg import is_split_injective

        return all(is_split_injective(self.mat(n)) for n in self.src.degrees())

    def mapping_cone(self) -> ChainComplex:
        """cone(f)_n = src_{n-1} + dst_n; acyclic iff f is a quasi-iso."""
        from .exact_linalg import block_diag

        ring = self.src.ring
        ranks = {}
        degs = set(self.src.degrees()) | set(self.dst.degrees())
        for n in degs | {n + 1 for n in self.src.degrees()}:
            r = self.src.rank(n - 1) + self.dst.rank(n)
            if r:
                ranks[n] = r
        diffs = {}
        for n in ranks:
            if not ranks.get(n - 1):
                continue
            a = self.src.d(n - 1).scale(-1)
            b = self.mat(n - 1)
            c = ExactMatrix.zeros(ring, self.dst.rank(n - 1), self.src.rank(n - 1))
            dd = self.dst.d(n)
            top = a.hstack(ExactMatrix.zeros(ring, a.rows, dd.cols))
            bot = b.hstack(dd)
            diffs[n] = top.vstack(bot)
        return ChainComplex.build(ring, ranks, diffs)

    def is_quasi_iso(self) -> bool:
        return self.mapping_cone().is_acyclic()


@dataclass(frozen=True)
class ChainHomotopy:
    """Witness s with d s + s d = f - g; components s_n : src_n -> dst_{n+1}."""

    f: ChainMap
    g: ChainMap
    s: dict[int, ExactMatrix]

    def mat(self, n: int) -> ExactMatrix:
        m = self.s.get(n)
        if m is None:
            return ExactMatrix.zeros(self.f.src.ring, self.f.dst.rank(n + 1), self.f.src.rank(n))
        return m

    def validate(self) -> None:
        src, dst = self.f.src, self.f.dst
        for n, m in self.s.items():
            if m.rows != dst.rank(n + 1) or m.cols != src.rank(n):
                raise ValueError(f"homotopy component at degree {n} has wrong shape")
        lo, hi = src.degree_span()
        for n in range(lo, hi + 1):
            lhs = dst.d(n + 1) @ self.mat(n) + self.mat(n - 1) @ src.d(n)
            rhs = self.f.mat(n) - self.g.mat(n)
            if lhs.entries != rhs.entries:
                raise ValueError(f"homotopy identity fails at degree {n}")

    def boundary(self) -> ChainMap:
        """The chain map d s + s d (= f - g)."""
        src, dst = self.f.src, self.f.dst
        mats = {}
        lo, hi = src.degree_span()
        for n in range(lo, hi + 1):
            mats[n] = dst.d(n + 1) @ self.mat(n) + self.mat(n - 1) @ src.d(n)
        return ChainMap(src, dst, _as_grid(src.ring, mats))
