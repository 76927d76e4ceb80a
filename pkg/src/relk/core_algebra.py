"""Orders, free modules, exact rational matrices and Bass-Swan triples.

Everything here is immutable.  Matrices hold :class:`fractions.Fraction`
entries and every operation is exact; real matrices are never used, the
rational points being dense in ``GL_n(R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, MiddleMismatch, SingularMatrix, UnsupportedOrder


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass int, Fraction or 'p/q' strings")
    return Fraction(x)


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatch(f"entry table is not {self.rows}x{self.cols}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def of(cls, data: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = tuple(tuple(_frac(x) for x in row) for row in data)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls(n, n, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "RatMatrix":
        z = Fraction(0)
        return cls(rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def scalar(cls, n: int, c) -> "RatMatrix":
        c = _frac(c)
        z = Fraction(0)
        return cls(n, n, tuple(tuple(c if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def block_diag(cls, blocks: Iterable["RatMatrix"]) -> "RatMatrix":
        blocks = list(blocks)
        r = sum(b.rows for b in blocks)
        c = sum(b.cols for b in blocks)
        out = [[Fraction(0)] * c for _ in range(r)]
        i0 = j0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[i0 + i][j0 + j] = b.entries[i][j]
            i0 += b.rows
            j0 += b.cols
        return cls(r, c, tuple(tuple(row) for row in out))

    # -- arithmetic ---------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols_b = [tuple(r[j] for r in other.entries) for j in range(other.cols)]
        out = tuple(
            tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols_b)
            for row in self.entries
        )
        return RatMatrix(self.rows, other.cols, out)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return RatMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
        )

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.entries))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def scale(self, c) -> "RatMatrix":
        c = _frac(c)
        return RatMatrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.entries))

    def apply(self, vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        return tuple(sum((a * v for a, v in zip(row, vec)), Fraction(0)) for row in self.entries)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            self.cols,
            self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def map_entries(self, fn) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(tuple(fn(a) for a in r) for r in self.entries))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.entries for a in r)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == RatMatrix.identity(self.rows)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self.entries for a in r)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "RatMatrix":
        return RatMatrix(r1 - r0, c1 - c0, tuple(row[c0:c1] for row in self.entries[r0:r1]))

    # -- determinant / inverse ---------------------------------------------
    def det(self) -> Fraction:
        """Exact determinant by Bareiss fraction-free elimination.

        Rows are first cleared of denominators so that the elimination runs
        over the integers, where Bareiss' divisions are exact.
        """
        if self.rows != self.cols:
            raise DimensionMismatch(f"determinant of non-square {self.shape} matrix")
        n = self.rows
        if n == 0:
            return Fraction(1)
        scale = 1
        a = []
        for row in self.entries:
            m = math.lcm(*(x.denominator for x in row))
            scale *= m
            a.append([int(x * m) for x in row])
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return Fraction(0)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return Fraction(sign * a[n - 1][n - 1], scale)

    def inverse(self) -> "RatMatrix":
        if self.rows != self.cols:
            raise DimensionMismatch(f"inverse of non-square {self.shape} matrix")
        n = self.rows
        aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(self.entries)]
        for c in range(n):
            piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
            if piv is None:
                raise SingularMatrix("matrix is not invertible")
            aug[c], aug[piv] = aug[piv], aug[c]
            p = aug[c][c]
            aug[c] = [x / p for x in aug[c]]
            for r in range(n):
                if r != c and aug[r][c] != 0:
                    f = aug[r][c]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
        return RatMatrix(n, n, tuple(tuple(row[n:]) for row in aug))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"RatMatrix[{self.rows}x{self.cols}]({body})"


# ---------------------------------------------------------------------------
# Orders and modules


@dataclass(frozen=True)
class Order:
    """``Z`` (``factors == 1``) or the product order ``Z x ... x Z``."""

    kind: str = "IntegerRing"
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("IntegerRing", "ProductOfIntegerRings"):
            raise UnsupportedOrder(self.kind)
        if self.kind == "IntegerRing" and self.k != 1:
            raise UnsupportedOrder("IntegerRing has exactly one factor")
        if self.k < 1:
            raise UnsupportedOrder("product order needs k >= 1")

    @property
    def factors(self) -> int:
        return self.k

    @property
    def rational_dim(self) -> int:
        return self.k


ZZ = Order()


def product_order(k: int) -> Order:
    return Order("ProductOfIntegerRings", k)


@dataclass(frozen=True)
class FreeModule:
    """The free module of the given rank; identity is nominal (label + rank)."""

    rank: int
    label: str
    order: Order = ZZ

    def __post_init__(self):
        if self.rank < 0:
            raise DimensionMismatch("rank must be nonnegative")

    @property
    def dim(self) -> int:
        """Z-rank of the underlying lattice (= real dimension of P_R)."""
        return self.rank * self.order.factors

    def __str__(self) -> str:
        return self.label


def zero_module(label: str = "0", order: Order = ZZ) -> FreeModule:
    return FreeModule(0, label, order)


def free(n: int, label: str | None = None, order: Order = ZZ) -> FreeModule:
    return FreeModule(n, label if label is not None else f"A^{n}", order)


# ---------------------------------------------------------------------------
# Bass-Swan triples


@dataclass(frozen=True)
class BassSwanTriple:
    P: FreeModule
    phi: RatMatrix
    Q: FreeModule

    def __str__(self) -> str:
        return f"[{self.P}, {self.phi}, {self.Q}]"


@dataclass(frozen=True)
class SwanMorphism:
    """A morphism ``(P1, a1, Q1) -> (P2, a2, Q2)`` given by integer matrices p, q."""

    source: BassSwanTriple
    target: BassSwanTriple
    p: RatMatrix
    q: RatMatrix


@dataclass(frozen=True)
class CommutesReport:
    commutes: bool
    defect: RatMatrix

    def __bool__(self) -> bool:
        return self.commutes


def _is_block_diagonal(m: RatMatrix, k: int, n: int) -> bool:
    for i in range(m.rows):
        for j in range(m.cols):
            if i // n != j // n and m.entries[i][j] != 0:
                return False
    return True


def make_triple(P: FreeModule, phi: RatMatrix, Q: FreeModule) -> BassSwanTriple:
    if P.order != Q.order:
        raise DimensionMismatch("P and Q live over different orders")
    if P.dim != Q.dim or phi.shape != (Q.dim, P.dim):
        raise DimensionMismatch(f"phi has shape {phi.shape}, expected {(Q.dim, P.dim)}")
    k = P.order.factors
    if k > 1 and not _is_block_diagonal(phi, k, P.rank):
        raise DimensionMismatch("phi must be block-diagonal over the product order")
    if phi.det() == 0:
        raise SingularMatrix(f"det(phi) = 0 for {phi}")
    return BassSwanTriple(P, phi, Q)


def relation_b_combine(t1: BassSwanTriple, t2: BassSwanTriple) -> BassSwanTriple:
    """``[P, a, Q] + [Q, b, S] = [P, b a, S]``."""
    if t1.Q != t2.P:
        raise MiddleMismatch(f"{t1.Q!r} != {t2.P!r}")
    return BassSwanTriple(t1.P, t2.phi @ t1.phi, t2.Q)


def check_swan_morphism(m: SwanMorphism) -> CommutesReport:
    s, t = m.source, m.target
    if m.p.shape != (t.P.dim, s.P.dim) or m.q.shape != (t.Q.dim, s.Q.dim):
        raise DimensionMismatch("p or q has the wrong shape")
    defect = t.phi @ m.p - m.q @ s.phi
    return CommutesReport(defect.is_zero(), defect)


def det_invariant(t: BassSwanTriple) -> Fraction:
    """|det phi| as an exact positive rational (product over the factors)."""
    k = t.P.order.factors
    n = t.P.rank
    out = Fraction(1)
    for f in range(k):
        out *= abs(t.phi.submatrix(f * n, (f + 1) * n, f * n, (f + 1) * n).det())
    return out


def delta(phi: RatMatrix, n: int, order: Order = ZZ) -> BassSwanTriple:
    """The connecting map ``K_1(A_R) -> K_0(A, R)``: ``phi |-> [A^n, phi, A^n]``."""
    mod = free(n, order=order)
    return make_triple(mod, phi, mod)


def k0_class(P: FreeModule) -> tuple[int, ...]:
    return (P.rank,) * P.order.factors
