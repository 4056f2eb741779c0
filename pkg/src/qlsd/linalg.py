"""Dense exact linear algebra: matrices over the complexified field, Kronecker
products, and deterministic null spaces / ranks over Q(sqrt 2).

Elimination works internally on rows scaled to Z[sqrt2] (integer pairs) so the
hot loop avoids Fraction churn; inputs and outputs are QScalar/CScalar.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .scalars import CScalar, C_ONE, C_ZERO, QScalar, Q_ONE, Q_ZERO


class Matrix:
    """Dense matrix of CScalar entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: list[list[CScalar]]):
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("matrix data shape mismatch")
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def zero(cls, rows: int, cols: int) -> Matrix:
        return cls(rows, cols, [[C_ZERO for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> Matrix:
        m = cls.zero(n, n)
        for i in range(n):
            m.data[i][i] = C_ONE
        return m

    @classmethod
    def from_rows(cls, data: list[list[CScalar]]) -> Matrix:
        return cls(len(data), len(data[0]) if data else 0, data)

    def __getitem__(self, rc):
        return self.data[rc[0]][rc[1]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and all(
                self.data[i][j] == other.data[i][j]
                for i in range(self.rows)
                for j in range(self.cols)
            )
        )

    def __add__(self, other: Matrix) -> Matrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in matrix addition")
        return Matrix(
            self.rows,
            self.cols,
            [
                [self.data[i][j] + other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def __sub__(self, other: Matrix) -> Matrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in matrix subtraction")
        return Matrix(
            self.rows,
            self.cols,
            [
                [self.data[i][j] - other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        out = Matrix.zero(self.rows, other.cols)
        for i in range(self.rows):
            row = self.data[i]
            orow = out.data[i]
            for k in range(self.cols):
                a = row[k]
                if a.is_zero():
                    continue
                brow = other.data[k]
                for j in range(other.cols):
                    b = brow[j]
                    if not b.is_zero():
                        orow[j] = orow[j] + a * b
        return out

    def scale(self, c: CScalar) -> Matrix:
        return Matrix(
            self.rows,
            self.cols,
            [[c * v for v in row] for row in self.data],
        )

    def dagger(self) -> Matrix:
        return Matrix(
            self.cols,
            self.rows,
            [[self.data[i][j].conj() for i in range(self.rows)] for j in range(self.cols)],
        )

    def trace(self) -> CScalar:
        if self.rows != self.cols:
            raise ValueError("trace of non-square matrix")
        t = C_ZERO
        for i in range(self.rows):
            t = t + self.data[i][i]
        return t

    # exact predicates (decidable: entries live in Q(sqrt2))

    def is_hermitian(self) -> bool:
        return self.rows == self.cols and self == self.dagger()

    def is_unitary(self) -> bool:
        return self.rows == self.cols and (self.dagger() @ self) == Matrix.identity(self.rows)

    def is_projector(self) -> bool:
        return self.is_hermitian() and (self @ self) == self

    def to_json(self):
        """Sparse JSON form: {"rows", "cols", "entries": [[i, j, scalar], ...]}."""
        entries = []
        for i in range(self.rows):
            for j in range(self.cols):
                v = self.data[i][j]
                if not v.is_zero():
                    entries.append([i, j, v.to_json()])
        return {"rows": self.rows, "cols": self.cols, "entries": entries}

    @classmethod
    def from_json(cls, obj) -> Matrix:
        """Accept the sparse form or a dense list-of-lists of scalar encodings."""
        if isinstance(obj, dict):
            m = cls.zero(obj["rows"], obj["cols"])
            for i, j, v in obj["entries"]:
                m.data[i][j] = CScalar.parse(v)
            return m
        data = [[CScalar.parse(v) for v in row] for row in obj]
        return cls.from_rows(data)


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; joint row index is i_a * rows_b + i_b (row-major)."""
    out = Matrix.zero(a.rows * b.rows, a.cols * b.cols)
    for ia in range(a.rows):
        for ja in range(a.cols):
            va = a.data[ia][ja]
            if va.is_zero():
                continue
            for ib in range(b.rows):
                base_r = ia * b.rows + ib
                for jb in range(b.cols):
                    vb = b.data[ib][jb]
                    if not vb.is_zero():
                        out.data[base_r][ja * b.cols + jb] = va * vb
    return out


def kron_all(mats: list[Matrix]) -> Matrix:
    out = mats[0]
    for m in mats[1:]:
        out = kron(out, m)
    return out


def projector(vec: list[CScalar]) -> Matrix:
    """Rank-1 projector v v^dag / <v|v>; stays in the field for any field vector."""
    n2 = Q_ZERO
    for v in vec:
        n2 = n2 + v.abs2()
    if n2.is_zero():
        raise ValueError("projector of the zero vector")
    inv = CScalar(n2.inv())
    d = len(vec)
    m = Matrix.zero(d, d)
    for i in range(d):
        if vec[i].is_zero():
            continue
        for j in range(d):
            if not vec[j].is_zero():
                m.data[i][j] = vec[i] * vec[j].conj() * inv
    return m


# ---------------------------------------------------------------------------
# Exact elimination over Q(sqrt2)
#
# Rows are scaled to integer pairs (na, nb) meaning na + nb*sqrt2; the update
# r_new = lead(piv) * r - lead(r) * piv keeps everything in Z[sqrt2] and the
# row content (gcd) is divided out to bound growth.
# ---------------------------------------------------------------------------


def _row_to_int_pairs(row: list[QScalar]) -> dict[int, tuple[int, int]]:
    den = 1
    for v in row:
        d = v.a.denominator * v.b.denominator
        den = den * d // math.gcd(den, d)
    out = {}
    for c, v in enumerate(row):
        if not v.is_zero():
            out[c] = (int(v.a * den), int(v.b * den))
    return _normalize_int_row(out)


def _normalize_int_row(row: dict[int, tuple[int, int]]) -> dict[int, tuple[int, int]]:
    g = 0
    for na, nb in row.values():
        g = math.gcd(g, math.gcd(abs(na), abs(nb)))
        if g == 1:
            return row
    if g > 1:
        return {c: (na // g, nb // g) for c, (na, nb) in row.items()}
    return row


def _pair_to_qscalar(p: tuple[int, int]) -> QScalar:
    return QScalar(Fraction(p[0]), Fraction(p[1]))


class _Echelon:
    """Incremental row-echelon form over Q(sqrt2), sparse dict rows.

    Pivot rule: first nonzero column in column order, rows in insertion order.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, tuple[int, int]]] = {}

    def add_row(self, row: dict[int, tuple[int, int]]) -> None:
        while row:
            lead = min(row)
            piv = self.pivots.get(lead)
            if piv is None:
                self.pivots[lead] = _normalize_int_row(row)
                return
            pl0, pl1 = piv[lead]
            rl0, rl1 = row[lead]
            # row <- lead(piv) * row - lead(row) * piv, in Z[sqrt2]
            out = {}
            for c, (r0, r1) in row.items():
                out[c] = (pl0 * r0 + 2 * pl1 * r1, pl0 * r1 + pl1 * r0)
            for c, (p0, p1) in piv.items():
                s0 = rl0 * p0 + 2 * rl1 * p1
                s1 = rl0 * p1 + rl1 * p0
                cur = out.get(c)
                if cur is None:
                    out[c] = (-s0, -s1)
                else:
                    n0, n1 = cur[0] - s0, cur[1] - s1
                    if n0 or n1:
                        out[c] = (n0, n1)
                    else:
                        del out[c]
            row = _normalize_int_row(out)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def null_space(self) -> list[list[QScalar]]:
        """Deterministic basis of the null space, one vector per free column.

        Each vector is scaled so its first nonzero entry is positive.
        """
        pivot_cols = sorted(self.pivots)
        free = [c for c in range(self.ncols) if c not in self.pivots]
        basis = []
        for f in free:
            x: dict[int, QScalar] = {f: Q_ONE}
            for pc in reversed(pivot_cols):
                if pc > f:
                    continue
                row = self.pivots[pc]
                s = Q_ZERO
                for c, p in row.items():
                    if c > pc and c in x:
                        s = s + _pair_to_qscalar(p) * x[c]
                if not s.is_zero():
                    x[pc] = -(s / _pair_to_qscalar(row[pc]))
            vec = [x.get(c, Q_ZERO) for c in range(self.ncols)]
            for v in vec:
                if not v.is_zero():
                    if v.sign() < 0:
                        vec = [-u for u in vec]
                    break
            basis.append(vec)
        return basis


def echelon_from_rows(rows, ncols: int) -> _Echelon:
    """Build an echelon form; rows may be QScalar lists or sparse int-pair dicts."""
    ech = _Echelon(ncols)
    for row in rows:
        if isinstance(row, dict):
            ech.add_row(dict(row))
        else:
            ech.add_row(_row_to_int_pairs(row))
    return ech


def null_space_real(rows: list[list[QScalar]], ncols: int | None = None):
    """Exact null space of a real constraint system over Q(sqrt2).

    Returns (dimension, basis).  Pivoting is deterministic (first nonzero by
    column order, rows processed in the given order), so repeated runs produce
    identical bases.
    """
    if ncols is None:
        if not rows:
            raise ValueError("cannot infer column count from an empty system")
        ncols = len(rows[0])
    ech = echelon_from_rows(rows, ncols)
    basis = ech.null_space()
    return len(basis), basis


def rank_real(rows: list[list[QScalar]], ncols: int | None = None) -> int:
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return echelon_from_rows(rows, ncols).rank


def rank_complex(rows: list[list[CScalar]], ncols: int | None = None) -> int:
    """Rank of a complex matrix over Q(sqrt2)[i], via its 2x-real embedding.

    A complex row r splits into two real rows (Re r, Im r) and (-Im r, Re r)
    over the column doubling (Re x, Im x); the real rank is twice the complex
    rank, which keeps everything inside the real elimination kernel.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    real_rows: list[list[QScalar]] = []
    for row in rows:
        re_part = [v.re for v in row]
        im_part = [v.im for v in row]
        real_rows.append(re_part + im_part)
        real_rows.append([-v for v in im_part] + re_part)
    r2 = rank_real(real_rows, 2 * ncols)
    if r2 % 2:
        raise AssertionError("real embedding produced odd rank")
    return r2 // 2


def in_real_span(basis: list[list[QScalar]], target: list[QScalar]) -> bool:
    """Exact membership of target in the real span of basis vectors."""
    ncols = len(target)
    ech = echelon_from_rows(basis, ncols)
    before = ech.rank
    ech.add_row(_row_to_int_pairs(target))
    return ech.rank == before
