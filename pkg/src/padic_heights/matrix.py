"""Matrices and polynomials over Q_p with precision tracking."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from .padic import DEFAULT_PREC, DivisionByIndistinguishableZero, PadicElement


def _elt(x, p, prec):
    if isinstance(x, PadicElement):
        return x
    if isinstance(x, (int, Rational)):
        return PadicElement.exact(Fraction(x), p, prec)
    raise TypeError(f"cannot coerce {type(x).__name__} to a p-adic number")


class SingularMatrix(DivisionByIndistinguishableZero):
    pass


class PadicMatrix:
    """A rectangular grid of p-adic numbers.  Zero-sized shapes are allowed."""

    __slots__ = ("p", "nrows", "ncols", "rows")

    def __init__(self, rows, p, shape=None, prec=DEFAULT_PREC):
        rows = tuple(tuple(_elt(x, p, prec) for x in r) for r in rows)
        if shape is None:
            shape = (len(rows), len(rows[0]) if rows else 0)
        if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
            raise ValueError("ragged or mis-shaped matrix")
        self.p = p
        self.nrows, self.ncols = shape
        self.rows = rows

    # -- constructors --------------------------------------------------------

    @classmethod
    def zeros(cls, nrows, ncols, p, prec=DEFAULT_PREC):
        z = PadicElement.zero(p, prec)
        return cls([[z] * ncols for _ in range(nrows)], p, (nrows, ncols))

    @classmethod
    def identity(cls, n, p, prec=DEFAULT_PREC):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], p, (n, n), prec)

    @classmethod
    def from_columns(cls, cols, p, nrows, prec=DEFAULT_PREC):
        cols = list(cols)
        return cls([[c[i] for c in cols] for i in range(nrows)], p, (nrows, len(cols)), prec)

    @classmethod
    def block(cls, blocks, p):
        """Assemble from a 2-D list of matrices (None means zeros)."""
        heights = []
        for brow in blocks:
            h = next(b.nrows for b in brow if b is not None)
            heights.append(h)
        widths = []
        for j in range(len(blocks[0])):
            w = next(brow[j].ncols for brow in blocks if brow[j] is not None)
            widths.append(w)
        rows = []
        for bi, brow in enumerate(blocks):
            for i in range(heights[bi]):
                row = []
                for bj, b in enumerate(brow):
                    if b is None:
                        row.extend([0] * widths[bj])
                    else:
                        row.extend(b.rows[i])
                rows.append(row)
        return cls(rows, p, (sum(heights), sum(widths)))

    # -- accessors -----------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j):
        return [r[j] for r in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def select_columns(self, idx):
        return PadicMatrix([[r[j] for j in idx] for r in self.rows], self.p, (self.nrows, len(idx)))

    @property
    def T(self):
        return PadicMatrix.from_columns(self.rows, self.p, self.ncols)

    def min_precision(self):
        return min((x.abs_precision for r in self.rows for x in r), default=DEFAULT_PREC)

    def min_valuation(self):
        vals = [x.valuation for r in self.rows for x in r if not x.is_zero()]
        return min(vals) if vals else None

    def is_zero(self):
        return all(x.is_zero() for r in self.rows for x in r)

    def is_integral(self):
        return all(x.is_zero() or x.valuation >= 0 for r in self.rows for x in r)

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return PadicMatrix([a + b for a, b in zip(self.rows, other.rows)], self.p, (self.nrows, self.ncols + other.ncols))

    def vstack(self, other):
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return PadicMatrix(self.rows + other.rows, self.p, (self.nrows + other.nrows, self.ncols))

    def with_abs_precision(self, n):
        return PadicMatrix([[x.with_abs_precision(n) for x in r] for r in self.rows], self.p, self.shape)

    def to_lifts(self):
        return [[x.lift() for x in r] for r in self.rows]

    def __repr__(self):
        body = "; ".join(", ".join(x.to_token() for x in r) for r in self.rows)
        return f"PadicMatrix({self.nrows}x{self.ncols}: [{body}])"

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PadicMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.p, self.shape)

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PadicMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.p, self.shape)

    def __neg__(self):
        return PadicMatrix([[-a for a in r] for r in self.rows], self.p, self.shape)

    def scale(self, c):
        return PadicMatrix([[a * c for a in r] for r in self.rows], self.p, self.shape)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = None
                for a, b in zip(r, c):
                    t = a * b
                    acc = t if acc is None else acc + t
                if acc is None:
                    acc = PadicElement.zero(self.p, DEFAULT_PREC)
                row.append(acc)
            out.append(row)
        return PadicMatrix(out, self.p, (self.nrows, other.ncols))

    def apply(self, vec):
        return [row[0] for row in (self @ PadicMatrix.from_columns([vec], self.p, self.ncols)).rows]

    def __pow__(self, n):
        if self.nrows != self.ncols or n < 0:
            raise ValueError("power of a non-square matrix or negative exponent")
        result = PadicMatrix.identity(self.nrows, self.p, max(self.min_precision(), 1))
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def trace(self):
        acc = PadicElement.zero(self.p, 10**9)
        for i in range(self.nrows):
            acc = acc + self.rows[i][i]
        return acc

    def det(self):
        return charpoly(self).coeffs[0] * (-1) ** self.nrows

    def agrees_with(self, other, digits):
        return self.shape == other.shape and all(
            a.agrees_with(b, digits) for r, s in zip(self.rows, other.rows) for a, b in zip(r, s)
        )


# -- elimination ---------------------------------------------------------------


def row_reduce(m):
    """Reduced row echelon form with minimum-valuation pivoting.

    Returns ``(rref_rows, pivot_columns)``; entries indistinguishable from
    zero never serve as pivots.
    """
    rows = [list(r) for r in m.rows]
    pivots = []
    r = 0
    for c in range(m.ncols):
        if r == len(rows):
            break
        best = None
        for i in range(r, len(rows)):
            x = rows[i][c]
            if not x.is_zero() and (best is None or x.valuation < rows[best][c].valuation):
                best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(m):
    return len(row_reduce(m)[1])


def kernel(m):
    """Basis of the right kernel as columns of a matrix."""
    rows, pivots = row_reduce(m)
    free = [c for c in range(m.ncols) if c not in pivots]
    prec = m.min_precision()
    basis = []
    for f in free:
        v = [PadicElement.zero(m.p, prec) for _ in range(m.ncols)]
        v[f] = PadicElement.exact(1, m.p, prec)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][f]
        basis.append(v)
    return PadicMatrix.from_columns(basis, m.p, m.ncols)


def solve(a, b):
    """Solve a @ x = b for x; raises if the system is inconsistent."""
    aug = a.hstack(b)
    rows, pivots = row_reduce(aug)
    if any(pc >= a.ncols for pc in pivots):
        raise ValueError("inconsistent linear system")
    prec = aug.min_precision()
    x = [[PadicElement.zero(a.p, prec) for _ in range(b.ncols)] for _ in range(a.ncols)]
    for i, pc in enumerate(pivots):
        for j in range(b.ncols):
            x[pc][j] = rows[i][a.ncols + j]
    return PadicMatrix(x, a.p, (a.ncols, b.ncols))


def inverse(m):
    if m.nrows != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    if rank(m) < m.nrows:
        raise SingularMatrix("matrix is singular at working precision")
    return solve(m, PadicMatrix.identity(m.nrows, m.p, m.min_precision()))


def left_inverse(m):
    """A left inverse of an injective matrix (columns independent)."""
    if rank(m) < m.ncols:
        raise SingularMatrix("columns are dependent at working precision")
    rows, pivots = row_reduce(m)
    # choose the pivot rows of m^T: rows of m giving an invertible square block
    _, row_piv = row_reduce(m.T)
    sq = PadicMatrix([m.rows[i] for i in row_piv], m.p, (m.ncols, m.ncols))
    sq_inv = inverse(sq)
    out = [[PadicElement.zero(m.p, m.min_precision()) for _ in range(m.nrows)] for _ in range(m.ncols)]
    for k, i in enumerate(row_piv):
        for r in range(m.ncols):
            out[r][i] = sq_inv.rows[r][k]
    return PadicMatrix(out, m.p, (m.ncols, m.nrows))


def complete_basis(m):
    """Indices of standard basis vectors extending the columns of m to a basis."""
    n = m.nrows
    chosen = []
    cur = m
    for i in range(n):
        e = PadicMatrix.from_columns([[1 if k == i else 0 for k in range(n)]], m.p, n, m.min_precision())
        trial = cur.hstack(e)
        if rank(trial) > rank(cur):
            chosen.append(i)
            cur = trial
    return chosen


def same_column_space(a, b):
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(a.hstack(b)) == ra


# -- polynomials ---------------------------------------------------------------


class PadicPoly:
    """Polynomial with p-adic coefficients, lowest degree first."""

    __slots__ = ("p", "coeffs")

    def __init__(self, coeffs, p, prec=DEFAULT_PREC):
        self.p = p
        self.coeffs = tuple(_elt(c, p, prec) for c in coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        return acc

    def derivative(self):
        return PadicPoly([c * i for i, c in enumerate(self.coeffs)][1:], self.p)

    def agrees_with(self, other, digits):
        n = max(len(self.coeffs), len(other.coeffs))
        zero = PadicElement.zero(self.p, 10**9)
        a = list(self.coeffs) + [zero] * (n - len(self.coeffs))
        b = list(other.coeffs) + [zero] * (n - len(other.coeffs))
        return all(x.agrees_with(y, digits) for x, y in zip(a, b))

    def __repr__(self):
        return "PadicPoly([" + ", ".join(c.to_token() for c in self.coeffs) + "])"


def charpoly(m):
    """det(xI - m) by the division-free Berkowitz recursion."""
    if m.nrows != m.ncols:
        raise ValueError("charpoly of a non-square matrix")
    high_to_low = _berkowitz(m)
    return PadicPoly(list(reversed(high_to_low)), m.p)


def _berkowitz(m):
    n = m.nrows
    p = m.p
    top = max((x.abs_precision for r in m.rows for x in r), default=DEFAULT_PREC)
    one = PadicElement(p, 0, 1, max(top, 1) + 10)
    if n == 0:
        return [one]
    if n == 1:
        return [one, -m.rows[0][0]]
    a = m.rows[0][0]
    r = PadicMatrix([m.rows[0][1:]], p, (1, n - 1))
    sub = PadicMatrix([row[1:] for row in m.rows[1:]], p, (n - 1, n - 1))
    c = PadicMatrix([[row[0]] for row in m.rows[1:]], p, (n - 1, 1))
    diags = [one, -a]
    vec = c
    for _ in range(n - 1):
        diags.append(-(r @ vec).rows[0][0])
        vec = sub @ vec
    lower = _berkowitz(sub)
    out = []
    for i in range(n + 1):
        acc = None
        for j in range(n):
            if i >= j:
                t = diags[i - j] * lower[j]
                acc = t if acc is None else acc + t
        out.append(acc)
    return out
