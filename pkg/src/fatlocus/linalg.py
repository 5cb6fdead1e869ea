"""Exact linear algebra over the rationals.

Matrices are reduced to integer rows (each row scaled by the lcm of its
denominators) and handed to a fraction-free Bareiss kernel. The kernel comes
from the compiled extension when it is importable and from
:mod:`fatlocus._kernel_py` otherwise; both return identical results.

Row spaces are tested through their annihilator: ``v`` lies in the row space
of ``M`` iff ``v . k == 0`` for every ``k`` in a kernel basis of ``M``.
"""
from fractions import Fraction
from math import gcd
from operator import mul
from numbers import Rational

from fatlocus import _kernel_py
from fatlocus.errors import DimensionError

try:
    from fatlocus import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _kernel_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = _compiled if _compiled is not None else _kernel_py


def available_backends():
    return sorted(_BACKENDS)


def backend():
    """Name of the elimination kernel currently in use."""
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use_backend(name):
    """Select the elimination kernel (``"compiled"`` or ``"python"``)."""
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}") from None


def as_rational(x):
    """Canonical exact scalar: ``int`` when integral, else a reduced ``Fraction``.

    Strings of the form ``"a"`` or ``"a/b"`` are accepted; floats are refused so
    that nothing inexact can leak in.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        if any(ch in x for ch in ".eE"):
            raise ValueError(f"rational strings must be decimal-free: {x!r}")
        x = Fraction(x)
    elif not isinstance(x, Rational):
        raise TypeError(f"expected an exact rational, got {type(x).__name__}")
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def format_rational(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class QMatrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, entries, cols=None):
        ents = tuple(tuple(as_rational(x) for x in row) for row in entries)
        if cols is None:
            if not ents:
                raise DimensionError("column count required for a matrix without rows")
            cols = len(ents[0])
        for row in ents:
            if len(row) != cols:
                raise DimensionError(f"ragged row: expected {cols} entries, got {len(row)}")
        self.entries = ents
        self.rows = len(ents)
        self.cols = cols

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows, cols):
        return cls([[0] * cols for _ in range(rows)], cols)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return self.rows

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.cols == other.cols and self.entries == other.entries

    def __hash__(self):
        return hash((self.cols, self.entries))

    def __repr__(self):
        return f"QMatrix({self.rows}x{self.cols})"

    def stack(self, *others):
        return stack(self, *others)

    def transpose(self):
        return QMatrix([[row[j] for row in self.entries] for j in range(self.cols)], self.rows)

    def integer_rows(self):
        return [integer_row(row) for row in self.entries]


def as_qmatrix(m, cols=None):
    if isinstance(m, QMatrix):
        return m
    return QMatrix(m, cols)


def stack(*ms):
    """Vertical concatenation; every block must have the same column count."""
    ms = [as_qmatrix(m) for m in ms]
    cols = ms[0].cols
    for m in ms[1:]:
        if m.cols != cols:
            raise DimensionError(f"column mismatch: {cols} vs {m.cols}")
    return QMatrix([row for m in ms for row in m.entries], cols)


def _primitive_ints(ints):
    g = gcd(*ints) if ints else 0
    if g > 1:
        return [x // g for x in ints]
    return list(ints)


def integer_row(row):
    """Scale a rational row to integers with no common factor (zero rows stay zero)."""
    den = 1
    for x in row:
        if type(x) is not int:
            d = Fraction(x).denominator
            den = den * d // gcd(den, d)
    if den == 1:
        return _primitive_ints([int(x) for x in row])
    return _primitive_ints([int(x * den) for x in row])


def primitive(vec):
    """Integer vector with gcd 1 and first nonzero entry positive."""
    v = integer_row(vec)
    return _sign_normalized(v)


def _sign_normalized(v):
    for x in v:
        if x:
            if x < 0:
                v = [-y for y in v]
            break
    return tuple(v)


def _integer_rows(m):
    if isinstance(m, QMatrix):
        return m.cols, m.integer_rows()
    m = as_qmatrix(m)
    return m.cols, m.integer_rows()


def echelon_int(rows, ncols):
    return _active.echelon(rows, ncols)


def rref_int(rows, ncols):
    return _active.rref(rows, ncols)


def rank_int(rows, ncols):
    if not rows:
        return 0
    return _active.echelon(rows, ncols)[0]


def kernel_int(rows, ncols):
    """Primitive integer basis of the right kernel, one vector per free column."""
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    rank, pivots, red = _active.rref(rows, ncols)
    if rank == 0:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    det = red[0][pivots[0]]
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = det
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(_sign_normalized(_primitive_ints(v)))
    return basis


def rank_exact(m):
    """Rank over Q, computed exactly."""
    ncols, rows = _integer_rows(m)
    return rank_int(rows, ncols)


def kernel_basis(m):
    """Basis of ``{v : m v = 0}``, each vector scaled so its first nonzero entry is 1."""
    ncols, rows = _integer_rows(m)
    out = []
    for v in kernel_int(rows, ncols):
        lead = next(x for x in v if x)
        out.append(tuple(as_rational(Fraction(x, lead)) for x in v))
    return out


def dot(u, v):
    return sum(map(mul, u, v))


def rowspace_contains(v, kernel):
    """True iff ``v`` is annihilated by every kernel vector, i.e. lies in the row space."""
    n = len(v)
    for k in kernel:
        if len(k) != n:
            raise DimensionError(f"vector of length {n} against kernel vector of length {len(k)}")
    return all(dot(v, k) == 0 for k in kernel)


def rowspace_intersection(m1, m2):
    """Matrix whose rows form a basis of ``rowspace(m1) & rowspace(m2)``.

    A combination ``c . B`` of an echelon basis ``B`` of ``m1`` lies in
    ``rowspace(m2)`` iff it is annihilated by the kernel of ``m2``, so the
    coefficients ``c`` form the left kernel of ``B K^T``.
    """
    m1 = as_qmatrix(m1)
    m2 = as_qmatrix(m2)
    if m1.cols != m2.cols:
        raise DimensionError(f"column mismatch: {m1.cols} vs {m2.cols}")
    n = m1.cols
    rows1 = m1.integer_rows()
    if not rows1:
        return QMatrix([], n)
    r1, _, basis1 = echelon_int(rows1, n)
    if r1 == 0:
        return QMatrix([], n)
    k2 = kernel_int(m2.integer_rows(), n)
    if not k2:
        coeffs = [tuple(int(i == j) for j in range(r1)) for i in range(r1)]
    else:
        residues_t = [[dot(b, k) for b in basis1] for k in k2]
        coeffs = kernel_int(residues_t, r1)
    out = []
    for c in coeffs:
        v = [0] * n
        for ci, b in zip(c, basis1):
            if ci:
                for j, x in enumerate(b):
                    v[j] += ci * x
        out.append(primitive(v))
    return QMatrix(out, n)


def solve_combination(rows, target):
    """Coefficients ``c`` with ``sum(c[i] * rows[i]) == target``, or ``None``."""
    k = len(rows)
    n = len(target)
    # one common denominator for the whole system leaves the solution unchanged
    den = 1
    for vec in list(rows) + [target]:
        for x in vec:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
    system = [[int(rows[i][j] * den) for i in range(k)] + [int(target[j] * den)]
              for j in range(n)]
    rank, pivots, red = rref_int(system, k + 1)
    if k in pivots:
        return None
    coeffs = [0] * k
    if rank:
        det = red[0][pivots[0]]
        for row, pc in zip(red, pivots):
            coeffs[pc] = as_rational(Fraction(row[k], det))
    return coeffs


class Span:
    """Row space of an integer matrix, held as its rank and an integer annihilator.

    Membership of a vector costs one dot product per annihilator vector and
    stops at the first nonzero residual.
    """

    __slots__ = ("ncols", "rank", "annihilator")

    def __init__(self, rows, ncols):
        rows = [list(r) for r in rows]
        self.ncols = ncols
        self.annihilator = kernel_int(rows, ncols)
        self.rank = ncols - len(self.annihilator)

    @property
    def codim(self):
        return len(self.annihilator)

    def contains(self, v):
        for k in self.annihilator:
            if dot(v, k):
                return False
        return True

    def contains_all(self, vs):
        return all(self.contains(v) for v in vs)

    def rank_with(self, extra):
        """Rank of the row space enlarged by the rows of ``extra``."""
        if not self.annihilator:
            return self.rank
        residues = [[dot(v, k) for k in self.annihilator] for v in extra]
        return self.rank + rank_int(residues, len(self.annihilator))
