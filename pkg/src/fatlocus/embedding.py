"""Veronese and Segre-Veronese embeddings and their jet matrices.

A space is a product of projective spaces ``P^{n_1} x ... x P^{n_k}`` with a
degree per factor; a single factor is the Veronese case. Coordinates of the
ambient ``P^N`` are multihomogeneous monomials, ordered lexicographically with
earlier variables weighted higher inside a factor and with the first factor
outermost across factors.

Rows of every matrix built here are linear functionals written in that
monomial basis, so a row space is the span of the corresponding points and
tangent directions in ``P^N``. All arithmetic is on Python integers.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, gcd

from fatlocus.errors import (
    ConfigurationError,
    DegenerateDirectionError,
    InvalidPointError,
    SchemeError,
)
from fatlocus.linalg import QMatrix, as_rational, integer_row, rank_int


@dataclass(frozen=True)
class EmbeddingSpace:
    """``factors`` holds one ``(n_i, d_i)`` pair per projective factor."""

    factors: tuple
    kind: str = "veronese"

    def __post_init__(self):
        factors = tuple((int(n), int(d)) for n, d in self.factors)
        object.__setattr__(self, "factors", factors)
        if self.kind not in ("veronese", "segre_veronese"):
            raise ConfigurationError(f"unknown space kind {self.kind!r}")
        if self.kind == "veronese" and len(factors) != 1:
            raise ConfigurationError("a Veronese space has exactly one factor")
        if self.kind == "segre_veronese" and len(factors) < 2:
            raise ConfigurationError("a Segre-Veronese space needs at least two factors")
        for n, d in factors:
            if n < 1 or d < 1:
                raise ConfigurationError(f"factor dimensions and degrees must be >= 1, got ({n}, {d})")

    @classmethod
    def veronese(cls, n, d):
        return cls(((n, d),), "veronese")

    @classmethod
    def segre_veronese(cls, factors):
        return cls(tuple(tuple(f) for f in factors), "segre_veronese")

    @property
    def is_veronese(self):
        return self.kind == "veronese"

    @property
    def n(self):
        if not self.is_veronese:
            raise AttributeError("n is only defined for Veronese spaces")
        return self.factors[0][0]

    @property
    def d(self):
        if not self.is_veronese:
            raise AttributeError("d is only defined for Veronese spaces")
        return self.factors[0][1]

    @property
    def t(self):
        """Smallest factor degree."""
        return min(d for _, d in self.factors)

    @property
    def dim(self):
        """Dimension of the embedded variety."""
        return sum(n for n, _ in self.factors)

    @property
    def ambient(self):
        """Number of homogeneous coordinates of the ambient space, ``N + 1``."""
        out = 1
        for n, d in self.factors:
            out *= comb(n + d, d)
        return out

    def degree(self, factor):
        return self.factors[factor][1]

    def describe(self):
        if self.is_veronese:
            return f"veronese:{self.n}:{self.d}"
        return "sv:" + ",".join(f"{n}:{d}" for n, d in self.factors)

    def to_json(self):
        if self.is_veronese:
            return {"type": "veronese", "n": self.n, "d": self.d}
        return {"type": "segre_veronese", "factors": [{"n": n, "d": d} for n, d in self.factors]}

    @classmethod
    def from_json(cls, data):
        kind = data.get("type")
        if kind == "veronese":
            return cls.veronese(data["n"], data["d"])
        if kind == "segre_veronese":
            return cls.segre_veronese([(f["n"], f["d"]) for f in data["factors"]])
        raise ConfigurationError(f"unknown space type {kind!r}")

    @classmethod
    def parse(cls, text):
        """Parse ``veronese:n:d`` or ``sv:n1:d1,n2:d2,...``."""
        head, _, rest = text.partition(":")
        try:
            if head == "veronese":
                n, d = rest.split(":")
                return cls.veronese(int(n), int(d))
            if head in ("sv", "segre_veronese"):
                return cls.segre_veronese(
                    [tuple(int(x) for x in part.split(":")) for part in rest.split(",")]
                )
        except ValueError:
            pass
        raise ConfigurationError(f"cannot parse space descriptor {text!r}")


def normalize_coords(coords):
    """Canonical integer representative of a projective point."""
    vals = [as_rational(x) for x in coords]
    if not any(vals):
        raise InvalidPointError("the zero vector is not a projective point")
    ints = integer_row(vals)
    lead = next(x for x in ints if x)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


@dataclass(frozen=True, order=True)
class Point:
    """Point of a product of projective spaces, one coordinate tuple per factor.

    Coordinates are stored as the primitive integer representative whose first
    nonzero entry is positive, so equality is projective equality.
    """

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(normalize_coords(c) for c in self.coords))

    @classmethod
    def of(cls, *factors):
        return cls(tuple(factors))

    def factor(self, i):
        return self.coords[i]

    def to_json(self):
        if len(self.coords) == 1:
            return list(self.coords[0])
        return [list(c) for c in self.coords]

    @classmethod
    def parse(cls, space, data):
        """Build a point of ``space`` from a flat list (Veronese) or a list of lists."""
        k = len(space.factors)
        if k == 1 and data and not isinstance(data[0], (list, tuple)):
            data = [data]
        if len(data) != k:
            raise InvalidPointError(f"expected {k} coordinate blocks, got {len(data)}")
        pt = cls(tuple(tuple(c) for c in data))
        check_point(space, pt)
        return pt

    def __str__(self):
        return " x ".join("(" + ":".join(str(x) for x in c) + ")" for c in self.coords)


def check_point(space, p):
    if len(p.coords) != len(space.factors):
        raise InvalidPointError(f"point {p} has {len(p.coords)} factors, space has {len(space.factors)}")
    for c, (n, _) in zip(p.coords, space.factors):
        if len(c) != n + 1:
            raise InvalidPointError(f"factor of length {len(c)} in P^{n}")


def as_point(space, p):
    if isinstance(p, Point):
        check_point(space, p)
        return p
    return Point.parse(space, p)


@lru_cache(maxsize=None)
def _exponents(n, d):
    """Exponent tuples of degree ``d`` in ``n + 1`` variables, lex descending."""
    if n == 0:
        return ((d,),)
    out = []
    for e0 in range(d, -1, -1):
        for rest in _exponents(n - 1, d - e0):
            out.append((e0,) + rest)
    return tuple(out)


def basis(space):
    """Ordered multihomogeneous monomial basis; one tuple of exponent tuples per monomial."""
    return tuple(product(*(_exponents(n, d) for n, d in space.factors)))


def _power_table(x, d):
    pw = [1] * (d + 1)
    for k in range(1, d + 1):
        pw[k] = pw[k - 1] * x
    return pw


def _factor_values(coords, d):
    """Monomials of degree d of one factor evaluated at coords."""
    n = len(coords) - 1
    tables = [_power_table(x, d) for x in coords]
    out = []
    for e in _exponents(n, d):
        v = 1
        for tbl, k in zip(tables, e):
            if k:
                v *= tbl[k]
        out.append(v)
    return out


def _factor_partials(coords, d):
    """Rows of partial derivatives of one factor's monomials, one per variable."""
    n = len(coords) - 1
    tables = [_power_table(x, d) for x in coords]
    rows = []
    for var in range(n + 1):
        row = []
        for e in _exponents(n, d):
            k = e[var]
            if not k:
                row.append(0)
                continue
            v = k
            for idx, (tbl, m) in enumerate(zip(tables, e)):
                m = m - 1 if idx == var else m
                if m:
                    v *= tbl[m]
            row.append(v)
        rows.append(row)
    return rows


def _outer(blocks):
    """Flatten the tensor product of per-factor value lists in basis order."""
    out = blocks[0]
    for blk in blocks[1:]:
        out = [a * b for a in out for b in blk]
    return out


def nu(space, p):
    """Image of ``p`` under the embedding, at its integer representative."""
    p = as_point(space, p)
    return tuple(_outer([_factor_values(c, d) for c, (_, d) in zip(p.coords, space.factors)]))


def _jet_blocks(space, p):
    values = [_factor_values(c, d) for c, (_, d) in zip(p.coords, space.factors)]
    partials = [_factor_partials(c, d) for c, (_, d) in zip(p.coords, space.factors)]
    return values, partials


@dataclass(frozen=True)
class RowLabel:
    point: int
    kind: str  # "evaluation", "partial" or "directional"
    factor: int = 0
    index: int = -1
    direction: tuple = ()

    def to_json(self):
        out = {"point": self.point, "kind": self.kind}
        if self.kind == "partial":
            out.update(factor=self.factor, index=self.index)
        elif self.kind == "directional":
            out["direction"] = [list(d) for d in self.direction]
        return out


@dataclass(frozen=True)
class JetMatrix:
    """Integer matrix of functionals together with a label per row."""

    rows: tuple
    labels: tuple
    cols: int

    @property
    def matrix(self):
        return QMatrix(self.rows, self.cols)

    def rank(self):
        return rank_int([list(r) for r in self.rows], self.cols)

    def __len__(self):
        return len(self.rows)


def _partial_rows(space, p):
    values, partials = _jet_blocks(space, p)
    rows = []
    for f, prows in enumerate(partials):
        for var, prow in enumerate(prows):
            blocks = list(values)
            blocks[f] = prow
            rows.append((f, var, tuple(_outer(blocks))))
    return rows


def jet_rows(space, p, point_id=0):
    """Partial derivatives of the monomial vector at ``p``: the span is ``T_p X``."""
    p = as_point(space, p)
    rows = _partial_rows(space, p)
    return JetMatrix(
        tuple(r for _, _, r in rows),
        tuple(RowLabel(point_id, "partial", f, var) for f, var, _ in rows),
        space.ambient,
    )


def normalize_direction(space, direction):
    """Per-factor direction blocks as one primitive integer vector, split back by factor.

    A flat list is accepted for Veronese spaces.
    """
    k = len(space.factors)
    if k == 1 and direction and not isinstance(direction[0], (list, tuple)):
        direction = [direction]
    if len(direction) != k:
        raise SchemeError(f"direction needs {k} blocks, got {len(direction)}")
    flat = []
    for blk, (n, _) in zip(direction, space.factors):
        if len(blk) != n + 1:
            raise SchemeError(f"direction block of length {len(blk)} in P^{n}")
        flat.extend(as_rational(x) for x in blk)
    ints = integer_row(flat)
    out = []
    pos = 0
    for n, _ in space.factors:
        out.append(tuple(ints[pos:pos + n + 1]))
        pos += n + 1
    return tuple(out)


def _proportional(u, v):
    """True when ``u`` is a (possibly zero) multiple of ``v``."""
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            if u[i] * v[j] != u[j] * v[i]:
                return False
    return True


def is_degenerate_direction(p, direction):
    return all(_proportional(u, c) for u, c in zip(direction, p.coords))


def directional_row(space, p, direction, check=True):
    """Derivative of the monomial vector at ``p`` along ``direction``.

    Raises :class:`DegenerateDirectionError` when the direction is a multiple of
    ``p`` in every factor, where the row collapses onto ``nu(p)``.
    """
    p = as_point(space, p)
    direction = normalize_direction(space, direction)
    if check and is_degenerate_direction(p, direction):
        raise DegenerateDirectionError(f"direction {direction} is proportional to {p}")
    values, partials = _jet_blocks(space, p)
    total = [0] * space.ambient
    for f, (prows, dvec) in enumerate(zip(partials, direction)):
        if not any(dvec):
            continue
        drow = [sum(c * prow[m] for c, prow in zip(dvec, prows)) for m in range(len(values[f]))]
        blocks = list(values)
        blocks[f] = drow
        for m, x in enumerate(_outer(blocks)):
            total[m] += x
    return tuple(total)


def _points_of(a):
    return tuple(a.points) if hasattr(a, "points") else tuple(a)


def fat_matrix(space, a):
    """Stacked jet rows of every point of ``a``; the row space is ``<2A>``."""
    pts = [as_point(space, p) for p in _points_of(a)]
    if len(set(pts)) != len(pts):
        raise ConfigurationError("configuration contains repeated points")
    rows = []
    labels = []
    for idx, p in enumerate(pts):
        for f, var, row in _partial_rows(space, p):
            rows.append(row)
            labels.append(RowLabel(idx, "partial", f, var))
    return JetMatrix(tuple(rows), tuple(labels), space.ambient)


@dataclass(frozen=True, order=True)
class Simple:
    """Reduced point, degree 1."""

    point: Point
    degree = 1

    def to_json(self):
        return {"type": "simple", "point": self.point.to_json()}


@dataclass(frozen=True, order=True)
class Jet2:
    """Curvilinear degree-2 scheme: a point with one tangent direction."""

    point: Point
    direction: tuple
    degree = 2

    def to_json(self):
        return {
            "type": "jet2",
            "point": self.point.to_json(),
            "direction": [list(d) for d in self.direction],
        }


@dataclass(frozen=True, order=True)
class Fat:
    """Full double point ``2p``; its degree is ``dim X + 1``."""

    point: Point

    def to_json(self):
        return {"type": "fat", "point": self.point.to_json()}


def component_degree(space, comp):
    if isinstance(comp, Fat):
        return space.dim + 1
    return comp.degree


def scheme_degree(space, components):
    return sum(component_degree(space, c) for c in components)


def make_jet2(space, p, direction):
    p = as_point(space, p)
    direction = normalize_direction(space, direction)
    if is_degenerate_direction(p, direction):
        raise DegenerateDirectionError(f"direction {direction} is proportional to {p}")
    return Jet2(p, direction)


def scheme_matrix(space, components):
    """Rows spanning ``<Z>`` for a scheme given as a list of components."""
    seen = set()
    rows = []
    labels = []
    for idx, comp in enumerate(components):
        p = as_point(space, comp.point)
        if p in seen:
            raise SchemeError(f"two components supported at {p}")
        seen.add(p)
        if isinstance(comp, Fat):
            for f, var, row in _partial_rows(space, p):
                rows.append(row)
                labels.append(RowLabel(idx, "partial", f, var))
            continue
        rows.append(nu(space, p))
        labels.append(RowLabel(idx, "evaluation"))
        if isinstance(comp, Jet2):
            rows.append(directional_row(space, p, comp.direction))
            labels.append(RowLabel(idx, "directional", direction=comp.direction))
        elif not isinstance(comp, Simple):
            raise SchemeError(f"unknown component {comp!r}")
    return JetMatrix(tuple(rows), tuple(labels), space.ambient)


def h1(space, components):
    """Failure of the scheme to impose independent conditions on hyperplanes."""
    return scheme_degree(space, components) - scheme_matrix(space, components).rank()
