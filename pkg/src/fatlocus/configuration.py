"""Point configurations, lines and epsilon-curves, incidence detection, generators."""
import random
from dataclasses import dataclass
from itertools import combinations
from math import gcd

from fatlocus.embedding import EmbeddingSpace, Point, as_point, normalize_coords
from fatlocus.errors import ConfigurationError, InfeasibleError, ParameterError
from fatlocus.linalg import rank_int, rref_int


@dataclass(frozen=True)
class Configuration:
    """An ordered set of pairwise distinct points of the source space."""

    space: EmbeddingSpace
    points: tuple

    def __post_init__(self):
        pts = tuple(as_point(self.space, p) for p in self.points)
        if not pts:
            raise ConfigurationError("a configuration needs at least one point")
        if len(set(pts)) != len(pts):
            raise ConfigurationError("configuration contains repeated points")
        object.__setattr__(self, "points", pts)

    @property
    def r(self):
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return as_point(self.space, p) in self.points

    def extend(self, extra):
        return Configuration(self.space, self.points + tuple(as_point(self.space, p) for p in extra))

    def without(self, idx):
        return Configuration(self.space, self.points[:idx] + self.points[idx + 1:])

    def subset(self, indices):
        return Configuration(self.space, tuple(self.points[i] for i in indices))

    def to_json(self):
        return {"space": self.space.to_json(), "points": [p.to_json() for p in self.points]}

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or "space" not in data or "points" not in data:
            raise ConfigurationError("configuration JSON needs 'space' and 'points'")
        space = EmbeddingSpace.from_json(data["space"])
        return cls(space, tuple(Point.parse(space, p) for p in data["points"]))


def _canonical_line(u, v):
    """Primitive integer RREF of the 2-row matrix (u, v); None if they are proportional."""
    rank, pivots, red = rref_int([list(u), list(v)], len(u))
    if rank < 2:
        return None
    out = []
    for row in red:
        g = 0
        for x in row:
            g = gcd(g, x)
        row = [x // g for x in row]
        lead = next(x for x in row if x)
        if lead < 0:
            row = [-x for x in row]
        out.append(tuple(row))
    return tuple(out)


class CurveClass:
    """A line in one factor, with every other factor held at a fixed point.

    For a Veronese space this is a line of ``P^n``; for a Segre-Veronese space
    it is a curve of multidegree ``e_i``. Points are ``a + s*b`` in the moving
    factor. Two curves are equal when their canonical line bases and fixed
    parts agree, whichever defining points were used.
    """

    __slots__ = ("space", "factor", "fixed", "a", "b", "canonical")

    def __init__(self, space, factor, a, b, fixed=None):
        k = len(space.factors)
        if not 0 <= factor < k:
            raise ParameterError(f"factor index {factor} out of range")
        n = space.factors[factor][0]
        a = normalize_coords(a)
        b = normalize_coords(b)
        if len(a) != n + 1 or len(b) != n + 1:
            raise ConfigurationError(f"curve points must lie in P^{n}")
        canon = _canonical_line(a, b)
        if canon is None:
            raise ConfigurationError("a curve needs two distinct points in its moving factor")
        if k == 1:
            fixed = ()
        else:
            if fixed is None or len(fixed) != k:
                raise ConfigurationError("fixed coordinates required for every factor")
            fixed = tuple(None if j == factor else normalize_coords(c) for j, c in enumerate(fixed))
            for j, c in enumerate(fixed):
                if j != factor and len(c) != space.factors[j][0] + 1:
                    raise ConfigurationError(f"fixed factor {j} has the wrong length")
        self.space = space
        self.factor = factor
        self.fixed = fixed
        self.a = a
        self.b = b
        self.canonical = canon

    @classmethod
    def through(cls, space, p, q, factor=None):
        """Curve through two points differing in exactly one factor (or lines of ``P^n``)."""
        p = as_point(space, p)
        q = as_point(space, q)
        k = len(space.factors)
        if factor is None:
            diff = [j for j in range(k) if p.coords[j] != q.coords[j]]
            if len(diff) != 1:
                raise ConfigurationError("points must differ in exactly one factor")
            factor = diff[0]
        elif any(p.coords[j] != q.coords[j] for j in range(k) if j != factor):
            raise ConfigurationError("points must agree outside the moving factor")
        return cls(space, factor, p.coords[factor], q.coords[factor], p.coords)

    @classmethod
    def canonical_through(cls, space, p, q, factor=None):
        """Same curve as :meth:`through`, parametrized by its canonical basis."""
        c = cls.through(space, p, q, factor)
        return cls(space, c.factor, c.canonical[0], c.canonical[1], c.fixed_full(c.canonical[0]))

    def fixed_full(self, moving):
        if not self.fixed:
            return None
        return tuple(moving if j == self.factor else c for j, c in enumerate(self.fixed))

    @property
    def degree_bound(self):
        """Degree of the embedding restricted to the curve."""
        return self.space.factors[self.factor][1]

    def key(self):
        return (self.factor, tuple(c or () for c in self.fixed), self.canonical)

    def __eq__(self, other):
        if not isinstance(other, CurveClass):
            return NotImplemented
        return self.space == other.space and self.key() == other.key()

    def __hash__(self):
        return hash((self.space, self.key()))

    def __lt__(self, other):
        return self.key() < other.key()

    def point_at(self, s, u=1):
        """Point ``u*a + s*b`` of the curve."""
        moving = tuple(u * x + s * y for x, y in zip(self.a, self.b))
        if len(self.space.factors) == 1:
            return Point((moving,))
        return Point(self.fixed_full(moving))

    def contains(self, p):
        p = as_point(self.space, p)
        for j, c in enumerate(self.fixed):
            if j != self.factor and p.coords[j] != c:
                return False
        return rank_int([list(self.a), list(self.b), list(p.coords[self.factor])], len(self.a)) <= 2

    def to_json(self):
        out = {
            "kind": "line" if self.space.is_veronese else "eps_curve",
            "factor": self.factor,
            "a": list(self.a),
            "b": list(self.b),
            "basis": [list(r) for r in self.canonical],
        }
        if self.fixed:
            out["fixed"] = [None if c is None else list(c) for c in self.fixed]
        return out

    @classmethod
    def from_json(cls, space, data):
        if "points" in data:
            pts = data["points"]
            if len(pts) != 2:
                raise ConfigurationError("a curve is given by exactly two points")
            return cls.through(space, pts[0], pts[1], data.get("factor"))
        factor = data.get("factor", 0)
        fixed = data.get("fixed")
        if fixed is not None:
            fixed = [data["a"] if j == factor else c for j, c in enumerate(fixed)]
        return cls(space, factor, data["a"], data["b"], fixed)

    def __repr__(self):
        return f"CurveClass(factor={self.factor}, basis={self.canonical}, fixed={self.fixed})"


def _key_outside(p, factor):
    return tuple(c for j, c in enumerate(p.coords) if j != factor)


def detect_curves(a, min_count, factors=None):
    """Every line (or e_i-curve) through at least ``min_count`` points of ``a``.

    Returns ``(curve, indices)`` pairs sorted by canonical form; ``indices`` are
    positions in ``a.points``. ``factors`` restricts the moving factor.
    """
    if min_count < 2:
        raise ParameterError("min_count must be at least 2")
    space = a.space
    pts = a.points
    if factors is None:
        factors = range(len(space.factors))
    found = {}
    for f in factors:
        groups = {}
        for idx, p in enumerate(pts):
            groups.setdefault(_key_outside(p, f), []).append(idx)
        for members in groups.values():
            if len(members) < min_count:
                continue
            for i, j in combinations(members, 2):
                c = CurveClass.canonical_through(space, pts[i], pts[j], f)
                if c in found:
                    continue
                inc = tuple(m for m in members if c.contains(pts[m]))
                found[c] = inc
    out = [(c, inc) for c, inc in found.items() if len(inc) >= min_count]
    out.sort(key=lambda item: item[0].key())
    return out


def collinear(points, factor=None):
    """True iff the points lie on one line (in ``factor``, agreeing elsewhere)."""
    pts = list(points)
    if len(pts) < 2:
        raise ParameterError("collinearity needs at least two points")
    k = len(pts[0].coords)
    if k > 1:
        if factor is None:
            raise ParameterError("a factor index is required for multiprojective points")
        ref = _key_outside(pts[0], factor)
        if any(_key_outside(p, factor) != ref for p in pts[1:]):
            return False
    else:
        factor = 0
    rows = [list(p.coords[factor]) for p in pts]
    return rank_int(rows, len(rows[0])) <= 2


def curve_samples(c, count, seed=0, spread=None):
    """``count`` distinct points of ``c``.

    By default the parameters are ``s = 0, 1, ..., count-1``; with ``spread``
    they are distinct random integers in ``[-spread, spread]`` drawn from ``seed``.
    """
    if count < 1:
        raise ParameterError("count must be at least 1")
    if spread is None:
        params = range(count)
    else:
        if 2 * spread + 1 < count:
            raise ParameterError("spread too small for the requested count")
        params = random.Random(seed).sample(range(-spread, spread + 1), count)
    return [c.point_at(s) for s in params]


# ---------------------------------------------------------------- generators

GENERATOR_KINDS = ("collinear", "two_lines", "generic", "sv_ruling", "three_points_d3")
_RETRIES = 200


def _random_coords(rng, n, height):
    while True:
        v = [rng.randint(-height, height) for _ in range(n + 1)]
        if any(v):
            return normalize_coords(v)


def _line_points(rng, n, height, count, avoid=(), through=None):
    """``count`` distinct points of a random line in ``P^n`` with bounded height.

    ``through`` forces the line to pass through a given point, which is then
    the first point returned.
    """
    k = max(1, height // 3)
    for _ in range(_RETRIES):
        u = through if through is not None else _random_coords(rng, n, k)
        v = _random_coords(rng, n, k)
        if _canonical_line(u, v) is None:
            continue
        cands = set()
        for lam in range(-height, height + 1):
            for mu in range(0, height + 1):
                if (lam, mu) == (0, 0) or gcd(lam, mu) != 1:
                    continue
                w = [lam * x + mu * y for x, y in zip(u, v)]
                w = normalize_coords(w)
                if max(abs(x) for x in w) <= height:
                    cands.add(w)
        cands.difference_update(avoid)
        if through is not None:
            cands.discard(tuple(through))
        cands = sorted(cands)
        need = count - (1 if through is not None else 0)
        if len(cands) < need:
            continue
        chosen = rng.sample(cands, need)
        return ([tuple(through)] if through is not None else []) + chosen
    raise InfeasibleError("could not find enough bounded-height points on a line")


def _no_three_collinear(points):
    for trio in combinations(points, 3):
        if rank_int([list(p) for p in trio], len(trio[0])) <= 2:
            return False
    return True


def _pick_min_factor(rng, space, factor):
    t = space.t
    choices = [i for i, (_, d) in enumerate(space.factors) if d == t]
    if factor is not None:
        if factor not in choices:
            raise InfeasibleError(f"factor {factor} does not have minimal degree {t}")
        return factor
    return rng.choice(choices)


def _gen_curve(rng, space, r, height, factor):
    if space.is_veronese:
        n = space.n
        coords = _line_points(rng, n, height, r)
        return [Point((c,)) for c in coords]
    f = _pick_min_factor(rng, space, factor)
    fixed = [_random_coords(rng, n, height) for n, _ in space.factors]
    moving = _line_points(rng, space.factors[f][0], height, r)
    out = []
    for m in moving:
        blocks = list(fixed)
        blocks[f] = m
        out.append(Point(tuple(blocks)))
    return out


def _gen_generic(rng, space, r, height):
    for _ in range(_RETRIES):
        pts = []
        seen = set()
        misses = 0
        while len(pts) < r:
            p = Point(tuple(_random_coords(rng, n, height) for n, _ in space.factors))
            if p in seen:
                misses += 1
                if misses > _RETRIES:
                    raise InfeasibleError(f"too few points of height {height} for r = {r}")
                continue
            seen.add(p)
            pts.append(p)
        if passes_generic_screen(space, pts):
            return pts
    raise InfeasibleError("generic screen failed after bounded retries")


def passes_generic_screen(space, points):
    """No special incidences: for P^n (n >= 2) no three collinear points; for
    Segre-Veronese no two points on a common e_i-curve."""
    if space.is_veronese:
        if space.n == 1 or len(points) < 3:
            return True
        return _no_three_collinear([p.coords[0] for p in points])
    k = len(space.factors)
    for p, q in combinations(points, 2):
        if sum(p.coords[j] != q.coords[j] for j in range(k)) <= 1:
            return False
    return True


def _gen_two_lines(rng, space, r, height):
    if not space.is_veronese or space.n < 2:
        raise InfeasibleError("two_lines needs a Veronese space with n >= 2")
    d = space.d
    if r != d or d % 2 == 0 or d < 5:
        raise InfeasibleError("two_lines needs r = d odd with d >= 5")
    m = (d + 1) // 2
    n = space.n
    for _ in range(_RETRIES):
        first = _line_points(rng, n, height, m)
        second = _line_points(rng, n, height, m, avoid=set(first[1:]), through=first[0])
        pts = [Point((c,)) for c in first + second[1:]]
        if len(set(pts)) != r:
            continue
        conf = Configuration(space, tuple(pts))
        curves = detect_curves(conf, m)
        if len(curves) == 2:
            return pts
    raise InfeasibleError("could not place two lines with the required incidences")


def _gen_triangle(rng, space, r, height):
    if not space.is_veronese or space.d != 3 or space.n < 2 or r != 3:
        raise InfeasibleError("three_points_d3 needs a Veronese space with d = 3, n >= 2 and r = 3")
    return _gen_generic(rng, space, 3, height)


def generate(kind, space, r, seed=0, height=10, factor=None):
    """Deterministic configuration of the requested kind.

    Coordinates are integers bounded by ``height`` in absolute value and the
    output depends only on the arguments.
    """
    if kind not in GENERATOR_KINDS:
        raise ParameterError(f"unknown generator kind {kind!r}")
    if r < 1:
        raise InfeasibleError("r must be at least 1")
    if height < 1:
        raise ParameterError("height must be at least 1")
    rng = random.Random(f"{kind}:{space.describe()}:{r}:{seed}:{height}:{factor}")
    if kind == "collinear":
        pts = _gen_curve(rng, space, r, height, factor)
    elif kind == "sv_ruling":
        if space.is_veronese:
            raise InfeasibleError("sv_ruling needs a Segre-Veronese space")
        pts = _gen_curve(rng, space, r, height, factor)
    elif kind == "generic":
        pts = _gen_generic(rng, space, r, height)
    elif kind == "two_lines":
        pts = _gen_two_lines(rng, space, r, height)
    else:
        pts = _gen_triangle(rng, space, r, height)
    return Configuration(space, tuple(pts))


def random_point(rng, space, height=10, avoid=()):
    """Uniform bounded-height point outside ``avoid``."""
    for _ in range(_RETRIES * 10):
        p = Point(tuple(_random_coords(rng, n, height) for n, _ in space.factors))
        if p not in avoid:
            return p
    raise InfeasibleError("no point found outside the excluded set")
