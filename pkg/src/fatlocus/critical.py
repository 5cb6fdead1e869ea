"""Critical schemes for a pair ``(A, q)`` with ``q`` in the base locus of ``A``.

A critical scheme is ``Z = Z' + q`` where ``Z'`` is supported on ``A``, every
component has degree at most 2, ``q`` lies in ``<Z'>`` and no maximal proper
subscheme of ``Z'`` still spans ``q``. Such a scheme has ``h^1 = 1``.
"""
from dataclasses import dataclass

from fatlocus.embedding import (
    Fat,
    Jet2,
    Simple,
    as_point,
    jet_rows,
    make_jet2,
    nu,
    scheme_degree,
    scheme_matrix,
)
from fatlocus.errors import ConsistencyError, NotInBaseLocusError, SchemeError
from fatlocus.linalg import Span, rowspace_intersection, solve_combination
from fatlocus.loci import fat_span, in_span_point


@dataclass(frozen=True)
class CriticalScheme:
    space: object
    components: tuple
    q: object

    @property
    def degree(self):
        return scheme_degree(self.space, self.components) + 1

    @property
    def full(self):
        """Components of ``Z`` including the simple point at ``q``."""
        return self.components + (Simple(self.q),)

    def support(self):
        return [c.point for c in self.components]

    def to_json(self):
        return {
            "components": [c.to_json() for c in self.components],
            "q": self.q.to_json(),
            "degree": self.degree,
        }


@dataclass(frozen=True)
class VerificationReport:
    degree: int
    rank: int
    h1: int
    well_formed: bool
    c1_dimension: bool
    c2_h1_one: bool
    c3_q_spanned: bool
    c4_minimal: bool
    c5_subschemes_independent: bool

    @property
    def passed(self):
        return all((self.well_formed, self.c1_dimension, self.c2_h1_one, self.c3_q_spanned,
                    self.c4_minimal, self.c5_subschemes_independent))

    def to_json(self):
        return {
            "degree": self.degree,
            "rank": self.rank,
            "h1": self.h1,
            "well_formed": self.well_formed,
            "C1": self.c1_dimension,
            "C2": self.c2_h1_one,
            "C3": self.c3_q_spanned,
            "C4": self.c4_minimal,
            "C5": self.c5_subschemes_independent,
            "passed": self.passed,
        }


def _reduce(comp):
    if isinstance(comp, Jet2):
        return Simple(comp.point)
    if isinstance(comp, Simple):
        return None
    raise SchemeError("only simple and degree-2 components can be reduced one step")


def _maximal(components):
    out = []
    for i, comp in enumerate(components):
        smaller = _reduce(comp)
        middle = [smaller] if smaller is not None else []
        out.append(list(components[:i]) + middle + list(components[i + 1:]))
    return out


def maximal_proper_subschemes(z):
    """Single-step degree reductions of ``Z - q``, one per component."""
    comps = z.components if isinstance(z, CriticalScheme) else tuple(z)
    return _maximal(comps)


def _span(space, components):
    m = scheme_matrix(space, components)
    return Span(m.rows, m.cols), m


def _spans(space, components, target):
    if not components:
        return False
    return _span(space, components)[0].contains(target)


def _h1(space, components):
    if not components:
        return 0
    return scheme_degree(space, components) - scheme_matrix(space, components).rank()


def verify_critical_scheme(z):
    space = z.space
    q = z.q
    target = nu(space, q)
    supports = [c.point for c in z.components]
    well = (len(set(supports)) == len(supports) and q not in supports
            and all(isinstance(c, (Simple, Jet2)) for c in z.components))
    if not well:
        return VerificationReport(z.degree, 0, 0, False, False, False, False, False, False)
    full = list(z.full)
    rank = scheme_matrix(space, full).rank()
    deg = z.degree
    h1 = deg - rank
    c3 = _spans(space, list(z.components), target)
    c4 = all(not _spans(space, w, target) for w in _maximal(z.components))
    # maximal proper subschemes of Z: drop q, or shrink one component of Z - q
    subs = [list(z.components)] + [w + [Simple(q)] for w in _maximal(z.components)]
    c5 = all(_h1(space, w) == 0 for w in subs)
    return VerificationReport(deg, rank, h1, True, rank == deg - 1, h1 == 1, c3, c4, c5)


def _jet2_toward(space, p, rest, q_row):
    """Smallest curvilinear scheme at ``p`` keeping ``q`` in the span, as a Jet2."""
    jets = jet_rows(space, p).rows
    rest_span, rest_m = _span(space, rest) if rest else (Span([], space.ambient), None)
    other = (list(rest_m.rows) if rest_m is not None else []) + [q_row]
    inter = rowspace_intersection([list(r) for r in jets], other)
    for w in inter:
        if rest_span.contains(w):
            continue
        coeffs = solve_combination(jets, w)
        if coeffs is None:
            raise ConsistencyError("intersection vector outside the tangent space")
        blocks = []
        pos = 0
        for n, _ in space.factors:
            blocks.append(coeffs[pos:pos + n + 1])
            pos += n + 1
        return make_jet2(space, p, blocks)
    return None


def build_critical_scheme(a, q):
    """Construct a critical scheme for ``(A, q)``.

    ``A`` is first shrunk to a minimal subset whose double points still span
    ``q``; each double point is then cut down to the smallest subscheme (none,
    a point, or a point with one tangent direction) that keeps ``q`` spanned.
    """
    space = a.space
    q = as_point(space, q)
    cert = in_span_point(a, q)
    if not cert.witnesses:
        raise NotInBaseLocusError(f"{q} is not in the base locus of the configuration")
    target = nu(space, q)

    support = list(a.points)
    for p in a.points:
        trial = [x for x in support if x != p]
        if trial and fat_span(type(a)(space, tuple(trial))).contains(target):
            support = trial

    comps = [Fat(p) for p in support]
    for i, p in enumerate(support):
        rest = [c for j, c in enumerate(comps) if j != i and c is not None]
        if _spans(space, rest, target):
            comps[i] = None
            continue
        if _spans(space, rest + [Simple(p)], target):
            comps[i] = Simple(p)
            continue
        jet = _jet2_toward(space, p, rest, target)
        if jet is None or not _spans(space, rest + [jet], target):
            raise ConsistencyError(f"no degree-2 subscheme at {p} keeps the query spanned")
        comps[i] = jet
    comps = [c for c in comps if c is not None]

    # later reductions can make earlier components reducible again
    changed = True
    while changed:
        changed = False
        for w in _maximal(comps):
            if _spans(space, w, target):
                comps = w
                changed = True
                break

    z = CriticalScheme(space, tuple(comps), q)
    report = verify_critical_scheme(z)
    if not report.passed:
        raise ConsistencyError(f"constructed scheme failed verification: {report.to_json()}")
    return z
