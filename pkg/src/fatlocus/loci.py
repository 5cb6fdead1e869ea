"""Base, strong base, contact and Terracini loci: exact tests, certificates, classifiers.

Every decision reduces to row-space membership in ``<2A>``, the span of the
tangent spaces at the points of ``A``. Whole curves are certified by sampling:
along a line (or e_i-curve) the residual of each annihilator against a
monomial or jet row is a binary form of degree at most ``D``, so vanishing at
``D + 1`` distinct parameters proves it vanishes on the whole curve.

Classifiers give exact answers in the ranges where a complete classification
is known (``r <= d`` on Veronese varieties, ``r <= t`` on Segre-Veronese
varieties, plus rational normal curves) and fall back to certificate search
elsewhere, which can only answer ``certified_member_only`` or ``undecided``.
"""
import random
from dataclasses import dataclass
from functools import lru_cache

from fatlocus.configuration import (
    CurveClass,
    collinear,
    curve_samples,
    detect_curves,
    random_point,
)
from fatlocus.embedding import as_point, fat_matrix, jet_rows, nu
from fatlocus.errors import (
    ConsistencyError,
    ParameterError,
    PreconditionError,
    QueryError,
    SpaceMismatchError,
)
from fatlocus.linalg import Span, rank_int

MEMBER = "member"
NON_MEMBER = "non_member"
CERTIFIED = "certified_member_only"
UNDECIDED = "undecided"

LOCI = ("B", "E", "E_tilde", "Terracini")


@lru_cache(maxsize=4096)
def fat_span(a):
    """Cached row space of the jet matrix of ``a``."""
    m = fat_matrix(a.space, a)
    return Span(m.rows, m.cols)


@dataclass(frozen=True)
class SpanSummary:
    deg_2A: int
    rank: int
    dim_span: int
    h0: int
    h1: int
    spans_ambient: bool

    def to_json(self):
        return {
            "deg_2A": self.deg_2A,
            "rank": self.rank,
            "dim_span": self.dim_span,
            "h0": self.h0,
            "h1": self.h1,
            "spans_ambient": self.spans_ambient,
        }


def span_summary(a):
    sp = fat_span(a)
    deg = a.r * (a.space.dim + 1)
    return SpanSummary(
        deg_2A=deg,
        rank=sp.rank,
        dim_span=sp.rank - 1,
        h0=a.space.ambient - sp.rank,
        h1=deg - sp.rank,
        spans_ambient=sp.rank == a.space.ambient,
    )


@dataclass(frozen=True)
class MembershipCertificate:
    verdict: bool
    kind: str
    query: object
    rank_base: int
    rank_augmented: int
    proper_span: bool

    @property
    def witnesses(self):
        """True when the query is a genuine witness (contained and span proper)."""
        return self.verdict and self.proper_span

    def to_json(self):
        return {
            "verdict": self.verdict,
            "kind": self.kind,
            "query": self.query.to_json(),
            "rank_base": self.rank_base,
            "rank_augmented": self.rank_augmented,
            "proper_span": self.proper_span,
        }


def _query(a, q):
    q = as_point(a.space, q)
    if q in a.points:
        raise QueryError(f"query point {q} belongs to the configuration")
    return q


def in_span_point(a, q):
    """Is ``nu(q)`` in ``<2A>``?"""
    q = _query(a, q)
    sp = fat_span(a)
    aug = sp.rank_with([nu(a.space, q)])
    return MembershipCertificate(aug == sp.rank, "point_in_span", q, sp.rank, aug,
                                 sp.rank < a.space.ambient)


def in_span_tangent(a, q):
    """Is the whole tangent space at ``q`` inside ``<2A>``?"""
    q = _query(a, q)
    sp = fat_span(a)
    aug = sp.rank_with(jet_rows(a.space, q).rows)
    return MembershipCertificate(aug == sp.rank, "tangent_in_span", q, sp.rank, aug,
                                 sp.rank < a.space.ambient)


def is_terracini(a):
    s = span_summary(a)
    return (not s.spans_ambient and s.rank < s.deg_2A), s


@dataclass(frozen=True)
class CurveCertificate:
    curve: CurveClass
    mode: str
    degree_bound: int
    samples: tuple
    verdict: bool
    first_failing_sample: object = None
    proper_span: bool = True

    def to_json(self):
        return {
            "curve": self.curve.to_json(),
            "mode": self.mode,
            "degree_bound": self.degree_bound,
            "samples": [p.to_json() for p in self.samples],
            "verdict": self.verdict,
            "first_failing_sample": None if self.first_failing_sample is None
            else self.first_failing_sample.to_json(),
            "proper_span": self.proper_span,
        }


def _check_curve_space(a, c):
    if c.space != a.space:
        raise SpaceMismatchError("curve and configuration live in different spaces")


def _certify(a, c, mode):
    _check_curve_space(a, c)
    sp = fat_span(a)
    bound = c.degree_bound
    samples = tuple(curve_samples(c, bound + 1))
    failing = None
    for p in samples:
        if mode == "base_locus":
            ok = sp.contains(nu(a.space, p))
        else:
            ok = sp.contains_all(jet_rows(a.space, p).rows)
        if not ok:
            failing = p
            break
    return CurveCertificate(c, mode, bound, samples, failing is None, failing,
                            sp.rank < a.space.ambient)


def certify_base_curve(a, c):
    """Prove (or refute) that ``nu(c)`` lies in ``<2A>``."""
    return _certify(a, c, "base_locus")


def certify_contact_curve(a, c):
    """Prove (or refute) that every tangent space along ``c`` lies in ``<2A>``."""
    return _certify(a, c, "tangential_contact")


@dataclass(frozen=True)
class LocusReport:
    which: str
    decision: str
    components: tuple = ()
    isolated_witnesses: tuple = ()
    theorem_case: str = ""

    @property
    def is_member(self):
        return self.decision in (MEMBER, CERTIFIED)

    def to_json(self):
        return {
            "which": self.which,
            "decision": self.decision,
            "components": [c.to_json() for c in self.components],
            "isolated_witnesses": [p.to_json() for p in self.isolated_witnesses],
            "theorem_case": self.theorem_case,
        }


def _report(which, decision, case, components=(), witnesses=()):
    return LocusReport(which, decision, tuple(components), tuple(witnesses), case)


def _all_non_member(case):
    return {w: _report(w, NON_MEMBER, case) for w in ("B", "E", "E_tilde")}


def _terracini_report(a):
    term, s = is_terracini(a)
    if term:
        case = "terracini-defective"
    elif s.spans_ambient:
        case = "terracini-spans-ambient"
    else:
        case = "terracini-expected-rank"
    return _report("Terracini", MEMBER if term else NON_MEMBER, case)


def _verified_base(a, curves, case):
    for c in curves:
        cert = certify_base_curve(a, c)
        if not (cert.verdict and cert.proper_span):
            raise ConsistencyError(f"{case}: base component {c} failed certification")
    return curves


def _verified_contact(a, curves, case):
    for c in curves:
        cert = certify_contact_curve(a, c)
        if not (cert.verdict and cert.proper_span):
            raise ConsistencyError(f"{case}: contact component {c} failed certification")
    return curves


def _ceil_half(x):
    return (x + 1) // 2


def _shared_points(inc1, inc2):
    return set(inc1) & set(inc2)


def classify_veronese(a, budget=200, seed=0):
    """Reports for ``B``, ``E``, ``E_tilde`` and ``Terracini`` on a Veronese space."""
    space = a.space
    if not space.is_veronese:
        raise SpaceMismatchError("classify_veronese needs a Veronese space")
    n, d, r = space.n, space.d, a.r
    out = {"Terracini": _terracini_report(a)}
    summ = span_summary(a)
    if summ.spans_ambient:
        out.update(_all_non_member("span-ambient"))
        return out
    if n == 1:
        out.update(_all_non_member("rnc-empty"))
        return out
    if r > d:
        out.update(_search_all(a, budget, seed))
        return out

    # B: exact in the classified range r <= d
    m = _ceil_half(d + 1)
    if 2 * r <= d:
        out["B"] = _report("B", NON_MEMBER, "Thm-Bb-below-threshold")
    else:
        found = detect_curves(a, m)
        curves = [c for c, _ in found]
        if not found:
            out["B"] = _report("B", NON_MEMBER, "Thm-Bb-no-line")
        elif len(found) == 1:
            case = "Thm-Bb-one-line"
            out["B"] = _report("B", MEMBER, case, _verified_base(a, curves, case))
        elif len(found) == 2:
            (_, i1), (_, i2) = found
            shared = _shared_points(i1, i2)
            if not (d % 2 == 1 and r == d and len(shared) == 1 and len(i1) == m and len(i2) == m):
                raise ConsistencyError("two rich lines violate the two-lines case conditions")
            case = "Thm-Bb-two-lines"
            out["B"] = _report("B", MEMBER, case, _verified_base(a, curves, case))
        elif len(found) == 3:
            if not (r == d == 3 and not collinear(a.points)):
                raise ConsistencyError("three rich lines outside the r = d = 3 triangle case")
            case = "Thm-Bb-r=d=3"
            out["B"] = _report("B", MEMBER, case, _verified_base(a, curves, case))
        else:
            raise ConsistencyError(f"{len(found)} rich lines contradict the classification")

    # E and E_tilde: nonempty only for r = d collinear, where the contact locus is the line
    if r < d:
        out["E"] = _report("E", NON_MEMBER, "Thm-Ee-below-d")
        out["E_tilde"] = _report("E_tilde", NON_MEMBER, "Thm-Ee-below-d")
    elif r >= 2 and collinear(a.points):
        case = "Thm-Ee-r=d-line"
        line = [CurveClass.canonical_through(space, a.points[0], a.points[1])]
        _verified_contact(a, line, case)
        out["E"] = _report("E", MEMBER, case, line)
        out["E_tilde"] = _report("E_tilde", MEMBER, case, line)
    else:
        out["E"] = _report("E", NON_MEMBER, "Thm-Ee-r=d-not-collinear")
        out["E_tilde"] = _report("E_tilde", NON_MEMBER, "Thm-Ee-r=d-not-collinear")
    return out


def _min_factors(space):
    t = space.t
    return [i for i, (_, d) in enumerate(space.factors) if d == t]


def _rulings_through(space, p, factors):
    """Lines through ``p`` spanning each linear fibre ``{p_others} x P^{n_i}``."""
    out = []
    for f in factors:
        n = space.factors[f][0]
        base = p.coords[f]
        rows = [list(base)]
        for j in range(n + 1):
            e = tuple(int(i == j) for i in range(n + 1))
            if rank_int(rows + [list(e)], n + 1) == len(rows) + 1:
                rows.append(list(e))
                blocks = list(p.coords)
                blocks[f] = e
                other = type(p)(tuple(blocks))
                out.append(CurveClass.canonical_through(space, p, other, f))
            if len(rows) == n + 1:
                break
    return out


def classify_sv(a, budget=200, seed=0):
    """Reports for ``B``, ``E``, ``E_tilde`` and ``Terracini`` on a Segre-Veronese space."""
    space = a.space
    if space.is_veronese:
        raise SpaceMismatchError("classify_sv needs a Segre-Veronese space")
    t, r = space.t, a.r
    out = {"Terracini": _terracini_report(a)}
    summ = span_summary(a)
    if summ.spans_ambient:
        out.update(_all_non_member("span-ambient"))
        return out
    factors = _min_factors(space)
    m = _ceil_half(t + 1)

    if r > t:
        out["B"] = search_base_witness(a, budget, seed)
    elif 2 * r <= t:
        out["B"] = _report("B", NON_MEMBER, "Thm-Bb-sv-below-threshold")
    elif r == t == 1:
        case = "Thm-Bb-sv-r=t=1-rulings"
        curves = _rulings_through(space, a.points[0], factors)
        out["B"] = _report("B", MEMBER, case, _verified_base(a, curves, case))
    else:
        found = detect_curves(a, m, factors)
        curves = [c for c, _ in found]
        if not found:
            out["B"] = _report("B", NON_MEMBER, "Thm-Bb-sv-no-curve")
        elif len(found) == 1:
            case = "Thm-Bb-sv-one-curve"
            out["B"] = _report("B", MEMBER, case, _verified_base(a, curves, case))
        elif len(found) == 2:
            (c1, i1), (c2, i2) = found
            shared = _shared_points(i1, i2)
            ok = t % 2 == 1 and r == t and len(shared) == 1 and len(i1) == m and len(i2) == m
            if c1.factor == c2.factor:
                ok = ok and space.factors[c1.factor][0] >= 2
            if not ok:
                raise ConsistencyError("two rich curves violate the two-curves case conditions")
            case = "Thm-Bb-sv-two-curves"
            out["B"] = _report("B", MEMBER, case, _verified_base(a, curves, case))
        elif len(found) == 3:
            same = len({c.factor for c in curves}) == 1
            if not (r == t == 3 and same and not collinear(a.points, curves[0].factor)):
                raise ConsistencyError("three rich curves outside the r = t = 3 case")
            case = "Thm-Bb-sv-r=t=3"
            out["B"] = _report("B", MEMBER, case, _verified_base(a, curves, case))
        else:
            raise ConsistencyError(f"{len(found)} rich curves contradict the classification")

    if r <= t:
        out["E"] = _report("E", NON_MEMBER, "Thm-Ee-sv-at-most-t")
        out["E_tilde"] = _report("E_tilde", NON_MEMBER, "Thm-Ee-sv-at-most-t")
    else:
        e, et = _search_contact(a, budget, seed, first=(t + 1, factors))
        out["E"] = e
        out["E_tilde"] = et
    return out


def classify(a, budget=200, seed=0):
    if a.space.is_veronese:
        return classify_veronese(a, budget, seed)
    return classify_sv(a, budget, seed)


def _search_all(a, budget, seed):
    e, et = _search_contact(a, budget, seed)
    return {"B": search_base_witness(a, budget, seed), "E": e, "E_tilde": et}


def _all_curves(a):
    """Detected curves from the highest incidence threshold down to 2, deduplicated."""
    if a.r < 2:
        return []
    seen = {}
    for c, inc in detect_curves(a, 2):
        seen[c] = inc
    order = sorted(seen.items(), key=lambda item: (-len(item[1]), item[0].key()))
    return [c for c, _ in order]


def _curve_queries(a, curves, rng, budget):
    pts = []
    if not curves:
        return pts
    taken = set(a.points)
    for i in range(budget):
        c = curves[i % len(curves)]
        p = c.point_at(rng.randint(-1000, 1000))
        if p not in taken:
            pts.append(p)
    return pts


def search_base_witness(a, budget=200, seed=0):
    """Look for points of ``B(A)``; never concludes non-membership."""
    if budget < 0:
        raise ParameterError("budget must be non-negative")
    if span_summary(a).spans_ambient:
        return _report("B", UNDECIDED, "spans-ambient")
    curves = _all_curves(a)
    components = [c for c in curves if certify_base_curve(a, c).verdict]
    rng = random.Random(f"base:{seed}")
    witnesses = []
    taken = set(a.points)
    queries = _curve_queries(a, [c for c in curves if c not in components], rng, budget)
    queries += [random_point(rng, a.space, avoid=taken) for _ in range(budget)]
    sp = fat_span(a)
    for q in queries:
        if q in taken or any(c.contains(q) for c in components):
            continue
        if sp.contains(nu(a.space, q)):
            witnesses.append(q)
            taken.add(q)
    if components or witnesses:
        return _report("B", CERTIFIED, "search-certified", components, witnesses)
    return _report("B", UNDECIDED, "search-exhausted")


def search_contact_witness(a, budget=200, seed=0):
    """Look for points of the contact locus; returns reports for ``E`` and ``E_tilde``."""
    return _search_contact(a, budget, seed)


def _search_contact(a, budget, seed, first=None):
    if span_summary(a).spans_ambient:
        return _report("E", UNDECIDED, "spans-ambient"), _report("E_tilde", UNDECIDED, "spans-ambient")
    curves = []
    if first is not None:
        count, factors = first
        curves = [c for c, _ in detect_curves(a, count, factors)]
    curves += [c for c in _all_curves(a) if c not in curves]
    components = [c for c in curves if certify_contact_curve(a, c).verdict]
    rng = random.Random(f"contact:{seed}")
    witnesses = []
    taken = set(a.points)
    sp = fat_span(a)
    for q in _curve_queries(a, [c for c in curves if c not in components], rng, budget):
        if q in taken:
            continue
        if sp.contains_all(jet_rows(a.space, q).rows):
            witnesses.append(q)
            taken.add(q)
    if components:
        case = "contact-curve-certified"
        e = _report("E", CERTIFIED, case, components, witnesses)
        et = _report("E_tilde", CERTIFIED, case, components)
    elif witnesses:
        e = _report("E", CERTIFIED, "contact-point-certified", (), witnesses)
        et = _report("E_tilde", UNDECIDED, "no-contact-curve-found")
    else:
        e = _report("E", UNDECIDED, "search-exhausted")
        et = _report("E_tilde", UNDECIDED, "search-exhausted")
    return e, et


def check_terracini_augmentation(a, p):
    """For ``p`` in ``B(A)``, is ``A + p`` in the Terracini locus?

    A point of ``<2A>`` shares a direction with ``<2A>`` inside its tangent
    space, so the answer must be yes whenever the augmented span is proper.
    """
    cert = in_span_point(a, p)
    if not cert.witnesses:
        raise PreconditionError(f"{p} is not a base-locus witness of the configuration")
    b = a.extend([cert.query])
    term, summ = is_terracini(b)
    if not term and not summ.spans_ambient:
        raise ConsistencyError(f"augmenting by {p} kept the expected span dimension")
    return term


def verify_extension(a, f, locus):
    """Does ``A + F`` keep the membership witnessed for ``A``?

    Returns ``False`` only when the enlarged span fills the ambient space; a
    failure with a proper span raises :class:`ConsistencyError`.
    """
    if locus not in ("B", "E", "E_tilde"):
        raise ParameterError(f"unknown locus {locus!r}")
    extra = [as_point(a.space, p) for p in f]
    if len(set(extra)) != len(extra):
        raise QueryError("extension points must be distinct")
    for p in extra:
        if p in a.points:
            raise QueryError(f"extension point {p} already belongs to the configuration")
    report = classify(a)[locus]
    if not report.is_member:
        raise PreconditionError(f"configuration carries no verified {locus} membership")
    if locus != "E_tilde":
        test = in_span_point if locus == "B" else in_span_tangent
        for p in extra:
            if test(a, p).verdict:
                raise QueryError(f"extension point {p} lies in the witnessed locus")
    b = a.extend(extra)
    if span_summary(b).spans_ambient:
        return False
    for c in report.components:
        cert = certify_base_curve(b, c) if locus == "B" else certify_contact_curve(b, c)
        if not cert.verdict:
            raise ConsistencyError(f"inherited component {c} lost under extension")
    for w in report.isolated_witnesses:
        if w in b.points:
            continue
        cert = in_span_point(b, w) if locus == "B" else in_span_tangent(b, w)
        if not cert.verdict:
            raise ConsistencyError(f"inherited witness {w} lost under extension")
    return True
