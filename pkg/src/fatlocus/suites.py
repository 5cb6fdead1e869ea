"""Named verification suites: seeded families of configurations with exact checks.

Each suite returns a :class:`SuiteResult` whose JSON form is canonical, so two
runs with the same seed produce byte-identical output.
"""
import hashlib
import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

from fatlocus.configuration import Configuration, CurveClass, generate, random_point
from fatlocus.critical import build_critical_scheme, verify_critical_scheme
from fatlocus.embedding import (
    EmbeddingSpace,
    Fat,
    Simple,
    fat_matrix,
    make_jet2,
    nu,
    scheme_degree,
    scheme_matrix,
)
from fatlocus.errors import ConsistencyError, FatlocusError
from fatlocus.identifiability import hessian_criterion
from fatlocus.linalg import kernel_basis, rank_int
from fatlocus.loci import (
    certify_base_curve,
    certify_contact_curve,
    check_terracini_augmentation,
    classify,
    fat_span,
    in_span_point,
    in_span_tangent,
    search_base_witness,
    span_summary,
)

V = EmbeddingSpace.veronese
SV = EmbeddingSpace.segre_veronese

SV_FAMILIES = (
    SV([(1, 1), (1, 1)]),
    SV([(1, 1), (1, 1), (1, 1)]),
    SV([(1, 2), (1, 2)]),
    SV([(1, 2), (1, 3)]),
    SV([(2, 2), (1, 3)]),
)

MAX_FAILURES = 5


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class Check:
    """Accumulates instance outcomes for one named property."""

    def __init__(self, name):
        self.name = name
        self.instances = 0
        self.failures = []
        self.failed = 0
        self._hash = hashlib.sha256()

    def record(self, ok, detail):
        self.instances += 1
        self._hash.update(canonical_json(detail).encode())
        self._hash.update(b"1" if ok else b"0")
        if not ok:
            self.failed += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append(detail)

    @property
    def passed(self):
        return self.instances > 0 and not self.failed

    def to_json(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "instances": self.instances,
            "failed": self.failed,
            "failures": self.failures,
            "digest": self._hash.hexdigest(),
        }


class SuiteResult:
    def __init__(self, name, seed):
        self.name = name
        self.seed = seed
        self.checks = {}

    def check(self, name):
        if name not in self.checks:
            self.checks[name] = Check(name)
        return self.checks[name]

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def to_json(self):
        return {
            "suite": self.name,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [self.checks[k].to_json() for k in sorted(self.checks)],
        }


def _threads():
    try:
        return max(1, int(os.environ.get("FATLOCUS_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items):
    items = list(items)
    workers = _threads()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _guard(fn):
    """Run ``fn``; a library error becomes a failure record instead of an abort."""
    try:
        return fn(), None
    except (FatlocusError, ConsistencyError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _conf(a):
    return {"space": a.space.describe(), "points": [p.to_json() for p in a.points]}


def _ceil_half(x):
    return (x + 1) // 2


def _off_config_point(c, a, start=2):
    s = start
    while True:
        p = c.point_at(s)
        if p not in a.points:
            return p
        s += 1


# ----------------------------------------------------------------- instances

def bb_collinear_instances(seed=0):
    """Collinear configurations at the base-locus threshold on P^2 and P^3."""
    out = []
    for n in (2, 3):
        for d in range(2, 7):
            r = _ceil_half(d + 1)
            for s in range(10):
                a = generate("collinear", V(n, d), max(r, 2), seed + s)
                line = CurveClass.canonical_through(a.space, a.points[0], a.points[1])
                a = Configuration(a.space, a.points[:r])
                out.append((a, line))
    return out


def triangle_instances(seed=0):
    out = []
    for n in (2, 3):
        for s in range(20):
            out.append(generate("three_points_d3", V(n, 3), 3, seed + s))
    return out


def _on_curve(space, r, seed):
    """``r`` points on an e_i-curve of minimal degree, plus that curve."""
    a = generate("sv_ruling", space, max(r, 2), seed)
    curve = CurveClass.canonical_through(space, a.points[0], a.points[1])
    return Configuration(space, a.points[:r]), curve


def sv_base_instances(seed=0):
    """``(A, curve)`` pairs whose curve lies in ``B(A)``: rulings for r = t = 1 and
    threshold-many points on a minimal-degree e_i-curve."""
    out = []
    for space in SV_FAMILIES:
        t = space.t
        for s in range(10):
            if t == 1:
                p = random_point(random.Random(f"ruling:{space.describe()}:{seed + s}"), space)
                a = Configuration(space, (p,))
                for c in classify(a)["B"].components:
                    out.append(("ruling", a, c))
            a, curve = _on_curve(space, _ceil_half(t + 1), seed + s)
            out.append(("threshold", a, curve))
    return out


# -------------------------------------------------------------------- suites

def suite_rnc_empty(seed=0):
    res = SuiteResult("rnc-empty", seed)
    chk = res.check("rank-equals-min(2r+1,d+1)")
    proper = res.check("no-point-in-proper-span")
    for d in range(2, 7):
        space = V(1, d)
        for r in range(1, d + 1):
            rng = random.Random(f"rnc:{d}:{r}:{seed}")
            for i in range(100):
                a = generate("generic", space, r, seed * 100000 + i * 10 + r)
                q = random_point(rng, space, avoid=set(a.points))
                rows = [list(x) for x in fat_matrix(space, a).rows] + [list(nu(space, q))]
                rank = rank_int(rows, space.ambient)
                expected = min(2 * r + 1, d + 1)
                detail = {"d": d, "r": r, "A": _conf(a)["points"], "q": q.to_json(), "rank": rank}
                chk.record(rank == expected, detail)
                cert = in_span_point(a, q)
                proper.record(not cert.witnesses, detail)
    return res


def suite_veronese_bb_threshold(seed=0):
    res = SuiteResult("veronese-bb-threshold", seed)
    cert_chk = res.check("threshold-line-certified")
    cls_chk = res.check("threshold-classified-member")
    for a, line in bb_collinear_instances(seed):
        cert = certify_base_curve(a, line)
        detail = _conf(a)
        cert_chk.record(cert.verdict and cert.proper_span, detail)
        rep, err = _guard(lambda: classify(a)["B"])
        cls_chk.record(err is None and rep.decision == "member" and line in rep.components,
                       dict(detail, error=err))

    below = res.check("below-threshold-non-member")
    search = res.check("below-threshold-search-undecided")

    def run(job):
        n, d, r, kind, s = job
        a = generate(kind, V(n, d), r, seed + s)
        rep, err = _guard(lambda: classify(a)["B"])
        srch, err2 = _guard(lambda: search_base_witness(a, 200, seed + s))
        return a, kind, rep, err, srch, err2

    jobs = [(n, d, r, kind, s)
            for n in (2, 3) for d in range(2, 7) for r in range(1, d // 2 + 1)
            for kind in ("generic", "collinear") for s in range(10)]
    for a, kind, rep, err, srch, err2 in _map(run, jobs):
        detail = dict(_conf(a), kind=kind, error=err or err2)
        below.record(err is None and rep.decision == "non_member", detail)
        search.record(err2 is None and srch.decision == "undecided", detail)
    return res


def _tangent_queries(a, rng, count=50):
    """Queries concentrated where contact is most plausible: lines through pairs of A."""
    lines = [CurveClass.canonical_through(a.space, p, q) for p, q in combinations(a.points, 2)]
    taken = set(a.points)
    out = []
    i = 0
    while len(out) < count:
        if lines and i % 2 == 0:
            p = lines[(i // 2) % len(lines)].point_at(rng.randint(-50, 50))
        else:
            p = random_point(rng, a.space, avoid=taken)
        i += 1
        if p not in taken:
            out.append(p)
    return out


def suite_veronese_ee(seed=0):
    res = SuiteResult("veronese-ee-r-eq-d", seed)
    contact = res.check("d-collinear-contact-certified")
    member = res.check("d-collinear-classified-member")
    nonmem = res.check("non-member-classified")
    queries = res.check("non-member-tangent-queries-false")
    for n in (2, 3):
        for d in range(2, 6):
            for s in range(10):
                a = generate("collinear", V(n, d), d, seed + s)
                line = CurveClass.canonical_through(a.space, a.points[0], a.points[1])
                cert = certify_contact_curve(a, line)
                contact.record(cert.verdict and cert.proper_span, _conf(a))
                rep, err = _guard(lambda: classify(a)["E_tilde"])
                member.record(err is None and rep.decision == "member" and rep.components == (line,),
                              dict(_conf(a), error=err))
                cases = [("collinear", d - 1)]
                if d >= 3:  # any two points are collinear
                    cases.append(("generic", d))
                for kind, r in cases:
                    b = generate(kind, V(n, d), r, seed + s)
                    rep, err = _guard(lambda: classify(b))
                    ok = err is None and rep["E"].decision == "non_member" \
                        and rep["E_tilde"].decision == "non_member"
                    nonmem.record(ok, dict(_conf(b), kind=kind, error=err))
                    rng = random.Random(f"tangent:{n}:{d}:{kind}:{seed + s}")
                    hits = [q.to_json() for q in _tangent_queries(b, rng) if in_span_tangent(b, q).verdict]
                    queries.record(not hits, dict(_conf(b), kind=kind, hits=hits))
    return res


def suite_veronese_d3(seed=0):
    res = SuiteResult("veronese-d3-triangles", seed)
    three = res.check("three-pair-lines")
    recert = res.check("components-recertified")
    enon = res.check("E-non-member")
    for a in triangle_instances(seed):
        rep, err = _guard(lambda: classify(a))
        detail = dict(_conf(a), error=err)
        if err is not None:
            for chk in (three, recert, enon):
                chk.record(False, detail)
            continue
        pair_lines = {CurveClass.canonical_through(a.space, p, q) for p, q in combinations(a.points, 2)}
        b = rep["B"]
        three.record(b.decision == "member" and len(b.components) == 3 and set(b.components) == pair_lines,
                     detail)
        recert.record(all(certify_base_curve(a, c).verdict for c in b.components), detail)
        enon.record(rep["E"].decision == "non_member", detail)
    return res


def _critical_cases(seed):
    """``(A, q, line or None)`` with ``q`` on a certified base component."""
    out = []
    for a, line in bb_collinear_instances(seed):
        out.append((a, _off_config_point(line, a), line))
    for a in triangle_instances(seed):
        for c in classify(a)["B"].components:
            out.append((a, _off_config_point(c, a), c))
    return out


def suite_critical(seed=0):
    res = SuiteResult("critical-schemes", seed)
    built = res.check("built-and-verified-C1-C5")
    on_line = res.check("support-on-line")
    bounded = res.check("degree-at-most-2r+1")

    def run(case):
        a, q, line = case
        z, err = _guard(lambda: build_critical_scheme(a, q))
        return a, q, line, z, err

    for a, q, line, z, err in _map(run, _critical_cases(seed)):
        detail = dict(_conf(a), q=q.to_json(), error=err)
        if z is None:
            for chk in (built, on_line, bounded):
                chk.record(False, detail)
            continue
        detail["scheme"] = z.to_json()
        built.record(verify_critical_scheme(z).passed, detail)
        on_line.record(all(line.contains(p) for p in z.support()), detail)
        bounded.record(z.degree <= 2 * a.r + 1, detail)
    return res


def _augmentation_cases(seed):
    cases = [(a, q) for a, q, _ in _critical_cases(seed)]
    for _, a, c in sv_base_instances(seed):
        cases.append((a, _off_config_point(c, a)))
    return cases


def suite_terracini_augmentation(seed=0):
    res = SuiteResult("terracini-augmentation", seed)
    aug = res.check("augmented-is-terracini")
    ambient = res.check("augmented-span-classified")
    for a, p in _augmentation_cases(seed):
        b = a.extend([p])
        proper = not span_summary(b).spans_ambient
        out, err = _guard(lambda: check_terracini_augmentation(a, p))
        detail = dict(_conf(a), p=p.to_json(), proper=proper, error=err)
        ambient.record(err is None, detail)
        if proper:
            aug.record(err is None and out is True, detail)
    return res


def suite_sv_bb(seed=0):
    res = SuiteResult("sv-bb-threshold", seed)
    rulings = res.check("r=t=1-rulings-certified")
    count = res.check("r=t=1-all-rulings-listed")
    thresh = res.check("threshold-curve-certified")
    for kind, a, c in sv_base_instances(seed):
        cert = certify_base_curve(a, c)
        detail = dict(_conf(a), curve=c.to_json())
        (rulings if kind == "ruling" else thresh).record(cert.verdict and cert.proper_span, detail)
    for space in SV_FAMILIES:
        if space.t != 1:
            continue
        for s in range(10):
            p = random_point(random.Random(f"ruling:{space.describe()}:{seed + s}"), space)
            a = Configuration(space, (p,))
            comps = classify(a)["B"].components
            expected = sum(n for n, d in space.factors if d == 1)
            count.record(len(comps) == expected and len(set(c.factor for c in comps)) == len(space.factors),
                         _conf(a))
    return res


def suite_sv_contact(seed=0):
    res = SuiteResult("sv-contact-t-plus-1", seed)
    enon = res.check("r=t-E-non-member")
    queries = res.check("r=t-tangent-queries-false")
    contact = res.check("r=t+1-contact-certified")
    for space in SV_FAMILIES:
        t = space.t
        for s in range(10):
            a, curve = _on_curve(space, t, seed + s)
            rep, err = _guard(lambda: classify(a))
            enon.record(err is None and rep["E"].decision == "non_member", dict(_conf(a), error=err))
            rng = random.Random(f"sv-tangent:{space.describe()}:{seed + s}")
            qs = []
            taken = set(a.points)
            while len(qs) < 50:
                p = curve.point_at(rng.randint(-50, 50)) if len(qs) % 2 == 0 else random_point(rng, space)
                if p not in taken:
                    qs.append(p)
            hits = [q.to_json() for q in qs if in_span_tangent(a, q).verdict]
            queries.record(not hits, dict(_conf(a), hits=hits))
            b, curve = _on_curve(space, t + 1, seed + s)
            cert = certify_contact_curve(b, curve)
            contact.record(cert.verdict, dict(_conf(b), proper_span=cert.proper_span))
    return res


COHOMOLOGY_SPACES = (V(1, 4), V(2, 2), V(2, 3), V(2, 4), V(3, 3)) + SV_FAMILIES


def random_scheme(rng, space, height=10):
    """Random scheme of fat points, degree-2 jets and simple points with distinct supports."""
    size = rng.randint(1, 4)
    seen = set()
    comps = []
    while len(comps) < size:
        p = random_point(rng, space, height, avoid=seen)
        seen.add(p)
        kind = rng.choice(("fat", "jet2", "simple"))
        if kind == "fat":
            comps.append(Fat(p))
        elif kind == "simple":
            comps.append(Simple(p))
        else:
            while True:
                blocks = [[rng.randint(-height, height) for _ in range(n + 1)] for n, _ in space.factors]
                try:
                    comps.append(make_jet2(space, p, blocks))
                    break
                except FatlocusError:
                    continue
    return comps


def suite_cohomology(seed=0):
    res = SuiteResult("cohomology", seed)
    agree = res.check("h1-rank-equals-h1-kernel")
    rng = random.Random(f"cohomology:{seed}")
    for i in range(500):
        space = COHOMOLOGY_SPACES[i % len(COHOMOLOGY_SPACES)]
        comps = random_scheme(rng, space)
        m = scheme_matrix(space, comps)
        deg = scheme_degree(space, comps)
        h1_rank = deg - m.rank()
        h0 = len(kernel_basis(m.matrix))
        h1_kernel = deg - space.ambient + h0
        agree.record(h1_rank == h1_kernel and h1_rank >= 0,
                     {"space": space.describe(), "scheme": [c.to_json() for c in comps],
                      "h1": h1_rank, "h0": h0})
    return res


HESSIAN_CASES = (
    ("veronese:2:5 generic r=3", V(2, 5), "generic", 3, "identifiable_modulo_smoothness"),
    ("veronese:2:4 collinear r=3", V(2, 4), "collinear", 3, "inconclusive"),
    ("veronese:2:6 generic r=9 (deny-list)", V(2, 6), "generic", 9, "inconclusive"),
    ("veronese:3:4 generic r=8 (deny-list)", V(3, 4), "generic", 8, "inconclusive"),
    ("veronese:5:3 generic r=9 (deny-list)", V(5, 3), "generic", 9, "inconclusive"),
    ("veronese:2:2 generic r=3", V(2, 2), "generic", 3, "not_applicable"),
)


def suite_hessian(seed=0):
    res = SuiteResult("hessian", seed)
    for label, space, kind, r, expected in HESSIAN_CASES:
        chk = res.check(label)
        a = generate(kind, space, r, seed)
        rep, err = _guard(lambda: hessian_criterion(a))
        got = rep.conclusion if rep is not None else None
        chk.record(got == expected, dict(_conf(a), expected=expected, conclusion=got, error=err,
                                         report=rep.to_json() if rep else None))
    return res


SUITES = {
    "rnc-empty": suite_rnc_empty,
    "veronese-bb-threshold": suite_veronese_bb_threshold,
    "veronese-ee-r-eq-d": suite_veronese_ee,
    "veronese-d3-triangles": suite_veronese_d3,
    "critical-schemes": suite_critical,
    "terracini-augmentation": suite_terracini_augmentation,
    "sv-bb-threshold": suite_sv_bb,
    "sv-contact-t-plus-1": suite_sv_contact,
    "cohomology": suite_cohomology,
    "hessian": suite_hessian,
}


def run_suite(name, seed=0, fresh=True):
    """Run one suite; ``fresh`` clears span caches first so reruns recompute everything."""
    if name not in SUITES:
        raise KeyError(name)
    if fresh:
        fat_span.cache_clear()
    return SUITES[name](seed)
