import random

import pytest

from fatlocus.configuration import (
    Configuration,
    CurveClass,
    curve_samples,
    detect_curves,
    generate,
    random_point,
)
from fatlocus.embedding import EmbeddingSpace, fat_matrix, jet_rows, nu
from fatlocus.errors import ConsistencyError, PreconditionError, QueryError, SpaceMismatchError
from fatlocus.linalg import QMatrix, kernel_basis, stack
from fatlocus.loci import (
    certify_base_curve,
    certify_contact_curve,
    check_terracini_augmentation,
    classify,
    classify_sv,
    classify_veronese,
    in_span_point,
    in_span_tangent,
    is_terracini,
    search_base_witness,
    span_summary,
    verify_extension,
)

V = EmbeddingSpace.veronese
SV = EmbeddingSpace.segre_veronese
SEGRE2 = SV([(1, 1), (1, 1)])
SEGRE3 = SV([(1, 1), (1, 1), (1, 1)])


def conf(space, *pts):
    return Configuration(space, tuple(pts))


def line_of(a):
    return CurveClass.canonical_through(a.space, a.points[0], a.points[1])


COLLINEAR3_D4 = conf(V(2, 4), (1, 0, 0), (0, 1, 0), (1, 1, 0))
TRIANGLE_D3 = conf(V(2, 3), (1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_span_summary_examples():
    s = span_summary(COLLINEAR3_D4)
    assert (s.deg_2A, s.rank, s.h0, s.h1, s.dim_span) == (9, 8, 7, 1, 7)
    s = span_summary(conf(V(2, 2), (1, 0, 0)))
    assert (s.deg_2A, s.rank, s.h0, s.h1) == (3, 3, 3, 0)
    s = span_summary(conf(V(1, 4), (1, 0), (0, 1)))
    assert (s.deg_2A, s.rank, s.h0, s.h1) == (4, 4, 1, 0)
    assert s.h0 + s.deg_2A - s.h1 == 5


def test_in_span_point_examples():
    a = conf(V(2, 2), (1, 0, 0), (0, 1, 0))
    cert = in_span_point(a, (1, 1, 0))
    assert cert.verdict and cert.proper_span and cert.rank_base == cert.rank_augmented == 5
    cert = in_span_point(a, (0, 0, 1))
    assert not cert.verdict and cert.rank_augmented == cert.rank_base + 1
    with pytest.raises(QueryError):
        in_span_point(a, (2, 0, 0))


def test_rational_normal_curve_never_has_witnesses():
    rng = random.Random(0)
    for d in range(2, 7):
        for r in range(1, d + 1):
            a = generate("generic", V(1, d), r, seed=r)
            q = random_point(rng, a.space, avoid=set(a.points))
            cert = in_span_point(a, q)
            assert not cert.witnesses
            assert cert.rank_augmented == min(2 * r + 1, d + 1)


def test_in_span_tangent_examples():
    a = conf(V(2, 3), (1, 0, 0), (0, 1, 0), (1, 1, 0))
    assert in_span_tangent(a, (1, 2, 0)).verdict
    b = conf(V(2, 3), (1, 0, 0), (0, 1, 0))
    assert not in_span_tangent(b, (1, 2, 0)).verdict
    assert in_span_point(b, (1, 2, 0)).verdict  # still in the base locus
    assert not in_span_tangent(TRIANGLE_D3, (1, 1, 0)).verdict


def test_is_terracini_examples():
    assert is_terracini(COLLINEAR3_D4)[0]
    assert not is_terracini(conf(V(2, 2), (1, 0, 0)))[0]
    term, s = is_terracini(conf(V(2, 3), (1, 0, 0), (0, 1, 0), (1, 1, 0)))
    assert term and s.rank == 7


def test_certify_base_curve_examples():
    for d in range(2, 7):
        m = (d + 2) // 2
        a = generate("collinear", V(2, d), max(m, 2), seed=d)
        line = line_of(a)
        cert = certify_base_curve(Configuration(a.space, a.points[:m]), line)
        assert cert.verdict and len(cert.samples) == d + 1
        if m >= 2:
            fewer = Configuration(a.space, a.points[:m - 1])
            cert = certify_base_curve(fewer, line)
            assert not cert.verdict and cert.first_failing_sample is not None
    p = conf(SEGRE3, ((1, 2), (3, 1), (1, -1)))
    comps = classify(p)["B"].components
    assert len(comps) == 3
    assert all(certify_base_curve(p, c).verdict for c in comps)


def test_certify_contact_curve_examples():
    for n, d in ((2, 3), (3, 4), (2, 5)):
        a = generate("collinear", V(n, d), d, seed=1)
        assert certify_contact_curve(a, line_of(a)).verdict
    b = generate("sv_ruling", SV([(1, 2), (1, 3)]), 3, seed=2)
    assert certify_contact_curve(b, line_of(b)).verdict
    assert not certify_contact_curve(COLLINEAR3_D4, line_of(COLLINEAR3_D4)).verdict


def test_certificate_soundness_off_samples():
    """Certified curves pass at far-away parameters too."""
    cases = []
    for n, d in ((2, 4), (3, 5), (2, 6)):
        a = generate("collinear", V(n, d), (d + 2) // 2, seed=d)
        cases.append(("base", a, line_of(a)))
        a = generate("collinear", V(n, d), d, seed=d)
        cases.append(("contact", a, line_of(a)))
    for space in (SV([(1, 2), (1, 2)]), SV([(2, 2), (1, 3)])):
        a = generate("sv_ruling", space, space.t + 1, seed=3)
        cases.append(("contact", a, line_of(a)))
    for mode, a, c in cases:
        certify = certify_base_curve if mode == "base" else certify_contact_curve
        assert certify(a, c).verdict
        m = fat_matrix(a.space, a).matrix
        ker = kernel_basis(m)
        for p in curve_samples(c, 10, seed=5, spread=10**6):
            rows = [nu(a.space, p)] if mode == "base" else jet_rows(a.space, p).rows
            for row in rows:
                assert all(sum(x * y for x, y in zip(row, k)) == 0 for k in ker)


def test_classify_veronese_examples():
    a = generate("generic", V(2, 4), 2, seed=0)
    assert classify_veronese(a)["B"].decision == "non_member"
    rep = classify_veronese(TRIANGLE_D3)
    assert rep["B"].decision == "member" and len(rep["B"].components) == 3
    assert rep["B"].theorem_case == "Thm-Bb-r=d=3"
    assert rep["E"].decision == "non_member"
    rep = classify_veronese(conf(V(3, 4), (1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0), (1, 2, 0, 0)))
    assert rep["E"].decision == rep["E_tilde"].decision == "member"
    assert rep["E"].components[0].degree_bound == 4
    with pytest.raises(SpaceMismatchError):
        classify_veronese(conf(SEGRE2, ((1, 0), (1, 0))))


def test_classify_two_lines_case():
    a = generate("two_lines", V(2, 5), 5, seed=3)
    rep = classify(a)
    assert rep["B"].theorem_case == "Thm-Bb-two-lines" and len(rep["B"].components) == 2
    assert rep["E"].decision == "non_member"


def test_classify_rational_normal_curve():
    for r in range(1, 5):
        rep = classify(generate("generic", V(1, 6), r, seed=r))
        assert rep["B"].decision == "non_member"


def test_classify_sv_examples():
    rep = classify_sv(conf(SEGRE2, ((1, 2), (1, -1))))
    assert rep["B"].decision == "member" and len(rep["B"].components) == 2
    assert {c.factor for c in rep["B"].components} == {0, 1}
    a = generate("sv_ruling", SV([(1, 2), (1, 2)]), 2, seed=1)
    rep = classify_sv(a)
    assert rep["B"].decision == "member" and rep["E"].decision == "non_member"
    b = generate("sv_ruling", SV([(1, 2), (1, 3)]), 3, seed=1)
    rep = classify_sv(b)
    assert rep["E_tilde"].decision == "certified_member_only"
    assert line_of(b) in rep["E_tilde"].components
    with pytest.raises(SpaceMismatchError):
        classify_sv(TRIANGLE_D3)


def test_classify_sv_linear_fibre_rulings():
    space = SV([(2, 1), (1, 2)])
    rep = classify(conf(space, ((1, 2, 3), (1, 1))))
    comps = rep["B"].components
    assert rep["B"].decision == "member" and len(comps) == 2 and all(c.factor == 0 for c in comps)


def test_search_base_witness_examples():
    a = generate("collinear", V(2, 5), 3, seed=2)
    rep = search_base_witness(a, 50, 0)
    assert rep.decision == "certified_member_only" and line_of(a) in rep.components
    for r in (1, 2, 3):
        rep = search_base_witness(generate("generic", V(1, 6), r, seed=r), 50, 0)
        assert rep.decision == "undecided" and not rep.isolated_witnesses
    assert search_base_witness(generate("generic", V(2, 4), 2, seed=9), 200, 0).decision == "undecided"
    ambient = conf(V(1, 2), (1, 0), (0, 1))
    assert search_base_witness(ambient, 10, 0).theorem_case == "spans-ambient"


def test_non_member_decisions_survive_search():
    for seed in range(3):
        for n, d, r in ((2, 4, 2), (3, 6, 3), (2, 5, 2)):
            for kind in ("generic", "collinear"):
                a = generate(kind, V(n, d), r, seed)
                assert classify(a)["B"].decision == "non_member"
                assert search_base_witness(a, 200, seed).decision == "undecided"


def test_terracini_augmentation_examples():
    assert check_terracini_augmentation(COLLINEAR3_D4, (1, 2, 0))
    # triangle plus a point: span fills P^9, so the answer is a plain False
    assert check_terracini_augmentation(TRIANGLE_D3, (1, 1, 0)) is False
    p = conf(SEGRE3, ((1, 0), (1, 0), (1, 0)))
    q = ((1, 1), (1, 0), (1, 0))
    aug = Configuration(SEGRE3, p.points).extend([q])
    assert check_terracini_augmentation(p, q) == is_terracini(aug)[0]
    with pytest.raises(PreconditionError):
        check_terracini_augmentation(COLLINEAR3_D4, (0, 0, 1))


def test_verify_extension_examples():
    a = conf(V(2, 4), (1, 0, 0), (0, 1, 0), (1, 1, 0), (1, -1, 0))
    assert classify(a)["E_tilde"].decision == "member"
    assert verify_extension(a, [(1, 2, 0), (2, 1, 0)], "E_tilde")
    b = conf(V(2, 5), (1, 0, 0), (0, 1, 0), (1, 1, 0))
    assert verify_extension(b, [(1, 2, 5)], "B")
    with pytest.raises(QueryError):
        verify_extension(b, [(1, 0, 0)], "B")
    with pytest.raises(QueryError):
        verify_extension(b, [(1, 2, 0)], "B")  # on the witnessed line
    with pytest.raises(PreconditionError):
        verify_extension(generate("generic", V(2, 5), 2, 0), [(1, 2, 3)], "B")


def _instances():
    rng = random.Random(42)
    spaces = [V(2, 3), V(2, 4), V(3, 3), SV([(1, 2), (1, 2)]), SV([(1, 1), (1, 1), (1, 1)])]
    out = []
    while len(out) < 300:
        space = spaces[len(out) % len(spaces)]
        kind = rng.choice(["generic", "collinear"])
        r = rng.randint(1, 4)
        a = generate(kind, space, r, seed=rng.randint(0, 10**6))
        curves = detect_curves(a, 2)
        if curves and rng.random() < 0.5:
            q = curves[0][0].point_at(rng.randint(2, 40))
        else:
            q = random_point(rng, space)
        if q in a.points:
            continue
        out.append((a, q))
    return out


def test_membership_formulations_agree():
    positives = 0
    for a, q in _instances():
        m = fat_matrix(a.space, a).matrix
        h0_before = len(kernel_basis(m))
        h0_after = len(kernel_basis(stack(m, QMatrix([nu(a.space, q)]))))
        deg = m.rows
        h1_before = deg - (a.space.ambient - h0_before)
        h1_after = deg + 1 - (a.space.ambient - h0_after)
        cert = in_span_point(a, q)
        assert cert.verdict == (h0_before == h0_after) == (h1_after == h1_before + 1)
        positives += cert.verdict
        if in_span_tangent(a, q).verdict:
            assert cert.verdict  # E inside B
    assert positives > 20


def test_consistency_guard_on_bogus_certificate(monkeypatch):
    import fatlocus.loci as loci
    monkeypatch.setattr(loci, "certify_base_curve",
                        lambda a, c: loci.CurveCertificate(c, "base_locus", 1, (), False))
    with pytest.raises(ConsistencyError):
        classify(COLLINEAR3_D4)
