"""Sufficient identifiability test for points of ``<A>`` and the locus of alternative supports.

If ``A`` is neither in the Terracini locus nor in the strong base locus, every
point of ``<A>`` outside the singular locus of the secant variety has a unique
decomposition of length ``r``. The smoothness condition has no exact test
here, so every report records it as an assumption.
"""
from dataclasses import dataclass

from fatlocus.configuration import passes_generic_screen
from fatlocus.errors import PreconditionError
from fatlocus.loci import CERTIFIED, MEMBER, NON_MEMBER, classify, is_terracini

# (n, d, r) for which a general configuration on V^d_n has a positive-dimensional contact locus
TANGENTIALLY_WEAKLY_DEFECTIVE = frozenset({(2, 6, 9), (3, 4, 8), (5, 3, 9)})

IDENTIFIABLE = "identifiable_modulo_smoothness"
INCONCLUSIVE = "inconclusive"
NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class IdentifiabilityReport:
    r_bound_ok: bool
    terracini_free: bool
    strong_base_free: str
    smoothness_assumed: bool
    conclusion: str
    e_components: tuple
    denylisted: bool
    reasons: tuple

    def to_json(self):
        return {
            "r_bound_ok": self.r_bound_ok,
            "terracini_free": self.terracini_free,
            "strong_base_free": self.strong_base_free,
            "smoothness_assumed": self.smoothness_assumed,
            "conclusion": self.conclusion,
            "e_components": [c.to_json() for c in self.e_components],
            "denylisted": self.denylisted,
            "reasons": list(self.reasons),
        }


def r_bound_ok(a):
    """``(r + 1)(dim X + 1) <= N + 1``."""
    return (a.r + 1) * (a.space.dim + 1) <= a.space.ambient


def is_denylisted(a):
    sp = a.space
    if not sp.is_veronese or (sp.n, sp.d, a.r) not in TANGENTIALLY_WEAKLY_DEFECTIVE:
        return False
    return passes_generic_screen(sp, a.points)


def _strong_base_status(report):
    if report.decision == NON_MEMBER:
        return "yes_by_theorem"
    if report.decision in (MEMBER, CERTIFIED):
        return "no_with_witness"
    return "yes_no_certificate_found"


def hessian_criterion(a, budget=200, seed=0):
    bound = r_bound_ok(a)
    term, _ = is_terracini(a)
    e = classify(a, budget, seed)["E"]
    status = _strong_base_status(e)
    deny = is_denylisted(a)
    reasons = []
    if deny:
        reasons.append("known tangentially weakly defective case")
    if not bound:
        reasons.append("r exceeds (N+1)/(dim X+1) - 1")
    if term:
        reasons.append("configuration is in the Terracini locus")
    if status == "no_with_witness":
        reasons.append("strong base locus witness found")
    if deny:
        conclusion = INCONCLUSIVE
    elif not bound:
        conclusion = NOT_APPLICABLE
    elif not term and status != "no_with_witness":
        conclusion = IDENTIFIABLE
    else:
        conclusion = INCONCLUSIVE
    return IdentifiabilityReport(bound, not term, status, True, conclusion,
                                 e.components, deny, tuple(reasons))


@dataclass(frozen=True)
class DecompositionLocus:
    """Where the supports of alternative length-r decompositions can lie: ``A`` plus ``E(A)``."""

    configuration: object
    components: tuple
    isolated_points: tuple
    decision: str
    hypotheses_ok: bool

    def to_json(self):
        return {
            "points": [p.to_json() for p in self.configuration.points],
            "components": [c.to_json() for c in self.components],
            "isolated_points": [p.to_json() for p in self.isolated_points],
            "e_decision": self.decision,
            "hypotheses_ok": self.hypotheses_ok,
        }


def decomposition_locus(a, strict=True, budget=200, seed=0):
    """Known description of ``E(A)``.

    With ``strict`` the hypotheses (not Terracini, r within bound) are
    enforced; otherwise the description is returned with ``hypotheses_ok``
    set accordingly.
    """
    term, _ = is_terracini(a)
    ok = r_bound_ok(a) and not term
    if strict and not ok:
        raise PreconditionError("configuration is Terracini or r exceeds the bound")
    e = classify(a, budget, seed)["E"]
    return DecompositionLocus(a, e.components, e.isolated_witnesses, e.decision, ok)
