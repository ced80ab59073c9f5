"""Constants and inequalities behind the existence, uniqueness and regularity results.

Every inequality is reported as lhs < rhs with margin = rhs - lhs.  A
verdict is PASS iff the margin is positive, and UNKNOWN when a constant it
needs was never declared.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .problem import ProblemSpec
from .spectral import Convention


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: Optional[float]
    rhs: float
    note: str = ""

    @property
    def margin(self) -> Optional[float]:
        return None if self.lhs is None else self.rhs - self.lhs

    @property
    def verdict(self) -> Verdict:
        if self.lhs is None:
            return Verdict.UNKNOWN
        return Verdict.PASS if self.margin > 0 else Verdict.FAIL


@dataclass(frozen=True)
class Constants:
    C: float
    M_alpha: float
    C_one_minus_alpha: float
    time_factor: float   # omega^{1-alpha} / (1 - alpha)
    gamma: Optional[float]
    convention: Convention


def resolvent_bound(omega: float) -> float:
    """1 / (1 - exp(-pi^2 omega))."""
    if omega <= 0:
        raise ValueError(f"period must be positive, got {omega}")
    return 1.0 / -math.expm1(-math.pi**2 * omega)


def smoothing_constant(alpha: float) -> float:
    """M_alpha = Gamma(alpha) (the semigroup bound M is 1 here)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"M_alpha needs alpha in (0, 1), got {alpha}")
    return math.gamma(alpha)


def embedding_constant(alpha: float, convention=Convention.EIGEN) -> float:
    """C_{1-alpha} = ||A^{-(1-alpha)}||."""
    convention = Convention(convention)
    if convention is Convention.EIGEN:
        return (math.pi**2) ** (-(1.0 - alpha))
    if alpha == 0.5:
        return 1.0
    if alpha == 0.0:
        return 1.0 / math.pi**2
    raise ValueError(f"the paper convention defines C_(1-alpha) only for alpha in {{0, 1/2}}, "
                     f"got {alpha}")


def compute_constants(spec: ProblemSpec, convention=None) -> Constants:
    convention = Convention(convention or spec.convention)
    alpha = spec.alpha
    time_factor = spec.omega ** (1.0 - alpha) / (1.0 - alpha)
    gamma = spec.gamma
    if gamma is None and spec.a0 is not None and spec.a1 is not None:
        gamma = (spec.a0 + spec.a1) * time_factor
    return Constants(C=resolvent_bound(spec.omega), M_alpha=smoothing_constant(alpha),
                     C_one_minus_alpha=embedding_constant(alpha, convention),
                     time_factor=time_factor, gamma=gamma, convention=convention)


def contraction_constant(spec: ProblemSpec, convention=None) -> Optional[float]:
    """C M_alpha (a0 + a1 + L) omega^{1-alpha}/(1-alpha) + C_{1-alpha} L, or None if undeclared."""
    if None in (spec.a0, spec.a1, spec.L):
        return None
    k = compute_constants(spec, convention)
    return (k.C * k.M_alpha * (spec.a0 + spec.a1 + spec.L) * k.time_factor
            + k.C_one_minus_alpha * spec.L)


def neutral_contraction_constant(spec: ProblemSpec, convention=None) -> Optional[float]:
    """Lipschitz bound of the G-part of Q alone: C_{1-alpha} L + C M_alpha L omega^{1-alpha}/(1-alpha)."""
    if spec.L is None:
        return None
    k = compute_constants(spec, convention)
    return k.C_one_minus_alpha * spec.L + k.C * k.M_alpha * spec.L * k.time_factor


def check_mild(spec: ProblemSpec, convention=None) -> dict[str, Inequality]:
    """(H3) with the growth constant gamma, and (H3') with a0, a1."""
    k = compute_constants(spec, convention)
    out = {}
    if spec.L is None or k.gamma is None:
        h3 = None
    else:
        # the gamma term is not multiplied by L (see the decisions notes)
        h3 = (k.C * k.M_alpha * k.gamma + k.C_one_minus_alpha * spec.L
              + k.C * k.M_alpha * spec.L * k.time_factor)
    out["H3"] = Inequality("H3", h3, 1.0, "growth bound with gamma")
    out["H3'"] = Inequality("H3'", contraction_constant(spec, convention), 1.0,
                            "linear growth / Lipschitz constants a0, a1")
    return out


def check_regularity(spec: ProblemSpec, convention=None) -> dict[str, Inequality]:
    """(H6): C M_alpha (2 L1 + L2) omega^{1-alpha}/(1-alpha) + C_{1-alpha} L2 < 1."""
    k = compute_constants(spec, convention)
    if spec.L1 is None or spec.L2 is None:
        h6 = None
    else:
        h6 = (k.C * k.M_alpha * (2.0 * spec.L1 + spec.L2) * k.time_factor
              + k.C_one_minus_alpha * spec.L2)
    return {"H6": Inequality("H6", h6, 1.0, "Hoelder/Lipschitz constants L1, L2")}


def example51_lhs(omega: float, weight: float, extra: float) -> float:
    """2 omega^{1/2} / (1 - e^{-pi^2 omega}) Gamma(1/2) weight + extra."""
    return 2.0 * math.sqrt(omega) * resolvent_bound(omega) * math.gamma(0.5) * weight + extra


EXAMPLE51_RHS = math.pi / (1.0 + math.pi)

# ||v||_{L^2} + ||v_x||_{L^2} <= (1/pi + 1) ||A^{1/2} v|| under the paper convention
EXAMPLE51_SCALE = 1.0 + 1.0 / math.pi


def example51_abstract(spec: ProblemSpec) -> ProblemSpec:
    """The spec with pointwise constants of the parabolic example turned into abstract ones.

    Every declared constant is multiplied by 1 + 1/pi and the paper
    convention is selected; (F3) then holds iff (H3') holds.
    """
    changes = {name: getattr(spec, name) * EXAMPLE51_SCALE
               for name in ("a0", "a1", "L", "L1", "L2")
               if getattr(spec, name) is not None}
    return spec.with_(convention=Convention.PAPER, gamma=None, **changes)


def check_example51(spec: ProblemSpec) -> dict[str, Inequality]:
    """(F3) and (F6) for the parabolic example (alpha = 1/2, pointwise constants)."""
    if None in (spec.a0, spec.a1, spec.L):
        f3 = None
    else:
        f3 = example51_lhs(spec.omega, spec.a0 + spec.a1 + spec.L, spec.L)
    if spec.L1 is None or spec.L2 is None:
        f6 = None
    else:
        f6 = example51_lhs(spec.omega, 2.0 * spec.L1 + spec.L2, spec.L2)
    return {"F3": Inequality("F3", f3, EXAMPLE51_RHS, "pointwise bounds on f and g"),
            "F6": Inequality("F6", f6, EXAMPLE51_RHS, "pointwise Hoelder bounds l1, l2")}


@dataclass
class HypothesisReport:
    spec_name: str
    constants: Constants
    inequalities: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    mild_key: str = "H3'"

    @property
    def mild_verdict(self) -> Verdict:
        return self.inequalities[self.mild_key].verdict

    def lines(self) -> list[str]:
        k = self.constants
        out = [f"problem: {self.spec_name}",
               f"convention: {k.convention.value}",
               f"C: {k.C!r}",
               f"M_alpha: {k.M_alpha!r}",
               f"C_one_minus_alpha: {k.C_one_minus_alpha!r}",
               f"time_factor: {k.time_factor!r}",
               f"gamma: {k.gamma!r}"]
        for name, ineq in self.inequalities.items():
            out.append(f"{name}.lhs: {ineq.lhs!r}")
            out.append(f"{name}.rhs: {ineq.rhs!r}")
            out.append(f"{name}.margin: {ineq.margin!r}")
            out.append(f"{name}.verdict: {ineq.verdict.value}")
        for name, verdict in self.results.items():
            out.append(f"result.{name}: {verdict.value}")
        out.append(f"mild_condition: {self.mild_key}")
        out.append(f"mild_verdict: {self.mild_verdict.value}")
        return out


def _all(*verdicts: Verdict) -> Verdict:
    if any(v is Verdict.FAIL for v in verdicts):
        return Verdict.FAIL
    if any(v is Verdict.UNKNOWN for v in verdicts):
        return Verdict.UNKNOWN
    return Verdict.PASS


def build_report(spec: ProblemSpec, convention=None) -> HypothesisReport:
    """Evaluate every inequality and say which results apply.

    Result keys: existence_growth (growth bound gamma), existence_linear
    (linear growth a0, a1), uniqueness (Lipschitz F), classical (Hoelder in
    time, mu < 1), strong (Lipschitz in time, mu = 1), and example_mild,
    example_classical, example_strong for the parabolic example.
    """
    convention = Convention(convention or spec.convention)
    report = HypothesisReport(spec.name, compute_constants(spec, convention))
    ineq = report.inequalities
    ineq.update(check_mild(spec, convention))
    ineq.update(check_regularity(spec, convention))
    declared_growth = Verdict.PASS if None not in (spec.a0, spec.a1) else Verdict.UNKNOWN
    res = report.results
    res["existence_growth"] = ineq["H3"].verdict
    res["existence_linear"] = _all(declared_growth, ineq["H3'"].verdict)
    res["uniqueness"] = (_all(res["existence_linear"]) if spec.lipschitz
                  else (Verdict.UNKNOWN if res["existence_linear"] is not Verdict.FAIL else Verdict.FAIL))
    holder = spec.mu1 < 1.0 and spec.mu2 < 1.0
    lipschitz_t = spec.mu1 == 1.0 and spec.mu2 == 1.0
    h6 = ineq["H6"].verdict
    res["classical"] = h6 if holder else (Verdict.FAIL if h6 is Verdict.FAIL else Verdict.UNKNOWN)
    res["strong"] = h6 if lipschitz_t else (Verdict.FAIL if h6 is Verdict.FAIL else Verdict.UNKNOWN)
    if spec.name == "example51":
        ineq.update(check_example51(spec))
        res["example_mild"] = ineq["F3"].verdict
        f6 = ineq["F6"].verdict
        res["example_classical"] = f6 if holder else (Verdict.FAIL if f6 is Verdict.FAIL else Verdict.UNKNOWN)
        res["example_strong"] = f6 if lipschitz_t else (Verdict.FAIL if f6 is Verdict.FAIL else Verdict.UNKNOWN)
        report.mild_key = "F3"
    elif ineq["H3'"].verdict is Verdict.UNKNOWN and ineq["H3"].verdict is not Verdict.UNKNOWN:
        report.mild_key = "H3"
    return report
