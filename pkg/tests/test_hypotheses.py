import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neutral_periodic import hypotheses as hy
from neutral_periodic.hypotheses import Verdict
from neutral_periodic.problem import ProblemSpec, build_problem

consts = st.floats(0.0, 2.0, allow_subnormal=False)


def spec(**kw):
    kw.setdefault("n_modes", 4)
    kw.setdefault("m_t", 4)
    kw.setdefault("m_x", 9)
    return ProblemSpec(**kw)


def test_constants():
    mpmath.mp.dps = 40
    k = hy.compute_constants(spec(omega=1.0, alpha=0.5))
    assert k.C == pytest.approx(float(1 / (1 - mpmath.exp(-mpmath.pi**2))), rel=1e-15)
    assert k.C == pytest.approx(1.0000517, abs=1e-7)
    assert k.M_alpha == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert k.C_one_minus_alpha == pytest.approx(1 / math.pi, rel=1e-15)
    assert hy.compute_constants(spec(), "paper").C_one_minus_alpha == 1.0
    assert k.time_factor == 2.0


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_smoothing_constant_rejects_endpoints(alpha):
    with pytest.raises(ValueError):
        hy.smoothing_constant(alpha)


def test_alpha_zero_spec_rejected_by_constants():
    with pytest.raises(ValueError, match="alpha"):
        hy.compute_constants(spec(alpha=0.0))


def test_paper_convention_limited_alpha():
    with pytest.raises(ValueError, match="paper convention"):
        hy.embedding_constant(0.25, "paper")


def test_check_mild_examples():
    zero = hy.check_mild(spec(a0=0, a1=0, L=0), "paper")
    assert zero["H3'"].lhs == 0 and zero["H3'"].verdict is Verdict.PASS
    base = hy.check_mild(spec(a0=0.01, a1=0.01, L=0.01), "paper")["H3'"]
    assert base.lhs == pytest.approx(0.11637, abs=5e-5) and base.verdict is Verdict.PASS
    big = hy.check_mild(spec(a0=10, a1=0, L=0), "paper")["H3'"]
    assert big.lhs == pytest.approx(35.4, abs=0.1) and big.verdict is Verdict.FAIL
    assert big.margin == pytest.approx(1 - big.lhs)


def test_h3_with_gamma_and_unknown():
    s = spec(L=0.01, gamma=0.04, lipschitz=False)
    h3 = hy.check_mild(s, "paper")["H3"]
    k = hy.compute_constants(s, "paper")
    assert h3.lhs == pytest.approx(k.C * k.M_alpha * 0.04 + 0.01 + k.C * k.M_alpha * 0.01 * 2)
    missing = hy.check_mild(spec(L=0.01, lipschitz=False))
    assert missing["H3"].verdict is Verdict.UNKNOWN
    assert missing["H3'"].verdict is Verdict.UNKNOWN and missing["H3'"].margin is None


def test_check_regularity_examples():
    assert hy.check_regularity(spec(L1=0, L2=0))["H6"].verdict is Verdict.PASS
    k = hy.compute_constants(spec(), "paper")
    reg = hy.check_regularity(spec(L1=0.01, L2=0.01), "paper")["H6"]
    assert reg.lhs == pytest.approx(k.C * math.sqrt(math.pi) * 0.03 * 2 + 0.01)
    fail = hy.check_regularity(spec(L1=1, L2=0), "paper")["H6"]
    assert fail.lhs == pytest.approx(7.09, abs=0.01) and fail.verdict is Verdict.FAIL
    assert hy.check_regularity(spec())["H6"].verdict is Verdict.UNKNOWN


def test_check_example51_examples():
    f = hy.check_example51(spec(a0=0.01, a1=0.01, L=0.01))["F3"]
    assert f.lhs == pytest.approx(0.11637, abs=5e-5)
    assert f.rhs == math.pi / (1 + math.pi)
    assert f.rhs == pytest.approx(0.75853, abs=3e-5)
    assert f.margin == pytest.approx(0.642, abs=1e-3)
    assert hy.check_example51(spec(a0=0, a1=0, L=0))["F3"].lhs == 0
    fail = hy.check_example51(spec(a0=0, a1=0, L=0.8))["F3"]
    assert fail.lhs > 0.8 > fail.rhs and fail.verdict is Verdict.FAIL


def test_result_mapping_follows_time_regularity():
    s = build_problem("example51", L1=0.01, L2=0.01, mu1=0.5, mu2=0.5)
    r = hy.build_report(s, "paper")
    assert r.results["classical"] is Verdict.PASS and r.results["strong"] is Verdict.UNKNOWN
    assert r.results["example_classical"] is Verdict.PASS
    r = hy.build_report(s.with_(mu1=1.0, mu2=1.0), "paper")
    assert r.results["strong"] is Verdict.PASS and r.results["classical"] is Verdict.UNKNOWN
    assert r.results["example_strong"] is Verdict.PASS
    assert r.mild_key == "F3" and r.mild_verdict is Verdict.PASS


def test_uniqueness_needs_lipschitz():
    r = hy.build_report(spec(a0=0.01, a1=0.01, L=0.01, lipschitz=False))
    assert r.results["existence_linear"] is Verdict.PASS
    assert r.results["uniqueness"] is Verdict.UNKNOWN


def test_report_lines_are_key_value():
    lines = hy.build_report(build_problem("example51")).lines()
    keys = [line.split(": ", 1)[0] for line in lines]
    assert all(": " in line for line in lines)
    assert len(keys) == len(set(keys))
    assert "mild_verdict" in keys and "C" in keys and "F3.margin" in keys


@settings(max_examples=300)
@given(consts, consts, consts, consts, consts,
       st.sampled_from(["a0", "a1", "L", "L1", "L2"]), st.floats(0.0, 1.0),
       st.sampled_from(["eigen", "paper"]))
def test_lhs_monotone_in_constants(a0, a1, L, L1, L2, name, bump, convention):
    s = spec(a0=a0, a1=a1, L=L, L1=L1, L2=L2)
    bigger = s.with_(**{name: getattr(s, name) + bump})
    for check in (lambda x: hy.check_mild(x, convention), lambda x: hy.check_regularity(x, convention),
                  hy.check_example51):
        before, after = check(s), check(bigger)
        for key in before:
            assert after[key].lhs >= before[key].lhs


@settings(max_examples=200)
@given(consts, consts, consts, st.floats(0.05, 5.0), st.floats(0.0, 1.0))
def test_lhs_monotone_in_time_factor(a0, a1, L, omega, bump):
    # with C held fixed, the lhs grows with omega^{1-alpha}/(1-alpha)
    def scaled(om):
        s = spec(a0=a0, a1=a1, L=L, omega=om)
        k = hy.compute_constants(s)
        return (hy.contraction_constant(s) - k.C_one_minus_alpha * L) / k.C
    assert scaled(omega + bump) >= scaled(omega) * (1 - 1e-14)


@settings(max_examples=300)
@given(consts, consts, consts, st.floats(0.05, 5.0))
def test_example_condition_implies_abstract_condition(a0, a1, L, omega):
    s = build_problem("example51", a0=a0, a1=a1, L=L, omega=omega, n_modes=4, m_t=4, m_x=9)
    f3 = hy.check_example51(s)["F3"]
    abstract = hy.example51_abstract(s)
    h3 = hy.check_mild(abstract)["H3'"]
    assert h3.lhs == pytest.approx(f3.lhs * hy.EXAMPLE51_SCALE, rel=1e-13)
    if f3.verdict is Verdict.PASS:
        assert h3.verdict is Verdict.PASS


def test_kappa_single_source():
    s = build_problem("example51")
    assert hy.check_mild(s)["H3'"].lhs == hy.contraction_constant(s)
