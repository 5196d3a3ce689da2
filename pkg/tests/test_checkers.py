import math

import pytest

from src.core import catalog
from src.core.checkers import (
    Verdict, HypothesisReport, check_bov_attracting_recipe, check_critical_accumulation,
    check_critical_values_in_disk, check_disconnected_julia_hypotheses, check_disk_self_map,
    check_f3_basin_chain, check_f3_multipliers, check_landing_dichotomy, check_phi_sign_table,
    check_real_line_structure, check_siegel_heuristic, check_unbounded_fatou_component, landing_clauses,
)
from src.core.basin import ComponentRecord, Window
from src.core.expr import parse

DISK_BOUND = math.exp(-0.5) - 0.5


def test_report_overall():
    report = HypothesisReport("r")
    assert report.overall is Verdict.UNCERTIFIED
    report.add("a", True)
    assert report.passed
    report.add("b", Verdict.UNCERTIFIED)
    assert report.overall is Verdict.UNCERTIFIED
    report.add("c", False)
    assert report.overall is Verdict.FAIL
    assert report.clause("b").verdict is Verdict.UNCERTIFIED
    assert report.to_dict()["overall"] == "Fail"


def test_disk_self_map_small_lambda():
    report = check_disk_self_map(0.04)
    assert report.passed
    bound = report.clauses[0].evidence["lower_bound"]
    assert bound == pytest.approx(DISK_BOUND, abs=1e-12)
    assert bound <= DISK_BOUND
    assert report.clause("lambda / bound").evidence["ratio"] == pytest.approx(0.04 / DISK_BOUND)


def test_disk_self_map_near_threshold_is_not_refuted():
    assert check_disk_self_map(0.052).overall is not Verdict.FAIL


def test_disk_self_map_large_lambda_fails():
    report = check_disk_self_map(0.2)
    assert report.overall is Verdict.FAIL
    sampled = report.clause("sampled max")
    assert sampled.sampled
    assert sampled.evidence["max_modulus"] == pytest.approx(0.2 / DISK_BOUND, abs=0.01)
    assert sampled.evidence["max_modulus"] == pytest.approx(1.88, abs=0.01)


def test_disk_self_map_rejects_nonpositive_lambda():
    with pytest.raises(ValueError):
        check_disk_self_map(0.0)


def test_critical_values_inside_disk():
    report = check_critical_values_in_disk(0.04, 0.5)
    assert report.passed
    assert report.clauses[0].evidence["max_modulus"] == pytest.approx(0.012133, abs=1e-6)
    assert report.clauses[1].evidence["closed_form_gap"] < 1e-12


def test_critical_values_outside_small_disk():
    assert check_critical_values_in_disk(0.04, 0.01).overall is Verdict.FAIL


@pytest.mark.parametrize("radius", [0.0, -1.0, math.inf])
def test_critical_values_radius_validation(radius):
    with pytest.raises(ValueError):
        check_critical_values_in_disk(0.04, radius)


def test_bov_recipe_with_exponential():
    report = check_bov_attracting_recipe(parse("exp(z)"), 1.0, 0.5, 0.05)
    assert report.passed
    assert report.clauses[1].evidence["min_modulus"] == pytest.approx(math.exp(0.5), rel=1e-9)
    assert all(c.sampled for c in report.clauses[:2])


def test_bov_recipe_fails_when_epsilon_too_large():
    report = check_bov_attracting_recipe(parse("exp(z)"), 1.0, 0.5, 1.0)
    assert report.clause("min |g|").verdict is Verdict.FAIL
    assert report.overall is Verdict.FAIL


def test_bov_recipe_vanishing_g():
    report = check_bov_attracting_recipe(parse("z-1"), 1.0, 0.5, 0.05, grid=16)
    assert report.clause("g does not vanish").verdict is Verdict.FAIL


def test_f3_basin_chain():
    report = check_f3_basin_chain()
    assert report.passed
    assert report.clauses[-1].sampled


def test_f3_basin_chain_perturbed_map_fails():
    assert check_f3_basin_chain(catalog.f3(0.9)).overall is Verdict.FAIL


def test_f3_multipliers():
    report = check_f3_multipliers()
    assert report.passed
    gaps = [c.evidence["gap"] for c in report.clauses if "equals -h(x)" in c.description]
    assert len(gaps) == 2 and max(gaps) < 1e-8
    assert report.clause("h(-0.72)").evidence["value"] == pytest.approx(0.8287, abs=1e-3)
    assert report.clause("h(-1.069)").evidence["value"] == pytest.approx(0.9793, abs=1e-3)
    cascade = report.clause("sign cascade").evidence
    assert cascade["verdict"] == "Positive"
    assert len(cascade["cascade_trace"]) == 9


def test_phi_sign_table():
    report = check_phi_sign_table()
    assert report.passed
    certified = [c for c in report.clauses if not c.sampled]
    assert all(c.evidence.get("method", "interval") == "interval" for c in certified)
    assert sum(c.sampled for c in report.clauses) == 2


def test_real_line_structure():
    report = check_real_line_structure()
    assert report.passed
    assert report.clause("x0 has a unique").evidence["pole_preimage"] == pytest.approx(-1.911, abs=1e-3)


def test_siegel_heuristic():
    report = check_siegel_heuristic(max_iter=2000)
    assert report.clauses[0].verdict is Verdict.PASS
    assert report.clauses[1].sampled
    assert report.clauses[1].evidence["seeds"] == 200


def test_siegel_heuristic_attracting_lambda_fails():
    # |f4'(0)| = 2 * 0.4 < 1, so 0 is attracting
    report = check_siegel_heuristic(0.4, max_iter=500)
    assert report.clauses[0].verdict is Verdict.FAIL
    assert report.overall is Verdict.FAIL


def test_critical_accumulation():
    report = check_critical_accumulation()
    assert report.passed
    clause = report.clauses[0]
    assert clause.sampled
    assert clause.evidence["found"] >= 20
    moduli = clause.evidence["moduli"]
    assert all(b < a for a, b in zip(moduli[-10:], moduli[-9:]))


def test_unbounded_component_single_basin():
    report = check_unbounded_fatou_component(catalog.f_lambda(0.04), 0j, half_widths=(2.0, 4.0),
                                             resolution=32)
    assert report.passed
    assert report.clause("the cycle reached from the bov").evidence["class"] == "Attracting"
    assert report.clause("half-width 4.0").evidence["code"] == 0
    assert len(report.clause("the border share").evidence["shares_outside"]) == 2


def test_unbounded_component_needs_a_stable_bov():
    report = check_unbounded_fatou_component(parse("exp(z)"), 0j, resolution=16)
    assert report.overall is Verdict.FAIL
    assert [c.description for c in report.clauses] == ["the bov's orbit converges to a cycle"]
    assert report.clauses[0].evidence["fate"] == "Escaped"


def test_landing_clauses_from_component_table():
    records = [ComponentRecord(1, 0, 48, 1, 1), ComponentRecord(2, 1, 16, 0, None)]
    report = landing_clauses(HypothesisReport("landing"), 1, records)
    assert report.passed
    assert all(c.sampled for c in report.clauses)

    records.append(ComponentRecord(3, 0, 20, 0, 2))
    report = landing_clauses(HypothesisReport("landing"), 1, records)
    assert report.overall is Verdict.UNCERTIFIED
    exceptions = report.clause("components landing").evidence["exceptions"]
    assert [e["component"] for e in exceptions] == [3]


def test_landing_dichotomy_single_basin_is_inconclusive():
    report = check_landing_dichotomy(catalog.f_lambda(0.04), 0j, Window(0.0, 0.0, 6.0, 6.0), resolution=32)
    assert report.clause("the bov lies").verdict is Verdict.PASS
    assert report.overall is Verdict.UNCERTIFIED


def test_landing_dichotomy_bov_outside_window():
    report = check_landing_dichotomy(catalog.f_lambda(0.04), 10j, Window(0.0, 0.0, 2.0, 2.0), resolution=8)
    assert report.overall is Verdict.FAIL


def test_disconnected_julia_hypotheses_small_lambda():
    report = check_disconnected_julia_hypotheses(catalog.f_lambda(0.04), 0j)
    assert report.passed
    assert report.clause("critical values lie").evidence["found"] >= 2
    poles = report.clause("poles in the window").evidence["poles"]
    assert any(abs(re + 0.5671432904) < 1e-8 and abs(im) < 1e-8 for re, im in poles)


def test_disconnected_julia_hypotheses_double_pole():
    report = check_disconnected_julia_hypotheses(parse("0.1/z^2 + 0.5"), 0.5, window=(-1.0, 1.0, -1.0, 1.0),
                                                 grid=16)
    assert report.clause("poles in the window").verdict is Verdict.FAIL
