import json

import pytest

from oracles import bk_closed_form
from toffoli_ft.error_analysis import enumerate_all
from toffoli_ft.resources import (
    BRAVYI_KITAEV,
    MEIER_EASTIN_KNILL,
    DistillationProtocol,
    Pipeline,
    PipelineError,
    aggregate_failure,
    compare,
    default_schemes,
    error_detecting_scheme,
    four_t_scheme,
    load_config,
    min_rounds,
    pipeline_cost,
    scheme_cost,
    seven_t_scheme,
    without_distillation,
)

BK, MEK = BRAVYI_KITAEV, MEIER_EASTIN_KNILL


def test_empty_pipeline():
    pc = pipeline_cost(Pipeline((), 1e-2))
    assert pc.raw_states_per_output == 1
    assert pc.p_out == 1e-2
    assert pc.trace == []


def test_single_bk_round_matches_closed_form():
    pc = pipeline_cost(Pipeline((BK,), 1e-2))
    cost, p = bk_closed_form(1e-2)
    assert pc.raw_states_per_output == pytest.approx(cost, rel=1e-14)
    assert pc.raw_states_per_output == pytest.approx(17.44, abs=0.005)
    assert pc.p_out == pytest.approx(3.5e-5, rel=1e-12)


def test_bk_mek_reaches_1e_minus_8():
    pc = pipeline_cost(Pipeline((BK, MEK), 1e-2))
    assert 5e-9 < pc.p_out < 2e-8
    assert [t.protocol for t in pc.trace] == ["BK", "MEK"]


def test_non_contractive_pipeline_is_an_error():
    with pytest.raises(PipelineError, match="not contractive"):
        pipeline_cost(Pipeline((MEK,), 0.2))


def test_protocol_validation():
    with pytest.raises(ValueError):
        DistillationProtocol("bad", 2, 2, 1.0, 2)
    with pytest.raises(ValueError):
        DistillationProtocol("bad", 5, 1, 1.0, 1)
    with pytest.raises(ValueError):
        Pipeline((), 0.0)


def test_scheme_costs_match_quoted_figures():
    ed = scheme_cost(error_detecting_scheme(), Pipeline((BK, MEK), 1e-2))
    four = scheme_cost(four_t_scheme(), Pipeline((BK, MEK, MEK), 1e-2))
    seven = scheme_cost(seven_t_scheme(), Pipeline((BK, MEK, MEK), 1e-2))
    assert ed == pytest.approx(697.6, rel=0.01)
    assert four == pytest.approx(1744.8, rel=0.01)
    assert seven == pytest.approx(7 / 4 * four, rel=1e-12)
    assert ed / four == pytest.approx(1 / 2.5, rel=0.02)


def test_min_rounds_examples():
    assert min_rounds(1e-2, 1e-8).names == ["BK", "MEK"]
    assert min_rounds(1e-2, 1e-15).names == ["BK", "MEK", "MEK"]
    assert min_rounds(1e-2, 1e-2).names == []
    with pytest.raises(PipelineError, match="unreachable"):
        min_rounds(1e-2, 1e-300, max_rounds=2)


def test_cost_and_error_monotone_per_round():
    for rounds in [(BK,), (BK, MEK), (BK, MEK, MEK), (MEK, MEK, MEK)]:
        trace = pipeline_cost(Pipeline(rounds, 1e-2)).trace
        costs = [1.0] + [t.cost for t in trace]
        errors = [1e-2] + [t.p_out for t in trace]
        assert all(b > a for a, b in zip(costs, costs[1:]))
        assert all(b < a for a, b in zip(errors, errors[1:]))


def test_compare_reproduces_savings():
    rep = compare(default_schemes(), 1e-2, 1e-12)
    assert rep.results["four_t"].pipeline == ["BK", "MEK", "MEK"]
    assert rep.results["error_detecting"].pipeline == ["BK", "MEK"]
    assert rep.savings("four_t", "error_detecting") == pytest.approx(2.5, abs=0.05)
    assert rep.savings("seven_t", "four_t") == pytest.approx(7 / 4, rel=1e-12)
    assert all(r.toffoli_error <= 1e-12 for r in rep.results.values())


def test_unordered_search_is_available_and_cheaper():
    ordered = compare(default_schemes(), 1e-2, 1e-12)
    free = compare(default_schemes(), 1e-2, 1e-12, ordered=False)
    for name in ordered.results:
        assert free.results[name].raw_states_total <= ordered.results[name].raw_states_total


def test_error_detecting_error_is_exact_posterior():
    scheme = error_detecting_scheme()
    report = enumerate_all()
    for p in (1e-2, 1e-4, 1e-8):
        assert scheme.toffoli_error(p) == report.posterior(p)
    assert scheme.toffoli_error(1e-4) != 28 * 1e-8


def test_no_distillation_path():
    rep = without_distillation(default_schemes(), 1e-4)
    err = rep.results["error_detecting"].toffoli_error
    assert err == pytest.approx(2.8e-7, rel=0.01)
    assert rep.results["error_detecting"].pipeline == []
    assert 0.24 <= aggregate_failure(err, 1e6) <= 0.28


def test_volume_multiplier_off_by_default():
    rep = compare(default_schemes(), 1e-2, 1e-12)
    assert all(r.volume is None for r in rep.results.values())
    weighted = compare(default_schemes(), 1e-2, 1e-12, volume_per_raw_state=2.0)
    r = weighted.results["four_t"]
    assert r.volume == pytest.approx(2 * r.raw_states_total)


def test_load_config(tmp_path):
    assert load_config(None).source == "built-in defaults"
    path = tmp_path / "menu.json"
    path.write_text(json.dumps({
        "protocols": [{"name": "BK", "n_in": 15, "n_out": 1, "error_coeff": 35, "error_power": 3}],
        "schemes": ["four_t"],
        "p_raw": 0.001,
    }))
    cfg = load_config(path)
    assert [p.name for p in cfg.menu] == ["BK"]
    assert [s.name for s in cfg.schemes()] == ["four_t"]
    assert cfg.p_raw == 0.001
    path.write_text(json.dumps({"schemes": ["nope"]}))
    with pytest.raises(ValueError):
        load_config(path)
