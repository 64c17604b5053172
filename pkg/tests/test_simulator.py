import numpy as np
import pytest
from hypothesis import given, settings

from oracles import circuit_matrix, toffoli_by_definition
from test_circuit import unitary_circuits
from toffoli_ft.circuit import build
from toffoli_ft.constructions import (
    build_ancilla_consumption,
    build_ancilla_prep,
    build_error_detecting_toffoli,
    build_four_t_toffoli,
    build_multi_controlled,
    build_toffoli_star,
    controlled_not,
    reference_toffoli,
    toffoli_ancilla_state,
)
from toffoli_ft.simulator import (
    SimulationError,
    basis_state,
    extract_unitary,
    gadget_implements,
    initial_state,
    is_unitary_matrix,
    phase_insensitive_distance,
    random_state,
    run,
    sample_counts,
)


def test_measurement_free_circuit_has_one_certain_branch():
    (branch,) = run(build(2).h(0).cnot(0, 1), basis_state([0, 0]))
    assert branch.probability == pytest.approx(1.0)
    assert branch.outcomes == {}


def test_four_t_toffoli_branches_on_110():
    psi = initial_state(build_four_t_toffoli(), basis_state([1, 1, 0]), [0, 1, 2])
    branches = run(build_four_t_toffoli(), psi)
    assert sorted(b.outcomes[0] for b in branches) == [0, 1]
    for b in branches:
        assert b.probability == pytest.approx(0.5, abs=1e-12)
        data = b.state.reshape(8, 2)
        # ancilla leaves in |0> or |1>, data sits in |111>
        weight = np.abs(data) ** 2
        assert weight[0b111].sum() == pytest.approx(1.0, abs=1e-12)


def test_error_detecting_noiseless_is_deterministic():
    psi = np.kron(basis_state([1, 0, 1]), [1, 0])
    (branch,) = run(build_error_detecting_toffoli(), psi)
    assert branch.outcomes == {0: 0}
    assert branch.probability == pytest.approx(1.0)


def test_fixed_outcomes_and_errors():
    c = build_four_t_toffoli()
    psi = initial_state(c, basis_state([1, 1, 0]), [0, 1, 2])
    (b,) = run(c, psi, fixed={0: 1})
    assert b.outcomes == {0: 1} and b.probability == pytest.approx(0.5)
    with pytest.raises(SimulationError, match="missing"):
        run(c, psi, fixed={})
    with pytest.raises(SimulationError, match="dimension"):
        run(c, basis_state([0, 0]))


def test_seeded_sampling_is_reproducible():
    c = build_four_t_toffoli()
    psi = initial_state(c, basis_state([1, 1, 0]), [0, 1, 2])
    draws = [run(c, psi, seed=s)[0].outcomes[0] for s in range(40)]
    again = [run(c, psi, seed=s)[0].outcomes[0] for s in range(40)]
    assert draws == again
    assert set(draws) == {0, 1}


def test_sampling_frequency_four_t_on_110():
    c = build_four_t_toffoli()
    psi = initial_state(c, basis_state([1, 1, 0]), [0, 1, 2])
    counts = sample_counts(c, psi, 10**5, seed=7)
    assert counts[(1,)] / 10**5 == pytest.approx(0.5, abs=0.01)
    # trajectory sampling agrees with the enumerated histogram on a smaller run
    rng = np.random.default_rng(11)
    ones = sum(run(c, psi, seed=rng)[0].outcomes[0] for _ in range(4000))
    assert ones / 4000 == pytest.approx(0.5, abs=0.03)


def test_extract_unitary_examples():
    assert np.allclose(extract_unitary(build(2)), np.eye(4))
    h = extract_unitary(build(1).h(0))
    assert np.allclose(h, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    star = extract_unitary(build_toffoli_star())
    assert star[0b111, 0b110] == pytest.approx(-1j)
    with pytest.raises(SimulationError):
        extract_unitary(build_four_t_toffoli())


@settings(max_examples=40, deadline=None)
@given(unitary_circuits())
def test_extract_unitary_matches_kron_oracle(c):
    u = extract_unitary(c)
    assert np.allclose(u, circuit_matrix(c), atol=1e-10)
    assert is_unitary_matrix(u)
    assert np.allclose(extract_unitary(c.inverse()), u.conj().T, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(unitary_circuits())
def test_norm_preserved_gate_by_gate(c):
    psi = random_state(c.qubit_count, np.random.default_rng(0))
    (b,) = run(c, psi)
    assert np.linalg.norm(b.state) == pytest.approx(1.0, abs=1e-12)


def test_phase_insensitive_distance_examples():
    u = extract_unitary(build_toffoli_star())
    assert phase_insensitive_distance(u, u) == pytest.approx(0, abs=1e-15)
    assert phase_insensitive_distance(u, -u) == pytest.approx(0, abs=1e-15)
    assert phase_insensitive_distance(np.eye(2), np.diag([1, -1])) == pytest.approx(1.0)
    with pytest.raises(SimulationError):
        phase_insensitive_distance(np.eye(2), np.eye(4))


def test_gadget_implements_four_t():
    res = gadget_implements(build_four_t_toffoli(), toffoli_by_definition(), [0, 1, 2])
    assert res.passed
    assert res.inputs_checked == 16
    assert res.branches_checked == 32


def test_gadget_implements_reports_toffoli_star_failure_on_11():
    res = gadget_implements(build_toffoli_star(), reference_toffoli(), [0, 1, 2])
    assert not res.passed
    # basis inputs |11z> carry the -i phase only as a global phase; random inputs expose it
    assert "random" in res.failure


def test_gadget_implements_consumption_all_eight_branches():
    res = gadget_implements(build_ancilla_consumption(), toffoli_by_definition(), [0, 1, 2],
                            ancilla_state=toffoli_ancilla_state())
    assert res.passed
    assert res.branches_checked == 16 * 8


_C3X = build_multi_controlled(controlled_not(), 2)


@pytest.mark.parametrize("circuit, data, kw", [
    (build_four_t_toffoli(), [0, 1, 2], {}),
    (build_error_detecting_toffoli(), [0, 1, 2], {}),
    (build_ancilla_consumption(), [0, 1, 2], {"ancilla_state": toffoli_ancilla_state()}),
    (_C3X.realization, list(_C3X.data_qubits), {}),
])
def test_branch_probabilities_sum_to_one(circuit, data, kw):
    rng = np.random.default_rng(5)
    for _ in range(4):
        psi = initial_state(circuit, random_state(len(data), rng), data, kw.get("ancilla_state"))
        total = sum(b.probability for b in run(circuit, psi))
        assert total == pytest.approx(1.0, abs=1e-10)


def test_prep_circuit_needs_no_data_state():
    (b,) = run(build_ancilla_prep())
    assert b.outcomes == {0: 0}


def test_dense_cap():
    with pytest.raises(SimulationError, match="cap"):
        run(build(17))
