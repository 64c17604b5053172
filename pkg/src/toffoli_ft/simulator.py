"""Exact dense state-vector simulation with measurement-branch enumeration.

States are flat complex arrays of length ``2**n`` (qubit 0 most significant).
Measurements either fork the state into every outcome with nonzero
probability, read a fixed outcome, or draw one outcome from a seeded RNG.
Conditional gates are applied inside each branch as soon as their bit is known.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate

MAX_QUBITS = 16
OPERATOR_TOL = 1e-10
NORM_TOL = 1e-12
BRANCH_CUTOFF = 1e-12
DEFAULT_SEED = 20130108

_R2 = 1 / np.sqrt(2)
_W = np.exp(1j * np.pi / 4)
MATRICES = {
    "H": np.array([[_R2, _R2], [_R2, -_R2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, _W]], dtype=complex),
    "TDG": np.array([[1, 0], [0, np.conj(_W)]], dtype=complex),
}


class SimulationError(ValueError):
    pass


@dataclass
class Branch:
    """One measurement record with its probability and normalized post-state."""

    outcomes: dict[int, int]
    probability: float
    state: np.ndarray

    def bits(self, order: Sequence[int] | None = None) -> tuple[int, ...]:
        keys = sorted(self.outcomes) if order is None else order
        return tuple(self.outcomes[k] for k in keys)


def basis_state(bits: Sequence[int]) -> np.ndarray:
    n = len(bits)
    psi = np.zeros(2**n, dtype=complex)
    psi[int("".join(str(int(b)) for b in bits) or "0", 2)] = 1.0
    return psi


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return psi / np.linalg.norm(psi)


def permute_qubits(psi: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Reorder a state whose tensor factor ``i`` belongs on qubit ``order[i]``."""
    n = len(order)
    tensor = psi.reshape((2,) * n)
    return np.moveaxis(tensor, list(range(n)), list(order)).reshape(-1)


def initial_state(circuit: Circuit, data_state: np.ndarray | None = None,
                  data_qubits: Sequence[int] | None = None,
                  ancilla_state: np.ndarray | None = None) -> np.ndarray:
    """Full input state from a data state and the circuit's initial-state tags.

    Qubits outside ``data_qubits`` take their tag (``zero`` or ``plus``)
    unless ``ancilla_state`` supplies their joint state, in ascending qubit order.
    """
    n = circuit.qubit_count
    if data_qubits is None:
        data_qubits = [q for q, tag in enumerate(circuit.initial_states) if tag == "data"]
    data_qubits = list(data_qubits)
    rest = [q for q in range(n) if q not in data_qubits]
    if data_state is None:
        if data_qubits:
            raise SimulationError("circuit has data qubits but no data state was given")
        data_state = np.ones(1, dtype=complex)
    data_state = np.asarray(data_state, dtype=complex)
    if data_state.shape != (2 ** len(data_qubits),):
        raise SimulationError(
            f"data state has dimension {data_state.size}, expected {2 ** len(data_qubits)}"
        )
    if ancilla_state is None:
        ancilla_state = np.ones(1, dtype=complex)
        for q in rest:
            tag = circuit.initial_states[q]
            if tag == "data":
                raise SimulationError(f"qubit {q} is tagged data but is not a data qubit")
            single = np.array([1, 0], dtype=complex) if tag == "zero" else np.array([_R2, _R2])
            ancilla_state = np.kron(ancilla_state, single)
    ancilla_state = np.asarray(ancilla_state, dtype=complex)
    if ancilla_state.shape != (2 ** len(rest),):
        raise SimulationError("ancilla state dimension does not match the ancilla qubits")
    return permute_qubits(np.kron(data_state, ancilla_state), data_qubits + rest)


def apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply a unitary gate to a flat state and return a new flat state."""
    tensor = psi.reshape((2,) * n).copy()
    if gate.name in MATRICES:
        (q,) = gate.qubits
        tensor = np.moveaxis(np.tensordot(MATRICES[gate.name], tensor, axes=([1], [q])), 0, q)
    elif gate.name == "CNOT":
        c, t = gate.qubits
        sel = [slice(None)] * n
        sel[c] = 1
        sub = tensor[tuple(sel)]
        axis = t - (t > c)
        tensor[tuple(sel)] = np.flip(sub, axis=axis).copy()
    elif gate.name == "CZ":
        a, b = gate.qubits
        sel = [slice(None)] * n
        sel[a], sel[b] = 1, 1
        tensor[tuple(sel)] *= -1
    else:
        raise SimulationError(f"{gate.name} is not a unitary gate")
    return tensor.reshape(-1)


def _project(psi: np.ndarray, qubit: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    tensor = psi.reshape((2,) * n)
    zero, one = tensor.copy(), tensor.copy()
    sel = [slice(None)] * n
    sel[qubit] = 1
    zero[tuple(sel)] = 0
    sel[qubit] = 0
    one[tuple(sel)] = 0
    return zero.reshape(-1), one.reshape(-1)


def run(circuit: Circuit, state: np.ndarray | None = None, *,
        fixed: Mapping[int, int] | None = None,
        seed: int | np.random.Generator | None = None) -> list[Branch]:
    """Execute ``circuit`` on ``state``.

    With neither ``fixed`` nor ``seed`` every branch of nonzero probability is
    returned. ``fixed`` forces each measured bit's value (the branch
    probability reports how likely that record was). ``seed`` draws a single
    trajectory with the Born-rule distribution.
    """
    n = circuit.qubit_count
    if n > MAX_QUBITS:
        raise SimulationError(f"{n} qubits exceeds the dense-simulation cap of {MAX_QUBITS}")
    if state is None:
        state = initial_state(circuit)
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (2**n,):
        raise SimulationError(f"input has dimension {psi.size}, circuit needs {2**n}")
    if fixed is not None:
        missing = set(circuit.measured_bits()) - set(fixed)
        if missing:
            raise SimulationError(f"fixed outcomes missing for bits {sorted(missing)}")
    rng = None
    if seed is not None and fixed is None:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    branches = [Branch({}, 1.0, psi.copy())]
    for gate in circuit.gates:
        if gate.is_measurement:
            forked = []
            for br in branches:
                parts = _project(br.state, gate.qubits[0], n)
                probs = [float(np.vdot(p, p).real) for p in parts]
                if fixed is not None:
                    choices = [int(fixed[gate.cbit])]
                elif rng is not None:
                    choices = [int(rng.random() < probs[1])]
                else:
                    choices = [b for b in (0, 1) if probs[b] > BRANCH_CUTOFF]
                for b in choices:
                    if probs[b] <= 0.0:
                        raise SimulationError(
                            f"outcome c{gate.cbit}={b} has zero probability"
                        )
                    forked.append(Branch({**br.outcomes, gate.cbit: b},
                                         br.probability * probs[b],
                                         parts[b] / np.sqrt(probs[b])))
            branches = forked
        else:
            for br in branches:
                if gate.condition is None or br.outcomes[gate.condition] == 1:
                    br.state = apply_gate(br.state, gate, n)
    return branches


def sample_counts(circuit: Circuit, state: np.ndarray | None, shots: int,
                  seed: int | None = DEFAULT_SEED) -> dict[tuple[int, ...], int]:
    """Outcome histogram of ``shots`` runs, keyed by bits in ascending order."""
    branches = run(circuit, state)
    rng = np.random.default_rng(seed)
    probs = np.array([b.probability for b in branches])
    draws = rng.multinomial(shots, probs / probs.sum())
    return {b.bits(): int(k) for b, k in zip(branches, draws)}


def extract_unitary(circuit: Circuit) -> np.ndarray:
    if not circuit.is_unitary:
        raise SimulationError("circuit contains measurements; no unitary to extract")
    dim = 2**circuit.qubit_count
    columns = []
    for k in range(dim):
        psi = np.zeros(dim, dtype=complex)
        psi[k] = 1.0
        for gate in circuit.gates:
            psi = apply_gate(psi, gate, circuit.qubit_count)
        columns.append(psi)
    return np.stack(columns, axis=1)


def phase_insensitive_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``1 - |tr(U^dagger V)| / dim``; zero exactly when U equals V up to phase."""
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != v.shape:
        raise SimulationError(f"dimension mismatch {u.shape} vs {v.shape}")
    return float(max(0.0, 1.0 - abs(np.trace(u.conj().T @ v)) / u.shape[0]))


def is_unitary_matrix(u: np.ndarray, tol: float = OPERATOR_TOL) -> bool:
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=tol))


def split_off(psi: np.ndarray, n: int, qubits: Sequence[int],
              expected: np.ndarray) -> float:
    """Residual norm of ``psi`` after factoring ``expected`` off ``qubits``.

    Zero means ``psi`` is ``expected`` (up to phase) on ``qubits`` tensored
    with some state of the remaining qubits.
    """
    rest = [q for q in range(n) if q not in qubits]
    mat = np.moveaxis(psi.reshape((2,) * n), list(qubits) + rest,
                      list(range(n))).reshape(2 ** len(qubits), -1)
    others = expected.conj() @ mat
    return float(np.linalg.norm(mat - np.outer(expected, others)))


@dataclass
class GadgetResult:
    passed: bool
    max_residual: float
    inputs_checked: int
    branches_checked: int
    seed: int
    failure: str | None = None

    def __bool__(self) -> bool:
        return self.passed


def gadget_implements(circuit: Circuit, target: np.ndarray, data_qubits: Sequence[int],
                      tol: float = OPERATOR_TOL, *, random_inputs: int = 8,
                      seed: int = DEFAULT_SEED,
                      ancilla_state: np.ndarray | None = None) -> GadgetResult:
    """Check that every measurement branch applies ``target`` to the data qubits.

    Runs all computational-basis data inputs plus ``random_inputs`` seeded
    random states. A branch passes when its post-state factors as
    ``target @ input`` on the data wires (any global phase) times some state
    of the ancillas.
    """
    data_qubits = list(data_qubits)
    k = len(data_qubits)
    if target.shape != (2**k, 2**k):
        raise SimulationError("target dimension does not match data_qubits")
    rng = np.random.default_rng(seed)
    inputs = [(f"|{format(i, f'0{k}b')}>", np.eye(2**k, dtype=complex)[i]) for i in range(2**k)]
    inputs += [(f"random#{j}", random_state(k, rng)) for j in range(random_inputs)]
    worst, n_branches = 0.0, 0
    for label, data in inputs:
        full = initial_state(circuit, data, data_qubits, ancilla_state)
        expected = target @ data
        branches = run(circuit, full)
        total = sum(b.probability for b in branches)
        if abs(total - 1) > OPERATOR_TOL:
            return GadgetResult(False, 1.0, len(inputs), n_branches, seed,
                                f"input {label}: branch probabilities sum to {total}")
        for br in branches:
            n_branches += 1
            residual = split_off(br.state, circuit.qubit_count, data_qubits, expected)
            worst = max(worst, residual)
            if residual > tol:
                return GadgetResult(False, residual, len(inputs), n_branches, seed,
                                    f"input {label}, outcomes {br.outcomes}: "
                                    f"residual {residual:.3e}")
    return GadgetResult(True, worst, len(inputs), n_branches, seed)
