"""Toffoli constructions from Clifford gates plus T.

Wire layouts (qubit indices):

* ``build_toffoli_star``: x=0, y=1, t=2
* ``build_four_t_toffoli``: x=0, y=1, t=2, ancilla=3
* ``build_error_detecting_toffoli``: x=0, y=1, t=2, code ancilla=3
* ``build_ancilla_consumption``: data 0..2, prepared ancilla 3..5
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .circuit import CLIFFORD_CORRECTIONS, Circuit, Gate, build
from .simulator import (
    GadgetResult,
    OPERATOR_TOL,
    extract_unitary,
    gadget_implements,
    phase_insensitive_distance,
    run,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)


def controlled(base: np.ndarray, n_controls: int = 1) -> np.ndarray:
    """Block-diagonal ``I ... I G`` acting on ``n_controls`` controls then ``base``'s wires."""
    dim = base.shape[0] * 2**n_controls
    out = np.eye(dim, dtype=complex)
    out[dim - base.shape[0]:, dim - base.shape[0]:] = base
    return out


def reference_toffoli() -> np.ndarray:
    return controlled(X, 2)


def controlled_phase(phase: complex) -> np.ndarray:
    """Two-qubit diagonal with ``phase`` on ``|11>``: CS is ``1j``, CS-dagger ``-1j``."""
    return np.diag([1, 1, 1, phase]).astype(complex)


def _star_gates(x: int, y: int, t: int) -> list[Gate]:
    names = [("H", t), ("CNOT", x, t), ("TDG", t), ("CNOT", y, t), ("T", t),
             ("CNOT", x, t), ("TDG", t), ("CNOT", y, t), ("T", t), ("H", t)]
    return [Gate(name, qs) for name, *qs in names]


def build_toffoli_star() -> Circuit:
    """Four-T almost-Toffoli: Toffoli followed by controlled-S-dagger on (x, y).

    The T gates form a phase polynomial on the Hadamard-conjugated target;
    for x = y = 1 the target sees ``-i X`` and otherwise the identity.
    """
    return build(3).extend(_star_gates(0, 1, 2))


def build_toffoli_star_dagger() -> Circuit:
    return build_toffoli_star().inverse()


def build_four_t_toffoli() -> Circuit:
    """Exact Toffoli with four T gates, one ancilla and a measured correction.

    The almost-Toffoli writes ``xy`` into the ancilla with a stray ``-i``
    phase that S removes. CNOT copies ``xy`` onto the target, and the
    ancilla is read out in the X basis. Outcome 1 leaves a ``(-1)^{xy}``
    back-action phase, undone by CZ on the controls.
    """
    c = build(4, 1, ("data", "data", "data", "zero"))
    c = c.extend(_star_gates(0, 1, 3))
    c = c.s(3).cnot(3, 2).h(3).measure(3, 0)
    return c.add("CZ", 0, 1, condition=0)


def build_standard_seven_t_toffoli() -> Circuit:
    """Textbook measurement-free Toffoli with seven T gates."""
    c = build(3)
    c = c.h(2).cnot(1, 2).tdg(2).cnot(0, 2).t(2).cnot(1, 2).tdg(2).cnot(0, 2)
    c = c.t(1).t(2).h(2).cnot(0, 1).t(0).tdg(1).cnot(0, 1)
    return c


def build_error_detecting_toffoli() -> Circuit:
    """Eight-T Toffoli whose target sits in a two-qubit bit-flip code.

    Toffoli* acts on the target and its inverse on the code ancilla, so their
    controlled-S phases cancel. Decoding leaves the ancilla at ``|0>``; a
    single Z fault on any T gate becomes an X on one code qubit and flips the
    parity read by the final measurement (outcome 1 means discard).
    """
    c = build(4, 1, ("data", "data", "data", "zero"))
    c = c.cnot(2, 3)
    c = c.extend(_star_gates(0, 1, 2))
    c = c.extend(g.inverse() for g in reversed(_star_gates(0, 1, 3)))
    return c.cnot(2, 3).measure(3, 0)


def build_ancilla_prep() -> Circuit:
    """Error-detecting Toffoli on ``|+>|+>|0>``; accepted output is a Toffoli ancilla."""
    return (build_error_detecting_toffoli()
            .with_init(0, "plus").with_init(1, "plus").with_init(2, "zero"))


def toffoli_ancilla_state() -> np.ndarray:
    """``(|000> + |010> + |100> + |111>) / 2``, taken from the accepted prep branch."""
    (accepted,) = [b for b in run(build_ancilla_prep()) if b.outcomes[0] == 0]
    psi = accepted.state.reshape(2, 2, 2, 2)[:, :, :, 0].reshape(-1)
    return psi / np.linalg.norm(psi)


def build_ancilla_consumption() -> Circuit:
    """Teleport data qubits 0..2 through a Toffoli ancilla held on qubits 3..5.

    Every correction is a Clifford gate conditioned on one measurement.
    """
    da, db, dc, e1, e2, e3 = range(6)
    c = build(6, 3)
    c = c.cnot(da, e1).measure(e1, 0).add("CNOT", e2, e3, condition=0)
    c = c.cnot(db, e2).measure(e2, 1).add("CNOT", da, e3, condition=1)
    c = c.cnot(e3, dc).h(e3).measure(e3, 2).add("CZ", da, db, condition=2)
    return c


def corrections_are_clifford(circuit: Circuit) -> bool:
    return all(g.name in CLIFFORD_CORRECTIONS for g in circuit if g.condition is not None)


@dataclass(frozen=True)
class ControlledGate:
    """A circuit realizing controlled-``base`` on ``controls`` + ``targets``.

    ``controls[0]`` is the wire :func:`extend_control` substitutes.
    """

    base: np.ndarray = field(repr=False)
    realization: Circuit
    controls: tuple[int, ...]
    targets: tuple[int, ...]
    verified: bool = False

    @property
    def t_cost(self) -> int:
        return self.realization.t_count()

    @property
    def data_qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def unitary(self) -> np.ndarray:
        return controlled(self.base, len(self.controls))

    def check(self, tol: float = OPERATOR_TOL) -> GadgetResult:
        return gadget_implements(self.realization, self.unitary(), self.data_qubits, tol)

    def verify(self, tol: float = OPERATOR_TOL) -> ControlledGate:
        result = self.check(tol)
        if not result:
            raise ValueError(f"controlled gate failed verification: {result.failure}")
        return replace(self, verified=True)


def controlled_not() -> ControlledGate:
    return ControlledGate(X, build(2).cnot(0, 1), (0,), (1,)).verify()


def controlled_z() -> ControlledGate:
    return ControlledGate(Z, build(2).cz(0, 1), (0,), (1,)).verify()


def _extend(g: ControlledGate) -> ControlledGate:
    old, c0 = g.realization, g.controls[0]
    x, y, a = 0, 1, 2
    others = [q for q in range(old.qubit_count) if q != c0]
    qmap = {c0: a, **{q: 3 + i for i, q in enumerate(others)}}
    bit = old.classical_count
    tags = ("data", "data", "zero") + tuple(old.initial_states[q] for q in others)
    c = Circuit(3 + len(others), bit + 1, (), tags)
    c = c.extend(_star_gates(x, y, a)).s(a)
    c = c.compose(old, [qmap[q] for q in range(old.qubit_count)])
    c = c.h(a).measure(a, bit).add("CZ", x, y, condition=bit)
    return ControlledGate(g.base, c, (x, y) + tuple(qmap[q] for q in g.controls[1:]),
                          tuple(qmap[q] for q in g.targets))


def extend_control(g: ControlledGate) -> ControlledGate:
    """Add one control for four more T gates.

    New qubits x, y and ancilla a take indices 0, 1, 2; ``g`` runs with ``a``
    (which holds ``xy``) in place of its first control.
    """
    if not g.verified:
        raise ValueError("extend_control needs a verified controlled gate")
    return _extend(g).verify()


def build_multi_controlled(g: ControlledGate, n: int, verify: bool = True) -> ControlledGate:
    if n < 0:
        raise ValueError("n must be non-negative")
    for _ in range(n):
        g = extend_control(g) if verify else _extend(g)
    return g


@dataclass
class GadgetReport:
    name: str
    circuit: Circuit
    target: np.ndarray = field(repr=False)
    verified: bool
    t_count: int
    expected_t_count: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.verified) and self.t_count == self.expected_t_count


def _unitary_report(name, circuit, target, expected_t) -> GadgetReport:
    d = phase_insensitive_distance(extract_unitary(circuit), target)
    return GadgetReport(name, circuit, target, d < OPERATOR_TOL, circuit.t_count(),
                        expected_t, f"phase-insensitive distance {d:.3e}")


def _gadget_report(name, circuit, target, data, expected_t, **kw) -> GadgetReport:
    res = gadget_implements(circuit, target, data, **kw)
    detail = res.failure or (f"{res.inputs_checked} inputs, {res.branches_checked} branches, "
                             f"max residual {res.max_residual:.3e}")
    return GadgetReport(name, circuit, target, res.passed and corrections_are_clifford(circuit),
                        circuit.t_count(), expected_t, detail)


def _verify_prep() -> GadgetReport:
    c = build_ancilla_prep()
    branches = run(c)
    expected = np.zeros(8, dtype=complex)
    expected[[0b000, 0b010, 0b100, 0b111]] = 0.5
    accepted = [b for b in branches if b.outcomes[0] == 0]
    ok = len(branches) == 1 and len(accepted) == 1
    dist = 1.0
    if ok:
        psi = accepted[0].state.reshape(2, 2, 2, 2)[:, :, :, 0].reshape(-1)
        dist = float(1 - abs(np.vdot(expected, psi)))
        ok = dist < OPERATOR_TOL
    return GadgetReport("ancilla_prep", c, np.outer(expected, expected.conj()), ok,
                        c.t_count(), 8, f"accept probability {sum(b.probability for b in accepted):.12f}, "
                        f"infidelity {dist:.3e}")


def _verify_error_detecting() -> GadgetReport:
    c = build_error_detecting_toffoli()
    report = _gadget_report("error_detecting", c, reference_toffoli(), (0, 1, 2), 8)
    # noiseless syndrome must be 0 with certainty on every input
    for k in range(8):
        branches = run(c, np.kron(np.eye(8)[k], [1, 0]))
        if len(branches) != 1 or branches[0].outcomes[0] != 0:
            report.verified = False
            report.detail = f"syndrome not deterministically 0 on basis input {k}"
    return report


def _multi_control_report(n: int) -> GadgetReport:
    g = build_multi_controlled(controlled_not(), n, verify=False)
    res = g.check()  # one end-to-end check of the whole chain
    return GadgetReport(f"multi_control:{n}", g.realization, g.unitary(), res.passed,
                        g.t_cost, 4 * n, res.failure or f"{res.branches_checked} branches checked")


VERIFIERS = {
    "toffoli_star": lambda: _unitary_report(
        "toffoli_star", build_toffoli_star(),
        reference_toffoli() @ np.kron(controlled_phase(-1j), np.eye(2)), 4),
    "four_t": lambda: _gadget_report("four_t", build_four_t_toffoli(), reference_toffoli(),
                                     (0, 1, 2), 4),
    "seven_t": lambda: _unitary_report("seven_t", build_standard_seven_t_toffoli(),
                                       reference_toffoli(), 7),
    "error_detecting": _verify_error_detecting,
    "ancilla_prep": _verify_prep,
    "ancilla_consume": lambda: _gadget_report(
        "ancilla_consume", build_ancilla_consumption(), reference_toffoli(), (0, 1, 2), 0,
        ancilla_state=toffoli_ancilla_state()),
}

BUILDERS = {
    "toffoli_star": build_toffoli_star,
    "toffoli_star_dagger": build_toffoli_star_dagger,
    "four_t": build_four_t_toffoli,
    "seven_t": build_standard_seven_t_toffoli,
    "error_detecting": build_error_detecting_toffoli,
    "ancilla_prep": build_ancilla_prep,
    "ancilla_consume": build_ancilla_consumption,
}


def verify_construction(name: str) -> GadgetReport:
    """Run the full contract for a named construction (``multi_control:n`` allowed)."""
    if name.startswith("multi_control:"):
        n = int(name.split(":", 1)[1])
        if n < 0:
            raise KeyError(name)
        return _multi_control_report(n)
    return VERIFIERS[name]()


def build_named(name: str) -> Circuit:
    if name.startswith("multi_control:"):
        return build_multi_controlled(controlled_not(), int(name.split(":", 1)[1]),
                                      verify=False).realization
    return BUILDERS[name]()
