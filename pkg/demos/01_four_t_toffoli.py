"""
Toffoli with four T gates
=========================

Compute the AND of two controls into a fresh ancilla, copy it onto the
target, then erase the ancilla with an X-basis measurement and a
conditional CZ.
"""
import numpy as np

from toffoli_ft import build_four_t_toffoli, build_toffoli_star
from toffoli_ft.constructions import controlled_phase, reference_toffoli
from toffoli_ft.simulator import basis_state, extract_unitary, gadget_implements, initial_state, run

# the three-qubit building block is Toffoli up to a controlled-S on the controls
star = extract_unitary(build_toffoli_star())
cs_dag = np.kron(controlled_phase(-1j), np.eye(2))
print("Toffoli* == Tof . CS^dag:", np.allclose(star, reference_toffoli() @ cs_dag))

circuit = build_four_t_toffoli()
print(circuit.dumps())
print("T count:", circuit.t_count())

# follow |110> through both measurement outcomes
psi = initial_state(circuit, basis_state([1, 1, 0]), [0, 1, 2])
for branch in run(circuit, psi):
    top = np.argmax(np.abs(branch.state))
    print(f"outcome {branch.outcomes[0]}  p={branch.probability:.2f}  "
          f"state |{top:04b}>")

res = gadget_implements(circuit, reference_toffoli(), [0, 1, 2], random_inputs=8)
print("gadget check:", res.passed, "max residual", res.max_residual)
