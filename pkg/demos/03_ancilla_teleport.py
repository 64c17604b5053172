"""
Toffoli by ancilla teleportation
================================

Prepare the state Tof|++0> offline, then consume it with CNOTs,
measurements and Clifford corrections.
"""
import numpy as np

from toffoli_ft import build_ancilla_consumption, build_ancilla_prep
from toffoli_ft.constructions import reference_toffoli, toffoli_ancilla_state
from toffoli_ft.error_analysis import enumerate_all
from toffoli_ft.simulator import initial_state, run, split_off

anc = toffoli_ancilla_state()
print("ancilla amplitudes:", np.round(anc.real, 3))
print("prep circuit:")
print(build_ancilla_prep().dumps())

# prep inherits the detector's rejection rate
print("prep rejection at p=1e-8:", enumerate_all().rejection(1e-8))

circuit = build_ancilla_consumption()
rng = np.random.default_rng(1)
data = rng.normal(size=8) + 1j * rng.normal(size=8)
data /= np.linalg.norm(data)
want = reference_toffoli() @ data

for branch in run(circuit, initial_state(circuit, data, [0, 1, 2], anc)):
    resid = split_off(branch.state, 6, [0, 1, 2], want)
    print("bits", branch.bits(), f"p={branch.probability:.3f}", f"residual={resid:.1e}")
