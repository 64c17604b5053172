"""
Adding controls at four T gates each
====================================

Each extension wraps a verified controlled gate with one more control,
at a cost of four T gates.
"""
import numpy as np

from toffoli_ft.constructions import build_multi_controlled, controlled_not, controlled_z

for n in range(4):
    g = build_multi_controlled(controlled_not(), n)
    print(f"{n + 1} controls: T cost {g.t_cost}, "
          f"{g.realization.qubit_count} qubits, verified={g.verified}")

ccz = build_multi_controlled(controlled_z(), 1)
print("CCZ diagonal:", np.diag(ccz.unitary()).real)
