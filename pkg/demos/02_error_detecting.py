"""
Detecting Z errors on T gates
=============================

Eight T gates arranged so that any single Z fault after a T flips the
syndrome bit. Enumerate every fault pattern and read off exact
acceptance and posterior error polynomials.
"""
from toffoli_ft import build_error_detecting_toffoli
from toffoli_ft.error_analysis import (
    ErrorPattern, classify, enumerate_all, monte_carlo, x_error_survey)

circuit = build_error_detecting_toffoli()
print("T count:", circuit.t_count())

for site in range(8):
    print(f"Z after T #{site}:", classify(ErrorPattern.of([site])).cls.value)

report = enumerate_all()
print("accept counts by weight:", report.accept_poly.counts)
print("faulty counts by weight:", report.faulty_poly.counts)
print("leading posterior term:", report.faulty_poly.lowest_order())

for p in (1e-2, 1e-3, 1e-4):
    print(f"p={p:g}  accept={report.acceptance(p):.6f}  posterior={report.posterior(p):.3e}")

# sampling agrees with the exact numbers
mc = monte_carlo(0.01, 200_000, seed=7, report=report)
print("MC acceptance", mc.acceptance_rate, mc.acceptance_interval())
print("MC posterior ", mc.posterior_rate, mc.posterior_interval())

# X faults are not caught
for row in x_error_survey():
    print(row.pattern, row.cls.value, round(row.reject_probability, 4))
