"""
Raw magic states per Toffoli
============================

Compare three Toffoli schemes under a menu of two distillation protocols.
"""
from toffoli_ft.resources import (
    aggregate_failure, compare, default_schemes, min_rounds, pipeline_cost,
    without_distillation)

pipe = min_rounds(1e-2, 1e-15)
print("pipeline to 1e-15:", pipe.names)
for t in pipeline_cost(pipe).trace:
    print(f"  {t.protocol:4s} p_out={t.p_out:.2e}  cost={t.cost:.1f}")

report = compare(default_schemes(), 1e-2, 1e-12)
for name, r in report.results.items():
    print(f"{name:16s} {r.pipeline}  raw states {r.raw_states_total:8.1f}  "
          f"error {r.toffoli_error:.1e}")
print("four_t / error_detecting:", round(report.savings("four_t", "error_detecting"), 3))
print("seven_t / four_t:", report.savings("seven_t", "four_t"))

# straight from raw states at p=1e-4
raw = without_distillation(default_schemes(), 1e-4)
err = raw.results["error_detecting"].toffoli_error
print("error-detecting Toffoli error at 1e-4:", err)
print("chance of any failure in 1e6 Toffolis:", aggregate_failure(err, 1e6))
