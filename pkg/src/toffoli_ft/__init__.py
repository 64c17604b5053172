"""Fault-tolerant Toffoli constructions: exact verification, fault statistics
and distillation cost estimates."""

__version__ = "0.1.0"

from .circuit import Circuit, CircuitError, Gate, build, inverse, loads, t_count
from .constructions import (
    ControlledGate,
    build_ancilla_consumption,
    build_ancilla_prep,
    build_error_detecting_toffoli,
    build_four_t_toffoli,
    build_multi_controlled,
    build_standard_seven_t_toffoli,
    build_toffoli_star,
    build_toffoli_star_dagger,
    controlled_not,
    controlled_z,
    extend_control,
    reference_toffoli,
)
from .error_analysis import (
    ErrorPattern,
    PatternClass,
    classify,
    enumerate_all,
    inject,
    monte_carlo,
    x_error_survey,
)
from .resources import (
    DistillationProtocol,
    Pipeline,
    compare,
    min_rounds,
    pipeline_cost,
    scheme_cost,
)
from .simulator import extract_unitary, gadget_implements, phase_insensitive_distance, run
