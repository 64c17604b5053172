"""Magic-state distillation cost recurrence and Toffoli scheme comparison.

A distillation round turns ``n_in`` states of error ``p`` into ``n_out``
states of error ``c * p**k`` and succeeds with probability ``(1 - p)**n_in``.
Expected raw-state cost per output therefore obeys

    C_i = C_{i-1} * (n_in / n_out) / (1 - p_{i-1})**n_in,   p_i = c * p_{i-1}**k

starting from ``C_0 = 1`` and ``p_0 = p_raw``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .error_analysis import enumerate_all


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class DistillationProtocol:
    name: str
    n_in: int
    n_out: int
    error_coeff: float
    error_power: int

    def __post_init__(self):
        if not self.n_in > self.n_out >= 1:
            raise ValueError(f"{self.name}: need n_in > n_out >= 1")
        if self.error_coeff <= 0 or self.error_power < 2:
            raise ValueError(f"{self.name}: need error_coeff > 0 and error_power >= 2")

    def output_error(self, p: float) -> float:
        return self.error_coeff * p**self.error_power

    def success_probability(self, p: float) -> float:
        return (1 - p) ** self.n_in


BRAVYI_KITAEV = DistillationProtocol("BK", 15, 1, 35.0, 3)
MEIER_EASTIN_KNILL = DistillationProtocol("MEK", 10, 2, 8.0, 2)
DEFAULT_MENU = (BRAVYI_KITAEV, MEIER_EASTIN_KNILL)


@dataclass(frozen=True)
class Pipeline:
    rounds: tuple[DistillationProtocol, ...]
    p_raw: float

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(self.rounds))
        if not 0 < self.p_raw < 1:
            raise ValueError("p_raw must lie strictly between 0 and 1")

    @property
    def names(self) -> list[str]:
        return [r.name for r in self.rounds]


@dataclass
class RoundTrace:
    protocol: str
    p_in: float
    p_out: float
    success_probability: float
    cost: float


@dataclass
class PipelineCost:
    raw_states_per_output: float
    p_out: float
    trace: list[RoundTrace]


def pipeline_cost(pipeline: Pipeline) -> PipelineCost:
    cost, p = 1.0, pipeline.p_raw
    trace = []
    for proto in pipeline.rounds:
        p_next = proto.output_error(p)
        if p_next >= p:
            raise PipelineError(
                f"pipeline not contractive: {proto.name} maps error {p:.3e} to {p_next:.3e}"
            )
        success = proto.success_probability(p)
        cost *= proto.n_in / proto.n_out / success
        trace.append(RoundTrace(proto.name, p, p_next, success, cost))
        p = p_next
    return PipelineCost(cost, p, trace)


@dataclass
class ToffoliScheme:
    name: str
    t_gates_needed: int
    toffoli_error: Callable[[float], float] = field(repr=False)
    # probability a preparation attempt is kept; retries inflate cost by 1/this
    acceptance: Callable[[float], float] = field(default=lambda p: 1.0, repr=False)


def seven_t_scheme() -> ToffoliScheme:
    return ToffoliScheme("seven_t", 7, lambda p: 7 * p)


def four_t_scheme() -> ToffoliScheme:
    return ToffoliScheme("four_t", 4, lambda p: 4 * p)


def error_detecting_scheme() -> ToffoliScheme:
    report = enumerate_all()
    return ToffoliScheme("error_detecting", report.n_sites, report.posterior, report.acceptance)


SCHEMES = {
    "seven_t": seven_t_scheme,
    "four_t": four_t_scheme,
    "error_detecting": error_detecting_scheme,
}


def default_schemes() -> list[ToffoliScheme]:
    return [f() for f in SCHEMES.values()]


def scheme_cost(scheme: ToffoliScheme, pipeline: Pipeline) -> float:
    pc = pipeline_cost(pipeline)
    return scheme.t_gates_needed * pc.raw_states_per_output / scheme.acceptance(pc.p_out)


def candidate_pipelines(menu: Sequence[DistillationProtocol], max_rounds: int,
                        ordered: bool) -> Iterable[tuple[DistillationProtocol, ...]]:
    """All round sequences up to ``max_rounds``.

    With ``ordered`` only sequences that respect menu order are produced
    (all rounds of ``menu[0]`` first, then ``menu[1]``, ...), i.e. hybrid
    schemes in the listed order.
    """
    for r in range(max_rounds + 1):
        if ordered:
            yield from itertools.combinations_with_replacement(menu, r)
        else:
            yield from itertools.product(menu, repeat=r)


def _cheapest(p_raw: float, menu: Sequence[DistillationProtocol],
              good_enough: Callable[[float], bool], max_rounds: int,
              ordered: bool) -> Pipeline:
    best = None
    for rounds in candidate_pipelines(menu, max_rounds, ordered):
        pipeline = Pipeline(rounds, p_raw)
        try:
            pc = pipeline_cost(pipeline)
        except PipelineError:
            continue
        if good_enough(pc.p_out) and (best is None or pc.raw_states_per_output < best[0]):
            best = (pc.raw_states_per_output, pipeline)
    if best is None:
        raise PipelineError(f"target unreachable within {max_rounds} rounds from p_raw={p_raw}")
    return best[1]


def min_rounds(p_raw: float, target_p_t: float,
               menu: Sequence[DistillationProtocol] = DEFAULT_MENU, *,
               max_rounds: int = 6, ordered: bool = True) -> Pipeline:
    """Cheapest pipeline whose output error is at most ``target_p_t``."""
    return _cheapest(p_raw, menu, lambda p: p <= target_p_t, max_rounds, ordered)


@dataclass
class SchemeResult:
    name: str
    t_gates: int
    pipeline: list[str]
    p_t: float
    raw_states_per_t: float
    raw_states_total: float
    toffoli_error: float
    trace: list[RoundTrace]
    volume: float | None = None

    def aggregate_failure(self, n_toffolis: float) -> float:
        return aggregate_failure(self.toffoli_error, n_toffolis)


def aggregate_failure(toffoli_error: float, n_toffolis: float) -> float:
    """Chance that at least one of ``n_toffolis`` independent gates fails."""
    return -math.expm1(n_toffolis * math.log1p(-toffoli_error))


@dataclass
class SchemeReport:
    p_raw: float
    target_toffoli_error: float | None
    results: dict[str, SchemeResult]

    def savings(self, baseline: str, alternative: str) -> float:
        return self.results[baseline].raw_states_total / self.results[alternative].raw_states_total

    def savings_table(self) -> dict[str, float]:
        names = list(self.results)
        return {f"{a}/{b}": self.savings(a, b)
                for a, b in itertools.permutations(names, 2)}

    def to_dict(self) -> dict:
        return {
            "p_raw": self.p_raw,
            "target_toffoli_error": self.target_toffoli_error,
            "schemes": {k: asdict(v) for k, v in self.results.items()},
            "savings": self.savings_table(),
        }


def evaluate(scheme: ToffoliScheme, pipeline: Pipeline,
             volume_per_raw_state: float | None = None) -> SchemeResult:
    pc = pipeline_cost(pipeline)
    total = scheme_cost(scheme, pipeline)
    return SchemeResult(
        scheme.name, scheme.t_gates_needed, pipeline.names, pc.p_out,
        pc.raw_states_per_output, total, scheme.toffoli_error(pc.p_out), pc.trace,
        None if volume_per_raw_state is None else total * volume_per_raw_state,
    )


def compare(schemes: Sequence[ToffoliScheme], p_raw: float, target_toffoli_error: float,
            menu: Sequence[DistillationProtocol] = DEFAULT_MENU, *,
            max_rounds: int = 6, ordered: bool = True,
            volume_per_raw_state: float | None = None) -> SchemeReport:
    """Give each scheme its cheapest pipeline meeting the Toffoli error target."""
    results = {}
    for s in schemes:
        pipeline = _cheapest(p_raw, menu, lambda p, s=s: s.toffoli_error(p) <= target_toffoli_error,
                             max_rounds, ordered)
        results[s.name] = evaluate(s, pipeline, volume_per_raw_state)
    return SchemeReport(p_raw, target_toffoli_error, results)


def without_distillation(schemes: Sequence[ToffoliScheme], p_raw: float) -> SchemeReport:
    return SchemeReport(p_raw, None, {s.name: evaluate(s, Pipeline((), p_raw)) for s in schemes})


@dataclass
class ResourceConfig:
    menu: tuple[DistillationProtocol, ...] = DEFAULT_MENU
    scheme_names: tuple[str, ...] = tuple(SCHEMES)
    p_raw: float = 1e-2
    target: float = 1e-12
    max_rounds: int = 6
    ordered: bool = True
    volume_per_raw_state: float | None = None
    source: str = "built-in defaults"

    def schemes(self) -> list[ToffoliScheme]:
        return [SCHEMES[n]() for n in self.scheme_names]


def load_config(path: str | Path | None) -> ResourceConfig:
    """Read a JSON protocol menu and scheme list; ``None`` gives the defaults.

    Keys (all optional): ``protocols`` (list of objects with ``name``,
    ``n_in``, ``n_out``, ``error_coeff``, ``error_power``), ``schemes``,
    ``p_raw``, ``target``, ``max_rounds``, ``ordered``, ``volume_per_raw_state``.
    """
    if path is None:
        return ResourceConfig()
    raw = json.loads(Path(path).read_text())
    cfg = ResourceConfig(source=str(path))
    if "protocols" in raw:
        cfg.menu = tuple(DistillationProtocol(**p) for p in raw["protocols"])
    if "schemes" in raw:
        unknown = set(raw["schemes"]) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes {sorted(unknown)}")
        cfg.scheme_names = tuple(raw["schemes"])
    for key in ("p_raw", "target", "max_rounds", "ordered", "volume_per_raw_state"):
        if key in raw:
            setattr(cfg, key, raw[key])
    return cfg
