"""Fault injection at T sites and exact post-selection statistics.

Each T gate independently suffers a Z fault with probability ``p``. A fault
pattern is a set of T sites; it is *detected* when the syndrome bit reads 1,
and otherwise accepted either correctly (the data still sees a Toffoli) or
faultily. Summing over all ``2**n`` patterns with weights
``p**k * (1 - p)**(n - k)`` gives the acceptance probability and the joint
probability of acceptance with a wrong output as exact integer-coefficient
polynomials.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circuit import Circuit, CircuitError, Gate
from .constructions import build_error_detecting_toffoli, reference_toffoli
from .simulator import DEFAULT_SEED, random_state, run, split_off

PAULIS = ("Z", "X")
DETERMINISM_TOL = 1e-10
EQUALITY_TOL = 1e-10


class PatternClass(str, enum.Enum):
    DETECTED = "detected"
    ACCEPTED_CORRECT = "accepted_correct"
    ACCEPTED_FAULTY = "accepted_faulty"


class InvariantViolation(RuntimeError):
    """A Z-only fault pattern gave a syndrome that depends on chance or input."""


@dataclass(frozen=True)
class ErrorPattern:
    """Pauli faults keyed by T-site ordinal, stored sorted."""

    faults: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        faults = tuple(sorted((int(s), str(p)) for s, p in self.faults))
        sites = [s for s, _ in faults]
        if len(set(sites)) != len(sites):
            raise CircuitError(f"fault sites must be distinct, got {sites}")
        for s, p in faults:
            if s < 0:
                raise CircuitError(f"negative T site {s}")
            if p not in PAULIS:
                raise CircuitError(f"unsupported fault {p!r}")
        object.__setattr__(self, "faults", faults)

    @classmethod
    def of(cls, sites: Iterable[int], pauli: str = "Z") -> ErrorPattern:
        return cls(tuple((s, pauli) for s in sites))

    @classmethod
    def from_mask(cls, mask: int, n_sites: int, pauli: str = "Z") -> ErrorPattern:
        """Bit ``i`` of ``mask`` (least significant first) marks T site ``i``."""
        return cls.of([i for i in range(n_sites) if mask >> i & 1], pauli)

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.faults)

    @property
    def weight(self) -> int:
        return len(self.faults)

    def mask(self) -> int:
        return sum(1 << s for s in self.sites)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{s}:{p}" for s, p in self.faults) + "}"


def inject(circuit: Circuit, pattern: ErrorPattern | Mapping[int, str]) -> Circuit:
    """Insert each fault's Pauli directly after its T/TDG gate."""
    if not isinstance(pattern, ErrorPattern):
        pattern = ErrorPattern(tuple(pattern.items()))
    sites = circuit.t_sites()
    faults = dict(pattern.faults)
    for s in faults:
        if s >= len(sites):
            raise CircuitError(f"T site {s} out of range (circuit has {len(sites)})")
    by_position = {sites[s]: p for s, p in faults.items()}
    gates: list[Gate] = []
    for i, gate in enumerate(circuit.gates):
        gates.append(gate)
        if i in by_position:
            gates.append(Gate(by_position[i], gate.qubits))
    return Circuit(circuit.qubit_count, circuit.classical_count, tuple(gates),
                   circuit.initial_states)


@dataclass
class Classification:
    pattern: ErrorPattern
    cls: PatternClass
    reject_probability: float
    inputs_checked: int


def _test_inputs(n_random: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    basis = list(np.eye(8, dtype=complex))
    return basis + [random_state(3, rng) for _ in range(n_random)]


def classify(pattern: ErrorPattern, circuit: Circuit | None = None, *,
             random_inputs: int = 4, seed: int = DEFAULT_SEED) -> Classification:
    """Classify a fault pattern on the error-detecting Toffoli by simulation.

    The data wires are qubits 0..2, the syndrome is classical bit 0. A
    pattern counts as correct only if the accepted output matches Toffoli on
    every basis input and every seeded random input.
    """
    circuit = circuit or build_error_detecting_toffoli()
    noisy = inject(circuit, pattern)
    target = reference_toffoli()
    data = (0, 1, 2)
    zero_ancilla = np.array([1, 0], dtype=complex)
    inputs = _test_inputs(random_inputs, seed)
    z_only = all(p == "Z" for _, p in pattern.faults)
    rejects, correct = [], True
    for psi in inputs:
        branches = run(noisy, np.kron(psi, zero_ancilla))
        reject = sum(b.probability for b in branches if b.outcomes[0] == 1)
        rejects.append(reject)
        if z_only and min(reject, 1 - reject) > DETERMINISM_TOL:
            raise InvariantViolation(f"pattern {pattern}: syndrome is random ({reject:.6f})")
        for b in branches:
            if b.outcomes[0] == 0:
                residual = split_off(b.state, noisy.qubit_count, data, target @ psi)
                correct = correct and residual < EQUALITY_TOL
    if z_only and max(rejects) - min(rejects) > DETERMINISM_TOL:
        raise InvariantViolation(f"pattern {pattern}: syndrome depends on the input")
    if min(rejects) > 1 - DETERMINISM_TOL:
        cls = PatternClass.DETECTED
    elif correct:
        cls = PatternClass.ACCEPTED_CORRECT
    else:
        cls = PatternClass.ACCEPTED_FAULTY
    return Classification(pattern, cls, float(np.mean(rejects)), len(inputs))


def _bernstein_to_power(counts: Sequence[int]) -> list[int]:
    """Expand ``sum_k counts[k] p^k (1-p)^(n-k)`` into ordinary power coefficients."""
    n = len(counts) - 1
    out = [0] * (n + 1)
    for k, c in enumerate(counts):
        for j in range(n - k + 1):
            out[k + j] += c * comb(n - k, j) * (-1) ** j
    return out


@dataclass(frozen=True)
class Polynomial:
    """``sum_k counts[k] * p**k * (1 - p)**(n - k)`` with integer pattern counts."""

    counts: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.counts) - 1

    def __call__(self, p: float) -> float:
        return float(sum(c * p**k * (1 - p) ** (self.n - k) for k, c in enumerate(self.counts)))

    def power_coefficients(self) -> list[int]:
        return _bernstein_to_power(self.counts)

    def lowest_order(self) -> tuple[int, int] | None:
        """(degree, coefficient) of the leading nonzero power term."""
        for k, c in enumerate(self.power_coefficients()):
            if c:
                return k, c
        return None


@dataclass
class PosteriorReport:
    n_sites: int
    classes: dict[int, PatternClass]
    accept_poly: Polynomial
    faulty_poly: Polynomial

    def acceptance(self, p: float) -> float:
        return self.accept_poly(p)

    def rejection(self, p: float) -> float:
        """Computed from the detected patterns directly to keep precision at tiny p."""
        detected = [c - a for c, a in zip(_binomial_row(self.n_sites), self.accept_poly.counts)]
        return Polynomial(tuple(detected))(p)

    def posterior(self, p: float) -> float:
        """Probability the output is wrong given the syndrome accepted it."""
        accept = self.accept_poly(p)
        return self.faulty_poly(p) / accept if accept > 0 else float("nan")

    def counts_by_weight(self) -> dict[int, dict[str, int]]:
        table = {w: {c.value: 0 for c in PatternClass} for w in range(self.n_sites + 1)}
        for mask, cls in self.classes.items():
            table[bin(mask).count("1")][cls.value] += 1
        return table

    def class_of(self, mask: int) -> PatternClass:
        return self.classes[mask]


def _binomial_row(n: int) -> list[int]:
    return [comb(n, k) for k in range(n + 1)]


def report_from_classes(classes: Mapping[int, PatternClass], n_sites: int) -> PosteriorReport:
    accept = [0] * (n_sites + 1)
    faulty = [0] * (n_sites + 1)
    for mask, cls in classes.items():
        w = bin(mask).count("1")
        if cls is not PatternClass.DETECTED:
            accept[w] += 1
        if cls is PatternClass.ACCEPTED_FAULTY:
            faulty[w] += 1
    return PosteriorReport(n_sites, dict(classes), Polynomial(tuple(accept)),
                           Polynomial(tuple(faulty)))


@lru_cache(maxsize=None)
def enumerate_all(seed: int = DEFAULT_SEED) -> PosteriorReport:
    """Classify all ``2**8`` Z-fault patterns of the error-detecting Toffoli."""
    circuit = build_error_detecting_toffoli()
    n = circuit.t_count()
    classes = {mask: classify(ErrorPattern.from_mask(mask, n), circuit, seed=seed).cls
               for mask in range(2**n)}
    return report_from_classes(classes, n)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054
                    ) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1 + z**2 / trials
    centre = (phat + z**2 / (2 * trials)) / denom
    half = z * np.sqrt(phat * (1 - phat) / trials + z**2 / (4 * trials**2)) / denom
    return float(max(0.0, centre - half)), float(min(1.0, centre + half))


@dataclass
class MonteCarloResult:
    p: float
    trials: int
    seed: int
    accepted: int
    faulty: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.trials

    @property
    def posterior_rate(self) -> float:
        return self.faulty / self.accepted if self.accepted else 0.0

    def acceptance_interval(self) -> tuple[float, float]:
        return wilson_interval(self.accepted, self.trials)

    def posterior_interval(self) -> tuple[float, float]:
        return wilson_interval(self.faulty, self.accepted)


def monte_carlo(p: float, trials: int, seed: int = DEFAULT_SEED, *,
                report: PosteriorReport | None = None, shards: int = 8) -> MonteCarloResult:
    """Draw i.i.d. Bernoulli(p) faults per site and tally pattern classes.

    Patterns are looked up in the exhaustive classification table. The
    trials are split into ``shards`` independent substreams of one seed.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if trials < 1:
        raise ValueError("trials must be positive")
    report = report or enumerate_all()
    n = report.n_sites
    lookup = np.array([report.classes[m].value for m in range(2**n)])
    accepted = lookup != PatternClass.DETECTED.value
    faulty = lookup == PatternClass.ACCEPTED_FAULTY.value
    weights = 1 << np.arange(n)
    n_acc = n_bad = 0
    sizes = [len(a) for a in np.array_split(np.arange(trials), shards)]
    for child, size in zip(np.random.SeedSequence(seed).spawn(shards), sizes):
        rng = np.random.default_rng(child)
        masks = (rng.random((size, n)) < p) @ weights
        n_acc += int(accepted[masks].sum())
        n_bad += int(faulty[masks].sum())
    return MonteCarloResult(p, trials, seed, n_acc, n_bad)


def x_error_survey(seed: int = DEFAULT_SEED) -> list[Classification]:
    """Classify each single-X fault; no outcome is assumed in advance."""
    circuit = build_error_detecting_toffoli()
    return [classify(ErrorPattern.of([s], "X"), circuit, seed=seed)
            for s in range(circuit.t_count())]


def patterns_of_weight(n_sites: int, weight: int) -> list[ErrorPattern]:
    return [ErrorPattern.of(c) for c in itertools.combinations(range(n_sites), weight)]
