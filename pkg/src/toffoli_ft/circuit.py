"""Gate set, immutable circuit values and the plain-text dump format.

Qubit 0 is the most significant bit of a basis index, so ``|x, y, z>`` on
three qubits is amplitude ``4*x + 2*y + z``.

Text format, one item per line::

    qubits 4
    cbits 1
    init q0 data
    init q3 zero
    H 3
    CNOT 0 2
    TDG 2
    MZ 3 -> c0
    IF c0: CZ 0 1
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

ONE_QUBIT = ("H", "X", "Z", "S", "SDG", "T", "TDG")
TWO_QUBIT = ("CNOT", "CZ")
MEASURE = "MZ"
GATE_NAMES = ONE_QUBIT + TWO_QUBIT + (MEASURE,)
T_GATES = ("T", "TDG")
CLIFFORD_CORRECTIONS = ("X", "Z", "CNOT", "CZ")
INIT_TAGS = ("zero", "plus", "data")

_INVERSE = {"S": "SDG", "SDG": "S", "T": "TDG", "TDG": "T"}


class CircuitError(ValueError):
    """Raised when a gate or circuit violates the construction rules."""


@dataclass(frozen=True)
class Gate:
    """One instruction.

    ``cbit`` is the classical bit written by a measurement; ``condition`` is
    the bit that must read 1 for the gate to fire.
    """

    name: str
    qubits: tuple[int, ...]
    cbit: int | None = None
    condition: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.name not in GATE_NAMES:
            raise CircuitError(f"unknown gate {self.name!r}")
        arity = 2 if self.name in TWO_QUBIT else 1
        if len(self.qubits) != arity:
            raise CircuitError(f"{self.name} takes {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"{self.name} {self.qubits}: identical operands")
        if (self.name == MEASURE) != (self.cbit is not None):
            raise CircuitError(f"{self.name}: only measurements write a classical bit")
        if self.condition is not None and self.name == MEASURE:
            raise CircuitError("a measurement cannot be classically conditioned")

    @property
    def is_t(self) -> bool:
        return self.name in T_GATES

    @property
    def is_measurement(self) -> bool:
        return self.name == MEASURE

    def inverse(self) -> Gate:
        if self.is_measurement or self.condition is not None:
            raise CircuitError("non-unitary circuit has no inverse")
        return replace(self, name=_INVERSE.get(self.name, self.name))

    def conditioned_on(self, bit: int) -> Gate:
        if self.condition is not None:
            raise CircuitError("conditional gates cannot be nested")
        return replace(self, condition=bit)

    def remap(self, qubits: dict[int, int], cbits: dict[int, int] | None = None) -> Gate:
        cbits = cbits or {}
        return replace(
            self,
            qubits=tuple(qubits[q] for q in self.qubits),
            cbit=None if self.cbit is None else cbits[self.cbit],
            condition=None if self.condition is None else cbits[self.condition],
        )

    def to_text(self) -> str:
        body = f"{self.name} {' '.join(map(str, self.qubits))}"
        if self.is_measurement:
            body += f" -> c{self.cbit}"
        if self.condition is not None:
            body = f"IF c{self.condition}: {body}"
        return body


@dataclass(frozen=True)
class Circuit:
    """Immutable gate sequence. Every builder method returns a new circuit."""

    qubit_count: int
    classical_count: int = 0
    gates: tuple[Gate, ...] = ()
    initial_states: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.qubit_count < 0 or self.classical_count < 0:
            raise CircuitError("register sizes must be non-negative")
        tags = tuple(self.initial_states) or ("data",) * self.qubit_count
        if len(tags) != self.qubit_count:
            raise CircuitError("need one initial-state tag per qubit")
        for tag in tags:
            if tag not in INIT_TAGS:
                raise CircuitError(f"unknown initial state {tag!r}")
        object.__setattr__(self, "initial_states", tags)
        object.__setattr__(self, "gates", tuple(self.gates))
        written: set[int] = set()
        for gate in self.gates:
            self._check(gate, written)
            if gate.is_measurement:
                written.add(gate.cbit)

    def _check(self, gate: Gate, written: set[int]) -> None:
        for q in gate.qubits:
            if not 0 <= q < self.qubit_count:
                raise CircuitError(f"{gate.to_text()}: qubit index {q} out of range")
        if gate.is_measurement:
            if not 0 <= gate.cbit < self.classical_count:
                raise CircuitError(f"{gate.to_text()}: classical bit {gate.cbit} out of range")
            if gate.cbit in written:
                raise CircuitError(f"{gate.to_text()}: classical bit c{gate.cbit} written twice")
        if gate.condition is not None and gate.condition not in written:
            raise CircuitError(
                f"{gate.to_text()}: classical bit c{gate.condition} read before it is written"
            )

    # construction -------------------------------------------------------

    def append(self, gate: Gate) -> Circuit:
        return replace(self, gates=self.gates + (gate,))

    def extend(self, gates: Iterable[Gate]) -> Circuit:
        return replace(self, gates=self.gates + tuple(gates))

    def with_init(self, qubit: int, tag: str) -> Circuit:
        tags = list(self.initial_states)
        tags[qubit] = tag
        return replace(self, initial_states=tuple(tags))

    def add(self, name: str, *qubits: int, condition: int | None = None) -> Circuit:
        return self.append(Gate(name, qubits, condition=condition))

    def h(self, q: int) -> Circuit:
        return self.add("H", q)

    def x(self, q: int) -> Circuit:
        return self.add("X", q)

    def z(self, q: int) -> Circuit:
        return self.add("Z", q)

    def s(self, q: int) -> Circuit:
        return self.add("S", q)

    def sdg(self, q: int) -> Circuit:
        return self.add("SDG", q)

    def t(self, q: int) -> Circuit:
        return self.add("T", q)

    def tdg(self, q: int) -> Circuit:
        return self.add("TDG", q)

    def cnot(self, control: int, target: int) -> Circuit:
        return self.add("CNOT", control, target)

    def cz(self, a: int, b: int) -> Circuit:
        return self.add("CZ", a, b)

    def measure(self, qubit: int, cbit: int) -> Circuit:
        return self.append(Gate(MEASURE, (qubit,), cbit=cbit))

    # queries ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def t_sites(self) -> list[int]:
        """Gate positions of every T/TDG, in sequence order."""
        return [i for i, g in enumerate(self.gates) if g.is_t]

    def t_count(self) -> int:
        return len(self.t_sites())

    @property
    def is_unitary(self) -> bool:
        return not any(g.is_measurement or g.condition is not None for g in self.gates)

    def measured_bits(self) -> list[int]:
        return [g.cbit for g in self.gates if g.is_measurement]

    def inverse(self) -> Circuit:
        if not self.is_unitary:
            raise CircuitError("non-unitary circuit has no inverse")
        return replace(self, gates=tuple(g.inverse() for g in reversed(self.gates)))

    def compose(self, other: Circuit, qubits: Iterable[int] | None = None,
                cbits: Iterable[int] | None = None) -> Circuit:
        """Append ``other`` with its qubit ``i`` mapped to ``qubits[i]``."""
        qmap = dict(enumerate(range(other.qubit_count) if qubits is None else qubits))
        cmap = dict(enumerate(range(other.classical_count) if cbits is None else cbits))
        return self.extend(g.remap(qmap, cmap) for g in other.gates)

    # text format --------------------------------------------------------

    def dumps(self) -> str:
        lines = [f"qubits {self.qubit_count}", f"cbits {self.classical_count}"]
        lines += [f"init q{q} {tag}" for q, tag in enumerate(self.initial_states)]
        lines += [g.to_text() for g in self.gates]
        return "\n".join(lines) + "\n"


def build(qubit_count: int, classical_count: int = 0,
          initial_states: Iterable[str] = ()) -> Circuit:
    return Circuit(qubit_count, classical_count, (), tuple(initial_states))


def t_count(circuit: Circuit) -> int:
    return circuit.t_count()


def inverse(circuit: Circuit) -> Circuit:
    return circuit.inverse()


def _parse_bit(token: str, lineno: int) -> int:
    if not token.startswith("c") or not token[1:].isdigit():
        raise CircuitError(f"line {lineno}: bad classical bit {token!r}")
    return int(token[1:])


def _parse_gate(text: str, lineno: int) -> Gate:
    condition = None
    if text.startswith("IF "):
        head, _, text = text[3:].partition(":")
        condition = _parse_bit(head.strip(), lineno)
        text = text.strip()
    cbit = None
    if "->" in text:
        text, _, target = text.partition("->")
        cbit = _parse_bit(target.strip(), lineno)
    name, *args = text.split()
    try:
        qubits = tuple(int(a) for a in args)
    except ValueError:
        raise CircuitError(f"line {lineno}: bad operands in {text!r}") from None
    return Gate(name, qubits, cbit=cbit, condition=condition)


def loads(text: str) -> Circuit:
    """Parse the output of :meth:`Circuit.dumps`."""
    qubits = cbits = None
    tags: dict[int, str] = {}
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key == "qubits":
            qubits = int(rest)
        elif key == "cbits":
            cbits = int(rest)
        elif key == "init":
            q, tag = rest.split()
            tags[int(q.lstrip("q"))] = tag
        else:
            gates.append(_parse_gate(line, lineno))
    if qubits is None:
        raise CircuitError("missing 'qubits N' header")
    init = tuple(tags.get(q, "data") for q in range(qubits))
    return Circuit(qubits, cbits or 0, tuple(gates), init)
