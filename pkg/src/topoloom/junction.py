"""Dense state-vector checks of the teleportation and junction identities.

States are kept as ``2**n`` complex amplitudes with qubit 0 as the most
significant bit, so reshaping to ``(2,) * n`` puts qubit ``q`` on axis ``q``.
Measurements can be forced to a given outcome, which lets every branch of a
circuit be checked deterministically. The Pauli fix-ups applied after a
measurement are not hard-coded: they are found by trying every product of
``I``, ``X``, ``Z`` and ``XZ`` on the surviving qubits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_QUBITS = 5
TOLERANCE = 1e-12

_SQRT_HALF = 1 / np.sqrt(2)
PAULIS: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "XZ": np.array([[0, -1], [1, 0]], dtype=complex),  # X @ Z
}
# eigenvectors for outcome +1 / -1 in each basis
_EIGEN = {
    "Z": {+1: np.array([1, 0], dtype=complex), -1: np.array([0, 1], dtype=complex)},
    "X": {+1: np.array([1, 1], dtype=complex) * _SQRT_HALF,
          -1: np.array([1, -1], dtype=complex) * _SQRT_HALF},
}


class JunctionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise JunctionError(f"qubit count must be 1..{MAX_QUBITS}, got {self.n}")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (2 ** self.n,):
            raise JunctionError(f"expected {2 ** self.n} amplitudes, got {amps.size}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > TOLERANCE * 1e3:
            raise JunctionError(f"state is not normalized (norm² = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state, e.g. ``basis("10")`` is |10⟩."""
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1
        return cls(len(bits), amps)

    @classmethod
    def normalized(cls, amps) -> "StateVector":
        amps = np.asarray(amps, dtype=complex)
        return cls(int(np.log2(amps.size)), amps / np.linalg.norm(amps))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "StateVector":
        return cls.normalized(rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n))

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n)

    def kron(self, other: "StateVector") -> "StateVector":
        return StateVector(self.n + other.n, np.kron(self.amps, other.amps))

    def fidelity(self, other: "StateVector") -> float:
        if self.n != other.n:
            raise JunctionError("fidelity needs states of equal size")
        return float(abs(np.vdot(self.amps, other.amps)) ** 2)

    def allclose(self, other: "StateVector", tol: float = TOLERANCE) -> bool:
        return self.n == other.n and bool(np.allclose(self.amps, other.amps, atol=tol, rtol=0))

    def __repr__(self) -> str:
        return f"StateVector(n={self.n}, amps={np.round(self.amps, 6).tolist()})"


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: int
    basis: str
    outcome: int
    post_state: StateVector


def _check_qubit(s: StateVector, q: int) -> None:
    if not 0 <= q < s.n:
        raise JunctionError(f"qubit {q} out of range for {s.n}-qubit state")


def _from_tensor(t: np.ndarray) -> StateVector:
    return StateVector(t.ndim, t.reshape(-1))


def apply_single(s: StateVector, q: int, gate: np.ndarray) -> StateVector:
    _check_qubit(s, q)
    t = np.moveaxis(np.tensordot(gate, s.tensor(), axes=([1], [q])), 0, q)
    return _from_tensor(t)


def apply_cnot(s: StateVector, control: int, target: int) -> StateVector:
    _check_qubit(s, control)
    _check_qubit(s, target)
    if control == target:
        raise JunctionError("control and target must differ")
    t = s.tensor().copy()
    sel = [slice(None)] * s.n
    sel[control] = 1
    sub = t[tuple(sel)]
    axis = target if target < control else target - 1
    t[tuple(sel)] = np.flip(sub, axis=axis)
    return _from_tensor(t)


def measure(
    s: StateVector,
    q: int,
    basis: str,
    forced: int | None = None,
    rng: np.random.Generator | None = None,
) -> MeasurementRecord:
    """Measure qubit ``q`` in the X or Z basis.

    With ``forced`` the state is projected onto that outcome; otherwise the
    outcome is drawn from the Born probabilities using ``rng``.
    """
    _check_qubit(s, q)
    if basis not in _EIGEN:
        raise JunctionError(f"basis must be X or Z, got {basis!r}")
    t = s.tensor()
    projected = {}
    for outcome, vec in _EIGEN[basis].items():
        # component along the eigenvector, then put the eigenvector back
        comp = np.tensordot(vec.conj(), t, axes=([0], [q]))
        projected[outcome] = np.moveaxis(np.multiply.outer(vec, comp), 0, q)
    probs = {k: float(np.vdot(p, p).real) for k, p in projected.items()}
    if forced is None:
        rng = rng if rng is not None else np.random.default_rng()
        forced = +1 if rng.random() < probs[+1] else -1
    if forced not in (+1, -1):
        raise JunctionError(f"outcome must be +1 or -1, got {forced}")
    if probs[forced] < TOLERANCE:
        raise JunctionError(f"outcome {forced:+d} has zero probability")
    post = projected[forced] / np.sqrt(probs[forced])
    return MeasurementRecord(q, basis, forced, _from_tensor(post))


def discard(record: MeasurementRecord) -> StateVector:
    """Drop the measured qubit, which is left in a known eigenstate."""
    vec = _EIGEN[record.basis][record.outcome]
    rest = np.tensordot(vec.conj(), record.post_state.tensor(), axes=([0], [record.qubit]))
    return _from_tensor(rest)


def apply_paulis(s: StateVector, labels: tuple[str, ...]) -> StateVector:
    for q, label in enumerate(labels):
        if label != "I":
            s = apply_single(s, q, PAULIS[label])
    return s


# -- circuits --------------------------------------------------------------

TELEPORT_VARIANTS = ("x-teleport", "z-teleport")
_PLUS = StateVector.normalized([1, 1])
_ZERO = StateVector.basis("0")


def teleport_branch(variant: str, state: StateVector, outcome: int) -> StateVector:
    """Surviving upper qubit of a teleportation circuit for one outcome.

    ``x-teleport``: upper |0⟩, CNOT from the input onto it, input measured in X.
    ``z-teleport``: upper |+⟩, CNOT from it onto the input, input measured in Z.
    Qubit 0 is the upper wire and qubit 1 carries the input.
    """
    if state.n != 1:
        raise JunctionError("teleportation input must be a single qubit")
    if variant == "x-teleport":
        s = apply_cnot(_ZERO.kron(state), 1, 0)
        rec = measure(s, 1, "X", forced=outcome)
    elif variant == "z-teleport":
        s = apply_cnot(_PLUS.kron(state), 0, 1)
        rec = measure(s, 1, "Z", forced=outcome)
    else:
        raise JunctionError(f"unknown teleportation variant {variant!r}")
    return discard(rec)


def junction_branch(state: StateVector, outcome: int) -> StateVector:
    """Control, |0⟩ ancilla and target: CNOT c→a, CNOT a→t, X-measure a."""
    if state.n != 2:
        raise JunctionError("junction input must be a two-qubit state")
    s = StateVector(3, np.einsum("ct,a->cat", state.tensor(), _ZERO.amps).reshape(-1))
    s = apply_cnot(s, 0, 1)
    s = apply_cnot(s, 1, 2)
    return discard(measure(s, 1, "X", forced=outcome))


CorrectionTable = dict  # outcome (+1/-1) -> tuple of Pauli labels, one per qubit


def find_correction(
    pairs: list[tuple[StateVector, StateVector]], tol: float = TOLERANCE
) -> tuple[str, ...] | None:
    """Pauli product turning every ``got`` into its ``want``, up to global phase.

    Candidates are tried in a fixed order (fewest non-identity factors
    first), so the answer is deterministic.
    """
    n = pairs[0][0].n
    candidates = sorted(
        itertools.product(PAULIS, repeat=n),
        key=lambda labels: (sum(p != "I" for p in labels), labels),
    )
    for labels in candidates:
        if all(abs(apply_paulis(got, labels).fidelity(want) - 1) <= tol for got, want in pairs):
            return labels
    return None


def _probe_states(n: int, count: int = 4, seed: int = 20240) -> list[StateVector]:
    rng = np.random.default_rng(seed)
    return [StateVector.random(n, rng) for _ in range(count)]


@lru_cache(maxsize=None)
def teleport_corrections(variant: str) -> CorrectionTable:
    table = {}
    probes = _probe_states(1)
    for outcome in (+1, -1):
        labels = find_correction([(teleport_branch(variant, p, outcome), p) for p in probes])
        if labels is None:
            raise JunctionError(f"no Pauli correction for {variant} outcome {outcome:+d}")
        table[outcome] = labels
    return table


@lru_cache(maxsize=None)
def junction_corrections() -> CorrectionTable:
    table = {}
    probes = _probe_states(2)
    for outcome in (+1, -1):
        pairs = [(junction_branch(p, outcome), apply_cnot(p, 0, 1)) for p in probes]
        labels = find_correction(pairs)
        if labels is None:
            raise JunctionError(f"no Pauli correction for junction outcome {outcome:+d}")
        table[outcome] = labels
    return table


def check_teleport(variant: str, state: StateVector, tol: float = TOLERANCE) -> bool:
    table = teleport_corrections(variant)
    return all(
        abs(apply_paulis(teleport_branch(variant, state, k), table[k]).fidelity(state) - 1) <= tol
        for k in (+1, -1)
    )


def check_junction_cnot(state: StateVector, tol: float = TOLERANCE) -> bool:
    table = junction_corrections()
    want = apply_cnot(state, 0, 1)
    return all(
        abs(apply_paulis(junction_branch(state, k), table[k]).fidelity(want) - 1) <= tol
        for k in (+1, -1)
    )


@dataclass(frozen=True)
class SuiteResult:
    name: str
    corrections: CorrectionTable
    checked: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def format_correction(table: CorrectionTable) -> str:
    def word(labels):
        parts = [f"{p}[{q}]" for q, p in enumerate(labels) if p != "I"]
        return " ".join(parts) if parts else "I"
    return ", ".join(f"{k:+d} -> {word(table[k])}" for k in (+1, -1))


def run_suite(random_states: int = 100, seed: int = 0) -> list[SuiteResult]:
    """Every identity on the basis states plus ``random_states`` random inputs."""
    rng = np.random.default_rng(seed)
    one = [StateVector.basis(b) for b in "01"] + [_PLUS, StateVector.normalized([1, 1j])]
    one += [StateVector.random(1, rng) for _ in range(random_states)]
    two = [StateVector.basis(b) for b in ("00", "01", "10", "11")]
    two += [StateVector.random(2, rng) for _ in range(random_states)]
    results = []
    for variant in TELEPORT_VARIANTS:
        fails = sum(not check_teleport(variant, s) for s in one)
        results.append(SuiteResult(variant, teleport_corrections(variant), len(one), fails))
    fails = sum(not check_junction_cnot(s) for s in two)
    results.append(SuiteResult("junction-cnot", junction_corrections(), len(two), fails))
    return results
