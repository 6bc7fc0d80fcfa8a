"""Random-circuit benchmarks comparing the two synthesizers.

Each trial draws its circuit from ``default_rng([seed, trial_index])``, so
any trial can be replayed on its own and trials may run in any order or in
parallel. Per-trial sizes are summed as exact integers; means and the area
reduction ratio are derived from those sums at the end.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .bounded import synth_bounded
from .circuit import Circuit, CnotGate
from .extract import ExtractionError, extract
from .field import Field, validate
from .gf2 import equivalent
from .unbounded import synth_unbounded

# Published averages over 100 random circuits, keyed by (qubits, gates, max_targets):
# unbounded rows, cols, area; bounded cols, area; area reduction ratio.
REFERENCE_TABLE: dict[tuple[int, int, int], tuple[float, ...]] = {
    (10, 10, 2): (18, 13, 2.7e2, 17, 1.9e2, 1.42),
    (10, 10, 5): (33, 19, 6.2e2, 18, 2.1e2, 2.95),
    (10, 10, 9): (57, 30, 1.7e3, 19, 2.2e2, 7.73),
    (10, 100, 2): (222, 160, 3.6e4, 159, 1.9e3, 18.9),
    (10, 100, 5): (381, 238, 9.0e4, 171, 2.1e3, 42.9),
    (10, 100, 9): (589, 341, 2.0e5, 179, 2.2e3, 90.9),
    (10, 1000, 2): (2292, 1645, 3.8e6, 1587, 1.9e4, 200),
    (10, 1000, 5): (3832, 2413, 9.3e6, 1710, 2.1e4, 443),
    (10, 1000, 9): (5887, 3440, 2.0e7, 1786, 2.1e4, 952),
    (10, 10000, 2): (22780, 16389, 3.7e8, 15832, 1.9e5, 1.95e3),
    (10, 10000, 5): (38512, 24254, 9.3e8, 17102, 2.1e5, 4.43e3),
    (10, 10000, 9): (59140, 34567, 2.0e9, 17855, 2.1e5, 9.52e3),
    (100, 10, 20): (88, 20, 1.8e3, 20, 2.0e3, 0.9),
    (100, 10, 50): (234, 77, 1.8e4, 20, 2.1e3, 8.57),
    (100, 10, 99): (473, 194, 9.2e4, 20, 2.1e3, 43.8),
    (100, 100, 20): (1104, 561, 6.2e5, 188, 2.0e4, 31.0),
    (100, 100, 50): (2559, 1284, 3.3e6, 194, 2.0e4, 165),
    (100, 100, 99): (5067, 2535, 1.3e7, 196, 2.0e4, 650),
    (100, 1000, 20): (11391, 6154, 7.0e7, 1868, 1.9e5, 368),
    (100, 1000, 50): (26425, 13666, 3.6e8, 1930, 1.9e5, 1.89e3),
    (100, 1000, 99): (50928, 25916, 1.3e9, 1959, 2.0e5, 6.50e3),
    (100, 10000, 20): (114003, 61960, 7.1e9, 18676, 1.9e6, 3.74e3),
    (100, 10000, 50): (264204, 137056, 3.6e10, 19294, 2.0e6, 1.80e4),
    (100, 10000, 99): (509695, 259799, 1.3e11, 19577, 2.0e6, 6.50e4),
    (1000, 10, 200): (806, 88, 7.1e4, 21, 2.1e4, 3.38),
    (1000, 10, 500): (2183, 629, 1.4e6, 21, 2.1e4, 66.7),
    (1000, 10, 999): (4541, 1778, 8.1e6, 21, 2.1e4, 386),
    (1000, 100, 200): (9781, 4450, 4.4e7, 198, 2.0e5, 220),
    (1000, 100, 500): (24787, 11947, 3.0e8, 200, 2.0e5, 1.50e3),
    (1000, 100, 999): (50039, 24572, 1.2e9, 200, 2.0e5, 6.00e3),
    (1000, 1000, 200): (100963, 50491, 5.1e9, 1976, 2.0e6, 2.55e3),
    (1000, 1000, 500): (249909, 124959, 3.1e10, 1990, 2.0e6, 1.55e4),
    (1000, 1000, 999): (499209, 249607, 1.3e11, 1994, 2.0e6, 6.50e4),
    (1000, 10000, 200): (1015910, 512465, 5.2e11, 19756, 2.0e7, 2.60e4),
    (1000, 10000, 500): (2514665, 1261836, 3.2e12, 19886, 2.0e7, 1.60e5),
    (1000, 10000, 999): (5001083, 2505044, 1.3e13, 19936, 2.0e7, 6.50e5),
}

DESK_GRID = [(10, g, mt) for g in (10, 100, 1000) for mt in (2, 5, 9)]


class BenchError(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchParams:
    qubits: int
    gates: int
    max_targets: int
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.qubits < 2:
            raise ValueError("a benchmark needs at least 2 qubits")
        if self.gates < 0:
            raise ValueError("gate count must be non-negative")
        if not 1 <= self.max_targets <= self.qubits - 1:
            raise ValueError(f"max targets must be in 1..{self.qubits - 1}")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a non-negative 64-bit integer")


def random_circuit(p: BenchParams, trial_index: int) -> Circuit:
    rng = np.random.default_rng([p.seed, trial_index])
    everyone = np.arange(p.qubits)
    gates = []
    for _ in range(p.gates):
        control = int(rng.integers(p.qubits))
        k = int(rng.integers(1, p.max_targets + 1))
        targets = rng.choice(np.delete(everyone, control), size=k, replace=False)
        gates.append(CnotGate(control, tuple(int(t) for t in targets)))
    return Circuit(p.qubits, tuple(gates))


def worst_case_areas(qubits: int, gates: int) -> tuple[int, int]:
    """Worst-case field areas of the unbounded and bounded synthesizers."""
    if qubits < 2 or gates < 0:
        raise ValueError("need qubits >= 2 and gates >= 0")
    return gates * gates * (qubits - 1) * qubits, 3 * (qubits + 2) * gates


@dataclass(frozen=True)
class TrialResult:
    trial: int
    unbounded_rows: int
    unbounded_cols: int
    bounded_rows: int
    bounded_cols: int

    @property
    def unbounded_area(self) -> int:
        return self.unbounded_rows * self.unbounded_cols

    @property
    def bounded_area(self) -> int:
        return self.bounded_rows * self.bounded_cols


def check_field(field: Field, circuit: Circuit) -> str | None:
    """Why ``field`` does not implement ``circuit``, or None if it does."""
    problems = validate(field)
    if problems:
        return f"invalid field: {problems[0]}"
    try:
        got = extract(field, circuit.qubit_count)
    except ExtractionError as exc:
        return f"extraction failed: {exc}"
    if not equivalent(got, circuit):
        return "extracted circuit is not equivalent"
    return None


def run_trial(p: BenchParams, trial_index: int, heuristic: bool = True) -> TrialResult:
    circuit = random_circuit(p, trial_index)
    fields = {"unbounded": synth_unbounded(circuit), "bounded": synth_bounded(circuit, heuristic)}
    for name, field in fields.items():
        problem = check_field(field, circuit)
        if problem:
            raise BenchError(
                f"{name} synthesis failed verification (seed={p.seed}, trial={trial_index}, "
                f"qubits={p.qubits}, gates={p.gates}, max_targets={p.max_targets}): {problem}"
            )
    u, b = fields["unbounded"], fields["bounded"]
    return TrialResult(trial_index, u.rows, u.cols, b.rows, b.cols)


def _run_chunk(args) -> list[TrialResult]:
    p, indices, heuristic = args
    return [run_trial(p, i, heuristic) for i in indices]


@dataclass(frozen=True)
class BenchReport:
    params: BenchParams
    unbounded_rows: int  # sums over all trials
    unbounded_cols: int
    unbounded_area: int
    bounded_rows: int
    bounded_cols: int
    bounded_area: int

    @classmethod
    def from_trials(cls, p: BenchParams, results: Iterable[TrialResult]) -> "BenchReport":
        results = list(results)
        return cls(
            p,
            sum(r.unbounded_rows for r in results),
            sum(r.unbounded_cols for r in results),
            sum(r.unbounded_area for r in results),
            sum(r.bounded_rows for r in results),
            sum(r.bounded_cols for r in results),
            sum(r.bounded_area for r in results),
        )

    def mean(self, name: str) -> float:
        return getattr(self, name) / self.params.trials

    @property
    def red(self) -> float:
        return self.unbounded_area / self.bounded_area

    def reference(self) -> tuple[float, ...] | None:
        p = self.params
        return REFERENCE_TABLE.get((p.qubits, p.gates, p.max_targets))

    def to_record(self) -> dict:
        record = {"params": asdict(self.params), "sums": {}, "means": {}}
        for name in ("unbounded_rows", "unbounded_cols", "unbounded_area",
                     "bounded_rows", "bounded_cols", "bounded_area"):
            record["sums"][name] = getattr(self, name)
            record["means"][name] = self.mean(name)
        record["red"] = self.red
        return record


def run_bench(p: BenchParams, workers: int = 1, heuristic: bool = True) -> BenchReport:
    """Run, verify and aggregate every trial; raises BenchError on the first failure."""
    indices = list(range(p.trials))
    if workers <= 1:
        results = _run_chunk((p, indices, heuristic))
    else:
        chunks = [(p, indices[k::workers], heuristic) for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for chunk in pool.map(_run_chunk, chunks) for r in chunk]
    results.sort(key=lambda r: r.trial)
    return BenchReport.from_trials(p, results)


_HEADER = ("|Q|", "|G|", "MT", "U.Rows", "U.Cols", "U.Area", "B.Cols", "B.Area", "Red")


def _row(report: BenchReport) -> tuple[str, ...]:
    p = report.params
    return (
        str(p.qubits), str(p.gates), str(p.max_targets),
        f"{report.mean('unbounded_rows'):.1f}",
        f"{report.mean('unbounded_cols'):.1f}",
        f"{report.mean('unbounded_area'):.2e}",
        f"{report.mean('bounded_cols'):.1f}",
        f"{report.mean('bounded_area'):.2e}",
        f"{report.red:.2e}",
    )


def format_table(reports: Sequence[BenchReport]) -> str:
    """Aligned plain-text table, one line per parameter combination."""
    rows = [_HEADER] + [_row(r) for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(_HEADER))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def format_json(reports: Sequence[BenchReport]) -> str:
    return json.dumps([r.to_record() for r in reports], indent=2, sort_keys=True) + "\n"
