"""Experiment matrix runner: shuffle, sort, measure, aggregate, persist.

Every run is fully determined by the experiment's base seed: the shuffle
and noise seeds are derived from a stable hash of (base_seed, length,
noise, run, role), so reruns produce byte-identical curve files and all
algorithms within one cell start from the same shuffled lists and see the
same noise stream where their call counts align.
"""

from __future__ import annotations

import hashlib
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import Algorithm, baseline_steps, new_session
from .metrics import ConvergenceCurve, pad_and_aggregate
from .noise import GENERATOR_NAME, NoisyComparator

__all__ = [
    "ExperimentConfig",
    "MatrixResult",
    "derive_seed",
    "shuffled_values",
    "run_single",
    "run_cell",
    "run_matrix",
    "curve_filename",
    "write_curve_csv",
]

DEFAULT_LENGTHS = (8, 16, 32, 64, 128, 256, 512)
DEFAULT_NOISE_LEVELS = (0.0, 0.1)
DEFAULT_ALGORITHMS = (
    Algorithm.BUBBLE,
    Algorithm.MERGE,
    Algorithm.QUICK,
    Algorithm.ELOSORT_PARTNER,
    Algorithm.TSSORT_DRAW,
    Algorithm.TSSORT_WOVER,
    Algorithm.TSSORT_PARTNER_WOVER,
)

MANIFEST_NAME = "manifest.txt"
MANIFEST_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    lengths: tuple[int, ...] = DEFAULT_LENGTHS
    noise_levels: tuple[float, ...] = DEFAULT_NOISE_LEVELS
    algorithms: tuple[Algorithm, ...] = DEFAULT_ALGORITHMS
    base_seed: int = 0
    runs_override: int | None = None
    budget_multiplier: float = 1.0

    def __post_init__(self) -> None:
        if not self.lengths or any(n < 2 for n in self.lengths):
            raise ValueError("lengths must all be >= 2")
        if not self.noise_levels or any(not 0.0 <= p <= 1.0 for p in self.noise_levels):
            raise ValueError("noise levels must be in [0, 1]")
        if not self.algorithms:
            raise ValueError("need at least one algorithm")
        if self.runs_override is not None and self.runs_override < 1:
            raise ValueError("runs must be >= 1")
        if self.budget_multiplier <= 0:
            raise ValueError("budget multiplier must be > 0")

    def runs_for(self, n: int) -> int:
        """Paper protocol: 128 repetitions up to length 64, 64 beyond."""
        if self.runs_override is not None:
            return self.runs_override
        return 128 if n <= 64 else 64

    def cells(self) -> list[tuple[int, float, Algorithm]]:
        return [
            (n, p, a)
            for n in self.lengths
            for p in self.noise_levels
            for a in self.algorithms
        ]


def derive_seed(base_seed: int, n: int, noise: float, run: int, role: str) -> int:
    """Stable 64-bit seed from the run coordinates; identical across processes."""
    key = f"{base_seed}|{n}|{round(noise * 1000)}|{run}|{role}"
    digest = hashlib.sha256(key.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def shuffled_values(n: int, seed: int) -> list[int]:
    values = list(range(n))
    random.Random(seed).shuffle(values)
    return values


def _session_series(
    shuffled: list[int], noise: float, noise_seed: int, algorithm: Algorithm, multiplier: float
) -> list[float]:
    n = len(shuffled)
    comparator = NoisyComparator(shuffled, noise, noise_seed)
    session = new_session(n, algorithm, budget_multiplier=multiplier)
    values = np.asarray(shuffled, dtype=np.int64)
    positions = np.arange(n)
    series: list[float] = []
    while not session.is_finished():
        pair = session.next_pair()
        outcome = comparator.compare(pair.first_index, pair.second_index)
        session.apply_outcome(pair, outcome)
        ascending = np.lexsort((positions, session._ranking_key()))
        diff = values[ascending] - positions
        series.append(float(diff @ diff) / n)
    return series


def _baseline_series(
    shuffled: list[int], noise: float, noise_seed: int, algorithm: Algorithm
) -> list[float]:
    n = len(shuffled)
    comparator = NoisyComparator(list(range(n)), noise, noise_seed)
    values = list(shuffled)
    positions = np.arange(n)
    sq_err = sum((v - k) * (v - k) for k, v in enumerate(values))
    series: list[float] = []
    for _pair, _outcome, arrangement, changed in baseline_steps(
        algorithm, values, comparator.less
    ):
        if changed is None:
            diff = np.asarray(arrangement) - positions
            sq_err = int(diff @ diff)
        else:
            for i, j in changed:
                vi, vj = values[i], values[j]
                sq_err += (vi - i) * (vi - i) + (vj - j) * (vj - j)
                sq_err -= (vi - j) * (vi - j) + (vj - i) * (vj - i)
        series.append(sq_err / n)
    # late rearrangements (e.g. quicksort's final pivot swap) land after the
    # last comparison; the last sample reports the finished output
    final = np.asarray(values) - positions
    series[-1] = float(final @ final) / n
    return series


def run_single(
    config: ExperimentConfig, n: int, noise: float, algorithm: Algorithm, run: int
) -> list[float]:
    """MSE after every comparison of one sorting run."""
    shuffle_seed = derive_seed(config.base_seed, n, noise, run, "shuffle")
    noise_seed = derive_seed(config.base_seed, n, noise, run, "noise")
    shuffled = shuffled_values(n, shuffle_seed)
    if algorithm.is_probabilistic:
        return _session_series(shuffled, noise, noise_seed, algorithm, config.budget_multiplier)
    return _baseline_series(shuffled, noise, noise_seed, algorithm)


def run_cell(
    config: ExperimentConfig, n: int, noise: float, algorithm: Algorithm
) -> ConvergenceCurve:
    """All runs of one (length, noise, algorithm) cell, aggregated."""
    runs = config.runs_for(n)
    series = [run_single(config, n, noise, algorithm, r) for r in range(runs)]
    return pad_and_aggregate(
        series, algorithm_label=algorithm.name, list_length=n, noise_level=noise
    )


def shuffle_digest(config: ExperimentConfig, n: int, noise: float) -> str:
    """Digest of all initial shuffles of a cell; algorithm-independent."""
    h = hashlib.sha256()
    for r in range(config.runs_for(n)):
        seed = derive_seed(config.base_seed, n, noise, r, "shuffle")
        h.update(",".join(map(str, shuffled_values(n, seed))).encode("ascii"))
        h.update(b";")
    return h.hexdigest()


def curve_filename(algorithm: Algorithm, n: int, noise: float) -> str:
    return f"curve_{algorithm.name}_n{n:03d}_p{round(noise * 100):03d}.csv"


def write_curve_csv(curve: ConvergenceCurve, path: Path) -> None:
    lines = ["algorithm,n,noise,step,mean_mse,std_mse,runs"]
    for s in curve.per_step:
        lines.append(
            f"{curve.algorithm_label},{curve.list_length},{curve.noise_level:.12g},"
            f"{s.step_index},{s.mean_mse:.12g},{s.std_mse:.12g},{s.run_count}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


@dataclass
class MatrixResult:
    out_dir: Path
    manifest_path: Path
    completed: dict[tuple[int, float, Algorithm], Path] = field(default_factory=dict)
    failed: dict[tuple[int, float, Algorithm], str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failed


def _cell_task(args: tuple) -> tuple[tuple[int, float, Algorithm], ConvergenceCurve]:
    config, n, noise, algorithm = args
    return (n, noise, algorithm), run_cell(config, n, noise, algorithm)


def run_matrix(
    config: ExperimentConfig, out_dir: str | Path, workers: int = 1
) -> MatrixResult:
    """Run every cell of the matrix and persist curves plus a manifest.

    Curve CSVs are written as soon as their cell finishes, so partial
    output survives interruption; the manifest records per-cell status.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = MatrixResult(out_dir=out, manifest_path=out / MANIFEST_NAME)
    cells = config.cells()
    started = time.time()
    checksums: dict[tuple[int, float, Algorithm], str] = {}

    def record(key: tuple, curve: ConvergenceCurve) -> None:
        path = out / curve_filename(key[2], key[0], key[1])
        write_curve_csv(curve, path)
        checksums[key] = hashlib.sha256(path.read_bytes()).hexdigest()
        result.completed[key] = path

    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {
                    pool.submit(_cell_task, (config, n, p, a)): (n, p, a)
                    for (n, p, a) in cells
                }
                for future, key in futures.items():
                    try:
                        record(*future.result())
                    except Exception as exc:  # keep the rest of the matrix running
                        result.failed[key] = f"{type(exc).__name__}: {exc}"
        else:
            for n, p, a in cells:
                try:
                    record(*_cell_task((config, n, p, a)))
                except Exception as exc:
                    result.failed[(n, p, a)] = f"{type(exc).__name__}: {exc}"
    finally:
        _write_manifest(config, result, cells, checksums, started)
    return result


def _write_manifest(
    config: ExperimentConfig,
    result: MatrixResult,
    cells: list[tuple[int, float, Algorithm]],
    checksums: dict,
    started: float,
) -> None:
    lines = [
        f"schema_version = {MANIFEST_SCHEMA_VERSION}",
        f"generator = {GENERATOR_NAME}",
        f"base_seed = {config.base_seed}",
        "lengths = " + ",".join(map(str, config.lengths)),
        "noise_levels = " + ",".join(f"{p:.12g}" for p in config.noise_levels),
        "algorithms = " + ",".join(a.name for a in config.algorithms),
        f"runs_override = {config.runs_override if config.runs_override is not None else 'none'}",
        f"budget_multiplier = {config.budget_multiplier:.12g}",
        "mse_normalization = mean",
        f"started_at_unix = {started:.3f}",
        f"wall_clock_seconds = {time.time() - started:.3f}",
        f"status = {'complete' if len(result.completed) == len(cells) else 'partial'}",
    ]
    seen_shuffles = set()
    for n, p, _ in cells:
        if (n, p) not in seen_shuffles:
            seen_shuffles.add((n, p))
            lines.append(
                f"shuffle.n{n:03d}.p{round(p * 100):03d}.runs{config.runs_for(n)} = "
                + shuffle_digest(config, n, p)
            )
    for key in cells:
        n, p, a = key
        prefix = f"cell.{a.name}.n{n:03d}.p{round(p * 100):03d}"
        if key in result.completed:
            lines.append(f"{prefix}.status = ok")
            lines.append(f"{prefix}.file = {result.completed[key].name}")
            lines.append(f"{prefix}.sha256 = {checksums[key]}")
        elif key in result.failed:
            lines.append(f"{prefix}.status = failed")
            lines.append(f"{prefix}.error = {result.failed[key]}")
        else:
            lines.append(f"{prefix}.status = incomplete")
    result.manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
