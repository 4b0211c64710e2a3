"""Seeded multi-trial training runs, learning curves and CSV artifacts.

Trial ``i`` of an experiment is seeded with ``base_seed + i``. Each trial
owns its student table and RNG stream; the teacher is shared read-only.
Trials run on a thread pool (the compiled loop releases the GIL) and are
aggregated in seed order, so the result does not depend on ``jobs``.

Curve metric: steps-to-capture per episode (``step_cap`` for truncated
episodes). Episode ranges are half-open ``(start, end)`` pairs of 0-based
episode indices.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .advisor import Schedule, Teacher, punishment, shaped_reward, train_teacher
from .gridworld import GridConfig, reset, step
from .qlearn import LearningParams, QTable, select_action, update
from .rng import Rng

TRAIN_FRESH = "train-fresh"
# Offset between an experiment's base seed and the seed of a freshly
# trained teacher, keeping the teacher's stream apart from trial 0's.
TEACHER_SEED_OFFSET = 1_000_000


class ExperimentIOError(OSError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    params: LearningParams = field(default_factory=LearningParams)
    schedule: Schedule = field(default_factory=Schedule)
    episodes: int = 20_000
    step_cap: int = 10_000
    trials: int = 10
    base_seed: int = 0
    smoothing_window: int = 500
    teacher_source: str = TRAIN_FRESH
    teacher_episodes: int = 20_000

    def __post_init__(self):
        for name in ("episodes", "trials", "step_cap", "smoothing_window", "teacher_episodes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    @property
    def teacher_seed(self) -> int:
        return self.base_seed + TEACHER_SEED_OFFSET


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    steps: int
    env_return: float
    shaped_return: float
    truncated: bool


@dataclass
class TrialArrays:
    steps: np.ndarray
    env_return: np.ndarray
    shaped_return: np.ndarray
    truncated: np.ndarray

    def records(self) -> List[EpisodeRecord]:
        return [
            EpisodeRecord(i, int(n), float(e), float(s), bool(t))
            for i, (n, e, s, t) in enumerate(
                zip(self.steps, self.env_return, self.shaped_return, self.truncated)
            )
        ]


@dataclass
class LearningCurve:
    mean_steps: np.ndarray
    std_steps: np.ndarray
    smoothed: Optional[np.ndarray] = None
    per_trial: Optional[np.ndarray] = None  # (trials, episodes) steps
    truncated: Optional[np.ndarray] = None  # (trials, episodes) flags

    def __len__(self) -> int:
        return len(self.mean_steps)


# ---------------------------------------------------------------------------
# single trials


def train_table(
    grid: GridConfig,
    params: LearningParams,
    schedule: Schedule,
    teacher: Optional[Teacher],
    episodes: int,
    step_cap: int,
    seed: int,
    q: Optional[QTable] = None,
) -> Tuple[QTable, TrialArrays]:
    """Train a (fresh or given) table in the compiled loop."""
    if schedule.needs_teacher:
        if teacher is None:
            raise ValueError(f"schedule {schedule.kind.value!r} needs a teacher")
        teacher.check_grid(grid)
        teacher_values = teacher.q.values
    else:
        teacher_values = np.zeros((1, 4))
    q = q if q is not None else QTable(grid)
    out = TrialArrays(
        np.zeros(episodes, dtype=np.int64),
        np.zeros(episodes),
        np.zeros(episodes),
        np.zeros(episodes, dtype=np.bool_),
    )
    _kernels.run_episodes(
        q.values, teacher_values, schedule.kind.code, float(schedule.c), float(schedule.b),
        grid.width, grid.height, float(params.alpha), float(params.gamma), float(params.epsilon),
        episodes, step_cap, Rng(seed).state,
        out.steps, out.env_return, out.shaped_return, out.truncated,
    )
    return q, out


def _trial_arrays(config: ExperimentConfig, teacher: Optional[Teacher], seed: int) -> TrialArrays:
    _, out = train_table(
        config.grid, config.params, config.schedule, teacher,
        config.episodes, config.step_cap, seed,
    )
    return out


def run_trial(config: ExperimentConfig, teacher: Optional[Teacher], seed: int) -> List[EpisodeRecord]:
    return _trial_arrays(config, teacher, seed).records()


def run_trial_reference(
    config: ExperimentConfig, teacher: Optional[Teacher], seed: int
) -> List[EpisodeRecord]:
    """The episode loop spelled out with the public per-step operations.

    Orders of magnitude slower than :func:`run_trial` and bit-identical to
    it; kept as the readable definition of a trial.
    """
    schedule = config.schedule
    if schedule.needs_teacher:
        if teacher is None:
            raise ValueError(f"schedule {schedule.kind.value!r} needs a teacher")
        teacher.check_grid(config.grid)
    rng = Rng(seed)
    q = QTable(config.grid)
    records = []
    for ep in range(config.episodes):
        s = reset(config.grid, rng)
        env_ret = shaped_ret = 0.0
        n = 0
        terminal = False
        while n < config.step_cap:
            a = select_action(q, s, config.params.epsilon, rng)
            out = step(s, a, config.grid, rng)
            n += 1
            pun = punishment(teacher, schedule, s, a) if schedule.needs_teacher else 0.0
            r_hat = shaped_reward(out.reward, pun)
            env_ret += out.reward
            shaped_ret += r_hat
            update(q, s, a, r_hat, out.next_state, out.terminal, config.params)
            s = out.next_state
            terminal = out.terminal
            if terminal:
                break
        records.append(EpisodeRecord(ep, n, env_ret, shaped_ret, not terminal))
    return records


# ---------------------------------------------------------------------------
# aggregation


def smooth_series(values, window: int) -> np.ndarray:
    """Trailing moving average; the first window-1 points average the prefix."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    x = np.asarray(values, dtype=np.float64)
    if window == 1 or x.size == 0:
        return x.copy()
    out = np.empty_like(x)
    head = min(window - 1, x.size)
    out[:head] = np.cumsum(x[:head]) / np.arange(1, head + 1)
    if x.size >= window:
        out[window - 1:] = np.lib.stride_tricks.sliding_window_view(x, window).mean(axis=1)
    return out


def smooth(curve: LearningCurve, window: int) -> LearningCurve:
    return replace(curve, smoothed=smooth_series(curve.mean_steps, window))


def aggregate(per_trial_steps: Sequence[Sequence[float]], window: Optional[int] = None) -> LearningCurve:
    """Per-episode mean/std (population) across trials.

    Values are sorted per episode before reduction so the result is exactly
    independent of trial order.
    """
    steps = np.asarray(per_trial_steps, dtype=np.float64)
    if steps.ndim != 2 or steps.shape[0] < 1:
        raise ValueError("expected a (trials, episodes) array")
    ordered = np.sort(steps, axis=0)
    curve = LearningCurve(ordered.mean(axis=0), ordered.std(axis=0), per_trial=steps)
    return smooth(curve, window) if window else curve


# ---------------------------------------------------------------------------
# CSV artifacts


def _write_rows(path: Path, header: Sequence[str], rows) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise ExperimentIOError(f"could not write {path}: {exc.strerror or exc}") from exc


def write_trial_csv(path, records: Sequence[EpisodeRecord]) -> None:
    _write_rows(
        Path(path),
        ("episode", "steps", "env_return", "shaped_return", "truncated"),
        ((r.episode, r.steps, repr(r.env_return), repr(r.shaped_return), int(r.truncated)) for r in records),
    )


def write_curve_csv(path, curve: LearningCurve) -> None:
    smoothed = curve.smoothed if curve.smoothed is not None else curve.mean_steps
    _write_rows(
        Path(path),
        ("episode", "mean_steps", "std_steps", "smoothed_mean_steps"),
        (
            (i, repr(m), repr(s), repr(sm))
            for i, (m, s, sm) in enumerate(
                zip(curve.mean_steps.tolist(), curve.std_steps.tolist(), smoothed.tolist())
            )
        ),
    )


def read_curve_csv(path) -> LearningCurve:
    with Path(path).open(newline="", encoding="ascii") as fh:
        rows = list(csv.DictReader(fh))
    col = lambda k: np.array([float(r[k]) for r in rows])  # noqa: E731
    return LearningCurve(col("mean_steps"), col("std_steps"), col("smoothed_mean_steps"))


# ---------------------------------------------------------------------------
# experiments


def resolve_teacher(config: ExperimentConfig) -> Teacher:
    if config.teacher_source == TRAIN_FRESH:
        return train_teacher(
            config.grid, config.params, config.teacher_episodes, config.teacher_seed, config.step_cap
        )
    teacher = Teacher.load(config.teacher_source)
    teacher.check_grid(config.grid)
    return teacher


def run_experiment(
    config: ExperimentConfig,
    teacher: Optional[Teacher] = None,
    out_dir=None,
    jobs: int = 1,
) -> LearningCurve:
    """Run ``config.trials`` seeded trials and aggregate their step curves.

    With ``out_dir``, writes ``trial_NNN.csv`` per trial and ``aggregated.csv``.
    """
    if config.schedule.needs_teacher and teacher is None:
        teacher = resolve_teacher(config)
    seeds = [config.base_seed + i for i in range(config.trials)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            trials = list(pool.map(lambda sd: _trial_arrays(config, teacher, sd), seeds))
    else:
        trials = [_trial_arrays(config, teacher, sd) for sd in seeds]
    curve = aggregate([t.steps for t in trials], config.smoothing_window)
    curve.truncated = np.array([t.truncated for t in trials])
    if out_dir is not None:
        out_dir = Path(out_dir)
        for i, t in enumerate(trials):
            write_trial_csv(out_dir / f"trial_{i:03d}.csv", t.records())
        write_curve_csv(out_dir / "aggregated.csv", curve)
    return curve


def c_label(c: float) -> str:
    return f"c_{c:g}"


def sweep(
    config: ExperimentConfig,
    c_values: Sequence[float],
    teacher: Optional[Teacher] = None,
    out_dir=None,
    jobs: int = 1,
) -> Dict[float, LearningCurve]:
    """One experiment per C, all sharing ``base_seed`` (paired seeds)."""
    if not c_values:
        raise ValueError("sweep needs at least one C value")
    if config.schedule.needs_teacher and teacher is None:
        teacher = resolve_teacher(config)
    curves = {}
    for c in c_values:
        cfg = replace(config, schedule=config.schedule.with_c(float(c)))
        sub = Path(out_dir) / c_label(c) if out_dir is not None else None
        curves[float(c)] = run_experiment(cfg, teacher, sub, jobs)
    return curves


# ---------------------------------------------------------------------------
# summaries


@dataclass(frozen=True)
class SummaryRow:
    name: str
    range_start: int
    range_end: int
    mean_steps: float
    std_steps: float
    delta_vs_baseline: float


def range_mean(curve: LearningCurve, start: int, end: int) -> float:
    vals = curve.mean_steps[start:end].tolist()
    return math.fsum(vals) / len(vals)


def range_std(curve: LearningCurve, start: int, end: int) -> float:
    """Spread of per-trial range means, or the mean per-episode std without trial data."""
    if curve.per_trial is not None:
        return float(np.std(np.sort(curve.per_trial[:, start:end].mean(axis=1))))
    vals = curve.std_steps[start:end].tolist()
    return math.fsum(vals) / len(vals)


def compare(
    curves: Mapping[str, LearningCurve],
    report_ranges: Sequence[Tuple[int, int]],
    baseline: Optional[str] = None,
) -> List[SummaryRow]:
    """Mean/std of steps per curve and range, with differences to ``baseline``.

    The baseline defaults to the first curve.
    """
    if not curves:
        raise ValueError("nothing to compare")
    lengths = {len(c) for c in curves.values()}
    if len(lengths) != 1:
        raise ValueError(f"curves differ in length: {sorted(lengths)}")
    (n,) = lengths
    baseline = baseline if baseline is not None else next(iter(curves))
    if baseline not in curves:
        raise KeyError(f"baseline {baseline!r} not among curves")
    for start, end in report_ranges:
        if not 0 <= start < end <= n:
            raise ValueError(f"range ({start}, {end}) outside 0..{n}")
    rows = []
    for name, curve in curves.items():
        for start, end in report_ranges:
            m = range_mean(curve, start, end)
            rows.append(
                SummaryRow(
                    name, start, end, m, range_std(curve, start, end),
                    m - range_mean(curves[baseline], start, end),
                )
            )
    return rows


def write_summary_csv(path, rows: Sequence[SummaryRow]) -> None:
    _write_rows(
        Path(path),
        ("name", "range_start", "range_end", "mean_steps", "std_steps", "delta_vs_baseline"),
        (
            (r.name, r.range_start, r.range_end, repr(r.mean_steps), repr(r.std_steps), repr(r.delta_vs_baseline))
            for r in rows
        ),
    )
