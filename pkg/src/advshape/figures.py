"""Figure bundles: which runs each learning-curve figure compares, and the
qualitative claim each one is checked against.

Figures 5 and 6 follow the section text (5 = anti-optimal sweep,
6 = suboptimal sweep); the figure captions name the two schedules the
other way round.

Episode ranges scale with run length; at 20,000 episodes "early" is
episodes 500-2,000, "first" is 0-2,000 and "final" is the last 1,000.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np

from .advisor import ScheduleKind
from .experiment import LearningCurve, range_mean, range_std

DEFAULT_SWEEP = (1.0, 5.0, 10.0, 50.0)


def early_range(n: int) -> Tuple[int, int]:
    return n // 40, n // 10


def first_range(n: int) -> Tuple[int, int]:
    return 0, n // 10


def final_range(n: int) -> Tuple[int, int]:
    return n - n // 20, n


def checkpoints(n: int) -> np.ndarray:
    every = max(n // 40, 1)
    return np.arange(every - 1, n, every)


@dataclass
class ClaimResult:
    passed: bool
    detail: str


def _pooled_std(curves: List[LearningCurve], start: int, end: int) -> float:
    return float(np.sqrt(np.mean([range_std(c, start, end) ** 2 for c in curves])))


def speedup_then_plateau(base: LearningCurve, student: LearningCurve) -> ClaimResult:
    n = len(base)
    e, f = early_range(n), final_range(n)
    be, se = range_mean(base, *e), range_mean(student, *e)
    bf, sf = range_mean(base, *f), range_mean(student, *f)
    ok = se < be and sf >= bf
    return ClaimResult(ok, f"early {e}: student {se:.3f} vs baseline {be:.3f}; final {f}: student {sf:.3f} vs baseline {bf:.3f}")


def never_worse(base: LearningCurve, student: LearningCurve, share: float = 0.9) -> ClaimResult:
    idx = checkpoints(len(base))
    below = student.smoothed[idx] <= base.smoothed[idx]
    frac = float(below.mean())
    return ClaimResult(frac >= share, f"student smoothed curve <= baseline at {below.sum()}/{idx.size} checkpoints ({100 * frac:.1f}%)")


def early_speedup(base: LearningCurve, student: LearningCurve) -> ClaimResult:
    e = early_range(len(base))
    be, se = range_mean(base, *e), range_mean(student, *e)
    return ClaimResult(se < be, f"early {e}: student {se:.3f} vs baseline {be:.3f}")


def severe_hindrance(base: LearningCurve, student: LearningCurve, factor: float = 5.0) -> ClaimResult:
    f = final_range(len(base))
    bf, sf = range_mean(base, *f), range_mean(student, *f)
    trunc = float(student.truncated.mean()) if student.truncated is not None else 0.0
    ok = sf >= factor * bf or trunc >= 0.5
    return ClaimResult(ok, f"final {f}: student {sf:.3f} vs baseline {bf:.3f} (x{sf / bf:.2f}); truncated episodes {100 * trunc:.1f}%")


def early_gain_in_c(curves: Dict[float, LearningCurve]) -> ClaimResult:
    cs = sorted(curves)
    r = first_range(len(curves[cs[0]]))
    means = [range_mean(curves[c], *r) for c in cs]
    ok = all(b <= a for a, b in zip(means, means[1:])) and means[-1] < means[0]
    return ClaimResult(ok, f"first {r} means by C: " + ", ".join(f"{c:g}: {m:.3f}" for c, m in zip(cs, means)))


def no_late_harm_in_c(curves: Dict[float, LearningCurve]) -> ClaimResult:
    cs = sorted(curves)
    r = final_range(len(curves[cs[0]]))
    means = [range_mean(curves[c], *r) for c in cs]
    pooled = _pooled_std([curves[c] for c in cs], *r)
    ok = all(b <= a + pooled for a, b in zip(means, means[1:]))
    return ClaimResult(
        ok,
        f"final {r} means by C: " + ", ".join(f"{c:g}: {m:.3f}" for c, m in zip(cs, means)) + f"; pooled std {pooled:.3f}",
    )


@dataclass(frozen=True)
class Figure:
    number: int
    title: str
    kind: ScheduleKind
    c_values: Tuple[float, ...]
    claim: Callable[..., ClaimResult]

    @property
    def is_sweep(self) -> bool:
        return len(self.c_values) > 1


FIGURES = {
    1: Figure(1, "Q-learning vs suboptimal-action punishment", ScheduleKind.SUBOPTIMAL, (10.0,), speedup_then_plateau),
    2: Figure(2, "Q-learning vs anti-optimal-action punishment", ScheduleKind.ANTI_OPTIMAL, (10.0,), never_worse),
    3: Figure(3, "Q-learning vs continuous proportional punishment", ScheduleKind.CONTINUOUS, (10.0,), early_speedup),
    4: Figure(4, "Q-learning with encouragement", ScheduleKind.ENCOURAGEMENT, (10.0,), severe_hindrance),
    5: Figure(5, "C sweep, anti-optimal schedule", ScheduleKind.ANTI_OPTIMAL, DEFAULT_SWEEP, early_gain_in_c),
    6: Figure(6, "C sweep, suboptimal schedule", ScheduleKind.SUBOPTIMAL, DEFAULT_SWEEP, no_late_harm_in_c),
    7: Figure(7, "C sweep, continuous schedule", ScheduleKind.CONTINUOUS, DEFAULT_SWEEP, early_gain_in_c),
}
