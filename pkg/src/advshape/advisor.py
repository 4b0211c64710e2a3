"""Teacher training, punishment schedules and reward shaping.

A frozen teacher Q-table scores each action the student takes; the
schedule turns that score into a shaping value ``pun`` and the student
learns from ``env_reward - pun``.

Tie rules: an action tied for the row maximum counts as optimal, an action
tied for the row minimum counts as worst. On an all-equal row (e.g. a state
the teacher never visited) every action is both.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .gridworld import GameState, GridConfig
from .qlearn import LearningParams, QTable


class ScheduleKind(enum.Enum):
    NONE = "none"
    SUBOPTIMAL = "sub"
    ANTI_OPTIMAL = "anti"
    CONTINUOUS = "cont"
    ENCOURAGEMENT = "enc"

    @property
    def code(self) -> int:
        # must agree with the constants in _kernels
        return _CODES[self]


_CODES = {
    ScheduleKind.NONE: 0,
    ScheduleKind.SUBOPTIMAL: 1,
    ScheduleKind.ANTI_OPTIMAL: 2,
    ScheduleKind.CONTINUOUS: 3,
    ScheduleKind.ENCOURAGEMENT: 4,
}


@dataclass(frozen=True)
class Schedule:
    kind: ScheduleKind = ScheduleKind.NONE
    c: float = 10.0
    b: float = 10.0  # encouragement bonus, ignored by other kinds

    def __post_init__(self):
        if not isinstance(self.kind, ScheduleKind):
            object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if self.c < 0 or self.b < 0:
            raise ValueError(f"schedule magnitudes must be >= 0 (C={self.c}, B={self.b})")

    @property
    def needs_teacher(self) -> bool:
        return self.kind is not ScheduleKind.NONE

    def with_c(self, c: float) -> "Schedule":
        return Schedule(self.kind, float(c), self.b)


class TeacherMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Teacher:
    q: QTable

    def __post_init__(self):
        self.q.freeze()

    @property
    def grid(self) -> GridConfig:
        return self.q.grid

    def check_grid(self, grid: GridConfig) -> None:
        if grid != self.grid:
            raise TeacherMismatch(f"teacher was trained on {self.grid}, environment is {grid}")

    def save(self, path) -> None:
        self.q.save(path)

    @classmethod
    def load(cls, path) -> "Teacher":
        return cls(QTable.load(path))


def train_teacher(
    config: GridConfig,
    params: LearningParams = LearningParams(),
    episodes: int = 20_000,
    seed: int = 0,
    step_cap: int = 10_000,
) -> Teacher:
    """Plain Q-learning for ``episodes`` episodes, then freeze the table.

    Uses the same training loop as every student, with no shaping.
    """
    if episodes < 1:
        raise ValueError(f"teacher needs at least one episode, got {episodes}")
    from .experiment import train_table  # avoid an import cycle

    q, _ = train_table(config, params, Schedule(), None, episodes, step_cap, seed)
    return Teacher(q)


def punishment(teacher: Teacher, schedule: Schedule, s: GameState, a: int) -> float:
    """Signed shaping value for taking ``a`` in ``s``; positive means punish."""
    if schedule.kind is ScheduleKind.NONE:
        return 0.0
    g = teacher.grid
    if not all(0 <= p.x < g.width and 0 <= p.y < g.height for p in (s.hunter, s.prey)):
        raise TeacherMismatch(f"state {s.observation} lies outside the teacher's {g} grid")
    row = [float(v) for v in teacher.q.row(s)]
    qa, best, worst = row[a], max(row), min(row)
    kind = schedule.kind
    if kind is ScheduleKind.SUBOPTIMAL:
        return schedule.c if qa < best else 0.0
    if kind is ScheduleKind.ANTI_OPTIMAL:
        return schedule.c if qa == worst else 0.0
    if kind is ScheduleKind.CONTINUOUS:
        # sign flipped from the literal "Q(s,a) - max Q" so the value is a cost
        return schedule.c * (best - qa)
    p = 0.0
    if qa == best:
        p = p - schedule.b
    if qa == worst:
        p = p + schedule.c
    return p


def shaped_reward(env_reward: float, pun: float) -> float:
    return env_reward - pun
