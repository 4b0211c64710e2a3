"""Compare a plain Q-learner against exact value iteration on a small grid."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .advisor import Schedule
from .experiment import train_table
from .gridworld import GridConfig
from .qlearn import (
    LearningParams,
    build_model,
    expected_steps,
    optimal_action_sets,
    value_iteration_oracle,
)

MAX_VERIFY_CELLS = 36
AGREEMENT_THRESHOLD = 0.95


@dataclass
class OracleReport:
    grid: GridConfig
    episodes: int
    seed: int
    agreement: float  # share of live states whose learned greedy action is optimal
    value_max_error: float  # max |max_a Q(s,a) - V*(s)|
    learned_steps: float  # mean expected steps-to-capture over start states
    optimal_steps: float

    @property
    def passed(self) -> bool:
        return self.agreement >= AGREEMENT_THRESHOLD

    @property
    def steps_ratio(self) -> float:
        return self.learned_steps / self.optimal_steps

    def lines(self):
        yield f"grid {self.grid}, {self.episodes} episodes, seed {self.seed}"
        yield f"policy agreement: {100 * self.agreement:.2f}% (threshold {100 * AGREEMENT_THRESHOLD:.0f}%)"
        yield f"value max-error: {self.value_max_error:.6f}"
        yield (
            f"expected steps to capture: learned {self.learned_steps:.6f}, "
            f"optimal {self.optimal_steps:.6f} (ratio {self.steps_ratio:.4f})"
        )
        yield "PASS" if self.passed else "FAIL"


def oracle_report(
    grid: GridConfig,
    params: LearningParams = LearningParams(),
    episodes: int = 50_000,
    seed: int = 0,
    step_cap: int = 10_000,
) -> OracleReport:
    if grid.n_cells > MAX_VERIFY_CELLS:
        raise ValueError(
            f"grid {grid} has {grid.n_cells} cells; exact verification is capped at {MAX_VERIFY_CELLS}"
        )
    model = build_model(grid)
    v_star, _ = value_iteration_oracle(grid, params.gamma, model=model)
    q, _ = train_table(grid, params, Schedule(), None, episodes, step_cap, seed)
    live = model.states
    learned = np.argmax(q.values, axis=1)
    optimal = optimal_action_sets(model, v_star, params.gamma)
    steps = expected_steps(model, learned)
    # start states are uniform over live states
    return OracleReport(
        grid,
        episodes,
        seed,
        agreement=float(optimal[live, learned[live]].mean()),
        value_max_error=float(np.abs(q.values[live].max(axis=1) - v_star[live]).max()),
        learned_steps=float(steps[live].mean()),
        optimal_steps=float((1.0 - v_star[live]).mean()),
    )
