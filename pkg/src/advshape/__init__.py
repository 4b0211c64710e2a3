"""Teacher advice delivered as reward shaping for tabular Q-learning on a
hunter/prey gridworld."""
from .advisor import Schedule, ScheduleKind, Teacher, punishment, shaped_reward, train_teacher
from .experiment import (
    EpisodeRecord,
    ExperimentConfig,
    LearningCurve,
    compare,
    run_experiment,
    run_trial,
    smooth,
    sweep,
)
from .gridworld import GameState, GridConfig, Position, StepOutcome, reset, state_index, step, transition_distribution
from .qlearn import LearningParams, QTable, greedy_action, select_action, update, value_iteration_oracle
from .rng import Rng

__version__ = "0.1.0"
