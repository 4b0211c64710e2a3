"""Hunter/prey pursuit gridworld.

Coordinates put (0, 0) at the top-left corner; "down" increments y.
Action codes: 0 = down, 1 = right, 2 = up, 3 = left. Moves into a wall
leave the mover in place.

A step moves the hunter first. Landing on the prey ends the episode with
reward 0 and the prey stays put. Otherwise the reward is -1 and the prey
takes one uniformly random step, redrawing any direction that would put
it on the hunter's cell. Hunter and prey therefore never coincide in a
non-terminal state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Tuple

from .rng import Rng

N_ACTIONS = 4
DOWN, RIGHT, UP, LEFT = 0, 1, 2, 3
# (dx, dy) per action code
MOVES: Tuple[Tuple[int, int], ...] = ((0, 1), (1, 0), (0, -1), (-1, 0))


@dataclass(frozen=True)
class GridConfig:
    width: int = 10
    height: int = 10

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.width}x{self.height}")

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    @property
    def n_states(self) -> int:
        return self.n_cells * self.n_cells

    @classmethod
    def parse(cls, spec: str) -> "GridConfig":
        """Parse ``"WxH"`` (e.g. ``"10x10"``)."""
        try:
            w, h = spec.lower().split("x")
            return cls(int(w), int(h))
        except ValueError as exc:
            raise ValueError(f"invalid grid spec {spec!r}: expected WxH with W,H >= 2") from exc

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"


@dataclass(frozen=True)
class Position:
    x: int
    y: int


@dataclass(frozen=True)
class GameState:
    hunter: Position
    prey: Position

    @property
    def observation(self) -> Tuple[int, int, int, int]:
        return (self.hunter.x, self.hunter.y, self.prey.x, self.prey.y)

    @property
    def captured(self) -> bool:
        return self.hunter == self.prey


@dataclass(frozen=True)
class StepOutcome:
    next_state: GameState
    reward: float
    terminal: bool


def move(pos: Position, action: int, config: GridConfig) -> Position:
    dx, dy = MOVES[action]
    x = min(max(pos.x + dx, 0), config.width - 1)
    y = min(max(pos.y + dy, 0), config.height - 1)
    return Position(x, y)


def cell_position(cell: int, config: GridConfig) -> Position:
    return Position(cell % config.width, cell // config.width)


def reset(config: GridConfig, rng: Rng) -> GameState:
    """Place hunter and prey uniformly at random on distinct cells."""
    n = config.n_cells
    h = rng.below(n)
    p = rng.below(n - 1)
    if p >= h:
        p += 1
    return GameState(cell_position(h, config), cell_position(p, config))


def _check_action(action: int) -> int:
    a = int(action)
    if a < 0 or a >= N_ACTIONS:
        raise ValueError(f"action must be in 0..3, got {action!r}")
    return a


def step(state: GameState, action: int, config: GridConfig, rng: Rng) -> StepOutcome:
    if state.captured:
        raise ValueError("cannot step a terminal state (hunter already on prey)")
    hunter = move(state.hunter, _check_action(action), config)
    if hunter == state.prey:
        return StepOutcome(GameState(hunter, state.prey), 0.0, True)
    while True:
        prey = move(state.prey, rng.below(N_ACTIONS), config)
        if prey != hunter:
            break
    return StepOutcome(GameState(hunter, prey), -1.0, False)


def state_index(state: GameState, config: GridConfig) -> int:
    """Dense index ``(h_y*W + h_x) * H*W + (p_y*W + p_x)``."""
    w = config.width
    hunter_cell = state.hunter.y * w + state.hunter.x
    prey_cell = state.prey.y * w + state.prey.x
    return hunter_cell * config.n_cells + prey_cell


def index_state(index: int, config: GridConfig) -> GameState:
    if not 0 <= index < config.n_states:
        raise ValueError(f"state index {index} out of range for {config}")
    hunter_cell, prey_cell = divmod(index, config.n_cells)
    return GameState(cell_position(hunter_cell, config), cell_position(prey_cell, config))


def all_states(config: GridConfig, include_terminal: bool = False) -> Iterator[GameState]:
    """Every state in index order; coincident (captured) states only on request."""
    for idx in range(config.n_states):
        s = index_state(idx, config)
        if include_terminal or not s.captured:
            yield s


def transition_distribution(
    state: GameState, action: int, config: GridConfig
) -> List[Tuple[GameState, float, float]]:
    """Exact ``(next_state, probability, reward)`` outcomes of :func:`step`.

    The prey's rejection of moves onto the hunter turns into a uniform
    choice over the remaining directions; wall-clamped directions that
    collapse onto the same cell are merged.
    """
    if state.captured:
        raise ValueError("no transitions out of a terminal state")
    hunter = move(state.hunter, _check_action(action), config)
    if hunter == state.prey:
        return [(GameState(hunter, state.prey), 1.0, 0.0)]
    landings = [move(state.prey, d, config) for d in range(N_ACTIONS)]
    allowed = [p for p in landings if p != hunter]
    counts: dict = {}
    for p in allowed:
        counts[p] = counts.get(p, 0) + 1
    k = len(allowed)
    return [(GameState(hunter, p), c / k, -1.0) for p, c in counts.items()]
