"""Tabular Q-learning plus an exact value-iteration oracle.

The table is dense: one row per state index (see
:func:`advshape.gridworld.state_index`) and one column per action. Rows for
coincident hunter/prey states exist but are never read or written.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from .gridworld import (
    N_ACTIONS,
    GameState,
    GridConfig,
    index_state,
    state_index,
    transition_distribution,
)
from .rng import Rng


class QTableFormatError(ValueError):
    """Malformed Q-table file; message carries the offending line number."""


@dataclass(frozen=True)
class LearningParams:
    alpha: float = 0.1
    gamma: float = 1.0
    epsilon: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")


class QTable:
    """State-action values for one grid, zero-initialised."""

    def __init__(self, grid: GridConfig, values: np.ndarray | None = None):
        self.grid = grid
        if values is None:
            values = np.zeros((grid.n_states, N_ACTIONS), dtype=np.float64)
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (grid.n_states, N_ACTIONS):
            raise ValueError(
                f"Q-table shape {values.shape} does not fit grid {grid} "
                f"(expected {(grid.n_states, N_ACTIONS)})"
            )
        self.values = values

    def row(self, state: GameState) -> np.ndarray:
        return self.values[state_index(state, self.grid)]

    def freeze(self) -> "QTable":
        self.values.flags.writeable = False
        return self

    def copy(self) -> "QTable":
        return QTable(self.grid, self.values.copy())

    def __eq__(self, other):
        if not isinstance(other, QTable):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)

    # Persistence: header "width,height,actions", then "index,q0,q1,q2,q3"
    # per state, floats written with repr() so they round-trip exactly.
    def save(self, path) -> None:
        path = Path(path)
        lines = [f"{self.grid.width},{self.grid.height},{N_ACTIONS}"]
        for i, row in enumerate(self.values.tolist()):
            lines.append(f"{i}," + ",".join(repr(v) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="ascii")

    @classmethod
    def load(cls, path) -> "QTable":
        path = Path(path)
        with path.open(encoding="ascii") as fh:
            header = fh.readline()
            try:
                w, h, n_actions = (int(tok) for tok in header.strip().split(","))
                grid = GridConfig(w, h)
            except ValueError as exc:
                raise QTableFormatError(f"{path}:1: bad header {header.strip()!r}: {exc}") from None
            if n_actions != N_ACTIONS:
                raise QTableFormatError(f"{path}:1: expected {N_ACTIONS} actions, got {n_actions}")
            values = np.empty((grid.n_states, N_ACTIONS), dtype=np.float64)
            count = 0
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                fields = line.strip().split(",")
                if len(fields) != N_ACTIONS + 1:
                    raise QTableFormatError(
                        f"{path}:{lineno}: expected {N_ACTIONS + 1} fields, got {len(fields)}"
                    )
                try:
                    idx = int(fields[0])
                    row = [float(v) for v in fields[1:]]
                except ValueError as exc:
                    raise QTableFormatError(f"{path}:{lineno}: {exc}") from None
                if idx != count:
                    raise QTableFormatError(f"{path}:{lineno}: expected state index {count}, got {idx}")
                if not all(math.isfinite(v) for v in row):
                    raise QTableFormatError(f"{path}:{lineno}: non-finite value")
                values[idx] = row
                count += 1
        if count != grid.n_states:
            raise QTableFormatError(f"{path}: expected {grid.n_states} state rows, got {count}")
        return cls(grid, values)


def argmax_set(row) -> list:
    best = max(row)
    return [a for a in range(N_ACTIONS) if row[a] == best]


def select_action(q: QTable, state: GameState, epsilon: float, rng: Rng) -> int:
    """Epsilon-greedy; greedy ties are broken uniformly at random.

    One uniform draw always decides explore vs exploit, so the number of
    draws does not depend on epsilon.
    """
    if rng.random() < epsilon:
        return rng.below(N_ACTIONS)
    tied = argmax_set(q.row(state))
    if len(tied) == 1:
        return tied[0]
    return tied[rng.below(len(tied))]


def greedy_action(q: QTable, state: GameState) -> int:
    """Argmax with ties going to the lowest action code."""
    return int(np.argmax(q.row(state)))


def update(
    q: QTable,
    s: GameState,
    a: int,
    r: float,
    s_next: GameState,
    terminal: bool,
    params: LearningParams,
) -> float:
    if not math.isfinite(r):
        raise ValueError(f"reward must be finite, got {r}")
    i = state_index(s, q.grid)
    if terminal:
        target = r
    else:
        target = r + params.gamma * float(q.values[state_index(s_next, q.grid)].max())
    old = float(q.values[i, a])
    new = old + params.alpha * (target - old)
    q.values[i, a] = new
    return new


# ---------------------------------------------------------------------------
# exact dynamic programming


@dataclass
class TransitionModel:
    """Flattened transition_distribution over every non-terminal (s, a)."""

    grid: GridConfig
    states: np.ndarray  # indices of non-terminal states
    src: np.ndarray  # flat (state_index*4 + action) for each outcome
    dst: np.ndarray  # next state index
    prob: np.ndarray
    reward: np.ndarray
    terminal: np.ndarray


def build_model(config: GridConfig) -> TransitionModel:
    states, src, dst, prob, reward, term = [], [], [], [], [], []
    for idx in range(config.n_states):
        s = index_state(idx, config)
        if s.captured:
            continue
        states.append(idx)
        for a in range(N_ACTIONS):
            for nxt, p, r in transition_distribution(s, a, config):
                src.append(idx * N_ACTIONS + a)
                dst.append(state_index(nxt, config))
                prob.append(p)
                reward.append(r)
                term.append(nxt.captured)
    return TransitionModel(
        config,
        np.array(states, dtype=np.int64),
        np.array(src, dtype=np.int64),
        np.array(dst, dtype=np.int64),
        np.array(prob),
        np.array(reward),
        np.array(term, dtype=bool),
    )


def action_values(model: TransitionModel, values: np.ndarray, gamma: float) -> np.ndarray:
    """One Bellman lookahead: Q(s,a) = sum p * (r + gamma * V(s')), V(terminal) = 0."""
    cont = np.where(model.terminal, 0.0, values[model.dst])
    contrib = model.prob * (model.reward + gamma * cont)
    n = model.grid.n_states * N_ACTIONS
    return np.bincount(model.src, weights=contrib, minlength=n).reshape(-1, N_ACTIONS)


class OracleDivergence(RuntimeError):
    pass


def value_iteration_oracle(
    config: GridConfig,
    gamma: float = 1.0,
    tolerance: float = 1e-9,
    max_sweeps: int = 100_000,
    model: TransitionModel | None = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Optimal state values and a greedy optimal policy.

    Values are indexed like the Q-table; terminal (coincident) entries stay 0.
    With gamma = 1 a value is minus the expected number of non-capturing
    steps, so expected steps-to-capture is ``1 - value``.
    The policy breaks ties toward the lowest action code; entries for terminal
    states are -1.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    model = model or build_model(config)
    v = np.zeros(config.n_states)
    live = model.states
    for _ in range(max_sweeps):
        q = action_values(model, v, gamma)
        new = np.zeros_like(v)
        new[live] = q[live].max(axis=1)
        delta = float(np.max(np.abs(new - v)))
        v = new
        if delta < tolerance:
            break
    else:
        raise OracleDivergence(f"value iteration did not converge within {max_sweeps} sweeps")
    policy = np.full(config.n_states, -1, dtype=np.int64)
    policy[live] = np.argmax(action_values(model, v, gamma)[live], axis=1)
    return v, policy


def optimal_action_sets(
    model: TransitionModel, values: np.ndarray, gamma: float = 1.0, slack: float = 1e-6
) -> np.ndarray:
    """Boolean (n_states, 4) mask of actions within ``slack`` of optimal."""
    q = action_values(model, values, gamma)
    mask = np.zeros_like(q, dtype=bool)
    live = model.states
    mask[live] = q[live] >= values[live, None] - slack
    return mask


def expected_steps(model: TransitionModel, policy: np.ndarray) -> np.ndarray:
    """Exact expected steps-to-capture under a deterministic policy.

    States from which the policy can never reach capture get ``inf``.
    """
    n = model.grid.n_states
    live = model.states
    chosen = (model.src % N_ACTIONS) == policy[model.src // N_ACTIONS]
    src = model.src[chosen] // N_ACTIONS
    dst, prob, term = model.dst[chosen], model.prob[chosen], model.terminal[chosen]

    # states that reach capture: backward closure from terminal-entering states
    succ: dict = {}
    good = set(src[term].tolist())
    preds: dict = {}
    for s_, d_ in zip(src[~term].tolist(), dst[~term].tolist()):
        preds.setdefault(d_, []).append(s_)
        succ.setdefault(s_, set()).add(d_)
    frontier = list(good)
    while frontier:
        d_ = frontier.pop()
        for s_ in preds.get(d_, ()):
            if s_ not in good:
                good.add(s_)
                frontier.append(s_)
    # a state that reaches capture with positive probability but can also
    # slip into a closed non-capturing set still has infinite expectation
    bad = set(live.tolist()) - good
    changed = True
    while changed:
        changed = False
        for s_ in list(good):
            if succ.get(s_, set()) & bad:
                good.discard(s_)
                bad.add(s_)
                changed = True

    out = np.full(n, np.inf)
    out[[i for i in range(n) if index_state(i, model.grid).captured]] = 0.0
    ok = np.array(sorted(good), dtype=np.int64)
    if ok.size:
        pos = {s_: k for k, s_ in enumerate(ok.tolist())}
        a = np.eye(ok.size)
        for s_, d_, p, t in zip(src.tolist(), dst.tolist(), prob.tolist(), term.tolist()):
            if s_ in pos and not t:
                a[pos[s_], pos[d_]] -= p
        out[ok] = np.linalg.solve(a, np.ones(ok.size))
    return out
