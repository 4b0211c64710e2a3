import numpy as np
import pytest
from hypothesis import given, strategies as st

from advshape import _kernels
from advshape.advisor import (
    Schedule,
    ScheduleKind as K,
    Teacher,
    TeacherMismatch,
    punishment,
    shaped_reward,
    train_teacher,
)
from advshape.gridworld import GameState, GridConfig, Position, state_index
from advshape.qlearn import QTable, build_model, optimal_action_sets, value_iteration_oracle

G = GridConfig(3, 3)
S = GameState(Position(0, 0), Position(2, 2))


def teacher_with_row(row, state=S, grid=G):
    q = QTable(grid)
    q.values[state_index(state, grid)] = row
    return Teacher(q)


def brute(kind, row, a, c, b):
    """Direct transcription of the indicator/gap definitions."""
    best = max(row)
    worst = min(row)
    is_opt = 1 if row[a] == best else 0
    is_worst = 1 if row[a] == worst else 0
    if kind is K.NONE:
        return 0.0
    if kind is K.SUBOPTIMAL:
        return c * (1 - is_opt)
    if kind is K.ANTI_OPTIMAL:
        return c * is_worst
    if kind is K.CONTINUOUS:
        return c * (best - row[a])
    return -b * is_opt + c * is_worst


ROW = [-3.0, -5.0, -4.0, -6.0]


@pytest.mark.parametrize(
    "kind,a,expected",
    [
        (K.SUBOPTIMAL, 0, 0.0), (K.SUBOPTIMAL, 2, 10.0),
        (K.ANTI_OPTIMAL, 3, 10.0), (K.ANTI_OPTIMAL, 2, 0.0),
        (K.CONTINUOUS, 1, 20.0), (K.CONTINUOUS, 0, 0.0),
        (K.ENCOURAGEMENT, 0, -10.0), (K.ENCOURAGEMENT, 3, 10.0), (K.ENCOURAGEMENT, 2, 0.0),
        (K.NONE, 3, 0.0),
    ],
)
def test_punishment_examples(kind, a, expected):
    assert punishment(teacher_with_row(ROW), Schedule(kind, 10.0, 10.0), S, a) == expected


@pytest.mark.parametrize("a", range(4))
def test_punishment_all_equal_row(a):
    t = teacher_with_row([-4.0] * 4)
    assert punishment(t, Schedule(K.SUBOPTIMAL, 10), S, a) == 0.0
    assert punishment(t, Schedule(K.ANTI_OPTIMAL, 10), S, a) == 10.0
    assert punishment(t, Schedule(K.CONTINUOUS, 10), S, a) == 0.0


def test_brute_force_equivalence_1000_rows():
    rng = np.random.default_rng(123)
    t = teacher_with_row(ROW)
    i = state_index(S, G)
    for n in range(1000):
        # integer rows from a small range make ties common
        row = rng.integers(-6, 1, size=4).astype(float) if n % 2 else rng.normal(-5, 3, size=4)
        t.q.values.flags.writeable = True
        t.q.values[i] = row
        t.q.values.flags.writeable = False
        c, b = float(rng.uniform(0, 20)), float(rng.uniform(0, 20))
        for kind in K:
            for a in range(4):
                expected = brute(kind, row.tolist(), a, c, b)
                got = punishment(t, Schedule(kind, c, b), S, a)
                assert got == expected
                assert _kernels.punish_row(row, a, kind.code, c, b) == expected


int_rows = st.lists(st.integers(-50, 0).map(float), min_size=4, max_size=4)
kinds = st.sampled_from(list(K))
actions = st.integers(0, 3)


@given(int_rows, actions, st.integers(0, 30).map(float))
def test_punishments_non_negative(row, a, c):
    t = teacher_with_row(row)
    for kind in (K.SUBOPTIMAL, K.ANTI_OPTIMAL, K.CONTINUOUS):
        assert punishment(t, Schedule(kind, c), S, a) >= 0.0
    assert punishment(t, Schedule(K.NONE, c), S, a) == 0.0


@given(int_rows, actions, st.integers(1, 30).map(float))
def test_zero_exactly_on_argmax(row, a, c):
    t = teacher_with_row(row)
    on_max = row[a] == max(row)
    assert (punishment(t, Schedule(K.CONTINUOUS, c), S, a) == 0.0) == on_max
    assert (punishment(t, Schedule(K.SUBOPTIMAL, c), S, a) == 0.0) == on_max
    assert (punishment(t, Schedule(K.ANTI_OPTIMAL, c), S, a) == c) == (row[a] == min(row))


@given(int_rows, actions, kinds, st.integers(0, 20).map(float), st.integers(0, 20).map(float), st.integers(0, 8))
def test_scale_equivariance(row, a, kind, c, b, k):
    t = teacher_with_row(row)
    base = punishment(t, Schedule(kind, c, b), S, a)
    scaled = punishment(t, Schedule(kind, k * c, k * b), S, a)
    assert scaled == pytest.approx(k * base, rel=1e-12, abs=1e-12)


@given(int_rows, actions, kinds, st.integers(0, 20).map(float), st.integers(-100, 100).map(float))
def test_row_shift_invariance(row, a, kind, c, shift):
    before = punishment(teacher_with_row(row), Schedule(kind, c, c), S, a)
    after = punishment(teacher_with_row([v + shift for v in row]), Schedule(kind, c, c), S, a)
    assert after == before


@pytest.mark.parametrize(
    "env,pun,expected", [(-1.0, 10.0, -11.0), (-1.0, 0.0, -1.0), (-1.0, -10.0, 9.0)]
)
def test_shaped_reward(env, pun, expected):
    assert shaped_reward(env, pun) == expected


def test_schedule_validation():
    with pytest.raises(ValueError):
        Schedule(K.SUBOPTIMAL, -1.0)
    with pytest.raises(ValueError):
        Schedule(K.ENCOURAGEMENT, 1.0, -2.0)
    assert Schedule("anti").kind is K.ANTI_OPTIMAL
    assert Schedule(K.CONTINUOUS, 3.0).with_c(7) == Schedule(K.CONTINUOUS, 7.0)


def test_teacher_grid_checks():
    t = teacher_with_row(ROW)
    with pytest.raises(TeacherMismatch):
        t.check_grid(GridConfig(4, 4))
    outside = GameState(Position(3, 0), Position(0, 0))
    with pytest.raises(TeacherMismatch):
        punishment(t, Schedule(K.SUBOPTIMAL), outside, 0)


def test_teacher_is_frozen():
    t = train_teacher(G, episodes=50, seed=1)
    with pytest.raises(ValueError):
        t.q.values[0, 0] = 1.0


def test_train_teacher_rejects_zero_episodes():
    with pytest.raises(ValueError):
        train_teacher(G, episodes=0)


def test_train_teacher_deterministic(tmp_path):
    a = train_teacher(G, episodes=300, seed=4)
    b = train_teacher(G, episodes=300, seed=4)
    assert a.q == b.q
    a.save(tmp_path / "t.csv")
    assert Teacher.load(tmp_path / "t.csv").q == a.q


def test_teacher_3x3_agrees_with_oracle():
    t = train_teacher(G, episodes=50_000, seed=0)
    model = build_model(G)
    v, _ = value_iteration_oracle(G, model=model)
    optimal = optimal_action_sets(model, v)
    live = model.states
    greedy = np.argmax(t.q.values, axis=1)
    assert optimal[live, greedy[live]].mean() >= 0.95


@pytest.mark.slow
def test_teacher_10x10_finite_capture():
    from advshape.qlearn import LearningParams
    from advshape.experiment import train_table

    q, out = train_table(GridConfig(), LearningParams(0.1, 1.0, 0.1), Schedule(), None, 20_000, 10_000, 0)
    assert not out.truncated[-1000:].any()
    assert out.steps[-1000:].mean() < out.steps[:1000].mean()


@pytest.mark.slow
def test_teacher_10x10_greedy_rollouts_capture():
    from advshape.gridworld import reset, step
    from advshape.qlearn import greedy_action
    from advshape.rng import Rng

    g = GridConfig()
    t = train_teacher(g, episodes=20_000, seed=0)
    rng = Rng(99)
    lengths = []
    for _ in range(200):
        s = reset(g, rng)
        for n in range(1, 1001):
            out = step(s, greedy_action(t.q, s), g, rng)
            s = out.next_state
            if out.terminal:
                lengths.append(n)
                break
    assert len(lengths) >= 190
    assert np.mean(lengths) < 50
