"""Compiled episode loop.

Mirrors, draw for draw and operation for operation, the composition of
gridworld.reset/step, qlearn.select_action/update and advisor.punishment,
so a trial run here is bit-identical to the slow Python reference loop.
States are handled as (hunter_cell, prey_cell) with cell = y*W + x.
"""
from numba import njit

from .rng import below, uniform

NONE, SUB, ANTI, CONT, ENC = 0, 1, 2, 3, 4


@njit(cache=True, nogil=True)
def _move(cell, action, width, height):
    x = cell % width
    y = cell // width
    if action == 0:
        y = min(y + 1, height - 1)
    elif action == 1:
        x = min(x + 1, width - 1)
    elif action == 2:
        y = max(y - 1, 0)
    else:
        x = max(x - 1, 0)
    return y * width + x


@njit(cache=True, nogil=True)
def _row_max(row):
    m = row[0]
    for k in range(1, 4):
        if row[k] > m:
            m = row[k]
    return m


@njit(cache=True, nogil=True)
def _row_min(row):
    m = row[0]
    for k in range(1, 4):
        if row[k] < m:
            m = row[k]
    return m


@njit(cache=True, nogil=True)
def punish_row(row, a, kind, c, b):
    if kind == NONE:
        return 0.0
    qa = row[a]
    mx = _row_max(row)
    if kind == SUB:
        return c if qa < mx else 0.0
    mn = _row_min(row)
    if kind == ANTI:
        return c if qa == mn else 0.0
    if kind == CONT:
        return c * (mx - qa)
    p = 0.0
    if qa == mx:
        p = p - b
    if qa == mn:
        p = p + c
    return p


@njit(cache=True, nogil=True)
def _select(row, epsilon, rng):
    if uniform(rng) < epsilon:
        return below(rng, 4)
    mx = _row_max(row)
    n_tied = 0
    for k in range(4):
        if row[k] == mx:
            n_tied += 1
    if n_tied == 1:
        for k in range(4):
            if row[k] == mx:
                return k
    pick = below(rng, n_tied)
    for k in range(4):
        if row[k] == mx:
            if pick == 0:
                return k
            pick -= 1
    return -1


@njit(cache=True, nogil=True)
def run_episodes(
    q, teacher, kind, c, b, width, height, alpha, gamma, epsilon,
    episodes, step_cap, rng, steps_out, env_out, shaped_out, trunc_out,
):
    n_cells = width * height
    for ep in range(episodes):
        h = below(rng, n_cells)
        p = below(rng, n_cells - 1)
        if p >= h:
            p += 1
        env_ret = 0.0
        shaped_ret = 0.0
        n = 0
        captured = False
        while n < step_cap:
            s = h * n_cells + p
            a = _select(q[s], epsilon, rng)
            h_next = _move(h, a, width, height)
            n += 1
            if h_next == p:
                r = 0.0
                captured = True
                p_next = p
            else:
                r = -1.0
                while True:
                    p_next = _move(p, below(rng, 4), width, height)
                    if p_next != h_next:
                        break
            pun = 0.0
            if kind != NONE:
                pun = punish_row(teacher[s], a, kind, c, b)
            rs = r - pun
            env_ret += r
            shaped_ret += rs
            if captured:
                target = rs
            else:
                target = rs + gamma * _row_max(q[h_next * n_cells + p_next])
            old = q[s, a]
            q[s, a] = old + alpha * (target - old)
            h = h_next
            p = p_next
            if captured:
                break
        steps_out[ep] = n
        env_out[ep] = env_ret
        shaped_out[ep] = shaped_ret
        trunc_out[ep] = not captured
