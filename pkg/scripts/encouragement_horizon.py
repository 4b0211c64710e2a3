#!/usr/bin/env python3
"""Follow the encouragement schedule past the usual 20,000 episodes.

Prints mean steps per 1,000-episode block for the baseline and for the
encouragement student (B = C = 10). The student's positive feedback loop
takes a long time to dominate: on 10x10 the blow-up shows up well after
20,000 episodes.
"""
import argparse

import numpy as np

from advshape import GridConfig, LearningParams, Schedule, ScheduleKind, train_teacher
from advshape.experiment import TEACHER_SEED_OFFSET, train_table


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--episodes", type=int, default=60_000)
    parser.add_argument("--trials", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--block", type=int, default=1_000)
    args = parser.parse_args()

    grid, params = GridConfig(), LearningParams()
    teacher = train_teacher(grid, params, 20_000, args.seed + TEACHER_SEED_OFFSET)
    rows = {}
    for name, schedule in (("baseline", Schedule()), ("encouragement", Schedule(ScheduleKind.ENCOURAGEMENT))):
        blocks = []
        for i in range(args.trials):
            _, out = train_table(grid, params, schedule, teacher, args.episodes, 10_000, args.seed + i)
            blocks.append(out.steps.reshape(-1, args.block).mean(axis=1))
        rows[name] = np.mean(blocks, axis=0)
    print(f"{'episodes':>10} {'baseline':>10} {'encourage':>10} {'ratio':>7}")
    for k, (b, e) in enumerate(zip(rows["baseline"], rows["encouragement"])):
        print(f"{(k + 1) * args.block:>10} {b:>10.2f} {e:>10.2f} {e / b:>7.2f}")


if __name__ == "__main__":
    main()
