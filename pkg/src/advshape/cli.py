"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .advisor import Schedule, ScheduleKind, Teacher, TeacherMismatch, train_teacher
from .experiment import (
    ExperimentConfig,
    ExperimentIOError,
    compare,
    range_mean,
    run_experiment,
    sweep,
    write_summary_csv,
)
from .figures import FIGURES, early_range, final_range, first_range
from .gridworld import GridConfig
from .qlearn import LearningParams, QTableFormatError
from .verify import MAX_VERIFY_CELLS, oracle_report

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _grid(text):
    try:
        return GridConfig.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _c_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad C list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("C list is empty")
    return values


def _add_learning(p, grid="10x10", episodes=20_000):
    p.add_argument("--grid", type=_grid, default=GridConfig.parse(grid), help=f"grid as WxH (default {grid})")
    p.add_argument("--episodes", type=_positive_int, default=episodes, help=f"training episodes (default {episodes:,})")
    p.add_argument("--alpha", type=float, default=0.1, help="step size (default 0.1, as in the original study)")
    p.add_argument("--gamma", type=float, default=1.0, help="discount (default 1.0, undiscounted)")
    p.add_argument("--epsilon", type=float, default=0.1, help="exploration rate (default 0.1)")
    p.add_argument("--step-cap", type=_positive_int, default=10_000, help="max steps per episode (default 10,000)")
    p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")


def _add_experiment(p):
    _add_learning(p)
    p.add_argument("--trials", type=_positive_int, default=10, help="seeded trials per configuration (default 10)")
    p.add_argument("--window", type=_positive_int, default=500, help="smoothing window (default 500)")
    p.add_argument("--jobs", type=_positive_int, default=1, help="parallel trials (output does not depend on this)")
    p.add_argument("--teacher", type=Path, help="teacher Q-table file (required unless --schedule none)")
    p.add_argument("--out", type=Path, required=True, help="output directory")


def _schedule_arg(p, required=True):
    p.add_argument(
        "--schedule",
        choices=[k.value for k in ScheduleKind],
        required=required,
        default=None if required else "none",
        help="none | sub (suboptimal) | anti (anti-optimal) | cont (continuous) | enc (encouragement)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="advshape", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train-advisor", help="train and save a teacher Q-table")
    _add_learning(p)
    p.add_argument("--out", type=Path, required=True, help="teacher file to write")

    p = sub.add_parser("run", help="train students under one schedule")
    _schedule_arg(p)
    p.add_argument("--c", type=float, default=10.0, help="punishment magnitude C (default 10)")
    p.add_argument("--bonus", type=float, default=10.0, help="encouragement bonus B (default 10)")
    _add_experiment(p)

    p = sub.add_parser("sweep", help="paired-seed sweep over C")
    _schedule_arg(p)
    p.add_argument("--c-list", type=_c_list, default=[1.0, 5.0, 10.0, 50.0], help="comma-separated C values (default 1,5,10,50)")
    p.add_argument("--bonus", type=float, default=10.0, help="encouragement bonus B (default 10)")
    _add_experiment(p)

    p = sub.add_parser("reproduce", help="CSV bundle and claim check for one figure")
    p.add_argument("--figure", type=int, choices=sorted(FIGURES), required=True)
    _add_experiment(p)
    p.add_argument("--teacher-episodes", type=_positive_int, default=20_000, help="teacher training episodes (default 20,000)")
    p.add_argument("--cache-dir", type=Path, default=Path.home() / ".cache" / "advshape", help="teacher cache directory")

    p = sub.add_parser("verify", help="check plain Q-learning against value iteration")
    _add_learning(p, grid="3x3", episodes=50_000)
    return parser


def _params(args) -> LearningParams:
    try:
        return LearningParams(args.alpha, args.gamma, args.epsilon)
    except ValueError as exc:
        raise UsageError(str(exc))


def _config(args, schedule: Schedule) -> ExperimentConfig:
    return ExperimentConfig(
        grid=args.grid,
        params=_params(args),
        schedule=schedule,
        episodes=args.episodes,
        step_cap=args.step_cap,
        trials=args.trials,
        base_seed=args.seed,
        smoothing_window=args.window,
    )


def _load_teacher(args, schedule: Schedule):
    if not schedule.needs_teacher:
        return None
    if args.teacher is None:
        raise UsageError(f"--schedule {schedule.kind.value} needs --teacher")
    teacher = Teacher.load(args.teacher)
    teacher.check_grid(args.grid)
    return teacher


def cmd_train_advisor(args) -> int:
    params = _params(args)
    from .experiment import train_table

    q, out = train_table(args.grid, params, Schedule(), None, args.episodes, args.step_cap, args.seed)
    teacher = Teacher(q)
    teacher.save(args.out)
    tail = out.steps[-1000:]
    print(f"teacher saved to {args.out}")
    print(f"mean steps over final {len(tail)} episodes: {tail.mean():.3f}")
    return EXIT_OK


def cmd_run(args) -> int:
    schedule = Schedule(ScheduleKind(args.schedule), args.c, args.bonus)
    cfg = _config(args, schedule)
    teacher = _load_teacher(args, schedule)
    curve = run_experiment(cfg, teacher, args.out, jobs=args.jobs)
    e, f = early_range(cfg.episodes), final_range(cfg.episodes)
    print(f"wrote {cfg.trials} trial CSVs and aggregated.csv to {args.out}")
    print(f"mean steps, episodes {e[0]}-{e[1]}: {range_mean(curve, *e):.3f}")
    print(f"mean steps, episodes {f[0]}-{f[1]}: {range_mean(curve, *f):.3f}")
    return EXIT_OK


def _summary_ranges(n):
    return [first_range(n), early_range(n), final_range(n)]


def cmd_sweep(args) -> int:
    schedule = Schedule(ScheduleKind(args.schedule), 0.0, args.bonus)
    cfg = _config(args, schedule)
    teacher = _load_teacher(args, schedule)
    curves = sweep(cfg, args.c_list, teacher, args.out, jobs=args.jobs)
    named = {f"c={c:g}": curve for c, curve in curves.items()}
    rows = compare(named, _summary_ranges(cfg.episodes))
    write_summary_csv(args.out / "summary.csv", rows)
    for r in rows:
        print(f"{r.name:>10} [{r.range_start},{r.range_end}) mean {r.mean_steps:.3f} std {r.std_steps:.3f}")
    return EXIT_OK


def _cached_teacher(args, cfg: ExperimentConfig) -> Teacher:
    p = cfg.params
    key = (
        f"teacher_{cfg.grid}_e{args.teacher_episodes}_a{p.alpha:g}_g{p.gamma:g}"
        f"_eps{p.epsilon:g}_cap{cfg.step_cap}_s{cfg.teacher_seed}.csv"
    )
    path = args.cache_dir / key
    if path.exists():
        return Teacher.load(path)
    teacher = train_teacher(cfg.grid, p, args.teacher_episodes, cfg.teacher_seed, cfg.step_cap)
    try:
        args.cache_dir.mkdir(parents=True, exist_ok=True)
        teacher.save(path)
    except OSError as exc:
        raise ExperimentIOError(f"could not write teacher cache {path}: {exc}") from exc
    return teacher


def cmd_reproduce(args) -> int:
    fig = FIGURES[args.figure]
    base_cfg = _config(args, Schedule())
    if args.teacher is not None:
        teacher = Teacher.load(args.teacher)
        teacher.check_grid(args.grid)
    else:
        teacher = _cached_teacher(args, base_cfg)
    out = args.out
    baseline = run_experiment(base_cfg, None, out / "baseline", jobs=args.jobs)
    student_cfg = replace(base_cfg, schedule=Schedule(fig.kind, fig.c_values[0]))
    curves = sweep(student_cfg, fig.c_values, teacher, out / fig.kind.value, jobs=args.jobs)
    named = {"baseline": baseline}
    named.update({f"{fig.kind.value}_c={c:g}": curve for c, curve in curves.items()})
    write_summary_csv(out / "summary.csv", compare(named, _summary_ranges(base_cfg.episodes)))
    if fig.is_sweep:
        result = fig.claim(curves)
    else:
        result = fig.claim(baseline, curves[fig.c_values[0]])
    verdict = "PASS" if result.passed else "FAIL"
    text = f"figure {fig.number}: {fig.title}\n{result.detail}\n{verdict}\n"
    try:
        (out / "claim.txt").write_text(text, encoding="ascii")
    except OSError as exc:
        raise ExperimentIOError(f"could not write {out / 'claim.txt'}: {exc}") from exc
    print(text, end="")
    return EXIT_OK if result.passed else EXIT_VERIFY


def cmd_verify(args) -> int:
    if args.grid.n_cells > MAX_VERIFY_CELLS:
        raise UsageError(
            f"grid {args.grid} has {args.grid.n_cells} cells; exact verification allows at most {MAX_VERIFY_CELLS}"
        )
    report = oracle_report(args.grid, _params(args), args.episodes, args.seed, args.step_cap)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_VERIFY


COMMANDS = {
    "train-advisor": cmd_train_advisor,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, TeacherMismatch, QTableFormatError, ValueError) as exc:
        print(f"advshape {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"advshape {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
