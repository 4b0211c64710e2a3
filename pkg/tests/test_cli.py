import subprocess
import sys

import pytest

from advshape.cli import main

FAST = ["--grid", "4x4", "--episodes", "200", "--step-cap", "300"]


def tree_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture
def teacher_file(tmp_path):
    path = tmp_path / "teacher.csv"
    assert main(["train-advisor", *FAST, "--seed", "3", "--out", str(path)]) == 0
    return path


def test_help_cites_paper_defaults():
    out = subprocess.run(
        [sys.executable, "-m", "advshape", "train-advisor", "--help"], capture_output=True, text=True
    ).stdout
    assert "default 0.1" in out and "default 1.0" in out and "20,000" in out
    out = subprocess.run([sys.executable, "-m", "advshape", "run", "--help"], capture_output=True, text=True).stdout
    assert "C (default 10)" in out


def test_train_advisor_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["train-advisor", *FAST, "--seed", "5", "--out", str(a)]) == 0
    assert main(["train-advisor", *FAST, "--seed", "5", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "4,4,4"
    assert "final 200 episodes" in capsys.readouterr().out


def test_train_advisor_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["train-advisor", "--episodes", "0", "--out", str(tmp_path / "t.csv")])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["train-advisor", "--grid", "1x9", "--out", str(tmp_path / "t.csv")])
    assert exc.value.code == 1


def test_train_advisor_unwritable(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert main(["train-advisor", *FAST, "--out", str(blocker / "t.csv")]) == 3


def test_run_none_ignores_teacher(tmp_path):
    args = ["run", "--schedule", "none", *FAST, "--trials", "2"]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--teacher", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "b")]) == 0
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


def test_run_cont_zero_equals_none(tmp_path, teacher_file):
    common = [*FAST, "--trials", "2", "--seed", "9"]
    assert main(["run", "--schedule", "none", *common, "--out", str(tmp_path / "none")]) == 0
    assert main(
        ["run", "--schedule", "cont", "--c", "0", "--teacher", str(teacher_file), *common, "--out", str(tmp_path / "cont")]
    ) == 0
    assert tree_bytes(tmp_path / "none") == tree_bytes(tmp_path / "cont")


def test_run_teacher_errors(tmp_path, teacher_file):
    out = str(tmp_path / "o")
    assert main(["run", "--schedule", "sub", *FAST, "--out", out]) == 1
    assert main(["run", "--schedule", "sub", "--grid", "5x5", "--teacher", str(teacher_file), "--out", out]) == 1
    assert main(["run", "--schedule", "sub", *FAST, "--teacher", str(tmp_path / "nope.csv"), "--out", out]) == 3


def test_run_malformed_teacher_reports_line(tmp_path, teacher_file, capsys):
    lines = teacher_file.read_text().splitlines()
    lines[10] = "9,oops,0,0,0"
    teacher_file.write_text("\n".join(lines) + "\n")
    rc = main(["run", "--schedule", "sub", *FAST, "--teacher", str(teacher_file), "--out", str(tmp_path / "o")])
    assert rc == 1
    assert ":11:" in capsys.readouterr().err


def test_sweep_single_c_equals_run(tmp_path, teacher_file):
    common = [*FAST, "--trials", "2", "--teacher", str(teacher_file)]
    assert main(["sweep", "--schedule", "anti", "--c-list", "10", *common, "--out", str(tmp_path / "sw")]) == 0
    assert main(["run", "--schedule", "anti", "--c", "10", *common, "--out", str(tmp_path / "run")]) == 0
    assert tree_bytes(tmp_path / "sw" / "c_10") == tree_bytes(tmp_path / "run")
    assert (tmp_path / "sw" / "summary.csv").exists()


def test_sweep_four_values(tmp_path, teacher_file):
    args = ["sweep", "--schedule", "sub", "--c-list", "1,5,10,50", *FAST, "--trials", "2",
            "--teacher", str(teacher_file), "--out", str(tmp_path)]
    assert main(args) == 0
    assert sorted(p.name for p in tmp_path.iterdir() if p.is_dir()) == ["c_1", "c_10", "c_5", "c_50"]
    summary = (tmp_path / "summary.csv").read_text().splitlines()
    assert summary[0] == "name,range_start,range_end,mean_steps,std_steps,delta_vs_baseline"
    assert len(summary) == 1 + 4 * 3


def test_sweep_empty_list_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--schedule", "sub", "--c-list", "", "--out", str(tmp_path)])
    assert exc.value.code == 1


@pytest.mark.parametrize("figure,subdir,cs", [(1, "sub", ["c_10"]), (4, "enc", ["c_10"]), (5, "anti", ["c_1", "c_10", "c_5", "c_50"])])
def test_reproduce_bundles(tmp_path, figure, subdir, cs):
    args = ["reproduce", "--figure", str(figure), *FAST, "--trials", "2", "--teacher-episodes", "200",
            "--cache-dir", str(tmp_path / "cache"), "--out", str(tmp_path / "out")]
    rc = main(args)
    assert rc in (0, 2)
    out = tmp_path / "out"
    assert (out / "baseline" / "aggregated.csv").exists()
    assert sorted(p.name for p in (out / subdir).iterdir()) == cs
    claim = (out / "claim.txt").read_text().splitlines()
    assert claim[0].startswith(f"figure {figure}:")
    assert claim[-1] == ("PASS" if rc == 0 else "FAIL")
    assert len(list((tmp_path / "cache").iterdir())) == 1


def test_reproduce_reuses_cache(tmp_path):
    args = ["reproduce", "--figure", "2", *FAST, "--trials", "2", "--teacher-episodes", "200",
            "--cache-dir", str(tmp_path / "cache")]
    main([*args, "--out", str(tmp_path / "a")])
    cached = next((tmp_path / "cache").iterdir())
    stamp = cached.stat().st_mtime_ns
    main([*args, "--out", str(tmp_path / "b")])
    assert cached.stat().st_mtime_ns == stamp
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


def test_verify_2x2(capsys):
    assert main(["verify", "--grid", "2x2"]) == 0
    out = capsys.readouterr().out
    assert "policy agreement: 100.00%" in out and out.strip().endswith("PASS")


def test_verify_cap(tmp_path, capsys):
    assert main(["verify", "--grid", "7x6"]) == 1
    captured = capsys.readouterr()
    assert "at most 36" in captured.err and captured.out == ""


def test_verify_failure_exit_code():
    # far too little training for a 4x4 grid
    assert main(["verify", "--grid", "4x4", "--episodes", "5"]) == 2
