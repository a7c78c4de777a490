import json
import subprocess
import sys

import pytest

from homotiles.cli import UsageError, main, parse_group, parse_set, render, run_suite

Z27 = '{"family": "pn", "p": 3, "n": 3}'
Z4Z2 = '{"family": "pnp", "p": 2, "n": 2}'
Z4Z3 = '{"family": "pnq", "p": 2, "n": 2, "q": 3}'
EXAMPLE_27 = "[0, 4, 8, 9, 13, 17, 18, 22, 26]"
W = "[[0, 0], [1, 0], [0, 1], [3, 1]]"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_example_27(capsys):
    code, out, _ = run(capsys, "analyze", "--group", Z27, "--set", EXAMPLE_27, "--jobs", "1")
    d = json.loads(out)
    assert code == 0
    assert d["homogeneous"] and d["branch_levels"] == [0, 2]
    assert d["tile"] and d["classification"] == {"branch_levels": [0, 2]}
    assert d["cm"]["T1"]["passed"] and d["cm"]["guaranteed"]


def test_analyze_worked_pnp_example(capsys):
    code, out, _ = run(capsys, "analyze", "--group", Z4Z2, "--set", W)
    d = json.loads(out)
    assert code == 0 and d["tile"] and d["I_omega"] == [1]
    assert d["classification"]["case"] == 2
    assert d["complement_count"] >= 1 and len(d["complement"]) == 2


def test_analyze_pnq_uses_cyclic_form(capsys):
    code, out, _ = run(capsys, "analyze", "--group", Z4Z3, "--set", "[[0, 0], [1, 1]]")
    d = json.loads(out)
    assert code == 0 and d["tile"] and "cm" in d and d["classification"]["case"] in (1, 2)


def test_analyze_non_tile(capsys):
    code, out, _ = run(capsys, "analyze", "--group", '{"family": "pn", "p": 2, "n": 3}', "--set", "[0, 1, 2, 4]")
    d = json.loads(out)
    assert code == 0 and not d["tile"] and not d["homogeneous"] and d["mixed_at"]["level"] == 1


def test_analyze_output_is_deterministic(capsys):
    outs = {run(capsys, "analyze", "--group", Z4Z2, "--set", W)[1] for _ in range(3)}
    assert len(outs) == 1


def test_analyze_text_format(capsys):
    code, out, _ = run(capsys, "analyze", "--group", Z27, "--set", EXAMPLE_27, "--format", "text")
    assert code == 0 and "branch_levels" in out


def test_elements_are_reduced():
    G = parse_group(Z27)
    assert parse_set(G, "[99, -1]") == parse_set(G, "[18, 26]")


def test_analyze_reads_files(capsys, tmp_path):
    g, s = tmp_path / "g.json", tmp_path / "s.json"
    g.write_text(Z27)
    s.write_text(EXAMPLE_27)
    code, out, _ = run(capsys, "analyze", "--group", str(g), "--set", str(s))
    assert code == 0 and json.loads(out)["tile"]


@pytest.mark.parametrize("argv, needle", [
    (["analyze", "--group", "{bad", "--set", "[0]"], "line 1 column 2"),
    (["analyze", "--group", Z27, "--set", "[]"], "empty"),
    (["analyze", "--group", Z27, "--set", '["a"]'], "--set"),
    (["analyze", "--group", Z4Z2, "--set", "[[0, 0, 1]]"], "--set"),
    (["analyze", "--group", '{"family": "pn", "p": 4, "n": 2}', "--set", "[0]"], "--group"),
    (["analyze", "--group", '{"p": 2}', "--set", "[0]"], "--group"),
    (["render", "--group", Z4Z3, "--set", "[[0, 0]]"], "tree rendering"),
    (["enumerate", "--group", Z27], "--size"),
])
def test_usage_errors_exit_1(capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == 1 and needle in err


def test_argparse_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--group", Z27, "--set", "[0]", "--jobs", "0"])
    assert exc.value.code == 1


def test_analyze_budget_exit_2(capsys):
    code, out, err = run(capsys, "analyze", "--group", '{"family": "pn", "p": 2, "n": 4}', "--set", "[0, 1]", "--budget", "2")
    d = json.loads(out)
    assert code == 2 and d["incomplete"]


def test_enumerate_small(capsys):
    code, out, _ = run(capsys, "enumerate", "--group", Z4Z2, "--size", "4", "--jobs", "1")
    lines = [json.loads(l) for l in out.splitlines()]
    summary = lines[-1]["summary"]
    assert code == 0 and summary["complete"] and summary["falsifications"] == 0
    assert summary["tiles"] == len(lines) - 1 == sum(summary["cases"].values())
    assert any(e["omega"] == sorted(json.loads(W)) and e["report"]["case"] == 2 for e in lines[:-1])


def test_enumerate_parallel_matches_serial(capsys):
    a = run(capsys, "enumerate", "--group", Z4Z3, "--size", "4", "--jobs", "1")[1]
    b = run(capsys, "enumerate", "--group", Z4Z3, "--size", "4", "--jobs", "2")[1]
    assert a == b


def test_enumerate_budget_exit_2(capsys):
    code, out, _ = run(capsys, "enumerate", "--group", Z27, "--size", "9", "--budget", "1000")
    d = json.loads(out)["summary"]
    assert code == 2 and not d["complete"] and d["candidates"] == 1562275


def test_render_example_27(capsys):
    code, out, _ = run(capsys, "render", "--group", Z27, "--set", EXAMPLE_27)
    assert code == 0 and out.startswith("digraph")
    assert out.count("->") == 3 + 3 + 9 and out.count("style=bold") == 12
    code, out, _ = run(capsys, "render", "--group", Z27, "--set", EXAMPLE_27, "--format", "text")
    assert out.startswith("root") and out.count("*") == 12


def test_render_pnp_cases():
    G = parse_group(Z4Z2)
    assert "slice0" in render(G, parse_set(G, W))
    case3 = render(G, parse_set(G, "[[0, 0], [0, 1]]"))
    assert "sheared" in case3 and "color=" in case3
    assert "projection" in render(G, parse_set(G, "[[0, 0], [1, 0]]"))
    with pytest.raises(UsageError):
        render(G, parse_set(G, "[[0, 0], [1, 0], [2, 0]]"))


def test_validate_concordance_suite():
    out, ok = run_suite("concordance", jobs=1, seed=3, probes=50)
    assert ok and all(r["probes"] == 50 and r["disagreements"] == 0 for r in out["runs"])


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "homotiles.cli", "analyze", "--group", Z4Z2, "--set", W],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["tile"]
