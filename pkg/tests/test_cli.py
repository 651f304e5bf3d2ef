import json
import shutil
from pathlib import Path

import pytest

from vaguemeasures import acceptance
from vaguemeasures.cli import ConfigError, compile_formula, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(tmp_path, command, config, *extra):
    out = tmp_path / "out"
    code = main([command, "--config", str(config), "--out", str(out), *extra])
    return code, out


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return path


def with_measures(tmp_path):
    shutil.copytree(CONFIGS / "measures", tmp_path / "measures")


def test_dist_prohorov(tmp_path):
    code, out = run(tmp_path, "dist", CONFIGS / "dist_prohorov.json")
    report = json.loads((out / "dist.json").read_text())
    assert code == 0
    assert report["prohorov"]["value"] == pytest.approx(0.3, abs=1e-12)
    assert report["rho_tilde"]["error_bound"] <= 1e-6


def test_dist_identical(tmp_path):
    code, out = run(tmp_path, "dist", CONFIGS / "dist_identical.json")
    report = json.loads((out / "dist.json").read_text())
    assert code == 0
    assert report["prohorov"]["value"] == report["rho_hat"]["value"] == report["rho_tilde"]["value"] == 0


@pytest.mark.parametrize("name,expected", [
    ("converge_delta_shift.json", 0), ("converge_escape.json", 1), ("converge_inline.json", 0),
])
def test_converge_configs(tmp_path, name, expected):
    code, out = run(tmp_path, "converge", CONFIGS / name)
    assert code == expected
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["agree"] is True
    assert (out / "gaps.csv").read_text().startswith("probe_id,n,value,limit,gap")


def test_simulate_and_seed_override(tmp_path):
    code, out = run(tmp_path, "simulate", CONFIGS / "simulate_poisson.json")
    first = (out / "simulate.json").read_text()
    assert code == 0 and json.loads(first)["seed"] == 2024
    code, out = run(tmp_path, "simulate", CONFIGS / "simulate_poisson.json", "--seed", "7")
    assert code == 0 and json.loads((out / "simulate.json").read_text())["seed"] == 7


def test_laplace_canonical_and_mismatched(tmp_path):
    code, out = run(tmp_path, "laplace", CONFIGS / "laplace_extremes_poisson.json")
    report = json.loads((out / "laplace.json").read_text())
    assert code == 0 and report["verdict"] == "pass"
    assert "consistent with convergence" in report["statement"] and report["caveat"]
    assert (out / "laplace.csv").read_text().startswith("f_id,n,estimate,stderr,exact,z")
    code, _ = run(tmp_path, "laplace", CONFIGS / "laplace_mismatched.json")
    assert code == 1


def test_determinism(tmp_path):
    outputs = []
    for i in range(2):
        out = tmp_path / f"o{i}"
        for command, config in (("converge", "converge_inline.json"), ("laplace", "laplace_mismatched.json"),
                                ("simulate", "simulate_poisson.json")):
            main([command, "--config", str(CONFIGS / config), "--out", str(out)])
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outputs[0] == outputs[1] and len(outputs[0]) == 6


def test_config_errors_exit_2(tmp_path, capsys):
    with_measures(tmp_path)
    cases = [
        write(tmp_path, "bad.json", "{not json"),
        write(tmp_path, "tol.json", {"sequence": {"catalogue": "escape"}, "n_grid": [10], "tol": 0}),
        write(tmp_path, "extra.json", {"sequence": {"catalogue": "escape"}, "n_grid": [10], "tol": 0.1,
                                       "colour": "red"}),
        write(tmp_path, "cat.json", {"sequence": {"catalogue": "nope"}, "n_grid": [10], "tol": 0.1}),
    ]
    for path in cases:
        code, _ = run(tmp_path, "converge", path)
        assert code == 2
    laplace = json.loads((CONFIGS / "laplace_mismatched.json").read_text())
    del laplace["seed"]
    code, _ = run(tmp_path, "laplace", write(tmp_path, "noseed.json", laplace))
    assert code == 2
    neg = {"mu": {"space": {"kind": "euclidean", "dim": 1}, "atoms": [{"x": [0.0], "w": -1}]},
           "nu": "measures/delta0.json"}
    code, _ = run(tmp_path, "dist", write(tmp_path, "neg.json", neg))
    assert code == 2
    assert "config.mu.atoms[0].w" in capsys.readouterr().err


def test_size_cap_and_space_mismatch(tmp_path):
    with_measures(tmp_path)
    big = {"space": {"kind": "euclidean", "dim": 1},
           "atoms": [{"x": [i / 7.0], "w": 1e-4} for i in range(10_001)]}
    code, _ = run(tmp_path, "dist", write(tmp_path, "big.json", {"mu": big, "nu": "measures/delta0.json"}))
    assert code == 3
    code, _ = run(tmp_path, "dist", write(tmp_path, "mix.json", {"mu": "measures/delta0.json",
                                                                 "nu": "measures/delta_halfline.json"}))
    assert code == 4


def test_inconclusive_exit(tmp_path):
    # at n = 10 and 11 the gap 1/n sits between tol and 10 tol
    cfg = {"sequence": {"space": {"kind": "euclidean", "dim": 1}, "atoms": [{"x": "1 + 1/n"}],
                        "limit": {"space": {"kind": "euclidean", "dim": 1}, "atoms": [{"x": 1.0}]}},
           "regions": [{"type": "interval", "lo": 0.0, "hi": 3.0}],
           "n_grid": [10], "tol": 0.05}
    code, out = run(tmp_path, "converge", write(tmp_path, "slow.json", cfg))
    assert code == 5


def test_formula_evaluator():
    f = compile_formula("sqrt(n) + 2**-1 + max(n, 3) % 2", "x")
    assert f(4) == pytest.approx(2 + 0.5 + 0)
    assert compile_formula(1.5, "x")(10) == 1.5
    for bad in ("__import__('os')", "n.real", "[n]", "open('f')", "1/0 if n else 1", "n +"):
        with pytest.raises(ConfigError):
            compile_formula(bad, "x")(1)


def test_selftest_reports_and_fault_injection(tmp_path, monkeypatch, capsys):
    # the full suite runs in test_acceptance; here the command wiring on a fast subset
    fast = {5: acceptance.criterion_approximants, 3: acceptance.criterion_boundedness}
    monkeypatch.setattr(acceptance, "CRITERIA", fast)
    out = tmp_path / "s"
    assert main(["selftest", "--out", str(out)]) == 0
    first = (out / "selftest.json").read_bytes()
    assert main(["selftest", "--out", str(out)]) == 0
    assert (out / "selftest.json").read_bytes() == first
    assert main(["selftest", "--out", str(out), "--debug-corrupt-bump"]) == 1
    lines = capsys.readouterr().out.splitlines()
    assert any(line.startswith("[FAIL] 5.") for line in lines)
    report = json.loads((out / "selftest.json").read_text())
    assert [r["passed"] for r in report] == [False, True]


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "vaguemeasures", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "selftest" in proc.stdout
