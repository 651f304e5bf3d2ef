"""Run the four convergence checkers on every built-in sequence.

Each sequence comes with its known answer; the checkers (test functions,
Portmanteau sets, point matching and the vague metric) should agree with it
and with each other.
"""
from vaguemeasures import CATALOGUE, EXTRA_SEQUENCES, catalogue_entry, cross_validate

for name in (*CATALOGUE, *EXTRA_SEQUENCES):
    seq, expected = catalogue_entry(name)
    report = cross_validate(seq, n_grid=(10, 100, 1000, 10000), tol=1e-3)
    verdicts = " ".join(f"{k}={v}" for k, v in report.applicable.items())
    flag = "ok" if report.status == expected and report.agree else "MISMATCH"
    print(f"{name:18s} expected {expected:5s} got {report.status:5s} [{flag}]  {verdicts}")
