"""Rescaled Pareto samples converge to a Poisson process: the Laplace route.

The empirical measure of X_i / n of n iid Pareto(1) variables converges in
distribution to the Poisson process with intensity x^-2 dx on (0, inf). Both
sides have exact Laplace functionals, so the Monte Carlo z-scores can be
compared with the exact gap.
"""
from vaguemeasures import (
    extremes_model,
    lipschitz_battery,
    poisson_model,
    test_convergence_in_distribution,
)
from vaguemeasures.boundedness import GroundSpace

H = GroundSpace.halfline()
battery = lipschitz_battery(H, 8, seed=8)
target = poisson_model(1.0, 1.0)

for n in (10, 100, 1000, 10_000):
    model = extremes_model(n, 1.0)
    gaps = [abs(model.laplace_exact(f) - target.laplace_exact(f)) for f in battery]
    print(f"n = {n:6d}: largest exact Laplace gap {max(gaps):.2e}")

report = test_convergence_in_distribution(lambda n: extremes_model(n, 1.0), target, battery,
                                          (100, 1000, 10_000), reps=10_000, seed=8)
print(f"verdict {report.verdict}, max |z| at n = 10^4: {report.final_max_z():.2f}")
print(report.caveat)

control = test_convergence_in_distribution(lambda n: poisson_model(2.0, 1.0), target, battery,
                                           (100, 1000), reps=2000, seed=9)
print(f"doubled intensity: verdict {control.verdict}, max |z| {control.final_max_z():.1f}")
