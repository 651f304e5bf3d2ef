"""Distances between atomic measures on the half-line with the Hu metric.

Shows the exact Prohorov distance with its min-cut certificate, the
finite-measure distance, and how the vague distance sees a point drifting
towards the forbidden set 0.
"""
import numpy as np

from vaguemeasures import DiscreteMeasure, GroundSpace, finite_measure_dist, prohorov, vague_dist

H = GroundSpace.halfline()

mu = DiscreteMeasure(H, np.array([[0.5], [2.0]]), [0.5, 0.5])
nu = DiscreteMeasure(H, np.array([[0.55], [3.0]]), [0.5, 0.5])
value, cert = prohorov(mu, nu, certificate=True)
print(f"prohorov = {value:.6f}, witness atoms {cert.witness}, deficiency {cert.deficiency_value:.3g}")
print(f"rho_hat(2 mu, nu) = {finite_measure_dist(mu.scale(2), nu):.6f}")

# delta_{1/n} leaves every K_m, so it tends to the null measure
zero = DiscreteMeasure.zero(H)
for n in (1, 2, 4, 16, 64, 256):
    d, bound = vague_dist(DiscreteMeasure.dirac(H, 1.0 / n), zero, tol=1e-6)
    print(f"n = {n:4d}: rho~(delta_1/n, 0) = {d:.6f} (+ at most {bound:.1e})")
