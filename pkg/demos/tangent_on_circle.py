"""Local PCA on the unit circle, next to what the theory certifies.

Samples 2000 points, estimates tangent lines with radius 0.3 and compares
them with the true tangents.  Then asks the bounds module what radius and
sample size Theorem-A-style conditions would need for a 0.1 rad guarantee.

    python3 demos/tangent_on_circle.py
"""

import math

import numpy as np

from manifold_lens import DensityModel, EstimatorParams, NoiseModel, batch_estimate, sample, sphere_model
from manifold_lens.bounds import BoundInputs, solve_m, theorem_conditions

circle = sphere_model(1, 2)
cloud = sample(circle, DensityModel(), NoiseModel(), 2000, seed=42)
result = batch_estimate(cloud, EstimatorParams(r=0.3, k=1))

angles = np.array([e.angle for e in result.estimates])
print(f"points processed      {len(angles)}")
print(f"median angle (rad)    {np.median(angles):.4f}")
print(f"worst angle (rad)     {angles.max():.4f}")

phi = 1 / (2 * math.pi)
report = theorem_conditions(BoundInputs(tau=1.0, d=1, D=2, phi_min=phi, phi_max=phi, r=0.3, m=2000,
                                        theta=0.1))
print()
print(f"certified radius limit S1      {report.S1:.3e}")
print(f"radius 0.3 within limit        {report.radius_ok}")
at_limit = report.S2 / report.S1
print(f"m/log m needed at r = S1       {at_limit:.3e}")
print(f"smallest such m                {solve_m(at_limit):.3e}")
