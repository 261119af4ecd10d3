# coding: utf-8

# # A surface where the radius form is twice its tail version
#
# The map squares the distance to the rim and doubles the angle. Every orbit
# drifts to the rim circle, but the origin stays put, so points near the origin
# separate from it by up to about 2 early on and only by 1 late in the orbit.

# In[1]:

import numpy as np

from lyapnum import zoo
from lyapnum.estimators import EstimatorConfig, estimate_all
from lyapnum.report import theorem_checks

spec = zoo.make_surface_prop51()
cfg = EstimatorConfig.preset("smoke", base_count=10)

# In[2]:

# 1 - g(r) = (1 - r)**2, so the gap to the rim squares at every step
r = np.array([0.1, 0.5, 0.9])
for n in range(4):
    print(n, np.round(1.0 - r, 6))
    r = zoo.surface_radial(r)

# In[3]:

rep = estimate_all(spec, cfg)
print("L1..L4:", np.round(rep.values, 4))
print("L1 / L3 =", round(rep.L1 / rep.L3, 4))
print("minimizer (r, phi):", rep.minimizers["L1"]["coords"])

# In[4]:

# the sampled diameter sits well above sqrt(17)/2: the rim point at angle pi
# and the hump near r = 0.55 at angle 0 are about 2.51 apart
print("sampled diameter:", round(rep.diameter, 4), " sqrt(17)/2:", round(np.sqrt(17) / 2, 4))

for row in theorem_checks(rep, spec.flags):
    print(f"{row.theorem_id:10s} {row.relation:10s} {row.verdict}")
