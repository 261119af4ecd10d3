# coding: utf-8

# # An irrational rotation: every number shrinks with delta

# In[1]:

import numpy as np

from lyapnum import zoo
from lyapnum.estimators import EstimatorConfig, eq_region_probe, estimate_all, return_time_gaps

golden = (np.sqrt(5.0) - 1.0) / 2.0
spec = zoo.make_rotation(golden)
cfg = EstimatorConfig.preset("smoke")

# In[2]:

rep = estimate_all(spec, cfg)
for key, curve in rep.curves.items():
    # rotations are isometries, so each ratio to delta stays below 2
    print(key, np.round(curve.estimates / curve.deltas, 3))

# In[3]:

probe = eq_region_probe(spec, 0.05, cfg)
print("equicontinuity witness found:", probe.found, "value:", round(probe.value, 5))

# In[4]:

x = spec.system.point(0.0)
stats = return_time_gaps(spec, x, x, 0.05, 5000)
print(f"visits={stats.visit_count} max gap={stats.max_gap} mean gap={stats.mean_gap:.2f}")
