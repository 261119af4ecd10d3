# coding: utf-8

# # Three-branch interval map: the fixed point 1/2 gives the smallest radius

# In[1]:

import numpy as np

from lyapnum import zoo
from lyapnum.estimators import EstimatorConfig, estimate_all
from lyapnum.metric_core import radius_f_finite

spec = zoo.make_three_branch()
x = np.linspace(0.0, 1.0, 7)
print(np.column_stack([x, zoo.three_branch_map(x)]))

# In[2]:

# 1/2 is fixed and its neighbours reach 0 or 1, so they never get more
# than 1/2 away; other centers see separations close to 1
for center in (0.5, 0.2, 0.0):
    v = radius_f_finite(spec.system, spec.system.point(center), 1e-3, 200, 400, 3)
    print(f"radius at {center:.1f}: {v:.4f}")

# In[3]:

rep = estimate_all(spec, EstimatorConfig.preset("smoke"))
print("L1..L4:", np.round(rep.values, 4))
print("L1 attained at x =", rep.minimizers["L1"]["coords"][0])
