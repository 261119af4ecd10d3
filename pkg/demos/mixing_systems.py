# coding: utf-8

# # Weakly mixing examples reach the diameter

# In[1]:

from fractions import Fraction

import numpy as np

from lyapnum import zoo
from lyapnum.estimators import EstimatorConfig, estimate_all

cfg = EstimatorConfig.preset("smoke")

# In[2]:

rows = []
for name in ("tent", "doubling", "full_shift:2", "product:tent,tent"):
    spec = zoo.resolve(name, horizon=cfg.horizon)
    rep = estimate_all(spec, cfg)
    rows.append((name, rep.diameter, *rep.values))
    print(f"{name:18s} diam={rep.diameter:.4f}  L=" + " ".join(f"{v:.4f}" for v in rep.values))

# In[3]:

# ratio of each number to the diameter
table = np.array([r[1:] for r in rows])
print(np.round(table[:, 1:] / table[:, :1], 3))

# In[4]:

# the doubling orbit of 1/3 alternates between 1/3 and 2/3 forever, yet a
# neighbour 1e-6 away is pushed out to order one within about twenty steps
circ = zoo.make_doubling_circle(horizon=64).system
x = circ.point(Fraction(1, 3))
y = circ.point(Fraction(1, 3) + Fraction(1, 10 ** 6))
gaps = []
for n in range(30):
    gaps.append(circ.metric(x, y)[0])
    x, y = circ.map_eval(x), circ.map_eval(y)
print(np.round(gaps, 4))
