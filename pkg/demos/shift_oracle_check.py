# coding: utf-8

# # Exact values on the full shift against the sampled estimator

# In[1]:

from lyapnum.estimators import EstimatorConfig
from lyapnum.shift_oracle import exact_L_estimates, format_exact, oracle_vs_estimator

print("closed form :", format_exact(exact_L_estimates(2, 2, 12, 8)))
print("enumeration :", format_exact(exact_L_estimates(2, 2, 12, 8, method="enumerate")))

# In[2]:

# deep cylinders with a short horizon cannot separate yet
for m in (4, 8, 12):
    print(f"m={m:2d} N=6:", format_exact(exact_L_estimates(2, m, m + 7, 6)))

# In[3]:

# the smoke preset uses fewer than 64 neighbours, which the comparison flags

cmp = oracle_vs_estimator(2, EstimatorConfig.preset("smoke"))
print("depth", cmp.m, "exact", format_exact(cmp.exact), "estimated", cmp.estimated)
print("largest gap:", cmp.max_gap, "undersampled:", cmp.undersampled)
