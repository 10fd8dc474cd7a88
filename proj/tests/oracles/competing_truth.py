"""Cause-specific C/D AUC truth for M ~ N(0,1), cause-1 hazard exp(M),
cause-2 hazard 1, at t = 0.4. Cases: event of the cause by t; controls:
event-free at t. Quadrature on a fine marker grid."""
import numpy as np
from scipy.stats import norm

m = np.linspace(-8, 8, 200001)
f = norm.pdf(m)
t = 0.4
lam1 = np.exp(m)
total = lam1 + 1.0
surv = f * np.exp(-total * t)
surv /= surv.sum()
below = np.cumsum(surv) - surv / 2  # P(control marker < m), ties halved

for cause, lam in ((1, lam1), (2, np.ones_like(m))):
    case = f * lam / total * (1 - np.exp(-total * t))
    case /= case.sum()
    print(f"cause {cause}: {np.sum(case * below):.6f}")
