"""How the fractional order reshapes the loss landscape.

Sweeps the true-class probability for a few orders and prints the loss value
and the target-class gradient.  Two things to watch:

  * at mu = 0 the landscape is cross-entropy plus MAE: huge penalties and
    gradients on hard samples (small p), tiny ones on easy samples;
  * as mu -> 1 the hard-sample penalty flattens toward the constant shifted
    MAE while the penalty on easy samples grows, which is exactly the
    trade-off that makes the order learnable.
"""

import numpy as np

from fracloss import losses

ORDERS = (0.0, 0.25, 0.5, 0.75, 1.0)
P_VALUES = (0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99)
K = 10


def vector(p_y):
    p = np.full(K, (1.0 - p_y) / (K - 1))
    p[0] = p_y
    return p


print("loss value (fcl):")
print("  p_y    " + "".join(f"mu={m:<8}" for m in ORDERS))
for p_y in P_VALUES:
    row = [losses.fcl(vector(p_y), 0, mu).value for mu in ORDERS]
    print(f"  {p_y:<6} " + "".join(f"{v:<11.4f}" for v in row))

print("\ntarget-class gradient (fcl):")
print("  p_y    " + "".join(f"mu={m:<8}" for m in ORDERS))
for p_y in P_VALUES:
    row = [losses.fcl(vector(p_y), 0, mu).grad_p[0] for mu in ORDERS]
    print(f"  {p_y:<6} " + "".join(f"{v:<11.3f}" for v in row))

print("\ncrossing property at the extremes:")
hard, easy = vector(0.01), vector(0.9)
print(f"  hard sample (p=0.01): mu=0 -> {losses.fce(hard, 0, 0.0).value:.3f}, "
      f"mu=1 -> {losses.fce(hard, 0, 1.0).value:.3f}  (cheaper at mu=1)")
print(f"  easy sample (p=0.90): mu=0 -> {losses.fce(easy, 0, 0.0).value:.3f}, "
      f"mu=1 -> {losses.fce(easy, 0, 1.0).value:.3f}  (dearer at mu=1)")

print("\norder gradient (drives learning of mu): positive on easy samples, "
      "negative on hard ones")
for p_y in (0.05, 0.3, 0.9):
    g = losses.fcl(vector(p_y), 0, 0.5).grad_mu
    print(f"  p_y={p_y:<5} grad_mu={g:+.4f}")
