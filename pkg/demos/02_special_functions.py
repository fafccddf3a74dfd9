"""The gamma/digamma layer under the loss, and its slow product-form oracle.

The loss normalizer only needs gamma on [1, 2] and digamma next to it, but
the functions are exposed on (0, 20] so their recurrences can be checked.
The infinite-product form converges like z**2 / (2n), which is why it serves
as a cross-check oracle rather than as the production path.
"""

import math

from fracloss import specialfn

print("factorials via gamma:")
for n in range(0, 8):
    print(f"  gamma({n + 1}) = {specialfn.gamma(n + 1.0):.1f}  (= {n}!)")

print(f"\ngamma(1.5) = {specialfn.gamma(1.5):.15f}")
print(f"sqrt(pi)/2 = {math.sqrt(math.pi) / 2:.15f}")

print(f"\ndigamma(1) = {specialfn.digamma(1.0):.12f} (negative Euler-Mascheroni constant)")
print(f"digamma(2) = {specialfn.digamma(2.0):.12f} (adds 1/1)")

print("\nproduct-form convergence at z = 1.5:")
target = specialfn.gamma(1.5)
for terms in (10**2, 10**3, 10**4, 10**5, 10**6):
    res = specialfn.gamma_weierstrass_bounded(1.5, terms)
    actual = abs(res.value - target)
    print(f"  {terms:>9} terms: value={res.value:.10f}  |error|={actual:.2e}  "
          f"bound={res.absolute_error_bound:.2e}")

print("\nrecurrence gamma(z+1) = z * gamma(z) on a few points:")
for z in (0.5, 1.25, 3.0, 9.5):
    lhs = specialfn.gamma(z + 1.0)
    rhs = z * specialfn.gamma(z)
    print(f"  z={z:<5} lhs={lhs:.12g} rhs={rhs:.12g} rel diff={abs(lhs - rhs) / lhs:.1e}")
