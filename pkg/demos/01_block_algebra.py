"""Tour of the block algebra: norms, adjoints, functional calculus, powers.

The ambient algebra is a direct sum of full matrix blocks; every element
is a list of dense complex matrices. The operator norm is the largest
singular value across blocks, which satisfies the C*-identity
norm(x* x) = norm(x)^2.
"""

import numpy as np

from cstarflow import AlgebraElement, BlockShape, herm_calculus, identity, power
from cstarflow.sampling import random_element, random_hermitian, rng

shape = BlockShape([2, 3])
r = rng(42)

x = random_element(r, shape)
print("a random element of M_2 + M_3:")
print("  norm(x)       =", x.norm())
print("  norm(x* x)    =", (x.star() @ x).norm())
print("  norm(x)^2     =", x.norm() ** 2)
print("  C*-defect     =", abs((x.star() @ x).norm() - x.norm() ** 2))

# Hermitian functional calculus: apply any scalar function on the spectrum.
h = random_hermitian(r, shape, norm=2.0)
u = herm_calculus(h, lambda lam: np.exp(1j * lam))
one = identity(shape)
print("\nexp(iH) for a random Hermitian H:")
print("  unitarity defect =", (u.star() @ u - one).norm())

# Complex powers of strictly positive elements obey the group law.
t = herm_calculus(h, np.exp)
lhs = power(t, 0.3 + 0.4j) @ power(t, 0.7 - 0.4j)
print("\ncomplex powers of T = exp(H):")
print("  T^0 defect        =", (power(t, 0.0) - one).norm())
print("  group-law defect  =", (lhs - power(t, 1.0)).norm())

# The square root of a diagonal element is the entrywise square root.
d = AlgebraElement.from_blocks([np.diag([4.0, 9.0]), np.diag([1.0, 16.0, 25.0])])
print("\nsqrt(diag(4, 9) + diag(1, 16, 25)) blocks:")
for blk in power(d, 0.5).blocks:
    print(" ", np.real(np.diagonal(blk)))
