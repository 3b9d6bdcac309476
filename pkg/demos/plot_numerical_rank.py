"""
Numerical rank without a tolerance
==================================

The rank test looks at the elementary symmetric sums of the singular values
and reports, for each candidate kernel dimension m, a number a_m.  When
a_m < 1/9 there is a gap in the spectrum that separates n - m large singular
values from m small ones, and the threshold eps falls out of the test.
"""
import numpy as np

from multroot import numerical_rank

rng = np.random.default_rng(0)


def show(name, M):
    p = numerical_rank(M)
    print(name)
    print("  sigma", np.array2string(np.array(p.sigma), precision=3))
    for rec in p.records:
        mark = "*" if rec.a < 1 / 9 else " "
        print(f"  {mark} m={rec.m}  a={rec.a:.3g}")
    print(f"  rank {p.rank}, eps {p.epsilon:.3g}")


# %%
# A clear gap: three singular values near 1, two near 1e-7.
U, _ = np.linalg.qr(rng.normal(size=(5, 5)))
V, _ = np.linalg.qr(rng.normal(size=(5, 5)))
show("gap of 1e7", U @ np.diag([1.5, 1.2, 1.0, 2e-7, 1e-7]) @ V.T)

# %%
# The identity has no gap and keeps full rank, but a small multiple of it
# is read as numerically zero: the test for m = n compares the singular
# values with 1, so the absolute scale matters.
show("identity", np.eye(2))
show("0.01 * identity", 0.01 * np.eye(2))

# %%
# A spread spectrum without a real gap can still pass for m < n.
show("spectrum (10, 1)", np.diag([10.0, 1.0]))
