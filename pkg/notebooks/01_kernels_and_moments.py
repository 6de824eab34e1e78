# %% [markdown]
# Kernels, their moments, and how well a sum over the design imitates the integral.

# %%
import numpy as np

from fixedkern import EPANECHNIKOV, get_kernel
from fixedkern.averages import design_moment, moment_matrix
from fixedkern.kernels import analytic_moment, partial_moment, riemann_gap

for name in ("epanechnikov", "uniform", "triangular", "biweight"):
    k = get_kernel(name)
    print(f"{name:>12}: mu0={analytic_moment(k, 0):.4f} mu2={analytic_moment(k, 2):.4f} "
          f"right-half mu1={analytic_moment(k, 1, 'left'):.4f}")

# %% [markdown]
# At the left edge the window is cut in half, so s_0 drops to 1/2 and s_1 stops vanishing.

# %%
T, h = 2000, 0.1
for x in (0.0, 0.05, 0.1, 0.5):
    s = [design_moment(EPANECHNIKOV, T, x, h, j) for j in (0, 1, 2)]
    mu = [partial_moment(EPANECHNIKOV, j, -x / h, (1 - x) / h) for j in (0, 1, 2)]
    print(f"x={x:4.2f}  s={np.round(s, 5)}  limit={np.round(mu, 5)}")

# %% [markdown]
# The Riemann error falls like 1/T: T times the worst gap stays flat.

# %%
grid = np.linspace(0, 1, 201)
for T in (1_000, 10_000, 100_000):
    worst = max(riemann_gap(EPANECHNIKOV, T, x, h, 0) for x in grid)
    print(f"T={T:>6}  worst gap={worst:.2e}  T*gap={T * worst:.4f}")

# %% [markdown]
# The smallest eigenvalue of the 2x2 moment matrix is lowest at the boundary, near 0.0259.

# %%
for x in (0.0, 0.02, 0.1, 0.5):
    print(f"x={x:4.2f}  lambda_min={moment_matrix(EPANECHNIKOV, 50_000, x, 0.05).lambda_min:.5f}")
