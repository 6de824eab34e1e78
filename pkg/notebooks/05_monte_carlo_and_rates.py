# %% [markdown]
# A small Monte Carlo of trend and coefficient errors, then the empirical rate of the sup-norm.
# The full-size runs live in the acceptance suite; these sizes finish in under a minute.

# %%
from fixedkern import EPANECHNIKOV, mc_table1, verify_rate
from fixedkern.experiments import REFERENCE_MASE, RateParams, theta

for r in mc_table1((100, 300, 700), (1.0,), n_reps=20, seed_base=0, bandwidth_mode="cv"):
    ref_g, ref_phi = REFERENCE_MASE[(r.T, r.sigma2)]
    print(f"T={r.T:>3}  mase_g={r.mase_g:.3f} (ref {ref_g})  mase_phi={r.mase_phi:.4f} (ref {ref_phi})")

# %%
rep = verify_rate(EPANECHNIKOV, "ar1:0.75", 0, (500, 1000, 2000, 4000, 8000), n_reps=60, seed=1)
print(f"log-log slope {rep.slope:.3f}, R^2 {rep.r2:.3f}")

# %% [markdown]
# How fast the bandwidth may shrink, as a function of mixing speed and moments.

# %%
for beta, s in [(10, 4), (50, 8), (1e4, 100)]:
    res = theta(RateParams(beta=beta, s=s))
    print(f"beta={beta:g} s={s:g}  theta={res.theta:.4f}  admissible={res.admissible}")
