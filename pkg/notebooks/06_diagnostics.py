# %% [markdown]
# Residual diagnostics: correlograms, portmanteau tests and ARMA order selection.

# %%
import numpy as np
from scipy.signal import lfilter

from fixedkern import diagnose

rng = np.random.default_rng(5)
x = lfilter([1.0], [1.0, -0.75], rng.standard_normal(1200))[200:]
rep = diagnose(x)
print("acf[:5] ", np.round(rep.acf[:5], 3))
print("pacf[:5]", np.round(rep.pacf[:5], 3), " band", round(rep.bartlett_band, 3))
print("BIC best order:", rep.best_order)
print("Ljung-Box p-values:", [round(p, 4) for _, _, p in rep.ljung_box[:3]])

# %% [markdown]
# After filtering out the AR(1) part, the portmanteau tests have nothing left to find.

# %%
white = x[1:] - 0.75 * x[:-1]
print("whitened:", [round(p, 3) for _, _, p in diagnose(white, arma=False).ljung_box[:4]])
