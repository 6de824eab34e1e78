# %% [markdown]
# The whole chain on a monthly CSV: ingest, remove annual and semiannual harmonics, pick h by
# block CV, fit the trend and coefficient, then diagnose both residual series.

# %%
import json
from pathlib import Path

from fixedkern import PipelineConfig, run_pipeline

here = Path(__file__).resolve().parent
cfg = PipelineConfig(
    input_path=str(here.parent / "tests" / "data" / "synthetic_monthly.csv"),
    value_column="sla_mm",
    deseasonalize=True,
    units="mm",
    output_dir=str(here / "pipeline_out"),
)
res = run_pipeline(cfg)
print("h =", round(res.cv.h, 4), " first-step BIC order:", res.first_step.best_order)
print("final Ljung-Box p-values:", [round(p, 3) for _, _, p in res.final.ljung_box])

# %%
report = json.loads(Path(res.files["diagnostics"]).read_text())
print(sorted(report))
print("written:", ", ".join(sorted(res.files)))
