"""
A short decay experiment
========================

The full pipeline at desk scale: build the Dirichlet wave, integrate the
p-system and fit the decay exponents.  The fit window is short here, so
the numbers are only indicative; the acceptance suite uses t_end = 2000.
"""
import os
import tempfile

from diffwave.cli import resolve_config, run_experiment

os.environ.setdefault("DIFFWAVE_OUT", tempfile.mkdtemp(prefix="diffwave_demo_"))
cfg = resolve_config({"alpha": 1, "lambda": 0.3, "boundary": "dirichlet", "N": 2000, "t_end": 200.0,
                      "output": "demo_lambda_0.3"})
report = run_experiment(cfg)
for name in ("v_Linf", "u_Linf"):
    q = report.quantities[name]
    print(f"{name}: fitted {q['fitted']:.3f}, predicted {q['predicted']:.3f}")
for name, f in report.functionals.items():
    print(f"{name:14s} slope {f['final_decade_slope']:+.3f} {f['verdict']}")
print("artifacts in", os.path.join(os.environ["DIFFWAVE_OUT"], cfg.output))
