"""Repeated-trial classification comparison on noisy synthetic data.

Runs the full harness (generate, corrupt, split, project, nearest-neighbor)
for the automatic method against PCA at the same dimension and raw features.
"""

import pce
from pce.evaluation import ExperimentConfig, run_experiment

spec = pce.SubspaceSpec(ambient=50, subspaces=((4, 20),) * 5)
noise = pce.NoiseSpec(kind="gaussian", rho=0.02)

for method, extra in (("pce", {"lam": 5.0}), ("pca", {"dim": 20}), ("raw", {})):
    cfg = ExperimentConfig(
        source=spec, method=method, noise=noise, trials=10, base_seed=0, **extra
    )
    report = run_experiment(cfg)
    k = f" (k mode {report.k_mode})" if method == "pce" else ""
    print(f"{method:>4}: accuracy {report.mean:.3f} +/- {report.std:.3f}{k}")
