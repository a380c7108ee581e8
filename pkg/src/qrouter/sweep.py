"""Gamma sweeps: grid x repetitions through run_point, with plot-ready CSV/JSON
emission and a reproducibility manifest.

All result files are pure functions of the configuration (fixed float
formatting, ordered rows), so re-running a sweep yields byte-identical
results.csv, summary.csv, and density-matrix dumps. The manifest additionally
records wall time and is therefore excluded from that guarantee.
"""

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._kernels import BACKEND_NAME
from .config import config_to_json
from .experiment import ideal_density, run_point, _REP_STRIDE
from .sim import n_threads

RESULTS_HEADER = "gamma,rep,F,P_est,P_theory,p1_theory,shots_kept"
SUMMARY_HEADER = "gamma,mean_F,two_sigma_F,mean_P_est,two_sigma_P,P_theory,p1_theory,shots_kept_total"


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    mean_F: float
    two_sigma_F: float
    mean_P_est: float
    two_sigma_P: float
    P_theory: float
    p1_theory: float
    shots_kept_total: int


@dataclass(frozen=True)
class SweepReport:
    rows: tuple
    results: tuple  # every ExperimentResult, grid-major then repetition order


def _fmt(x):
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.10g}"


def _atomic_write(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def density_matrix_json(rho):
    """The dump format behind the real/imaginary bar-plot figures."""
    rho = np.asarray(rho)
    return {
        "dim": rho.shape[0],
        "real": np.real(rho).tolist(),
        "imag": np.imag(rho).tolist(),
    }


def _two_sigma(values):
    if len(values) < 2:
        return 0.0
    return 2.0 * float(np.std(values, ddof=1))


def run_sweep(config, out_dir=None):
    """Execute the configured sweep and write results under ``out_dir``.

    Files: results.csv (one row per gamma x repetition), summary.csv (one row
    per gamma), dm_gamma*_rep*.json density-matrix dumps, ideal_density.json,
    and manifest.json.
    """
    out_dir = out_dir or config.output_dir
    started = time.time()
    os.makedirs(out_dir, exist_ok=True)
    probe = os.path.join(out_dir, ".write-probe.tmp")
    try:
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise OSError(f"output directory {out_dir!r} is not writable: {exc}") from exc

    jobs = [(gi, gamma, rep) for gi, gamma in enumerate(config.gamma_grid) for rep in range(config.repetitions)]
    workers = min(n_threads(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_point, config, gamma, rep) for _, gamma, rep in jobs]
            results = [f.result() for f in futures]
    else:
        results = [run_point(config, gamma, rep) for _, gamma, rep in jobs]

    lines = [RESULTS_HEADER]
    for res in results:
        lines.append(
            ",".join(
                [
                    _fmt(res.gamma),
                    str(res.repetition_index),
                    _fmt(res.fidelity),
                    _fmt(res.success_prob_estimate),
                    _fmt(res.success_prob_theory),
                    _fmt(res.p1_theory),
                    str(res.shots_kept),
                ]
            )
        )
    _atomic_write(os.path.join(out_dir, "results.csv"), "\n".join(lines) + "\n")

    rows = []
    sum_lines = [SUMMARY_HEADER]
    per_gamma = {}
    for res in results:
        per_gamma.setdefault(res.gamma, []).append(res)
    for gamma in config.gamma_grid:
        group = per_gamma[gamma]
        fids = [r.fidelity for r in group]
        pests = [r.success_prob_estimate for r in group]
        row = SweepRow(
            gamma=gamma,
            mean_F=float(np.mean(fids)),
            two_sigma_F=_two_sigma(fids),
            mean_P_est=float(np.mean(pests)),
            two_sigma_P=_two_sigma(pests),
            P_theory=group[0].success_prob_theory,
            p1_theory=group[0].p1_theory,
            shots_kept_total=sum(r.shots_kept for r in group),
        )
        rows.append(row)
        sum_lines.append(
            ",".join(
                [
                    _fmt(row.gamma),
                    _fmt(row.mean_F),
                    _fmt(row.two_sigma_F),
                    _fmt(row.mean_P_est),
                    _fmt(row.two_sigma_P),
                    _fmt(row.P_theory),
                    _fmt(row.p1_theory),
                    str(row.shots_kept_total),
                ]
            )
        )
    _atomic_write(os.path.join(out_dir, "summary.csv"), "\n".join(sum_lines) + "\n")

    for res in results:
        name = f"dm_gamma{res.gamma:.4f}_rep{res.repetition_index}.json"
        _atomic_write(
            os.path.join(out_dir, name),
            json.dumps(density_matrix_json(res.reconstructed), indent=1, sort_keys=True),
        )
    _atomic_write(
        os.path.join(out_dir, "ideal_density.json"),
        json.dumps(density_matrix_json(ideal_density()), indent=1, sort_keys=True),
    )

    cmap = config.resolved_coupling_map()
    manifest = {
        "config": config_to_json(config),
        "coupling_map_used": {"n_physical": cmap.n_physical, "edges": [list(e) for e in cmap.edges]},
        "repetition_seeds": {
            str(rep): config.base_seed * _REP_STRIDE + rep for rep in range(config.repetitions)
        },
        "kernel_backend": BACKEND_NAME,
        "code_version": __version__,
        "wall_time_s": round(time.time() - started, 3),
    }
    _atomic_write(os.path.join(out_dir, "manifest.json"), json.dumps(manifest, indent=1, sort_keys=True))
    return SweepReport(rows=tuple(rows), results=tuple(results))
