# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Payloads for the files the commands write. Storage and schema validation
live in storages.py.
"""

from __future__ import annotations

from django.conf import settings

from .core.device import DopingProfile
from .core.fields import FlowField
from .core.pressure import PressureLaw
from .ensemble import DecayFit, EnsembleSummary, ScalingReport
from .perturbation import SymmetrizerWeights
from .steady import SteadyState, steady_residual

SYMMETRIZER_COLUMNS = ("x", "r", "s", "r_tilde", "s_tilde")
SNAPSHOT_COLUMNS = ("x", "rho", "J", "Phi", "E")


def steady_payload(steady: SteadyState, law: PressureLaw, doping: DopingProfile) -> dict:
    momentum, poisson = steady_residual(steady, law, doping)
    report = steady.report
    return {
        "version": settings.LAB_VERSION,
        "gamma": law.gamma,
        "kappa": law.kappa,
        "mode": str(report.mode) if report else None,
        "J_bar": steady.J_bar,
        "phi_right_attained": steady.phi_right_attained,
        "subsonic_margin": steady.subsonic_margin,
        "mass_defect": report.mass_defect if report else None,
        "residuals": {
            "newton": steady.residual_norm,
            "momentum": momentum,
            "poisson": poisson,
        },
        "iterations": report.iterations if report else None,
        "outer_iterations": report.outer_iterations if report else None,
        "nodes": steady.grid.nodes,
        "rho_bar": steady.rho_bar,
        "Phi_bar": steady.Phi_bar,
        "E_bar": steady.E_bar,
    }


def symmetrizer_rows(steady: SteadyState, weights: SymmetrizerWeights):
    return zip(steady.grid.nodes, weights.r, weights.s, weights.r_tilde, weights.s_tilde)


def snapshot_rows(field: FlowField):
    return zip(field.grid.nodes, field.rho, field.J, field.Phi, field.E)


def _fit_entry(m: int, fit: DecayFit | None) -> dict:
    if fit is None:
        return {"m": m, "zeta_hat": None, "c_hat": None, "r2": None, "n_points": 0}
    return {
        "m": m,
        "zeta_hat": fit.zeta_hat,
        "c_hat": fit.c_hat,
        "r2": fit.r_squared,
        "n_points": fit.n_points,
    }


def _scaling_entry(report: ScalingReport | None):
    if report is None:
        return None
    return {
        "rows": [{"m": row.m, "zeta": row.zeta, "ratio": row.ratio} for row in report.rows],
        "consistent": report.consistent,
    }


def summary_payload(summary: EnsembleSummary, config_echo: dict) -> dict:
    invariant = summary.invariant
    chebyshev = summary.chebyshev
    return {
        "version": settings.LAB_VERSION,
        "config": config_echo,
        "n_paths": summary.n_paths,
        "t_end": summary.t_end,
        "fit_window": list(summary.config.window(summary.t_end)),
        "times": summary.times,
        "moments": [
            {
                "m": curve.m,
                "times": summary.times,
                "values": curve.values,
                "stderr": curve.stderr,
                "tail_values": curve.tail_values,
                "tail_stderr": curve.tail_stderr,
            }
            for curve in summary.moments
        ],
        "fits": [_fit_entry(m, fit) for m, fit in sorted(summary.fits.items())],
        "tail_fits": [_fit_entry(m, fit) for m, fit in sorted(summary.tail_fits.items())],
        "scaling": _scaling_entry(summary.scaling),
        "tail_scaling": _scaling_entry(summary.tail_scaling),
        "invariant": None
        if invariant is None
        else {
            "burn_in_time": invariant.burn_in_time,
            "mean_composite": invariant.mean_composite,
            "stderr_composite": invariant.stderr_composite,
            "mean_sup_deviation": invariant.mean_sup_deviation,
            "stderr_sup_deviation": invariant.stderr_sup_deviation,
            "n_samples": invariant.n_samples,
            "ladder": [{"delta": d, "fraction": f} for d, f in invariant.ladder],
        },
        "chebyshev": None
        if chebyshev is None
        else {
            "m": chebyshev.m,
            "t": chebyshev.t,
            "threshold": chebyshev.threshold,
            "fraction": chebyshev.fraction,
            "satisfied": chebyshev.satisfied,
        },
        "partial": summary.partial,
        "failed_paths": [
            {"index": index, "failure": failure, "last_good_time": t}
            for index, failure, t in summary.failed_paths
        ],
    }
