# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Acceptance suites run by ``manage.py verify``. Each suite returns a
SuiteResult listing the quantities it checked against their bounds.
"""

from __future__ import annotations

import logging
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import ks_2samp

from .choices import NoiseReduction
from .core.device import BoundaryData, DopingProfile
from .core.fields import FlowField
from .core.grid import Grid
from .core.poisson import poisson_residual, solve_poisson
from .core.pressure import PressureLaw
from .diagnostics import RUN_COLUMNS, efield_identity_defect
from .ensemble import EnsembleConfig, fit_decay, run_ensemble
from .exceptions import SemiconductorError
from .integrator import (
    IntegratorConfig,
    PathRecord,
    PerturbationSpec,
    SimulationContext,
    cfl_dt,
    direct_trajectory,
    initial_perturbation,
    momentum_update,
    simulate,
    step,
)
from .noise import NoiseModel
from .perturbation import (
    PerturbationState,
    PerturbationTrajectory,
    iterate_distance,
    picard_sequence,
    symmetrizer_residuals,
    symmetrizer_weights,
)
from .problem import Problem
from .reports import summary_payload
from .steady import solve_given_current, solve_given_voltage, steady_residual
from .storages import RunOutputStorage
from .streams import make_streams

logger = logging.getLogger(__name__)

# The field-identity defect is first order in h, so the per-level factor tends
# to 2; this is the relative band allowed below it.
REFINEMENT_SLACK = 0.02


@dataclass
class SuiteResult:
    name: str
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    error: str | None = None
    seconds: float = 0.0

    def check(self, label: str, passed: bool, detail: str):
        self.checks.append((label, bool(passed), detail))
        logger.debug(f"[{self.name}] {label}: {'ok' if passed else 'FAILED'} ({detail})")

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.checks) and all(ok for _, ok, _ in self.checks)


def _flat_setup(n_cells: int, J_bar: float, law: PressureLaw | None = None):
    law = law or PressureLaw()
    grid = Grid(n_cells)
    doping = DopingProfile.constant(grid, 1.0)
    steady = solve_given_current(law, doping, 1.0, 1.0, J_bar)
    return law, SimulationContext.build(steady, doping, law)


def _bump_doping(grid: Grid) -> DopingProfile:
    return DopingProfile.bump(grid, center=0.5, width=0.25, height=0.02, base=1.0)


def _problem(n_cells, J_bar, noise_amplitude, epsilon, t_end, snapshot_every=0) -> Problem:
    law, context = _flat_setup(n_cells, J_bar)
    return Problem(
        law=law,
        context=context,
        noise=NoiseModel(amplitude=noise_amplitude),
        integrator=IntegratorConfig(t_end=t_end, snapshot_every=snapshot_every),
        perturbation=PerturbationSpec(amplitude=epsilon, n_modes=3),
    )


def suite_steady(result: SuiteResult):
    law = PressureLaw()
    grid = Grid(200)
    state = solve_given_current(law, DopingProfile.constant(grid, 1.0), 1.0, 1.0, 0.0)
    momentum, poisson = steady_residual(state, law, DopingProfile.constant(grid, 1.0))
    deviation = float(np.max(np.abs(state.rho_bar - 1.0)))
    result.check("trivial state is constant", deviation < 1e-12, f"sup|rho - 1| = {deviation:.2e}")
    result.check(
        "trivial residual",
        max(momentum, poisson) < 1e-12,
        f"momentum {momentum:.2e}, poisson {poisson:.2e}",
    )

    solutions = {}
    for n in (100, 200, 400):
        g = Grid(n)
        solutions[n] = solve_given_current(law, _bump_doping(g), 1.0, 1.0, 0.01).rho_bar
    e1 = float(np.max(np.abs(solutions[100] - solutions[200][::2])))
    e2 = float(np.max(np.abs(solutions[200] - solutions[400][::2])))
    ratio = e1 / e2
    result.check("Richardson ratio", 3.5 <= ratio <= 4.5, f"{ratio:.3f} (errors {e1:.2e}, {e2:.2e})")


def suite_roundtrip(result: SuiteResult):
    law = PressureLaw()
    grid = Grid(200)
    doping = _bump_doping(grid)
    bd = BoundaryData(1.0, 1.0, 0.0, 0.005)
    by_voltage, report = solve_given_voltage(law, doping, bd)
    by_current = solve_given_current(law, doping, 1.0, 1.0, by_voltage.J_bar)
    gap = float(np.max(np.abs(by_voltage.rho_bar - by_current.rho_bar)))
    result.check("rho_bar reproduced", gap <= 1e-8, f"sup gap {gap:.2e} at J_bar = {by_voltage.J_bar:.10g}")
    mismatch = abs(by_voltage.phi_right_attained - bd.phi_right)
    result.check("Phi(1) matched", mismatch <= 1e-9, f"{mismatch:.2e} after {report.outer_iterations} solves")


def suite_poisson(result: SuiteResult):
    rng = np.random.default_rng(3)
    grid = Grid(200)
    doping = DopingProfile.constant(grid, 1.0)
    rho = 1.0 + 0.1 * rng.uniform(-1.0, 1.0, grid.n_nodes)
    bd = BoundaryData(rho[0], rho[-1], 0.3, -0.2)
    Phi = solve_poisson(rho, doping, bd)
    residual = poisson_residual(grid, Phi, rho, doping)
    result.check("apply-back residual", residual <= 1e-10, f"{residual:.2e}")

    def errors(n):
        g = Grid(n)
        x = g.nodes
        f = np.sin(np.pi * x)
        d1 = float(np.max(np.abs(g.derivative(f) - np.pi * np.cos(np.pi * x))))
        d2 = float(np.max(np.abs(g.second_derivative(f) + np.pi**2 * f)))
        # Phi = sin(pi x) solves Phi_xx = rho - b with rho - b = -pi**2 sin(pi x)
        b = DopingProfile.constant(g, 12.0)
        phi = solve_poisson(12.0 - np.pi**2 * f, b, BoundaryData(1.0, 1.0))
        d0 = float(np.max(np.abs(phi - f)))
        return np.array([d1, d2, d0])

    coarse, fine = errors(100), errors(200)
    for label, ratio in zip(("first derivative", "second derivative", "poisson solve"), coarse / fine):
        result.check(f"{label} order", 3.5 <= ratio <= 4.5, f"ratio {ratio:.3f}")


def suite_symmetrizer(result: SuiteResult):
    law = PressureLaw()
    grid = Grid(400)
    doping = _bump_doping(grid)
    steady = solve_given_current(law, doping, 1.0, 1.0, 0.01)
    weights = symmetrizer_weights(steady, law)
    first, second = symmetrizer_residuals(steady, law, weights)
    result.check("first-order residual", first <= 1e-6, f"{first:.2e}")
    result.check("second-order residual", second <= 1e-6, f"{second:.2e}")
    result.check(
        "weights positive",
        float(np.min(weights.r)) > 0.0 and float(np.min(weights.r_tilde)) > 0.0,
        f"min r {np.min(weights.r):.4f}, min r_tilde {np.min(weights.r_tilde):.4f}",
    )

    flat = solve_given_current(law, DopingProfile.constant(grid, 1.0), 1.0, 1.0, 0.0)
    flat_weights = symmetrizer_weights(flat, law, r_tilde0=1.5)
    closed = 1.5 + grid.nodes / 3.0
    gap = float(np.max(np.abs(flat_weights.r_tilde - closed)))
    result.check("r_tilde closed form", gap <= 1e-10, f"sup gap {gap:.2e}")

    epsilon = 0.01
    drifting = solve_given_current(law, DopingProfile.constant(grid, 1.0), 1.0, 1.0, epsilon)
    r = symmetrizer_weights(drifting, law).r
    closed_r = np.exp(-epsilon * grid.nodes / (2.0 - epsilon**2))
    gap = float(np.max(np.abs(r - closed_r)))
    result.check("r closed form", gap <= 1e-10, f"sup gap {gap:.2e}")


def suite_stability(result: SuiteResult):
    problem = _problem(200, 0.01, 0.0, 1e-2, 10.0)
    record = problem.run_path(0, 0)
    result.check("path completed", not record.failed, record.failure or "complete")
    energy = record.column("rel_energy")
    fraction = energy[-1] / energy[0]
    result.check("relative energy decays", fraction < 0.01, f"E(T)/E(0) = {fraction:.2e}")
    fit = fit_decay(record.times, record.composite, (2.5, 7.5))
    result.check(
        "composite decay fit",
        fit.zeta_hat > 0.0 and fit.r_squared > 0.9,
        f"zeta {fit.zeta_hat:.4f}, r2 {fit.r_squared:.4f}",
    )


# Coarse steps 1e-3, 5e-4 and 2.5e-4 against a reference 64 times finer than the
# smallest of them.
STRONG_FINE_DT = 2.5e-4 / 64
STRONG_FACTORS = (256, 128, 64)
STRONG_T_END = 0.5
STRONG_PATHS = 4000


def strong_errors(
    noise: NoiseModel,
    rng: np.random.Generator,
    t_end: float,
    fine_dt: float,
    factors: tuple[int, ...],
    n_paths: int,
    J0: float = 1.0,
) -> list[float]:
    """
    RMS error at t_end of the scalar reduction dJ = -J dt + J Y(J) dB with
    steps fine_dt * factor, against the fine_dt solution on the same Brownian
    paths. Increments are drawn block by block.
    """
    block = max(factors)
    n_blocks = int(round(t_end / (fine_dt * block)))
    reference = np.full((n_paths, 1), J0)
    coarse = {factor: reference.copy() for factor in factors}
    for _ in range(n_blocks):
        dW = noise.draw(rng, fine_dt, (block, n_paths))
        for w in dW:
            reference = momentum_update(reference, reference, fine_dt, noise, w)
        for factor in factors:
            J = coarse[factor]
            for w in dW.reshape(block // factor, factor, n_paths, -1).sum(axis=1):
                J = momentum_update(J, J, fine_dt * factor, noise, w)
            coarse[factor] = J
    return [float(np.sqrt(np.mean((coarse[f] - reference) ** 2))) for f in factors]


def suite_integrator(result: SuiteResult):
    rng = make_streams(6, 0).noise
    noise = NoiseModel(amplitude=0.5)
    dt, t_end, n_paths = 1e-3, 1.0, 10_000
    n_steps = int(round(t_end / dt))
    J = np.ones((n_paths, 1))
    for _ in range(n_steps):
        J = momentum_update(J, J, dt, noise, noise.draw(rng, dt, (n_paths,)))
    mean = float(np.mean(J))
    stderr = float(np.std(J, ddof=1) / np.sqrt(n_paths))
    exact = np.exp(-t_end)
    result.check(
        "mean matches J0 exp(-t)",
        abs(mean - exact) <= 3.0 * stderr,
        f"{mean:.5f} vs {exact:.5f} (se {stderr:.1e})",
    )

    errors = strong_errors(
        NoiseModel(amplitude=2.0), rng, STRONG_T_END, STRONG_FINE_DT, STRONG_FACTORS, STRONG_PATHS
    )
    for k in range(2):
        ratio = errors[k] / errors[k + 1]
        result.check(
            f"strong order ratio {k + 1}",
            1.3 <= ratio <= 1.5,
            f"{ratio:.3f} (rms {errors[k]:.2e} -> {errors[k + 1]:.2e})",
        )

    law, context = _flat_setup(100, 0.01)
    field = FlowField.from_density(
        context.steady.rho_bar + 0.01 * np.sin(np.pi * context.grid.nodes),
        np.full(context.grid.n_nodes, 0.01),
        context.doping,
        context.boundary,
    )
    after = step(field, context, law, NoiseModel(amplitude=0.05), cfl_dt(field, law, 0.4), rng=rng)
    J = after.J
    end_slope = max(abs(-3 * J[0] + 4 * J[1] - J[2]), abs(3 * J[-1] - 4 * J[-2] + J[-3]))
    result.check(
        "boundary values",
        after.rho[0] == 1.0 and after.rho[-1] == 1.0 and end_slope <= 1e-12,
        f"one-sided J_x numerators {end_slope:.1e}",
    )
    residual = poisson_residual(context.grid, after.Phi, after.rho, context.doping)
    result.check("Poisson coupling", residual <= 1e-10, f"{residual:.2e}")


def suite_noise(result: SuiteResult):
    n_samples = 100_000
    dt = 1e-3
    J = np.ones((n_samples, 1))
    kmodes = NoiseModel(amplitude=0.05, reduction=NoiseReduction.K_MODES)
    single = NoiseModel(amplitude=0.05, reduction=NoiseReduction.SINGLE_BROWNIAN)
    a = kmodes.increment(J, kmodes.draw(make_streams(7, 0).noise, dt, (n_samples,)))[:, 0]
    b = single.increment(J, single.draw(make_streams(7, 1).noise, dt, (n_samples,)))[:, 0]
    statistic = ks_2samp(a, b)
    result.check("KS law equivalence", statistic.pvalue > 0.01, f"p = {statistic.pvalue:.3f}")
    expected = (0.05 * 1.0 / 2.0) ** 2 * dt * kmodes.weight_norm_sq
    variance = float(np.var(a, ddof=1))
    stderr = variance * np.sqrt(2.0 / (n_samples - 1))
    result.check(
        "k-modes variance",
        abs(variance - expected) <= 3.0 * stderr,
        f"{variance:.4e} vs {expected:.4e} (se {stderr:.1e})",
    )


def suite_ensemble(result: SuiteResult):
    problem = _problem(100, 0.01, 0.05, 1e-2, 20.0)
    n_paths = 256
    initial_sup = float(
        np.mean(
            [
                np.max(np.abs(problem.initial_field(make_streams(0, i).initial).rho - problem.steady.rho_bar))
                for i in range(n_paths)
            ]
        )
    )
    ladder = (1e-5, 1e-4, 1e-3, 0.5 * initial_sup)
    cfg = EnsembleConfig(n_paths=n_paths, master_seed=0, delta_ladder=ladder)
    summary = run_ensemble(cfg, problem)
    result.check("no failed paths", not summary.failed_paths, f"{len(summary.failed_paths)} failed")
    for m in (1, 2, 3):
        fit = summary.fits.get(m)
        result.check(
            f"decay fit m={m}",
            fit is not None and fit.zeta_hat > 0.0 and fit.r_squared > 0.8,
            "no fit" if fit is None else f"zeta {fit.zeta_hat:.4f}, r2 {fit.r_squared:.4f}",
        )
    scaling = summary.scaling
    result.check(
        "rate scaling in m",
        scaling is not None and scaling.consistent,
        "no scaling" if scaling is None else ", ".join(f"m={r.m}: {r.ratio:.3f}" for r in scaling.rows),
    )
    invariant = summary.invariant
    if invariant is None:
        result.check("invariant statistics", False, "insufficient post-burn-in data")
        return
    result.check(
        "post-burn-in deviation",
        invariant.mean_sup_deviation < 0.1 * initial_sup,
        f"{invariant.mean_sup_deviation:.3e} vs initial sup {initial_sup:.3e}",
    )
    occupation = dict(invariant.ladder)[float(0.5 * initial_sup)]
    result.check("occupation at half initial sup", occupation > 0.95, f"{occupation:.4f}")
    if summary.chebyshev is not None:
        result.check(
            "Chebyshev tail surrogate",
            summary.chebyshev.satisfied,
            f"fraction {summary.chebyshev.fraction:.3f} above {summary.chebyshev.threshold:.3e}",
        )


def suite_picard(result: SuiteResult):
    law, context = _flat_setup(100, 0.01)
    spec = PerturbationSpec(amplitude=1e-3, n_modes=3)
    noise = NoiseModel(amplitude=0.02)
    streams = make_streams(11, 0)
    initial = initial_perturbation(context, spec, streams.initial)
    dt = cfl_dt(initial, law, 0.2)
    n_steps = int(np.ceil(0.5 / dt))
    dt = 0.5 / n_steps
    increments = noise.draw(streams.noise, dt, (n_steps,))
    start = PerturbationTrajectory.constant(
        PerturbationState.from_field(initial, context.steady), dt * np.arange(n_steps + 1)
    )
    iterates = picard_sequence(
        start, 6, context.steady, law, noise, increments, dt, context.doping, context.boundary
    )
    distances = [iterate_distance(iterates[n + 1], iterates[n]) for n in range(6)]
    # roundoff level of the H2 distance (second differences amplify rounding by 1/h**2)
    floor = 1e-7 * distances[0]
    for n in range(1, 5):
        ratio = distances[n + 1] / distances[n] if distances[n] > 0.0 else 0.0
        result.check(
            f"contraction at iterate {n + 1}",
            ratio < 1.0 or distances[n + 1] <= floor,
            f"d = {distances[n + 1]:.2e}, ratio {ratio:.3e}",
        )
    direct = direct_trajectory(initial, context, law, noise, increments, dt)
    gap = iterate_distance(iterates[-1], direct)
    result.check(
        "limit matches direct integration",
        gap <= max(10.0 * distances[-1], floor),
        f"{gap:.2e}",
    )


def _field_identity_defect(n_cells: int) -> float:
    law, context = _flat_setup(n_cells, 0.01)
    grid = context.grid
    initial = FlowField.from_density(
        context.steady.rho_bar + 1e-2 * np.sin(np.pi * grid.nodes),
        np.full(grid.n_nodes, context.steady.J_bar),
        context.doping,
        context.boundary,
    )
    config = IntegratorConfig(t_end=0.2, snapshot_every=1)
    record = simulate(initial, config, law, context, NoiseModel(amplitude=0.0))
    return efield_identity_defect(record, context.steady)


def suite_field_identity(result: SuiteResult):
    defects = [_field_identity_defect(n) for n in (100, 200, 400)]
    for k in range(2):
        ratio = defects[k] / defects[k + 1]
        result.check(
            f"refinement level {k + 1}",
            ratio >= 2.0 * (1.0 - REFINEMENT_SLACK),
            f"{defects[k]:.3e} -> {defects[k + 1]:.3e} (factor {ratio:.3f})",
        )

    law, context = _flat_setup(100, 0.01)
    x = context.grid.nodes
    start = FlowField.from_density(
        context.steady.rho_bar + 1e-2 * np.sin(np.pi * x),
        context.steady.J_bar + 0.05 * np.cos(np.pi * x),
        context.doping,
        context.boundary,
    )
    dt = cfl_dt(start, law, 0.4)
    faulty = step(start, context, law, NoiseModel(), dt, update_field=False)
    record = PathRecord(seed=0, snapshots={0: start, 1: faulty})
    defect = efield_identity_defect(record, context.steady)
    result.check("skipped Poisson solve detected", defect > 1e-3, f"defect {defect:.2e}")


def suite_reproducibility(result: SuiteResult):
    problem = _problem(50, 0.01, 0.05, 1e-2, 2.0)

    def run_csv(directory) -> bytes:
        record = problem.run_path(9, 0)
        storage = RunOutputStorage(directory)
        storage.write_csv("run.csv", RUN_COLUMNS, record.rows())
        with storage.open("run.csv", "rb") as f:
            return f.read()

    def summary_json(directory, workers) -> bytes:
        cfg = EnsembleConfig(n_paths=8, master_seed=9, workers=workers)
        payload = summary_payload(run_ensemble(cfg, problem), {})
        storage = RunOutputStorage(directory)
        storage.write_json("summary.json", payload)
        with storage.open("summary.json", "rb") as f:
            return f.read()

    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        result.check("run.csv byte-identical", run_csv(a) == run_csv(b), "seed 9")
        result.check(
            "summary.json independent of workers",
            summary_json(a, 1) == summary_json(b, 2),
            "1 vs 2 workers",
        )


SUITES = {
    "steady": suite_steady,
    "roundtrip": suite_roundtrip,
    "poisson": suite_poisson,
    "symmetrizer": suite_symmetrizer,
    "stability": suite_stability,
    "integrator": suite_integrator,
    "noise": suite_noise,
    "ensemble": suite_ensemble,
    "picard": suite_picard,
    "field_identity": suite_field_identity,
    "reproducibility": suite_reproducibility,
}


def run_suite(name: str) -> SuiteResult:
    result = SuiteResult(name=name)
    started = time.perf_counter()
    try:
        SUITES[name](result)
    except SemiconductorError as e:
        logger.error(f"Suite {name} raised {type(e).__name__}: {e}")
        result.error = f"{type(e).__name__}: {e}"
    result.seconds = time.perf_counter() - started
    logger.info(f"Suite {name}: {'pass' if result.passed else 'FAIL'} in {result.seconds:.1f}s")
    return result
