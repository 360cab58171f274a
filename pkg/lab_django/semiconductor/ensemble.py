# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Path ensembles: moment curves of the composite statistic, exponential decay
fits and their scaling in the moment order, and concentration of the
time-averaged law at the steady state.

Paths run in a multiprocessing.Pool. Each path draws from its own streams
keyed by (master_seed, path_index) and results are reduced in path order, so
a summary does not depend on the number of workers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np
from django.conf import settings
from scipy.stats import linregress

from .choices import PathStatus
from .exceptions import (
    DomainError,
    InsufficientDataError,
    LogDomainError,
    ReferenceMissingError,
)

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 10
MIN_POST_BURN_IN_SAMPLES = 10
SCALING_BAND = (0.7, 1.3)
DEFAULT_DELTA_LADDER = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1)


@dataclass(frozen=True)
class EnsembleConfig:
    n_paths: int = 64
    master_seed: int = 0
    moment_orders: tuple[int, ...] = (1, 2, 3)
    fit_window: tuple[float, float] | None = None
    burn_in_fraction: float = 0.5
    delta_ladder: tuple[float, ...] = DEFAULT_DELTA_LADDER
    record_points: int = 201
    workers: int | None = None

    def __post_init__(self):
        if self.n_paths < 2:
            raise DomainError(f"n_paths must be at least 2, got {self.n_paths}")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed}")
        orders = tuple(int(m) for m in self.moment_orders)
        if not orders or min(orders) < 1 or len(set(orders)) != len(orders):
            raise DomainError(f"moment orders must be distinct positive integers, got {orders}")
        object.__setattr__(self, "moment_orders", orders)
        if self.fit_window is not None:
            lo, hi = self.fit_window
            if not lo < hi:
                raise DomainError(f"fit window needs t_lo < t_hi, got ({lo}, {hi})")
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise DomainError(f"burn_in_fraction must lie in [0, 1), got {self.burn_in_fraction}")
        if not self.delta_ladder or min(self.delta_ladder) <= 0.0:
            raise DomainError("delta ladder entries must be positive")
        object.__setattr__(self, "delta_ladder", tuple(sorted(float(d) for d in self.delta_ladder)))
        if self.record_points < 11:
            raise DomainError(f"record_points must be at least 11, got {self.record_points}")
        if self.workers is not None and self.workers < 1:
            raise DomainError(f"workers must be positive, got {self.workers}")

    def window(self, t_end: float) -> tuple[float, float]:
        if self.fit_window is None:
            return t_end / 4.0, 3.0 * t_end / 4.0
        lo, hi = self.fit_window
        if hi > t_end:
            raise DomainError(f"fit window end {hi} exceeds t_end = {t_end}")
        return float(lo), float(hi)


@dataclass(frozen=True)
class DecayFit:
    zeta_hat: float
    c_hat: float
    r_squared: float
    n_points: int


@dataclass(frozen=True)
class ScalingRow:
    m: int
    zeta: float
    ratio: float


@dataclass(frozen=True)
class ScalingReport:
    rows: tuple[ScalingRow, ...]
    consistent: bool


@dataclass(frozen=True, eq=False)
class MomentCurve:
    """
    Sample mean of X(t)**m and of (sup_{[t, t_end]} X)**m with standard errors.
    """

    m: int
    values: np.ndarray
    stderr: np.ndarray
    tail_values: np.ndarray
    tail_stderr: np.ndarray


@dataclass(frozen=True)
class ConcentrationTable:
    burn_in_time: float
    mean_composite: float
    stderr_composite: float
    mean_sup_deviation: float
    stderr_sup_deviation: float
    ladder: tuple[tuple[float, float], ...]
    n_samples: int


@dataclass(frozen=True)
class ChebyshevCheck:
    m: int
    t: float
    threshold: float
    fraction: float

    @property
    def satisfied(self) -> bool:
        return self.fraction <= 0.5


@dataclass(frozen=True, eq=False)
class PathSummary:
    """
    What a worker sends back: per-step series plus their values on the shared
    record grid.
    """

    index: int
    status: PathStatus
    failure: str | None
    last_good_time: float
    n_steps: int
    times: np.ndarray
    composite: np.ndarray
    sup_sigma: np.ndarray
    recorded: np.ndarray
    tail_sup: np.ndarray

    @property
    def failed(self) -> bool:
        return self.status == PathStatus.FAILED


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    config: EnsembleConfig
    t_end: float
    times: np.ndarray
    moments: tuple[MomentCurve, ...]
    fits: dict[int, DecayFit | None]
    tail_fits: dict[int, DecayFit | None]
    scaling: ScalingReport | None
    tail_scaling: ScalingReport | None
    invariant: ConcentrationTable | None
    chebyshev: ChebyshevCheck | None
    n_paths: int
    failed_paths: tuple[tuple[int, str, float], ...]
    partial: bool


def fit_decay(t, y, window: tuple[float, float]) -> DecayFit:
    """
    Least-squares line through (t, log y) on t_lo <= t <= t_hi:
    zeta_hat = -slope, c_hat = exp(intercept).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = window
    inside = (t >= lo) & (t <= hi)
    n_points = int(np.count_nonzero(inside))
    if n_points < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"{n_points} points in [{lo:g}, {hi:g}], at least {MIN_FIT_POINTS} needed"
        )
    t_fit, y_fit = t[inside], y[inside]
    if not np.all(np.isfinite(y_fit)) or np.any(y_fit <= 0.0):
        raise LogDomainError(f"series is not positive on [{lo:g}, {hi:g}]")
    result = linregress(t_fit, np.log(y_fit))
    return DecayFit(
        zeta_hat=float(-result.slope),
        c_hat=float(np.exp(result.intercept)),
        r_squared=float(np.clip(result.rvalue**2, 0.0, 1.0)),
        n_points=n_points,
    )


def moment_scaling_report(fits: dict[int, DecayFit]) -> ScalingReport:
    """
    Rows (m, zeta_m, zeta_m / (m zeta_1)); consistent when every ratio lies
    in [0.7, 1.3].
    """
    if fits.get(1) is None:
        raise ReferenceMissingError("scaling needs the m = 1 fit")
    zeta_1 = fits[1].zeta_hat
    rows = []
    for m in sorted(fits):
        fit = fits[m]
        if fit is None:
            continue
        ratio = fit.zeta_hat / (m * zeta_1) if zeta_1 != 0.0 else float("nan")
        rows.append(ScalingRow(m=m, zeta=fit.zeta_hat, ratio=ratio))
    lo, hi = SCALING_BAND
    consistent = all(lo <= row.ratio <= hi for row in rows)
    return ScalingReport(rows=tuple(rows), consistent=consistent)


def invariant_concentration(paths, burn_in_fraction: float, delta_ladder) -> ConcentrationTable:
    """
    Time averages after burn-in, pooled over paths. Each entry of `paths`
    provides per-step `times`, `composite` and `sup_sigma` arrays (PathRecord
    and PathSummary both do). Samples carry the length of the step that
    produced them as weight.
    """
    if burn_in_fraction > 0.5:
        raise InsufficientDataError(
            f"burn-in fraction {burn_in_fraction} leaves less post-burn-in time than burn-in"
        )
    paths = list(paths)
    if not paths:
        raise InsufficientDataError("no paths to average")
    t_end = max(float(np.asarray(p.times)[-1]) for p in paths)
    burn_in_time = burn_in_fraction * t_end
    ladder = np.asarray(sorted(delta_ladder), dtype=float)

    path_composite, path_sup = [], []
    weight_sum = 0.0
    occupied = np.zeros(len(ladder))
    n_samples = 0
    for path in paths:
        times = np.asarray(path.times, dtype=float)
        after = np.flatnonzero(times[1:] > burn_in_time) + 1
        if len(after) == 0:
            continue
        weights = times[after] - times[after - 1]
        total = float(np.sum(weights))
        if total <= 0.0:
            continue
        composite = np.asarray(path.composite, dtype=float)[after]
        sup_sigma = np.asarray(path.sup_sigma, dtype=float)[after]
        path_composite.append(float(np.sum(weights * composite)) / total)
        path_sup.append(float(np.sum(weights * sup_sigma)) / total)
        occupied += np.array([np.sum(weights[sup_sigma <= delta]) for delta in ladder])
        weight_sum += total
        n_samples += len(after)

    if n_samples < MIN_POST_BURN_IN_SAMPLES:
        raise InsufficientDataError(
            f"{n_samples} post-burn-in samples, at least {MIN_POST_BURN_IN_SAMPLES} needed"
        )

    def stderr(values) -> float:
        if len(values) < 2:
            return float("nan")
        return float(np.std(values, ddof=1) / np.sqrt(len(values)))

    fractions = occupied / weight_sum
    return ConcentrationTable(
        burn_in_time=burn_in_time,
        mean_composite=float(np.mean(path_composite)),
        stderr_composite=stderr(path_composite),
        mean_sup_deviation=float(np.mean(path_sup)),
        stderr_sup_deviation=stderr(path_sup),
        ladder=tuple((float(d), float(f)) for d, f in zip(ladder, fractions)),
        n_samples=n_samples,
    )


def record_grid(t_end: float, record_points: int) -> np.ndarray:
    return np.linspace(0.0, t_end, record_points)


def summarise_path(record, index: int, record_times: np.ndarray) -> PathSummary:
    """
    Reduce a PathRecord to the record grid: the composite statistic by
    linear interpolation and its tail sup over [t, t_end] from the steps at
    or after t. Failed paths get NaN beyond their last good time, and
    throughout when they failed before the first step.
    """
    times = record.times
    composite = record.composite
    if len(times) == 0:
        blank = np.full(len(record_times), np.nan)
        return PathSummary(
            index=index,
            status=record.status,
            failure=record.failure,
            last_good_time=record.last_good_time,
            n_steps=record.n_steps,
            times=times,
            composite=composite,
            sup_sigma=record.sup_sigma,
            recorded=blank,
            tail_sup=blank.copy(),
        )
    tail = np.maximum.accumulate(composite[::-1])[::-1]
    recorded = np.interp(record_times, times, composite)
    idx = np.searchsorted(times, record_times - 1e-12 * max(1.0, times[-1]), side="left")
    tail_sup = tail[np.minimum(idx, len(tail) - 1)]
    if record.failed:
        beyond = record_times > times[-1]
        recorded = np.where(beyond, np.nan, recorded)
        tail_sup = np.where(beyond, np.nan, tail_sup)
    return PathSummary(
        index=index,
        status=record.status,
        failure=record.failure,
        last_good_time=record.last_good_time,
        n_steps=record.n_steps,
        times=times,
        composite=composite,
        sup_sigma=record.sup_sigma,
        recorded=recorded,
        tail_sup=tail_sup,
    )


_worker_task = {}


def _install_task(problem, master_seed: int, record_times: np.ndarray):
    _worker_task["problem"] = problem
    _worker_task["master_seed"] = master_seed
    _worker_task["record_times"] = record_times


def _run_path(index: int) -> PathSummary:
    problem = _worker_task["problem"]
    record = problem.run_path(_worker_task["master_seed"], index)
    return summarise_path(record, index, _worker_task["record_times"])


def run_paths(cfg: EnsembleConfig, problem, record_times: np.ndarray) -> list[PathSummary]:
    workers = cfg.workers or settings.SEMICONDUCTOR_MAX_WORKERS
    workers = max(1, min(int(workers), cfg.n_paths))
    indices = range(cfg.n_paths)
    initargs = (problem, cfg.master_seed, record_times)
    logger.info(f"Running {cfg.n_paths} paths on {workers} worker(s), master seed {cfg.master_seed}")
    if workers == 1:
        _install_task(*initargs)
        try:
            return [_run_path(i) for i in indices]
        finally:
            _worker_task.clear()
    with Pool(processes=workers, initializer=_install_task, initargs=initargs) as pool:
        return pool.map(_run_path, indices)


def _moment_curves(stack: np.ndarray, tails: np.ndarray, orders) -> tuple[MomentCurve, ...]:
    n = stack.shape[0]
    curves = []
    for m in orders:
        powers = stack**m
        tail_powers = tails**m
        if n > 1:
            stderr = np.std(powers, axis=0, ddof=1) / np.sqrt(n)
            tail_stderr = np.std(tail_powers, axis=0, ddof=1) / np.sqrt(n)
        else:
            stderr = tail_stderr = np.full(stack.shape[1], np.nan)
        curves.append(
            MomentCurve(
                m=m,
                values=np.mean(powers, axis=0),
                stderr=stderr,
                tail_values=np.mean(tail_powers, axis=0),
                tail_stderr=tail_stderr,
            )
        )
    return tuple(curves)


def _fit_each(times, curves, window, attribute: str) -> dict[int, DecayFit | None]:
    fits = {}
    for curve in curves:
        try:
            fits[curve.m] = fit_decay(times, getattr(curve, attribute), window)
        except (LogDomainError, InsufficientDataError) as e:
            logger.info(f"No decay fit for m={curve.m} ({attribute}): {e}")
            fits[curve.m] = None
    return fits


def _scaling(fits) -> ScalingReport | None:
    usable = {m: fit for m, fit in fits.items() if fit is not None}
    try:
        return moment_scaling_report(usable)
    except ReferenceMissingError:
        return None


def chebyshev_check(
    tail_fits: dict[int, DecayFit | None], tails: np.ndarray, times: np.ndarray, t_hi: float
) -> ChebyshevCheck | None:
    """
    Fraction of paths whose tail sup at t_hi exceeds 2 (c_m exp(-zeta_m t_hi))**(1/m)
    for the largest m with a tail fit. Markov's inequality bounds it by 2**-m.
    """
    fitted = [m for m, fit in tail_fits.items() if fit is not None]
    if not fitted or tails.shape[0] == 0:
        return None
    m = max(fitted)
    fit = tail_fits[m]
    threshold = 2.0 * (fit.c_hat * np.exp(-fit.zeta_hat * t_hi)) ** (1.0 / m)
    k = int(np.argmin(np.abs(times - t_hi)))
    fraction = float(np.mean(tails[:, k] > threshold))
    return ChebyshevCheck(m=m, t=float(times[k]), threshold=float(threshold), fraction=fraction)


def run_ensemble(cfg: EnsembleConfig, problem) -> EnsembleSummary:
    """
    Run cfg.n_paths paths of `problem` (a problem.Problem) and aggregate them.
    Failed paths are listed and left out of every statistic; more than
    PARTIAL_FAILURE_FRACTION of them marks the summary partial.
    """
    t_end = problem.integrator.t_end
    window = cfg.window(t_end)
    times = record_grid(t_end, cfg.record_points)
    summaries = run_paths(cfg, problem, times)

    complete = [s for s in summaries if not s.failed]
    failed = tuple((s.index, s.failure, s.last_good_time) for s in summaries if s.failed)
    partial = len(failed) > settings.PARTIAL_FAILURE_FRACTION * cfg.n_paths
    if failed:
        logger.warning(f"{len(failed)} of {cfg.n_paths} paths failed")

    if complete:
        stack = np.array([s.recorded for s in complete])
        tails = np.array([s.tail_sup for s in complete])
    else:
        stack = tails = np.zeros((0, len(times)))
    moments = _moment_curves(stack, tails, cfg.moment_orders) if complete else ()

    fits = _fit_each(times, moments, window, "values")
    tail_fits = _fit_each(times, moments, window, "tail_values")
    try:
        invariant = invariant_concentration(complete, cfg.burn_in_fraction, cfg.delta_ladder)
    except InsufficientDataError as e:
        logger.warning(f"No invariant-measure statistics: {e}")
        invariant = None

    summary = EnsembleSummary(
        config=cfg,
        t_end=t_end,
        times=times,
        moments=moments,
        fits=fits,
        tail_fits=tail_fits,
        scaling=_scaling(fits),
        tail_scaling=_scaling(tail_fits),
        invariant=invariant,
        chebyshev=chebyshev_check(tail_fits, tails, times, window[1]),
        n_paths=cfg.n_paths,
        failed_paths=failed,
        partial=partial,
    )
    logger.info(
        f"Ensemble of {cfg.n_paths} paths aggregated ({len(complete)} complete"
        f"{', partial' if partial else ''})"
    )
    return summary
