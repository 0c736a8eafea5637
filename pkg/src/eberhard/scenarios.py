"""Scenario runners: turn validated configs into result tables.

Each runner is a pure function of its config; all randomness flows from
the config seed through per-cell child seeds, so reruns are reproducible
including under the optional process pool (results are collected in grid
order regardless of completion order).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import fluctuation as fl
from . import model, vienna
from .config import (
    FluctuationConfig,
    OptimizerSettings,
    SweepEtaConfig,
    SweepEtaPairConfig,
    VerifyEigenConfig,
    ViennaConfig,
)
from .model import EberhardParams, EberhardState, EfficiencyPair
from .reporting import NO_VALUE, ResultTable, to_plot_data
from .simplex import Bounds, OptResult, SimplexConfig, multi_start, nelder_mead
from . import _kernels

# below this the optimum is treated as a genuine violation; above it the
# residual negativity is optimizer stopping noise on the J >= 0 boundary
VIOLATION_J_THRESHOLD = -1e-8

EIGEN_GAP_TOL = 1e-6
EIGEN_VARIANCE_TOL = 1e-8

_BOX = Bounds.box(fl.DEFAULT_BOX)


@dataclass
class ScenarioOutcome:
    table: ResultTable
    failures: list[str] = field(default_factory=list)
    plot_data: ResultTable | None = None


def _simplex_config(opt: OptimizerSettings) -> SimplexConfig:
    return SimplexConfig(
        f_tol=opt.f_tol,
        x_tol=opt.x_tol,
        max_iter=opt.max_iter,
        initial_step=fl.DEFAULT_STEPS,
    )


def _cell_seed(base_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=base_seed, spawn_key=(index,))


class _JObjective:
    """Unperturbed objective over (r, omega_deg, theta_deg); picklable."""

    def __init__(self, eta1: float, eta2: float, zeta: float):
        self.eta1 = eta1
        self.eta2 = eta2
        self.zeta = zeta

    def __call__(self, x) -> float:
        return float(
            _kernels.j_per_n(
                float(x[0]),
                np.deg2rad(float(x[1])),
                np.deg2rad(float(x[2])),
                self.eta1,
                self.eta2,
                self.zeta,
            )
        )


def _optimize_j(eta1, eta2, zeta, opt: OptimizerSettings, seed):
    objective = _JObjective(eta1, eta2, zeta)
    return multi_start(objective, _BOX, opt.n_starts, seed, _simplex_config(opt))


def _map_cells(fn, items, workers: int):
    if workers <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _sweep_pair_cell(item, zeta: float, opt: OptimizerSettings, base_seed: int):
    index, eta1, eta2 = item
    res = _optimize_j(eta1, eta2, zeta, opt, _cell_seed(base_seed, index))
    r, omega, theta = res.x
    return (eta1, eta2, float(r), float(omega), float(theta), res.f, res.converged)


def run_sweep_eta(cfg: SweepEtaConfig) -> ScenarioOutcome:
    """Optimize the objective at equal detector efficiencies across a grid."""
    items = [(i, eta, eta) for i, eta in enumerate(cfg.eta_grid)]
    fn = partial(_sweep_pair_cell, zeta=cfg.zeta, opt=cfg.optimizer, base_seed=cfg.seed)
    cells = _map_cells(fn, items, cfg.output.workers)

    table = ResultTable(columns=("eta", "r", "omega_deg", "theta_deg", "j_per_n"))
    failures = []
    for eta1, _eta2, r, omega, theta, j, converged in cells:
        table.append((eta1, r, omega, theta, j))
        if not converged:
            failures.append(f"optimizer did not converge at eta={eta1:g}")
    plot = to_plot_data(table, ("eta",)) if cfg.output.plot_data else None
    return ScenarioOutcome(table=table, failures=failures, plot_data=plot)


def run_sweep_eta_pair(cfg: SweepEtaPairConfig) -> ScenarioOutcome:
    """Optimize across the product grid of unequal efficiencies, with the
    tolerable-background column for violating cells."""
    items = []
    index = 0
    for eta1 in cfg.eta1_grid:
        for eta2 in cfg.eta2_grid:
            items.append((index, eta1, eta2))
            index += 1
    fn = partial(_sweep_pair_cell, zeta=cfg.zeta, opt=cfg.optimizer, base_seed=cfg.seed)
    cells = _map_cells(fn, items, cfg.output.workers)

    table = ResultTable(
        columns=("eta1", "eta2", "r", "omega_deg", "theta_deg", "j_per_n", "zeta_max")
    )
    failures = []
    for eta1, eta2, r, omega, theta, j, converged in cells:
        if j < VIOLATION_J_THRESHOLD:
            zmax = model.zeta_max(j).value
        else:
            zmax = NO_VALUE
        table.append((eta1, eta2, r, omega, theta, j, zmax))
        if not converged:
            failures.append(
                f"optimizer did not converge at eta1={eta1:g}, eta2={eta2:g}"
            )
    plot = to_plot_data(table, ("eta1", "eta2")) if cfg.output.plot_data else None
    return ScenarioOutcome(table=table, failures=failures, plot_data=plot)


class _ViennaObjective:
    """Count difference over the four angles (degrees); picklable."""

    def __init__(self, exp: vienna.ViennaExperiment):
        self.exp = exp

    def __call__(self, x) -> float:
        angles = model.Settings(
            alpha1=float(x[0]), alpha2=float(x[1]), beta1=float(x[2]), beta2=float(x[3])
        )
        return vienna.vienna_j(self.exp, angles)


def _optimize_vienna(exp, opt: OptimizerSettings, seed, span_deg: float = 45.0):
    """Best of a deterministic start at the configured angles plus seeded
    random starts in a box around them."""
    objective = _ViennaObjective(exp)
    x0 = exp.angles.as_array()
    cfg = SimplexConfig(
        f_tol=opt.f_tol, x_tol=opt.x_tol, max_iter=opt.max_iter, initial_step=5.0
    )
    best = nelder_mead(objective, x0, cfg, bounds=None)
    if opt.n_starts > 1:
        box = Bounds(x0 - span_deg, x0 + span_deg)
        rand = multi_start(objective, box, opt.n_starts - 1, seed, cfg)
        winner = rand if rand.f < best.f else best
        best = OptResult(
            x=winner.x,
            f=winner.f,
            iterations=best.iterations + rand.iterations,
            converged=winner.converged,
            restarts_used=best.restarts_used + rand.restarts_used,
        )
    return best


def run_vienna(cfg: ViennaConfig) -> ScenarioOutcome:
    """Count-level objective at the configured angles, at re-optimized
    angles, and at re-optimized angles with the detectors swapped."""
    exp = cfg.experiment
    table = ResultTable(
        columns=("case", "alpha1_deg", "alpha2_deg", "beta1_deg", "beta2_deg", "j")
    )
    failures = []

    a = exp.angles
    table.append(("configured", a.alpha1, a.alpha2, a.beta1, a.beta2, vienna.vienna_j(exp)))

    res = _optimize_vienna(exp, cfg.optimizer, _cell_seed(cfg.seed, 0))
    table.append(("optimized", *(float(v) for v in res.x), res.f))
    if not res.converged:
        failures.append("optimizer did not converge for the configured detectors")

    swapped = vienna.with_swapped_detectors(exp)
    res_sw = _optimize_vienna(swapped, cfg.optimizer, _cell_seed(cfg.seed, 1))
    table.append(("swapped", *(float(v) for v in res_sw.x), res_sw.f))
    if not res_sw.converged:
        failures.append("optimizer did not converge for the swapped detectors")

    plot = to_plot_data(table, ("case",)) if cfg.output.plot_data else None
    return ScenarioOutcome(table=table, failures=failures, plot_data=plot)


def _fluctuation_cell(item, cfg: FluctuationConfig):
    index, eta = item
    eff = EfficiencyPair(eta, eta)
    spec = fl.FluctuationSpec(delta_deg=cfg.delta_deg, quad_order=cfg.quad_order)
    opt = cfg.optimizer
    scfg = _simplex_config(opt)

    base = _optimize_j(eta, eta, cfg.zeta, opt, _cell_seed(cfg.seed, 3 * index))
    params0 = EberhardParams(
        state=EberhardState(r=float(base.x[0]), omega_deg=float(base.x[1])),
        theta_deg=float(base.x[2]),
        eff=eff,
        zeta=cfg.zeta,
    )
    rows = [("j", params0, fl.smoothed_stats(params0, spec), base.converged)]

    jd_obj = fl.SmoothedObjective(eff, cfg.zeta, spec)
    jd = multi_start(jd_obj, _BOX, opt.n_starts, _cell_seed(cfg.seed, 3 * index + 1), scfg)
    warm = nelder_mead(jd_obj, base.x, scfg, _BOX)
    if warm.f < jd.f:
        jd = warm
    params1 = EberhardParams(
        state=EberhardState(r=float(jd.x[0]), omega_deg=float(jd.x[1])),
        theta_deg=float(jd.x[2]),
        eff=eff,
        zeta=cfg.zeta,
    )
    rows.append(("j_delta", params1, fl.smoothed_stats(params1, spec), jd.converged))

    snr = fl.optimize_snr(
        eff,
        cfg.delta_deg,
        zeta=cfg.zeta,
        quad_order=cfg.quad_order,
        n_starts=opt.n_starts,
        seed=_cell_seed(cfg.seed, 3 * index + 2),
        config=scfg,
        x0=base.x,
    )
    rows.append(("k", snr.params, snr.report, snr.result.converged))
    return eta, rows


def run_fluctuation(cfg: FluctuationConfig) -> ScenarioOutcome:
    """For each efficiency, compare three designs: the unperturbed
    optimum, the smoothed-objective optimum, and the signal-to-noise
    optimum, all evaluated under the same fluctuation level."""
    items = list(enumerate(cfg.eta_grid))
    fn = partial(_fluctuation_cell, cfg=cfg)
    cells = _map_cells(fn, items, cfg.output.workers)

    table = ResultTable(
        columns=(
            "eta", "optimized_for", "r", "omega_deg", "theta_deg",
            "j_per_n", "j_delta", "sigma_delta", "k",
        )
    )
    failures = []
    for eta, rows in cells:
        for label, params, report, converged in rows:
            table.append(
                (
                    eta,
                    label,
                    params.state.r,
                    params.state.omega_deg,
                    params.theta_deg,
                    report.j_nominal,
                    report.j_delta,
                    report.sigma_delta,
                    report.k if math.isfinite(report.k) else NO_VALUE,
                )
            )
            if not converged:
                failures.append(
                    f"optimizer did not converge at eta={eta:g} ({label} row)"
                )
    plot = to_plot_data(table, ("eta", "optimized_for")) if cfg.output.plot_data else None
    return ScenarioOutcome(table=table, failures=failures, plot_data=plot)


def _verify_cell(item, cfg: VerifyEigenConfig):
    index, eta = item
    res = _optimize_j(eta, eta, cfg.zeta, cfg.optimizer, _cell_seed(cfg.seed, index))
    r, omega, theta = (float(v) for v in res.x)
    r_check = min(max(r + cfg.r_offset, 0.0), 1.0)
    eff = EfficiencyPair(eta, eta)
    b = model.closed_form_B(eff, cfg.zeta, theta, theta)
    psi = model.eberhard_state(r_check, omega)
    check = model.courant_fischer_check(b, psi)
    return (eta, res.f, check, res.converged)


def run_verify_eigen(cfg: VerifyEigenConfig) -> ScenarioOutcome:
    """Optimize per efficiency, then check that the optimized state is
    the minimal eigenvector of its own objective operator: the Rayleigh
    gap and the quantum variance must both vanish within tolerance.

    A nonzero r_offset deliberately detunes the state to exercise the
    failure path.
    """
    items = list(enumerate(cfg.eta_grid))
    fn = partial(_verify_cell, cfg=cfg)
    cells = _map_cells(fn, items, cfg.output.workers)

    table = ResultTable(
        columns=("eta", "j_per_n", "lambda_min", "rayleigh_gap", "quantum_variance")
    )
    failures = []
    for eta, j, check, converged in cells:
        table.append((eta, j, check.lambda_min, check.rayleigh_gap, check.quantum_variance))
        if not converged:
            failures.append(f"optimizer did not converge at eta={eta:g}")
        if check.rayleigh_gap > EIGEN_GAP_TOL:
            failures.append(
                f"rayleigh gap {check.rayleigh_gap:.3e} above {EIGEN_GAP_TOL:g} "
                f"at eta={eta:g}"
            )
        if check.quantum_variance > EIGEN_VARIANCE_TOL:
            failures.append(
                f"quantum variance {check.quantum_variance:.3e} above "
                f"{EIGEN_VARIANCE_TOL:g} at eta={eta:g}"
            )
    plot = to_plot_data(table, ("eta",)) if cfg.output.plot_data else None
    return ScenarioOutcome(table=table, failures=failures, plot_data=plot)


RUNNERS = {
    "sweep-eta": run_sweep_eta,
    "sweep-eta-pair": run_sweep_eta_pair,
    "vienna": run_vienna,
    "fluctuation": run_fluctuation,
    "verify-eigen": run_verify_eigen,
}
