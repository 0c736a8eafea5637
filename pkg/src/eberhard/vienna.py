"""Count-level model of a table-top two-photon experiment with partial
visibility, background, and accidental coincidences.

Unlike the per-pair quadratic form in the model module, this works with
absolute counts over a run of duration t_run: singles and coincidence
rates are traces of polarization projectors against a two-qubit density
matrix, a uniform background adds to every detector, and accidental
coincidences are estimated from the singles rates and the coincidence
window. The same six-term count difference is then formed from the
background- and accidental-laden numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .model import EfficiencyPair, Settings


@dataclass(frozen=True)
class ViennaState:
    """Partially mixed two-photon state with mixing ratio r and fringe
    visibility in [0, 1]; visibility < 1 damps only the coherences."""

    r: float
    visibility: float

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r={self.r!r} outside [0, 1]")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility={self.visibility!r} outside [0, 1]")

    def density(self) -> np.ndarray:
        return self._density.copy()

    @cached_property
    def _density(self) -> np.ndarray:
        return density_matrix(self.r, self.visibility)


def density_matrix(r: float, visibility: float) -> np.ndarray:
    """Two-qubit density matrix in the (oo, oe, eo, ee) basis: population
    weights 1 and r^2 on the middle block with coherence V*r, normalized
    to unit trace."""
    norm = 1.0 + r * r
    rho = np.zeros((4, 4))
    rho[1, 1] = 1.0 / norm
    rho[1, 2] = visibility * r / norm
    rho[2, 1] = rho[1, 2]
    rho[2, 2] = r * r / norm
    return rho


def projection(gamma_deg: float) -> np.ndarray:
    """Rank-one projector onto linear polarization at angle gamma."""
    g = math.radians(gamma_deg)
    c, s = math.cos(g), math.sin(g)
    return np.array([[c * c, c * s], [c * s, s * s]])


@dataclass(frozen=True)
class ViennaExperiment:
    """Fixed apparatus description for one run.

    n_pairs is the number of emitted pairs over the run of duration
    t_run; tau_c is the coincidence window (same time unit as t_run);
    zeta is the false-click rate per unit time, so each singles channel
    collects zeta * t_run background counts over the run.
    """

    state: ViennaState
    eff: EfficiencyPair
    n_pairs: float
    t_run: float
    tau_c: float
    zeta: float
    angles: Settings

    def __post_init__(self):
        if not self.n_pairs >= 0.0:
            raise ValueError(f"n_pairs={self.n_pairs!r} must be >= 0")
        if not self.t_run > 0.0:
            raise ValueError(f"t_run={self.t_run!r} must be > 0")
        if not 0.0 <= self.tau_c <= self.t_run:
            raise ValueError(f"tau_c={self.tau_c!r} outside [0, t_run]")
        if not self.zeta >= 0.0:
            raise ValueError(f"zeta={self.zeta!r} must be >= 0")


_EYE2 = np.eye(2)


def _expectation(rho: np.ndarray, op_a: np.ndarray, op_b: np.ndarray) -> float:
    """Tr[rho (op_a (x) op_b)], with the tensor product built by
    broadcasting; np.kron is an order of magnitude slower here and this
    sits inside the angle-optimization loop."""
    pair = (op_a[:, None, :, None] * op_b[None, :, None, :]).reshape(4, 4)
    return float(np.trace(rho @ pair).real)


def singles_a(exp: ViennaExperiment, alpha_deg: float) -> float:
    """Ordinary-channel singles count on the first side at angle alpha,
    including background."""
    mean = _expectation(exp.state._density, projection(alpha_deg), _EYE2)
    return exp.eff.eta1 * exp.n_pairs * mean + exp.zeta * exp.t_run


def singles_b(exp: ViennaExperiment, beta_deg: float) -> float:
    """Ordinary-channel singles count on the second side at angle beta,
    including background."""
    mean = _expectation(exp.state._density, _EYE2, projection(beta_deg))
    return exp.eff.eta2 * exp.n_pairs * mean + exp.zeta * exp.t_run


def true_coincidences(exp: ViennaExperiment, alpha_deg: float, beta_deg: float) -> float:
    """Genuine ordinary-ordinary coincidence count at a setting pair."""
    mean = _expectation(exp.state._density, projection(alpha_deg), projection(beta_deg))
    return exp.eff.eta1 * exp.eff.eta2 * exp.n_pairs * mean


def accidentals(
    s_a: float, s_b: float, n_true: float, tau_c: float, t_run: float
) -> float:
    """Accidental-coincidence estimate from singles counts.

    Uncorrelated singles arriving within the window tau_c pair up at rate
    s_a*s_b*tau_c/t_run; the factors (1 - n_true/s) remove the fraction of
    singles already consumed by genuine coincidences. Zero singles on a
    side means no accidental partners, handled without dividing by zero.
    """
    if tau_c < 0.0 or t_run <= 0.0:
        raise ValueError("need tau_c >= 0 and t_run > 0")
    base = s_a * s_b * tau_c / t_run
    if base == 0.0:
        return 0.0
    frac_a = 1.0 - n_true / s_a if s_a > 0.0 else 0.0
    frac_b = 1.0 - n_true / s_b if s_b > 0.0 else 0.0
    return base * frac_a * frac_b


def _observed_coincidences(exp: ViennaExperiment, alpha_deg: float, beta_deg: float) -> float:
    n_true = true_coincidences(exp, alpha_deg, beta_deg)
    s_a = singles_a(exp, alpha_deg)
    s_b = singles_b(exp, beta_deg)
    return n_true + accidentals(s_a, s_b, n_true, exp.tau_c, exp.t_run)


def vienna_j(exp: ViennaExperiment, angles: Settings | None = None) -> float:
    """Count difference over one run: the (alpha1, beta1) coincidence
    enters negatively against the two first-setting singles and the three
    remaining coincidence combinations.

    Accidentals inflate every coincidence term, so a negative value here
    is a violation witness under the same sign convention as the per-pair
    objective."""
    ang = angles if angles is not None else exp.angles
    rho = exp.state._density
    proj_a = (projection(ang.alpha1), projection(ang.alpha2))
    proj_b = (projection(ang.beta1), projection(ang.beta2))
    background = exp.zeta * exp.t_run
    pair_rate = exp.eff.eta1 * exp.eff.eta2 * exp.n_pairs
    s_a = tuple(
        exp.eff.eta1 * exp.n_pairs * _expectation(rho, p, _EYE2) + background
        for p in proj_a
    )
    s_b = tuple(
        exp.eff.eta2 * exp.n_pairs * _expectation(rho, _EYE2, p) + background
        for p in proj_b
    )

    def observed(i: int, k: int) -> float:
        n_true = pair_rate * _expectation(rho, proj_a[i], proj_b[k])
        return n_true + accidentals(s_a[i], s_b[k], n_true, exp.tau_c, exp.t_run)

    return float(
        -observed(0, 0) + s_a[0] - observed(0, 1) + s_b[0]
        - observed(1, 0) + observed(1, 1)
    )


def with_angles(exp: ViennaExperiment, angles: Settings) -> ViennaExperiment:
    return replace(exp, angles=angles)


def with_swapped_detectors(exp: ViennaExperiment) -> ViennaExperiment:
    return replace(exp, eff=exp.eff.swapped())
