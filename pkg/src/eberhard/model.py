"""Quadratic-form model of a two-channel polarization Bell test with
inefficient detectors.

The figure of merit is a count difference J between one negatively
weighted coincidence rate and five positively weighted rates taken at two
polarizer settings per side. For a fixed emitted-pair number N it reduces
to the quadratic form J/N = <psi| B |psi> of a 4x4 Hermitian operator B
that depends only on detector efficiencies, background rate, and the
differences between the settings. Local realism bounds J below by zero,
so any parameter point with J < 0 certifies a violation.

Angles at this layer are degrees; radians appear only inside kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels, linalg
from ._kernels import np_impl


@dataclass(frozen=True)
class EfficiencyPair:
    """Detector efficiencies for the two arms, each in (0, 1]."""

    eta1: float
    eta2: float

    def __post_init__(self):
        for name, eta in (("eta1", self.eta1), ("eta2", self.eta2)):
            if not 0.0 < eta <= 1.0:
                raise ValueError(f"{name}={eta!r} outside (0, 1]")

    def swapped(self) -> "EfficiencyPair":
        return EfficiencyPair(self.eta2, self.eta1)


@dataclass(frozen=True)
class Settings:
    """Polarizer angles in degrees: two per side."""

    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name}={v!r} is not finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha1, self.alpha2, self.beta1, self.beta2], dtype=float)


@dataclass(frozen=True)
class EberhardState:
    """Source state parametrized by mixing ratio r in [0, 1] and relative
    phase omega_deg. r = 1 is the maximally entangled state; r -> 0
    approaches a product state."""

    r: float
    omega_deg: float

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r={self.r!r} outside [0, 1]")
        if not np.isfinite(self.omega_deg):
            raise ValueError(f"omega_deg={self.omega_deg!r} is not finite")

    def vector(self) -> np.ndarray:
        return np_impl.state_vec(self.r, np.deg2rad(self.omega_deg))


@dataclass(frozen=True)
class EberhardParams:
    """Complete parameter point: source state, common setting difference
    theta_deg, detector efficiencies, and background fraction zeta >= 0."""

    state: EberhardState
    theta_deg: float
    eff: EfficiencyPair
    zeta: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.theta_deg):
            raise ValueError(f"theta_deg={self.theta_deg!r} is not finite")
        if not (np.isfinite(self.zeta) and self.zeta >= 0.0):
            raise ValueError(f"zeta={self.zeta!r} must be finite and >= 0")

    def settings(self) -> Settings:
        return settings_for(self.state.omega_deg, self.theta_deg)


def settings_for(omega_deg: float, theta_deg: float) -> Settings:
    """Measurement settings adapted to the state phase: the first settings
    are fixed by omega and the second settings sit theta below them."""
    alpha1 = 0.5 * omega_deg - 90.0
    beta1 = 0.5 * omega_deg
    return Settings(
        alpha1=alpha1,
        alpha2=alpha1 - theta_deg,
        beta1=beta1,
        beta2=beta1 - theta_deg,
    )


def eberhard_state(r: float, omega_deg: float) -> np.ndarray:
    """Unit state vector in the (oo, oe, eo, ee) basis."""
    return EberhardState(r, omega_deg).vector()


def sigma_op(alpha_deg: float, alpha_ref_deg: float) -> np.ndarray:
    """First-side single-polarizer operator relative to a reference angle."""
    return np_impl.sigma_mat(np.deg2rad(alpha_deg), np.deg2rad(alpha_ref_deg))


def tau_op(beta_deg: float, beta_ref_deg: float) -> np.ndarray:
    """Second-side single-polarizer operator relative to a reference angle."""
    return np_impl.tau_mat(np.deg2rad(beta_deg), np.deg2rad(beta_ref_deg))


def closed_form_B(
    eff: EfficiencyPair, zeta: float, d_alpha_deg: float, d_beta_deg: float
) -> np.ndarray:
    """Objective operator (per emitted pair) in closed form from the two
    setting differences alpha1 - alpha2 and beta1 - beta2."""
    return np_impl.closed_form_matrix(
        eff.eta1, eff.eta2, zeta, np.deg2rad(d_alpha_deg), np.deg2rad(d_beta_deg)
    )


def operator_sum_B(
    settings: Settings,
    eff: EfficiencyPair,
    zeta: float,
    alpha_ref_deg: float | None = None,
    beta_ref_deg: float | None = None,
) -> np.ndarray:
    """Objective operator assembled from single-polarizer operator products.

    Phase references default to the first settings; the closed form is
    recovered exactly in that gauge. Algebraically the quadratic form is
    reference-independent because the state and operators transform
    together under a common phase convention, and the defaults keep the
    matrix itself comparable entrywise with closed_form_B.
    """
    if alpha_ref_deg is None:
        alpha_ref_deg = settings.alpha1
    if beta_ref_deg is None:
        beta_ref_deg = settings.beta1
    return np_impl.operator_matrix(
        np.deg2rad(settings.alpha1),
        np.deg2rad(settings.alpha2),
        np.deg2rad(settings.beta1),
        np.deg2rad(settings.beta2),
        np.deg2rad(alpha_ref_deg),
        np.deg2rad(beta_ref_deg),
        eff.eta1,
        eff.eta2,
        zeta,
    )


def j_per_n(params: EberhardParams) -> float:
    """Objective per emitted pair at a parameter point. Negative values
    witness a violation of the local-realism bound."""
    return float(
        _kernels.j_per_n(
            params.state.r,
            np.deg2rad(params.state.omega_deg),
            np.deg2rad(params.theta_deg),
            params.eff.eta1,
            params.eff.eta2,
            params.zeta,
        )
    )


class ZetaMax(NamedTuple):
    """Largest tolerable background fraction, with a violation flag."""

    value: float
    violation: bool


def zeta_max(j0_per_n: float) -> ZetaMax:
    """Background fraction at which a violation J0/N < 0 observed at
    zeta = 0 is exactly extinguished. The background enters the operator
    as +2*zeta*I, shifting the quadratic form by 2*zeta."""
    if not np.isfinite(j0_per_n):
        raise ValueError(f"j0_per_n={j0_per_n!r} is not finite")
    if j0_per_n >= 0.0:
        return ZetaMax(0.0, False)
    return ZetaMax(-0.5 * j0_per_n, True)


@dataclass(frozen=True)
class SpectralCheck:
    """How close a state comes to the variational optimum of an operator.

    rayleigh_gap is <B> - lambda_min >= 0 and quantum_variance is
    <B^2> - <B>^2 >= 0; both vanish exactly on the minimal eigenvector.
    """

    lambda_min: float
    rayleigh_gap: float
    quantum_variance: float


def courant_fischer_check(b: np.ndarray, psi: np.ndarray) -> SpectralCheck:
    """Evaluate the min-max optimality diagnostics of psi against b."""
    b = linalg.as_hermitian(b)
    psi = linalg.as_state_vec(psi)
    dec = linalg.herm_eig4(b)
    mean = linalg.quad_form(b, psi)
    second = float(np.real(np.vdot(b @ psi, b @ psi)))
    return SpectralCheck(
        lambda_min=float(dec.values[0]),
        rayleigh_gap=mean - float(dec.values[0]),
        quantum_variance=second - mean * mean,
    )
