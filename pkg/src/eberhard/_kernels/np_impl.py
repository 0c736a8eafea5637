"""Numpy implementations of the evaluation kernels, plus the 4x4 operator
builders shared with the model layer.

All angles here are radians. The objective value is built two independent
ways in this package: this module assembles explicit matrices and takes
quadratic forms, while the numba backend evaluates a hand-expanded scalar
form of the same quantity. The test suite holds the two routes together.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def state_vec(r: float, omega: float) -> np.ndarray:
    """Two-photon polarization state with mixing ratio r and relative
    phase omega, as a unit vector in the (oo, oe, eo, ee) basis."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"mixing ratio r={r!r} outside [0, 1]")
    k = 0.5 / np.sqrt(1.0 + r * r)
    return np.array(
        [
            k * (1.0 + r) * np.exp(-1j * omega),
            -k * (1.0 - r),
            -k * (1.0 - r),
            k * (1.0 + r) * np.exp(1j * omega),
        ],
        dtype=complex,
    )


def _sigma_mat(phase: complex) -> np.ndarray:
    """First-side polarizer rotation generator: couples (oo,oe) and (eo,ee)."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = phase
    m[1, 0] = np.conj(phase)
    m[2, 3] = phase
    m[3, 2] = np.conj(phase)
    return m


def _tau_mat(phase: complex) -> np.ndarray:
    """Second-side polarizer rotation generator: couples (oo,eo) and (oe,ee)."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 2] = phase
    m[2, 0] = np.conj(phase)
    m[1, 3] = phase
    m[3, 1] = np.conj(phase)
    return m


def sigma_mat(alpha: float, alpha_ref: float) -> np.ndarray:
    return _sigma_mat(np.exp(2j * (alpha - alpha_ref)))


def tau_mat(beta: float, beta_ref: float) -> np.ndarray:
    return _tau_mat(np.exp(2j * (beta - beta_ref)))


def operator_matrix(
    alpha1: float,
    alpha2: float,
    beta1: float,
    beta2: float,
    alpha_ref: float,
    beta_ref: float,
    eta1: float,
    eta2: float,
    zeta: float,
    damping: float = 1.0,
) -> np.ndarray:
    """Per-pair objective operator as a sum of projector products.

    damping scales every polarizer phase factor uniformly; 1.0 gives the
    exact operator, while sin(2*delta)/(2*delta) gives the operator
    averaged over independent uniform angle offsets in [-delta, delta].
    """
    s1 = _sigma_mat(damping * np.exp(2j * (alpha1 - alpha_ref)))
    s2 = _sigma_mat(damping * np.exp(2j * (alpha2 - alpha_ref)))
    t1 = _tau_mat(damping * np.exp(2j * (beta1 - beta_ref)))
    t2 = _tau_mat(damping * np.exp(2j * (beta2 - beta_ref)))
    eye = np.eye(4, dtype=complex)
    coincidence = (
        (eye + s1) @ (eye - t2)
        + (eye - s2) @ (eye + t1)
        + (eye + s2) @ (eye + t2)
        - (eye + s1) @ (eye + t1)
    )
    return (
        0.25 * eta1 * eta2 * coincidence
        + 0.5 * eta1 * (1.0 - eta2) * (eye + s1)
        + 0.5 * eta2 * (1.0 - eta1) * (eye + t1)
        + 2.0 * zeta * eye
    )


def closed_form_matrix(
    eta1: float, eta2: float, zeta: float, d_alpha: float, d_beta: float
) -> np.ndarray:
    """Per-pair objective operator in closed form, parametrized by the
    two setting differences d_alpha = alpha1 - alpha2, d_beta = beta1 - beta2."""
    a = 0.5 * eta1 * (np.exp(2j * d_alpha) - 1.0)
    b = eta2 * (np.exp(2j * d_beta) - 1.0)
    c = eta1 + eta2 - eta1 * eta2
    xi = 4.0 * zeta
    e12 = eta1 * (1.0 - eta2)
    e13 = eta2 * (1.0 - eta1)
    ee = eta1 * eta2
    diag = c + xi
    m = np.array(
        [
            [diag, e12, e13, np.conj(a) * np.conj(b) - ee],
            [e12, diag, a * np.conj(b) - ee, e13],
            [e13, np.conj(a) * b - ee, diag, e12],
            [a * b - ee, e13, e12, diag],
        ],
        dtype=complex,
    )
    return 0.5 * m


def j_per_n(
    r: float, omega: float, theta: float, eta1: float, eta2: float, zeta: float
) -> float:
    """Objective per emitted pair at the matched settings derived from
    (omega, theta): both setting differences equal theta."""
    psi = state_vec(r, omega)
    b = closed_form_matrix(eta1, eta2, zeta, theta, theta)
    return float(np.real(np.vdot(psi, b @ psi)))


def stats_at_offsets(
    r: float,
    omega: float,
    theta: float,
    eta1: float,
    eta2: float,
    zeta: float,
    x1: np.ndarray,
    x2: np.ndarray,
    x3: np.ndarray,
    x4: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """First and second moments <B(x)> and <B(x)^2> of the objective
    operator for batched angle offsets (radians), with phase references
    held at the nominal first settings.

    Returns (mean, second) as float arrays of the common broadcast shape.
    """
    k = 0.5 / np.sqrt(1.0 + r * r)
    psi1 = k * (1.0 + r) * np.exp(-1j * omega)
    psi2 = -k * (1.0 - r)
    psi3 = psi2
    psi4 = k * (1.0 + r) * np.exp(1j * omega)

    p1 = np.exp(2j * np.asarray(x1))
    p2 = np.exp(2j * (np.asarray(x2) - theta))
    q1 = np.exp(2j * np.asarray(x3))
    q2 = np.exp(2j * (np.asarray(x4) - theta))

    k12 = 0.5 * eta1 * (1.0 - eta2)
    k13 = 0.5 * eta2 * (1.0 - eta1)
    kp = 0.25 * eta1 * eta2
    diag = 0.5 * (eta1 + eta2 - eta1 * eta2) + 2.0 * zeta

    c14 = kp * (q2 * p2 - q2 * p1 - q1 * p2 - q1 * p1)
    c23 = kp * (
        q2 * np.conj(p2) - q2 * np.conj(p1) - q1 * np.conj(p2) - q1 * np.conj(p1)
    )

    y1 = diag * psi1 + k12 * p1 * psi2 + k13 * q1 * psi3 + c14 * psi4
    y2 = k12 * np.conj(p1) * psi1 + diag * psi2 + c23 * psi3 + k13 * q1 * psi4
    y3 = k13 * np.conj(q1) * psi1 + np.conj(c23) * psi2 + diag * psi3 + k12 * p1 * psi4
    y4 = np.conj(c14) * psi1 + k13 * np.conj(q1) * psi2 + k12 * np.conj(p1) * psi3 + diag * psi4

    mean = np.real(
        np.conj(psi1) * y1 + np.conj(psi2) * y2 + np.conj(psi3) * y3 + np.conj(psi4) * y4
    )
    second = (
        np.abs(y1) ** 2 + np.abs(y2) ** 2 + np.abs(y3) ** 2 + np.abs(y4) ** 2
    )
    return mean, second


def quad_stats(
    r: float,
    omega: float,
    theta: float,
    eta1: float,
    eta2: float,
    zeta: float,
    nodes: np.ndarray,
    weights: np.ndarray,
) -> tuple[float, float, float]:
    """Tensor-product quadrature moments of the objective under independent
    angle offsets.

    nodes are offset abscissas (radians) and weights their normalized
    one-dimensional weights (sum 1). Returns (E<B>, E<B>^2-moment, E<B^2>):
    the mean, the mean of the squared expectation, and the mean operator
    second moment.
    """
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    x1 = nodes[:, None, None, None]
    x2 = nodes[None, :, None, None]
    x3 = nodes[None, None, :, None]
    x4 = nodes[None, None, None, :]
    mean, second = stats_at_offsets(r, omega, theta, eta1, eta2, zeta, x1, x2, x3, x4)
    w = (
        weights[:, None, None, None]
        * weights[None, :, None, None]
        * weights[None, None, :, None]
        * weights[None, None, None, :]
    )
    m1 = float(np.sum(w * mean))
    m2 = float(np.sum(w * mean * mean))
    q2 = float(np.sum(w * second))
    return m1, m2, q2
