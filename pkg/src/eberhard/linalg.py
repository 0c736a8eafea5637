"""Dense complex linear algebra for the 2x2 / 4x4 spaces of a two-photon
polarization model.

Everything here is self-contained: the eigensolver is a cyclic Jacobi
iteration specialized to small Hermitian matrices, so results are
reproducible bit-for-bit across environments regardless of the LAPACK
build numpy happens to link.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERM_TOL = 1e-12
NORM_TOL = 1e-12
IMAG_TOL = 1e-9
OFF_DIAG_TOL = 1e-13


class ConvergenceError(RuntimeError):
    """The Jacobi sweep budget ran out before the off-diagonal norm target."""


def _require_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{what} contains non-finite entries")


def tensor2x2(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices in the row-major 4x4 basis
    (1,1), (1,2), (2,1), (2,2)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError("tensor2x2 expects two 2x2 matrices")
    _require_finite(a, "left factor")
    _require_finite(b, "right factor")
    return np.kron(a, b)


def as_hermitian(m, tol: float = HERM_TOL) -> np.ndarray:
    """Check that m is Hermitian to within tol entrywise and return the
    exactly Hermitian average (m + m^H)/2.

    Raises ValueError when the defect exceeds tol; silent symmetrization of
    a genuinely non-Hermitian matrix would hide upstream construction bugs.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    _require_finite(m, "matrix")
    defect = np.max(np.abs(m - m.conj().T))
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})")
    return 0.5 * (m + m.conj().T)


def as_state_vec(v, tol: float = NORM_TOL) -> np.ndarray:
    """Validate a length-4 complex vector with unit Euclidean norm."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape != (4,):
        raise ValueError("expected a length-4 state vector")
    _require_finite(v, "state vector")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state vector norm {norm!r} deviates from 1 beyond {tol:.1e}")
    return v


def quad_form(m, psi) -> float:
    """Real quadratic form <psi| m |psi> for Hermitian m.

    The imaginary part is a numerical residual only; if it exceeds
    IMAG_TOL the input was not Hermitian and a ValueError is raised.
    """
    m = np.asarray(m, dtype=complex)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    value = complex(np.vdot(psi, m @ psi))
    if abs(value.imag) > IMAG_TOL:
        raise ValueError(f"quadratic form has imaginary residual {value.imag:.3e}")
    return value.real


def _off_diag_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


@dataclass(frozen=True)
class EigenDecomp4:
    """Spectral decomposition of a 4x4 Hermitian matrix.

    values:  eigenvalues in ascending order, shape (4,)
    vectors: orthonormal eigenvectors as columns, column i pairs with
             values[i]
    """

    values: np.ndarray
    vectors: np.ndarray


def herm_eig4(m, *, max_sweeps: int = 100, off_tol: float = OFF_DIAG_TOL) -> EigenDecomp4:
    """Eigendecomposition of a 4x4 Hermitian matrix by cyclic Jacobi
    rotations with complex Givens transforms.

    The iteration stops once the off-diagonal Frobenius norm falls below
    off_tol * max(1, ||m||_F); the relative scaling keeps the criterion
    meaningful for matrices far from unit scale. Exceeding max_sweeps
    raises ConvergenceError rather than returning a silently inaccurate
    decomposition.
    """
    a = as_hermitian(m)
    if a.shape != (4, 4):
        raise ValueError("herm_eig4 expects a 4x4 matrix")
    n = 4
    v = np.eye(n, dtype=complex)
    tol_abs = off_tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        if _off_diag_norm(a) <= tol_abs:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= tol_abs / 16.0:
                    continue
                phase = apq / mag
                # tangent of the rotation angle, smaller-magnitude root
                d = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if d == 0.0:
                    t = 1.0
                else:
                    t = np.sign(d) / (abs(d) + np.hypot(d, 1.0))
                c = 1.0 / np.sqrt(1.0 + t * t)
                sp = (t * c) * phase

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - np.conj(sp) * col_q
                a[:, q] = sp * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sp * row_q
                a[q, :] = np.conj(sp) * row_p + c * row_q

                vcol_p = v[:, p].copy()
                vcol_q = v[:, q].copy()
                v[:, p] = c * vcol_p - np.conj(sp) * vcol_q
                v[:, q] = sp * vcol_p + c * vcol_q

    if _off_diag_norm(a) > tol_abs:
        raise ConvergenceError(
            f"off-diagonal norm {_off_diag_norm(a):.3e} above {tol_abs:.3e} "
            f"after {max_sweeps} sweeps"
        )

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomp4(values=w[order], vectors=v[:, order])
