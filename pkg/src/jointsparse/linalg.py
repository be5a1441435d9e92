"""Dense matrix utilities: validation, serialization, spectra, nullspaces.

Matrices are plain float64 numpy arrays, validated and frozen (read-only) on
the way in.  Symmetric eigenproblems go through LAPACK via ``numpy.linalg``;
``solve_linear`` is a self-contained partially pivoted elimination whose
singularity test is part of its contract.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import AllZeroMatrix, DomainError, RankDeficient, Singular

#: Default relative threshold separating "zero" eigenvalues from positive ones.
REL_EIG_TOL = 1e-10


def as_matrix(data, name: str = "matrix", allow_empty: bool = False) -> np.ndarray:
    """Validate *data* as a finite 2-D float64 matrix and return it read-only.

    Rejects ragged nested lists, non-2-D arrays, NaN/inf entries, and (unless
    *allow_empty*) zero-length axes.
    """
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name}: not interpretable as a numeric matrix: {exc}") from None
    if arr.ndim != 2:
        raise DomainError(f"{name}: expected a 2-D matrix, got ndim={arr.ndim}")
    if not allow_empty and (arr.shape[0] == 0 or arr.shape[1] == 0):
        raise DomainError(f"{name}: empty dimension in shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: contains non-finite entries")
    out = np.array(arr, dtype=float, order="C")
    out.flags.writeable = False
    return out


# ---------------------------------------------------------------------------
# serialization


def matrix_to_json(mat: np.ndarray) -> list[list[float]]:
    """Nested-list form, suitable for json.dump."""
    return [[float(v) for v in row] for row in np.asarray(mat)]


def matrix_from_json(obj, name: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise DomainError(f"{name}: JSON matrix must be a non-empty list of rows")
    ncols = len(obj[0])
    if any(len(r) != ncols for r in obj):
        raise DomainError(f"{name}: ragged rows in JSON matrix")
    return as_matrix(obj, name=name)


def matrix_to_csv(mat: np.ndarray) -> str:
    """One row per line, comma-separated, repr-round-trip floats, '.' decimal."""
    lines = [",".join(repr(float(v)) for v in row) for row in np.asarray(mat)]
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str, name: str = "matrix") -> np.ndarray:
    rows = []
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError:
            raise DomainError(f"{name}: line {ln} is not comma-separated numbers") from None
    if not rows:
        raise DomainError(f"{name}: no data rows")
    if len({len(r) for r in rows}) != 1:
        raise DomainError(f"{name}: ragged rows in CSV")
    return as_matrix(rows, name=name)


def matrix_dumps(mat: np.ndarray) -> str:
    return json.dumps(matrix_to_json(mat))


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class EigSummary:
    """Spectral summary of A^T A.

    ``ratio = lambda_max / lambda_min_plus`` where ``lambda_min_plus`` is the
    smallest eigenvalue strictly above ``zero_threshold``.
    """

    lambda_max: float
    lambda_min_plus: float
    ratio: float
    rank: int
    zero_threshold: float


def symmetric_eig(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix, ascending. Input is symmetrized first."""
    m = as_matrix(mat, name="symmetric matrix")
    if m.shape[0] != m.shape[1]:
        raise DomainError(f"symmetric_eig: matrix must be square, got {m.shape}")
    sym = 0.5 * (m + m.T)
    evals, evecs = np.linalg.eigh(sym)
    return evals, evecs


def gram_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of A^T A (ascending), computed on the smaller Gram matrix.

    For m < n the m nonzero candidates come from A A^T and the remaining
    n - m eigenvalues are exact zeros.
    """
    a = as_matrix(a, name="A")
    m, n = a.shape
    if m < n:
        small = np.linalg.eigvalsh(a @ a.T)
        evals = np.concatenate([np.zeros(n - m), small])
        evals.sort()
    else:
        evals = np.linalg.eigvalsh(a.T @ a)
    return np.maximum(evals, 0.0)  # clip LAPACK's tiny negative noise on PSD input


def eig_summary(a: np.ndarray, zero_threshold: float | None = None) -> EigSummary:
    """Summarize the spectrum of A^T A.

    Parameters
    ----------
    a : (m, n) array
    zero_threshold : float, optional
        Absolute cutoff below which eigenvalues count as zero.  Defaults to
        ``1e-10 * lambda_max`` (relative).

    Raises
    ------
    AllZeroMatrix
        If no eigenvalue clears the threshold.
    """
    evals = gram_eigenvalues(a)
    lam_max = float(evals[-1])
    if zero_threshold is None:
        zero_threshold = REL_EIG_TOL * lam_max
    elif zero_threshold <= 0:
        raise DomainError("zero_threshold must be positive")
    positive = evals[evals > zero_threshold]
    if positive.size == 0:
        raise AllZeroMatrix("no eigenvalue of A^T A exceeds the zero threshold")
    lam_min_plus = float(positive[0])
    return EigSummary(
        lambda_max=lam_max,
        lambda_min_plus=lam_min_plus,
        ratio=lam_max / lam_min_plus,
        rank=int(positive.size),
        zero_threshold=float(zero_threshold),
    )


# ---------------------------------------------------------------------------
# nullspace


@dataclass(frozen=True)
class NullspaceBasis:
    """Orthonormal basis of Ker(A), one column per basis vector.

    ``basis`` has shape (n, nullity); nullity 0 gives an (n, 0) array.  Each
    column's sign is fixed so its largest-magnitude entry (first such entry on
    ties) is positive.
    """

    basis: np.ndarray
    nullity: int
    orthonormal: bool = True


def _fix_column_signs(basis: np.ndarray) -> np.ndarray:
    out = basis.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            out[:, j] = -col
    return out


def nullspace_basis(a: np.ndarray, tol_null: float | None = None) -> NullspaceBasis:
    """Orthonormal kernel basis from the eigenvectors of A^T A.

    Eigenvalues at or below ``tol_null`` (default ``1e-10 * lambda_max``)
    are treated as zero.
    """
    a = as_matrix(a, name="A")
    evals, evecs = symmetric_eig(a.T @ a)
    lam_max = max(float(evals[-1]), 0.0)
    if tol_null is None:
        tol_null = REL_EIG_TOL * lam_max
    elif tol_null <= 0:
        raise DomainError("tol_null must be positive")
    null_mask = evals <= tol_null
    basis = _fix_column_signs(evecs[:, null_mask])
    basis = np.array(basis, order="C")
    basis.flags.writeable = False
    return NullspaceBasis(basis=basis, nullity=int(null_mask.sum()))


# ---------------------------------------------------------------------------
# solves


def min_norm_solution(a: np.ndarray, b: np.ndarray, tol_null: float | None = None) -> np.ndarray:
    """Minimum-Frobenius-norm solution X0 = A^T (A A^T)^{-1} B of A X = B.

    Requires A to have full row rank: raises RankDeficient when the smallest
    eigenvalue of A A^T is within ``tol_null`` (default relative 1e-10) of zero.
    """
    a = as_matrix(a, name="A")
    b = as_matrix(b, name="B")
    if a.shape[0] != b.shape[0]:
        raise DomainError(f"row mismatch: A is {a.shape}, B is {b.shape}")
    gram = a @ a.T
    evals = np.linalg.eigvalsh(gram)
    lam_max = max(float(evals[-1]), 0.0)
    cut = tol_null if tol_null is not None else REL_EIG_TOL * lam_max
    if lam_max == 0.0 or float(evals[0]) <= cut:
        raise RankDeficient("A A^T is singular within tolerance: A lacks full row rank")
    x0 = a.T @ np.linalg.solve(gram, b)
    x0 = np.array(x0, order="C")
    x0.flags.writeable = False
    return x0


def solve_linear(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve M Z = RHS by Gaussian elimination with partial pivoting.

    Raises Singular when the pivot chosen at any step falls below
    ``1e-12 * max|M|`` (the largest magnitude in the initial matrix), or when
    M is entirely zero.
    """
    m = np.array(as_matrix(mat, name="M"))
    r = np.array(as_matrix(rhs, name="RHS"))
    n = m.shape[0]
    if m.shape[1] != n:
        raise DomainError(f"M must be square, got {m.shape}")
    if r.shape[0] != n:
        raise DomainError(f"RHS rows {r.shape[0]} != M size {n}")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        raise Singular("M is the zero matrix")
    cutoff = 1e-12 * scale
    for col in range(n):
        piv = col + int(np.argmax(np.abs(m[col:, col])))
        if abs(m[piv, col]) < cutoff:
            raise Singular(f"pivot {m[piv, col]:.3e} below cutoff {cutoff:.3e} at column {col}")
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
            r[[col, piv]] = r[[piv, col]]
        factors = m[col + 1:, col] / m[col, col]
        m[col + 1:, col:] -= np.outer(factors, m[col, col:])
        r[col + 1:] -= np.outer(factors, r[col])
    z = np.empty_like(r)
    for row in range(n - 1, -1, -1):
        z[row] = (r[row] - m[row, row + 1:] @ z[row + 1:]) / m[row, row]
    return z
