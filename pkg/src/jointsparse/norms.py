"""Row-wise mixed norms and support ratios for multichannel matrices.

The central objects: the l_{2,p} quasi-norm (sum of p-th powers of row
2-norms, p in (0, 1]), the row-counting l_{2,0} "norm", and the ratio
theta(p, X, S) comparing mass inside an index set S against mass outside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError
from .linalg import as_matrix

#: Rows with 2-norm at or below this count as zero rows.
DEFAULT_ZERO_TOL = 1e-8


@dataclass(frozen=True)
class RowSupport:
    """A validated, ascending set of 1-based row indices.

    ``n`` is the row count of the matrix the indices refer to; ``zero_tol``
    records the threshold used when the support was computed from a matrix
    (0.0 for supports built directly from an index set).
    """

    indices: tuple[int, ...]
    n: int
    zero_tol: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"RowSupport: n must be >= 1, got {self.n}")
        idx = self.indices
        if any((not isinstance(i, (int, np.integer))) or isinstance(i, bool) for i in idx):
            raise DomainError("RowSupport: indices must be integers")
        object.__setattr__(self, "indices", tuple(int(i) for i in idx))
        idx = self.indices
        if any(i < 1 or i > self.n for i in idx):
            raise DomainError(f"RowSupport: indices must lie in 1..{self.n}, got {idx}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise DomainError(f"RowSupport: indices must be strictly ascending, got {idx}")

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i) -> bool:
        return i in self.indices

    def __iter__(self):
        return iter(self.indices)

    def mask(self) -> np.ndarray:
        """Boolean row mask of length n (0-based positions)."""
        m = np.zeros(self.n, dtype=bool)
        for i in self.indices:
            m[i - 1] = True
        return m

    def complement(self) -> "RowSupport":
        others = tuple(i for i in range(1, self.n + 1) if i not in self.indices)
        return RowSupport(indices=others, n=self.n)


def support_from_indices(indices: Iterable[int], n: int) -> RowSupport:
    """Build a RowSupport from an arbitrary (unsorted, 1-based) index iterable."""
    return RowSupport(indices=tuple(sorted(set(int(i) for i in indices))), n=n)


def row_norms(x: np.ndarray) -> np.ndarray:
    """Euclidean norm of each row."""
    x = as_matrix(x, name="X")
    return np.sqrt(np.sum(x * x, axis=1))


def row_support(x: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> RowSupport:
    """Indices (1-based) of rows whose 2-norm exceeds zero_tol."""
    if zero_tol < 0:
        raise DomainError("zero_tol must be nonnegative")
    norms = row_norms(x)
    idx = tuple(int(i) + 1 for i in np.nonzero(norms > zero_tol)[0])
    return RowSupport(indices=idx, n=int(norms.size), zero_tol=float(zero_tol))


def norm_20(x: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """Number of rows with 2-norm above zero_tol (the l_{2,0} row count)."""
    return len(row_support(x, zero_tol))


def mixed_norm_2p(x: np.ndarray, p: float) -> float:
    """The l_{2,p} objective: sum_i ||row_i||_2^p for p in (0, 1].

    This is the p-th power form (no outer 1/p root); it is the quantity the
    solvers minimize and report.
    """
    if not (0.0 < p <= 1.0):
        raise DomainError(f"p must lie in (0, 1], got {p}")
    norms = row_norms(x)
    return float(np.sum(norms ** p))


def _check_theta_args(p: float, x: np.ndarray, s: RowSupport) -> np.ndarray:
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"p must lie in [0, 1], got {p}")
    norms = row_norms(x)
    if not np.any(norms > 0.0):
        raise DomainError("theta is undefined for the zero matrix")
    if s.n != norms.size:
        raise DomainError(f"support is over n={s.n} rows but X has {norms.size}")
    return norms


def theta(p: float, x: np.ndarray, s: RowSupport, zero_tol: float = DEFAULT_ZERO_TOL) -> float:
    """Mass ratio of X inside S versus outside S.

    For p > 0 this is sum_{i in S} ||row_i||^p / sum_{j not in S} ||row_j||^p.
    For p = 0 each row contributes 1 iff its norm exceeds zero_tol, so the
    ratio becomes a count ratio.  Returns +inf when the denominator vanishes
    with a positive numerator, and 0.0 whenever the numerator vanishes.
    """
    norms = _check_theta_args(p, x, s)
    mask = s.mask()
    if p == 0.0:
        contrib = (norms > zero_tol).astype(float)
    else:
        # Normalize by a power of two before exponentiating: scaling X by 2**j
        # then shifts every row norm exactly, so the ratio is bit-identical
        # under such scalings instead of drifting by per-row rounding in pow.
        scale = 2.0 ** math.floor(math.log2(float(norms.max())))
        contrib = (norms / scale) ** p
    num = float(np.sum(contrib[mask]))
    den = float(np.sum(contrib[~mask]))
    if num == 0.0:
        return 0.0
    if den == 0.0:
        return float("inf")
    return num / den


def theta_max_over_S(
    p: float, x: np.ndarray, k: int, zero_tol: float = DEFAULT_ZERO_TOL
) -> tuple[float, RowSupport]:
    """Maximize theta(p, X, S) over index sets with |S| <= k.

    The maximum is attained by the k rows of largest 2-norm (lower index
    first on ties); returns the value together with that witnessing support.
    """
    xm = as_matrix(x, name="X")
    n = xm.shape[0]
    norms = _check_theta_args(p, xm, RowSupport(indices=(), n=n))
    if not (1 <= k < n):
        raise DomainError(f"k must satisfy 1 <= k < n={n}, got {k}")
    order = np.argsort(-norms, kind="stable")  # stable: ties broken by lower index
    top = np.sort(order[:k])
    s = RowSupport(indices=tuple(int(i) + 1 for i in top), n=n)
    return theta(p, x, s, zero_tol=zero_tol), s
