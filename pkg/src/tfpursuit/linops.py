"""Dense least-squares kernels and an incremental column-append solver.

Everything here works on plain float64 numpy arrays. The incremental state
is what makes the greedy pursuits cheap: appending the k-th regressor costs
O(nk) instead of refactorizing from scratch.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import InvalidParameter, RankDeficient

# Relative rank tolerance: a direction whose component orthogonal to the
# current span is below RANK_RTOL times its own norm counts as dependent.
RANK_RTOL = 1e-10


def least_squares(A: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Unique minimizer of ||y - A b||_2 for a full-column-rank A (n >= k).

    Raises RankDeficient when the smallest singular value of A is at or
    below RANK_RTOL times the largest.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2:
        raise InvalidParameter(f"expected a matrix, got ndim={A.ndim}")
    n, k = A.shape
    if y.shape != (n,):
        raise InvalidParameter(f"y has shape {y.shape}, expected ({n},)")
    if k == 0:
        return np.zeros(0)
    if n < k:
        raise RankDeficient(f"underdetermined system: {n} rows < {k} columns")
    sol, _, rank, sv = np.linalg.lstsq(A, y, rcond=RANK_RTOL)
    if rank < k or sv[-1] <= RANK_RTOL * sv[0]:
        raise RankDeficient(
            f"rank {rank} < {k} columns (sigma_min/sigma_max = {sv[-1] / sv[0]:.3e})"
        )
    return sol


def ortho_residual(y: np.ndarray, A: np.ndarray | None) -> np.ndarray:
    """Residual (I - P_A) y of the orthogonal projection onto col(A).

    An empty A (k = 0 or None) returns a copy of y.
    """
    y = np.asarray(y, dtype=float)
    if A is None:
        return y.copy()
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[1] == 0:
        return y.copy()
    return y - A @ least_squares(A, y)


class IncrementalLsState:
    """Running orthogonal factorization of columns appended one at a time.

    Maintains an orthonormal basis Q of the appended columns (modified
    Gram-Schmidt with one reorthogonalization pass), the triangular factor
    R with A = QR, the residual (I - QQ^T) y and its squared norm. Appends
    cost O(nk); a numerically dependent column raises RankDeficient and
    leaves the state untouched.

    States are plain values: safe to move between threads, never shared
    mutably. Use copy() to branch.
    """

    def __init__(self, y: np.ndarray, capacity: int | None = None):
        y = np.asarray(y, dtype=float)
        if y.ndim != 1 or y.size == 0:
            raise InvalidParameter("y must be a non-empty vector")
        n = y.size
        capacity = n if capacity is None else min(capacity, n)
        self._y = y.copy()
        self._q = np.empty((n, capacity))
        self._r = np.zeros((capacity, capacity))
        self._qty = np.empty(capacity)  # Q^T y, filled as columns arrive
        self.k = 0
        self.residual = y.copy()
        self.residual_sq = float(y @ y)

    @classmethod
    def from_matrix(cls, A: np.ndarray, y: np.ndarray, capacity: int | None = None) -> "IncrementalLsState":
        """Batch-initialize from a full-column-rank A via one Householder QR."""
        A = np.asarray(A, dtype=float)
        y = np.asarray(y, dtype=float)
        n, k = A.shape
        state = cls(y, capacity=capacity)
        if k == 0:
            return state
        if k > n:
            raise RankDeficient(f"{k} columns cannot be independent in R^{n}")
        q, r = np.linalg.qr(A, mode="reduced")
        diag = np.abs(np.diag(r))
        norms = np.linalg.norm(A, axis=0)
        if np.any(diag <= RANK_RTOL * norms) or np.any(norms == 0.0):
            raise RankDeficient("initial column block is rank deficient")
        state._q[:, :k] = q
        state._r[:k, :k] = r
        state._qty[:k] = q.T @ y
        state.k = k
        state.residual = y - q @ state._qty[:k]
        state.residual_sq = float(state.residual @ state.residual)
        return state

    @property
    def n(self) -> int:
        return self._y.size

    def copy(self) -> "IncrementalLsState":
        other = object.__new__(IncrementalLsState)
        other._y = self._y  # never mutated, safe to share
        other._q = self._q.copy()
        other._r = self._r.copy()
        other._qty = self._qty.copy()
        other.k = self.k
        other.residual = self.residual.copy()
        other.residual_sq = self.residual_sq
        return other

    def append(self, a: np.ndarray) -> "IncrementalLsState":
        """Append one regressor column; returns self.

        Raises RankDeficient if a lies in the span of the current columns
        (orthogonal component <= RANK_RTOL * ||a||); the state is unchanged
        in that case.
        """
        a = np.asarray(a, dtype=float)
        if a.shape != (self.n,):
            raise InvalidParameter(f"column has shape {a.shape}, expected ({self.n},)")
        norm_a = np.linalg.norm(a)
        if norm_a == 0.0:
            raise InvalidParameter("cannot append a zero column")
        if self.k >= self._q.shape[1]:
            raise RankDeficient("capacity exhausted: appended columns already span R^n")
        k = self.k
        q = self._q[:, :k]
        # MGS with one reorthogonalization pass keeps Q orthonormal to ~1e-15.
        h = q.T @ a
        v = a - q @ h
        h2 = q.T @ v
        v -= q @ h2
        rkk = np.linalg.norm(v)
        if rkk <= RANK_RTOL * norm_a:
            raise RankDeficient("appended column is numerically in the current span")
        v /= rkk
        self._q[:, k] = v
        self._r[:k, k] = h + h2
        self._r[k, k] = rkk
        c = float(v @ self.residual)  # equals v . y since v is orthogonal to Q
        self._qty[k] = c
        self.residual = self.residual - c * v
        self.residual_sq = float(self.residual @ self.residual)
        self.k = k + 1
        return self

    def coefficients(self) -> np.ndarray:
        """Least-squares coefficients of y on the appended columns (solve R b = Q^T y)."""
        if self.k == 0:
            return np.zeros(0)
        return scipy.linalg.solve_triangular(
            self._r[: self.k, : self.k], self._qty[: self.k], lower=False
        )

    def basis(self) -> np.ndarray:
        """Orthonormal basis of the appended columns (read-only view)."""
        return self._q[:, : self.k]


def append_column(state: IncrementalLsState, a: np.ndarray) -> IncrementalLsState:
    """Functional wrapper around IncrementalLsState.append (mutates and returns state)."""
    return state.append(a)
