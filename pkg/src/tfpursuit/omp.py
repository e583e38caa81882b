"""Orthogonal matching pursuit, the residual-ratio statistic, and the
tuning-free model-order selection rule.

The pursuit engine records a full per-iteration trace; the selection rules
(tuning-free argmin of the residual ratio, fixed iteration count, or a
noise-level residual threshold) are thin layers on top of it. Iteration
counts k are 1-based in traces and statistics; column indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .designs import SparseSignal, erc_coefficient, _entries
from .errors import EmptyTrace, InvalidParameter, RankDeficient
from .linops import IncrementalLsState, least_squares

# Residuals at or below ZERO_RTOL * ||y|| count as exactly recovered.
ZERO_RTOL = 1e-12

HALT_KMAX = "reached_kmax"
HALT_ZERO = "zero_residual"
HALT_RANK = "rank_deficient"
HALT_THRESHOLD = "below_threshold"


@dataclass(frozen=True)
class GreedyTrace:
    """Per-iteration record of one pursuit run.

    indices      -- selected column indices in selection order (length K)
    residual_sq  -- squared residual norms ||r^(0)||^2 .. ||r^(K)||^2
    halt         -- why the run stopped (HALT_* constant)
    n            -- observation dimension
    """

    indices: np.ndarray
    residual_sq: np.ndarray
    halt: str
    n: int

    def __len__(self) -> int:
        return self.indices.size


@dataclass(frozen=True)
class RecoveryResult:
    """Estimated support (selection order), debiased dense estimate, and trace."""

    support: np.ndarray
    beta: np.ndarray
    k_star: int
    trace: GreedyTrace


def run_omp(X, y: np.ndarray, k_max: int, stop_residual: float = 0.0) -> GreedyTrace:
    """Run OMP for up to k_max iterations and record the trace.

    Each iteration selects the column most correlated with the current
    residual (ties toward the smallest index), appends it to the incremental
    factorization, and re-projects. Halts at k_max, at a numerically zero
    residual (||r|| <= 1e-12 ||y||), when the selected column is numerically
    dependent on the current ones, or - if stop_residual > 0 - as soon as
    ||r|| < stop_residual (strict).
    """
    x = _entries(X)
    y = np.asarray(y, dtype=float)
    n, p = x.shape
    if k_max < 1:
        raise InvalidParameter(f"k_max must be >= 1, got {k_max}")
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0.0:
        raise InvalidParameter("y must be non-zero")
    zero_level = ZERO_RTOL * ynorm

    state = IncrementalLsState(y, capacity=min(k_max, n))
    indices: list[int] = []
    rsq = [state.residual_sq]
    halt = HALT_KMAX
    if stop_residual > 0.0 and ynorm < stop_residual:
        return GreedyTrace(np.array([], dtype=int), np.array(rsq), HALT_THRESHOLD, n)
    xt = x.T
    for _ in range(k_max):
        corr = xt @ state.residual
        pick = int(np.argmax(np.abs(corr)))
        try:
            state.append(x[:, pick])
        except RankDeficient:
            halt = HALT_RANK
            break
        indices.append(pick)
        rsq.append(state.residual_sq)
        rnorm = math.sqrt(state.residual_sq)
        if rnorm <= zero_level:
            halt = HALT_ZERO
            break
        if stop_residual > 0.0 and rnorm < stop_residual:
            halt = HALT_THRESHOLD
            break
    return GreedyTrace(np.array(indices, dtype=int), np.array(rsq), halt, n)


def t_statistic(trace: GreedyTrace) -> np.ndarray:
    """Residual ratios t(k) = ||r^(k)||^2 / ||r^(k-1)||^2 for k = 1..K.

    Nested projections force every t(k) into [0, 1] up to round-off.
    """
    if len(trace) < 1:
        raise EmptyTrace("trace has no iterations")
    rsq = trace.residual_sq
    if np.any(rsq[:-1] <= 0.0):
        raise EmptyTrace("trace has a zero residual before its last step")
    return rsq[1:] / rsq[:-1]


def select_tf(trace: GreedyTrace) -> int:
    """Tuning-free model order: argmin of t(k), ties toward the smallest k.

    A full-length trace minimizes over 1..k_max-1 (the last ratio is
    excluded); a trace that halted early minimizes over 1..K, so a
    zero-residual halt at K forces k* = K since t(K) = 0.
    """
    k = len(trace)
    limit = k - 1 if trace.halt == HALT_KMAX else k
    if limit < 1:
        raise EmptyTrace(f"no selectable iterations (K={k}, halt={trace.halt})")
    t = t_statistic(trace)
    return int(np.argmin(t[:limit])) + 1


def _debias(x: np.ndarray, y: np.ndarray, support: np.ndarray) -> np.ndarray:
    beta = np.zeros(x.shape[1])
    if support.size:
        beta[support] = least_squares(x[:, support], y)
    return beta


def _result(x: np.ndarray, y: np.ndarray, trace: GreedyTrace, k_star: int) -> RecoveryResult:
    support = trace.indices[:k_star]
    return RecoveryResult(support=support, beta=_debias(x, y, support), k_star=k_star, trace=trace)


def tf_omp(X, y: np.ndarray) -> RecoveryResult:
    """Tuning-free OMP: run to k_max = floor(n/2), pick the residual-ratio dip.

    Needs neither the sparsity level nor the noise variance. The estimate is
    the least-squares fit on the first k* selected columns, zero elsewhere.
    """
    x = _entries(X)
    y = np.asarray(y, dtype=float)
    k_max = x.shape[0] // 2
    trace = run_omp(x, y, k_max)
    k_star = select_tf(trace)
    return _result(x, y, trace, k_star)


def tf_omp_capped(X, y: np.ndarray, k_max: int) -> RecoveryResult:
    """Tuning-free selection under a caller-supplied iteration cap (QTF variants)."""
    x = _entries(X)
    y = np.asarray(y, dtype=float)
    trace = run_omp(x, y, k_max)
    k_star = select_tf(trace)
    return _result(x, y, trace, k_star)


def qtf_kmax1(n: int, p: int) -> int:
    """Coherence-motivated cap 1 + floor(sqrt(n(p-1)/(p-n))); requires p > n >= 2."""
    if not p > n >= 2:
        raise InvalidParameter(f"need p > n >= 2, got n={n}, p={p}")
    return 1 + math.isqrt(n * (p - 1) // (p - n))


def qtf_kmax2(n: int, p: int) -> int:
    """Sample-complexity-motivated cap floor(n / ln p); requires p >= 2."""
    if p < 2:
        raise InvalidParameter(f"need p >= 2, got p={p}")
    return int(n / math.log(p))


def omp_fixed(X, y: np.ndarray, k0: int) -> RecoveryResult:
    """OMP stopped after exactly k0 iterations (or an earlier degeneracy halt)."""
    x = _entries(X)
    y = np.asarray(y, dtype=float)
    if not 1 <= k0 <= x.shape[0]:
        raise InvalidParameter(f"need 1 <= k0 <= n, got k0={k0}")
    trace = run_omp(x, y, k0)
    return _result(x, y, trace, len(trace))


def omp_sigma(X, y: np.ndarray, sigma: float) -> RecoveryResult:
    """OMP with the noise-variance stopping rule ||r|| < sigma sqrt(n + 2 sqrt(n ln n))."""
    x = _entries(X)
    y = np.asarray(y, dtype=float)
    if sigma <= 0.0:
        raise InvalidParameter(f"sigma must be positive, got {sigma}")
    n = x.shape[0]
    threshold = sigma * math.sqrt(n + 2.0 * math.sqrt(n * math.log(n)))
    trace = run_omp(x, y, k_max=n, stop_residual=threshold)
    return _result(x, y, trace, len(trace))


@dataclass(frozen=True)
class RecoveryThresholds:
    """Noise-norm levels below which greedy recovery is guaranteed.

    eps_a bounds ||w|| so the first k0 selections are all correct; eps_b
    additionally rules out missed discoveries by the ratio rule. Both are
    meaningful only when the exact-recovery coefficient is below one
    (erc_satisfied); they go non-positive otherwise.
    """

    eps_a: float
    eps_b: float
    lambda_min: float
    lambda_max: float
    erc: float
    beta_min: float
    beta_max: float

    @property
    def erc_satisfied(self) -> bool:
        return self.erc < 1.0


def recovery_thresholds(X, signal: SparseSignal) -> RecoveryThresholds:
    """Compute eps_a, eps_b and their ingredients for a (design, signal) pair.

    eps_a = beta_min lambda_min (1 - erc) / 2
    eps_b = lambda_min beta_min / (1 + 2 lambda_max/lambda_min
                                     + (lambda_max/lambda_min)(beta_max/beta_min))
    with lambda_min/max the extreme eigenvalues of the support Gram matrix.
    """
    x = _entries(X)
    xs = x[:, signal.support]
    eigs = np.linalg.eigvalsh(xs.T @ xs)
    lam_min, lam_max = float(eigs[0]), float(eigs[-1])
    if lam_min <= 0.0:
        raise RankDeficient("support columns are rank deficient")
    erc = erc_coefficient(x, signal.support)
    bmin, bmax = signal.beta_min, signal.beta_max
    eps_a = bmin * lam_min * (1.0 - erc) / 2.0
    kappa = lam_max / lam_min
    eps_b = lam_min * bmin / (1.0 + 2.0 * kappa + kappa * bmax / bmin)
    return RecoveryThresholds(eps_a, eps_b, lam_min, lam_max, erc, bmin, bmax)
