"""Design matrices, sparse signals, noise and outlier generators, and
dictionary diagnostics (coherence, exact-recovery coefficient, brute-force
restricted isometry constants).

All generators are deterministic under a fixed integer seed; they also accept
a numpy Generator so callers can derive per-trial streams. Indices are
0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg

from .errors import InvalidDimension, InvalidParameter, RankDeficient, TooLarge
from .linops import RANK_RTOL

def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _entries(X) -> np.ndarray:
    """Accept either a DesignMatrix or a plain array."""
    return X.matrix if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)


@dataclass(frozen=True)
class DesignMatrix:
    """An n x p design with unit-norm columns plus provenance metadata."""

    matrix: np.ndarray
    kind: str
    seed: int | None = None
    rho: float | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True)
class SparseSignal:
    """Support (sorted, 0-based) and non-zero values of a sparse vector in R^p."""

    p: int
    support: np.ndarray
    values: np.ndarray

    def to_dense(self) -> np.ndarray:
        beta = np.zeros(self.p)
        beta[self.support] = self.values
        return beta

    @property
    def k0(self) -> int:
        return self.support.size

    @property
    def beta_min(self) -> float:
        return float(np.min(np.abs(self.values)))

    @property
    def beta_max(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class OutlierVector:
    """Sparse gross-error vector: support, signed values, ambient dimension n."""

    n: int
    support: np.ndarray
    values: np.ndarray

    def to_dense(self) -> np.ndarray:
        g = np.zeros(self.n)
        g[self.support] = self.values
        return g

    @property
    def n_out(self) -> int:
        return self.support.size


def hadamard_dictionary(n: int) -> DesignMatrix:
    """The n x 2n dictionary [I_n, H_n/sqrt(n)] with H_n the Sylvester Hadamard matrix.

    Mutual coherence is exactly 1/sqrt(n). Requires n a power of two.
    """
    if n < 2 or n & (n - 1) != 0:
        raise InvalidDimension(f"n must be a power of two >= 2, got {n}")
    h = scipy.linalg.hadamard(n).astype(float) / math.sqrt(n)
    return DesignMatrix(np.hstack([np.eye(n), h]), kind="hadamard_identity")


def gaussian_design(n: int, p: int, seed=None) -> DesignMatrix:
    """i.i.d. standard-normal entries, columns normalized to unit length."""
    if n < 2 or p < 1:
        raise InvalidParameter(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    g = _rng(seed).standard_normal((n, p))
    g /= np.linalg.norm(g, axis=0)
    return DesignMatrix(g, kind="gaussian", seed=seed if isinstance(seed, int) else None)


def correlated_design(n: int, p: int, rho: float, seed=None) -> DesignMatrix:
    """Columns with population correlation rho^|i-j| between columns i and j.

    Construction: G with i.i.d. N(0,1) entries, right-multiplied by the
    transposed Cholesky factor of the Toeplitz target T_ij = rho^|i-j|,
    then column normalization. rho = 0 reproduces gaussian_design exactly.
    """
    if not 0.0 <= rho < 1.0:
        raise InvalidParameter(f"rho must be in [0, 1), got {rho}")
    if n < 2 or p < 1:
        raise InvalidParameter(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    g = _rng(seed).standard_normal((n, p))
    toeplitz = scipy.linalg.toeplitz(rho ** np.arange(p))
    chol = np.linalg.cholesky(toeplitz)
    x = g @ chol.T
    x /= np.linalg.norm(x, axis=0)
    return DesignMatrix(
        x, kind="correlated", seed=seed if isinstance(seed, int) else None, rho=rho
    )


def sparse_signal(p: int, k0: int, kind: str = "pm_one", alpha: float | None = None,
                  seed=None) -> SparseSignal:
    """Random k0-sparse signal with support drawn uniformly without replacement.

    kind:
      pm_one          -- values +-1 with random signs
      exp_decay       -- magnitudes [a, a*alpha, a*alpha^2] (k0 = 3 only) with
                         a = sqrt(3 / (1 + alpha^2 + alpha^4)) so ||beta||^2 = 3
                         matches the pm_one case; random signs
      gaussian_values -- i.i.d. standard-normal values
    """
    if not 1 <= k0 <= p:
        raise InvalidParameter(f"need 1 <= k0 <= p, got k0={k0}, p={p}")
    rng = _rng(seed)
    support = np.sort(rng.choice(p, size=k0, replace=False))
    if kind == "pm_one":
        values = rng.integers(0, 2, size=k0) * 2.0 - 1.0
    elif kind == "exp_decay":
        if k0 != 3:
            raise InvalidParameter("exp_decay is defined for k0 = 3 only")
        if alpha is None or not 0.0 < alpha <= 1.0:
            raise InvalidParameter(f"exp_decay needs alpha in (0, 1], got {alpha}")
        a = math.sqrt(3.0 / (1.0 + alpha**2 + alpha**4))
        signs = rng.integers(0, 2, size=3) * 2.0 - 1.0
        values = signs * a * alpha ** np.arange(3)
    elif kind == "gaussian_values":
        values = rng.standard_normal(k0)
    else:
        raise InvalidParameter(f"unknown signal kind {kind!r}")
    return SparseSignal(p=p, support=support, values=values)


def noise_for_snr(clean: np.ndarray, snr_db: float, seed=None) -> tuple[float, np.ndarray]:
    """Noise level and draw w ~ N(0, sigma^2 I) with sigma^2 = ||clean||^2 / (n 10^(snr/10))."""
    clean = np.asarray(clean, dtype=float)
    energy = float(clean @ clean)
    if energy == 0.0:
        raise InvalidParameter("clean signal must be non-zero")
    n = clean.size
    sigma = math.sqrt(energy / (n * 10.0 ** (snr_db / 10.0)))
    w = sigma * _rng(seed).standard_normal(n)
    return sigma, w


def outliers(n: int, n_out: int, signal_energy: float, sir_db: float, seed=None) -> OutlierVector:
    """Sparse outlier vector with ||g||^2 = signal_energy / 10^(sir_db/10) exactly.

    Each of the n_out entries is +-sqrt(signal_energy / (n_out 10^(sir/10)))
    with a random sign; support uniform without replacement.
    """
    if not 1 <= n_out <= n:
        raise InvalidParameter(f"need 1 <= n_out <= n, got n_out={n_out}, n={n}")
    if signal_energy <= 0.0:
        raise InvalidParameter("signal_energy must be positive")
    rng = _rng(seed)
    support = np.sort(rng.choice(n, size=n_out, replace=False))
    magnitude = math.sqrt(signal_energy / (n_out * 10.0 ** (sir_db / 10.0)))
    signs = rng.integers(0, 2, size=n_out) * 2.0 - 1.0
    return OutlierVector(n=n, support=support, values=signs * magnitude)


def mutual_coherence(X) -> float:
    """Maximum pairwise column correlation max_{i != j} |X_i . X_j| (unit-norm columns)."""
    x = _entries(X)
    gram = np.abs(x.T @ x)
    np.fill_diagonal(gram, 0.0)
    return float(gram.max()) if gram.size else 0.0


def welch_bound(n: int, p: int) -> float:
    """Lower bound sqrt((p-n) / (n (p-1))) on the coherence of any n x p dictionary (p > n)."""
    if p <= n:
        return 0.0
    return math.sqrt((p - n) / (n * (p - 1)))


def erc_coefficient(X, support) -> float:
    """Exact-recovery coefficient: max_{j not in support} || pinv(X_S) X_j ||_1.

    Values below 1 guarantee greedy support recovery on noiseless data.
    Raises RankDeficient when X_S loses full column rank.
    """
    x = _entries(X)
    support = np.asarray(support, dtype=int)
    p = x.shape[1]
    mask = np.ones(p, dtype=bool)
    mask[support] = False
    others = np.flatnonzero(mask)
    if others.size == 0:
        return 0.0
    xs = x[:, support]
    # Column j of the solve is pinv(X_S) X_j.
    coeffs, _, rank, sv = np.linalg.lstsq(xs, x[:, others], rcond=RANK_RTOL)
    if rank < support.size or sv[-1] <= RANK_RTOL * sv[0]:
        raise RankDeficient("support columns are rank deficient")
    return float(np.abs(coeffs).sum(axis=0).max())


@dataclass(frozen=True)
class RicBounds:
    """Extreme Gram-spectral values over all k-column submatrices, and delta_k."""

    lambda_min: float
    lambda_max: float
    delta: float


# Exhaustive RIC evaluation is exponential; hard cap on the enumeration size.
RIC_ENUM_LIMIT = 100_000


def ric_bruteforce(X, k: int) -> RicBounds:
    """delta_k by enumerating every k-column submatrix (tiny instances only).

    Returns the global extreme eigenvalues of the k x k Gram matrices and
    delta_k = max(1 - lambda_min, lambda_max - 1). Raises TooLarge when
    C(p, k) exceeds RIC_ENUM_LIMIT.
    """
    x = _entries(X)
    p = x.shape[1]
    if not 1 <= k <= min(x.shape):
        raise InvalidParameter(f"need 1 <= k <= min(n, p), got k={k}")
    count = math.comb(p, k)
    if count > RIC_ENUM_LIMIT:
        raise TooLarge(f"C({p},{k}) = {count} exceeds enumeration limit {RIC_ENUM_LIMIT}")
    lam_min = np.inf
    lam_max = -np.inf
    for cols in combinations(range(p), k):
        sub = x[:, cols]
        eigs = np.linalg.eigvalsh(sub.T @ sub)
        lam_min = min(lam_min, eigs[0])
        lam_max = max(lam_max, eigs[-1])
    return RicBounds(float(lam_min), float(lam_max), float(max(1.0 - lam_min, lam_max - 1.0)))
