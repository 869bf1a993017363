"""Omnibus characteristic-function statistic with a Poisson kernel.

The statistic is ``n * sum_{r1, r2} |D(r1, r2)|^2 v(r1) v(r2)`` where ``D``
is the joint ECF minus the product of marginal ECFs and ``v`` is the
symmetrised Poisson(lambda) pmf. It is evaluated in closed form from the
pairwise-difference kernel matrices of each coordinate and calibrated by
permuting the second coordinate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ._rng import check_seed, substream
from .circular import PairedCircSample
from .cosine import TestResult

NONNEG_LAMBDA_MAX = np.pi / 2
SERIES_TAIL_TOL = 1e-12
_CLAMP_TOL = 1e-10
# Permuted statistics within this relative distance of the observed one are
# ties (the two are summed in different orders).
_TIE_RTOL = 1e-12
# Upper bound on permuted-matrix elements held in memory at once.
_CHUNK_ELEMENTS = 4_000_000


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0:
        raise ValueError(f"Poisson parameter must be positive, got {lam}")
    if lam > NONNEG_LAMBDA_MAX:
        warnings.warn(
            f"lambda = {lam} exceeds pi/2; the kernel takes negative values",
            RuntimeWarning,
            stacklevel=3,
        )
    return lam


@dataclass(frozen=True)
class PermutationPlan:
    """Number of permutations ``B`` and the seed that fixes them."""

    B: int = 1000
    seed: int = 0

    def __post_init__(self):
        if int(self.B) != self.B or self.B < 1:
            raise ValueError(f"B must be a positive integer, got {self.B!r}")
        object.__setattr__(self, "B", int(self.B))
        object.__setattr__(self, "seed", check_seed(self.seed))


def poisson_kernel(theta, lam: float):
    """``cos(lam * sin(theta)) * exp(lam * (cos(theta) - 1))``.

    Real part of the Poisson characteristic function at ``theta``; non-negative
    on the whole circle when ``0 < lam <= pi/2``.
    """
    theta = np.asarray(theta, dtype=float)
    out = np.cos(lam * np.sin(theta)) * np.exp(lam * (np.cos(theta) - 1.0))
    return float(out) if out.ndim == 0 else out


def kernel_matrix(theta: np.ndarray, lam: float) -> np.ndarray:
    """Kernel at all pairwise differences ``theta[j] - theta[k]``."""
    return poisson_kernel(theta[:, None] - theta[None, :], lam)


def _statistic(k1: np.ndarray, k2: np.ndarray) -> float:
    n = k1.shape[0]
    t = (
        np.sum(k1 * k2) / n
        + k1.sum() * k2.sum() / n**3
        # triple sum over (j, k, l) factorises through row sums
        - 2.0 / n**2 * (k1.sum(axis=1) @ k2.sum(axis=1))
    )
    return _clamp(t)


def _clamp(t: float) -> float:
    if t < 0 and t > -_CLAMP_TOL:
        return 0.0
    return float(t)


def t_omnibus(s: PairedCircSample, lam: float) -> float:
    """Closed-form omnibus statistic ``T_{n, lambda}``.

    Depends on the data only through within-coordinate pairwise differences,
    so it is invariant to rotating either coordinate.
    """
    lam = check_lambda(lam)
    return _statistic(kernel_matrix(s.theta1, lam), kernel_matrix(s.theta2, lam))


def truncation_for(lam: float, tol: float = SERIES_TAIL_TOL) -> int:
    """Smallest ``R`` with Poisson(lam) tail mass ``P(N > R) < tol``."""
    r = 0
    while stats.poisson.sf(r, lam) >= tol:
        r += 1
    return r


def t_omnibus_series(s: PairedCircSample, lam: float, R: int | None = None) -> float:
    """Omnibus statistic by direct summation over ``|r1|, |r2| <= R``.

    Brute-force reference for :func:`t_omnibus`. ``R`` defaults to the
    smallest truncation whose Poisson tail mass is below ``1e-12``.
    """
    lam = check_lambda(lam)
    if R is None:
        R = truncation_for(lam)
    elif stats.poisson.sf(R, lam) >= SERIES_TAIL_TOL:
        raise ValueError(f"truncation R = {R} leaves Poisson({lam}) tail mass >= {SERIES_TAIL_TOL}; increase R")
    r = np.arange(-R, R + 1)
    e1 = np.exp(1j * np.outer(r, s.theta1))
    e2 = np.exp(1j * np.outer(r, s.theta2))
    n = s.n
    joint = e1 @ e2.T / n
    diff = joint - np.outer(e1.mean(axis=1), e2.mean(axis=1))
    pmf = stats.poisson.pmf(np.abs(r), lam)
    v = np.where(r == 0, pmf, pmf / 2.0)
    return _clamp(float(n * np.einsum("ij,i,j->", np.abs(diff) ** 2, v, v)))


def permutation_statistics(k1: np.ndarray, k2: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Omnibus statistic recomputed after relabelling the second coordinate.

    ``perms`` has one permutation of ``range(n)`` per row. The permuted
    second-coordinate kernel matrix is a re-indexing of ``k2``, and its total
    sum does not change, so only the first and third terms are recomputed.
    """
    n = k1.shape[0]
    const = k1.sum() * k2.sum() / n**3
    row1 = k1.sum(axis=1)
    row2 = k2.sum(axis=1)
    out = np.empty(perms.shape[0])
    step = max(1, _CHUNK_ELEMENTS // (n * n))
    for start in range(0, perms.shape[0], step):
        p = perms[start : start + step]
        k2p = k2[p[:, :, None], p[:, None, :]]
        first = np.einsum("jk,bjk->b", k1, k2p) / n
        third = 2.0 / n**2 * (row2[p] @ row1)
        out[start : start + step] = first + const - third
    return out


def draw_permutations(n: int, B: int, seed) -> np.ndarray:
    """``B`` permutations of ``range(n)``.

    ``seed`` is an integer (the stream ``substream(seed)``) or a ready
    ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else substream(seed)
    return rng.permuted(np.tile(np.arange(n), (B, 1)), axis=1)


def exceedance_pvalue(t: float, t_star: np.ndarray) -> float:
    """Fraction of ``t_star`` strictly above ``t``, treating near-ties as ties."""
    return float(np.mean(np.asarray(t_star) - t > _TIE_RTOL * max(1.0, abs(t))))


def omnibus_permutation_pvalue(s: PairedCircSample, lam: float, perms: np.ndarray) -> tuple[float, float]:
    """Observed statistic and its permutation p-value for given permutations."""
    lam = check_lambda(lam)
    k1 = kernel_matrix(s.theta1, lam)
    k2 = kernel_matrix(s.theta2, lam)
    t = _statistic(k1, k2)
    return t, exceedance_pvalue(t, permutation_statistics(k1, k2, perms))


def permutation_test(s: PairedCircSample, lam: float, plan: PermutationPlan = PermutationPlan()) -> TestResult:
    """Permutation test of independence based on ``T_{n, lambda}``.

    The p-value is the fraction of permuted statistics strictly greater than
    the observed one (no +1 correction), so 0 means "below 1/B".
    """
    if s.n < 2:
        raise ValueError("permutation test needs n >= 2")
    lam = check_lambda(lam)
    t, p = omnibus_permutation_pvalue(s, lam, draw_permutations(s.n, plan.B, plan.seed))
    return TestResult(
        statistic=t,
        p_value=p,
        method="permutation",
        df_or_B=plan.B,
        n=s.n,
        params={"test": "omnibus", "lambda": lam, "seed": plan.seed},
    )
