"""Single-order cosine test of independence with chi-square calibration."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, NamedTuple

import numpy as np

from .circular import PairedCircSample, center_sample
from .exceptions import DegenerateVarianceError

# Absolute floor on the estimated variance of the cosine statistic.
VARIANCE_FLOOR = 1e-12


class FrequencyPair(NamedTuple):
    r1: int
    r2: int


@dataclass(frozen=True)
class TestResult:
    """Outcome of one independence test.

    ``method`` is ``"asymptotic-chisq"`` (``df_or_B`` holds the degrees of
    freedom) or ``"permutation"`` (``df_or_B`` holds the number of
    permutations).
    """

    __test__ = False  # keep pytest from collecting this class

    statistic: float
    p_value: float
    method: str
    df_or_B: int
    n: int
    params: dict[str, Any] = field(default_factory=dict)

    def reject(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _as_pair(f) -> FrequencyPair:
    r1, r2 = f
    if int(r1) != r1 or int(r2) != r2:
        raise ValueError(f"frequencies must be integers, got {f!r}")
    return FrequencyPair(int(r1), int(r2))


def _ecf_terms(s: PairedCircSample, f: FrequencyPair):
    """Per-observation exponentials for the joint and the two marginals."""
    e1 = np.exp(1j * f.r1 * s.theta1)
    e2 = np.exp(1j * f.r2 * s.theta2)
    return e1 * e2, e1, e2


def ecf_difference(s: PairedCircSample, f) -> complex:
    """Joint empirical characteristic function minus the product of marginals."""
    f = _as_pair(f)
    e, e1, e2 = _ecf_terms(s, f)
    return complex(e.mean() - e1.mean() * e2.mean())


def d_cos(s: PairedCircSample, f) -> float:
    """Cosine statistic: ``J_c(r1, r2) - J_1c J_2c + J_1s J_2s`` (empirical)."""
    f = _as_pair(f)
    a = f.r1 * s.theta1
    b = f.r2 * s.theta2
    jc = np.mean(np.cos(a + b))
    return float(jc - np.mean(np.cos(a)) * np.mean(np.cos(b)) + np.mean(np.sin(a)) * np.mean(np.sin(b)))


def d_sin(s: PairedCircSample, f) -> float:
    """Sine counterpart: ``J_s(r1, r2) - J_1s J_2c - J_1c J_2s`` (empirical)."""
    f = _as_pair(f)
    a = f.r1 * s.theta1
    b = f.r2 * s.theta2
    js = np.mean(np.sin(a + b))
    return float(js - np.mean(np.sin(a)) * np.mean(np.cos(b)) - np.mean(np.cos(a)) * np.mean(np.sin(b)))


def _cos_influence(s: PairedCircSample, f: FrequencyPair) -> np.ndarray:
    a = f.r1 * s.theta1
    b = f.r2 * s.theta2
    ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
    return np.cos(a + b) - cb.mean() * ca - ca.mean() * cb + sb.mean() * sa + sa.mean() * sb


def v_hat(s: PairedCircSample, f, centred: bool = True) -> float:
    """Plug-in estimate of the asymptotic variance of ``sqrt(n) * d_cos``.

    The summand is the linearisation of the cosine statistic with marginal
    moments replaced by their sample values,
    ``b_i = cos(r1 t1 + r2 t2) - J2c cos(r1 t1) - J1c cos(r2 t2)
    + J2s sin(r1 t1) + J1s sin(r2 t2)``.

    Parameters
    ----------
    s : PairedCircSample
    f : (int, int)
    centred : bool
        If true (the default, used by :func:`cosine_test`), return the sample
        variance of ``b`` (divisor ``n``). For a single frequency pair this
        equals the corresponding diagonal entry of
        :func:`circindep.multi.sigma_hat`. If false, return the raw mean of
        ``b**2``, which exceeds the variance by ``mean(b)**2``; ``mean(b)``
        does not vanish under independence unless a margin has zero moments
        at the frequency, so this version makes the test conservative.
    """
    f = _as_pair(f)
    if s.n < 2:
        raise ValueError("variance estimate needs n >= 2")
    b = _cos_influence(s, f)
    if not centred:
        return float(np.mean(b * b))
    return float(np.mean((b - b.mean()) ** 2))


def chi2_1_sf(t: float) -> float:
    """Survival function of the chi-square law with one degree of freedom."""
    if t <= 0:
        return 1.0
    return math.erfc(math.sqrt(t / 2.0))


def cosine_test(s: PairedCircSample, f, center: bool = True) -> TestResult:
    """Asymptotic chi-square test based on the cosine statistic at ``f``.

    Parameters
    ----------
    s : PairedCircSample
    f : (int, int)
        Frequency pair, not ``(0, 0)``. ``(1, -1)`` targets positive
        interaction, ``(1, 1)`` negative interaction.
    center : bool
        Centre both coordinates at their sample circular means first. This
        makes the statistic invariant to rotations of either coordinate.

    Returns
    -------
    TestResult
        ``statistic = n * d_cos**2 / v_hat`` with a chi-square(1) p-value.

    Raises
    ------
    DegenerateVarianceError
        If the variance estimate is below ``1e-12`` (e.g. a constant margin).
    """
    f = _as_pair(f)
    if f == (0, 0):
        raise ValueError("frequency pair (0, 0) gives an identically zero statistic")
    if s.n < 2:
        raise ValueError("cosine test needs n >= 2")
    if center:
        s = center_sample(s)
    d = d_cos(s, f)
    v = v_hat(s, f)
    if v < VARIANCE_FLOOR:
        raise DegenerateVarianceError(f"variance estimate {v:.3g} is degenerate at frequencies {tuple(f)}")
    t = s.n * d * d / v
    return TestResult(
        statistic=t,
        p_value=chi2_1_sf(t),
        method="asymptotic-chisq",
        df_or_B=1,
        n=s.n,
        params={"test": "cosine", "r": [f.r1, f.r2], "center": bool(center)},
    )
