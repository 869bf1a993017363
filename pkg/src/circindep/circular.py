"""Angles, circular means, centring and empirical trigonometric moments.

All angles are stored in radians on ``[-pi, pi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .exceptions import UndefinedMeanError

TWO_PI = 2.0 * np.pi

# Mean resultant lengths below this are treated as zero.
_RESULTANT_TOL = 1e-12


def wrap_angle(x):
    """Wrap angles to ``[-pi, pi)``.

    Parameters
    ----------
    x : float or array_like
        Angles in radians. Must be finite.

    Returns
    -------
    float or ndarray
        ``x + 2*pi*k`` with ``k`` chosen so that the result lies in
        ``[-pi, pi)``. Scalars in, scalars out.

    Examples
    --------
    >>> wrap_angle(3 * np.pi / 2)
    -1.5707963267948966
    >>> wrap_angle(-np.pi) == -np.pi
    True
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("cannot wrap non-finite angles")
    # values already in range pass through bit-for-bit
    inside = (arr >= -np.pi) & (arr < np.pi)
    out = np.where(inside, arr, np.mod(arr + np.pi, TWO_PI) - np.pi)
    # np.mod can return exactly 2*pi for tiny negative arguments.
    out = np.where(out >= np.pi, -np.pi, out)
    if out.ndim == 0:
        return float(out)
    return out


def _resultant(angles, weights=None):
    angles = np.asarray(angles, dtype=float)
    if angles.size == 0:
        raise ValueError("need at least one angle")
    if weights is None:
        return np.mean(np.sin(angles)), np.mean(np.cos(angles)), 1.0
    w = np.asarray(weights, dtype=float)
    if w.shape != angles.shape:
        raise ValueError("angles and weights must have the same length")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative")
    total = w.sum()
    if total <= 0:
        raise ValueError("at least one weight must be positive")
    return np.dot(w, np.sin(angles)) / total, np.dot(w, np.cos(angles)) / total, total


def circular_mean(angles) -> float:
    """Sample circular mean direction, ``atan2(mean sin, mean cos)``.

    Raises
    ------
    UndefinedMeanError
        If the mean resultant length is numerically zero, e.g. ``{0, pi}``.
    """
    s, c, _ = _resultant(angles)
    if np.hypot(s, c) < _RESULTANT_TOL:
        raise UndefinedMeanError("mean resultant length is zero; circular mean undefined")
    return wrap_angle(np.arctan2(s, c))


def weighted_circular_mean(angles, weights) -> float:
    """Circular mean with non-negative weights.

    The zero-resultant check is relative to the total weight, so it does not
    depend on how the weights are scaled.
    """
    s, c, _ = _resultant(angles, weights)
    if np.hypot(s, c) < _RESULTANT_TOL:
        raise UndefinedMeanError("weighted resultant is zero; circular mean undefined")
    return wrap_angle(np.arctan2(s, c))


def axial_to_circular(theta):
    """Map axial angles on ``[0, pi)`` to circular ones by doubling."""
    arr = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any((arr < 0) | (arr >= np.pi)):
        raise ValueError("axial angles must lie in [0, pi)")
    return wrap_angle(2.0 * arr)


@dataclass(frozen=True)
class PairedCircSample:
    """``n`` ordered pairs of angles, one array per coordinate.

    Inputs are wrapped to ``[-pi, pi)`` on construction and stored as
    read-only float arrays.
    """

    theta1: np.ndarray
    theta2: np.ndarray

    def __post_init__(self):
        t1 = np.array(self.theta1, dtype=float).reshape(-1)
        t2 = np.array(self.theta2, dtype=float).reshape(-1)
        if t1.shape != t2.shape:
            raise ValueError(f"coordinate lengths differ: {t1.size} vs {t2.size}")
        if t1.size < 1:
            raise ValueError("a sample needs at least one pair")
        t1 = np.asarray(wrap_angle(t1), dtype=float).reshape(-1)
        t2 = np.asarray(wrap_angle(t2), dtype=float).reshape(-1)
        t1.flags.writeable = False
        t2.flags.writeable = False
        object.__setattr__(self, "theta1", t1)
        object.__setattr__(self, "theta2", t2)

    @property
    def n(self) -> int:
        return self.theta1.size

    def __len__(self) -> int:
        return self.n

    @property
    def pairs(self) -> np.ndarray:
        """``(n, 2)`` array view of the sample."""
        return np.column_stack([self.theta1, self.theta2])

    def shifted(self, a: float, b: float) -> PairedCircSample:
        """Rotate the first coordinate by ``a`` and the second by ``b``."""
        return PairedCircSample(self.theta1 + a, self.theta2 + b)

    def with_theta2(self, theta2) -> PairedCircSample:
        return PairedCircSample(self.theta1, theta2)


def center_sample(s: PairedCircSample) -> PairedCircSample:
    """Subtract each coordinate's sample circular mean (and wrap)."""
    mu1 = circular_mean(s.theta1)
    mu2 = circular_mean(s.theta2)
    return PairedCircSample(s.theta1 - mu1, s.theta2 - mu2)


def lag_pairs(series, k: int) -> PairedCircSample:
    """Pairs ``(x[i], x[i + k])`` built from a single angular series."""
    x = np.asarray(series, dtype=float).reshape(-1)
    if int(k) != k or k < 1:
        raise ValueError(f"lag must be a positive integer, got {k!r}")
    k = int(k)
    if k >= x.size:
        raise ValueError(f"lag {k} leaves no pairs in a series of length {x.size}")
    return PairedCircSample(x[:-k], x[k:])


@dataclass(frozen=True)
class TrigMomentSet:
    """Empirical trigonometric moments of a paired sample.

    ``j1c[r]``/``j1s[r]`` are the marginal cosine/sine moments of the first
    coordinate at frequency ``r`` (``j2c``/``j2s`` for the second), and
    ``jc[(r1, r2)]``/``js[(r1, r2)]`` the joint moments of
    ``r1*theta1 + r2*theta2``.
    """

    n: int
    j1c: dict = field(default_factory=dict)
    j1s: dict = field(default_factory=dict)
    j2c: dict = field(default_factory=dict)
    j2s: dict = field(default_factory=dict)
    jc: dict = field(default_factory=dict)
    js: dict = field(default_factory=dict)

    def phi(self, r1: int, r2: int) -> complex:
        """Empirical joint characteristic function at ``(r1, r2)``."""
        key = (r1, r2)
        return complex(self.jc[key], self.js[key])

    def phi1(self, r: int) -> complex:
        return complex(self.j1c[r], self.j1s[r])

    def phi2(self, r: int) -> complex:
        return complex(self.j2c[r], self.j2s[r])


def _mean_cos_sin(freqs: np.ndarray, theta1: np.ndarray, theta2: np.ndarray):
    phase = np.outer(freqs[:, 0], theta1) + np.outer(freqs[:, 1], theta2)
    return np.cos(phase).mean(axis=1), np.sin(phase).mean(axis=1)


def trig_moments(s: PairedCircSample, freqs: Iterable[tuple[int, int]]) -> TrigMomentSet:
    """Empirical trigonometric moments at integer frequency pairs.

    Joint moments are filled in for every requested pair and for the
    marginal pairs ``(r1, 0)`` and ``(0, r2)`` it implies; marginal moments
    are computed by direct summation over each coordinate.
    """
    joint = set()
    for r1, r2 in freqs:
        r1, r2 = int(r1), int(r2)
        joint.update([(r1, r2), (r1, 0), (0, r2)])
    joint.add((0, 0))
    joint = sorted(joint)
    f = np.array(joint, dtype=float)
    jc, js = _mean_cos_sin(f, s.theta1, s.theta2)

    r1s = sorted({p[0] for p in joint})
    r2s = sorted({p[1] for p in joint})
    c1 = np.cos(np.outer(r1s, s.theta1)).mean(axis=1)
    s1 = np.sin(np.outer(r1s, s.theta1)).mean(axis=1)
    c2 = np.cos(np.outer(r2s, s.theta2)).mean(axis=1)
    s2 = np.sin(np.outer(r2s, s.theta2)).mean(axis=1)

    return TrigMomentSet(
        n=s.n,
        j1c=dict(zip(r1s, c1.tolist())),
        j1s=dict(zip(r1s, s1.tolist())),
        j2c=dict(zip(r2s, c2.tolist())),
        j2s=dict(zip(r2s, s2.tolist())),
        jc=dict(zip(joint, jc.tolist())),
        js=dict(zip(joint, js.tolist())),
    )
