"""Von Mises sampling, CDF and quantile on ``[-pi, pi)``."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import special

from ._rng import as_generator
from .circular import wrap_angle

_MAX_TERMS = 4000
_QUANTILE_MAXITER = 60


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not np.isfinite(kappa) or kappa < 0:
        raise ValueError(f"concentration must be finite and >= 0, got {kappa}")
    return kappa


def sample_vm(n: int, mu: float = 0.0, kappa: float = 0.0, seed=None) -> np.ndarray:
    """Draw ``n`` von Mises(``mu``, ``kappa``) angles.

    Best and Fisher's rejection sampler with a wrapped Cauchy envelope;
    ``kappa = 0`` gives the uniform law on the circle.
    """
    kappa = _check_kappa(kappa)
    n = int(n)
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = as_generator(seed)
    if kappa < 1e-12:
        return wrap_angle(rng.uniform(-np.pi, np.pi, size=n) + mu).reshape(-1)

    # rho = (tau - sqrt(2 tau)) / (2 kappa) rewritten to avoid cancellation
    root = np.sqrt(1.0 + 4.0 * kappa * kappa)
    tau = 1.0 + root
    rho = 2.0 * kappa * np.sqrt(tau) / ((root + 1.0) * (np.sqrt(tau) + np.sqrt(2.0)))
    r = (1.0 + rho * rho) / (2.0 * rho)

    out = np.empty(n)
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 16)
        u1, u2, u3 = rng.random((3, m))
        z = np.cos(np.pi * u1)
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        with np.errstate(divide="ignore"):
            accept = (c * (2.0 - c) - u2 > 0) | (np.log(c / u2) + 1.0 - c >= 0)
        theta = np.sign(u3 - 0.5) * np.arccos(np.clip(f, -1.0, 1.0))
        theta = theta[accept][: n - filled]
        out[filled : filled + theta.size] = theta
        filled += theta.size
    return wrap_angle(out + mu).reshape(-1)


def vm_pdf(theta, kappa: float, mu: float = 0.0):
    kappa = _check_kappa(kappa)
    theta = np.asarray(theta, dtype=float)
    return np.exp(kappa * (np.cos(theta - mu) - 1.0)) / (2.0 * np.pi * special.i0e(kappa))


@lru_cache(maxsize=64)
def _fourier_coefficients(kappa: float) -> np.ndarray:
    """``I_p(kappa) / I_0(kappa) / p`` for ``p = 1..P``, truncated at 1e-17."""
    p = 1
    chunk = 64
    coefs = []
    while p <= _MAX_TERMS:
        orders = np.arange(p, p + chunk)
        a = special.ive(orders, kappa) / special.ive(0, kappa)
        coefs.append(a / orders)
        small = np.nonzero(a < 1e-17)[0]
        if small.size:
            return np.concatenate(coefs)[: p - 1 + small[0]]
        p += chunk
    return np.concatenate(coefs)


def vm_cdf(theta, kappa: float):
    """CDF of the zero-mean von Mises law on ``[-pi, pi]``.

    Uses the Fourier expansion
    ``F(t) = (t + pi) / (2 pi) + (1/pi) sum_p I_p(k)/I_0(k) sin(p t) / p``.
    """
    kappa = _check_kappa(kappa)
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) > np.pi + 1e-12):
        raise ValueError("vm_cdf expects angles in [-pi, pi]")
    theta = np.clip(theta, -np.pi, np.pi)
    base = (theta + np.pi) / (2.0 * np.pi)
    if kappa == 0:
        out = base
    else:
        c = _fourier_coefficients(kappa)
        p = np.arange(1, c.size + 1)
        out = base + np.sin(np.multiply.outer(theta, p)) @ c / np.pi
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def vm_quantile(u, kappa: float):
    """Inverse of :func:`vm_cdf`, on ``[-pi, pi]``.

    Newton steps on the CDF, falling back to bisection whenever a step
    leaves the current bracket. ``u = 1`` maps to ``pi``.
    """
    kappa = _check_kappa(kappa)
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)) or np.any((u < 0) | (u > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    scalar = u.ndim == 0
    u = np.atleast_1d(u).astype(float)
    if kappa == 0:
        x = 2.0 * np.pi * u - np.pi
        return float(x[0]) if scalar else x

    lo = np.full(u.shape, -np.pi)
    hi = np.full(u.shape, np.pi)
    x = 2.0 * np.pi * u - np.pi
    active = np.ones(u.shape, dtype=bool)
    for _ in range(_QUANTILE_MAXITER):
        f = vm_cdf(x[active], kappa) - u[active]
        xa, la, ha = x[active], lo[active], hi[active]
        la = np.where(f <= 0, xa, la)
        ha = np.where(f >= 0, xa, ha)
        done = (np.abs(f) < 1e-15) | (ha - la < 1e-14)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = xa - f / vm_pdf(xa, kappa)
        bad = ~np.isfinite(step) | (step <= la) | (step >= ha)
        x[active] = np.where(done, xa, np.where(bad, 0.5 * (la + ha), step))
        lo[active], hi[active] = la, ha
        active[np.flatnonzero(active)[done]] = False
        if not active.any():
            break
    x = np.where(u == 0, -np.pi, np.where(u == 1, np.pi, x))
    return float(x[0]) if scalar else x
