"""Multi-order quadratic-form test built from cosine and sine ECF components."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy import linalg, stats

from .circular import PairedCircSample, TrigMomentSet, center_sample, trig_moments
from .cosine import TestResult, d_cos, d_sin
from .exceptions import SingularCovarianceError

MAX_CONDITION = 1e12


def _pair(p) -> tuple[int, int]:
    r1, r2 = p
    if int(r1) != r1 or int(r2) != r2:
        raise ValueError(f"frequencies must be integers, got {p!r}")
    return int(r1), int(r2)


def _pairs_from(values) -> tuple[tuple[int, int], ...]:
    """Accept ``[(1, -1), (1, 1)]`` or the flat form ``[1, -1, 1, 1]``."""
    values = list(values)
    if values and np.isscalar(values[0]):
        if len(values) % 2:
            raise ValueError("flat frequency vector must have even length")
        values = list(zip(values[::2], values[1::2]))
    return tuple(_pair(p) for p in values)


@dataclass(frozen=True)
class MultiOrderSpec:
    """Frequency pairs entering the cosine part (``rc``) and sine part (``rs``).

    Duplicated pairs are accepted here; they make the covariance singular and
    are rejected by :func:`multi_test`.
    """

    rc: tuple = ()
    rs: tuple = ()

    def __post_init__(self):
        rc = _pairs_from(self.rc)
        rs = _pairs_from(self.rs)
        if not rc and not rs:
            raise ValueError("need at least one frequency pair")
        if (0, 0) in rc or (0, 0) in rs:
            raise ValueError("frequency pair (0, 0) is not allowed")
        object.__setattr__(self, "rc", rc)
        object.__setattr__(self, "rs", rs)

    @property
    def dim(self) -> int:
        return len(self.rc) + len(self.rs)

    def to_dict(self) -> dict:
        return {"rc": [list(p) for p in self.rc], "rs": [list(p) for p in self.rs]}


def delta_vec(s: PairedCircSample, spec: MultiOrderSpec) -> np.ndarray:
    """Cosine statistics at ``spec.rc`` followed by sine statistics at ``spec.rs``."""
    return np.array([d_cos(s, r) for r in spec.rc] + [d_sin(s, r) for r in spec.rs], dtype=float)


def _add(a, b):
    return a[0] + b[0], a[1] + b[1]


def _sub(a, b):
    return a[0] - b[0], a[1] - b[1]


def v_entry(m: TrigMomentSet, row: str, col: str, r, t) -> float:
    """Entry ``(row, col)`` of the 2x2 covariance matrix of ``(cos, sin)``
    evaluated at joint frequencies ``r`` and ``t``.

    ``row``/``col`` are ``"c"`` or ``"s"``; ``("c", "s")`` is the covariance
    of ``cos(r . theta)`` with ``sin(t . theta)``.
    """
    r, t = _pair(r), _pair(t)
    jc, js = m.jc, m.js
    rp, rm = _add(r, t), _sub(r, t)
    if (row, col) == ("c", "c"):
        return 0.5 * (jc[rp] + jc[rm] - 2.0 * jc[r] * jc[t])
    if (row, col) == ("c", "s"):
        return 0.5 * (js[rp] - js[rm] - 2.0 * jc[r] * js[t])
    if (row, col) == ("s", "c"):
        return 0.5 * (js[rp] + js[rm] - 2.0 * jc[t] * js[r])
    if (row, col) == ("s", "s"):
        return 0.5 * (jc[rm] - jc[rp] - 2.0 * js[r] * js[t])
    raise ValueError(f"row and col must be 'c' or 's', got {row!r}, {col!r}")


def _components(r):
    """Marginal projections ``(r1, 0)`` and ``(0, r2)``."""
    return (r[0], 0), (0, r[1])


def _required_freqs(pairs) -> set:
    gen = set()
    for r in pairs:
        gen.add(r)
        gen.update(_components(r))
    out = set(gen)
    for a, b in product(gen, repeat=2):
        out.add(_add(a, b))
        out.add(_sub(a, b))
    return out


class _Plugin:
    """Empirical moments in the form the covariance entries use."""

    def __init__(self, m: TrigMomentSet):
        self.m = m

    def v(self, row, col, r, t):
        return v_entry(self.m, row, col, r, t)

    def other(self, r, k):
        """Real and imaginary parts of the marginal ECF of the coordinate
        other than ``k`` (0-based), evaluated at its entry of ``r``."""
        if k == 0:
            return self.m.j2c[r[1]], self.m.j2s[r[1]]
        return self.m.j1c[r[0]], self.m.j1s[r[0]]


def _cov_cc(p: _Plugin, r, t) -> float:
    v = p.v
    rk, tk = _components(r), _components(t)
    out = v("c", "c", r, t)
    for k in range(2):
        c, s = p.other(t, k)
        out -= c * v("c", "c", r, tk[k]) - s * v("c", "s", r, tk[k])
        c, s = p.other(r, k)
        out -= c * v("c", "c", t, rk[k]) - s * v("c", "s", t, rk[k])
    for k, m in product(range(2), repeat=2):
        cr, sr = p.other(r, k)
        ct, st = p.other(t, m)
        out += (
            cr * ct * v("c", "c", rk[k], tk[m])
            - cr * st * v("c", "s", rk[k], tk[m])
            - sr * ct * v("c", "s", tk[m], rk[k])
            + sr * st * v("s", "s", rk[k], tk[m])
        )
    return out


def _cov_cs(p: _Plugin, r, t) -> float:
    v = p.v
    rk, tk = _components(r), _components(t)
    out = v("c", "s", r, t)
    for k in range(2):
        c, s = p.other(t, k)
        out -= s * v("c", "c", r, tk[k]) + c * v("c", "s", r, tk[k])
        c, s = p.other(r, k)
        out -= c * v("c", "s", rk[k], t) - s * v("s", "s", rk[k], t)
    for k, m in product(range(2), repeat=2):
        cr, sr = p.other(r, k)
        ct, st = p.other(t, m)
        out += (
            cr * st * v("c", "c", rk[k], tk[m])
            + cr * ct * v("c", "s", rk[k], tk[m])
            - sr * st * v("c", "s", tk[m], rk[k])
            - sr * ct * v("s", "s", rk[k], tk[m])
        )
    return out


def _cov_ss(p: _Plugin, r, t) -> float:
    v = p.v
    rk, tk = _components(r), _components(t)
    out = v("s", "s", r, t)
    for k in range(2):
        c, s = p.other(t, k)
        out -= s * v("c", "s", tk[k], r) + c * v("s", "s", r, tk[k])
        c, s = p.other(r, k)
        out -= s * v("c", "s", rk[k], t) + c * v("s", "s", rk[k], t)
    for k, m in product(range(2), repeat=2):
        cr, sr = p.other(r, k)
        ct, st = p.other(t, m)
        out += (
            sr * st * v("c", "c", rk[k], tk[m])
            + sr * ct * v("c", "s", rk[k], tk[m])
            + cr * st * v("c", "s", tk[m], rk[k])
            + cr * ct * v("s", "s", rk[k], tk[m])
        )
    return out


def sigma_hat(s: PairedCircSample, spec: MultiOrderSpec) -> np.ndarray:
    """Plug-in estimate of the asymptotic covariance of ``sqrt(n) * delta_vec``.

    Every population moment in the closed-form covariance entries is replaced
    by its empirical counterpart computed from ``s`` itself (joint moments from
    the paired sample, not products of marginals). Only the upper triangle is
    evaluated; the lower one is its mirror.
    """
    if s.n < 2:
        raise ValueError("covariance estimate needs n >= 2")
    p = _Plugin(trig_moments(s, _required_freqs(spec.rc + spec.rs)))
    kinds = [("c", r) for r in spec.rc] + [("s", r) for r in spec.rs]
    d = len(kinds)
    sigma = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            (ki, ri), (kj, rj) = kinds[i], kinds[j]
            if ki == "c" and kj == "c":
                val = _cov_cc(p, ri, rj)
            elif ki == "c" and kj == "s":
                val = _cov_cs(p, ri, rj)
            elif ki == "s" and kj == "s":
                val = _cov_ss(p, ri, rj)
            else:
                val = _cov_cs(p, rj, ri)
            sigma[i, j] = sigma[j, i] = val
    return sigma


def _quadratic_form(sigma: np.ndarray, delta: np.ndarray) -> float:
    eig = np.linalg.eigvalsh(sigma)
    if eig[0] <= 0 or eig[-1] / eig[0] > MAX_CONDITION:
        raise SingularCovarianceError(
            f"estimated covariance is singular or ill-conditioned (eigenvalues {eig[0]:.3g} .. {eig[-1]:.3g})"
        )
    try:
        factor = linalg.cho_factor(sigma, lower=True)
    except linalg.LinAlgError as exc:
        raise SingularCovarianceError("estimated covariance is not positive definite") from exc
    return float(delta @ linalg.cho_solve(factor, delta))


def multi_test(s: PairedCircSample, spec: MultiOrderSpec, center: bool = True) -> TestResult:
    """Wald-type test ``n * delta' sigma^-1 delta`` against chi-square(J + K).

    ``MultiOrderSpec(rc=[(1, -1), (1, 1)])`` combines the two cosine tests
    that are locally optimal against positive and negative interaction.

    Raises
    ------
    SingularCovarianceError
        If the estimated covariance has a non-positive eigenvalue or a
        condition number above ``1e12`` (e.g. duplicated frequency pairs).
    """
    if s.n < spec.dim + 2:
        raise ValueError(f"need n >= {spec.dim + 2} for {spec.dim} components, got n = {s.n}")
    if center:
        s = center_sample(s)
    delta = delta_vec(s, spec)
    q = s.n * _quadratic_form(sigma_hat(s, spec), delta)
    q = max(q, 0.0)
    return TestResult(
        statistic=q,
        p_value=float(stats.chi2.sf(q, spec.dim)),
        method="asymptotic-chisq",
        df_or_B=spec.dim,
        n=s.n,
        params={"test": "multi", **spec.to_dict(), "center": bool(center)},
    )
