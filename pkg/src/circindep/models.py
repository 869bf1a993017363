"""Toroidal models with a single dependence parameter.

Four families are provided, each independent when its dependence parameter
is zero:

* ``PB(p)`` - parabolic functional dependence mixed with noise.
* ``BWC(rho1, rho2, rho)`` - bivariate wrapped Cauchy (Kato and Pewsey).
* ``BCvM(kappa1, kappa2, kappa3, interaction)`` - bivariate cosine von Mises.
* ``BvM(kappa1, kappa2, mu_g, kappa_g)`` - von Mises margins joined through a
  von Mises link on the difference of their CDFs (Wehrly-Johnson form).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import ClassVar, Union

import numpy as np

from ._rng import as_generator
from .circular import PairedCircSample, wrap_angle
from .vonmises import sample_vm, vm_cdf, vm_pdf, vm_quantile


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def _in_range(name, value, lo, hi, lo_closed=True, hi_closed=True):
    value = float(value)
    ok = np.isfinite(value)
    ok &= value >= lo if lo_closed else value > lo
    ok &= value <= hi if hi_closed else value < hi
    if not ok:
        left = "[" if lo_closed else "("
        right = "]" if hi_closed else ")"
        raise ValueError(f"{name} must lie in {left}{lo}, {hi}{right}, got {value}")
    return value


# ---------------------------------------------------------------- parabolic


def sample_pb(n: int, p: float, seed=None) -> PairedCircSample:
    """Parabolic model: ``theta2 = 2 [p theta1^2 + (1 - p) U^2] / pi - pi``.

    ``theta1`` and ``U`` are independent uniforms on the circle; ``p = 1``
    is deterministic dependence, ``p = 0`` independence.
    """
    n = _check_n(n)
    p = _in_range("p", p, 0.0, 1.0)
    rng = as_generator(seed)
    t1 = rng.uniform(-np.pi, np.pi, size=n)
    u = rng.uniform(-np.pi, np.pi, size=n)
    t2 = 2.0 * (p * t1**2 + (1.0 - p) * u**2) / np.pi - np.pi
    return PairedCircSample(t1, t2)


# ------------------------------------------------------ wrapped Cauchy


def sample_wc(n: int, mu: float, rho: float, seed=None) -> np.ndarray:
    """Wrapped Cauchy draws by inverting its closed-form CDF."""
    rho = _in_range("rho", rho, 0.0, 1.0, hi_closed=False)
    rng = as_generator(seed)
    u = rng.random(int(n))
    return wrap_angle(mu + 2.0 * np.arctan((1.0 - rho) / (1.0 + rho) * np.tan(np.pi * (u - 0.5)))).reshape(-1)


def wc_pdf(theta, rho: float, mu: float = 0.0):
    theta = np.asarray(theta, dtype=float)
    return (1.0 - rho**2) / (2.0 * np.pi * (1.0 + rho**2 - 2.0 * rho * np.cos(theta - mu)))


def bwc_constants(rho1: float, rho2: float, rho: float) -> tuple[float, ...]:
    """``(c0, ..., c5)`` of the density
    ``c0 / (c1 - c2 cos t1 - c3 cos t2 - c4 cos t1 cos t2 - c5 sin t1 sin t2)``.
    """
    a = abs(rho)
    p2, p12, p22 = 1 + rho**2, 1 + rho1**2, 1 + rho2**2
    c0 = (1 - rho**2) * (1 - rho1**2) * (1 - rho2**2) / (4 * np.pi**2)
    c1 = p2 * p12 * p22 - 8 * a * rho1 * rho2
    c2 = 2 * p2 * rho1 * p22 - 4 * a * rho2 * p12
    c3 = 2 * p2 * p12 * rho2 - 4 * a * rho1 * p22
    c4 = -4 * p2 * rho1 * rho2 + 2 * a * p12 * p22
    c5 = 2 * rho * (1 - rho1**2) * (1 - rho2**2)
    return c0, c1, c2, c3, c4, c5


def bwc_pdf(theta1, theta2, rho1: float, rho2: float, rho: float):
    c0, c1, c2, c3, c4, c5 = bwc_constants(rho1, rho2, rho)
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    return c0 / (
        c1 - c2 * np.cos(t1) - c3 * np.cos(t2) - c4 * np.cos(t1) * np.cos(t2) - c5 * np.sin(t1) * np.sin(t2)
    )


def sample_bwc(n: int, rho1: float, rho2: float, rho: float, seed=None) -> PairedCircSample:
    """Bivariate wrapped Cauchy with ``WC(0, rho1)`` and ``WC(0, rho2)`` margins.

    Draws ``theta1`` from its margin and then ``theta2`` from the conditional
    law, which is again wrapped Cauchy: for fixed ``theta1`` the density is
    ``1 / (A - R cos(theta2 - psi))`` up to a constant.
    """
    n = _check_n(n)
    rho1 = _in_range("rho1", rho1, 0.0, 1.0, hi_closed=False)
    rho2 = _in_range("rho2", rho2, 0.0, 1.0, hi_closed=False)
    rho = _in_range("rho", rho, -1.0, 1.0, lo_closed=False, hi_closed=False)
    rng = as_generator(seed)
    _, c1, c2, c3, c4, c5 = bwc_constants(rho1, rho2, rho)
    t1 = sample_wc(n, 0.0, rho1, rng)
    a = c1 - c2 * np.cos(t1)
    b = c3 + c4 * np.cos(t1)
    c = c5 * np.sin(t1)
    r = np.hypot(b, c)
    psi = np.arctan2(c, b)
    # conditional concentration solves (1 + q^2) / (2 q) = A / R
    q = r / (a + np.sqrt(np.maximum(a * a - r * r, 0.0)))
    u = rng.random(n)
    t2 = psi + 2.0 * np.arctan((1.0 - q) / (1.0 + q) * np.tan(np.pi * (u - 0.5)))
    return PairedCircSample(t1, t2)


# ------------------------------------------------- bivariate cosine vM


def bcvm_log_density(theta1, theta2, kappa1, kappa2, kappa3, interaction="positive"):
    """Unnormalised log-density ``k1 cos t1 + k2 cos t2 + k3 cos(t1 -/+ t2)``.

    ``interaction="positive"`` uses ``t1 - t2``, ``"negative"`` uses ``t1 + t2``.
    """
    sign = _interaction_sign(interaction)
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    return kappa1 * np.cos(t1) + kappa2 * np.cos(t2) + kappa3 * np.cos(t1 - sign * t2)


def _interaction_sign(interaction: str) -> int:
    if interaction == "positive":
        return 1
    if interaction == "negative":
        return -1
    raise ValueError(f"interaction must be 'positive' or 'negative', got {interaction!r}")


def bcvm_acceptance_rate(kappa1, kappa2, kappa3, interaction="positive", grid: int = 512) -> float:
    """Expected acceptance probability of the uniform-proposal sampler."""
    t = -np.pi + 2 * np.pi * (np.arange(grid) + 0.5) / grid
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    bound = kappa1 + kappa2 + abs(kappa3)
    return float(np.mean(np.exp(bcvm_log_density(t1, t2, kappa1, kappa2, kappa3, interaction) - bound)))


def sample_bcvm(n: int, kappa1: float, kappa2: float, kappa3: float, interaction: str = "positive", seed=None):
    """Bivariate cosine von Mises draws by rejection from the uniform law on
    the torus, with envelope ``exp(k1 + k2 + |k3|)``."""
    n = _check_n(n)
    kappa1 = _in_range("kappa1", kappa1, 0.0, np.inf)
    kappa2 = _in_range("kappa2", kappa2, 0.0, np.inf)
    kappa3 = float(kappa3)
    if not np.isfinite(kappa3):
        raise ValueError("kappa3 must be finite")
    _interaction_sign(interaction)
    rng = as_generator(seed)
    bound = kappa1 + kappa2 + abs(kappa3)
    t1 = np.empty(n)
    t2 = np.empty(n)
    filled = 0
    while filled < n:
        m = max(4 * (n - filled), 64)
        x1 = rng.uniform(-np.pi, np.pi, m)
        x2 = rng.uniform(-np.pi, np.pi, m)
        u = rng.random(m)
        keep = np.log(u) < bcvm_log_density(x1, x2, kappa1, kappa2, kappa3, interaction) - bound
        k = min(int(keep.sum()), n - filled)
        t1[filled : filled + k] = x1[keep][:k]
        t2[filled : filled + k] = x2[keep][:k]
        filled += k
    return PairedCircSample(t1, t2)


# ------------------------------------------------ von Mises link model


def sample_bvm_with_link(n: int, kappa1: float, kappa2: float, mu_g: float, kappa_g: float, seed=None):
    """Like :func:`sample_bvm`, also returning the link draws ``omega``."""
    n = _check_n(n)
    kappa1 = _in_range("kappa1", kappa1, 0.0, np.inf)
    kappa2 = _in_range("kappa2", kappa2, 0.0, np.inf)
    kappa_g = _in_range("kappa_g", kappa_g, 0.0, np.inf)
    rng = as_generator(seed)
    t1 = sample_vm(n, 0.0, kappa1, rng)
    omega = sample_vm(n, mu_g, kappa_g, rng)
    u2 = np.mod(vm_cdf(t1, kappa1) - omega / (2.0 * np.pi), 1.0)
    t2 = vm_quantile(u2, kappa2)
    return PairedCircSample(t1, t2), omega


def sample_bvm(n: int, kappa1: float, kappa2: float, mu_g: float, kappa_g: float, seed=None) -> PairedCircSample:
    """Von Mises margins linked through ``2 pi (F1(t1) - F2(t2)) ~ vM(mu_g, kappa_g)``.

    ``theta2`` solves ``F2(theta2) = frac(F1(theta1) - omega / (2 pi))`` for a
    link draw ``omega``, which gives the joint density
    ``2 pi f1 f2 f_g(2 pi (F1 - F2))``. With ``kappa_g = 0`` the link is
    uniform and the margins are independent.
    """
    return sample_bvm_with_link(n, kappa1, kappa2, mu_g, kappa_g, seed)[0]


def bvm_pdf(theta1, theta2, kappa1, kappa2, mu_g, kappa_g):
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    link = 2.0 * np.pi * (vm_cdf(t1, kappa1) - vm_cdf(t2, kappa2))
    return 2.0 * np.pi * vm_pdf(t1, kappa1) * vm_pdf(t2, kappa2) * vm_pdf(link, kappa_g, mu_g)


def bvm_link_residual(s: PairedCircSample, kappa1: float, kappa2: float, omega) -> np.ndarray:
    """``wrap(2 pi (F1 - F2) - omega)`` per draw; zero up to quantile accuracy."""
    link = 2.0 * np.pi * (vm_cdf(s.theta1, kappa1) - vm_cdf(s.theta2, kappa2))
    return wrap_angle(link - np.asarray(omega))


# ------------------------------------------------------ model objects


@dataclass(frozen=True)
class PB:
    p: float = 0.0

    name: ClassVar[str] = "PB"
    dependence: ClassVar[str] = "p"

    def __post_init__(self):
        _in_range("p", self.p, 0.0, 1.0)

    def sample(self, n, seed=None) -> PairedCircSample:
        return sample_pb(n, self.p, seed)


@dataclass(frozen=True)
class BWC:
    rho1: float = 0.1
    rho2: float = 0.1
    rho: float = 0.0

    name: ClassVar[str] = "BWC"
    dependence: ClassVar[str] = "rho"

    def __post_init__(self):
        _in_range("rho1", self.rho1, 0.0, 1.0, hi_closed=False)
        _in_range("rho2", self.rho2, 0.0, 1.0, hi_closed=False)
        _in_range("rho", self.rho, -1.0, 1.0, lo_closed=False, hi_closed=False)

    def sample(self, n, seed=None) -> PairedCircSample:
        return sample_bwc(n, self.rho1, self.rho2, self.rho, seed)

    def pdf(self, theta1, theta2):
        return bwc_pdf(theta1, theta2, self.rho1, self.rho2, self.rho)


@dataclass(frozen=True)
class BCvM:
    kappa1: float = 1.0
    kappa2: float = 1.0
    kappa3: float = 0.0
    interaction: str = "positive"

    name: ClassVar[str] = "BCvM"
    dependence: ClassVar[str] = "kappa3"

    def __post_init__(self):
        _in_range("kappa1", self.kappa1, 0.0, np.inf)
        _in_range("kappa2", self.kappa2, 0.0, np.inf)
        _in_range("kappa3", self.kappa3, -np.inf, np.inf, lo_closed=False, hi_closed=False)
        _interaction_sign(self.interaction)

    def sample(self, n, seed=None) -> PairedCircSample:
        return sample_bcvm(n, self.kappa1, self.kappa2, self.kappa3, self.interaction, seed)

    def log_density(self, theta1, theta2):
        return bcvm_log_density(theta1, theta2, self.kappa1, self.kappa2, self.kappa3, self.interaction)


@dataclass(frozen=True)
class BvM:
    kappa1: float = 1.0
    kappa2: float = 1.0
    mu_g: float = 0.0
    kappa_g: float = 0.0

    name: ClassVar[str] = "BvM"
    dependence: ClassVar[str] = "kappa_g"

    def __post_init__(self):
        _in_range("kappa1", self.kappa1, 0.0, np.inf)
        _in_range("kappa2", self.kappa2, 0.0, np.inf)
        _in_range("kappa_g", self.kappa_g, 0.0, np.inf)
        _in_range("mu_g", self.mu_g, -np.pi, np.pi, hi_closed=False)

    def sample(self, n, seed=None) -> PairedCircSample:
        return sample_bvm(n, self.kappa1, self.kappa2, self.mu_g, self.kappa_g, seed)

    def pdf(self, theta1, theta2):
        return bvm_pdf(theta1, theta2, self.kappa1, self.kappa2, self.mu_g, self.kappa_g)


ModelSpec = Union[PB, BWC, BCvM, BvM]
MODELS = {cls.name: cls for cls in (PB, BWC, BCvM, BvM)}


def with_dependence(model: ModelSpec, value: float) -> ModelSpec:
    """Copy of ``model`` with its dependence parameter set to ``value``."""
    return replace(model, **{model.dependence: value})


def model_to_dict(model: ModelSpec) -> dict:
    return {"name": model.name, **asdict(model)}


def model_from_dict(d: dict) -> ModelSpec:
    """Inverse of :func:`model_to_dict`; unknown keys raise ``KeyError``."""
    d = dict(d)
    if "name" not in d:
        raise KeyError("name")
    name = d.pop("name")
    if name not in MODELS:
        raise ValueError(f"unknown model {name!r}; expected one of {sorted(MODELS)}")
    cls = MODELS[name]
    unknown = set(d) - {f.name for f in fields(cls)}
    if unknown:
        raise KeyError(f"unknown parameter(s) for {name}: {sorted(unknown)}")
    return cls(**d)
