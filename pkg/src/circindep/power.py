"""Monte Carlo size and power of the independence tests.

A benchmark fixes a model family, a grid of values for its dependence
parameter, a sample size ``n`` and a list of tests. For every grid point it
draws ``M`` samples and records how often each test rejects at level
``alpha``. Three calibrations are available:

``"two-sample"``
    Critical values are the empirical ``1 - alpha`` quantile of ``Mc``
    statistics computed on cross-paired samples: ``theta1`` from one draw of
    the model and ``theta2`` from an independent draw. The cross-paired sample
    has the model's margins with independent components, so no asymptotic
    approximation is involved. Critical values are regenerated at every grid
    point because the margins may change with the parameter.
``"permutation"``
    Every test is calibrated by ``B`` random relabellings of ``theta2``.
``"native"``
    Each test's own p-value: chi-square for the cosine and multi-order
    tests, permutation with ``B`` draws for the omnibus test.

Random streams are keyed by (grid index, replicate, role), so tables do not
depend on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import stats

from ._rng import check_seed, substream
from .circular import PairedCircSample
from .cosine import FrequencyPair, cosine_test
from .exceptions import ConfigError, ReplicateError
from .models import ModelSpec, model_from_dict, model_to_dict, with_dependence
from .multi import MultiOrderSpec, multi_test
from .omnibus import draw_permutations, exceedance_pvalue, omnibus_permutation_pvalue, t_omnibus

CALIBRATIONS = ("two-sample", "permutation", "native")
CSV_COLUMNS = ("model", "param", "test", "n", "M", "rate", "wilson_lo", "wilson_hi")

# stream roles within one (grid point, replicate)
_DATA, _CROSS, _PERM = 0, 1, 2


# ------------------------------------------------------------ utilities


def wilson_ci(hits: int, M: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion ``hits / M``."""
    if int(hits) != hits or int(M) != M or M < 1 or not 0 <= hits <= M:
        raise ValueError(f"need integers 0 <= hits <= M with M >= 1, got hits={hits}, M={M}")
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    z = stats.norm.ppf(0.5 + level / 2.0)
    p = hits / M
    denom = 1.0 + z * z / M
    centre = (p + z * z / (2 * M)) / denom
    half = z * math.sqrt(p * (1 - p) / M + z * z / (4 * M * M)) / denom
    lo = 0.0 if hits == 0 else max(0.0, centre - half)
    hi = 1.0 if hits == M else min(1.0, centre + half)
    return lo, hi


def by_correction(pvals) -> np.ndarray:
    """Benjamini-Yekutieli adjusted p-values, in input order.

    Step-up adjustment ``min_{j >= i} min(1, m c(m) p_(j) / j)`` with
    ``c(m) = 1 + 1/2 + ... + 1/m``; controls the false discovery rate under
    arbitrary dependence between the tests.
    """
    p = np.asarray(pvals, dtype=float).reshape(-1)
    if p.size == 0:
        raise ValueError("need at least one p-value")
    bad = ~np.isfinite(p) | (p < 0) | (p > 1)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"p-value at position {i} is outside [0, 1]: {p[i]}")
    m = p.size
    c = np.sum(1.0 / np.arange(1, m + 1))
    order = np.argsort(p, kind="stable")
    scaled = np.minimum(1.0, m * c * p[order] / np.arange(1, m + 1))
    adjusted = np.minimum.accumulate(scaled[::-1])[::-1]
    out = np.empty(m)
    out[order] = adjusted
    return out


def _permuted(s: PairedCircSample, perm: np.ndarray) -> PairedCircSample:
    return PairedCircSample(s.theta1, s.theta2[perm])


# ------------------------------------------------------ test descriptors


@dataclass(frozen=True)
class CosineTestSpec:
    """Cosine test ``T_n(r1, r2)``."""

    r1: int
    r2: int

    def __post_init__(self):
        f = FrequencyPair(int(self.r1), int(self.r2))
        if f != (self.r1, self.r2) or f == (0, 0):
            raise ValueError(f"need an integer frequency pair other than (0, 0), got ({self.r1}, {self.r2})")

    @property
    def label(self) -> str:
        return f"cosine({self.r1},{self.r2})"

    def statistic(self, s: PairedCircSample) -> float:
        return cosine_test(s, (self.r1, self.r2)).statistic

    def native_pvalue(self, s: PairedCircSample, perms) -> float:
        return cosine_test(s, (self.r1, self.r2)).p_value

    def permutation_pvalue(self, s: PairedCircSample, perms) -> float:
        t = self.statistic(s)
        return exceedance_pvalue(t, [self.statistic(_permuted(s, p)) for p in perms])

    def to_dict(self) -> dict:
        return {"cosine": [self.r1, self.r2]}


@dataclass(frozen=True)
class MultiTestSpec:
    """Multi-order quadratic-form test."""

    spec: MultiOrderSpec

    @property
    def label(self) -> str:
        def flat(pairs):
            return ",".join(f"{a},{b}" for a, b in pairs)

        if not self.spec.rs:
            return f"multi({flat(self.spec.rc)})"
        return f"multi(c:{flat(self.spec.rc)};s:{flat(self.spec.rs)})"

    def statistic(self, s: PairedCircSample) -> float:
        return multi_test(s, self.spec).statistic

    def native_pvalue(self, s: PairedCircSample, perms) -> float:
        return multi_test(s, self.spec).p_value

    def permutation_pvalue(self, s: PairedCircSample, perms) -> float:
        t = self.statistic(s)
        return exceedance_pvalue(t, [self.statistic(_permuted(s, p)) for p in perms])

    def to_dict(self) -> dict:
        return {"multi": self.spec.to_dict()}


@dataclass(frozen=True)
class OmnibusTestSpec:
    """Omnibus test ``T_{n, lambda}``."""

    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not np.isfinite(lam) or lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        object.__setattr__(self, "lam", lam)

    @property
    def label(self) -> str:
        return f"omnibus({self.lam:g})"

    def statistic(self, s: PairedCircSample) -> float:
        return t_omnibus(s, self.lam)

    def permutation_pvalue(self, s: PairedCircSample, perms) -> float:
        return omnibus_permutation_pvalue(s, self.lam, perms)[1]

    native_pvalue = permutation_pvalue

    def to_dict(self) -> dict:
        return {"omnibus": self.lam}


AnyTestSpec = Union[CosineTestSpec, MultiTestSpec, OmnibusTestSpec]

# the seven tests of the standard size and power study
STANDARD_BATTERY: tuple = (
    CosineTestSpec(1, 1),
    CosineTestSpec(1, -1),
    MultiTestSpec(MultiOrderSpec(rc=[1, -1, 1, 1])),
    OmnibusTestSpec(0.1),
    OmnibusTestSpec(0.5),
    OmnibusTestSpec(1.0),
    OmnibusTestSpec(2.0),
)


def parse_test_spec(d: dict, path: str = "test") -> AnyTestSpec:
    """Parse ``{"cosine": [r1, r2]}``, ``{"multi": [...] | {"rc": ..., "rs": ...}}``
    or ``{"omnibus": lambda}``."""
    if not isinstance(d, dict) or len(d) != 1:
        raise ConfigError(path, "expected a single-key object: cosine, multi or omnibus")
    (kind, value), = d.items()
    try:
        if kind == "cosine":
            r1, r2 = value
            return CosineTestSpec(r1, r2)
        if kind == "multi":
            if isinstance(value, dict):
                unknown = set(value) - {"rc", "rs"}
                if unknown:
                    raise ConfigError(f"{path}.multi", f"unknown key(s) {sorted(unknown)}")
                return MultiTestSpec(MultiOrderSpec(rc=value.get("rc", ()), rs=value.get("rs", ())))
            return MultiTestSpec(MultiOrderSpec(rc=value))
        if kind == "omnibus":
            return OmnibusTestSpec(float(value))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.{kind}", str(exc)) from exc
    raise ConfigError(path, f"unknown test kind {kind!r}; expected cosine, multi or omnibus")


# ------------------------------------------------------------- config


@dataclass(frozen=True)
class BenchConfig:
    """One power study.

    ``model`` fixes every parameter except the dependence parameter, which
    runs over ``grid``. ``Mc`` (critical-value replicates, two-sample
    calibration only) defaults to ``M``; ``B`` is the number of permutations.
    """

    model: ModelSpec
    grid: tuple
    n: int
    M: int
    tests: tuple
    alpha: float = 0.05
    calibration: str = "two-sample"
    Mc: int | None = None
    B: int = 200
    seed: int = 0

    def __post_init__(self):
        if not hasattr(self.model, "dependence"):
            raise ConfigError("model", f"not a model specification: {self.model!r}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigError("grid", "must contain at least one value")
        for i, v in enumerate(grid):
            try:
                with_dependence(self.model, v)
            except ValueError as exc:
                raise ConfigError(f"grid[{i}]", str(exc)) from exc
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "tests", tuple(self.tests))
        if not self.tests:
            raise ConfigError("tests", "must list at least one test")
        dim = max((t.spec.dim for t in self.tests if isinstance(t, MultiTestSpec)), default=0)
        _check_int("n", self.n, max(2, dim + 2))
        _check_int("M", self.M, 1)
        _check_int("B", self.B, 1)
        if self.Mc is not None:
            _check_int("Mc", self.Mc, 50)
        elif self.calibration == "two-sample" and self.M < 50:
            raise ConfigError("Mc", f"defaults to M = {self.M}, but at least 50 critical replicates are needed")
        if not (isinstance(self.alpha, (int, float)) and 0 < self.alpha < 1):
            raise ConfigError("alpha", f"must lie in (0, 1), got {self.alpha!r}")
        if self.calibration not in CALIBRATIONS:
            raise ConfigError("calibration", f"must be one of {CALIBRATIONS}, got {self.calibration!r}")
        try:
            check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError("seed", str(exc)) from exc

    @property
    def n_critical(self) -> int:
        return self.M if self.Mc is None else self.Mc

    def to_dict(self) -> dict:
        return {
            "model": model_to_dict(self.model),
            "grid": list(self.grid),
            "n": self.n,
            "M": self.M,
            "tests": [t.to_dict() for t in self.tests],
            "alpha": self.alpha,
            "calibration": self.calibration,
            "Mc": self.Mc,
            "B": self.B,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "expected a JSON object")
        allowed = {"model", "grid", "n", "M", "tests", "alpha", "calibration", "Mc", "B", "seed"}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown key")
        for key in ("model", "grid", "n", "M", "tests"):
            if key not in d:
                raise ConfigError(key, "missing required key")
        m = d["model"]
        if not isinstance(m, dict):
            raise ConfigError("model", "expected an object")
        if "name" not in m:
            raise ConfigError("model.name", "missing required key")
        try:
            model = model_from_dict(m)
        except KeyError as exc:
            raise ConfigError("model", str(exc).strip("'\"")) from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError("model", str(exc)) from exc
        if not isinstance(d["grid"], list):
            raise ConfigError("grid", "expected a list of numbers")
        for i, v in enumerate(d["grid"]):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"grid[{i}]", f"expected a number, got {v!r}")
        if not isinstance(d["tests"], list):
            raise ConfigError("tests", "expected a list")
        tests = tuple(parse_test_spec(t, f"tests[{i}]") for i, t in enumerate(d["tests"]))
        kwargs = {k: d[k] for k in ("alpha", "calibration", "Mc", "B", "seed") if k in d}
        return cls(model=model, grid=tuple(d["grid"]), n=d["n"], M=d["M"], tests=tests, **kwargs)

    @classmethod
    def from_json(cls, path) -> "BenchConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("<root>", f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)


def _check_int(name, value, minimum):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ConfigError(name, f"must be an integer >= {minimum}, got {value!r}")


# ------------------------------------------------------------ engine


def _cross_paired(model: ModelSpec, n: int, rng) -> PairedCircSample:
    a = model.sample(n, rng)
    b = model.sample(n, rng)
    return PairedCircSample(a.theta1, b.theta2)


def _run_chunk(job) -> np.ndarray:
    """Scores of replicates ``lo..hi-1`` for every test.

    Statistics for the ``"critical"`` and ``"two-sample"`` stages, p-values
    for ``"permutation"`` and ``"native"``.
    """
    stage, model, tests, n, B, seed, g, lo, hi = job
    out = np.empty((hi - lo, len(tests)))
    for i, r in enumerate(range(lo, hi)):
        try:
            if stage == "critical":
                s = _cross_paired(model, n, substream(seed, g, r, _CROSS))
            else:
                s = model.sample(n, substream(seed, g, r, _DATA))
            if stage in ("critical", "two-sample"):
                out[i] = [t.statistic(s) for t in tests]
            else:
                perms = draw_permutations(n, B, substream(seed, g, r, _PERM))
                method = "permutation_pvalue" if stage == "permutation" else "native_pvalue"
                out[i] = [getattr(t, method)(s, perms) for t in tests]
        except (ArithmeticError, ValueError) as exc:
            param = float(getattr(model, model.dependence))
            raise ReplicateError(param, r, stage, exc) from exc
    return out


def _scores(stage, model, tests, n, B, seed, g, reps, workers) -> np.ndarray:
    if workers <= 1 or reps < 2:
        return _run_chunk((stage, model, tests, n, B, seed, g, 0, reps))
    size = max(1, math.ceil(reps / (4 * workers)))
    jobs = [(stage, model, tests, n, B, seed, g, lo, min(reps, lo + size)) for lo in range(0, reps, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(_run_chunk, jobs)))


def _quantile(values: np.ndarray, alpha: float) -> np.ndarray:
    # linear interpolation between order statistics (numpy's default)
    return np.quantile(values, 1.0 - alpha, axis=0)


def critical_value_two_sample(
    model: ModelSpec, test: AnyTestSpec, n: int, Mc: int, alpha: float = 0.05, seed: int = 0, workers: int = 1
) -> float:
    """Empirical ``1 - alpha`` quantile of the statistic over ``Mc``
    cross-paired samples from ``model``.

    Uses the same streams as the first grid point of :func:`empirical_power`.
    """
    if int(Mc) != Mc or Mc < 50:
        raise ValueError(f"Mc must be an integer >= 50, got {Mc}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    stats_ = _scores("critical", model, (test,), int(n), 1, check_seed(seed), 0, int(Mc), workers)
    return float(_quantile(stats_[:, 0], alpha))


@dataclass(frozen=True)
class PowerCell:
    model: str
    param: float
    test: str
    n: int
    M: int
    hits: int
    rate: float
    wilson_lo: float
    wilson_hi: float
    critical: float | None = None

    def row(self) -> dict:
        """CSV/JSON row, numbers rounded to 6 significant digits."""
        return {
            "model": self.model,
            "param": _sig6(self.param),
            "test": self.test,
            "n": self.n,
            "M": self.M,
            "rate": _sig6(self.rate),
            "wilson_lo": _sig6(self.wilson_lo),
            "wilson_hi": _sig6(self.wilson_hi),
        }


def _sig6(x: float) -> float:
    return float(f"{x:.6g}")


@dataclass(frozen=True)
class PowerTable:
    """Rejection rates per (grid value, test) with 95% Wilson intervals."""

    config: BenchConfig
    cells: tuple = field(default_factory=tuple)

    def cell(self, param: float, test) -> PowerCell:
        label = test if isinstance(test, str) else test.label
        for c in self.cells:
            if c.test == label and math.isclose(c.param, param, rel_tol=0, abs_tol=1e-12):
                return c
        raise KeyError((param, label))

    def rate(self, param: float, test) -> float:
        return self.cell(param, test).rate

    def rows(self) -> list[dict]:
        return [c.row() for c in self.cells]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"config": self.config.to_dict(), "rows": self.rows()}, indent=2) + "\n"


def empirical_power(cfg: BenchConfig, workers: int = 1) -> PowerTable:
    """Rejection rate of every test at every grid point.

    Replicate ``r`` at grid index ``g`` draws its data from
    ``substream(cfg.seed, g, r, 0)``; all tests see the same samples.

    Raises
    ------
    ReplicateError
        If a sampler or test fails; the replicate index and grid value are
        attached and the original error is chained.
    """
    cells = []
    for g, value in enumerate(cfg.grid):
        model = with_dependence(cfg.model, value)
        crit = [None] * len(cfg.tests)
        if cfg.calibration == "two-sample":
            null_stats = _scores("critical", model, cfg.tests, cfg.n, cfg.B, cfg.seed, g, cfg.n_critical, workers)
            crit = _quantile(null_stats, cfg.alpha)
            scores = _scores("two-sample", model, cfg.tests, cfg.n, cfg.B, cfg.seed, g, cfg.M, workers)
            rejects = scores > crit
        else:
            scores = _scores(cfg.calibration, model, cfg.tests, cfg.n, cfg.B, cfg.seed, g, cfg.M, workers)
            rejects = scores < cfg.alpha
        for j, test in enumerate(cfg.tests):
            hits = int(rejects[:, j].sum())
            lo, hi = wilson_ci(hits, cfg.M)
            cells.append(
                PowerCell(
                    model=model.name,
                    param=float(value),
                    test=test.label,
                    n=cfg.n,
                    M=cfg.M,
                    hits=hits,
                    rate=hits / cfg.M,
                    wilson_lo=lo,
                    wilson_hi=hi,
                    critical=None if crit[j] is None else float(crit[j]),
                )
            )
    return PowerTable(config=cfg, cells=tuple(cells))
