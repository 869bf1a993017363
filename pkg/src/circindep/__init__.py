"""Tests of independence for pairs of circular variables.

The package offers three families of tests for toroidal data
``(theta1, theta2)`` on ``[-pi, pi)^2``:

* :func:`cosine_test`, a chi-square test built on one cosine component of
  the difference between the joint and product characteristic functions;
* :func:`multi_test`, a quadratic form over several cosine/sine components;
* :func:`permutation_test`, an omnibus statistic with Poisson weights over
  all frequencies, calibrated by permutation.

Samplers for four families of dependent toroidal laws and a Monte Carlo
power harness are included.
"""

from .circular import (
    PairedCircSample,
    TrigMomentSet,
    axial_to_circular,
    center_sample,
    circular_mean,
    lag_pairs,
    trig_moments,
    weighted_circular_mean,
    wrap_angle,
)
from .cosine import FrequencyPair, TestResult, cosine_test, d_cos, d_sin, ecf_difference, v_hat
from .exceptions import (
    ConfigError,
    DegenerateVarianceError,
    ReplicateError,
    SingularCovarianceError,
    UndefinedMeanError,
)
from .models import BWC, PB, BCvM, BvM, model_from_dict, model_to_dict, sample_bcvm, sample_bvm, sample_bwc, sample_pb, with_dependence
from .multi import MultiOrderSpec, delta_vec, multi_test, sigma_hat
from .omnibus import PermutationPlan, permutation_test, t_omnibus, t_omnibus_series
from .power import (
    BenchConfig,
    CosineTestSpec,
    MultiTestSpec,
    OmnibusTestSpec,
    PowerTable,
    by_correction,
    critical_value_two_sample,
    empirical_power,
    wilson_ci,
)
from .vonmises import sample_vm, vm_cdf, vm_pdf, vm_quantile

__version__ = "0.1.0"

__all__ = [
    "BCvM",
    "BWC",
    "BenchConfig",
    "BvM",
    "ConfigError",
    "CosineTestSpec",
    "DegenerateVarianceError",
    "FrequencyPair",
    "MultiOrderSpec",
    "MultiTestSpec",
    "OmnibusTestSpec",
    "PB",
    "PairedCircSample",
    "PermutationPlan",
    "PowerTable",
    "ReplicateError",
    "SingularCovarianceError",
    "TestResult",
    "TrigMomentSet",
    "UndefinedMeanError",
    "axial_to_circular",
    "by_correction",
    "center_sample",
    "circular_mean",
    "cosine_test",
    "critical_value_two_sample",
    "d_cos",
    "d_sin",
    "delta_vec",
    "ecf_difference",
    "empirical_power",
    "lag_pairs",
    "model_from_dict",
    "model_to_dict",
    "multi_test",
    "permutation_test",
    "sample_bcvm",
    "sample_bvm",
    "sample_bwc",
    "sample_pb",
    "sample_vm",
    "sigma_hat",
    "t_omnibus",
    "t_omnibus_series",
    "trig_moments",
    "v_hat",
    "vm_cdf",
    "vm_pdf",
    "vm_quantile",
    "weighted_circular_mean",
    "wilson_ci",
    "with_dependence",
    "wrap_angle",
]
