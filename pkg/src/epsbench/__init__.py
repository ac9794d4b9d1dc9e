"""epsbench: complexity-calibrated benchmarks for next-symbol predictors.

Random unifilar generators with exact ground truths (entropy rate, minimal
prediction error, finite-history entropy curves, error-probability lower
bounds), renewal-process stress cases, and matched reservoir / shift-register
/ LSTM baselines scored against those truths.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND_NAME as kernel_backend  # noqa: F401
from .machine import (  # noqa: F401
    EpsilonMachine,
    ValidationReport,
    analyze,
    deserialize,
    entropy_rate,
    min_error_probability,
    serialize,
    stationary_distribution,
    validate,
)
from .sampler import SamplerConfig, SampleReport, sample_epsilon_machine, survey  # noqa: F401
from .infotheory import (  # noqa: F401
    FanoBound,
    MyopicCurve,
    binary_entropy,
    block_entropy,
    fano_report,
    inverse_binary_entropy,
    myopic_entropy_rate,
    predictive_information,
    word_distribution,
)
from .renewal import SurvivalSpec, build_renewal_machine, interevent_pmf  # noqa: F401
from .generator import SimulatedSeries, empirical_conditional_entropy, simulate  # noqa: F401
