"""Coverage and rate analysis for coexisting RF/THz finite indoor networks.

Two independent engines evaluate the same scenario: an analytical pipeline
(``hexnet.analytic``) built on nested adaptive quadrature and jet-based
Laplace-transform derivatives, and a Monte-Carlo simulator
(``hexnet.montecarlo``).  Their agreement is the package's acceptance gate.
"""

from importlib import resources

from .analytic import (
    AnalyticEngine,
    CoverageReport,
    TierMetrics,
    assoc_probabilities,
    conditional_coverage,
    conditional_rate,
    coverage,
    full_report,
    laplace_interference,
    rate,
    serving_distance_pdf,
)
from .montecarlo import McEstimate, SimulationSummary, TrialOutcome, estimate, run_trial
from .params import (
    NetworkConfig,
    derived_constants,
    load_config,
    load_config_file,
    serialize_config,
    with_updates,
)

__version__ = "0.1.0"


def default_config_text() -> str:
    """The shipped baseline scenario document."""
    return resources.files("hexnet").joinpath("configs/table3.ini").read_text()


def default_config() -> NetworkConfig:
    return load_config(default_config_text())


__all__ = [
    "AnalyticEngine",
    "CoverageReport",
    "McEstimate",
    "NetworkConfig",
    "SimulationSummary",
    "TierMetrics",
    "TrialOutcome",
    "assoc_probabilities",
    "conditional_coverage",
    "conditional_rate",
    "coverage",
    "default_config",
    "default_config_text",
    "derived_constants",
    "estimate",
    "full_report",
    "laplace_interference",
    "load_config",
    "load_config_file",
    "rate",
    "run_trial",
    "serialize_config",
    "serving_distance_pdf",
    "with_updates",
]
