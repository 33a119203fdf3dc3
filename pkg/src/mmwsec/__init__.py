"""Analytical / Monte Carlo laboratory for the secrecy metrics of a
millimeter-wave cellular network: closed-form secure connectivity,
connection and secrecy probabilities, and perfect-link densities, each
cross-validated against a stochastic-geometry simulator.
"""

from .scenario import (
    AnPattern,
    AntennaPattern,
    BlockageModel,
    FadingParams,
    MicrowaveParams,
    PathLossModel,
    ScenarioError,
    ScenarioParams,
    load_scenario,
    microwave_preset,
    noise_power,
    preset,
    save_scenario,
)
from .numerics import (
    IntegrationError,
    NumericsError,
    QuadratureSettings,
    UnsupportedOrderError,
    gamma_fn,
    gauss_2f1,
    integrate,
    laplace_derivative,
    lower_incomplete_gamma,
    upper_incomplete_gamma,
)
from .analysis_noise import (
    AssociationLaw,
    PlpfIntensity,
    association_law,
    association_probabilities,
    colluding_laplace,
    connection_probability,
    nearest_los_pdf,
    nearest_nlos_pdf,
    perfect_link_density,
    plpf_intensity,
    secrecy_probability_colluding,
    secrecy_probability_noncolluding,
    secure_connectivity_colluding_bound,
    secure_connectivity_colluding_exact,
    secure_connectivity_noncolluding,
    serving_distance_pdf,
)
from .analysis_an import (
    an_connection_probability,
    an_perfect_link_density,
    an_psi,
    an_secrecy_probability,
)
from .montecarlo import (
    EmpiricalMetrics,
    NetworkRealization,
    estimate_an,
    estimate_microwave_baseline,
    estimate_noise_limited,
    sample_realization,
)

__version__ = "0.1.0"
