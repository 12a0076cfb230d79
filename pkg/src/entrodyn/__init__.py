"""Information entropy and Fisher information dynamics on 1-D grids."""

from .densities import (
    DiscreteDistribution,
    GaussianParams,
    Grid,
    GridDensity,
    bernoulli_pmf,
    coarse_grain,
    exponential_on_grid,
    gaussian_on_grid,
    moments,
    normalize,
)
from .errors import EntrodynError
from .functionals import (
    EntropyValue,
    GridField,
    coarse_grained_entropy,
    conditional_entropy,
    differential_entropy,
    entropy_power,
    fisher_information,
    kullback,
    shannon_discrete,
)

__version__ = "0.1.0"
