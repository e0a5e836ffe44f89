"""Time-dependent decay of states trapped behind a 1D square barrier."""
from .errors import *  # noqa: F401,F403
from .model import Channel, PotentialParams, branch_sqrt, ktilde, potential_value
from .resonances import Resonance, admissible_indices, gamow_eval, solve_resonance
from .eigenfunctions import LaurentData, jost, laurent_expand, phi
from .spectral import (SpectralAmplitude, WaveState, bound_state, closed_amplitude,
                       forward_transform, inverse_transform, truncated_gamow)
from .propagator import EvolutionResult, evolve, evolve_many, main_term, ray_term
from .oracle import GridConfig, cn_evolve, compare, default_config
from .analysis import (DecayFit, DecaySeries, fit_decay, nonescape_series,
                       survival_amplitude, survival_probability)

__version__ = "0.1.0"
