"""EIT in Doppler-broadened multilevel Lambda systems."""

__version__ = "0.1.0"

from .angular import BranchingRatio, branching_ratio, clebsch_gordan, decay_channels, relative_dipole
from .atomdata import CS133, RB85, RB87, SPECIES, cs_six_level_scheme, doppler_width, mhz, to_mhz
from .doppler import (TransmittanceCurve, VelocityDistribution, average_chi, contrast, transmittance,
                      transparency_peak)
from .errors import (ConfigError, ConvergenceError, DomainError, EITError, FlatCurveError,
                     NumericalError)
from .estimators import TransmittanceRegressor
from .pumping import DensityMatrixBlock, PumpConfig, ZeemanBasis, modified_distribution, steady_state
from .resonance import (atr_shift_six_level, atr_shift_three_level, eit_shift_six_level, find_eit_minimum,
                        find_pole)
from .susceptibility import LevelScheme, Susceptibility, chi, six_level_coherences, three_level_coherence
