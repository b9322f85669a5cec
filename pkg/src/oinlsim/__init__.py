"""Simulator for an interferometric measurement of light-induced
nonlinearities in a two-component condensate held by matched doughnut and
gaussian dipole beams."""

from .physical_params import (AtomSpecies, BeamConfig, DerivedTrap,
                              ProtocolConfig, ScaledSystem, derive_trap,
                              scale_to_dimensionless)
from .grid_fields import (ComplexField2D, Grid2D, TwoComponentState,
                          atom_number, chemical_potential, gp_energy,
                          make_grid)
from .gpe_solver import (Couplings, PairPotentials, SolverSettings,
                         ground_state_imaginary, propagate, step_real)
from .analytics import (epsilon_parameter, tf_ground_state,
                        trapped_fraction_integral, trapped_fraction_tf)
from .protocol import (MODE_INTEGRAL, MODE_NUMERIC, MODE_TF,
                       InterferometerResult, compensation_phase,
                       raman_apply, run_interferometer)
from .cli_io import parse_config, run_scan, write_outputs

__version__ = "0.1.0"
