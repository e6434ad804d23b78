"""Higher-order SUSY partners of solvable 1-D Hamiltonians, their ladder algebras and coherent states."""

from .algebra import AlgebraReport, LadderRep, build_rep, commutator, verify_algebra
from .coherent import (CSFlavor, CoherentState, MomentSequence, annihilation_check, build_cs,
                       cs_wavefunction, evolution_check, moment_check, reproducing_kernel, rho_m,
                       rho_tilde_m, zero_eigenvalue_degeneracy)
from .errors import (ConfigError, DeletedLevel, DimMismatch, DomainError, NonConvergence,
                     NotNormalizable, NumericalError, PoleInDenominator, QuadratureFailure,
                     SingularPotential, SingularWronskian, SusyQMError)
from .numerics import Grid, diagonalize_1d, quad_adaptive
from .susy import (SeedSolution, SusyTransform, backlund_potential, new_level_eigenstate,
                   partner_eigenstate, partner_potential, spectrum_bookkeeping, wronskian)
from .systems import (InfiniteWell, LadderCoefficients, Oscillator, PoschlTeller, SpectrumModel,
                      energy, eigenfunction, ladder_r, parse_model, structure_f)

__version__ = "0.1.0"
