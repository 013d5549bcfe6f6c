"""Quasi-exactly solvable confluent Heun equation and two-center Coulomb eigenfunctions."""

from .cheq_core import (CheqParams, CriticalPolynomialFamily, PolynomialSolution,
                        QesCertificate, SpectralRoots, build_all_solutions, build_family,
                        build_solution, cheq_residual, count_zeros, pochhammer, qes_degree,
                        spectral_roots)
from .errors import QesError
from .ortho import (MomentFunctional, WeightFunction, double_orthogonality, moment_functional,
                    nu_coefficients, weak_orthogonality_check, weight_eval)
from .polynomial import BivariatePolynomial, RealPolynomial
from .reductions import (DerivedParams, GaugeFactor, ReductionKind, SchroedingerForm,
                         Sl2Decomposition, classify_reductions, derived_params, gseq_gauge,
                         rwh_gauge, schroedinger_form, sl2_decompose, sl2_expand)
from .twocenter import (CartesianGrid, CenterConfig, DemkovSolution, QuantumNumbers,
                        assemble_wavefunction, demkov_search, density_grid,
                        diophantine_enumerate, joint_solve)

__version__ = "0.1.0"
