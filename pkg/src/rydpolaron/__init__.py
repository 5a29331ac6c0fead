"""Small-polaron transitions in Rydberg-dressed tweezer arrays by momentum-resolved ED."""

from .basis import KSectorBasis, build_k_sector, enumerate_phonon_configs
from .eigensolver import EigResult, Observables, dense_spectrum, lanczos_ground, observables
from .estimator import PolaronSpectrum
from .hamiltonian import SparseHamiltonian, assemble, assemble_sector
from .model import VertexParams, bare_dispersion, effective_lambda_quadrature, vertex, vertex_ss
from .params import (
    ModelParams,
    PhysicalParams,
    bare_params,
    coupling_constants,
    dimensionless_couplings,
    lambda_ss_physical,
    sweet_spot_detuning,
    sweet_spot_zeta,
    zeta,
)
from .scan import ScanPoint, TransitionReport, convergence_study, find_critical, sweep_lambda, sweep_rabi

__version__ = "0.1.0"
