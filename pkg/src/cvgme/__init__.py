"""Genuine multipartite entanglement of Gaussian and non-Gaussian three-mode states.

Covariance-matrix algebra, truncated Fock simulation, Gaussian-to-Fock matrix
elements, nonlinear and SDP-based witnesses, and threshold sweeps.
"""

from .errors import (
    BracketError,
    CvgmeError,
    DegenerateFilterError,
    DomainError,
    InvalidCovarianceError,
    NumericalError,
    UsageError,
)
from .symplectic import (
    CovarianceMatrix,
    ModeBipartition,
    direct_sum,
    fs_mixture_cm,
    fs_mixture_decomposition,
    full_inseparability_threshold,
    multi_copy_gap,
    nu_tilde_closed_form,
    partial_transpose_cm,
    ppt_min_symplectic_eigenvalue,
    ppt_verdict,
    ps_mixture_cm,
    symplectic_eigenvalues,
    tmsv_cm,
    tripartite_bipartitions,
)
from .fock import (
    FockDensityMatrix,
    LocalFilter,
    fs_state_density,
    local_project,
    moments_from_density,
    partial_trace,
    partial_transpose,
    tmsv_density,
)
from .gaussian_fock import (
    WignerGaussian,
    gaussian_fock_element_oracle,
    qubit_projection,
    qubit_subspace_element,
    qubit_subspace_table,
)
from .witnesses import WitnessElements, biseparability_witness, gabriel_criterion, symmetric_witness
from .fs_analytics import gabriel_two_copy_fs, pt_block_eigenvalues
from .sdp import Block, Constraint, SdpProblem, SdpSolution, SolverOptions, solve
from .entanglement_sdp import (
    CmWitness,
    Feasible,
    Infeasible,
    QubitGmeWitness,
    cm_bisep_feasibility,
    fully_decomposable_witness,
    optimal_cm_witness,
    pair_activation_scan,
)
from .records import ScanRecord
from .scan import ThresholdResult, find_threshold, thresholds

__version__ = "0.1.0"
