"""Collective-spin states of split spin-1/2 ensembles and their steering / entanglement criteria."""

from .exceptions import DegenerateStateError, DomainError, InvalidArgumentError, ResourceLimitError
from .spin import OperatorSpec, SpinSector, full_qubit_oracle, matrix_function, realize_operator, spin_matrices
from .states import (
    SectorState,
    SymmetricState,
    dicke,
    ghz,
    one_axis_twisted,
    polarized,
    product_dicke,
    random_product,
    random_symmetric,
)
from .splitting import (
    SectorMixture,
    dicke_schmidt_coefficients,
    random_separable,
    schmidt_entropy,
    schmidt_spectrum,
    split,
    split_binomial,
    split_exact,
)
from .moments import (
    GainVector,
    MomentSet,
    analytic_dicke_moments,
    inference_variance,
    moment_set,
    optimal_gain,
    planar_average,
)
from .criteria import (
    CriterionReport,
    appendix_criteria,
    entanglement_main,
    evaluate_all,
    first_moment_criterion,
    reid_criterion,
    steering_normalized,
    steering_raw,
    uncertainty_obs1,
)
from .shots import EstimateSet, ShotRecord, estimate, evaluate_from_estimates, read_csv, sample_shots, write_csv
from .analysis import cmd_sweep, cmd_table, cmd_verify

__version__ = "0.1.0"
