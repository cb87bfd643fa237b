"""Certified lower bounds on the number of levels per party that take part in genuine multipartite entanglement."""
from .combinatorics import PartySubset, bipartitions, delta_sets, m_subsets, n_d, sigma_pairs
from .criteria import (
    CriterionReport,
    Verdict,
    certify,
    ghz_fidelity_witness,
    q0,
    qm,
    verdict,
    w_fidelity_witness,
)
from .kernels import BACKEND
from .states import NamedStateSpec, dicke, ghz, random_biseparable, rho_c, w_state, white_noise_mix
from .tensor import (
    DenseProvider,
    DensityMatrix,
    MixtureProvider,
    PureState,
    SparseProvider,
    SystemShape,
    basis_index,
    basis_label,
    partial_trace,
    validate,
    white_noise_provider,
)

__version__ = "0.1.0"
