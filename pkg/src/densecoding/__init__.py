"""Dense coding with multipartite states: capacities, bounds, classification."""

from densecoding.capacities import (
    CapacityReport,
    capacity_global,
    capacity_report,
    capacity_single_receiver,
    lo_capacity,
    locc_upper_bound,
    noisy_ghz_dc_threshold,
    two_copy_chi,
    werner_dc_threshold,
)
from densecoding.criteria import ClassificationReport, classify, is_ppt, reduction_violated
from densecoding.measures import (
    Ensemble,
    JointDistribution,
    chi_locc,
    holevo_chi,
    mutual_information,
    shannon_entropy,
    von_neumann_entropy,
)
from densecoding.protocols import (
    encode_ensemble,
    ghz4_ensemble,
    ghz4_locc_decode,
    projective_measure,
    weyl_set,
)
from densecoding.states import (
    DenseCodingLayout,
    MultipartiteState,
    bell,
    frank_state,
    ghz,
    make_state,
    noisy_ghz,
    permute_parties,
    singlet,
    smolin,
    tensor_states,
    werner,
)

__version__ = "0.1.0"
