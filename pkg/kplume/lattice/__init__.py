from kplume.lattice.base_lattice import BaseLatticeModel
from kplume.lattice.simple_rw import SimpleRW, joint_pmf_simple, condvar_simple, marginal_x_simple
from kplume.lattice.forty_five import FortyFive, joint_pmf_45, condvar_45, vandermonde_identity
from kplume.lattice.nearest_neighbor import (
    NearestNeighbor,
    condvar_nn,
    joint_pmf_nn,
    nn_reduction_deviation,
)
from kplume.lattice.asymmetric_walk import (
    AsymmetricWalkParams,
    asym_joint_pmf,
    asym_marginal,
    check_conditional_symmetry,
    conditional_variance_y,
    symmetry_walk_params,
)

__all__ = [
    "BaseLatticeModel",
    "SimpleRW",
    "joint_pmf_simple",
    "condvar_simple",
    "marginal_x_simple",
    "FortyFive",
    "joint_pmf_45",
    "condvar_45",
    "vandermonde_identity",
    "NearestNeighbor",
    "joint_pmf_nn",
    "condvar_nn",
    "nn_reduction_deviation",
    "AsymmetricWalkParams",
    "asym_joint_pmf",
    "asym_marginal",
    "check_conditional_symmetry",
    "conditional_variance_y",
    "symmetry_walk_params",
]
