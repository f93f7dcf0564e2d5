"""Cavity-mediated collective spin models.

Effective couplings from cavity and dressing-tone parameters, mean-field
Bloch-vector flows with fixed-point analysis, emulated measurement
sequences, and exact Dicke-manifold evolution.
"""

from .couplings import (TACT_RATIO, CavityParams, CouplingError, CouplingSet,
                        ToneSet, XYZCouplings, cancellation_ratio,
                        coupling_strengths, xyz_from_couplings)
from .kernels import BACKEND
from .meanfield import (BlochState, EOMSpec, FixedPointReport, FlowGrid,
                        FlowSample, IntegrationError, PairDrive, fixed_points,
                        flow_map, integrate, integrate_time_dependent,
                        jacobian_eigenvalues, torque)
from .spin import (DickeBasis, DickeState, build_collective_ops,
                   build_xyz_hamiltonian, evolve_lindblad, evolve_unitary,
                   spin_moments, squeezing_parameter)

__version__ = "0.1.0"
