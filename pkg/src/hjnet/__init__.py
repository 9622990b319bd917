"""Operator-learning pipeline for periodic Hamilton-Jacobi equations.

Encode an initial datum on a grid, push the encoded triples through the
(exact or learned) Hamiltonian characteristic flow, and rebuild the solution
with pruned moving least squares. A method-of-characteristics oracle and a
benchmark CLI verify error rates and complexity scalings.
"""

from .hamiltonians import (
    GrowthReport,
    HamiltonianSpec,
    InitialData,
    TrigPoly,
    advection,
    check_growth_bound,
    eval_h,
    eval_u0,
    free_particle,
    grad_h,
    kinetic_plus_potential,
    lagrangian,
    pendulum,
    sine_initial_data,
    torus_distance,
    wrap_torus,
)
from .flow import (
    CharMonitor,
    IntegratorConfig,
    NewtonConfig,
    PhaseState,
    characteristic_jacobian_det,
    estimate_tstar,
    integrate_flow,
    integrate_flow_batch,
    invert_characteristic,
    oracle_solve,
    spatial_characteristic,
)
from .mls import (
    MlsConfig,
    PointSet,
    StencilError,
    fill_distance,
    mls_evaluate,
    prune,
    reconstruct,
    separation_distance,
)
from .neural import (
    FlowDataset,
    MlpParams,
    TrainConfig,
    generate_dataset,
    load_mlp,
    mlp_forward,
    network_depth,
    network_size,
    save_mlp,
    surrogate_flow,
    train_flow_net,
)
from .pipeline import (
    EncodedBatch,
    PipelineConfig,
    encode,
    hjnet_solve,
    make_uniform_grid,
    sup_error,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
