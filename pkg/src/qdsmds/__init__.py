"""Real and quaternion-domain super-MDS localization for anchored networks.

The package simulates 3D positioning in a wireless sensor network from
pairwise distance and angle-difference measurements.  Edge vectors
between anchored node pairs are recovered by factoring a Gram edge
kernel; embedding the edges as quaternions collapses the kernel to rank
one, which denoises better than the rank-three real kernel once angle
measurements are available.

Modules:
    quatlin  quaternion arrays, the complex adjoint, Hermitian eigensolves
    netgeom  layouts, edge enumeration, the incidence structure matrix
    noise    Gamma distance noise, Tikhonov angle noise, rho calibration
    kernel   edge projections and kernel assembly
    solver   both estimators and the two measurement scenarios
    simcli   Monte Carlo sweeps, CSV/SVG emission, command line
"""

from .kernel import (EdgeObservation, KernelMatrix, ObservationTable,
                     build_quat_gek, build_real_gek,
                     derive_plane_quantities_from_angles,
                     exact_observation_table, pair_products, project_edge)
from .netgeom import (EdgeSet, NetworkLayout, StructureMatrix,
                      build_structure_matrix, coords_to_quat, enumerate_edges,
                      quat_to_coords, true_edges)
from .noise import (NoiseParams, RngStream, TrialRng, calibrate_rho,
                    sample_gamma_distance, sample_tikhonov_angle)
from .quatlin import (EigenResult, Quaternion, QuatMatrix, hamilton_product,
                      hermitian_eig, qmul, qsvd_dominant, to_adjoint)
from .simcli import ExperimentConfig, TrialRecord, emit_plots, run_experiment
from .solver import (EstimateResult, ScenarioOutcome, error_metric,
                     fix_quaternion_gauge, procrustes_align, qdsmds_estimate,
                     recover_coords, scenario1_pipeline, scenario2_pipeline,
                     smds_estimate)

__version__ = "0.1.0"
