"""Hyperbolic-cross trigonometric analysis and sampling-recovery witnesses.

The package builds the machinery for certifying lower bounds on optimal
sampling recovery over mixed-smoothness classes at desk scale: frequency
combinatorics, sparse trigonometric polynomials with exact FFT duals,
classical kernels, dyadic decompositions and norms, class normalizers, and
the adversarial fooling-function constructions together with experiment
runners and a CLI.
"""

from .classes import (ClassSpec, EmbeddingReport, MembershipReport,
                      check_embedding_inp1, scale_into, scale_into_hrq,
                      scale_into_structural, scale_into_wrq)
from .errors import (ConfigError, InfeasibleError, InvalidWitnessError,
                     UnsupportedRangeError)
from .freqs import (FreqSet, axis_level, box_cardinality, build_box, build_qn,
                    build_rho, build_y, grid_points, lattice_points,
                    level_vector, level_vectors, min_block_size,
                    uniform_points)
from .intfool import HInfTable, IntegrationReport, h_infinity_check, integration_fooler
from .kernels import (a_hat, a_poly, fejer_closed, fejer_hat, fejer_poly,
                      fr_hat, vdp_hat, vdp_poly)
from .norms import (NormRequest, SupEstimate, a_block, active_a_levels,
                    active_block_levels, active_layers, comparison_sum,
                    delta_block, layer, lp_norm, lp_norm_info, mixed_difference,
                    norm, norm_a, norm_abeta, norm_l2, sup_estimate, sup_norm)
from .poly import GridFn, TrigPoly, analyze, evaluate, poly_mul, synthesize
from .witness import (ABetaCheck, FoolingReport, VanishingPoly, WitnessReport,
                      abeta_block_check, box_witness, evaluate_witness,
                      fooling_function, vanishing_poly, vanishing_poly_on)
from .experiments import (ExperimentConfig, RateFit, fit_rate, parse_config,
                          run_inequalities, run_q1P2, run_qpL1, run_qpT1,
                          run_ST1, write_csv)

__version__ = "0.1.0"
