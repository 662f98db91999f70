"""Simulation and verification toolkit for cubic Klein-Gordon systems in 1d."""

from .decomposition import (QuadratureResolutionError, QuadratureSpec, apply_B,
                            apply_Binv, apply_V, apply_W,
                            decomposition_residual, dilation, free_field_eval,
                            klainerman_sobolev_check, mod_factor, rate_probe)
from .evolution import (BlowUpError, CauchyData, CflError, SimulationConfig,
                        SolutionTrajectory, apply_P_on_solution, gaussian_data,
                        leapfrog_reference, make_initial_v, reconstruct_u,
                        simulate, solution_J, xt_norm)
from .harness import (Scenario, builtin_scenario, compare_integrators,
                      config_hash, fit_decay_exponent, run_scenario,
                      scenario_from_config)
from .nonlinearity import (CubicTensor, HermitianForm, MonomialPolynomial,
                           NotHermitianError, NotPositiveDefiniteError,
                           builtin_tensor, eval_F, eval_Ftilde, eval_G,
                           expand_condition, structure_search,
                           structure_verify, tensor_from_config)
from .profile import (INTERACTION_ROWS, NONRESONANT_INDICES, RESONANT_INDICES,
                      InteractionRow, PhasePair, ProfileState, extract_psi,
                      integrate_profile_ode, lyapunov, main_term,
                      nonresonant_rhs, phase_bound_scan, remainder_probe,
                      resonant_rhs, scalar_resonant_closed_form)
from .spectral import (BoundarySupportWarning, NormSpec, RepresentationError,
                       SpectralGrid, VectorField, apply_J, bessel_multiplier,
                       bracket, forward_transform, free_evolve,
                       inverse_transform, norm)

__version__ = "0.1.0"
