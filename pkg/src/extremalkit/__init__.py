"""Sharp polynomial inequalities, Green function profiles and constant transfers on compact sets."""

from .green import (GreenProfile, HolderCertificate, capacity_estimate, closed_form_rho, directional_profile,
                    extremal_value, fit_holder, green_estimate, integral_lift_check, rho_profile)
from .linprog import LinearProgram, LpSolution, solve, solve_ratio_extremal
from .majorants import MajorantSpec, derivative_bound, g_m_series, m_bounded_probe, validate_majorant
from .markov import (MarkovTable, check_ami, check_vmi, fit_markov_exponent, markov_factor, markov_table,
                     vmi_lower_bound_check)
from .polynomials import Polynomial, chebyshev_derivative_at_one, differentiate, evaluate, factorial_ratio
from .sets import (Arc, Disc, Point, Polydisc, Product, RealBox, RealInterval, Union, build_chain_set,
                   build_onion_set, discretize, distance)
from .theorems import (capacity_lower_bound, convex_body_hcp, hcp_to_vmi, real_to_complex_lift, upc_bound,
                       verify_equivalence_suite, vmi_to_hcp)

__version__ = "0.1.0"
