"""Growth of positive harmonic functions in cylinder-like and cone-like domains."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .geometry import (DomainKind, DomainSpec, SectionMask, ShellWindow, SlabWindow,  # noqa: F401
                       certify_conelike, certify_cylinderlike, hausdorff_distance, rescale_conelike,
                       rescale_cylinderlike, section_at)
from .eigensolve import (beltrami_lambda1, characteristic_constant, dirichlet_lambda1,  # noqa: F401
                         lambda_profile)
from .asymptotics import (GrowthCurve, Provenance, compare_growth, cone_growth_integral,  # noqa: F401
                          cylinder_growth_integral, hm_lower_bound, huber_lower_bound)
from .pde import (cone_exact, cylinder_exact, growth_profile, max_on_section, max_on_sphere,  # noqa: F401
                  solve_harmonic)
from .measure import distance_to_boundary, verify_reciprocal_bound, wos_exit_probability  # noqa: F401
