"""CVT-based spherical formations for cooperative 3D source seeking."""
from .cvt import LloydConfig, compute_cvt
from .errors import (CvtSeekError, DegenerateCellError, DegenerateFormationError,
                     DegeneratePointError, NumericError)
from .estimator import (alpha_error_term, bound_cvt, bound_symmetric, center_estimate,
                        grad_cvt, grad_symmetric)
from .field import SIGMA1, SIGMA2, GaussianField, NoiseModel, lipschitz_bound, measure
from .formation import (Formation, build_cvt_formation, build_symmetric, formation_moments,
                        min_pairwise_distance, symmetric_dmin)
from .geometry import fibonacci_sphere_mesh, radial_project, sample_unit_sphere
from .seeker import FormationSpec, SeekConfig, ga_step, run_seek

__version__ = "0.1.0"
