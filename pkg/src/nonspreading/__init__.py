"""Fixed points of metrically nonspreading mappings in Hadamard spaces."""
from .geometry import (GeometryError, IdentityResiduals, Pair, Point, Space, SpaceTag,
                       cauchy_schwarz_slack, combine, convexity_slacks, dist, quasi_identity_residuals,
                       quasi_inner)
from .spaces import EuclideanSpace, HyperbolicSpace, TreeSpace
from .minimize import SolverError, mean_square_minimizer, minimax_center
from .convex import (AffineEuclidean, Ball, DistTo, GeodesicSegment, HalfSqDistTo,
                     HalfspaceEuclidean, IndicatorOf, Subtree, WeightedFrechet, convexity_gap,
                     eval_function, membership_slack)
from .mappings import (ClassificationReport, Composition, Glued, Identity, PairSampler, Projection,
                       Prox, apply, classify, glued_apply, glued_range_excess, glued_standard,
                       image_bound_check, project, prox, resolvent_inclusion_slack)
from .solvers import (IterationTrace, StepSchedule, cyclic_picard, fejer_slack, mann,
                      mann_residual_excess, picard, telescoping_excess)
from .diagnostics import (asymptotic_center, delta_limit_estimate, demiclosedness_probe,
                          double_sequence_residual, g_minimizer)

__version__ = "0.1.0"
