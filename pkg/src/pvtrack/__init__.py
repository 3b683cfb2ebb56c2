"""Multi-target tracking with dependent likelihood structures.

A delta-GLMB filter whose children are ranked by propose-and-verify:
candidates come from a lazy k-best assignment enumeration under an
independence assumption, then each is re-scored by a dependence structure
(collision or occlusion) that can only lower its weight.
"""
from .assignment import (FORBIDDEN, Assignment, CostMatrix, get_next, has_next,
                         ranked_iter, solve_optimal)
from .dependent import Collision, Independence, Occlusion, collide, occluded, verify
from .glmb import (FilterConfig, FilterState, best_estimate, detect_overtakes,
                   initial_state, step, track_history)
from .hypothesis import (DIED, MISSED, ClutterModel, GaussianTrack, Hypothesis, Label,
                         MeasurementFrame, assignment_to_hypothesis, build_cost_matrix,
                         psi_factor)
from .kinematics import GaussianState, NcvModel, gate, predict, update
from .propose_verify import VerifiedRanking, rank_children
from .simulator import Scenario, default_scenario, generate_frame
from .tree_export import export_tree

__version__ = "0.1.0"
