"""simulcut: one vertex partition, near-optimal cuts for every graph at once.

Given several graphs (or r-uniform hypergraphs) on a shared vertex set, the
package produces a single partition with certified lower bounds on every
member's cut statistics, via seeded Monte-Carlo sampling with explicit
failure bounds or a deterministic conditional-expectation descent, plus an
exhaustive oracle that validates the guarantees at small scale.
"""

from .model import (
    UNDECIDED,
    Assignment,
    Constraint,
    CutReport,
    EpsilonRangeError,
    GraphFamily,
    HypergraphFamily,
    InstanceError,
    PartialAssignmentError,
    crossing_count,
    edwards_bound,
    epsilon_cap,
    partition_counts,
    rainbow_count,
    threshold_for,
)
from .estimator import (
    DegreePreconditionError,
    EstimatorBudgetError,
    EventSpec,
    conditional_edge_prob,
    conditional_joint_prob,
    conditional_moments,
    estimator_value,
    specs_for,
)
from .mc import (
    McConfig,
    McExhausted,
    McResult,
    check_report,
    mc_partition,
    random_assignment,
    substream,
)
from .derandomize import DerandResult, DescentStep, derandomize
from .oracle import (
    SizeLimitError,
    edwards_check,
    enumerate_best,
    max_cut,
    moments_by_completion,
)

__version__ = "0.1.0"
