"""Verdict thresholds and the default experiment scale, in one place.

The reproduced statements are inequalities with free constants, so every
verdict is rate- or identity-based; these margins are the repository-wide
acceptance knobs.
"""

# --- verdict thresholds ----------------------------------------------------

# admissible deviation of a fitted log2 slope from its exact target when the
# value is an identity on the torus (single-block norms)
SLOPE_TIGHT_TOL = 0.05

# slack added to inequality-type slope targets (flow distance, offsets)
SLOPE_MARGIN = 0.15

# admissible deviation for the initial-distance decay slope (target -1)
D0_SLOPE_TOL = 0.1

# relative spread tolerated when a sequence is called "stabilized"
STABILIZATION_FRACTION = 0.10

# measured constants must agree with their reference within this factor
CONSISTENCY_FACTOR = 2.0

# pooled relative l2 residual allowed for the quadratic-plus-offset fit
QUADRATIC_FIT_RESIDUAL_MAX = 0.10

# tolerated deviation of the remainder's log-log time slope from 2
SMALL_T_SLOPE_TOL = 0.1

# single-block identities and solver-level exactness checks
BLOCK_IDENTITY_TOL = 1e-10

# offsets below this fraction of the data scale count as decayed to the
# measurement floor (their decay rate is then not resolvable, only bounded)
OFFSET_FLOOR_FRACTION = 1e-3

# --- default experiment scale ----------------------------------------------

DEFAULT_L = 64.0
DEFAULT_N = 2**15
DEFAULT_S = 2.0
DEFAULT_P = 2.0
DEFAULT_R = 2.0
DEFAULT_N_MIN = 4
DEFAULT_N_MAX = 8
DEFAULT_T = 0.5
DEFAULT_DT = 0.01
DEFAULT_RECORD_TIMES = (0.0, 0.05, 0.1, 0.2, 0.35, 0.5)
DEFAULT_C0_WINDOW = (0.05, 0.5)
DEFAULT_SEED = 20240
DEFAULT_TRIALS = 20
DEFAULT_MICRO_TIMES = (0.001, 0.002154, 0.004642, 0.01)
DEFAULT_MICRO_DT = 5e-05
