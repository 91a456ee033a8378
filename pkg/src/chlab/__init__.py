"""chlab: a desk-scale laboratory for the Camassa-Holm flow in Besov spaces.

Layers, bottom up:

- ``spectral``: periodic grid, transforms, Fourier multipliers, L^p norms.
- ``littlewood_paley``: dyadic partition, frequency blocks, Besov norms.
- ``constructions``: the explicit two-scale initial data (bump profile,
  high-frequency wave, low-frequency bump) and the scalar quantities
  behind the separation mechanism.
- ``evolution``: RK4 pseudospectral solvers for the Camassa-Holm and
  Degasperis-Procesi equations plus a linear transport solver.
- ``experiments``: reproducible measurement campaigns with CSV/JSON output.
- ``cli``: the ``chlab`` command-line entry point.
"""

from .spectral import (
    Field,
    GridSpec,
    Spectrum,
    apply_multiplier,
    derivative,
    lp_norm,
    make_grid,
    nonlocal_P,
    to_field,
    to_spectrum,
)
from .littlewood_paley import (
    BesovParams,
    LPFamily,
    besov_norm,
    build_lp_family,
    dyadic_block,
    dyadic_decomposition,
    embedding_check,
)
from .constructions import (
    BumpProfile,
    ConstructionSet,
    abs_cos_mean,
    bump_profile,
    construction_set,
    cos_packet_norm,
    cross_term_besov_sup,
    high_wave,
    low_bump,
)
from .evolution import (
    SolverConfig,
    Trajectory,
    gronwall_bound_check,
    rhs_ch,
    rhs_dp,
    solve,
    solve_transport,
)
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    ExperimentResult,
    load,
    persist,
    run_experiment,
)

__version__ = "0.1.0"
