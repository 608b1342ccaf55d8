"""Numerical toolkit for null-controllable and reachable states of the
half-heat equation on the unit circle.

Observability constants over polynomial truncations, minimum-norm control
synthesis, boundary-density criteria, and the separation-of-singularities
machinery, all under the normalized circle inner product
<f, g> = (1/2pi) int f conj(g) dx.
"""

from .fourier import (
    ArcInterval,
    CircleFunction,
    HardyFunction,
    cauchy_transform,
    coefficients_by_quadrature,
    dirichlet_tail_norm,
    dirichlet_tail_report,
    riesz_project,
    semigroup_apply,
    sobolev_norm,
    triangle_function,
    triangle_function_exact,
)
from .dilog import dilog
from .sectors import (
    AnnularSector,
    BilinearSquareMatrix,
    EXTERIOR,
    GramMatrix,
    INTERIOR,
    OrthonormalBasis,
    annulus_monomial_norm,
    bergman_gram,
    exterior_bergman_kernel,
    friedrichs_bilinear,
    hardy_kernel,
)
from .observability import (
    ObservabilityReport,
    classify_growth,
    cost_vs_time_sweep,
    observability_constant,
    reachability_constant,
)
from .control import (
    ControlField,
    ControlGramian,
    SynthesisReport,
    decompose_zero_mean,
    hum_gramian,
    mean_matching_check,
    simulate,
    synthesize_h2,
    synthesize_l2,
)
from .boundary import (
    ConditionReport,
    ContourSet,
    ExtensionData,
    RectangleHarmonic,
    bergman_representer,
    dz_norm_diagnostic,
    exterior_poisson,
    instability_demo,
    pseudo_carleson_ratio,
    recover_boundary_density,
    rectangle_harmonic_extension,
    sufficient_condition_check,
    w12_00_classify,
)
from .splitting import (
    Annulus,
    CutoffField,
    CutoffSpec,
    Disk,
    Grid,
    GridField,
    build_cutoff,
    cauchy_split,
    closedness_margin,
    friedrichs_constant,
)

__version__ = "0.1.0"
