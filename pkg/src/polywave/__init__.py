"""Non-stationary orthonormal wavelets with exponential-polynomial reproduction."""
from .errors import (
    BadLength,
    LevelMismatch,
    NegativeOnCircle,
    NonConvergence,
    OrderTooLarge,
    PolywaveError,
    PowerExceedsMultiplicity,
    ShapeMismatch,
    SingularSystem,
)
from .factorization import (
    RefinementMask,
    classical_mask,
    highpass,
    mask_family,
    qmf_residual,
    refinement_mask,
    riesz_factor,
)
from .filterbank import (
    CoefficientPyramid,
    FilterBankPlan,
    ImageBuffer,
    ImagePyramids,
    analyze_1d,
    analyze_2d,
    make_plan,
    synthesize_1d,
    synthesize_2d,
    threshold_denoise,
)
from .laurent import ComplexRootSet, LaurentPolynomial, RealPolynomial, roots
from .subdivision import (
    DyadicGridFunction,
    SampleSequence,
    cascade_father,
    fundamental_function,
    gram_matrix,
    mother_wavelet,
    refine_samples,
    reproduction_error,
    subdivide_once,
)
from .symbols import (
    FrequencyVector,
    SubdivisionSymbol,
    SymbolContext,
    a_symbol,
    bezout_residual,
    bezout_solve,
    p_polynomial,
    q_polynomial_closed_form,
    verify_symbol,
)

__version__ = "0.1.0"
