"""Jensen functionals, superterzatic bounds and their numerical/exact verification."""
from .bounds import (
    RatioExtrema,
    corollary7_check,
    corollary8_check,
    ratio_extrema,
    replicate_instance,
    theorem6_lower_check,
    theorem6_upper_check,
)
from .core import (
    Block,
    Claim,
    DomainError,
    EnumerationCapError,
    ExactnessError,
    FunctionModel,
    GeneralInstance,
    MissingCertificateError,
    Mode,
    PointVector,
    Polynomial,
    SimpleInstance,
    TerzaticError,
    ValidationError,
    Weights,
    barycenter,
    cube_log,
    cube_sharp_certificate,
    general_barycenter,
    linear_combination,
    make_weights,
    multi_indices,
    polynomial,
    power,
    terza_quotient,
)
from .functional import AtomDistribution, generalized_jensen, jensen, tensor_distribution
from .superterzatic import (
    CertificateEstimate,
    CheckReport,
    Direction,
    Verdict,
    check_def2,
    check_lemma5,
    def2_rhs,
    def2_rhs_alt,
    estimate_certificate,
    feasibility_threshold,
    lemma5_rhs,
    sample_instance_with_barycenter,
)

__version__ = "0.1.0"

__all__ = [
    "AtomDistribution",
    "generalized_jensen",
    "jensen",
    "tensor_distribution",
    "barycenter",
    "Block",
    "CertificateEstimate",
    "check_def2",
    "check_lemma5",
    "CheckReport",
    "Claim",
    "corollary7_check",
    "corollary8_check",
    "cube_log",
    "cube_sharp_certificate",
    "def2_rhs",
    "def2_rhs_alt",
    "Direction",
    "DomainError",
    "EnumerationCapError",
    "estimate_certificate",
    "ExactnessError",
    "feasibility_threshold",
    "FunctionModel",
    "general_barycenter",
    "GeneralInstance",
    "lemma5_rhs",
    "linear_combination",
    "make_weights",
    "MissingCertificateError",
    "Mode",
    "multi_indices",
    "PointVector",
    "Polynomial",
    "polynomial",
    "power",
    "ratio_extrema",
    "RatioExtrema",
    "replicate_instance",
    "sample_instance_with_barycenter",
    "SimpleInstance",
    "terza_quotient",
    "TerzaticError",
    "theorem6_lower_check",
    "theorem6_upper_check",
    "ValidationError",
    "Verdict",
    "Weights",
]
