"""Exact Boolean-Fourier toolkit: spectra, the butterfly contraction invariant,
ternary threshold masks with certified minimum support, and NPN censuses."""

__version__ = "0.1.0"

from .boolean_core import (  # noqa: E402
    IntegerSpectrum,
    TruthTable,
    apply_hadamard,
    butterfly,
    fwht,
    fwht_inverse,
)
from .influence import InfluenceVector, influences  # noqa: E402
from .invariant import (  # noqa: E402
    ContractionProfile,
    butterfly_opnorm,
    check_bounds,
    contraction_profile,
    log2_mu,
    schur_compare,
)
from .families import FamilySpec, generate  # noqa: E402
from .synthesis import TernaryMask, multi_start_repair, synthesize, verify  # noqa: E402
from .minsupport import Budget, Certificate, min_support_exact  # noqa: E402
from .npn import NpnTransform, apply_transform, canonicalize, enumerate_universe  # noqa: E402
from .cancellation import layer_cancellation, pair_ratio  # noqa: E402

__all__ = [
    "Budget", "Certificate", "ContractionProfile", "FamilySpec", "InfluenceVector",
    "IntegerSpectrum", "NpnTransform", "TernaryMask", "TruthTable", "apply_hadamard",
    "apply_transform", "butterfly", "butterfly_opnorm", "canonicalize", "check_bounds",
    "contraction_profile", "enumerate_universe", "fwht", "fwht_inverse", "generate",
    "influences", "layer_cancellation", "log2_mu", "min_support_exact",
    "multi_start_repair", "pair_ratio", "schur_compare", "synthesize", "verify",
]
