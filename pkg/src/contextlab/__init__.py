"""Peres-Mermin square toolkit: triple construction, verification, violation and classical bounds."""

from .exceptions import (
    AntiCommutationError,
    ClusteringAmbiguityError,
    ContextLabError,
    ConvergenceError,
    NotHermitianError,
    NotUnitaryError,
    PairingError,
    RefusalError,
)
from .spectral import (
    PmsTriple,
    canonical_form,
    check_pairing,
    cluster_spectrum,
    complete_triple,
    construct_partner,
    verify_algebra,
)
from .pms import build_square, expectation_re_x, expectation_re_x_hermitian, scan_states
from .bounds import dichotomic_bound, phase_bound

__version__ = "0.1.0"
