"""Exact cluster-structure toolkit for torus-graded Poisson polynomial algebras.

Given a declarative presentation (generator weights, h-vectors, bracket
table), the package validates the iterated Poisson-Ore axioms, computes the
canonical sequence of homogeneous Poisson-prime elements with its level-set
combinatorics, builds the seeds and exchange matrices attached to every
interval-prefix permutation, verifies the one-step mutation links and
log-canonicality exactly, and decides Laurent/upper-cluster membership.
All arithmetic is exact rational.
"""

from .poly import (
    ExpVec,
    MvLaurent,
    NonInvertibleImage,
    NotDivisible,
    ZeroDivisor,
    ZeroPolynomial,
    apply_derivation,
    exact_divide,
    leading_term_revlex,
    substitute,
)
from .presentation import (
    Inhomogeneous,
    InhomogeneousDelta,
    JacobiFailure,
    NilpotenceBoundExceeded,
    PoissonPresentation,
    PresentationError,
    SupportViolation,
    ValidationReport,
    ZeroEigenvalue,
    bracket,
    validate_algebra,
    weight_of,
)
from .cgl import (
    AmbiguousPredecessor,
    CertFailure,
    EtaData,
    NoPredecessor,
    PrimeSequenceReport,
    QData,
    alpha_q_matrices,
    cauchon_theta,
    certify_prime_sequence,
    compute_eta_and_primes,
    delta,
    hmax_equations,
)
from .symmetric import (
    GammaChain,
    IntervalPrime,
    Incompatible,
    NoHStarSolution,
    UElementData,
    ZeroLambdaStar,
    apply_rescaling,
    compute_d_integers,
    enumerate_xi,
    gamma_chain,
    interval_prime,
    interval_prime_data,
    permute_presentation,
    rescale_generators,
    tau_bullet,
    u_element_and_pi,
    validate_symmetric,
    y_sequence_for_tau,
)
from .cluster import (
    BMatrix,
    Seed,
    ClusterContext,
    CompatiblePair,
    LinkReport,
    TauSeedBundle,
    chain_verify,
    check_compatible,
    check_log_canonical,
    express_in_cluster,
    mutate_matrix,
    mutate_pair,
    mutate_seed,
    seed_for_tau,
    solve_btilde,
    upper_membership,
    verify_one_step,
)
from .presets import build_affine_space, build_matrix_poisson, solid_minor

__version__ = "0.1.0"
