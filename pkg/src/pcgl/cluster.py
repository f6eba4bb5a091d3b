"""Seeds, mutation, the exchange-matrix solver, and membership certificates.

The initial cluster is the prime sequence y_1..y_N; every permutation tau
with interval prefixes contributes a seed whose variables are interval
primes reordered by the companion permutation, whose scalar matrix r_tau is
the conjugated q-matrix of the tau-presentation, and whose exchange matrix
is the unique integral solution of the stacked bicharacter/weight linear
system.  Adjacent permutations are linked either by equality of seeds or by
one mutation, and membership in the upper cluster algebra is decided by
expressing elements in every chain cluster with frozen-nonnegative
exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .cgl import EtaData, PrimeSequenceReport, alpha_q_matrices, compute_eta_and_primes
from .poly import MvLaurent, NonInvertibleImage, exact_divide, substitute
from .presentation import PoissonPresentation, PresentationError, bracket, weight_of
from .symmetric import (
    GammaChain,
    Perm,
    compute_d_integers,
    gamma_chain,
    interval_data_for_tau,
    interval_exponent,
    interval_prime,
    lambda_star,
    perm_compose,
    perm_inverse,
    rescale_generators,
    tau_bullet,
    u_element_and_pi,
    validate_symmetric,
)


class ClusterError(PresentationError):
    pass


class NotExchangeable(ClusterError):
    def __init__(self, k):
        super().__init__(f"index {k+1} is frozen")
        self.index = k


class EpsilonMismatch(ClusterError):
    pass


class CompatibilityFailure(ClusterError):
    def __init__(self, k, j, value):
        super().__init__(f"(B^T r)_{{{k+1},{j+1}}} = {value} violates compatibility")
        self.pair = (k, j)
        self.value = value


class CompatibilityLost(ClusterError):
    pass


class SolverFailure(ClusterError):
    pass


class NoSolution(SolverFailure):
    def __init__(self, l):
        super().__init__(f"no exchange-matrix column exists for direction {l+1}")
        self.index = l


class NonUnique(SolverFailure):
    def __init__(self, l):
        super().__init__(f"exchange-matrix column {l+1} is underdetermined")
        self.index = l


class NonIntegral(SolverFailure):
    def __init__(self, l, vec):
        super().__init__(f"exchange-matrix column {l+1} is not integral: {vec}")
        self.index = l
        self.vector = vec


class LinkFailure(ClusterError):
    def __init__(self, what):
        super().__init__(f"one-step verification failed: {what}")
        self.what = what


class NotInRing(ClusterError):
    def __init__(self, what):
        super().__init__(what)


class LogCanonicalFailure(ClusterError):
    def __init__(self, l, j, lhs, rhs):
        super().__init__(f"bracket of variables {l+1},{j+1} is not the r-scalar multiple")
        self.pair = (l, j)
        self.lhs = lhs
        self.rhs = rhs


class SeedInvariantFailure(ClusterError):
    pass


RMatrix = List[List[Fraction]]


def omega(r: RMatrix, f: Sequence[int], g: Sequence[int]) -> Fraction:
    total = Fraction(0)
    for k, fk in enumerate(f):
        if not fk:
            continue
        for j, gj in enumerate(g):
            if gj:
                total += fk * gj * r[k][j]
    return total


# -------------------------------------------------------------- exchange matrices


@dataclass
class BMatrix:
    """Integer N x ex matrix, stored as columns keyed by exchangeable index."""

    n: int
    ex: Tuple[int, ...]                  # sorted, 0-based
    cols: Dict[int, Tuple[int, ...]]     # l in ex -> length-n column

    @classmethod
    def from_columns(cls, n: int, cols: Dict[int, Sequence[int]]) -> "BMatrix":
        ex = tuple(sorted(cols))
        return cls(n=n, ex=ex, cols={l: tuple(int(x) for x in cols[l]) for l in ex})

    def entry(self, i: int, l: int) -> int:
        return self.cols[l][i]

    def column(self, l: int) -> Tuple[int, ...]:
        return self.cols[l]

    def principal(self) -> List[List[int]]:
        return [[self.cols[l][k] for l in self.ex] for k in self.ex]

    def full_rank(self) -> bool:
        if not self.ex:
            return True
        rows = [[self.cols[l][i] for l in self.ex] for i in range(self.n)]
        return linalg.rank(rows) == len(self.ex)

    def as_rows(self) -> List[List[int]]:
        return [[self.cols[l][i] for l in self.ex] for i in range(self.n)]

    def __eq__(self, other):
        return isinstance(other, BMatrix) and self.n == other.n and self.ex == other.ex and self.cols == other.cols


def mutate_matrix(b: BMatrix, k: int) -> BMatrix:
    """Matrix mutation in direction k; involutive and rank-preserving."""
    if k not in b.cols:
        raise NotExchangeable(k)
    new_cols: Dict[int, Tuple[int, ...]] = {}
    for j in b.ex:
        col = []
        for i in range(b.n):
            bij = b.cols[j][i]
            if i == k or j == k:
                col.append(-bij)
            else:
                bik = b.cols[k][i]
                bkj = b.cols[j][k]
                col.append(bij + (abs(bik) * bkj + bik * abs(bkj)) // 2)
        new_cols[j] = tuple(col)
    return BMatrix(n=b.n, ex=b.ex, cols=new_cols)


def check_compatible(r: RMatrix, b: BMatrix) -> Dict[int, Fraction]:
    """Beta scalars of a compatible pair; raises CompatibilityFailure otherwise."""
    n = b.n
    beta: Dict[int, Fraction] = {}
    for l in b.ex:
        col = b.cols[l]
        for j in range(n):
            val = sum((col[i] * r[i][j] for i in range(n) if col[i]), Fraction(0))
            if j == l:
                if val == 0:
                    raise CompatibilityFailure(l, l, val)
                beta[l] = val
            elif val != 0:
                raise CompatibilityFailure(l, j, val)
    for k in b.ex:
        for j in b.ex:
            if beta[k] * b.entry(k, j) != -beta[j] * b.entry(j, k):
                raise CompatibilityFailure(k, j, beta[k] * b.entry(k, j))
    return beta


@dataclass
class CompatiblePair:
    r: RMatrix
    btilde: BMatrix
    beta: Dict[int, Fraction]

    @classmethod
    def build(cls, r: RMatrix, btilde: BMatrix) -> "CompatiblePair":
        return cls(r=r, btilde=btilde, beta=check_compatible(r, btilde))


def _e_epsilon(b: BMatrix, k: int, eps: int) -> List[List[Fraction]]:
    n = b.n
    e = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for i in range(n):
        if i == k:
            e[i][k] = Fraction(-1)
        else:
            e[i][k] = Fraction(max(0, -eps * b.entry(i, k)))
    return e


def _mat_mul(a, b):
    n = len(a)
    m = len(b[0])
    inner = len(b)
    return [[sum((a[i][t] * b[t][j] for t in range(inner)), Fraction(0)) for j in range(m)] for i in range(n)]


def _transpose(a):
    return [list(row) for row in zip(*a)]


def mutate_r(r: RMatrix, b: BMatrix, k: int) -> RMatrix:
    """E_eps^T r E_eps, computed for both signs and checked equal."""
    if k not in b.cols:
        raise NotExchangeable(k)
    results = []
    for eps in (1, -1):
        e = _e_epsilon(b, k, eps)
        results.append(_mat_mul(_transpose(e), _mat_mul(r, e)))
    if results[0] != results[1]:
        raise EpsilonMismatch("mutated r depends on the sign choice")
    return results[0]


def mutate_pair(pair: CompatiblePair, k: int) -> CompatiblePair:
    """Mutate a compatible pair; asserts epsilon-independence, compatibility,
    and invariance of B^T r whenever the principal part is skew-symmetrizable
    (equivalently, all beta share a sign)."""
    r2 = mutate_r(pair.r, pair.btilde, k)
    b2 = mutate_matrix(pair.btilde, k)
    try:
        beta2 = check_compatible(r2, b2)
    except CompatibilityFailure as exc:
        raise CompatibilityLost(str(exc)) from exc
    betas = list(pair.beta.values())
    if betas and (all(x > 0 for x in betas) or all(x < 0 for x in betas)):
        if _btr(pair.btilde, pair.r) != _btr(b2, r2):
            raise CompatibilityLost("B^T r changed under pair mutation")
    return CompatiblePair(r=r2, btilde=b2, beta=beta2)


def _btr(b: BMatrix, r: RMatrix) -> Dict[Tuple[int, int], Fraction]:
    out = {}
    for l in b.ex:
        col = b.cols[l]
        for j in range(b.n):
            out[(l, j)] = sum((col[i] * r[i][j] for i in range(b.n) if col[i]), Fraction(0))
    return out


# ------------------------------------------------------------------ seed context


@dataclass
class ClusterContext:
    """Everything derived from one validated, pi-normalized presentation."""

    p: PoissonPresentation
    eta: EtaData
    seq: PrimeSequenceReport
    d_map: Dict[int, int]
    x_in_y: List[MvLaurent] = field(default_factory=list)
    _tau_cache: Dict[Perm, "TauSeedBundle"] = field(default_factory=dict)
    _expr_cache: Dict[Perm, List[MvLaurent]] = field(default_factory=dict)

    @classmethod
    def build(cls, p: PoissonPresentation, require_normalized: bool = True) -> "ClusterContext":
        report, ps = validate_symmetric(p)
        if not report.passed:
            raise ClusterError("presentation is not symmetric: " + "; ".join(str(f) for f in report.failures))
        eta, seq = compute_eta_and_primes(ps)
        d_map, _ = compute_d_integers(ps, eta)
        if require_normalized:
            for i in range(ps.n):
                if eta.succ[i] is not None:
                    ud = u_element_and_pi(ps, eta, i, 1)
                    if ud.pi != 1:
                        raise ClusterError(
                            f"pi_[{i+1}, s({i+1})] = {ud.pi} != 1; rescale the generators first")
        ctx = cls(p=ps, eta=eta, seq=seq, d_map=d_map)
        ctx.x_in_y = ctx._solve_x_in_y()
        return ctx

    @classmethod
    def build_normalizing(cls, p: PoissonPresentation) -> Tuple["ClusterContext", List[Fraction]]:
        """Build after applying the pi-normalizing rescaling; returns gamma too."""
        report, ps = validate_symmetric(p)
        if not report.passed:
            raise ClusterError("presentation is not symmetric: " + "; ".join(str(f) for f in report.failures))
        eta, _ = compute_eta_and_primes(ps)
        gamma, ps2 = rescale_generators(ps, eta)
        return cls.build(ps2), gamma

    # x_k as Laurent polynomials in the initial cluster
    def _solve_x_in_y(self) -> List[MvLaurent]:
        n = self.p.n
        out: List[MvLaurent] = []
        for k in range(n):
            pk = self.eta.pred[k]
            if pk is None:
                out.append(MvLaurent.gen(n, k))
                continue
            ck = self.seq.c[k]
            ck_y = substitute(ck, out + [MvLaurent.gen(n, i) for i in range(k, n)]) if not ck.is_zero() \
                else MvLaurent.zero(n)
            out.append(MvLaurent.gen(n, pk, -1) * (MvLaurent.gen(n, k) + ck_y))
        return out

    def to_y_coordinates(self, f: MvLaurent) -> MvLaurent:
        """Rewrite a polynomial in the generators as Laurent in y_1..y_N."""
        return substitute(f, self.x_in_y)

    def lambda_star(self, l: int) -> Fraction:
        return lambda_star(self.p, l)

    def gamma(self) -> GammaChain:
        return gamma_chain(self.p.n).annotate(self.eta)


# -------------------------------------------------------------------- tau seeds


@dataclass
class TauSeedBundle:
    tau: Perm
    sigma: Perm                           # tau_bullet o tau
    vars_x: List[MvLaurent]               # ytilde entries as polynomials in x
    vars_y: List[MvLaurent]               # the same in initial-y coordinates
    intervals: List[Tuple[int, int]]      # (start, m) of vars_x[k] as interval prime
    weights: List[Tuple[int, ...]]
    r: RMatrix
    btilde: BMatrix
    beta: Dict[int, Fraction]

    def var_names(self) -> List[str]:
        return [f"y[{i+1},{j}]" for (i, m) in self.intervals for j in [i + 1 + m]]

    def as_seed(self) -> "Seed":
        return Seed(vars_y=list(self.vars_y), r=self.r, btilde=self.btilde,
                    beta=dict(self.beta), base_tau=self.tau, history=())


def eta_tau_data(eta: EtaData, tau: Perm) -> EtaData:
    """EtaData of the tau-reordered presentation (labels eta о tau)."""
    n = len(tau)
    labels = [eta.eta[tau[k]] for k in range(n)]
    last: Dict[int, int] = {}
    pred: List[Optional[int]] = []
    for k in range(n):
        pred.append(last.get(labels[k]))
        last[labels[k]] = k
    succ: List[Optional[int]] = [None] * n
    for k in range(n):
        if pred[k] is not None:
            succ[pred[k]] = k
    exchangeable = [k for k in range(n) if succ[k] is not None]
    rank = sum(1 for k in range(n) if pred[k] is None)
    return EtaData(eta=labels, pred=pred, succ=succ, exchangeable=exchangeable, rank=rank)


def r_matrix_for_tau(p: PoissonPresentation, eta: EtaData, tau: Perm) -> RMatrix:
    """r_tau = (tau_bullet tau) q_tau (tau_bullet tau)^{-1} with q_tau from
    the permuted lambda-matrix and the permuted predecessor chains."""
    n = p.n
    etau = eta_tau_data(eta, tau)
    lam_tau = [[p.lam(tau[l], tau[j]) for j in range(n)] for l in range(n)]
    ebars = [etau.ebar(k) for k in range(n)]
    q_tau = [[omega(lam_tau, ebars[k], ebars[j]) for j in range(n)] for k in range(n)]
    sigma = perm_compose(tau_bullet(tau, eta), tau)
    sig_inv = perm_inverse(sigma)
    return [[q_tau[sig_inv[a]][sig_inv[b]] for b in range(n)] for a in range(n)]


def solve_btilde(ctx: ClusterContext, tau: Perm, r: RMatrix,
                 var_weights: List[Tuple[int, ...]]) -> Tuple[BMatrix, Dict[int, Fraction]]:
    """Solve the stacked linear system for every exchangeable column.

    For l in ex: Omega_r(b, e_j) = delta_jl lambda*_l for all j, plus zero
    torus weight of the ytilde-monomial with exponent b.  Uniqueness and
    integrality are required; anything else is a presentation defect.
    """
    n = ctx.p.n
    d = ctx.p.torus_rank
    rows: List[List[Fraction]] = []
    for j in range(n):
        rows.append([r[i][j] for i in range(n)])
    for a in range(d):
        rows.append([Fraction(var_weights[k][a]) for k in range(n)])
    cols: Dict[int, Tuple[int, ...]] = {}
    beta: Dict[int, Fraction] = {}
    for l in ctx.eta.exchangeable:
        lam_l = ctx.lambda_star(l)
        rhs = [lam_l if j == l else Fraction(0) for j in range(n)] + [Fraction(0)] * d
        particular, null_basis = linalg.solve(rows, rhs)
        if particular is None:
            raise NoSolution(l)
        if null_basis:
            raise NonUnique(l)
        if any(x.denominator != 1 for x in particular):
            raise NonIntegral(l, particular)
        cols[l] = tuple(int(x) for x in particular)
        beta[l] = lam_l
    b = BMatrix.from_columns(n, cols) if cols else BMatrix(n=n, ex=(), cols={})
    return b, beta


def seed_for_tau(ctx: ClusterContext, tau: Perm) -> TauSeedBundle:
    """Assemble and sanity-check the full seed bundle for one permutation."""
    tau = tuple(tau)
    if tau in ctx._tau_cache:
        return ctx._tau_cache[tau]
    p, eta = ctx.p, ctx.eta
    n = p.n
    sigma = perm_compose(tau_bullet(tau, eta), tau)
    sig_inv = perm_inverse(sigma)
    data = interval_data_for_tau(eta, tau)
    y_tau = [interval_prime(p, eta, i, m) for (i, m) in data]
    vars_x = [y_tau[sig_inv[k]] for k in range(n)]
    intervals = [data[sig_inv[k]] for k in range(n)]
    weights = [weight_of(p, v) for v in vars_x]
    r = r_matrix_for_tau(p, eta, tau)
    btilde, beta = solve_btilde(ctx, tau, r, weights)

    lt_rows = [[Fraction(x) for x in v.leading_term()[1]] for v in vars_x]
    if linalg.rank(lt_rows) != n:
        raise SeedInvariantFailure("variable leading exponents are linearly dependent")
    if not btilde.full_rank():
        raise SeedInvariantFailure("exchange matrix is rank-deficient")
    check_compatible(r, btilde)
    for k in btilde.ex:
        for j in btilde.ex:
            dk = ctx.d_map[eta.eta[k]]
            dj = ctx.d_map[eta.eta[j]]
            if dk * btilde.entry(k, j) != -dj * btilde.entry(j, k):
                raise SeedInvariantFailure("principal part not skew-symmetrized by the d-integers")

    vars_y = [ctx.to_y_coordinates(v) for v in vars_x]
    bundle = TauSeedBundle(tau=tau, sigma=sigma, vars_x=vars_x, vars_y=vars_y,
                           intervals=intervals, weights=weights, r=r, btilde=btilde, beta=beta)
    ctx._tau_cache[tau] = bundle
    return bundle


# --------------------------------------------------------------- one-step links


@dataclass
class LinkReport:
    tau: Perm
    tau_next: Perm
    position: int                 # 0-based k with tau' = tau (k, k+1)
    branch: str                   # "equal" or "mutation"
    k_bullet: Optional[int]
    verified: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "tau": [v + 1 for v in self.tau],
            "tau_next": [v + 1 for v in self.tau_next],
            "position": self.position + 1,
            "branch": self.branch,
            "k_bullet": None if self.k_bullet is None else self.k_bullet + 1,
            "verified": self.verified,
            "detail": self.detail,
        }


def verify_one_step(ctx: ClusterContext, tau: Perm, tau_next: Perm) -> LinkReport:
    """Exactly verify the link between seeds of adjacent permutations.

    Distinct eta-classes at the swapped positions force equal bundles; equal
    classes force a single mutation at k_bullet, including the exchange
    identity on variables, r' = mu(r), and the +-column identity with the
    nonnegative complement vector g.
    """
    n = ctx.p.n
    diffs = [k for k in range(n) if tau[k] != tau_next[k]]
    if len(diffs) != 2 or diffs[1] != diffs[0] + 1 or tau[diffs[0]] != tau_next[diffs[1]] \
            or tau[diffs[1]] != tau_next[diffs[0]]:
        raise LinkFailure("permutations are not adjacent by one transposition")
    k = diffs[0]
    a, b = seed_for_tau(ctx, tau), seed_for_tau(ctx, tau_next)
    eta = ctx.eta

    if eta.eta[tau[k]] != eta.eta[tau[k + 1]]:
        ok = a.vars_x == b.vars_x and a.r == b.r and a.btilde == b.btilde
        return LinkReport(tau=tau, tau_next=tau_next, position=k, branch="equal",
                          k_bullet=None, verified=ok,
                          detail="" if ok else "bundles differ despite distinct eta classes")

    asc = tau if tau[k] < tau[k + 1] else tau_next
    low, high = (a, b) if tau[k] < tau[k + 1] else (b, a)
    k_bullet = perm_compose(tau_bullet(asc, eta), asc)[k]

    problems: List[str] = []
    for j in range(n):
        if j != k_bullet and low.vars_x[j] != high.vars_x[j]:
            problems.append(f"variable {j+1} changed")
    if mutate_r(low.r, low.btilde, k_bullet) != high.r:
        problems.append("r' != mu_k(r)")
    if mutate_matrix(low.btilde, k_bullet) != high.btilde:
        problems.append("B' != mu_k(B)")

    # exchange identity x'_k x_k = prod_+ + prod_-  (checked in x coordinates)
    col = low.btilde.column(k_bullet)
    plus = MvLaurent.const(n, 1)
    minus = MvLaurent.const(n, 1)
    for i in range(n):
        if col[i] > 0:
            plus = plus * low.vars_x[i] ** col[i]
        elif col[i] < 0:
            minus = minus * low.vars_x[i] ** (-col[i])
    if high.vars_x[k_bullet] * low.vars_x[k_bullet] != plus + minus:
        problems.append("exchange identity fails")

    # column identity b_tau^k = -b_tau'^k = e_p(k) + e_s(k) - g with g >= 0
    if any(x + y for x, y in zip(col, high.btilde.column(k_bullet))):
        problems.append("mutated column is not the negative")
    g = [0] * n
    pk, sk = eta.pred[k_bullet], eta.succ[k_bullet]
    for i in range(n):
        base = (1 if i == pk else 0) + (1 if i == sk else 0)
        g[i] = base - col[i]
    if any(x < 0 for x in g):
        problems.append("complement vector g has negative entries")
    cls = set(eta.level_set(k_bullet))
    if any(g[i] for i in cls):
        problems.append("g touches the mutating eta class")
    per_class: Dict[int, int] = {}
    for i in range(n):
        if g[i]:
            per_class[eta.eta[i]] = per_class.get(eta.eta[i], 0) + 1
    if any(v > 1 for v in per_class.values()):
        problems.append("g meets some eta class twice")

    ok = not problems
    return LinkReport(tau=tau, tau_next=tau_next, position=k, branch="mutation",
                      k_bullet=k_bullet, verified=ok, detail="; ".join(problems))


def chain_verify(ctx: ClusterContext) -> List[LinkReport]:
    """Walk the whole Gamma_N chain, verifying every adjacent link."""
    chain = ctx.gamma()
    reports = []
    for tau, tau_next, _k in chain.adjacent_pairs():
        reports.append(verify_one_step(ctx, tau, tau_next))
    return reports


# ----------------------------------------------------------------- log-canonical


def check_log_canonical(ctx: ClusterContext, bundle: TauSeedBundle) -> int:
    """Verify every pairwise bracket of the seed variables against r_tau.

    Brackets are computed in the polynomial ring on the generators, so no
    denominators arise.  Returns the number of pairs checked.
    """
    n = ctx.p.n
    count = 0
    for l in range(n):
        for j in range(l):
            lhs = bracket(ctx.p, bundle.vars_x[l], bundle.vars_x[j])
            rhs = bundle.vars_x[l] * bundle.vars_x[j] * bundle.r[l][j]
            if lhs != rhs:
                raise LogCanonicalFailure(l, j, lhs, rhs)
            count += 1
    return count


# ------------------------------------------------------------------- membership


def cluster_expressions(ctx: ClusterContext, tau: Perm) -> List[MvLaurent]:
    """Images of the generators x_1..x_N as Laurent polynomials in ytilde_tau.

    Built by back-substitution along the tau-presentation:
    x_tau(k) = y_{tau, p_tau(k)}^{-1} (y_{tau,k} + c_{tau,k}).  Exponent slots
    follow the ytilde ordering (variable j of the tau-sequence sits in slot
    (tau_bullet tau)(j)).
    """
    tau = tuple(tau)
    if tau in ctx._expr_cache:
        return ctx._expr_cache[tau]
    p, eta = ctx.p, ctx.eta
    n = p.n
    etau = eta_tau_data(eta, tau)
    data = interval_data_for_tau(eta, tau)
    y_tau = [interval_prime(p, eta, i, m) for (i, m) in data]
    sigma = perm_compose(tau_bullet(tau, eta), tau)
    gens = [MvLaurent.gen(n, i) for i in range(n)]

    images: List[Optional[MvLaurent]] = [None] * n   # indexed by generator
    for k in range(n):
        v = tau[k]
        pk = etau.pred[k]
        slot_k = sigma[k]
        if pk is None:
            images[v] = MvLaurent.gen(n, slot_k)
            continue
        c_tk = y_tau[pk] * gens[v] - y_tau[k]
        if c_tk.is_zero():
            c_expr = MvLaurent.zero(n)
        else:
            partial = [images[i] if images[i] is not None else gens[i] for i in range(n)]
            c_expr = substitute(c_tk, partial)
        slot_p = sigma[pk]
        images[v] = MvLaurent.gen(n, slot_p, -1) * (MvLaurent.gen(n, slot_k) + c_expr)
    result = [img for img in images]  # type: ignore[list-item]
    ctx._expr_cache[tau] = result     # type: ignore[assignment]
    return result                     # type: ignore[return-value]


@dataclass
class MembershipWitness:
    tau: Perm
    ok: bool
    expression: Optional[MvLaurent]
    bad_frozen: List[int]

    def as_dict(self) -> dict:
        return {
            "tau": [v + 1 for v in self.tau],
            "ok": self.ok,
            "bad_frozen": [v + 1 for v in self.bad_frozen],
        }


def express_in_cluster(ctx: ClusterContext, f: MvLaurent, tau: Perm,
                       inv: Sequence[int] = (), coords: str = "x") -> Tuple[MvLaurent, MembershipWitness]:
    """Rewrite f in the tau-cluster and test mixed-ring membership.

    `coords` says how f is given: "x" for a polynomial in the generators,
    "y" for a Laurent polynomial in the initial cluster.  The membership
    flag requires nonnegative exponents on every frozen variable outside
    `inv` after full cancellation; NotInRing is raised when f does not land
    in the Laurent ring of the cluster at all.
    """
    x_imgs = cluster_expressions(ctx, tau)
    if coords == "x":
        if not f.is_polynomial():
            raise NotInRing("x-coordinate input must be a polynomial in the generators")
        expr = substitute(f, x_imgs)
    elif coords == "y":
        y_imgs = [substitute(ctx.seq.y[j], x_imgs) for j in range(ctx.p.n)]
        try:
            expr = substitute(f, y_imgs)
        except NonInvertibleImage as exc:
            raise NotInRing(f"element is not Laurent in the tau-cluster: {exc}") from exc
    else:
        raise ValueError("coords must be 'x' or 'y'")
    frozen = [l for l in range(ctx.p.n) if ctx.eta.succ[l] is None]
    inv_set = set(inv)
    bad = sorted({l for l in frozen if l not in inv_set
                  for e in expr.terms if e[l] < 0})
    witness = MembershipWitness(tau=tuple(tau), ok=not bad, expression=expr, bad_frozen=bad)
    return expr, witness


def upper_membership(ctx: ClusterContext, f: MvLaurent, inv: Sequence[int] = (),
                     coords: str = "x") -> Tuple[bool, List[MembershipWitness]]:
    """Certificate for membership in the Gamma_N intersection of mixed rings."""
    witnesses: List[MembershipWitness] = []
    ok = True
    for tau in ctx.gamma().perms:
        try:
            _, w = express_in_cluster(ctx, f, tau, inv=inv, coords=coords)
        except NotInRing:
            w = MembershipWitness(tau=tuple(tau), ok=False, expression=None, bad_frozen=[])
        witnesses.append(w)
        ok = ok and w.ok
    return ok, witnesses


# ---------------------------------------------------------------- seed mutation


@dataclass
class Seed:
    """A seed with variables written as Laurent polynomials in the initial
    cluster, together with its compatible scalar matrix.

    `history` records the mutation directions applied since the defining
    permutation; arbitrary ex-sequences may be chained through mutate_seed.
    """

    vars_y: List[MvLaurent]
    r: RMatrix
    btilde: BMatrix
    beta: Dict[int, Fraction]
    base_tau: Optional[Perm] = None
    history: Tuple[int, ...] = ()

    def validate(self, d_map: Optional[Dict[int, int]] = None,
                 eta: Optional[EtaData] = None) -> None:
        lt_rows = [[Fraction(x) for x in v.leading_term()[1]] for v in self.vars_y]
        if linalg.rank(lt_rows) != len(self.vars_y):
            raise SeedInvariantFailure("variable leading exponents are linearly dependent")
        if not self.btilde.full_rank():
            raise SeedInvariantFailure("exchange matrix is rank-deficient")
        check_compatible(self.r, self.btilde)
        if d_map is not None and eta is not None:
            for k in self.btilde.ex:
                for j in self.btilde.ex:
                    dk, dj = d_map[eta.eta[k]], d_map[eta.eta[j]]
                    if dk * self.btilde.entry(k, j) != -dj * self.btilde.entry(j, k):
                        raise SeedInvariantFailure("principal part not d-skew-symmetrizable")


def mutate_seed(ctx: ClusterContext, seed, k: int) -> Seed:
    """One seed mutation in direction k, variables kept in y-coordinates.

    Accepts either a TauSeedBundle or a Seed, so arbitrary ex-sequences can
    be chained.  The new variable is (prod_+ + prod_-)/old with the division
    exact in the initial-cluster Laurent ring (Laurent phenomenon).
    """
    if isinstance(seed, TauSeedBundle):
        seed = seed.as_seed()
    if k not in seed.btilde.cols:
        raise NotExchangeable(k)
    pair = CompatiblePair(r=seed.r, btilde=seed.btilde, beta=seed.beta)
    mutated = mutate_pair(pair, k)
    col = seed.btilde.column(k)
    n = ctx.p.n
    plus = MvLaurent.const(n, 1)
    minus = MvLaurent.const(n, 1)
    for i in range(n):
        if col[i] > 0:
            plus = plus * seed.vars_y[i] ** col[i]
        elif col[i] < 0:
            minus = minus * seed.vars_y[i] ** (-col[i])
    new_var = exact_divide(plus + minus, seed.vars_y[k])
    vars_y = list(seed.vars_y)
    vars_y[k] = new_var
    out = Seed(vars_y=vars_y, r=mutated.r, btilde=mutated.btilde, beta=mutated.beta,
               base_tau=seed.base_tau, history=seed.history + (k,))
    out.validate(ctx.d_map, ctx.eta)
    return out
