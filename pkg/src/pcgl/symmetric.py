"""Symmetric presentations: reversal data, interval primes, and normalization.

A presentation is symmetric when every delta_k(x_j) lives strictly between
x_j and x_k and a second family h*_j realizes the reversed adjunction order.
That symmetry produces one P-CGL presentation per permutation in Xi_N (the
prefixes-are-intervals subgroup-like subset of S_N), whose prime sequences
are selected from a single stock of interval primes y_[i, s^m(i)].  The
u-elements, their leading data (pi, f, g), and the gamma-rescaling that
normalizes all pi to 1 also live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .cgl import EtaData, compute_eta_and_primes, delta as delta_op
from .poly import ExpVec, MvLaurent, apply_derivation, substitute
from .presentation import (
    PoissonPresentation,
    PresentationError,
    SupportViolation,
    ValidationReport,
    bracket,
    weight_of,
)

Perm = Tuple[int, ...]  # one-line notation, 0-based entries


class SymmetryError(PresentationError):
    pass


class NoHStarSolution(SymmetryError):
    def __init__(self, j, msg=None):
        super().__init__(msg or f"no h*_{j+1} vector satisfies the reversal constraints")
        self.index = j


class ZeroLambdaStar(SymmetryError):
    def __init__(self, j):
        super().__init__(f"every admissible h*_{j+1} has zero eigenvalue on x_{j+1}")
        self.index = j


class Incompatible(SymmetryError):
    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class LeadingFormViolation(SymmetryError):
    pass


# ------------------------------------------------------------------ validation


def validate_symmetric(p: PoissonPresentation) -> Tuple[ValidationReport, PoissonPresentation]:
    """Check Def-style symmetry: support condition plus existence of h* rows.

    Returns the report and a presentation that definitely carries h_star
    vectors (the input itself when they were supplied, otherwise a copy with
    a solved family).  Supplied h* rows are verified; missing ones are found
    by exact linear solving, preferring the eigenvalue -lambda_{s(j)} on
    exchangeable indices, which any valid symmetric structure must produce.
    """
    failures: List[PresentationError] = []
    checks = {"delta_support": True, "h_star": True}
    n, d = p.n, p.torus_rank

    for (k, j), poly in sorted(p.delta.items()):
        if poly.is_zero():
            continue
        bad = [i for i in poly.support() if not (j < i < k)]
        if bad:
            checks["delta_support"] = False
            failures.append(SupportViolation(k, j, f"delta_{k+1}(x_{j+1}) involves x_{bad[0]+1} outside [{j+2},{k}]"))

    if p.h_star is not None:
        for j in range(n):
            for k in range(j + 1, n):
                want = -p.lam(k, j)
                got = sum((a * b for a, b in zip(p.h_star[j], p.weights[k])), Fraction(0))
                if got != want:
                    checks["h_star"] = False
                    failures.append(NoHStarSolution(j, f"<h*_{j+1}, chi_{k+1}> = {got}, expected {want}"))
            lam_star = sum((a * b for a, b in zip(p.h_star[j], p.weights[j])), Fraction(0))
            if lam_star == 0:
                checks["h_star"] = False
                failures.append(ZeroLambdaStar(j))
        result = p
    else:
        succ_of = _successors(p)
        solved: List[Tuple[Fraction, ...]] = []
        for j in range(n):
            rows = [list(p.weights[k]) for k in range(j + 1, n)]
            rhs = [-p.lam(k, j) for k in range(j + 1, n)]
            particular, null_basis = linalg.solve(rows, rhs) if rows else ([Fraction(0)] * d, [
                [Fraction(1) if a == b else Fraction(0) for a in range(d)] for b in range(d)])
            if particular is None:
                checks["h_star"] = False
                failures.append(NoHStarSolution(j))
                solved.append(tuple(Fraction(0) for _ in range(d)))
                continue
            wj = p.weights[j]
            base_val = sum((a * b for a, b in zip(particular, wj)), Fraction(0))
            dir_vals = [sum((a * b for a, b in zip(v, wj)), Fraction(0)) for v in null_basis]
            target = -p.lam_diag(succ_of[j]) if succ_of[j] is not None else None
            vec = _adjust_eigenvalue(particular, null_basis, base_val, dir_vals, target)
            if vec is None:
                checks["h_star"] = False
                failures.append(ZeroLambdaStar(j) if target is None else NoHStarSolution(
                    j, f"h*_{j+1} exists but cannot attain eigenvalue {target} forced by the level set"))
                vec = particular
            solved.append(tuple(vec))
        result = PoissonPresentation(
            n=n, torus_rank=d, weights=p.weights, h=p.h, delta=p.delta, h_star=tuple(solved),
        )

    passed = all(checks.values())
    return ValidationReport(passed=passed, checks=checks, failures=failures), result


def _adjust_eigenvalue(particular, null_basis, base_val, dir_vals, target):
    """Pick a solution of the affine family with prescribed/nonzero eigenvalue."""
    if target is not None:
        if base_val == target:
            return list(particular)
        for v, dv in zip(null_basis, dir_vals):
            if dv:
                t = (target - base_val) / dv
                return [a + t * b for a, b in zip(particular, v)]
        return None
    if base_val != 0:
        return list(particular)
    for v, dv in zip(null_basis, dir_vals):
        if dv:
            return [a + b for a, b in zip(particular, v)]
    return None


def _successors(p: PoissonPresentation) -> List[Optional[int]]:
    eta, _ = compute_eta_and_primes(p)
    return eta.succ


def lambda_star(p: PoissonPresentation, j: int) -> Fraction:
    """Eigenvalue <h*_j, chi_j>; requires h_star (run validate_symmetric first)."""
    if p.h_star is None:
        raise SymmetryError("presentation has no h_star data")
    return sum((a * b for a, b in zip(p.h_star[j], p.weights[j])), Fraction(0))


def compute_d_integers(p: PoissonPresentation, eta: EtaData) -> Tuple[Dict[int, int], Fraction]:
    """Positive integers d per eta-label with lambda*_l = d_{eta(l)} q on ex.

    Also verifies the ratio condition lambda*_l / lambda*_j in Q_{>0} and the
    level-set consistency lambda*_l = -lambda_{s(l)} with constant lambda
    along each level set.  Raises Incompatible on any failure.
    """
    if p.h_star is None:
        raise SymmetryError("presentation has no h_star data")
    ex = eta.exchangeable
    if not ex:
        return {}, Fraction(1)

    values: Dict[int, Fraction] = {}
    for l in ex:
        ls = lambda_star(p, l)
        s_l = eta.succ[l]
        if ls != -p.lam_diag(s_l):
            raise Incompatible(
                f"lambda*_{l+1} = {ls} != -lambda_{s_l+1} = {-p.lam_diag(s_l)}", (l, s_l))
        lbl = eta.eta[l]
        if lbl in values and values[lbl] != ls:
            raise Incompatible(f"lambda* not constant on level set {lbl}", (l, lbl))
        values[lbl] = ls

    vals = list(values.values())
    sign = 1 if vals[0] > 0 else -1
    for l in ex:
        for j in ex:
            ratio = lambda_star(p, l) / lambda_star(p, j)
            if ratio <= 0:
                raise Incompatible(f"lambda*_{l+1}/lambda*_{j+1} = {ratio} not in Q_>0", (l, j))

    # q = gcd of the values as positive rationals, carrying the common sign
    from math import gcd
    nums = [abs(v.numerator) for v in vals]
    dens = [v.denominator for v in vals]
    g = nums[0]
    for x in nums[1:]:
        g = gcd(g, x)
    lcm = dens[0]
    for x in dens[1:]:
        lcm = lcm * x // gcd(lcm, x)
    q = Fraction(sign * g, lcm)
    d_map = {lbl: int(v / q) for lbl, v in values.items()}
    if any(m <= 0 for m in d_map.values()):
        raise Incompatible("normalized multipliers are not positive integers")
    return d_map, q


# --------------------------------------------------------------- Xi_N / Gamma_N


def enumerate_xi(N: int, cap: int = 20) -> List[Perm]:
    """All permutations whose one-line prefixes are integer intervals (2^(N-1))."""
    if N < 1:
        raise ValueError("N must be positive")
    if N > cap:
        raise SymmetryError(f"Xi_{N} has 2^{N-1} elements; enumeration capped at N = {cap}")
    perms: List[Perm] = [(0,)]
    for size in range(2, N + 1):
        nxt: List[Perm] = []
        for t in perms:
            nxt.append(t + (size - 1,))
            nxt.append(tuple(x + 1 for x in t) + (0,))
        perms = nxt
    return perms


def is_xi_element(tau: Perm) -> bool:
    seen_min = seen_max = tau[0]
    for v in tau[1:]:
        if v == seen_max + 1:
            seen_max = v
        elif v == seen_min - 1:
            seen_min = v
        else:
            return False
    return True


def tau_ij(N: int, i: int, j: int) -> Perm:
    """The Gamma_N element [i+1..j, i, j+1..N, i-1 .. 1] (arguments 1-based)."""
    if not 1 <= i <= j <= N:
        raise ValueError("need 1 <= i <= j <= N")
    line = list(range(i + 1, j + 1)) + [i] + list(range(j + 1, N + 1)) + list(range(i - 1, 0, -1))
    return tuple(v - 1 for v in line)


@dataclass
class GammaChain:
    """The linearly ordered subset Gamma_N with its adjacent transpositions.

    links[idx] = (position k, 0-based) for perms[idx] -> perms[idx+1];
    the same-class flags eta(tau(k)) == eta(tau(k+1)) are filled in by
    annotate() once an eta labeling is available.
    """

    perms: List[Perm]                      # tau_{1,1} = id, ..., tau_{N,N} = w_circ
    links: List[int]                       # transposed position per adjacent pair
    same_class: Optional[List[bool]] = None

    def adjacent_pairs(self):
        for idx in range(len(self.perms) - 1):
            yield self.perms[idx], self.perms[idx + 1], self.links[idx]

    def annotate(self, eta: EtaData) -> "GammaChain":
        flags = [eta.eta[tau[k]] == eta.eta[tau[k + 1]]
                 for (tau, _t2, k) in self.adjacent_pairs()]
        return GammaChain(perms=self.perms, links=self.links, same_class=flags)


def gamma_chain(N: int) -> GammaChain:
    """Gamma_N in the canonical order; adjacent elements differ by (k, k+1)."""
    perms: List[Perm] = [tau_ij(N, 1, 1)]
    links: List[int] = []
    for i in range(1, N):
        for j in range(i, N):
            nxt = tau_ij(N, i, j + 1)
            prev = perms[-1]
            k = next(pos for pos in range(N - 1) if prev[pos] != nxt[pos])
            if not (prev[k] == nxt[k + 1] and prev[k + 1] == nxt[k]):
                raise SymmetryError("gamma chain adjacency broken")
            perms.append(nxt)
            links.append(k)
    return GammaChain(perms=perms, links=links)


def tau_bullet(tau: Perm, eta: EtaData) -> Perm:
    """The level-set order-normalizing companion permutation of tau.

    For each level set L of eta, tau_bullet maps the values of L, taken in
    the order their tau-positions occur, onto L in increasing order; composed
    as tau_bullet(tau(k)), positions within each level set become increasing.
    """
    n = len(tau)
    out = [0] * n
    by_label: Dict[int, List[int]] = {}
    for v in range(n):
        by_label.setdefault(eta.eta[v], []).append(v)
    inv = [0] * n
    for pos, v in enumerate(tau):
        inv[v] = pos
    for label, members in by_label.items():
        sorted_vals = sorted(members)
        by_position = sorted(members, key=lambda v: inv[v])
        for val, target in zip(by_position, sorted_vals):
            out[val] = target
    return tuple(out)


def perm_inverse(tau: Perm) -> Perm:
    inv = [0] * len(tau)
    for pos, v in enumerate(tau):
        inv[v] = pos
    return tuple(inv)


def perm_compose(a: Perm, b: Perm) -> Perm:
    """(a o b)(k) = a(b(k))."""
    return tuple(a[b[k]] for k in range(len(b)))


# ------------------------------------------------------------- interval primes


@dataclass
class IntervalPrime:
    """y_[i, s^m(i)] with its certified leading exponent."""

    i: int
    m: int
    poly: MvLaurent
    exponent: ExpVec


def interval_prime_data(p: PoissonPresentation, eta: EtaData, i: int, m: int) -> IntervalPrime:
    return IntervalPrime(i=i, m=m, poly=interval_prime(p, eta, i, m),
                         exponent=interval_exponent(eta, i, m))


def interval_prime(p: PoissonPresentation, eta: EtaData, i: int, m: int) -> MvLaurent:
    """The prime y_[i, s^m(i)], by the one-line recursion along the level set.

    Base y_[i,i] = x_i; then for t = 1..m
        y_[i, s^t(i)] = y_[i, s^(t-1)(i)] x_{s^t(i)}
                        - lambda_{s^t(i)}^{-1} delta_{s^t(i)}(y_[i, s^(t-1)(i)]).
    The leading term x_i x_{s(i)} ... x_{s^m(i)} is certified on the way out.
    """
    end = eta.succ_power(i, m)
    if end is None:
        raise IndexError(f"s^{m}({i+1}) is +infinity")
    y = MvLaurent.gen(p.n, i)
    cur = i
    for _ in range(m):
        cur = eta.succ[cur]
        dk = apply_derivation(p.delta_gen_images(cur), y)
        y = y * MvLaurent.gen(p.n, cur) - dk * (1 / p.lam_diag(cur))
    coeff, exp = y.leading_term()
    if coeff != 1 or exp != interval_exponent(eta, i, m):
        raise LeadingFormViolation(f"y_[{i+1}, s^{m}] has leading term {coeff} x^{exp}")
    return y


def interval_exponent(eta: EtaData, i: int, m: int) -> ExpVec:
    e = [0] * len(eta.eta)
    cur: Optional[int] = i
    for _ in range(m + 1):
        if cur is None:
            raise IndexError("interval escapes [1, N]")
        e[cur] = 1
        cur = eta.succ[cur]
    return tuple(e)


def y_sequence_for_tau(p: PoissonPresentation, eta: EtaData, tau: Perm) -> List[MvLaurent]:
    """Prime sequence of the tau-reordered presentation via interval selection.

    For position k: if tau(k) >= tau(1), take y_[p^m(tau(k)), tau(k)] with m
    maximal such that p^m stays inside tau([1, k]); in the opposite case use
    successor powers.  Predecessors/successors are those of the original
    presentation.
    """
    if not is_xi_element(tau):
        raise SymmetryError(f"{[v+1 for v in tau]} is not an interval-prefix permutation")
    prefix = set()
    out: List[MvLaurent] = []
    for k in range(len(tau)):
        v = tau[k]
        prefix.add(v)
        if v >= tau[0]:
            m = 0
            cur = eta.pred[v]
            while cur is not None and cur in prefix:
                m += 1
                cur = eta.pred[cur]
            start = eta.pred_power(v, m)
            out.append(interval_prime(p, eta, start, m))
        else:
            m = 0
            cur = eta.succ[v]
            while cur is not None and cur in prefix:
                m += 1
                cur = eta.succ[cur]
            out.append(interval_prime(p, eta, v, m))
    return out


def interval_data_for_tau(eta: EtaData, tau: Perm) -> List[Tuple[int, int]]:
    """(start, m) pairs such that y_{tau,k} = y_[start, s^m(start)]."""
    prefix = set()
    out: List[Tuple[int, int]] = []
    for k in range(len(tau)):
        v = tau[k]
        prefix.add(v)
        if v >= tau[0]:
            m = 0
            cur = eta.pred[v]
            while cur is not None and cur in prefix:
                m += 1
                cur = eta.pred[cur]
            out.append((eta.pred_power(v, m), m))
        else:
            m = 0
            cur = eta.succ[v]
            while cur is not None and cur in prefix:
                m += 1
                cur = eta.succ[cur]
            out.append((v, m))
    return out


# ------------------------------------------------------------------ u-elements


@dataclass
class UElementData:
    i: int
    m: int
    u: MvLaurent
    pi: Fraction
    f: ExpVec
    g: ExpVec


def u_element_and_pi(p: PoissonPresentation, eta: EtaData, i: int, m: int) -> UElementData:
    """u_[i,s^m(i)] with its leading coefficient pi, exponent f, and ebar-basis g.

    u = y_[i, s^(m-1)(i)] y_[s(i), s^m(i)] - y_[s(i), s^(m-1)(i)] y_[i, s^m(i)];
    the leading exponent must avoid the eta-class of i, and g re-expresses f
    in the interval ebar-vectors of the class-final indices inside the open
    interval (unique since each such index owns its own coordinate).  The
    degenerate case m = 0 is the convention u_[i,i] = 1.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        zero = (0,) * p.n
        return UElementData(i=i, m=0, u=MvLaurent.const(p.n, 1), pi=Fraction(1), f=zero, g=zero)
    end = eta.succ_power(i, m)
    if end is None:
        raise IndexError(f"s^{m}({i+1}) is +infinity")
    s_i = eta.succ[i]
    a = interval_prime(p, eta, i, m - 1)
    b = interval_prime(p, eta, s_i, m - 1)
    big = interval_prime(p, eta, i, m)
    inner = interval_prime(p, eta, s_i, m - 2) if m >= 2 else MvLaurent.const(p.n, 1)
    u = a * b - inner * big
    if u.is_zero():
        raise LeadingFormViolation(f"u_[{i+1}, s^{m}] vanishes")
    pi, f = u.leading_term()

    chain = {eta.succ_power(i, t) for t in range(m + 1)}
    if any(f[idx] for idx in chain):
        raise LeadingFormViolation(f"leading exponent of u_[{i+1}, s^{m}] touches the class of {i+1}")

    # P = class-final indices within the open interval (i, s^m(i))
    p_set = [k for k in range(i + 1, end) if k not in chain
             and (eta.succ[k] is None or eta.succ[k] > end)]
    g = [0] * p.n
    remaining = list(f)
    for k in sorted(p_set, reverse=True):
        mk = remaining[k]
        if mk:
            g[k] = mk
            cur: Optional[int] = k
            while cur is not None and cur > i:
                remaining[cur] -= mk
                cur = eta.pred[cur]
    if any(remaining):
        raise LeadingFormViolation(
            f"f of u_[{i+1}, s^{m}] is not a combination of interval ebar-vectors")
    return UElementData(i=i, m=m, u=u, pi=pi, f=f, g=tuple(g))


# ----------------------------------------------------------------- normalization


def apply_rescaling(p: PoissonPresentation, gamma: Sequence[Fraction]) -> PoissonPresentation:
    """The presentation on generators gamma_j x_j (weights and h unchanged).

    Table entries transform as delta'_k(x'_j) = gamma_k gamma_j delta_k(x_j)
    re-expressed in the new generators x'_i = gamma_i x_i.
    """
    gamma = [Fraction(g) for g in gamma]
    if len(gamma) != p.n or any(g == 0 for g in gamma):
        raise ValueError("need one nonzero scalar per generator")
    new_delta = {}
    for (k, j), poly in p.delta.items():
        if poly.is_zero():
            continue
        scaled = {}
        for e, c in poly.terms.items():
            factor = Fraction(1)
            for idx, mm in enumerate(e):
                if mm:
                    factor *= gamma[idx] ** (-mm)
            scaled[e] = c * factor * gamma[k] * gamma[j]
        new_delta[(k, j)] = MvLaurent(p.n, scaled)
    return PoissonPresentation(
        n=p.n, torus_rank=p.torus_rank, weights=p.weights, h=p.h,
        delta=new_delta, h_star=p.h_star,
    )


def rescale_generators(p: PoissonPresentation, eta: EtaData) -> Tuple[List[Fraction], PoissonPresentation]:
    """Gamma making every pi_[i, s(i)] equal 1, and the rescaled presentation.

    Free components (p(i) = -infinity) are fixed to 1; constrained ones follow
    gamma_i = gamma_{p(i)}^{-1} gamma^(f_[p(i), i]) / pi_[p(i), i], where the
    pi are computed for the current generators.
    """
    gamma: List[Fraction] = [Fraction(1)] * p.n
    for i in range(p.n):
        pi_idx = eta.pred[i]
        if pi_idx is None:
            continue
        ud = u_element_and_pi(p, eta, pi_idx, 1)
        monom = Fraction(1)
        for idx, mm in enumerate(ud.f):
            if mm:
                monom *= gamma[idx] ** mm
        gamma[i] = monom / (gamma[pi_idx] * ud.pi)
    return gamma, apply_rescaling(p, gamma)


# ------------------------------------------------- permuted-presentation oracle


def permute_presentation(p: PoissonPresentation, tau: Perm) -> PoissonPresentation:
    """The P-CGL presentation on generators z_k = x_{tau(k)} for tau in Xi_N.

    Ascending steps reuse h_{tau(k)}, descending steps use h*_{tau(k)}; the
    new delta entries are computed from the original bracket and reindexed
    through tau.  Used as the recursion oracle for y_sequence_for_tau.
    """
    if p.h_star is None:
        raise SymmetryError("permuted presentations need h_star (run validate_symmetric)")
    if not is_xi_element(tau):
        raise SymmetryError("tau must have interval prefixes")
    n = p.n
    weights = tuple(p.weights[tau[k]] for k in range(n))
    h_rows: List[Tuple[Fraction, ...]] = [p.h[tau[0]]]
    seen_max = tau[0]
    for k in range(1, n):
        v = tau[k]
        if v == seen_max + 1:
            h_rows.append(p.h[v])
            seen_max = v
        else:
            h_rows.append(p.h_star[v])
    gens = [MvLaurent.gen(n, i) for i in range(n)]
    delta: Dict[Tuple[int, int], MvLaurent] = {}
    for k in range(n):
        for j in range(k):
            a, b = tau[k], tau[j]
            lam = sum((x * y for x, y in zip(h_rows[k], p.weights[b])), Fraction(0))
            rest = bracket(p, gens[a], gens[b]) - MvLaurent.monomial(
                n, [1 if i in (a, b) else 0 for i in range(n)], lam)
            if rest.is_zero():
                continue
            moved = {}
            for e, c in rest.terms.items():
                moved[tuple(e[tau[idx]] for idx in range(n))] = c
            delta[(k, j)] = MvLaurent(n, moved)
    return PoissonPresentation(
        n=n, torus_rank=p.torus_rank, weights=weights, h=tuple(h_rows), delta=delta, h_star=None,
    )
