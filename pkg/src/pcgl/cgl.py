"""Prime-element combinatorics for validated iterated Poisson-Ore presentations.

Computes the level-set labeling eta with its predecessor/successor functions,
the recursive sequence y_1..y_N of homogeneous Poisson-prime elements, the
alpha/q scalar matrices, the derivation-deleting map, and the maximal-torus
equations, together with an exact certification pass for all of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .poly import ExpVec, MvLaurent, apply_derivation
from .presentation import (
    PoissonPresentation,
    PresentationError,
    SupportViolation,
    bracket,
    weight_of,
)


class PrimeSequenceError(PresentationError):
    pass


class AmbiguousPredecessor(PrimeSequenceError):
    def __init__(self, k, candidates):
        super().__init__(
            f"x_{k+1}: delta_{k+1} is nonzero on several final primes "
            f"{[j+1 for j in candidates]}; input is not P-CGL"
        )
        self.index = k
        self.candidates = candidates


class NoPredecessor(PrimeSequenceError):
    def __init__(self, k):
        super().__init__(f"x_{k+1}: delta_{k+1} != 0 but kills every final prime; input is not P-CGL")
        self.index = k


class CertFailure(PrimeSequenceError):
    def __init__(self, what, lhs, rhs):
        super().__init__(f"certification failed: {what}")
        self.what = what
        self.lhs = lhs
        self.rhs = rhs


@dataclass
class EtaData:
    """Level-set labeling and its predecessor/successor combinatorics (0-based)."""

    eta: List[int]
    pred: List[Optional[int]]
    succ: List[Optional[int]]
    exchangeable: List[int]
    rank: int

    def level_set(self, k: int) -> List[int]:
        return [j for j, lbl in enumerate(self.eta) if lbl == self.eta[k]]

    def pred_power(self, k: int, m: int) -> Optional[int]:
        cur: Optional[int] = k
        for _ in range(m):
            if cur is None:
                return None
            cur = self.pred[cur]
        return cur

    def succ_power(self, k: int, m: int) -> Optional[int]:
        cur: Optional[int] = k
        for _ in range(m):
            if cur is None:
                return None
            cur = self.succ[cur]
        return cur

    def order_minus(self, k: int) -> int:
        m = 0
        cur = self.pred[k]
        while cur is not None:
            m += 1
            cur = self.pred[cur]
        return m

    def order_plus(self, k: int) -> int:
        m = 0
        cur = self.succ[k]
        while cur is not None:
            m += 1
            cur = self.succ[cur]
        return m

    def ebar(self, k: int) -> ExpVec:
        """Exponent e_k + e_{p(k)} + ... down the predecessor chain."""
        e = [0] * len(self.eta)
        cur: Optional[int] = k
        while cur is not None:
            e[cur] = 1
            cur = self.pred[cur]
        return tuple(e)

    def as_dict(self) -> dict:
        return {
            "eta": list(self.eta),
            "pred": [None if v is None else v + 1 for v in self.pred],
            "succ": [None if v is None else v + 1 for v in self.succ],
            "exchangeable": [v + 1 for v in self.exchangeable],
            "rank": self.rank,
        }


@dataclass
class PrimeSequenceReport:
    y: List[MvLaurent]
    c: List[Optional[MvLaurent]]
    leading_exponents: List[ExpVec]
    weights: List[Tuple[int, ...]]


@dataclass
class QData:
    alpha: List[List[Fraction]]
    q: List[List[Fraction]]

    def omega_q(self, f: Sequence[int], g: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for k, fk in enumerate(f):
            if not fk:
                continue
            for j, gj in enumerate(g):
                if gj:
                    total += fk * gj * self.q[k][j]
        return total


def delta(p: PoissonPresentation, k: int, f: MvLaurent) -> MvLaurent:
    """The derivation delta_k applied to f (f must live below generator k)."""
    if any(i >= k for i in f.support()):
        raise SupportViolation(k, max(f.support()), f"argument of delta_{k+1} involves x_{max(f.support())+1}")
    return apply_derivation(p.delta_gen_images(k), f)


def sigma(p: PoissonPresentation, k: int, f: MvLaurent) -> MvLaurent:
    """The diagonal derivation sigma_k = (h_k . ) applied termwise."""
    out = MvLaurent.zero(p.n)
    for e, c in f.terms.items():
        s = p.sigma_scalar(k, e)
        if s:
            out = out + MvLaurent.monomial(p.n, e, c * s)
    return out


def compute_eta_and_primes(p: PoissonPresentation) -> Tuple[EtaData, PrimeSequenceReport]:
    """Run the k = 1..N recursion producing eta, p, s and the y-sequence.

    At step k, if delta_k vanishes identically then x_k starts a fresh level
    set and y_k = x_k.  Otherwise exactly one final prime y_j of the previous
    stage satisfies delta_k(y_j) != 0; that j is the predecessor and

        y_k = y_j x_k - lambda_k^{-1} delta_k(y_j).

    Ambiguity or absence of the predecessor signals that the input is not a
    P-CGL presentation even if it passed the local axioms.
    """
    n = p.n
    eta: List[int] = []
    pred: List[Optional[int]] = []
    y: List[MvLaurent] = []
    c: List[Optional[MvLaurent]] = []
    next_label = 0
    final: List[int] = []  # indices j with s(j) currently +infinity

    for k in range(n):
        if p.delta_is_zero(k):
            eta.append(next_label)
            next_label += 1
            pred.append(None)
            y.append(MvLaurent.gen(n, k))
            c.append(None)
            final.append(k)
            continue
        images = p.delta_gen_images(k)
        hits = [(j, apply_derivation(images, y[j])) for j in final]
        nonzero = [(j, dk) for j, dk in hits if not dk.is_zero()]
        if not nonzero:
            raise NoPredecessor(k)
        if len(nonzero) > 1:
            raise AmbiguousPredecessor(k, [j for j, _ in nonzero])
        j, dkyj = nonzero[0]
        lam_k = p.lam_diag(k)
        if lam_k == 0:
            raise PrimeSequenceError(f"lambda_{k+1} = 0; run validate_algebra first")
        eta.append(eta[j])
        pred.append(j)
        y.append(y[j] * MvLaurent.gen(n, k) - dkyj * (1 / lam_k))
        c.append(dkyj * (1 / lam_k))
        final.remove(j)
        final.append(k)

    succ: List[Optional[int]] = [None] * n
    for k in range(n):
        if pred[k] is not None:
            succ[pred[k]] = k
    exchangeable = [k for k in range(n) if succ[k] is not None]
    rank = sum(1 for k in range(n) if pred[k] is None)

    lead = []
    wts = []
    for k in range(n):
        coeff, exp = y[k].leading_term()
        lead.append(exp)
        wts.append(weight_of(p, y[k]))

    eta_data = EtaData(eta=eta, pred=pred, succ=succ, exchangeable=exchangeable, rank=rank)
    report = PrimeSequenceReport(y=y, c=c, leading_exponents=lead, weights=wts)
    return eta_data, report


def alpha_q_matrices(p: PoissonPresentation, eta: EtaData) -> QData:
    """alpha_kj = Omega_lambda(e_k, ebar_j) and q_kj = Omega_lambda(ebar_k, ebar_j)."""
    n = p.n
    ebars = [eta.ebar(k) for k in range(n)]
    unit = [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
    alpha = [[p.omega_lambda(unit[k], ebars[j]) for j in range(n)] for k in range(n)]
    q = [[p.omega_lambda(ebars[k], ebars[j]) for j in range(n)] for k in range(n)]
    return QData(alpha=alpha, q=q)


def certify_prime_sequence(p: PoissonPresentation, eta: EtaData, seq: PrimeSequenceReport) -> QData:
    """Exactly verify the defining identities of the computed prime sequence.

    Checks, for every k (and every pair where stated):
      * y_k is weight-homogeneous,
      * lt(y_k) = x^(ebar_k) with unit coefficient,
      * {y_j, x_k} = -alpha_kj y_j x_k whenever s(j) > k,
      * {y_k, y_j} = q_kj y_k y_j for all pairs.
    Returns the alpha/q matrices on success, raises CertFailure otherwise.
    """
    n = p.n
    qd = alpha_q_matrices(p, eta)
    gens = [MvLaurent.gen(n, i) for i in range(n)]
    for k in range(n):
        coeff, exp = seq.y[k].leading_term()
        if coeff != 1 or exp != eta.ebar(k):
            raise CertFailure(f"lt(y_{k+1})", (coeff, exp), (Fraction(1), eta.ebar(k)))
        weight_of(p, seq.y[k])  # raises Inhomogeneous on failure
    for j in range(n):
        for k in range(n):
            sj = eta.succ[j]
            if sj is not None and sj <= k:
                continue
            lhs = bracket(p, seq.y[j], gens[k])
            rhs = seq.y[j] * gens[k] * (-qd.alpha[k][j])
            if lhs != rhs:
                raise CertFailure(f"{{y_{j+1}, x_{k+1}}} = -alpha y x", lhs, rhs)
    for k in range(n):
        for j in range(k):
            lhs = bracket(p, seq.y[k], seq.y[j])
            rhs = seq.y[k] * seq.y[j] * qd.q[k][j]
            if lhs != rhs:
                raise CertFailure(f"{{y_{k+1}, y_{j+1}}} = q y y", lhs, rhs)
    return qd


def cauchon_theta(p: PoissonPresentation, k: int, f: MvLaurent) -> MvLaurent:
    """Derivation-deleting map: sum_n (1/n!)(-1/lambda_k)^n delta_k^n(f) x_k^(-n).

    Local nilpotence of delta_k makes the series finite; the presentation's
    nilpotence bound guards against invalid input.
    """
    if any(i >= k for i in f.support()):
        raise SupportViolation(k, max(f.support()), f"theta at {k+1} needs input below x_{k+1}")
    lam_k = p.lam_diag(k)
    images = p.delta_gen_images(k)
    bound = p.nilpotence_bound()
    out = MvLaurent.zero(p.n)
    cur = f
    n_fact = 1
    ratio = Fraction(-1) / lam_k
    power = Fraction(1)
    step = 0
    while not cur.is_zero():
        if step > bound:
            raise PrimeSequenceError(f"delta_{k+1} failed to nilpotate within {bound} steps")
        out = out + cur * (power / n_fact) * MvLaurent.gen(p.n, k, -step)
        step += 1
        n_fact *= step
        power *= ratio
        cur = apply_derivation(images, cur)
    return out


@dataclass
class HmaxEquation:
    """Multiplicative relation psi_k = psi_{j_k}^{-1} prod_i psi_i^{f_ki}."""

    k: int
    j: int
    f: ExpVec

    def as_dict(self) -> dict:
        return {"k": self.k + 1, "j": self.j + 1, "f": list(self.f)}


def hmax_equations(p: PoissonPresentation, eta: EtaData) -> Tuple[List[HmaxEquation], int]:
    """Equations cutting out the maximal torus, plus its dimension (= rank).

    For every k with delta_k != 0 we take the smallest j with
    delta_k(x_j) != 0 and the revlex-leading monomial of that entry.  The
    choice is deterministic; any admissible choice cuts out the same torus.
    """
    eqs: List[HmaxEquation] = []
    for k in range(p.n):
        if p.delta_is_zero(k):
            continue
        j = next(j for j in range(k) if not p.delta_entry(k, j).is_zero())
        _, exp = p.delta_entry(k, j).leading_term()
        eqs.append(HmaxEquation(k=k, j=j, f=exp))
    dim = p.n - len(eqs)
    if dim != eta.rank:
        raise PrimeSequenceError(f"H_max dimension {dim} != rank {eta.rank}")
    return eqs, dim
