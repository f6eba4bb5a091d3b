"""Shared fixtures: presets, synthetic presentations, cluster contexts."""

from __future__ import annotations

from fractions import Fraction

import pytest

from pcgl.cluster import ClusterContext
from pcgl.poly import MvLaurent
from pcgl.presentation import PoissonPresentation
from pcgl.presets import build_matrix_poisson


def weyl_block(c: int = 2) -> PoissonPresentation:
    """N = 2 symmetric presentation with {x2, x1} = c x2 x1 + 1.

    A Poisson-Weyl-flavored example whose normalization is nontrivial:
    pi_[1,2] = -1/c, so the rescaling machinery has real work to do.
    """
    return PoissonPresentation(
        n=2, torus_rank=1,
        weights=((1,), (-1,)),
        h=((Fraction(1),), (Fraction(c),)),
        delta={(1, 0): MvLaurent.const(2, 1)},
        h_star=((Fraction(c),), (Fraction(-1),)),
    )


def two_block(c1: int = 2, c2: int = 3) -> PoissonPresentation:
    """Two commuting Weyl-type blocks with lambda* = (c1, c2) on the two classes."""
    return PoissonPresentation(
        n=4, torus_rank=2,
        weights=((1, 0), (-1, 0), (0, 1), (0, -1)),
        h=(
            (Fraction(1), Fraction(0)),
            (Fraction(c1), Fraction(0)),
            (Fraction(0), Fraction(1)),
            (Fraction(0), Fraction(c2)),
        ),
        delta={(1, 0): MvLaurent.const(4, 1), (3, 2): MvLaurent.const(4, 1)},
        h_star=(
            (Fraction(c1), Fraction(0)),
            (Fraction(-1), Fraction(0)),
            (Fraction(0), Fraction(c2)),
            (Fraction(0), Fraction(-1)),
        ),
    )


@pytest.fixture(scope="session")
def p22():
    return build_matrix_poisson(2, 2)


@pytest.fixture(scope="session")
def p23():
    return build_matrix_poisson(2, 3)


@pytest.fixture(scope="session")
def p33():
    return build_matrix_poisson(3, 3)


@pytest.fixture(scope="session")
def ctx22(p22):
    return ClusterContext.build(p22)


@pytest.fixture(scope="session")
def ctx23(p23):
    return ClusterContext.build(p23)


@pytest.fixture(scope="session")
def ctx33(p33):
    return ClusterContext.build(p33)
