"""Benchmark problems with manufactured exact solutions.

Case names: ``ex51`` (derivative approximation), ``ex52`` (1D diffusion),
``ex53i``/``ex53ii`` (square), ``ex54`` (trapezoid), ``ex55`` (disc) and
``ex56`` (L-shape). Every builder takes an optional ``alpha`` override where
the problem has a single fractional order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from ..geometry import Domain, Interval, disc, l_shape, trapezoid, unit_square
from ..rbf import Kernel
from ..stepper import FractionalTerm, ProblemSpec

G = math.gamma
DEFAULT_SEED = 1


@dataclass(frozen=True)
class DerivativeCase:
    """Approximate ``D^alpha_theta u`` on an interval and compare with ``exact``."""

    u: Callable
    exact: Callable
    interval: Interval
    alpha: float
    theta: float

    def __post_init__(self):
        if not (1.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in (1, 2], got {self.alpha}")


@dataclass(frozen=True)
class ShapeRule:
    """Shape parameter per node count: a table keyed by ``M``, a constant, or ``c*``."""

    table: Optional[dict] = None
    epsilon: Optional[float] = None
    c_star: Optional[float] = None

    def __post_init__(self):
        given = sum(v is not None for v in (self.table, self.epsilon, self.c_star))
        if given != 1:
            raise ValueError("give exactly one of table, epsilon, c_star")

    def resolve(self, M: int) -> float:
        if self.table is not None:
            if M not in self.table:
                raise KeyError(f"no tabulated shape parameter for M={M}; pass one explicitly")
            return self.table[M]
        if self.epsilon is not None:
            return self.epsilon
        return self.c_star / (M + 1) ** 0.25


@dataclass(frozen=True)
class CaseDefaults:
    shapes: dict
    m_values: tuple
    nodes: str  # "cheb", "grid" or "scatter"
    steps: Optional[Callable[[int], int]] = None
    quad: int = 50
    seed: int = DEFAULT_SEED
    kind: Kernel = Kernel.MQ


@dataclass(frozen=True)
class BenchmarkCase:
    name: str
    problem: Union[ProblemSpec, DerivativeCase]
    exact: Callable
    default_config: CaseDefaults
    description: str = ""
    params: dict = field(default_factory=dict)

    @property
    def domain(self) -> Domain:
        if isinstance(self.problem, DerivativeCase):
            return self.problem.interval
        return self.problem.domain

    @property
    def dim(self) -> int:
        return 1 if isinstance(self.domain, Interval) else 2

    @property
    def is_derivative(self) -> bool:
        return isinstance(self.problem, DerivativeCase)


def _problem(domain, terms, exact, source, horizon):
    return ProblemSpec(
        domain=domain,
        terms=tuple(terms),
        source=source,
        initial=lambda x, y: exact(x, y, 0.0),
        boundary=exact,
        horizon=horizon,
    )


def example_51(alpha: float = 1.2, power: float = 3.0) -> BenchmarkCase:
    def u(x):
        return (1.0 - x) ** power

    def exact_derivative(x):
        return G(power + 1.0) / G(power + 1.0 - alpha) * np.maximum(1.0 - x, 0.0) ** (power - alpha)

    case = DerivativeCase(u=u, exact=exact_derivative, interval=Interval(0.0, 1.0), alpha=alpha, theta=math.pi)
    defaults = CaseDefaults(
        shapes={
            Kernel.MQ: ShapeRule(table={10: 0.3112, 15: 0.2150, 20: 0.1678, 25: 0.1374}),
            Kernel.IMQ: ShapeRule(table={10: 0.4327, 15: 0.3328, 20: 0.2694, 25: 0.2255}),
            Kernel.GA: ShapeRule(table={10: 4.0381, 15: 5.3768, 20: 6.6514, 25: 7.8994}),
        },
        m_values=(10, 15, 20, 25),
        nodes="cheb",
    )
    return BenchmarkCase(
        "ex51",
        case,
        lambda x, y, t: exact_derivative(x),
        defaults,
        "D^alpha_pi (1-x)^3 on [0, 1]",
        {"alpha": alpha},
    )


def example_52(alpha: float = 1.5) -> BenchmarkCase:
    def exact(x, y, t):
        return np.exp(-t) * x**4

    term = FractionalTerm(alpha, 0.0, lambda x, y: x**alpha * G(5.0 - alpha) / 24.0)
    problem = _problem(Interval(0.0, 1.0), [term], exact, lambda x, y, t: -2.0 * np.exp(-t) * x**4, 1.0)
    defaults = CaseDefaults(
        shapes={
            Kernel.MQ: ShapeRule(table={15: 0.1875, 20: 0.1128, 25: 0.0712, 30: 0.0613, 40: 0.0312}),
            Kernel.IMQ: ShapeRule(table={15: 0.3098, 20: 0.2135, 25: 0.1567, 30: 0.1149, 40: 0.0511}),
        },
        m_values=(15, 20, 25, 30),
        nodes="cheb",
        steps=lambda M: M,
    )
    return BenchmarkCase("ex52", problem, exact, defaults, "1D diffusion, u = exp(-t) x^4", {"alpha": alpha})


def diagonal_caputo_x2y2(x, y, alpha):
    """Caputo derivative at angle pi/4 of ``x^2 y^2`` from the lines x=0 / y=0."""
    a = alpha
    pref = 2.0 ** (1.0 - 0.5 * a) / G(5.0 - a)
    with np.errstate(all="ignore"):
        upper = pref * y ** (2.0 - a) * ((a - 4) * (a - 3) * x * x - 2 * (a - 4) * a * x * y + (a - 1) * a * y * y)
        lower = pref * x ** (2.0 - a) * ((a - 1) * a * x * x - 2 * (a - 4) * a * x * y + (a - 4) * (a - 3) * y * y)
    return np.where(x >= y, upper, lower)


def example_53i() -> BenchmarkCase:
    a1, a2 = 1.8, 1.6

    def exact(x, y, t):
        return np.exp(-t) * x**3 * y**3.6

    terms = [
        FractionalTerm(a1, 0.0, lambda x, y: G(2.2) * x**2.8 * y / 6.0),
        FractionalTerm(a2, 0.5 * math.pi, lambda x, y: 2.0 * x * y**2.6 / G(4.6)),
    ]

    def source(x, y, t):
        return -np.exp(-t) * (1.0 + 2.0 * x * y) * x**3 * y**3.6

    defaults = CaseDefaults(
        shapes={Kernel.MQ: ShapeRule(c_star=0.98), Kernel.IMQ: ShapeRule(c_star=1.22)},
        m_values=(99, 195, 288, 440),
        nodes="grid",
        steps=lambda M: max(1, int(round(math.sqrt(M + 1) - 1))),
    )
    return BenchmarkCase(
        "ex53i", _problem(unit_square(), terms, exact, source, 1.0), exact, defaults, "square, two axis terms"
    )


def example_53ii(alpha: float = 1.8) -> BenchmarkCase:
    def exact(x, y, t):
        return np.exp(-t) * x**2 * y**2

    term = FractionalTerm(alpha, 0.25 * math.pi, lambda x, y: x**alpha)

    def source(x, y, t):
        return -np.exp(-t) * x**2 * y**2 - np.exp(-t) * x**alpha * diagonal_caputo_x2y2(x, y, alpha)

    defaults = CaseDefaults(
        shapes={
            Kernel.MQ: ShapeRule(c_star=0.89),
            Kernel.IMQ: ShapeRule(c_star=1.25),
            Kernel.GA: ShapeRule(table={518: 8.6924}),
        },
        m_values=(73, 143, 233, 423),
        nodes="scatter",
        steps=lambda M: 2000,
    )
    return BenchmarkCase(
        "ex53ii",
        _problem(unit_square(), [term], exact, source, 1.0),
        exact,
        defaults,
        "square, diagonal direction",
        {"alpha": alpha},
    )


def trapezoid_terms_x(a, x, y):
    return (
        0.75 * x**3 * y**3 / G(4.0 - a)
        - 18.0 * x**4 * y**2 / G(5.0 - a)
        + 180.0 * x**5 * y / G(6.0 - a)
        - 720.0 * x**6 / G(7.0 - a)
    )


def trapezoid_terms_right(a, x, y):
    return (
        0.75 * (a - 2) * (a - 1) * a * y**3 + 18.0 * (a - 1) * a * x * y**2 + 180.0 * a * x**2 * y + 720.0 * x**3
    ) / G(7.0 - a)


def example_54() -> BenchmarkCase:
    a1, a2 = 1.1, 1.3

    def exact(x, y, t):
        return np.exp(-t) * x**3 * (0.5 * (3.0 - y) - x) ** 3

    def kappa_right(x, y):
        gap = 1.5 - x - 0.5 * y
        # singular on the slanted edge; only interior rows use it
        with np.errstate(all="ignore"):
            return np.where(gap > 0.0, np.abs(gap) ** (a2 - 3.0), 0.0)

    terms = [FractionalTerm(a1, 0.0, lambda x, y: x**a1), FractionalTerm(a2, math.pi, kappa_right)]

    def source(x, y, t):
        return -np.exp(-t) * x**3 * (0.5 * (3.0 - y) - x) ** 3 - np.exp(-t) * (
            trapezoid_terms_x(a1, x, 3.0 - y) + trapezoid_terms_right(a2, x, y - 3.0)
        )

    defaults = CaseDefaults(
        shapes={Kernel.MQ: ShapeRule(c_star=0.75), Kernel.IMQ: ShapeRule(c_star=1.05)},
        m_values=(65, 170, 286, 436),
        nodes="scatter",
        steps=lambda M: 5000,
    )
    return BenchmarkCase(
        "ex54", _problem(trapezoid(), terms, exact, source, 1.0), exact, defaults, "trapezoid, left and right terms"
    )


def _disc_offset(x, y):
    # x minus the left end of the horizontal chord of the disc
    return np.maximum(x - 0.5 + np.sqrt(np.maximum(0.25 - (y - 0.5) ** 2, 0.0)), 0.0)


def example_55(alpha: float = 1.9) -> BenchmarkCase:
    def exact(x, y, t):
        return t**2 * _disc_offset(x, y) ** 2 * y**2

    term = FractionalTerm(alpha, 0.0, lambda x, y: 0.5 * y**alpha)

    def source(x, y, t):
        s = _disc_offset(x, y)
        return 2.0 * t * s**2 * y**2 - t**2 * s ** (2.0 - alpha) * y ** (2.0 + alpha) / G(3.0 - alpha)

    defaults = CaseDefaults(
        shapes={
            Kernel.IMQ: ShapeRule(c_star=0.85),
            Kernel.GA: ShapeRule(table={53: 5.4216, 79: 5.9814, 200: 7.5306, 401: 8.9554, 472: 10.3221}),
        },
        m_values=(53, 79, 200, 401),
        nodes="scatter",
        steps=lambda M: 5000,
        kind=Kernel.IMQ,
    )
    return BenchmarkCase(
        "ex55", _problem(disc(), [term], exact, source, 1.0), exact, defaults, "disc, x direction", {"alpha": alpha}
    )


def example_56(alpha: float = 1.5) -> BenchmarkCase:
    def exact(x, y, t):
        return t**3 * x**2 * y**2

    def kappa(x, y):
        return x**alpha * y**alpha

    terms = [FractionalTerm(alpha, th, kappa) for th in (0.0, 0.25 * math.pi, 0.5 * math.pi)]

    def source(x, y, t):
        with np.errstate(all="ignore"):
            axis = 2.0 * (x ** (2.0 - alpha) * y**2 + x**2 * y ** (2.0 - alpha)) / G(3.0 - alpha)
        return 3.0 * t**2 * x**2 * y**2 - t**3 * x**alpha * y**alpha * (diagonal_caputo_x2y2(x, y, alpha) + axis)

    defaults = CaseDefaults(
        shapes={
            Kernel.MQ: ShapeRule(epsilon=0.2128),
            Kernel.IMQ: ShapeRule(epsilon=0.3445),
            Kernel.GA: ShapeRule(epsilon=4.6880),
        },
        m_values=(592,),
        nodes="scatter",
        steps=lambda M: 1000,
    )
    return BenchmarkCase(
        "ex56",
        _problem(l_shape(), terms, exact, source, 0.5),
        exact,
        defaults,
        "L-shape, three directions",
        {"alpha": alpha},
    )


CATALOG: dict[str, Callable[..., BenchmarkCase]] = {
    "ex51": example_51,
    "ex52": example_52,
    "ex53i": example_53i,
    "ex53ii": example_53ii,
    "ex54": example_54,
    "ex55": example_55,
    "ex56": example_56,
}


def get_case(name: str, alpha: Optional[float] = None) -> BenchmarkCase:
    try:
        builder = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; choose from {', '.join(CATALOG)}") from None
    if alpha is None:
        return builder()
    try:
        return builder(alpha=alpha)
    except TypeError:
        raise ValueError(f"case {name!r} has fixed fractional orders; alpha cannot be overridden") from None
