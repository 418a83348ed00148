import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fracdq.bench.catalog import get_case
from fracdq.estimators import FractionalDiffusionSolver, FractionalDQ
from fracdq.geometry import Interval, unit_square
from fracdq.nodes import chebyshev_1d, scattered_2d
from fracdq.validation import check_nodes, check_points, check_positive, check_samples

UNIT = Interval(0.0, 1.0)


def test_fractional_dq_ex51_reference():
    nodes = chebyshev_1d(0, 1, 10)
    est = FractionalDQ(domain=UNIT, kernel="mq", epsilon=0.3112, alpha=1.2, theta=math.pi).fit(nodes.x)
    assert est.weights_.shape == (11, 11)
    assert est.n_features_in_ == 11
    x = nodes.x
    approx = est.transform((1 - x) ** 3)
    exact = math.gamma(4) / math.gamma(2.8) * (1 - x) ** 1.8
    assert math.sqrt(np.mean((approx - exact) ** 2)) == pytest.approx(2.5459e-02, rel=0.02)
    assert est.residual_ <= 1e-6


def test_fractional_dq_batches_and_constants():
    nodes = scattered_2d(unit_square(), 60, 1)
    est = FractionalDQ(domain=unit_square(), kernel="mq", c_star=0.9, alpha=1.5, theta=0.3).fit(nodes)
    U = np.vstack([np.full(60, 7.0), nodes.x**2])
    out = est.transform(U)
    assert out.shape == (2, 60)
    assert np.max(np.abs(out[0])) <= 1e-8 * np.max(np.abs(est.weights_)) * 7
    assert np.allclose(out[1], est.transform(nodes.x**2), rtol=1e-13, atol=1e-13)
    assert est.rbf_.epsilon == pytest.approx(0.9 / 60**0.25)


def test_fractional_dq_raw_points_are_partitioned():
    nodes = scattered_2d(unit_square(), 50, 2)
    est = FractionalDQ(domain=unit_square(), kernel="imq", epsilon=0.5, alpha=1.7).fit(nodes.points)
    assert sorted(est.nodes_.boundary_idx) == sorted(nodes.boundary_idx)
    ref = FractionalDQ(domain=unit_square(), kernel="imq", epsilon=0.5, alpha=1.7).fit(nodes)
    assert np.array_equal(est.weights_, ref.weights_)


def test_fractional_dq_errors():
    with pytest.raises(NotFittedError):
        FractionalDQ(domain=UNIT, epsilon=0.3).transform(np.ones(3))
    with pytest.raises(ValueError, match="domain"):
        FractionalDQ(epsilon=0.3).fit([0.0, 1.0])
    with pytest.raises(ValueError, match="exactly one"):
        FractionalDQ(domain=UNIT).fit(chebyshev_1d(0, 1, 5))
    with pytest.raises(ValueError, match="exactly one"):
        FractionalDQ(domain=UNIT, epsilon=0.3, c_star=0.5).fit(chebyshev_1d(0, 1, 5))
    with pytest.raises(ValueError, match="outside"):
        FractionalDQ(domain=UNIT, epsilon=0.3).fit([0.0, 0.5, 1.5])
    with pytest.raises(ValueError, match="quad"):
        FractionalDQ(domain=UNIT, epsilon=0.3, quad=0).fit(chebyshev_1d(0, 1, 5))
    est = FractionalDQ(domain=UNIT, epsilon=0.3).fit(chebyshev_1d(0, 1, 5))
    with pytest.raises(ValueError, match="expected 6"):
        est.transform(np.ones(5))


def test_params_round_trip_and_clone():
    est = FractionalDQ(domain=UNIT, kernel="ga", epsilon=4.0, alpha=1.3)
    params = est.get_params()
    assert params["kernel"] == "ga" and params["alpha"] == 1.3
    twin = clone(est).set_params(alpha=1.9)
    assert twin.alpha == 1.9 and est.alpha == 1.3


def test_solver_matches_catalog_and_predicts():
    case = get_case("ex52")
    nodes = chebyshev_1d(0, 1, 15)
    solver = FractionalDiffusionSolver(problem=case.problem, kernel="mq", epsilon=0.1875, steps=15).fit(nodes)
    exact = case.exact(nodes.x, nodes.y, 1.0)
    assert np.max(np.abs(solver.solution_ - exact)) == pytest.approx(2.5379e-04, rel=0.05)
    # interpolant reproduces nodal values
    assert np.allclose(solver.predict(nodes.x), solver.solution_, atol=1e-9)
    probe = np.linspace(0.05, 0.95, 19)
    assert np.max(np.abs(solver.predict(probe) - case.exact(probe, 0 * probe, 1.0))) <= 5e-3
    assert solver.score(probe, case.exact(probe, 0 * probe, 1.0)) <= 0.0


def test_solver_2d_imq():
    case = get_case("ex55")
    nodes = scattered_2d(case.domain, 150, 1)
    solver = FractionalDiffusionSolver(problem=case.problem, kernel="imq", c_star=0.85, steps=40).fit(nodes.points)
    assert np.allclose(solver.predict(nodes.points), solver.solution_, atol=1e-8)
    assert solver.report_.condition_estimate >= 1.0


def test_solver_errors():
    with pytest.raises(ValueError, match="ProblemSpec"):
        FractionalDiffusionSolver(epsilon=0.2).fit(chebyshev_1d(0, 1, 5))
    case = get_case("ex52")
    with pytest.raises(ValueError, match="steps"):
        FractionalDiffusionSolver(problem=case.problem, epsilon=0.2, steps=0).fit(chebyshev_1d(0, 1, 5))
    with pytest.raises(NotFittedError):
        FractionalDiffusionSolver(problem=case.problem, epsilon=0.2).predict([0.5])


def test_validation_helpers():
    assert check_points([0.1, 0.2]).shape == (2, 2)
    assert check_points([[0.1], [0.3]]).tolist() == [[0.1, 0.0], [0.3, 0.0]]
    with pytest.raises(ValueError):
        check_points(np.ones((3, 3)))
    with pytest.raises(ValueError):
        check_points([[np.nan, 0.0]])
    ns = check_nodes([0.0, 0.5, 1.0], UNIT)
    assert list(ns.boundary_idx) == [0, 2]
    arr, flat = check_samples([1.0, 2.0], 2)
    assert flat and arr.shape == (1, 2)
    with pytest.raises(ValueError):
        check_samples(np.ones((2, 3)), 2)
    assert check_positive(3, "n", integer=True) == 3
    for bad in (0, -1.0, math.inf, True, "3"):
        with pytest.raises(ValueError):
            check_positive(bad, "v")
    with pytest.raises(ValueError):
        check_positive(2.5, "n", integer=True)
