"""Custom problems described in YAML.

Example::

    name: my-problem
    domain: square            # or {type: circle, center: [0.5, 0.5], radius: 0.5}
    horizon: 1.0
    terms:
      - {alpha: 1.5, theta: pi/4, kappa: "x^1.5"}
    source: "-exp(-t) * x^2 * y^2"
    initial: "x^2 * y^2"
    boundary: "exp(-t) * x^2 * y^2"
    exact: "exp(-t) * x^2 * y^2"   # optional; enables error columns
    defaults: {rbf: mq, c_star: 0.9, nodes: "scatter:200:seed=1", steps: 100}

``^`` is accepted as a power operator. ``alpha`` and ``theta`` are constant
expressions; ``kappa`` is an expression in ``x`` and ``y``.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Optional

import yaml

from .bench.catalog import BenchmarkCase, CaseDefaults, ShapeRule
from .expr import Expression, ExpressionError, evaluate_constant
from .geometry import Domain, GeometryError, domain_from_mapping, parse_domain
from .rbf import Kernel
from .stepper import FractionalTerm, ProblemSpec

REQUIRED_KEYS = ("domain", "horizon", "terms", "source", "initial", "boundary")
OPTIONAL_KEYS = ("name", "exact", "defaults")
TERM_KEYS = ("alpha", "theta", "kappa")
DEFAULT_KEYS = ("rbf", "epsilon", "c_star", "nodes", "steps", "quad")


class ConfigError(ValueError):
    pass


def _expr(source: Any, what: str) -> Expression:
    try:
        return Expression(str(source).replace("^", "**"))
    except ExpressionError as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def _constant(source: Any, what: str) -> float:
    try:
        value = evaluate_constant(str(source).replace("^", "**"))
    except (ExpressionError, SyntaxError) as exc:
        raise ConfigError(f"{what}: cannot evaluate {source!r}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"{what}: not finite")
    return value


def _domain(spec) -> Domain:
    try:
        if isinstance(spec, str):
            return parse_domain(spec)
        if isinstance(spec, dict):
            return domain_from_mapping(spec)
    except (GeometryError, KeyError, TypeError) as exc:
        raise ConfigError(f"domain: {exc}") from exc
    raise ConfigError("domain must be a string or a mapping")


def _check_keys(mapping: dict, allowed, where: str) -> None:
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {', '.join(map(str, unknown))}")


def _term(raw, i: int) -> FractionalTerm:
    if not isinstance(raw, dict):
        raise ConfigError(f"terms[{i}] must be a mapping")
    _check_keys(raw, TERM_KEYS, f"terms[{i}]")
    missing = [k for k in TERM_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"terms[{i}]: missing {', '.join(missing)}")
    kappa = _expr(raw["kappa"], f"terms[{i}].kappa")
    try:
        return FractionalTerm(
            _constant(raw["alpha"], f"terms[{i}].alpha"),
            _constant(raw["theta"], f"terms[{i}].theta"),
            lambda x, y, k=kappa: k(x, y),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"terms[{i}]: {exc}") from exc


def _defaults(raw: Optional[dict]) -> CaseDefaults:
    raw = dict(raw or {})
    _check_keys(raw, DEFAULT_KEYS, "defaults")
    if "epsilon" in raw and "c_star" in raw:
        raise ConfigError("defaults: give either epsilon or c_star, not both")
    try:
        kind = Kernel.parse(raw.get("rbf", "mq"))
    except ValueError as exc:
        raise ConfigError(f"defaults.rbf: {exc}") from exc
    shapes = {}
    if "epsilon" in raw:
        shapes[kind] = ShapeRule(epsilon=float(raw["epsilon"]))
    elif "c_star" in raw:
        shapes[kind] = ShapeRule(c_star=float(raw["c_star"]))
    steps = raw.get("steps")
    nodes = raw.get("nodes")
    return CaseDefaults(
        shapes=shapes,
        m_values=(),
        nodes=str(nodes) if nodes is not None else "",
        steps=(lambda M, n=int(steps): n) if steps is not None else None,
        quad=int(raw.get("quad", 50)),
        kind=kind,
    )


def problem_from_mapping(data: dict, name: str = "custom") -> BenchmarkCase:
    if not isinstance(data, dict):
        raise ConfigError("problem file must contain a mapping")
    _check_keys(data, REQUIRED_KEYS + OPTIONAL_KEYS, "problem")
    missing = [k for k in REQUIRED_KEYS if k not in data]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")
    domain = _domain(data["domain"])
    terms = data["terms"]
    if not isinstance(terms, list) or not terms:
        raise ConfigError("terms must be a non-empty list")
    source = _expr(data["source"], "source")
    initial = _expr(data["initial"], "initial")
    boundary = _expr(data["boundary"], "boundary")
    exact = _expr(data["exact"], "exact") if data.get("exact") is not None else None
    try:
        problem = ProblemSpec(
            domain=domain,
            terms=tuple(_term(t, i) for i, t in enumerate(terms)),
            source=lambda x, y, t: source(x, y, t),
            initial=lambda x, y: initial(x, y, 0.0),
            boundary=lambda x, y, t: boundary(x, y, t),
            horizon=_constant(data["horizon"], "horizon"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return BenchmarkCase(
        name=str(data.get("name", name)),
        problem=problem,
        exact=(lambda x, y, t: exact(x, y, t)) if exact is not None else None,
        default_config=_defaults(data.get("defaults")),
        description="custom problem",
    )


def load_problem(path) -> BenchmarkCase:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    return problem_from_mapping(data, name=path.stem)

