"""Classical test-function registry with generic shift/rotation composition.

All functions accept positions of shape (..., D) and reduce over the last
axis, so single vectors and whole swarms evaluate through the same code
path.  Every registry entry knows its optimum, which makes error-form
reporting (f(x) - f(x*)) exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Bounds, ObjectiveSpec

__all__ = [
    "BenchmarkEntry",
    "REGISTRY",
    "UnknownFunctionError",
    "get_entry",
    "eval_registry_function",
    "make_spec",
    "compose_transform",
    "random_rotation",
]

# 1-D minimizer and minimum of -x*sin(sqrt(|x|)), frozen from a numeric
# minimization oracle; accurate to ~1e-13.
_SCHWEFEL_XSTAR = 420.9687462275036
_SCHWEFEL_OFFSET = 418.9828872724338


def sphere(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sum(x * x, axis=-1)


def rosenbrock(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head**2) ** 2 + (1.0 - head) ** 2, axis=-1)


def ackley(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    rms = np.sqrt(np.sum(x * x, axis=-1) / d)
    cos_mean = np.sum(np.cos(2.0 * np.pi * x), axis=-1) / d
    return -20.0 * np.exp(-0.2 * rms) - np.exp(cos_mean) + 20.0 + np.e


def rastrigin(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)


def griewank(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    idx = np.sqrt(np.arange(1, d + 1, dtype=float))
    return 1.0 + np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / idx), axis=-1)


def schwefel_226(x: np.ndarray) -> np.ndarray:
    """Schwefel 2.26 in error form: zero at x = 420.9687...

    Conventional box is [-500, 500]; the optimum sits outside the
    [-100, 100] box shared by the other entries.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    return _SCHWEFEL_OFFSET * d - np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1)


class UnknownFunctionError(ValueError):
    """Lookup of a function name that is not in the registry."""


@dataclass(frozen=True)
class BenchmarkEntry:
    """Registry row: the callable plus everything needed to pose a problem."""

    name: str
    function: Callable[[np.ndarray], np.ndarray]
    default_bounds: tuple[float, float]
    optimum_coordinate: float  # optimum position is this value in every dimension
    optimum_value: float
    modality: str  # "unimodal" | "multimodal"
    arity: str = "any-D"

    def optimum_position(self, dimension: int) -> np.ndarray:
        return np.full(dimension, self.optimum_coordinate)

    def bounds(self, dimension: int) -> Bounds:
        low, high = self.default_bounds
        return Bounds.cube(low, high, dimension)


REGISTRY: dict[str, BenchmarkEntry] = {
    e.name: e
    for e in [
        BenchmarkEntry("sphere", sphere, (-100.0, 100.0), 0.0, 0.0, "unimodal"),
        BenchmarkEntry("rosenbrock", rosenbrock, (-100.0, 100.0), 1.0, 0.0, "unimodal"),
        BenchmarkEntry("ackley", ackley, (-100.0, 100.0), 0.0, 0.0, "multimodal"),
        BenchmarkEntry("rastrigin", rastrigin, (-100.0, 100.0), 0.0, 0.0, "multimodal"),
        BenchmarkEntry("griewank", griewank, (-100.0, 100.0), 0.0, 0.0, "multimodal"),
        BenchmarkEntry(
            "schwefel_226", schwefel_226, (-500.0, 500.0), _SCHWEFEL_XSTAR, 0.0, "multimodal"
        ),
    ]
}


def get_entry(name: str) -> BenchmarkEntry:
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise UnknownFunctionError(f"unknown function {name!r}; available: {known}") from None


def eval_registry_function(name: str, x: np.ndarray) -> float | np.ndarray:
    """Evaluate a registry function by name, without transform or counting."""
    value = get_entry(name).function(np.asarray(x, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


def make_spec(
    name: str,
    dimension: int,
    shift: np.ndarray | None = None,
    rotation: np.ndarray | None = None,
    bounds: Bounds | None = None,
) -> ObjectiveSpec:
    """Pose a problem instance from a registry entry."""
    entry = get_entry(name)
    return ObjectiveSpec(
        function_id=entry.name,
        dimension=dimension,
        bounds=bounds if bounds is not None else entry.bounds(dimension),
        function=entry.function,
        shift=shift,
        rotation=rotation,
        optimum_value=entry.optimum_value,
    )


def compose_transform(
    entry: BenchmarkEntry | str,
    shift: np.ndarray,
    rotation: np.ndarray | None = None,
) -> ObjectiveSpec:
    """Shifted/rotated instance: evaluates f(rotation @ (x - shift)).

    For entries whose raw optimum is the origin, the optimum moves to
    ``shift`` (rotations fix the origin of the transformed frame, so they
    do not move it further).  Non-orthogonal rotations are rejected.
    """
    if isinstance(entry, str):
        entry = get_entry(entry)
    shift = np.asarray(shift, dtype=float)
    return make_spec(entry.name, shift.size, shift=shift, rotation=rotation)


def random_rotation(dimension: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal matrix from the QR factorization of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.normal(size=(dimension, dimension)))
    # normalize so the factorization is unique and det-stable
    return q * np.sign(np.diag(r))
