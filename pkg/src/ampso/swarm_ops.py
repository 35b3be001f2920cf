"""Swarm transition operators.

Four moves cover everything the optimizer does to a population: the
kinematic velocity/position step, spawning a fresh swarm around an
incumbent best, rebuilding the worst few particles one dimension at a
time, and rebuilding the whole swarm.  Operators mutate the swarm in
place, spend evaluations through the shared counter, and keep the swarm's
global best monotone.

On a budget shortfall each operator applies whatever prefix of the work it
can afford, then raises :class:`BudgetExhausted` carrying the partial
count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Bounds,
    BudgetExhausted,
    EvalCounter,
    ObjectiveSpec,
    RngStream,
    Swarm,
    evaluate_batch,
)

__all__ = [
    "KinematicParams",
    "SPAWN_SPREAD",
    "pso_step",
    "spawn_artificial_swarm",
    "partial_reconstruct",
    "full_reconstruct",
]

# Gaussian spread used when generating a swarm around a seed position;
# reconstruction operators take an adaptive spread instead.
SPAWN_SPREAD = 0.1


@dataclass(frozen=True)
class KinematicParams:
    """Velocity-update coefficients and the per-dimension speed cap."""

    omega: float
    c1: float
    c2: float
    vmax: np.ndarray


def _absorb(swarm: Swarm, idx: np.ndarray, fitness: np.ndarray) -> None:
    """Fold fresh evaluations of particles ``idx`` into bests."""
    improved = fitness < swarm.best_fitness[idx]
    winners = idx[improved]
    swarm.best_positions[winners] = swarm.positions[winners]
    swarm.best_fitness[winners] = fitness[improved]
    swarm.refresh_global_best()


def pso_step(
    swarm: Swarm,
    params: KinematicParams,
    spec: ObjectiveSpec,
    rng: RngStream,
    counter: EvalCounter,
    subset: np.ndarray | None = None,
) -> None:
    """One velocity/position update of the selected particles.

    v <- omega*v + c1*r1*(pbest - x) + c2*r2*(gbest - x), with fresh r1
    and r2 for every particle and dimension, velocity clipped to +-vmax,
    position clipped to the bounds, then one re-evaluation per particle.
    Unselected particles are untouched.  Draw order: r1 block, r2 block.
    """
    requested = np.arange(swarm.size) if subset is None else np.asarray(subset, dtype=np.intp)
    affordable = min(len(requested), counter.remaining)
    idx = requested[:affordable]
    if len(idx) > 0:
        d = swarm.dimension
        r1 = rng.uniform(size=(len(idx), d))
        r2 = rng.uniform(size=(len(idx), d))
        x = swarm.positions[idx]
        v = (
            params.omega * swarm.velocities[idx]
            + params.c1 * r1 * (swarm.best_positions[idx] - x)
            + params.c2 * r2 * (swarm.global_best_position - x)
        )
        np.clip(v, -params.vmax, params.vmax, out=v)
        x = np.clip(x + v, spec.bounds.lower, spec.bounds.upper)
        swarm.velocities[idx] = v
        swarm.positions[idx] = x
        fitness = evaluate_batch(spec, x, counter)
        swarm.current_fitness[idx] = fitness
        _absorb(swarm, idx, fitness)
    if affordable < len(requested):
        raise BudgetExhausted("budget exhausted mid-step", consumed=affordable)


def spawn_artificial_swarm(
    seed_position: np.ndarray,
    seed_fitness: float,
    size: int,
    spec: ObjectiveSpec,
    rng: RngStream,
    counter: EvalCounter,
    role: str,
    vmax: np.ndarray,
) -> Swarm:
    """Generate a swarm by Gaussian perturbation of a known-good position.

    Each particle lands at seed + span * g with g ~ N(0, 0.1^2) per
    dimension, clipped to the box; velocities start uniform in +-vmax.
    Costs ``size`` evaluations; the seed itself is not re-evaluated, and
    it remains the swarm's global best unless a spawned particle beats it.
    Draw order: Gaussian offsets, velocities, then the evaluation.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    bounds = spec.bounds
    seed_position = np.asarray(seed_position, dtype=float)
    n = min(size, counter.remaining)
    offsets = rng.normal(0.0, SPAWN_SPREAD, size=(n, spec.dimension))
    positions = np.clip(seed_position + bounds.span * offsets, bounds.lower, bounds.upper)
    velocities = rng.uniform(low=-1.0, high=1.0, size=(n, spec.dimension)) * vmax
    fitness = evaluate_batch(spec, positions, counter)
    if n < size:
        raise BudgetExhausted(
            f"budget exhausted after spawning {n} of {size} particles", consumed=n
        )

    best = int(np.argmin(fitness))
    if fitness[best] < seed_fitness:
        gb_position, gb_fitness = positions[best].copy(), float(fitness[best])
    else:
        gb_position, gb_fitness = seed_position.copy(), float(seed_fitness)
    return Swarm(
        positions=positions,
        velocities=velocities,
        best_positions=positions.copy(),
        best_fitness=fitness.copy(),
        current_fitness=fitness,
        global_best_position=gb_position,
        global_best_fitness=gb_fitness,
        role=role,
    )


def _worst_indices(current_fitness: np.ndarray, n: int) -> np.ndarray:
    """Indices of the n largest fitness values; ties go to the lower index."""
    return np.argsort(-current_fitness, kind="stable")[:n]


def partial_reconstruct(
    swarm: Swarm,
    n_worst: int,
    sigma: float,
    bounds: Bounds,
    spec: ObjectiveSpec,
    rng: RngStream,
    counter: EvalCounter,
) -> None:
    """Rebuild the worst particles as one-dimension perturbations of the best.

    Each of the ``n_worst`` particles with the largest current fitness is
    moved onto the global best position, except for a single uniformly
    chosen dimension d set to best[d] + span[d] * r with r ~ N(0, sigma^2),
    clipped to the box.  Rebuilt particles get velocity 0 and their
    personal best reset to the new point (a stale best would drag them
    straight back).  Costs ``n_worst`` evaluations.  Draw order: dimension
    picks, then Gaussian offsets.
    """
    if n_worst > swarm.size:
        raise ValueError("cannot reconstruct more particles than the swarm holds")
    if n_worst < 1:
        raise ValueError("n_worst must be at least 1")
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    idx = _worst_indices(swarm.current_fitness, n_worst)
    affordable = min(n_worst, counter.remaining)
    idx = idx[:affordable]
    if affordable > 0:
        dims = rng.integers(0, swarm.dimension, size=affordable)
        r = rng.normal(0.0, sigma, size=affordable)
        positions = np.tile(swarm.global_best_position, (affordable, 1))
        moved = positions[np.arange(affordable), dims] + bounds.span[dims] * r
        positions[np.arange(affordable), dims] = moved
        positions = np.clip(positions, bounds.lower, bounds.upper)
        fitness = evaluate_batch(spec, positions, counter)
        swarm.positions[idx] = positions
        swarm.velocities[idx] = 0.0
        swarm.current_fitness[idx] = fitness
        swarm.best_positions[idx] = positions
        swarm.best_fitness[idx] = fitness
        swarm.refresh_global_best()
    if affordable < n_worst:
        raise BudgetExhausted("budget exhausted mid-reconstruction", consumed=affordable)


def full_reconstruct(
    swarm: Swarm,
    sigma: float,
    bounds: Bounds,
    spec: ObjectiveSpec,
    rng: RngStream,
    counter: EvalCounter,
) -> None:
    """Rebuild every particle around the global best to escape a trap.

    Unlike :func:`partial_reconstruct`, all dimensions are perturbed:
    x <- best + span * g with g ~ N(0, sigma^2) per dimension, clipped.
    Velocities reset to 0 and personal bests to the new points; the
    pre-reconstruction global best is retained unless beaten.  Costs one
    evaluation per particle.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n = swarm.size
    affordable = min(n, counter.remaining)
    if affordable > 0:
        g = rng.normal(0.0, sigma, size=(affordable, swarm.dimension))
        positions = np.clip(
            swarm.global_best_position + bounds.span * g, bounds.lower, bounds.upper
        )
        fitness = evaluate_batch(spec, positions, counter)
        idx = np.arange(affordable)
        swarm.positions[idx] = positions
        swarm.velocities[idx] = 0.0
        swarm.current_fitness[idx] = fitness
        swarm.best_positions[idx] = positions
        swarm.best_fitness[idx] = fitness
        swarm.refresh_global_best()
    if affordable < n:
        raise BudgetExhausted("budget exhausted mid-reconstruction", consumed=affordable)
