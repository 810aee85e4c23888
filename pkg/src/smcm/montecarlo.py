"""Lattice Monte Carlo for independent-site cloud transitions.

Each site draws one uniform per step and walks the cumulative transition
probabilities of its current state: the unit interval is partitioned
into the jump probabilities (target states in ascending order) followed
by the stay remainder, and the draw picks the interval. This consumes a
single uniform per site per step and realises exactly the one-step
transition law.

Randomness is counter-based: the uniform consumed by site ``i`` at step
``t`` is position ``i`` of a Philox stream keyed by the run seed with the
step index in the top counter word. A site's stream therefore depends
only on ``(seed, t, i)`` - independent of lattice size, update order, and
how many other sites are evolved - which makes runs reproducible and
sites splittable for testing or parallel evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .core import N_STATES, validate_simplex, validate_stochastic

__all__ = [
    "Lattice",
    "SiteStreams",
    "fractions",
    "init_lattice",
    "mc_step",
    "step_uniforms",
]

#: Counter block reserved for initialisation, far above any step index.
_INIT_BLOCK = 1 << 62


def step_uniforms(seed: int, step: int, n_sites: int) -> np.ndarray:
    """Per-site uniforms for one step; element ``i`` is site ``i``'s draw."""
    return Generator(Philox(key=seed, counter=[0, 0, 0, step])).random(n_sites)


@dataclass
class SiteStreams:
    """Stateful cursor over the per-step uniform blocks of one run."""

    seed: int
    step: int = 0

    def next_uniforms(self, n_sites: int) -> np.ndarray:
        u = step_uniforms(self.seed, self.step, n_sites)
        self.step += 1
        return u

    def init_rng(self) -> Generator:
        """Generator for initial-condition shuffling, on a counter block
        disjoint from every step."""
        return Generator(Philox(key=self.seed, counter=[0, 0, 0, _INIT_BLOCK]))


@dataclass(frozen=True, eq=False)
class Lattice:
    """Site states, each an integer cloud-state code."""

    sites: np.ndarray

    def __post_init__(self):
        sites = np.asarray(self.sites, dtype=np.int64)
        object.__setattr__(self, "sites", sites)
        if sites.ndim != 1 or sites.size < 1:
            raise ValueError("lattice needs at least one site")
        if sites.min() < 0 or sites.max() >= N_STATES:
            raise ValueError(f"site states must lie in 0..{N_STATES - 1}")

    @property
    def n_sites(self) -> int:
        return self.sites.size


def init_lattice(n_sites: int, sigma0: np.ndarray, rng: Generator) -> Lattice:
    """Populate sites to match target fractions as closely as integers allow.

    Counts are apportioned by largest remainder (ties broken by state
    order) and then shuffled, so the initial empirical fractions carry no
    sampling noise beyond unavoidable rounding.
    """
    if n_sites < 1:
        raise ValueError(f"n_sites must be at least 1, got {n_sites}")
    sigma0 = validate_simplex(sigma0)
    target = n_sites * sigma0
    counts = np.floor(target).astype(np.int64)
    shortfall = n_sites - counts.sum()
    by_remainder = np.argsort(-(target - counts), kind="stable")
    counts[by_remainder[:shortfall]] += 1
    sites = np.repeat(np.arange(N_STATES), counts)
    return Lattice(sites=rng.permutation(sites))


def _advance_sites(sites: np.ndarray, p: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Advance each site through the interval partition of its column of ``p``."""
    targets = np.array(
        [[k for k in range(N_STATES) if k != l] for l in range(N_STATES)], dtype=np.int64
    )
    # edges[l, j]: cumulative probability of the first j+1 jump targets of state l
    edges = np.cumsum(p[targets, np.arange(N_STATES)[:, None]], axis=1)
    interval = (uniforms[:, None] >= edges[sites]).sum(axis=1)
    jumped = targets[sites, np.minimum(interval, N_STATES - 2)]
    return np.where(interval < N_STATES - 1, jumped, sites)


def mc_step(lattice: Lattice, p: np.ndarray, rng: SiteStreams) -> Lattice:
    """Advance every site one step, consuming one uniform per site."""
    p = validate_stochastic(p)
    uniforms = rng.next_uniforms(lattice.n_sites)
    return Lattice(sites=_advance_sites(lattice.sites, p, uniforms))


def fractions(lattice: Lattice) -> np.ndarray:
    """Empirical per-state fractions.

    The underlying counts are exact integers summing to the site total;
    the float divisions leave the sum within an ulp of one.
    """
    return np.bincount(lattice.sites, minlength=N_STATES) / lattice.n_sites
