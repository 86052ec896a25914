"""Shared fixtures: hand-built networks with known optima plus a topology factory."""

from __future__ import annotations

import math

import numpy as np
import pytest

from dmect import Accumulation, Instance, TopologyConfig, generate


def line3_gains() -> np.ndarray:
    # 0 -- 1 -- 2 in a line: adjacent links at gain 1, the long hop at 0.1
    return np.array([
        [0.0, 1.0, 0.1],
        [1.0, 0.0, 1.0],
        [0.1, 1.0, 0.0],
    ])


@pytest.fixture
def line3() -> Instance:
    """theta = ln 2 makes the EA threshold e^theta - 1 = 1, so direct-link
    powers are just 1/gain: broadcast costs 10 in one slot, 2 in two."""
    return Instance(
        n=3,
        gains=line3_gains(),
        source=0,
        destinations=frozenset({1, 2}),
        theta=math.log(2.0),
    )


@pytest.fixture
def line3_mia(line3) -> Instance:
    import dataclasses
    return dataclasses.replace(line3, accumulation=Accumulation.MIA)


def topo(n: int, seed: int, *, eta: float = 2.0,
         accumulation: Accumulation = Accumulation.EA,
         theta: float = math.log(2.0)) -> Instance:
    """Random broadcast instance drawn from the seeded generator."""
    return generate(TopologyConfig(n=n, eta=eta, seed=seed, theta=theta),
                    accumulation=accumulation)
