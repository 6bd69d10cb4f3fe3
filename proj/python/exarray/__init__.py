"""Exchangeable arrays: sampling, sub-array limits, dynamics and tests.

Arrays are square numpy matrices. Finite alphabets hold symbol ids 0..k-1;
pass k=0 for entries in [0, 1]. Configs are plain dicts using the same
schema as the command-line tool.
"""

import json

import numpy as np

from . import _exarray
from ._exarray import (
    BudgetExceeded,
    InsufficientData,
    InvalidArgument,
    IoError,
    Trajectory,
    falling_factorial,
)

__all__ = [
    "BudgetExceeded",
    "InsufficientData",
    "InvalidArgument",
    "IoError",
    "Trajectory",
    "dispersion_test",
    "falling_factorial",
    "graph_density",
    "graph_ind",
    "jumps",
    "locality_test",
    "markov_test",
    "sample",
    "simulate",
    "subarray_measure",
]


def _config(c):
    return c if isinstance(c, str) else json.dumps(c)


def _matrix(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _measure(text):
    doc = json.loads(text)
    return {tuple(tuple(r) for r in atom["pattern"]): atom["weight"] for atom in doc["atoms"]}


def sample(config, m, seed=0):
    """Samples an m x m array. Returns (array, hidden_types); types is None
    except for the counterexample family."""
    y, types = _exarray.sample(_config(config), m, seed)
    return y, (None if types is None else np.asarray(types, dtype=np.uint8))


def subarray_measure(array, n, *, k=-1, mode="exact", draws=100000, seed=0, weak=False, threads=1, bins=16):
    """Empirical n x n sub-array distribution as {pattern tuple: weight}."""
    if mode not in ("exact", "mc"):
        raise ValueError("mode must be 'exact' or 'mc'")
    text = _exarray.subarray_measure(_matrix(array), k, n, mode == "exact", draws, seed, weak, threads, bins)
    return _measure(text)


def graph_ind(F, G):
    """Number of injections embedding F as an induced labeled subgraph of G."""
    return _exarray.graph_ind(_matrix(F), _matrix(G))


def graph_density(F, G):
    return _exarray.graph_density(_matrix(F), _matrix(G))


def simulate(kernel, init, horizon, seed=0, *, k=-1, symmetric=False, zero_diagonal=False, types=None):
    """Steps (discrete kernels) or time horizon (continuous kernels)."""
    t = None if types is None else [int(x) for x in types]
    return _exarray.simulate(_config(kernel), _matrix(init), k, symmetric, zero_diagonal, t, float(horizon), seed)


def jumps(trajectory, theta=0.05):
    """Jump classification report with per-class counts and events."""
    return json.loads(trajectory.jumps(theta))


def markov_test(m=50, N=20, R=1_000_000, seed=0, *, threads=1, full=False):
    return _exarray.markov_test(m, N, R, seed, threads, full)


def locality_test(kernel, n, x, x_alt, T, R, seed=0, *, k=-1, symmetric=False, zero_diagonal=False, threads=1):
    return _exarray.locality_test(
        _config(kernel), n, _matrix(x), _matrix(x_alt), k, symmetric, zero_diagonal, float(T), R, seed, threads
    )


def dispersion_test(array, B=1000, seed=0, *, k=-1, threads=1):
    return _exarray.dispersion_test(_matrix(array), k, B, seed, threads)
