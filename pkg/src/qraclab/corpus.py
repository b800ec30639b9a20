"""Seeded instance generators shared by the verification suites.

Everything here is reproducible from a single integer seed; instance i of a
batch draws from its own child stream so batches can be cut or parallelized
without changing what any instance sees.
"""

from __future__ import annotations

import numpy as np

from .info import ClassicalChannel
from .linalg import DensityMatrix
from .qrac import (
    Ensemble,
    Qrac,
    build_random_qrac,
    build_standard_2to1,
    build_tensor_power,
)
from .rng import TAG_CORPUS, stream

DEFAULT_P_MIN = 0.55


def random_qrac_corpus(
    count: int,
    seed: int,
    n_max: int = 6,
    m_max: int = 3,
    p_min: float = DEFAULT_P_MIN,
) -> list[Qrac]:
    """``count`` random codes with uniformly drawn (n, m) and validated
    worst-case success above ``p_min``; rejection keeps only usable codes."""
    picker = stream(seed, TAG_CORPUS, 0)
    out: list[Qrac] = []
    attempt = 0
    cap = 200 * count
    while len(out) < count and attempt < cap:
        n = int(picker.integers(1, n_max + 1))
        m = int(picker.integers(1, m_max + 1))
        q = build_random_qrac(n, m, seed=seed * cap + attempt)
        attempt += 1
        if q.claimed_p > p_min:
            out.append(q)
    if len(out) < count:
        raise RuntimeError(
            f"only {len(out)} of {count} codes cleared p > {p_min} in {cap} attempts"
        )
    return out


def reference_corpus(count: int, seed: int, k_max: int = 4) -> list[Qrac]:
    """The standard code, its tensor powers up to ``k_max``, then ``count``
    random codes."""
    base = build_standard_2to1()
    out = [base]
    out.extend(build_tensor_power(base, k) for k in range(2, k_max + 1))
    out.extend(random_qrac_corpus(count, seed))
    return out


def random_priors(size: int, count: int, seed: int) -> list[np.ndarray]:
    """Dirichlet priors over ``size`` atoms with occasionally spiky shape."""
    out = []
    for idx in range(count):
        rng = stream(seed, TAG_CORPUS, 1, idx)
        alpha = 1.0 if idx % 3 else 0.3
        out.append(rng.dirichlet(np.full(size, alpha)))
    return out


def random_channels(
    count: int, seed: int, max_size: int = 16, zero_frac: float = 0.25
) -> list[ClassicalChannel]:
    """Random row-stochastic tables with |X|, |Y| up to ``max_size``; roughly
    half the instances carry exact zero entries."""
    out = []
    for idx in range(count):
        rng = stream(seed, TAG_CORPUS, 2, idx)
        n_in = int(rng.integers(2, max_size + 1))
        n_out = int(rng.integers(2, max_size + 1))
        table = rng.dirichlet(np.ones(n_out), size=n_in)
        if idx % 2:
            mask = rng.random((n_in, n_out)) < zero_frac
            mask[np.arange(n_in), table.argmax(axis=1)] = False
            table = np.where(mask, 0.0, table)
            table /= table.sum(axis=1, keepdims=True)
        out.append(ClassicalChannel(table))
    return out


def _random_density(rng: np.random.Generator, dim: int, pure: bool) -> DensityMatrix:
    if pure:
        vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return DensityMatrix.from_state_vector(vec / np.linalg.norm(vec))
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_two_state_ensembles(count: int, seed: int) -> list[Ensemble]:
    """Two-state discrimination instances over one or two qubits, mixing pure
    and full-rank states under non-uniform priors."""
    out = []
    for idx in range(count):
        rng = stream(seed, TAG_CORPUS, 3, idx)
        dim = 2 if idx % 2 else 4
        p0 = float(rng.uniform(0.02, 0.98))
        states = (
            _random_density(rng, dim, pure=bool(rng.integers(2))),
            _random_density(rng, dim, pure=bool(rng.integers(2))),
        )
        out.append(Ensemble((p0, 1.0 - p0), states))
    return out
