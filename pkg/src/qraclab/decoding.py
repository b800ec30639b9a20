"""Exact and sampled evaluation of string decoders.

The central quantity is the expected Hamming distance between the encoded
string and the measurement outcome, which for the square-root measurement
is guaranteed to stay below 2p(1-p)n for every prior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import bit_column
from .errors import DomainError, LabelMismatchError, ValidationError
from .linalg import Povm
from .pgm import PgmBundle
from .qrac import Ensemble, Qrac
from .rng import TAG_SAMPLE, stream
from .serialize import SCHEMA_VERSION, rows_to_csv


@dataclass(frozen=True)
class HammingReport:
    """Exact error accounting for one (code, prior, measurement) triple."""

    n: int
    expected_dh: float
    per_bit_error: np.ndarray
    per_x_expected_dh: np.ndarray
    bound: float
    satisfied: bool

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "expected_dh": self.expected_dh,
            "per_bit_error": [float(v) for v in self.per_bit_error],
            "per_x_expected_dh": [float(v) for v in self.per_x_expected_dh],
            "bound": self.bound,
            "satisfied": bool(self.satisfied),
        }

    def to_csv(self, path=None) -> str:
        share = self.bound / self.n
        rows = [(i + 1, float(e), share) for i, e in enumerate(self.per_bit_error)]
        return rows_to_csv(("i", "per_bit_error", "bound_share"), rows, path)


def _marginals_f0(measurement, n: int, dim: int) -> list[np.ndarray]:
    """Outcome-0 marginal operator per bit, from a bundle or a labeled table."""
    if isinstance(measurement, PgmBundle):
        if measurement.n != n:
            raise LabelMismatchError(f"measurement built for n = {measurement.n}, code has {n}")
        return [povm.elements[0] for povm in measurement.marginals]
    if not isinstance(measurement, Povm):
        raise TypeError(f"expected PgmBundle or Povm, got {type(measurement).__name__}")
    labels = measurement.outcomes
    if any(not 0 <= y < 2**n for y in labels):
        raise LabelMismatchError(f"outcome labels must lie in 0..{2**n - 1}")
    f0s = []
    for i in range(1, n + 1):
        col = bit_column(i, n)
        f0 = np.zeros((dim, dim), dtype=complex)
        for y, elem in zip(labels, measurement.elements):
            if col[y] == 0:
                f0 += elem
        f0s.append(f0)
    return f0s


def expected_hamming_exact(q: Qrac, prior, measurement) -> HammingReport:
    """Exact per-bit and total Hamming error of ``measurement`` on ``q``.

    ``measurement`` may be a PgmBundle (marginals are used directly) or a
    full Povm labeled by string indices.  The reported bound is
    2p(1-p)n with p the code's claimed worst-case success.
    """
    if isinstance(prior, Ensemble):
        prior = prior.prior
    prior = np.asarray(prior, dtype=float)
    if prior.shape != (2**q.n,):
        raise ValidationError(f"prior must have length {2**q.n}")
    stack = q.state_stack
    f0s = _marginals_f0(measurement, q.n, q.dim)
    per_bit = np.empty(q.n)
    per_x = np.zeros(2**q.n)
    for i in range(1, q.n + 1):
        col = bit_column(i, q.n)
        p_report0 = np.einsum("ij,xji->x", f0s[i - 1], stack).real
        err_x = np.where(col == 0, 1.0 - p_report0, p_report0)
        per_bit[i - 1] = prior @ err_x
        per_x += err_x
    p = q.claimed_p
    bound = 2.0 * p * (1.0 - p) * q.n
    expected = float(per_bit.sum())
    return HammingReport(
        n=q.n,
        expected_dh=expected,
        per_bit_error=per_bit,
        per_x_expected_dh=per_x,
        bound=bound,
        satisfied=bool(expected <= bound + 1e-9),
    )


def sample_decode(q: Qrac, x: int, measurement, seed: int, size: int | None = None, replicate: int = 0):
    """Draw outcome strings for input ``x`` from a full measurement.

    Sampling inverts the CDF over the outcome table ordered by label, so a
    given (seed, x, replicate) triple always reproduces the same draws.
    Returns a single label, or an array of them when ``size`` is given.
    """
    if isinstance(measurement, PgmBundle):
        if measurement.full is None:
            raise ValidationError("measurement bundle has no full outcome table")
        measurement = measurement.full
    if not 0 <= x < 2**q.n:
        raise ValidationError(f"x = {x} outside 0..{2**q.n - 1}")
    order = np.argsort(measurement.outcomes)
    labels = np.asarray(measurement.outcomes)[order]
    if any(not 0 <= y < 2**q.n for y in labels):
        raise LabelMismatchError(f"outcome labels must lie in 0..{2**q.n - 1}")
    probs = measurement.probabilities(q.encoder[x].mat)[order]
    probs = np.clip(probs, 0.0, None)
    cdf = np.cumsum(probs)
    if abs(cdf[-1] - 1.0) > 1e-9:
        raise ValidationError(f"outcome probabilities sum to {cdf[-1]}, not 1")
    rng = stream(seed, TAG_SAMPLE, x, replicate)
    u = rng.random(1 if size is None else size)
    idx = np.searchsorted(cdf, u * cdf[-1], side="right")
    idx = np.minimum(idx, len(labels) - 1)
    drawn = labels[idx]
    return int(drawn[0]) if size is None else drawn


@dataclass(frozen=True)
class IdentificationCheck:
    """Sum of diagonal success terms against the 2^m packing limit."""

    lhs: float
    rhs: float
    ok: bool


def identification_bound_check(q: Qrac, measurement: Povm, tol: float = 1e-8) -> IdentificationCheck:
    """Check sum_x Tr(Q_x rho_x) <= 2^m for a string-labeled measurement."""
    if isinstance(measurement, PgmBundle):
        if measurement.full is None:
            raise ValidationError("measurement bundle has no full outcome table")
        measurement = measurement.full
    labels = measurement.outcomes
    if any(not 0 <= y < 2**q.n for y in labels):
        raise LabelMismatchError(f"outcome labels must lie in 0..{2**q.n - 1}")
    lhs = 0.0
    for y, elem in zip(labels, measurement.elements):
        lhs += np.einsum("ij,ji->", elem, q.encoder[y].mat).real
    rhs = float(2**q.m)
    return IdentificationCheck(lhs=float(lhs), rhs=rhs, ok=bool(lhs <= rhs + tol))


def markov_tail(report: HammingReport, c: float) -> float:
    """Guaranteed bound on Pr[d_H > c * expected_dh], which is 1/c.

    A zero expected distance forces the tail probability to zero.
    """
    if c <= 1.0:
        raise DomainError(f"c must exceed 1, got {c}")
    if report.expected_dh == 0.0:
        return 0.0
    return 1.0 / c
