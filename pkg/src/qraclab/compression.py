"""One-way message compression of a classical channel by rejection sampling.

Alice and Bob share an iid stream drawn from the reference distribution Z
(the normalized column maxima of the channel table).  Alice accepts the
first sample z_i with probability E(x)(z_i) / (2^{a(x)} Z(z_i)), which makes
each attempt succeed with probability exactly 2^{-a(x)} and the accepted
sample distributed exactly as E(x).  She transmits the accepting index with
a fixed-width message; index 0 is reserved as the failure flag, on which
Bob answers with a private uniform sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .info import ClassicalChannel, max_channel_capacity
from .rng import TAG_ALICE, TAG_BATCH, TAG_BOB, TAG_SHARED, stream
from .serialize import fmt17, rows_to_csv

FAIL_INDEX = 0


@dataclass(frozen=True)
class CompressionScheme:
    """Frozen protocol parameters for one channel and one error target."""

    channel: ClassicalChannel
    z: np.ndarray
    a: np.ndarray
    ratio: np.ndarray
    eta: float
    c_max: float
    n_cap: int
    index_bits: int

    @property
    def in_size(self) -> int:
        return self.channel.in_size

    @property
    def out_size(self) -> int:
        return self.channel.out_size

    def to_json_dict(self) -> dict:
        return {
            "eta": self.eta,
            "c_max": self.c_max,
            "n_cap": self.n_cap,
            "index_bits": self.index_bits,
            "z": [fmt17(v) for v in self.z],
            "a": [fmt17(v) for v in self.a],
            "channel": self.channel.to_json_dict(),
        }


@dataclass(frozen=True)
class ProtocolRun:
    """One execution transcript."""

    x: int
    sent_index: int
    output_y: int
    message_bits: int
    shared_seed: int
    replicate: int

    @property
    def failed(self) -> bool:
        return self.sent_index == FAIL_INDEX

    def to_json_dict(self) -> dict:
        return {
            "x": self.x,
            "sent_index": self.sent_index,
            "failed": self.failed,
            "output_y": self.output_y,
            "message_bits": self.message_bits,
            "shared_seed": self.shared_seed,
            "replicate": self.replicate,
        }


@dataclass(frozen=True)
class ExactOutput:
    """Closed-form law of the protocol output for one input."""

    dist: np.ndarray
    fail_prob: float
    tv_error: float


def build_scheme(channel: ClassicalChannel, eta: float) -> CompressionScheme:
    """Fix the reference distribution, per-input overhead a(x), and the
    attempt cap n_cap = ceil(2^{c_max} ln(1/eta))."""
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    table = channel.table
    cap = max_channel_capacity(channel)
    z = cap.sigma
    # G = 2^{c_max} held in linear scale to keep n_cap arithmetic exact
    g = float(np.max(table, axis=0).sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(z > 0.0, table / z, 0.0)
    ratio = ratios.max(axis=1)
    a = np.log2(ratio, out=np.zeros_like(ratio), where=ratio > 0.0)
    n_cap = math.ceil(g * math.log(1.0 / eta))
    n_cap = max(n_cap, 1)
    return CompressionScheme(
        channel=channel,
        z=z,
        a=a,
        ratio=ratio,
        eta=eta,
        c_max=cap.value,
        n_cap=n_cap,
        index_bits=n_cap.bit_length(),
    )


def _sample_from(dist: np.ndarray, u: np.ndarray) -> np.ndarray:
    cum = np.cumsum(dist)
    idx = np.searchsorted(cum, u, side="right")
    return np.minimum(idx, len(dist) - 1)


def run_protocol(
    scheme: CompressionScheme,
    x: int,
    shared_seed: int,
    replicate: int = 0,
    *,
    stream_path: tuple[int, ...] | None = None,
) -> ProtocolRun:
    """Execute one protocol instance.

    ``stream_path`` overrides the default per-(x, replicate) stream keying;
    callers that need the receiver to reproduce the shared stream without
    knowing x (the random-access code built on top of this) pass an explicit
    path known to both ends.
    """
    if not 0 <= x < scheme.in_size:
        raise DomainError(f"input {x} outside alphabet of size {scheme.in_size}")
    path = (x, replicate) if stream_path is None else tuple(stream_path)
    shared = stream(shared_seed, TAG_SHARED, *path)
    alice = stream(shared_seed, TAG_ALICE, *path)
    bob = stream(shared_seed, TAG_BOB, *path)

    draws = _sample_from(scheme.z, shared.random(scheme.n_cap))
    row = scheme.channel.row(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        accept_p = np.where(
            scheme.z[draws] > 0.0, row[draws] / (scheme.ratio[x] * scheme.z[draws]), 0.0
        )
    hits = np.flatnonzero(alice.random(scheme.n_cap) < accept_p)
    if hits.size:
        sent = int(hits[0]) + 1
        output = int(draws[hits[0]])
    else:
        sent = FAIL_INDEX
        output = int(bob.integers(scheme.out_size))
    return ProtocolRun(
        x=x,
        sent_index=sent,
        output_y=output,
        message_bits=scheme.index_bits,
        shared_seed=shared_seed,
        replicate=replicate,
    )


def run_protocol_batch(
    scheme: CompressionScheme, x: int, shared_seed: int, runs: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized protocol transcript: (sent_index, output_y) arrays over
    ``runs`` independent executions sharing one batch stream."""
    if not 0 <= x < scheme.in_size:
        raise DomainError(f"input {x} outside alphabet of size {scheme.in_size}")
    shared = stream(shared_seed, TAG_BATCH, TAG_SHARED, x)
    alice = stream(shared_seed, TAG_BATCH, TAG_ALICE, x)
    bob = stream(shared_seed, TAG_BATCH, TAG_BOB, x)

    draws = _sample_from(scheme.z, shared.random((runs, scheme.n_cap)))
    row = scheme.channel.row(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        accept_p = np.where(
            scheme.z[draws] > 0.0, row[draws] / (scheme.ratio[x] * scheme.z[draws]), 0.0
        )
    accepted = alice.random((runs, scheme.n_cap)) < accept_p
    any_hit = accepted.any(axis=1)
    first = np.argmax(accepted, axis=1)
    sent = np.where(any_hit, first + 1, FAIL_INDEX)
    outputs = np.where(
        any_hit,
        draws[np.arange(runs), first],
        bob.integers(scheme.out_size, size=runs),
    )
    return sent, outputs


def exact_output_distribution(scheme: CompressionScheme, x: int) -> ExactOutput:
    """Closed-form output law: E(x) on acceptance, uniform on failure."""
    if not 0 <= x < scheme.in_size:
        raise DomainError(f"input {x} outside alphabet of size {scheme.in_size}")
    row = scheme.channel.row(x)
    k = scheme.out_size
    # each attempt accepts with probability exactly 2^{-a(x)} = 1/ratio
    fail_prob = (1.0 - 1.0 / scheme.ratio[x]) ** scheme.n_cap
    dist = (1.0 - fail_prob) * row + fail_prob / k
    tv = 0.5 * np.abs(row - 1.0 / k).sum()
    return ExactOutput(dist=dist, fail_prob=float(fail_prob), tv_error=float(fail_prob * tv))


def estimate_acceptance_rate(
    scheme: CompressionScheme, x: int, seed: int, runs: int = 100_000
) -> float:
    """Empirical per-attempt acceptance frequency over ``runs`` fresh first
    attempts; converges to 2^{-a(x)}."""
    if not 0 <= x < scheme.in_size:
        raise DomainError(f"input {x} outside alphabet of size {scheme.in_size}")
    shared = stream(seed, TAG_BATCH, TAG_SHARED, x, 1)
    alice = stream(seed, TAG_BATCH, TAG_ALICE, x, 1)
    draws = _sample_from(scheme.z, shared.random(runs))
    row = scheme.channel.row(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        accept_p = np.where(
            scheme.z[draws] > 0.0, row[draws] / (scheme.ratio[x] * scheme.z[draws]), 0.0
        )
    return float(np.mean(alice.random(runs) < accept_p))


def runs_to_csv(runs: list[ProtocolRun]) -> str:
    header = ["replicate", "x", "sent_index", "output_y"]
    rows = [[r.replicate, r.x, r.sent_index, r.output_y] for r in runs]
    return rows_to_csv(header, rows)
