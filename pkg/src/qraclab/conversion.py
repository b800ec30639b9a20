"""Turning a quantum random access code into a classical one.

Pipeline: symmetrize the code with a shared random shift and XOR mask so
every bit position looks the same, read the whole-string measurement outcome
through the resulting classical channel, compress that channel's output by
rejection sampling, and replace the shared randomness with a small sampled
set of shifts.  The end product is a classical codebook whose message length
is m plus logarithmic overhead and whose per-bit success probability stays
above 1 - 2p(1-p) - eta.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bits import bit_column, format_bits
from .compression import (
    FAIL_INDEX,
    CompressionScheme,
    _sample_from,
    build_scheme,
    run_protocol,
)
from .errors import (
    BadShiftError,
    DerandomizationFailedError,
    DomainError,
    SizeCapError,
    ValidationError,
)
from .info import ClassicalChannel
from .pgm import PgmBundle, build_pgm
from .qrac import Ensemble, Qrac
from .rng import TAG_BOB, TAG_ENCODE, TAG_NEWMAN, TAG_SHARED, stream
from .serialize import rows_to_csv

ROUNDTRIP_MAX_N = 8
RAC_MAX_N = 6


def shift_bits(x: int, d: int, n: int) -> int:
    """Cyclic left rotation by d places: output bit j is input bit (j+d) mod n
    (positions counted 0-based from the most significant end)."""
    if not 1 <= d <= n:
        raise BadShiftError(f"shift must lie in 1..{n}, got {d}")
    if not 0 <= x < 2**n:
        raise DomainError(f"{x} is not an {n}-bit string")
    width = (1 << n) - 1
    return ((x << d) | (x >> (n - d))) & width


def unshift_bits(x: int, d: int, n: int) -> int:
    """Inverse of :func:`shift_bits` for the same d."""
    if not 1 <= d <= n:
        raise BadShiftError(f"shift must lie in 1..{n}, got {d}")
    return shift_bits(x, n - d, n) if d < n else x


@dataclass(frozen=True)
class SharedShift:
    """One sample of the symmetrizing shared randomness: XOR mask r followed
    by a cyclic shift d."""

    r: int
    d: int
    n: int

    def __post_init__(self):
        if not 1 <= self.d <= self.n:
            raise BadShiftError(f"shift must lie in 1..{self.n}, got {self.d}")
        if not 0 <= self.r < 2**self.n:
            raise DomainError(f"mask {self.r} is not an {self.n}-bit string")

    def apply(self, z: int) -> int:
        """Encoder direction: shift_d(z XOR r)."""
        return shift_bits(z ^ self.r, self.d, self.n)

    def invert(self, y: int) -> int:
        """Decoder direction: unshift_d(y) XOR r."""
        return unshift_bits(y, self.d, self.n) ^ self.r


@lru_cache(maxsize=None)
def _shift_table(d: int, n: int) -> np.ndarray:
    z = np.arange(2**n)
    width = (1 << n) - 1
    out = ((z << d) | (z >> (n - d))) & width
    out.flags.writeable = False
    return out


def perm_array(s: SharedShift) -> np.ndarray:
    """The permutation z -> shift_d(z XOR r) over all 2^n strings."""
    return _shift_table(s.d, s.n)[np.arange(2**s.n) ^ s.r]


def full_outcome_table(q: Qrac, pgm_uniform: PgmBundle) -> np.ndarray:
    """T[x, y] = probability the whole-string measurement reports y on the
    state encoding x."""
    if pgm_uniform.full is None:
        raise ValidationError("need a full-table measurement bundle")
    full_stack = np.stack(pgm_uniform.full.elements)
    table = np.einsum("yab,xba->xy", full_stack, q.state_stack).real
    if table.min() < -1e-10:
        raise ValidationError(f"outcome probability {table.min()} below zero")
    return np.clip(table, 0.0, None)


def per_bit_error_table(q: Qrac, pgm_uniform: PgmBundle) -> np.ndarray:
    """err[i-1, x] = probability bit i is decoded wrongly on input x under
    the uniform-prior square-root measurement marginals."""
    n = q.n
    f0s = np.stack(
        [mv.elements[mv.outcomes.index(0)] for mv in pgm_uniform.marginals]
    )
    p0 = np.einsum("iab,xba->ix", f0s, q.state_stack).real
    cols = np.stack([bit_column(i, n) for i in range(1, n + 1)])
    return np.where(cols == 0, 1.0 - p0, p0)


def symmetrized_roundtrip(
    q: Qrac, x: int, s: SharedShift, pgm_uniform: PgmBundle
) -> np.ndarray:
    """Exact distribution of the final output y: encode shift_d(x XOR r),
    measure, then undo the shift and mask on the outcome."""
    if q.n > ROUNDTRIP_MAX_N:
        raise SizeCapError(f"roundtrip capped at n = {ROUNDTRIP_MAX_N}, got {q.n}")
    if not 0 <= x < 2**q.n:
        raise DomainError(f"{x} is not an {q.n}-bit string")
    table = full_outcome_table(q, pgm_uniform)
    perm = perm_array(s)
    return table[perm[x]][perm]


def per_bit_success_symmetrized(q: Qrac) -> float:
    """Shared-shift-averaged per-bit success probability, identical for every
    (x, i) pair; equals 1 minus the mean per-bit error of the uniform-prior
    square-root measurement.

    Guaranteed at least 1 - 2p(1-p) when the code's success probability p is
    at least one half; below that the guarantee degrades to the coin-flip
    floor of one half.
    """
    pgm = build_pgm(Ensemble.uniform(q))
    err = per_bit_error_table(q, pgm)
    value = 1.0 - float(err.mean())
    p_eff = max(q.claimed_p, 0.5)
    floor = 1.0 - 2.0 * p_eff * (1.0 - p_eff)
    if value < floor - 1e-9:
        raise ValidationError(
            f"symmetrized per-bit success {value:.12f} fell below its floor {floor:.12f}"
        )
    return value


def effective_channel(
    q: Qrac, s: SharedShift, pgm_uniform: PgmBundle | None = None
) -> ClassicalChannel:
    """The classical channel x -> y realized by the symmetrized roundtrip
    under shared shift s."""
    if q.n > ROUNDTRIP_MAX_N:
        raise SizeCapError(f"channel table capped at n = {ROUNDTRIP_MAX_N}, got {q.n}")
    if pgm_uniform is None:
        pgm_uniform = build_pgm(Ensemble.uniform(q), full_table=True)
    table = full_outcome_table(q, pgm_uniform)
    perm = perm_array(s)
    channel = ClassicalChannel(table[perm][:, perm])
    g = float(np.max(channel.table, axis=0).sum())
    if math.log2(g) > q.m + 1e-9:
        raise ValidationError(
            f"channel max capacity {math.log2(g):.12f} exceeds the message size {q.m}"
        )
    return channel


def sample_newman_set(
    n: int, eta: float, seed: int, c_newman: float = 8.0, attempt: int = 0
) -> list[SharedShift]:
    """|S| = ceil(c_newman * n / eta^2) iid uniform (r, d) pairs, sampled with
    replacement."""
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    size = math.ceil(c_newman * n / eta**2)
    rng = stream(seed, TAG_NEWMAN, attempt)
    rs = rng.integers(0, 2**n, size=size)
    ds = rng.integers(1, n + 1, size=size)
    return [SharedShift(int(r), int(d), n) for r, d in zip(rs, ds)]


@dataclass(frozen=True)
class NoBadEventReport:
    ok: bool
    worst_margin: float
    threshold: float
    uniform_error: float
    offending: tuple[tuple[int, int], ...]


def _sampled_error_mean(
    err: np.ndarray, s_set: list[SharedShift], n: int
) -> np.ndarray:
    """Mean over s in S of the per-(i, x) error table pushed through each
    shift's relabeling; shape (n, 2^n)."""
    acc = np.zeros_like(err)
    rows = np.arange(n)
    for s in s_set:
        perm = perm_array(s)
        acc += err[np.ix_((rows - s.d) % n, perm)]
    return acc / len(s_set)


def verify_no_bad_event(
    q: Qrac, s_set: list[SharedShift], eta: float, *, pgm_uniform: PgmBundle | None = None
) -> NoBadEventReport:
    """Exhaustively check that no (x, i) pair has its S-averaged error exceed
    the shared-randomness average by more than eta/2."""
    n = q.n
    if n > RAC_MAX_N:
        raise SizeCapError(f"bad-event audit capped at n = {RAC_MAX_N}, got {n}")
    if pgm_uniform is None:
        pgm_uniform = build_pgm(Ensemble.uniform(q))
    err = per_bit_error_table(q, pgm_uniform)
    uniform_error = float(err.mean())
    sampled = _sampled_error_mean(err, s_set, n)
    margins = sampled - uniform_error
    threshold = eta / 2.0
    bad = np.argwhere(margins > threshold + 1e-12)
    offending = tuple((int(x), int(i) + 1) for i, x in bad)
    return NoBadEventReport(
        ok=len(offending) == 0,
        worst_margin=float(margins.max()),
        threshold=threshold,
        uniform_error=uniform_error,
        offending=offending,
    )


@dataclass(frozen=True)
class RacCodebook:
    """Classical random access code distilled from a quantum one."""

    n: int
    m: int
    eta: float
    claimed_p: float
    s_set: tuple[SharedShift, ...]
    schemes: tuple[CompressionScheme, ...]
    index_bits_s: int
    total_message_bits: int
    success_floor: float
    seed: int
    c_newman: float
    newman_attempts: int
    worst_margin: float

    def __post_init__(self):
        if len(self.schemes) != len(self.s_set):
            raise ValidationError("one compression scheme per shared shift required")
        parts = self.index_bits_s + max(sc.index_bits for sc in self.schemes)
        if self.total_message_bits != parts:
            raise ValidationError(
                f"message length {self.total_message_bits} does not match its parts {parts}"
            )
        budget = (
            self.m
            + math.ceil(math.log2(len(self.s_set)))
            + math.ceil(math.log2(math.log(2.0 / self.eta)))
            + 2
        )
        if self.total_message_bits > budget:
            raise ValidationError(
                f"message length {self.total_message_bits} exceeds the budget {budget}"
            )

    @property
    def size_s(self) -> int:
        return len(self.s_set)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "eta": self.eta,
            "claimed_p": self.claimed_p,
            "success_floor": self.success_floor,
            "index_bits_s": self.index_bits_s,
            "total_message_bits": self.total_message_bits,
            "c_newman": self.c_newman,
            "seed": self.seed,
            "newman_attempts": self.newman_attempts,
            "worst_margin": self.worst_margin,
            "s_set": [[s.r, s.d] for s in self.s_set],
            "schemes": [
                {
                    "channel_sha256": hashlib.sha256(
                        sc.channel.to_csv().encode()
                    ).hexdigest(),
                    "n_cap": sc.n_cap,
                    "index_bits": sc.index_bits,
                    "c_max": sc.c_max,
                }
                for sc in self.schemes
            ],
        }


def build_rac(
    q: Qrac,
    eta: float,
    seed: int,
    c_newman: float = 8.0,
    max_resamples: int = 16,
) -> RacCodebook:
    """Sample a shift set free of bad events (resampling on failure), then
    attach an eta/2-error compression scheme to each shift's channel."""
    n = q.n
    if n > RAC_MAX_N:
        raise SizeCapError(f"codebook construction capped at n = {RAC_MAX_N}, got {n}")
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    pgm = build_pgm(Ensemble.uniform(q), full_table=True)

    best_margin = math.inf
    report = None
    s_set = None
    for attempt in range(max_resamples):
        candidate = sample_newman_set(n, eta, seed, c_newman, attempt=attempt)
        report = verify_no_bad_event(q, candidate, eta, pgm_uniform=pgm)
        best_margin = min(best_margin, report.worst_margin)
        if report.ok:
            s_set = candidate
            attempts_used = attempt + 1
            break
    if s_set is None:
        raise DerandomizationFailedError(
            f"no shift set within {max_resamples} attempts cleared the "
            f"{eta / 2.0:.6f} margin (best worst-margin {best_margin:.6f})",
            worst_margin=best_margin,
        )

    schemes = tuple(
        build_scheme(effective_channel(q, s, pgm), eta / 2.0) for s in s_set
    )
    index_bits_s = math.ceil(math.log2(len(s_set)))
    total_bits = index_bits_s + max(sc.index_bits for sc in schemes)
    floor = 1.0 - 2.0 * q.claimed_p * (1.0 - q.claimed_p) - eta
    return RacCodebook(
        n=n,
        m=q.m,
        eta=eta,
        claimed_p=q.claimed_p,
        s_set=tuple(s_set),
        schemes=schemes,
        index_bits_s=index_bits_s,
        total_message_bits=total_bits,
        success_floor=floor,
        seed=seed,
        c_newman=c_newman,
        newman_attempts=attempts_used,
        worst_margin=report.worst_margin,
    )


@dataclass(frozen=True)
class RacValidation:
    """Exact per-(x, i) success audit of a codebook."""

    min_success: float
    ok: bool
    floor: float
    table: np.ndarray
    argmin: tuple[int, int]

    def to_csv(self, path=None) -> str:
        n, size = self.table.shape
        rows = [
            [format_bits(x, n), i + 1, float(self.table[i, x])]
            for x in range(size)
            for i in range(n)
        ]
        return rows_to_csv(["x", "i", "success"], rows, path)

    def to_json_dict(self) -> dict:
        return {
            "min_success": self.min_success,
            "floor": self.floor,
            "ok": self.ok,
            "argmin_x": self.argmin[0],
            "argmin_i": self.argmin[1],
        }


def validate_rac(codebook: RacCodebook, q: Qrac, tol: float = 1e-9) -> RacValidation:
    """Success probability of every (input, queried bit) pair, computed in
    closed form: acceptance reproduces the channel row exactly, failure falls
    back to a fair coin per bit."""
    n = q.n
    if n > RAC_MAX_N:
        raise SizeCapError(f"validation capped at n = {RAC_MAX_N}, got {n}")
    pgm = build_pgm(Ensemble.uniform(q))
    err = per_bit_error_table(q, pgm)
    rows = np.arange(n)
    acc = np.zeros_like(err)
    for s, sc in zip(codebook.s_set, codebook.schemes):
        perm = perm_array(s)
        p_sxi = err[np.ix_((rows - s.d) % n, perm)]
        fail = (1.0 - 1.0 / sc.ratio) ** sc.n_cap
        acc += (1.0 - fail) * (1.0 - p_sxi) + fail * 0.5
    table = acc / codebook.size_s
    flat = int(np.argmin(table))
    i, x = divmod(flat, table.shape[1])
    min_success = float(table[i, x])
    return RacValidation(
        min_success=min_success,
        ok=min_success >= codebook.success_floor - tol,
        floor=codebook.success_floor,
        table=table,
        argmin=(x, i + 1),
    )


@dataclass(frozen=True)
class RacMessage:
    """What actually crosses the channel: which shift, which sample index."""

    s_index: int
    sent_index: int
    total_bits: int


def rac_encode(
    codebook: RacCodebook, x: int, shared_seed: int, replicate: int = 0
) -> RacMessage:
    """Pick a shift with private randomness, run the rejection-sampling
    protocol on its channel, and emit (shift index, sample index)."""
    if not 0 <= x < 2**codebook.n:
        raise DomainError(f"{x} is not an {codebook.n}-bit string")
    chooser = stream(shared_seed, TAG_ENCODE, replicate)
    s_index = int(chooser.integers(codebook.size_s))
    run = run_protocol(
        codebook.schemes[s_index],
        x,
        shared_seed,
        replicate=replicate,
        stream_path=(s_index, replicate),
    )
    return RacMessage(
        s_index=s_index,
        sent_index=run.sent_index,
        total_bits=codebook.total_message_bits,
    )


def rac_decode(
    codebook: RacCodebook,
    message: RacMessage,
    i: int,
    shared_seed: int,
    replicate: int = 0,
) -> int:
    """Recover bit i of the decoded string from the message alone plus the
    shared randomness; the input x never enters."""
    n = codebook.n
    if not 1 <= i <= n:
        raise DomainError(f"bit index must lie in 1..{n}, got {i}")
    scheme = codebook.schemes[message.s_index]
    path = (message.s_index, replicate)
    if message.sent_index == FAIL_INDEX:
        bob = stream(shared_seed, TAG_BOB, *path)
        y = int(bob.integers(scheme.out_size))
    else:
        shared = stream(shared_seed, TAG_SHARED, *path)
        draws = _sample_from(scheme.z, shared.random(scheme.n_cap))
        y = int(draws[message.sent_index - 1])
    return (y >> (n - i)) & 1
