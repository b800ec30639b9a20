"""Worst-case decoding game solved by multiplicative weights.

An adversary picks the input string, the decoder picks a measurement; the
payoff is the expected Hamming distance between the true string and the
decoded one.  Running multiplicative weights over the 2^n inputs, with the
square-root measurement as the best response to each prior, produces an
averaged measurement whose worst-case expected distance is certified
directly by evaluating all 2^n inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bits import bit_column, format_bits
from .errors import LabelMismatchError, NotConvergedError, SizeCapError
from .linalg import SUPPORT_CUTOFF, Povm
from .pgm import PgmBundle, _pgm_raw, _psd_sqrt_stack
from .qrac import Qrac
from .serialize import matrix_to_reim

SOLVER_MAX_N = 8
SOLVER_MAX_M = 4


def _per_x_distance(f0s: np.ndarray, stack: np.ndarray, n: int) -> np.ndarray:
    """Expected Hamming distance for every input x, given the per-bit
    outcome-0 elements ``f0s`` of shape (n, dim, dim)."""
    # prob of decoding bit i as 0 when the encoded string is x
    p0 = np.einsum("iab,xba->ix", f0s, stack).real
    cols = np.stack([bit_column(i, n) for i in range(1, n + 1)])
    err = np.where(cols == 0, 1.0 - p0, p0)
    return err.sum(axis=0)


def _marginal_f0_from_povm(measurement: Povm, n: int, dim: int) -> np.ndarray:
    labels = np.asarray(measurement.outcomes)
    if labels.min() < 0 or labels.max() >= 2**n:
        raise LabelMismatchError(
            f"measurement outcomes must label n-bit strings, got range "
            f"[{labels.min()}, {labels.max()}] for n = {n}"
        )
    f0s = np.zeros((n, dim, dim), dtype=complex)
    for elem, y in zip(measurement.elements, labels):
        for i in range(1, n + 1):
            if (y >> (n - i)) & 1 == 0:
                f0s[i - 1] += elem
    return f0s


@dataclass(frozen=True)
class GameSolution:
    """Outcome of the worst-case decoding game."""

    n: int
    eps: float
    bound: float
    measurement: Povm
    per_x: np.ndarray
    worst_x: int
    worst_x_value: float
    avg_value_at_final_prior: float
    gap: float
    iterations: int
    converged: bool
    prior_trace: tuple[int, ...] = field(repr=False)

    @property
    def certified(self) -> bool:
        return self.worst_x_value <= self.bound + self.eps * self.n

    def to_json_dict(self, *, include_measurement: bool = False) -> dict:
        out = {
            "n": self.n,
            "eps": self.eps,
            "bound": self.bound,
            "per_x": {
                format_bits(x, self.n): float(v) for x, v in enumerate(self.per_x)
            },
            "worst_x": format_bits(self.worst_x, self.n),
            "worst_x_value": self.worst_x_value,
            "avg_value_at_final_prior": self.avg_value_at_final_prior,
            "gap": self.gap,
            "iterations": self.iterations,
            "converged": self.converged,
            "certified": self.certified,
        }
        if include_measurement:
            out["measurement"] = {
                "outcomes": list(self.measurement.outcomes),
                "elements": [matrix_to_reim(e) for e in self.measurement.elements],
            }
        return out


def evaluate_worstcase(q: Qrac, measurement: Povm | PgmBundle) -> tuple[float, int, np.ndarray]:
    """Worst-case expected Hamming distance of ``measurement`` on ``q``.

    Returns (worst value, argmax input, per-input values); ties break to the
    lexicographically first input string.
    """
    stack = q.state_stack
    if isinstance(measurement, PgmBundle):
        f0s = np.stack([mv.elements[mv.outcomes.index(0)] for mv in measurement.marginals])
    else:
        f0s = _marginal_f0_from_povm(measurement, q.n, q.dim)
    per_x = _per_x_distance(f0s, stack, q.n)
    worst_x = int(np.argmax(per_x))
    return float(per_x[worst_x]), worst_x, per_x


def solve_worstcase(
    q: Qrac,
    eps: float = 0.01,
    max_iters: int = 2000,
    seed: int = 0,
    *,
    gap_tol: float = 0.05,
    support_cutoff: float = SUPPORT_CUTOFF,
) -> GameSolution:
    """Run multiplicative weights on the adversary's prior until the averaged
    square-root measurement is certified.

    Stops once the worst-case expected distance of the averaged measurement
    is within ``eps * n`` of the 2p(1-p)n bound and the duality gap is at
    most ``gap_tol * n``.  The gap is measured against the value of the
    current best-response measurement at the current prior, which the
    average-case theorem keeps at or below the bound at every iteration.
    Raises :class:`NotConvergedError` with the best iterate attached if
    ``max_iters`` passes without certification.

    ``seed`` is recorded for interface stability; the reference loop is
    deterministic (uniform initial weights, exact best responses).
    """
    del seed
    n = q.n
    if n > SOLVER_MAX_N:
        raise SizeCapError(f"solver capped at n = {SOLVER_MAX_N}, got {n}")
    if q.m > SOLVER_MAX_M:
        raise SizeCapError(f"solver capped at m = {SOLVER_MAX_M}, got {q.m}")
    size = 2**n
    stack = q.state_stack
    sqrt_stack = _psd_sqrt_stack(stack)
    bound = 2.0 * q.claimed_p * (1.0 - q.claimed_p) * n
    lr = math.sqrt(8.0 * math.log(size) / max_iters)

    weights = np.ones(size)
    mean_f0 = np.zeros((n, q.dim, q.dim), dtype=complex)
    mean_full = np.zeros((size, q.dim, q.dim), dtype=complex)
    prior_trace: list[int] = []
    best_snapshot: dict | None = None

    def finish(snap: dict, converged: bool) -> GameSolution:
        povm = Povm(
            tuple(snap["mean_full"][y] for y in range(size)),
            outcomes=tuple(range(size)),
        )
        return GameSolution(
            n=n,
            eps=eps,
            bound=bound,
            measurement=povm,
            per_x=snap["per_x"],
            worst_x=snap["worst_x"],
            worst_x_value=snap["worst"],
            avg_value_at_final_prior=snap["avg"],
            gap=snap["gap"],
            iterations=snap["t"],
            converged=converged,
            prior_trace=tuple(prior_trace[: snap["t"]]),
        )

    for t in range(1, max_iters + 1):
        prior = weights / weights.sum()
        f0s, _, full = _pgm_raw(
            prior, stack, n, support_cutoff, full_table=True, sqrt_stack=sqrt_stack
        )
        d_t = _per_x_distance(f0s, stack, n)
        prior_trace.append(int(np.argmax(d_t)))

        mean_f0 += (f0s - mean_f0) / t
        mean_full += (full - mean_full) / t

        per_x = _per_x_distance(mean_f0, stack, n)
        worst_x = int(np.argmax(per_x))
        worst = float(per_x[worst_x])
        # value of the current best-response PGM at the current prior; this is
        # the quantity the 2p(1-p)n average-case theorem bounds directly
        avg_at_prior = float(prior @ d_t)
        gap = worst - avg_at_prior

        snap = {
            "t": t,
            "per_x": per_x,
            "worst_x": worst_x,
            "worst": worst,
            "avg": avg_at_prior,
            "gap": gap,
        }
        if worst <= bound + eps * n and gap <= gap_tol * n:
            snap["mean_full"] = mean_full
            return finish(snap, converged=True)
        if best_snapshot is None or worst < best_snapshot["worst"]:
            snap["mean_full"] = mean_full.copy()
            best_snapshot = snap

        weights = weights * np.exp(lr * d_t / n)
        weights /= weights.max()

    raise NotConvergedError(
        f"no certificate within {max_iters} iterations (best worst-case "
        f"{best_snapshot['worst']:.6f} vs bound {bound:.6f} + {eps * n:.6f}, "
        f"gap {best_snapshot['gap']:.6f})",
        best=finish(best_snapshot, converged=False),
    )
