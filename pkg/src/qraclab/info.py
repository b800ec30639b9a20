"""Entropies, max-relative entropy, and one-shot channel capacities.

All logarithms are base 2.  Eigenvalues and probabilities below 1e-15
(relative to the largest) are treated as exact zeros inside x*log(x).
Quantum registers enter only through cq-states; the max-information of a
genuinely quantum side register is out of scope here, which is why the
capacity routines take classical channel tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .bits import hamming_table
from .errors import BadSplitError, DomainError, ValidationError
from .linalg import DensityMatrix, partial_trace
from .serialize import SCHEMA_VERSION, matrix_to_reim, rows_to_csv

EIG_ZERO_CUTOFF = 1e-15  # relative, inside x*log2(x) sums


def _xlog2x_sum(vals: np.ndarray) -> float:
    vals = np.asarray(vals, dtype=float)
    top = vals.max(initial=0.0)
    if top <= 0.0:
        return 0.0
    kept = vals[vals > EIG_ZERO_CUTOFF * top]
    return float(-(kept * np.log2(kept)).sum())


def shannon_entropy(p) -> float:
    """Entropy of a classical distribution, in bits."""
    p = np.asarray(p, dtype=float)
    if p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-9:
        raise DomainError("argument is not a probability distribution")
    return _xlog2x_sum(np.clip(p, 0.0, None))


def binary_entropy(q: float) -> float:
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"binary entropy needs q in [0, 1], got {q}")
    return _xlog2x_sum(np.array([q, 1.0 - q]))


def von_neumann_entropy(rho) -> float:
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    vals = np.linalg.eigvalsh(mat)
    return _xlog2x_sum(np.clip(vals, 0.0, None))


def _joint_matrix(rho_ab, dims: tuple[int, ...]) -> np.ndarray:
    mat = rho_ab.mat if isinstance(rho_ab, DensityMatrix) else np.asarray(rho_ab, dtype=complex)
    if mat.shape[0] != int(np.prod(dims)):
        raise BadSplitError(f"split {dims} does not factor dimension {mat.shape[0]}")
    return mat


def conditional_entropy(rho_ab, split: tuple[int, int]) -> float:
    """H(A|B) = H(AB) - H(B) of a bipartite state."""
    mat = _joint_matrix(rho_ab, split)
    rho_b = partial_trace(mat, split, keep=(1,))
    return von_neumann_entropy(mat) - von_neumann_entropy(rho_b)


def mutual_information(rho_ab, split: tuple[int, int]) -> float:
    """I(A:B) = H(A) + H(B) - H(AB)."""
    mat = _joint_matrix(rho_ab, split)
    rho_a = partial_trace(mat, split, keep=(0,))
    rho_b = partial_trace(mat, split, keep=(1,))
    return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(mat)


def conditional_mutual_information(rho_abc, split: tuple[int, int, int]) -> float:
    """I(A:B|C) = H(AC) + H(BC) - H(ABC) - H(C)."""
    mat = _joint_matrix(rho_abc, split)
    h_ac = von_neumann_entropy(partial_trace(mat, split, keep=(0, 2)))
    h_bc = von_neumann_entropy(partial_trace(mat, split, keep=(1, 2)))
    h_c = von_neumann_entropy(partial_trace(mat, split, keep=(2,)))
    return h_ac + h_bc - von_neumann_entropy(mat) - h_c


def max_relative_entropy(p, q) -> float:
    """log2 of the largest ratio p(y)/q(y); +inf outside q's support."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise BadSplitError("distributions differ in length")
    sup = p > 0
    if (q[sup] <= 0).any():
        return math.inf
    return float(np.log2((p[sup] / q[sup]).max()))


# ---------------------------------------------------------------------------
# classical channels


@dataclass(frozen=True)
class ClassicalChannel:
    """Row-stochastic table E(x)(y), one row per input symbol."""

    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
            raise ValidationError(f"expected a 2-D table, got shape {table.shape}")
        if table.min() < 0:
            raise ValidationError("channel has negative entries")
        if np.abs(table.sum(axis=1) - 1.0).max() > 1e-12:
            raise ValidationError("channel rows must each sum to 1 within 1e-12")
        table = table.copy()
        table.flags.writeable = False
        object.__setattr__(self, "table", table)

    @property
    def in_size(self) -> int:
        return self.table.shape[0]

    @property
    def out_size(self) -> int:
        return self.table.shape[1]

    def row(self, x: int) -> np.ndarray:
        return self.table[x]

    def compose(self, post: "ClassicalChannel") -> "ClassicalChannel":
        """Feed this channel's output through ``post``."""
        if post.in_size != self.out_size:
            raise BadSplitError(
                f"post-processing expects {post.in_size} inputs, channel emits {self.out_size}"
            )
        return ClassicalChannel(self.table @ post.table)

    @classmethod
    def identity(cls, k: int) -> "ClassicalChannel":
        return cls(np.eye(k))

    @classmethod
    def constant(cls, k_in: int, row) -> "ClassicalChannel":
        row = np.asarray(row, dtype=float)
        return cls(np.tile(row, (k_in, 1)))

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "in_size": self.in_size,
            "out_size": self.out_size,
            "table": [[float(v) for v in row] for row in self.table],
        }

    def to_csv(self, path=None) -> str:
        header = ("x",) + tuple(f"y{y}" for y in range(self.out_size))
        rows = [(x,) + tuple(float(v) for v in self.table[x]) for x in range(self.in_size)]
        return rows_to_csv(header, rows, path)


def channel_from_json_dict(data: dict) -> ClassicalChannel:
    return ClassicalChannel(np.array(data["table"], dtype=float))


def channel_mutual_information(channel: ClassicalChannel, prior) -> float:
    """Shannon I(X:Y) of the joint induced by ``prior`` and the channel."""
    prior = np.asarray(prior, dtype=float)
    if prior.shape != (channel.in_size,):
        raise BadSplitError("prior length differs from channel input size")
    joint = prior[:, None] * channel.table
    py = joint.sum(axis=0)
    return shannon_entropy(prior) + shannon_entropy(py) - _xlog2x_sum(joint.reshape(-1))


@dataclass(frozen=True)
class MaxCapacityResult:
    value: float
    sigma: np.ndarray


def max_channel_capacity(channel: ClassicalChannel) -> MaxCapacityResult:
    """One-shot max-information capacity log2 sum_y max_x E(x)(y).

    The returned sigma is the reference distribution attaining the inner
    minimum (the normalized column maxima); it need not be unique.
    """
    g = channel.table.max(axis=0)
    total = g.sum()
    return MaxCapacityResult(value=float(np.log2(total)), sigma=g / total)


def max_channel_capacity_lp(channel: ClassicalChannel) -> float:
    """Independent LP evaluation of the same capacity.

    Minimizes t subject to E(x)(y) <= t*sigma(y) over distributions sigma,
    linearized through tau = t*sigma so an off-the-shelf solver applies.
    """
    n_in, n_out = channel.in_size, channel.out_size
    c = np.ones(n_out)
    a_ub = np.repeat(-np.eye(n_out), n_in, axis=0)
    b_ub = -channel.table.T.reshape(-1)  # tau_y >= E(x)(y) for every x
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * n_out, method="highs")
    if not res.success:
        raise RuntimeError(f"capacity LP failed: {res.message}")
    return float(np.log2(res.fun))


def max_information_dim_bound(m_qubits: int) -> float:
    """Largest max-information extractable from an m-qubit register."""
    if m_qubits < 0:
        raise DomainError("qubit count must be nonnegative")
    return float(m_qubits)


def postprocessing_monotonicity_check(
    channel: ClassicalChannel, post: ClassicalChannel, tol: float = 1e-9
) -> bool:
    """Post-processing never raises the capacity, which itself never
    exceeds the log of the intermediate alphabet size."""
    before = max_channel_capacity(channel).value
    after = max_channel_capacity(channel.compose(post)).value
    return after <= before + tol and before <= math.log2(channel.out_size) + tol


# ---------------------------------------------------------------------------
# cq-states


@dataclass(frozen=True)
class CqState:
    """Classical register X correlated with a quantum register A."""

    probs: np.ndarray
    states: tuple[DensityMatrix, ...]

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (len(self.states),):
            raise ValidationError("one probability per state required")
        if probs.min() < 0 or abs(probs.sum() - 1.0) > 1e-9:
            raise ValidationError("probs is not a distribution")
        dim = self.states[0].dim
        for st in self.states:
            if st.dim != dim:
                raise ValidationError("cq component states differ in dimension")
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def x_size(self) -> int:
        return len(self.states)

    @property
    def dim_a(self) -> int:
        return self.states[0].dim

    def joint(self) -> DensityMatrix:
        """Block-diagonal joint state sum_x p_x |x><x| (x) rho_x."""
        d = self.dim_a
        out = np.zeros((self.x_size * d, self.x_size * d), dtype=complex)
        for x, (p, st) in enumerate(zip(self.probs, self.states)):
            out[x * d : (x + 1) * d, x * d : (x + 1) * d] = p * st.mat
        return DensityMatrix(out)

    def average_state(self) -> np.ndarray:
        return np.einsum("x,xij->ij", self.probs, np.stack([s.mat for s in self.states]))


def cq_operator_dominance_check(cq: CqState, tol: float = 1e-9) -> bool:
    """The joint cq-state is dominated by both of its marginal extensions:
    rho_XA <= I_X (x) rho_A and rho_XA <= rho_X (x) I_A."""
    joint = cq.joint().mat
    ext_a = np.kron(np.eye(cq.x_size), cq.average_state())
    ext_x = np.kron(np.diag(cq.probs).astype(complex), np.eye(cq.dim_a))
    ok_a = np.linalg.eigvalsh(ext_a - joint).min() >= -tol
    ok_x = np.linalg.eigvalsh(ext_x - joint).min() >= -tol
    return bool(ok_a and ok_x)


# ---------------------------------------------------------------------------
# lower bounds on encoding size


@dataclass(frozen=True)
class QubitLowerBound:
    """Two lower bounds on the qubits needed for worst-case success p.

    ``from_hamming`` comes from the expected-distance guarantee of the
    square-root measurement; ``from_entropy`` is the classic per-bit
    entropy bound, which is stronger but proved differently.
    """

    from_hamming: float
    from_entropy: float


def qubit_lower_bound(n: int, p: float) -> QubitLowerBound:
    if not 0.5 < p <= 1.0:
        raise DomainError(f"success probability must lie in (1/2, 1], got {p}")
    if n < 1:
        raise DomainError("n must be positive")
    from_hamming = (1.0 - binary_entropy(2.0 * p * (1.0 - p))) * n - math.log2(n + 1)
    from_entropy = (1.0 - binary_entropy(p)) * n
    return QubitLowerBound(from_hamming=from_hamming, from_entropy=from_entropy)


@dataclass(frozen=True)
class DistanceConditioningReport:
    """Entropy accounting for conditioning on the decoder's distance count."""

    h_x_given_y: float
    h_x_given_yd: float
    side_information: float  # log2(n+1)
    ok_monotone: bool  # H(X|Y,D) <= H(X|Y)
    ok_recover: bool  # H(X|Y) <= H(X|Y,D) + log2(n+1)


def distance_conditioning_check(joint_xy: np.ndarray, n: int, tol: float = 1e-9) -> DistanceConditioningReport:
    """Check the chain H(X|Y,D) <= H(X|Y) <= H(X|Y,D) + log2(n+1) on an
    exact classical joint over string pairs, with D the Hamming distance."""
    joint = np.asarray(joint_xy, dtype=float)
    size = 2**n
    if joint.shape != (size, size):
        raise BadSplitError(f"joint must be {size} x {size} for n = {n}")
    if abs(joint.sum() - 1.0) > 1e-9 or joint.min() < -1e-12:
        raise ValidationError("joint is not a probability table")
    h_xy = _xlog2x_sum(joint.reshape(-1))
    h_y = _xlog2x_sum(joint.sum(axis=0))
    # D is a function of (X, Y): group (Y, D) cells
    dist = hamming_table(n)
    p_yd = np.zeros((size, n + 1))
    for d in range(n + 1):
        p_yd[:, d] = (joint * (dist == d)).sum(axis=0)
    h_yd = _xlog2x_sum(p_yd.reshape(-1))
    h_x_given_y = h_xy - h_y
    h_x_given_yd = h_xy - h_yd  # H(X,Y,D) = H(X,Y) since D is determined
    side = math.log2(n + 1)
    return DistanceConditioningReport(
        h_x_given_y=h_x_given_y,
        h_x_given_yd=h_x_given_yd,
        side_information=side,
        ok_monotone=bool(h_x_given_yd <= h_x_given_y + tol),
        ok_recover=bool(h_x_given_y <= h_x_given_yd + side + tol),
    )


def cq_state_to_json_dict(cq: CqState) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "probs": [float(p) for p in cq.probs],
        "states": [matrix_to_reim(s.mat) for s in cq.states],
    }
