"""Random access code model: encoders, per-bit decoders, validation.

A code stores one density matrix per n-bit string and one two-outcome
measurement per bit position, together with the success probability it
claims to guarantee on every (string, bit) pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .bits import bit_at, bit_column
from .errors import SizeCapError, ValidationError
from .linalg import DIM_CAP, DensityMatrix, Povm, check_dim_cap, tensor
from .rng import stream
from .serialize import SCHEMA_VERSION, matrix_to_reim, reim_to_matrix

# Worst-case success of the two-decoder single-qubit code on which most
# worked values in the tests are based.
P_STANDARD = float(np.cos(np.pi / 8) ** 2)


@dataclass
class Qrac:
    """An (n, m, p) random access code with explicit per-bit decoders."""

    n: int
    m: int
    encoder: tuple[DensityMatrix, ...]
    decoders: tuple[Povm, ...]
    claimed_p: float
    tol: float = field(default=1e-9, repr=False)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValidationError("n and m must be positive")
        check_dim_cap(2**self.m)
        if len(self.encoder) != 2**self.n:
            raise ValidationError(f"encoder needs {2**self.n} states, got {len(self.encoder)}")
        dim = 2**self.m
        for rho in self.encoder:
            if rho.dim != dim:
                raise ValidationError("encoder state dimension differs from 2^m")
        if len(self.decoders) != self.n:
            raise ValidationError(f"one decoder per bit required, got {len(self.decoders)}")
        for dec in self.decoders:
            if dec.dim != dim:
                raise ValidationError("decoder dimension differs from 2^m")
            if dec.outcomes != (0, 1):
                raise ValidationError("decoders must have outcomes (0, 1)")
        self.encoder = tuple(self.encoder)
        self.decoders = tuple(self.decoders)
        worst = success_table(self).min()
        if worst < self.claimed_p - self.tol:
            raise ValidationError(
                f"claimed success {self.claimed_p} not met: worst pair achieves {worst}"
            )

    @property
    def dim(self) -> int:
        return 2**self.m

    @cached_property
    def state_stack(self) -> np.ndarray:
        """All encoder states as one (2^n, dim, dim) array."""
        return np.stack([rho.mat for rho in self.encoder])


def success_table(q: Qrac) -> np.ndarray:
    """(n, 2^n) table of Tr(M^{(i)}_{x_i} rho_x) over bit positions and strings."""
    stack = np.stack([rho.mat for rho in q.encoder])
    out = np.empty((q.n, 2**q.n))
    for i in range(1, q.n + 1):
        m0 = q.decoders[i - 1].elements[0]
        p0 = np.einsum("ij,xji->x", m0, stack).real
        col = bit_column(i, q.n)
        out[i - 1] = np.where(col == 0, p0, 1.0 - p0)
    return out


@dataclass(frozen=True)
class QracValidation:
    worst_case_p: float
    offending: tuple[tuple[int, int], ...]  # (bit index, string index) pairs
    degenerate: bool


def validate_qrac(q: Qrac, tol: float = 1e-9) -> QracValidation:
    """Re-measure the worst-case success and list pairs below the claim.

    Codes whose worst pair does no better than a coin flip are flagged
    degenerate instead of rejected.
    """
    table = success_table(q)
    worst = float(table.min())
    bad = np.argwhere(table < q.claimed_p - tol)
    offending = tuple((int(i) + 1, int(x)) for i, x in bad)
    return QracValidation(worst, offending, degenerate=worst <= 0.5)


@dataclass(frozen=True)
class Ensemble:
    """A prior over n-bit strings paired with the states that encode them."""

    prior: np.ndarray
    states: tuple[DensityMatrix, ...]

    def __post_init__(self):
        prior = np.asarray(self.prior, dtype=float)
        size = len(self.states)
        if size < 2 or size & (size - 1):
            raise ValidationError(f"number of states must be a power of two >= 2, got {size}")
        if prior.shape != (size,):
            raise ValidationError("prior length differs from number of states")
        if prior.min() < 0:
            raise ValidationError("prior has negative entries")
        if abs(prior.sum() - 1.0) > 1e-12:
            raise ValidationError(f"prior sums to {prior.sum()}, not 1")
        dim = self.states[0].dim
        for st in self.states:
            if st.dim != dim:
                raise ValidationError("ensemble states differ in dimension")
        prior = prior.copy()
        prior.flags.writeable = False
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def n(self) -> int:
        return int(np.log2(len(self.states)))

    @property
    def dim(self) -> int:
        return self.states[0].dim

    @classmethod
    def uniform(cls, q: Qrac) -> "Ensemble":
        return cls(np.full(2**q.n, 2.0**-q.n), q.encoder)

    @classmethod
    def from_qrac(cls, q: Qrac, prior) -> "Ensemble":
        return cls(np.asarray(prior, dtype=float), q.encoder)

    def average_state(self) -> np.ndarray:
        stack = np.stack([st.mat for st in self.states])
        return np.einsum("x,xij->ij", self.prior, stack)


# ---------------------------------------------------------------------------
# constructors


def build_standard_2to1() -> Qrac:
    """The two-bit, one-qubit code with worst-case success cos^2(pi/8).

    Strings 0b sit at angle +-pi/8 around |0>, strings 1b around |1>; the
    first bit is read in the computational basis, the second in the
    Hadamard basis.
    """
    c, s = np.cos(np.pi / 8), np.sin(np.pi / 8)
    vecs = {
        0b00: [c, s],
        0b01: [c, -s],
        0b10: [s, c],
        0b11: [-s, c],
    }
    encoder = tuple(DensityMatrix.from_state_vector(vecs[x]) for x in range(4))
    basis0 = Povm((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), outcomes=(0, 1))
    plus = np.full((2, 2), 0.5)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]])
    basis_h = Povm((plus, minus), outcomes=(0, 1))
    return Qrac(2, 1, encoder, (basis0, basis_h), claimed_p=P_STANDARD)


def build_identity_encoding(n: int) -> Qrac:
    """n bits into n qubits via computational basis states; decoders read bits off."""
    if n > 10:
        raise SizeCapError(f"identity encoding capped at n = 10, got {n}")
    dim = 2**n
    encoder = tuple(
        DensityMatrix(np.diag((np.arange(dim) == x).astype(complex))) for x in range(dim)
    )
    decoders = []
    for i in range(1, n + 1):
        col = bit_column(i, n)
        m0 = np.diag((col == 0).astype(complex))
        decoders.append(Povm((m0, np.eye(dim) - m0), outcomes=(0, 1)))
    return Qrac(n, n, encoder, tuple(decoders), claimed_p=1.0)


def build_tensor_power(base: Qrac, k: int) -> Qrac:
    """Concatenate k independent blocks of ``base`` into one code.

    Block j covers global bits (j-1)*n+1 .. j*n; its decoder acts on the
    j-th tensor factor and is padded with identities elsewhere.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    if k * base.n > 16:
        raise SizeCapError(f"tensor power capped at k*n <= 16, got {k * base.n}")
    check_dim_cap(2 ** (k * base.m))
    n, m = k * base.n, k * base.m
    block_dim = base.dim
    encoder = []
    for x in range(2**n):
        mat = np.array([[1.0 + 0j]])
        for j in range(k):
            block = (x >> (base.n * (k - 1 - j))) & (2**base.n - 1)
            mat = tensor(mat, base.encoder[block].mat)
        encoder.append(DensityMatrix(mat))
    decoders = []
    for i in range(1, n + 1):
        j = (i - 1) // base.n  # block holding bit i
        local = base.decoders[(i - 1) % base.n]
        left = np.eye(block_dim**j)
        right = np.eye(block_dim ** (k - 1 - j))
        elems = tuple(tensor(tensor(left, e), right) for e in local.elements)
        decoders.append(Povm(elems, outcomes=(0, 1)))
    return Qrac(n, m, tuple(encoder), tuple(decoders), claimed_p=base.claimed_p)


def build_random_qrac(n: int, m: int, seed: int) -> Qrac:
    """Haar-random pure-state encoder with per-bit Helstrom decoders.

    The claimed success is the measured worst case over (bit, string)
    pairs, so the returned object always validates; codes that land at or
    below 1/2 are still returned and flagged by validate_qrac.
    """
    if n > 12 or m > 6:
        raise SizeCapError(f"random codes capped at n <= 12, m <= 6, got ({n}, {m})")
    from .pgm import helstrom_measurement  # deferred: pgm builds on this module

    dim = 2**m
    rng = stream(seed, 0)
    encoder = []
    for _ in range(2**n):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        encoder.append(DensityMatrix.from_state_vector(v))
    stack = np.stack([rho.mat for rho in encoder])
    decoders = []
    for i in range(1, n + 1):
        col = bit_column(i, n)
        rho0 = stack[col == 0].mean(axis=0)
        rho1 = stack[col == 1].mean(axis=0)
        decoders.append(helstrom_measurement(0.5, rho0, 0.5, rho1))
    probe = Qrac(n, m, tuple(encoder), tuple(decoders), claimed_p=0.0)
    worst = float(success_table(probe).min())
    return Qrac(n, m, tuple(encoder), tuple(decoders), claimed_p=worst)


# ---------------------------------------------------------------------------
# serialization


def qrac_to_json_dict(q: Qrac) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": q.n,
        "m": q.m,
        "claimed_p": q.claimed_p,
        "encoder": [matrix_to_reim(rho.mat) for rho in q.encoder],
        "decoders": [[matrix_to_reim(e) for e in dec.elements] for dec in q.decoders],
    }


def qrac_from_json_dict(data: dict) -> Qrac:
    encoder = tuple(DensityMatrix(reim_to_matrix(mat)) for mat in data["encoder"])
    decoders = tuple(
        Povm(tuple(reim_to_matrix(e) for e in dec), outcomes=(0, 1)) for dec in data["decoders"]
    )
    return Qrac(int(data["n"]), int(data["m"]), encoder, decoders, float(data["claimed_p"]))
