import numpy as np
import pytest

from qraclab.errors import DomainError, IndexOutOfRangeError, ValidationError
from qraclab.linalg import DensityMatrix, Povm, support_projector
from qraclab.pgm import (
    PgmBundle,
    build_pgm,
    check_pgm_lower_bound,
    helstrom_measurement,
    helstrom_pmax,
    per_bit_success,
    success_prob_full,
)
from qraclab.qrac import (
    P_STANDARD,
    Ensemble,
    build_identity_encoding,
    build_standard_2to1,
)

C = np.cos(np.pi / 8)
S = np.sin(np.pi / 8)


def random_density(rng, dim, pure=False):
    if pure:
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return DensityMatrix.from_state_vector(v)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return DensityMatrix(rho / rho.trace())


def two_state_ensemble(seed, dim):
    rng = np.random.default_rng(seed)
    p0 = rng.uniform(0.05, 0.95)
    states = (random_density(rng, dim, pure=bool(rng.integers(2))), random_density(rng, dim))
    return Ensemble(np.array([p0, 1 - p0]), states)


def bit_ensemble(q, i):
    """Uniform-prior mixture ensemble for bit i of a code."""
    from qraclab.bits import bit_column

    col = bit_column(i, q.n)
    stack = q.state_stack
    rho0 = DensityMatrix(stack[col == 0].mean(axis=0))
    rho1 = DensityMatrix(stack[col == 1].mean(axis=0))
    return Ensemble(np.array([0.5, 0.5]), (rho0, rho1))


class TestBuildPgm:
    def test_standard_code_elements_are_half_states(self):
        q = build_standard_2to1()
        pg = build_pgm(Ensemble.uniform(q), full_table=True)
        for y in range(4):
            np.testing.assert_allclose(
                pg.full.elements[y], q.encoder[y].mat / 2, atol=1e-12
            )

    def test_identity_encoding_gives_basis_measurement(self):
        q = build_identity_encoding(2)
        pg = build_pgm(Ensemble.uniform(q), full_table=True)
        for y in range(4):
            expect = np.zeros((4, 4))
            expect[y, y] = 1.0
            np.testing.assert_allclose(pg.full.elements[y], expect, atol=1e-12)

    def test_point_prior_support_completion(self):
        # all mass on one pure state: its raw outcome is the support
        # projector and the off-support remainder is folded into outcome 0
        q = build_standard_2to1()
        e = Ensemble(np.array([1.0, 0.0, 0.0, 0.0]), q.encoder)
        pg = build_pgm(e, full_table=True)
        proj = support_projector(q.encoder[0].mat)
        assert np.linalg.matrix_rank(proj, tol=1e-8) == 1
        np.testing.assert_allclose(pg.full.elements[0], np.eye(2), atol=1e-9)
        for y in range(1, 4):
            np.testing.assert_allclose(pg.full.elements[y], np.zeros((2, 2)), atol=1e-9)

    def test_repeated_state_raw_outcome_is_scaled_projector(self):
        # two copies of the same pure state: each raw sandwich is half the
        # support projector, completion tops up outcome 0
        rho = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
        e = Ensemble(np.array([0.5, 0.5]), (rho, rho))
        pg = build_pgm(e, full_table=True)
        np.testing.assert_allclose(
            pg.full.elements[1], np.diag([0.5, 0.0]), atol=1e-12
        )
        np.testing.assert_allclose(
            pg.full.elements[0], np.diag([0.5, 1.0]), atol=1e-12
        )

    @pytest.mark.parametrize("seed", range(10))
    def test_marginals_match_full_table_sums(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        states = tuple(random_density(rng, 4, pure=bool(rng.integers(2))) for _ in range(2**n))
        prior = rng.dirichlet(np.ones(2**n))
        e = Ensemble(prior, states)
        pg = build_pgm(e, full_table=True)
        from qraclab.bits import bit_column

        for i in range(1, n + 1):
            col = bit_column(i, n)
            for b in (0, 1):
                direct = pg.marginals[i - 1].elements[b]
                summed = sum(pg.full.elements[y] for y in range(2**n) if col[y] == b)
                np.testing.assert_allclose(direct, summed, atol=1e-8)

    @pytest.mark.parametrize("seed", range(10))
    def test_one_bit_pgm_identity(self, seed):
        # the PGM of the induced two-state bit ensemble equals the bit
        # marginals of the full-ensemble PGM
        q = build_standard_2to1() if seed == 0 else None
        if q is None:
            from qraclab.qrac import build_random_qrac

            q = build_random_qrac(2, 2, seed=seed)
        e = Ensemble.uniform(q)
        pg = build_pgm(e)
        for i in (1, 2):
            direct = build_pgm(bit_ensemble(q, i))
            for b in (0, 1):
                np.testing.assert_allclose(
                    pg.marginals[i - 1].elements[b],
                    direct.marginals[0].elements[b],
                    atol=1e-8,
                )


class TestSuccessProbs:
    def test_standard_full_success_half(self):
        q = build_standard_2to1()
        e = Ensemble.uniform(q)
        pg = build_pgm(e, full_table=True)
        assert success_prob_full(e, pg) == pytest.approx(0.5, abs=1e-12)

    def test_standard_per_bit_three_quarters(self):
        q = build_standard_2to1()
        e = Ensemble.uniform(q)
        pg = build_pgm(e)
        assert per_bit_success(e, pg, 1) == pytest.approx(0.75, abs=1e-12)
        assert per_bit_success(e, pg, 2) == pytest.approx(0.75, abs=1e-12)

    def test_identity_perfect(self):
        q = build_identity_encoding(2)
        e = Ensemble.uniform(q)
        pg = build_pgm(e, full_table=True)
        assert success_prob_full(e, pg) == pytest.approx(1.0, abs=1e-12)
        assert per_bit_success(e, pg, 1) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_bit_prior_reports_one(self):
        q = build_standard_2to1()
        # prior supported on {00, 01}: bit 1 is constant
        e = Ensemble(np.array([0.7, 0.3, 0.0, 0.0]), q.encoder)
        pg = build_pgm(e)
        assert per_bit_success(e, pg, 1) == 1.0
        assert per_bit_success(e, pg, 2) < 1.0

    def test_index_out_of_range(self):
        q = build_standard_2to1()
        e = Ensemble.uniform(q)
        pg = build_pgm(e)
        with pytest.raises(IndexOutOfRangeError):
            per_bit_success(e, pg, 3)
        with pytest.raises(IndexOutOfRangeError):
            per_bit_success(e, pg, 0)

    def test_full_table_required(self):
        q = build_standard_2to1()
        e = Ensemble.uniform(q)
        pg = build_pgm(e)
        with pytest.raises(ValidationError):
            success_prob_full(e, pg)


class TestHelstrom:
    def test_orthogonal_states(self):
        assert helstrom_pmax(0.5, np.diag([1.0, 0.0]), 0.5, np.diag([0.0, 1.0])) == pytest.approx(
            1.0
        )

    def test_identical_states_give_max_prior(self):
        rho = np.eye(2) / 2
        assert helstrom_pmax(0.3, rho, 0.7, rho) == pytest.approx(0.7, abs=1e-12)

    def test_standard_bit_ensemble_value(self):
        q = build_standard_2to1()
        e = bit_ensemble(q, 1)
        got = helstrom_pmax(0.5, e.states[0].mat, 0.5, e.states[1].mat)
        assert got == pytest.approx(P_STANDARD, abs=1e-12)

    def test_rejects_bad_priors(self):
        with pytest.raises(DomainError):
            helstrom_pmax(0.6, np.eye(2) / 2, 0.6, np.eye(2) / 2)

    @pytest.mark.parametrize("seed", range(15))
    def test_measurement_attains_value(self, seed):
        e = two_state_ensemble(seed, dim=4)
        p0, p1 = e.prior
        rho0, rho1 = e.states[0].mat, e.states[1].mat
        povm = helstrom_measurement(p0, rho0, p1, rho1)
        achieved = (
            p0 * np.einsum("ij,ji->", povm.elements[0], rho0).real
            + p1 * np.einsum("ij,ji->", povm.elements[1], rho1).real
        )
        assert achieved == pytest.approx(helstrom_pmax(p0, rho0, p1, rho1), abs=1e-10)

    @pytest.mark.parametrize("seed", range(15))
    def test_no_random_measurement_beats_it(self, seed):
        # independent check of optimality: random two-outcome measurements
        # never exceed the closed-form value
        rng = np.random.default_rng(1000 + seed)
        e = two_state_ensemble(seed, dim=3)
        p0, p1 = e.prior
        rho0, rho1 = e.states[0].mat, e.states[1].mat
        best = helstrom_pmax(p0, rho0, p1, rho1)
        for _ in range(200):
            g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            h = g @ g.conj().T
            m0 = h / (np.linalg.eigvalsh(h).max() + rng.uniform(0.01, 2.0))
            achieved = (
                p0 * np.einsum("ij,ji->", m0, rho0).real
                + p1 * np.einsum("ij,ji->", np.eye(3) - m0, rho1).real
            )
            assert achieved <= best + 1e-10


class TestLowerBound:
    def test_worked_false_case(self):
        assert not check_pgm_lower_bound(0.81, 0.9, 2)

    def test_worked_true_case(self):
        assert check_pgm_lower_bound(0.9, 0.9, 16)

    def test_standard_bit_ensemble_attains_equality(self):
        # p_max = cos^2(pi/8) gives p_max^2 + (1-p_max)^2 = 3/4 exactly
        q = build_standard_2to1()
        e = bit_ensemble(q, 1)
        pg = build_pgm(e, full_table=True)
        p_pgm = success_prob_full(e, pg)
        assert p_pgm == pytest.approx(0.75, abs=1e-12)
        assert p_pgm == pytest.approx(P_STANDARD**2 + (1 - P_STANDARD) ** 2, abs=1e-12)
        assert check_pgm_lower_bound(p_pgm, P_STANDARD, 2)

    @pytest.mark.parametrize("seed", range(50))
    def test_two_state_bound_holds(self, seed):
        dim = 2 if seed % 2 else 4
        e = two_state_ensemble(seed, dim)
        pg = build_pgm(e, full_table=True)
        p_pgm = success_prob_full(e, pg)
        p_max = helstrom_pmax(e.prior[0], e.states[0].mat, e.prior[1], e.states[1].mat)
        assert p_pgm >= p_max**2 + (1 - p_max) ** 2 - 1e-8
        assert p_pgm <= p_max + 1e-9  # square-root measurement never beats optimal

    def test_rejects_single_outcome(self):
        with pytest.raises(DomainError):
            check_pgm_lower_bound(1.0, 1.0, 1)


def test_bundle_is_dataclass_with_marginals():
    q = build_standard_2to1()
    pg = build_pgm(Ensemble.uniform(q))
    assert isinstance(pg, PgmBundle)
    assert pg.full is None and len(pg.marginals) == 2
    assert pg.marginals[0].outcomes == (0, 1)
