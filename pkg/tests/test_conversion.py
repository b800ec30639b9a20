import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qraclab.conversion as cv
from qraclab.compression import FAIL_INDEX, build_scheme, run_protocol
from qraclab.errors import (
    BadShiftError,
    DerandomizationFailedError,
    DomainError,
    SizeCapError,
)
from qraclab.linalg import DensityMatrix, Povm
from qraclab.pgm import build_pgm
from qraclab.qrac import (
    Ensemble,
    Qrac,
    build_identity_encoding,
    build_random_qrac,
    build_standard_2to1,
    build_tensor_power,
)


def uniform_pgm(q, full=True):
    return build_pgm(Ensemble.uniform(q), full_table=full)


class TestShift:
    def test_worked_example(self):
        assert cv.shift_bits(0b011, 1, 3) == 0b110

    def test_full_rotation_is_identity(self):
        for x in range(16):
            assert cv.shift_bits(x, 4, 4) == x

    def test_inverse_property_exhaustive(self):
        n = 4
        for d in range(1, n + 1):
            for x in range(2**n):
                assert cv.unshift_bits(cv.shift_bits(x, d, n), d, n) == x
                assert cv.shift_bits(cv.unshift_bits(x, d, n), d, n) == x

    def test_bad_shift_rejected(self):
        with pytest.raises(BadShiftError):
            cv.shift_bits(0b01, 0, 2)
        with pytest.raises(BadShiftError):
            cv.shift_bits(0b01, 3, 2)
        with pytest.raises(DomainError):
            cv.shift_bits(4, 1, 2)

    @given(st.integers(min_value=1, max_value=10), st.data())
    @settings(max_examples=60, deadline=None)
    def test_rotation_bijection(self, n, data):
        d = data.draw(st.integers(min_value=1, max_value=n))
        x = data.draw(st.integers(min_value=0, max_value=2**n - 1))
        y = cv.shift_bits(x, d, n)
        assert 0 <= y < 2**n
        assert cv.unshift_bits(y, d, n) == x
        # rotation preserves weight
        assert bin(y).count("1") == bin(x).count("1")


class TestSharedShift:
    def test_apply_then_invert_is_identity(self):
        n = 3
        for r in range(8):
            for d in range(1, 4):
                s = cv.SharedShift(r, d, n)
                for x in range(8):
                    assert s.invert(s.apply(x)) == x
                    assert s.apply(s.invert(x)) == x

    def test_perm_array_matches_scalar(self):
        s = cv.SharedShift(r=0b101, d=2, n=3)
        perm = cv.perm_array(s)
        for z in range(8):
            assert perm[z] == s.apply(z)

    def test_validation(self):
        with pytest.raises(BadShiftError):
            cv.SharedShift(r=0, d=0, n=3)
        with pytest.raises(DomainError):
            cv.SharedShift(r=8, d=1, n=3)


class TestSymmetrizedRoundtrip:
    def test_identity_code_returns_input(self):
        q = build_identity_encoding(3)
        pgm = uniform_pgm(q)
        for s in [cv.SharedShift(5, 2, 3), cv.SharedShift(0, 3, 3), cv.SharedShift(7, 1, 3)]:
            for x in (0b000, 0b101, 0b110):
                dist = cv.symmetrized_roundtrip(q, x, s, pgm)
                expected = np.zeros(8)
                expected[x] = 1.0
                np.testing.assert_allclose(dist, expected, atol=1e-9)

    def test_matches_bruteforce_unshift_xor(self):
        q = build_random_qrac(2, 2, seed=0)
        pgm = uniform_pgm(q)
        s = cv.SharedShift(r=0b01, d=1, n=2)
        x = 0b10
        dist = cv.symmetrized_roundtrip(q, x, s, pgm)
        probs = pgm.full.probabilities(q.encoder[s.apply(x)])
        brute = np.zeros(4)
        for y_prime in range(4):
            brute[s.invert(y_prime)] += probs[y_prime]
        np.testing.assert_allclose(dist, brute, atol=1e-12)

    def test_standard_code_per_bit_averaged_over_all_s(self):
        q = build_standard_2to1()
        pgm = uniform_pgm(q)
        all_s = [cv.SharedShift(r, d, 2) for r in range(4) for d in (1, 2)]
        for x in range(4):
            hit = np.zeros(2)
            for s in all_s:
                dist = cv.symmetrized_roundtrip(q, x, s, pgm)
                for i in (1, 2):
                    mask = np.array(
                        [(y >> (2 - i)) & 1 == (x >> (2 - i)) & 1 for y in range(4)]
                    )
                    hit[i - 1] += dist[mask].sum()
            np.testing.assert_allclose(hit / len(all_s), [0.75, 0.75], atol=1e-9)

    def test_distribution_normalized(self):
        q = build_random_qrac(3, 2, seed=29)
        pgm = uniform_pgm(q)
        s = cv.SharedShift(3, 2, 3)
        for x in range(8):
            dist = cv.symmetrized_roundtrip(q, x, s, pgm)
            assert dist.min() >= 0.0
            np.testing.assert_allclose(dist.sum(), 1.0, atol=1e-12)


class TestPerBitSuccess:
    def test_standard_is_three_quarters_exactly_at_floor(self):
        q = build_standard_2to1()
        value = cv.per_bit_success_symmetrized(q)
        np.testing.assert_allclose(value, 0.75, atol=1e-12)
        p = q.claimed_p
        np.testing.assert_allclose(1 - 2 * p * (1 - p), 0.75, atol=1e-12)

    def test_identity_is_one(self):
        assert cv.per_bit_success_symmetrized(build_identity_encoding(3)) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_tensor_square_is_three_quarters(self):
        q = build_tensor_power(build_standard_2to1(), 2)
        np.testing.assert_allclose(cv.per_bit_success_symmetrized(q), 0.75, atol=1e-9)

    def test_sampled_average_constant_over_x_and_i(self):
        # full shift set: every (x, i) pair sees exactly the same error
        for seed in (0, 29):
            q = build_random_qrac(2 if seed == 0 else 3, 2, seed=seed)
            pgm = uniform_pgm(q, full=False)
            err = cv.per_bit_error_table(q, pgm)
            n = q.n
            all_s = [
                cv.SharedShift(r, d, n) for r in range(2**n) for d in range(1, n + 1)
            ]
            avg = cv._sampled_error_mean(err, all_s, n)
            np.testing.assert_allclose(avg, err.mean(), atol=1e-9)
            np.testing.assert_allclose(
                1 - err.mean(), cv.per_bit_success_symmetrized(q), atol=1e-12
            )


class TestEffectiveChannel:
    def test_identity_code_gives_identity_channel(self):
        q = build_identity_encoding(2)
        ch = cv.effective_channel(q, cv.SharedShift(2, 1, 2))
        np.testing.assert_allclose(ch.table, np.eye(4), atol=1e-9)

    def test_standard_code_capacity_below_message_size(self):
        q = build_standard_2to1()
        pgm = uniform_pgm(q)
        from qraclab.info import max_channel_capacity

        for r in range(4):
            for d in (1, 2):
                ch = cv.effective_channel(q, cv.SharedShift(r, d, 2), pgm)
                assert max_channel_capacity(ch).value <= 1 + 1e-9
                np.testing.assert_allclose(ch.table.sum(axis=1), np.ones(4), atol=1e-12)

    def test_capacity_invariant_under_s(self):
        from qraclab.info import max_channel_capacity

        q = build_random_qrac(3, 2, seed=29)
        pgm = uniform_pgm(q)
        values = [
            max_channel_capacity(cv.effective_channel(q, cv.SharedShift(r, d, 3), pgm)).value
            for r, d in [(0, 1), (5, 2), (7, 3), (2, 1)]
        ]
        np.testing.assert_allclose(values, values[0], atol=1e-9)

    def test_size_cap(self):
        mixed = DensityMatrix.maximally_mixed(2)
        coin = Povm((np.eye(2) / 2, np.eye(2) / 2), outcomes=(0, 1))
        q9 = Qrac(n=9, m=1, encoder=(mixed,) * 512, decoders=(coin,) * 9, claimed_p=0.0)
        with pytest.raises(SizeCapError):
            cv.effective_channel(q9, cv.SharedShift(0, 1, 9))


class TestNewmanSet:
    def test_size_formula(self):
        s = cv.sample_newman_set(4, eta=0.5, seed=0, c_newman=8)
        assert len(s) == 128

    def test_reproducible_and_attempt_dependent(self):
        a = cv.sample_newman_set(3, 0.4, seed=11)
        b = cv.sample_newman_set(3, 0.4, seed=11)
        assert a == b
        c = cv.sample_newman_set(3, 0.4, seed=11, attempt=1)
        assert a != c

    def test_elements_in_range(self):
        for s in cv.sample_newman_set(5, 0.6, seed=2):
            assert 1 <= s.d <= 5
            assert 0 <= s.r < 32
            assert s.n == 5

    def test_eta_domain(self):
        with pytest.raises(DomainError):
            cv.sample_newman_set(3, 0.0, seed=0)


class TestBadEventAudit:
    def test_full_set_has_zero_margins(self):
        q = build_random_qrac(2, 2, seed=0)
        all_s = [cv.SharedShift(r, d, 2) for r in range(4) for d in (1, 2)]
        report = cv.verify_no_bad_event(q, all_s, eta=0.1)
        assert report.ok
        np.testing.assert_allclose(report.worst_margin, 0.0, atol=1e-12)
        assert report.offending == ()

    def test_identity_code_any_set_ok(self):
        q = build_identity_encoding(3)
        s_set = cv.sample_newman_set(3, 0.3, seed=4)[:10]
        report = cv.verify_no_bad_event(q, s_set, eta=0.3)
        assert report.ok
        np.testing.assert_allclose(report.worst_margin, 0.0, atol=1e-12)
        np.testing.assert_allclose(report.uniform_error, 0.0, atol=1e-12)

    def test_standard_code_twenty_seeds(self):
        q = build_standard_2to1()
        for seed in range(20):
            s_set = cv.sample_newman_set(2, 0.3, seed=seed)
            report = cv.verify_no_bad_event(q, s_set, eta=0.3)
            assert report.ok

    def test_single_sample_margin_is_table_spread(self):
        # for |S| = 1 the worst margin is exactly max(err) - mean(err),
        # whatever the shift: relabeling permutes the table
        q = build_random_qrac(3, 2, seed=29)
        pgm = uniform_pgm(q, full=False)
        err = cv.per_bit_error_table(q, pgm)
        expected = err.max() - err.mean()
        for s in [cv.SharedShift(0, 1, 3), cv.SharedShift(6, 3, 3)]:
            report = cv.verify_no_bad_event(q, [s], eta=0.2)
            np.testing.assert_allclose(report.worst_margin, expected, atol=1e-12)

    def test_offending_pairs_reported(self):
        q = build_random_qrac(3, 2, seed=29)
        report = cv.verify_no_bad_event(q, [cv.SharedShift(0, 1, 3)], eta=0.01)
        assert not report.ok
        assert len(report.offending) >= 1
        for x, i in report.offending:
            assert 0 <= x < 8
            assert 1 <= i <= 3


class TestBuildRac:
    def test_identity_n3(self):
        q = build_identity_encoding(3)
        cb = cv.build_rac(q, eta=0.2, seed=1)
        assert cb.size_s == math.ceil(8 * 3 / 0.04)
        assert cb.index_bits_s == math.ceil(math.log2(cb.size_s))
        assert cb.total_message_bits == cb.index_bits_s + max(
            sc.index_bits for sc in cb.schemes
        )
        val = cv.validate_rac(cb, q)
        assert val.ok
        # success only dips by the compression failure chance
        assert val.min_success >= 1 - 0.2 / 2

    def test_standard_code(self):
        q = build_standard_2to1()
        cb = cv.build_rac(q, eta=0.2, seed=3)
        val = cv.validate_rac(cb, q)
        assert val.ok
        assert val.min_success >= 0.75 - 0.2 - 1e-9
        assert val.floor == pytest.approx(0.75 - 0.2, abs=1e-12)

    def test_message_budget(self):
        for q, eta in [
            (build_standard_2to1(), 0.2),
            (build_identity_encoding(3), 0.3),
            (build_tensor_power(build_standard_2to1(), 2), 0.3),
        ]:
            cb = cv.build_rac(q, eta=eta, seed=0)
            budget = (
                q.m
                + math.ceil(math.log2(cb.size_s))
                + math.ceil(math.log2(math.log(2 / eta)))
                + 2
            )
            assert cb.total_message_bits <= budget

    def test_single_shift_set_on_symmetric_code(self):
        # the standard code's error table is flat, so even |S| = 1 clears the
        # audit; exercises the ceil(log2(1)) = 0 edge
        q = build_standard_2to1()
        cb = cv.build_rac(q, eta=0.2, seed=5, c_newman=1e-9)
        assert cb.size_s == 1
        assert cb.index_bits_s == 0
        assert cv.validate_rac(cb, q).ok

    def test_derandomization_failure_raises(self):
        # |S| = 1 on a lopsided code: the single-sample margin equals the
        # table spread no matter which s comes out, so every attempt fails
        q = build_random_qrac(3, 2, seed=29)
        with pytest.raises(DerandomizationFailedError) as exc_info:
            cv.build_rac(q, eta=0.2, seed=0, c_newman=1e-9)
        assert exc_info.value.worst_margin > 0.1

    def test_eta_domain_and_size_cap(self):
        q = build_standard_2to1()
        with pytest.raises(DomainError):
            cv.build_rac(q, eta=0.0, seed=0)
        mixed = DensityMatrix.maximally_mixed(2)
        coin = Povm((np.eye(2) / 2, np.eye(2) / 2), outcomes=(0, 1))
        q7 = Qrac(n=7, m=1, encoder=(mixed,) * 128, decoders=(coin,) * 7, claimed_p=0.0)
        with pytest.raises(SizeCapError):
            cv.build_rac(q7, eta=0.3, seed=0)

    def test_json_dict(self):
        q = build_standard_2to1()
        cb = cv.build_rac(q, eta=0.3, seed=2)
        d = cb.to_json_dict()
        assert d["n"] == 2 and d["m"] == 1
        assert len(d["s_set"]) == cb.size_s
        assert len(d["schemes"]) == cb.size_s
        assert all(len(sc["channel_sha256"]) == 64 for sc in d["schemes"])
        assert d["total_message_bits"] == cb.total_message_bits


class TestValidateRac:
    def test_negative_control_single_adversarial_shift(self):
        # without averaging over shifts the per-(x, i) success varies; the
        # honest codebook's table is nearly flat by comparison
        q = build_random_qrac(3, 2, seed=29)
        cb = cv.build_rac(q, eta=0.2, seed=7)
        honest = cv.validate_rac(cb, q)
        s_adv = cv.SharedShift(0, 1, 3)
        scheme = build_scheme(cv.effective_channel(q, s_adv), 0.1)
        rigged = dataclasses.replace(
            cb, s_set=(s_adv,), schemes=(scheme,), index_bits_s=0,
            total_message_bits=scheme.index_bits,
        )
        adversarial = cv.validate_rac(rigged, q)
        spread_adv = float(adversarial.table.max() - adversarial.table.min())
        spread_honest = float(honest.table.max() - honest.table.min())
        assert spread_adv > 0.1
        assert spread_adv > 3 * spread_honest
        assert adversarial.min_success < honest.min_success

    def test_table_shape_and_argmin(self):
        q = build_standard_2to1()
        cb = cv.build_rac(q, eta=0.2, seed=3)
        val = cv.validate_rac(cb, q)
        assert val.table.shape == (2, 4)
        x, i = val.argmin
        assert val.table[i - 1, x] == pytest.approx(val.min_success, abs=0)

    def test_csv_layout(self):
        q = build_standard_2to1()
        cb = cv.build_rac(q, eta=0.3, seed=3)
        text = cv.validate_rac(cb, q).to_csv()
        lines = text.split("\r\n")
        assert lines[0] == "x,i,success"
        assert len(lines) == 2 + 4 * 2  # header + 8 rows + trailing terminator
        assert lines[1].startswith("00,1,")


class TestEncodeDecode:
    def test_identity_code_decodes_exactly_on_acceptance(self):
        q = build_identity_encoding(3)
        cb = cv.build_rac(q, eta=0.2, seed=1)
        x = 0b101
        for rep in range(40):
            msg = cv.rac_encode(cb, x, shared_seed=9, replicate=rep)
            assert msg.total_bits == cb.total_message_bits
            if msg.sent_index != FAIL_INDEX:
                got = [cv.rac_decode(cb, msg, i, 9, rep) for i in (1, 2, 3)]
                assert got == [1, 0, 1]

    def test_decode_matches_protocol_transcript(self):
        q = build_standard_2to1()
        cb = cv.build_rac(q, eta=0.2, seed=3)
        x = 0b10
        for rep in range(30):
            msg = cv.rac_encode(cb, x, shared_seed=21, replicate=rep)
            run = run_protocol(
                cb.schemes[msg.s_index], x, 21,
                replicate=rep, stream_path=(msg.s_index, rep),
            )
            assert run.sent_index == msg.sent_index
            for i in (1, 2):
                assert cv.rac_decode(cb, msg, i, 21, rep) == (run.output_y >> (2 - i)) & 1

    def test_encode_deterministic(self):
        q = build_standard_2to1()
        cb = cv.build_rac(q, eta=0.3, seed=3)
        a = cv.rac_encode(cb, 2, shared_seed=5, replicate=7)
        b = cv.rac_encode(cb, 2, shared_seed=5, replicate=7)
        assert a == b

    def test_empirical_success_tracks_exact_table(self):
        q = build_standard_2to1()
        cb = cv.build_rac(q, eta=0.2, seed=3)
        val = cv.validate_rac(cb, q)
        x = 0b01
        reps = 3000
        hits = np.zeros(2)
        for rep in range(reps):
            msg = cv.rac_encode(cb, x, shared_seed=33, replicate=rep)
            for i in (1, 2):
                hits[i - 1] += cv.rac_decode(cb, msg, i, 33, rep) == (x >> (2 - i)) & 1
        emp = hits / reps
        for i in range(2):
            exact = val.table[i, x]
            sigma = math.sqrt(exact * (1 - exact) / reps)
            assert abs(emp[i] - exact) <= 4 * sigma

    def test_decode_rejects_bad_bit_index(self):
        q = build_standard_2to1()
        cb = cv.build_rac(q, eta=0.3, seed=3)
        msg = cv.rac_encode(cb, 1, shared_seed=0)
        with pytest.raises(DomainError):
            cv.rac_decode(cb, msg, 0, 0)
        with pytest.raises(DomainError):
            cv.rac_decode(cb, msg, 3, 0)
