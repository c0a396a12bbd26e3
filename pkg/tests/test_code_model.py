import numpy as np
import pytest

from polarlist.code_model import (
    PuncturePattern,
    as_bits,
    bhattacharyya_parameters,
    build_code,
    construct_frozen_bhattacharyya,
    encode_systematic,
    format_frozen_text,
    load_frozen_file,
    load_puncture_file,
    make_payload,
    parse_frozen_text,
    polar_transform,
    save_frozen_file,
    save_puncture_file,
)
from polarlist.crc import PRESETS
from polarlist.errors import (
    FrozenCountMismatch,
    InfoLengthMismatch,
    InvalidDesignParameter,
    LengthMismatch,
    NonPowerOfTwoLength,
    NonPowerOfTwoN,
    ParseError,
    PunctureLengthMismatch,
)


def mask_from(n, frozen):
    m = np.zeros(n, dtype=np.uint8)
    m[list(frozen)] = 1
    return m


def kron_matrix(n):
    f = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.ones((1, 1), dtype=np.uint8)
    while g.shape[0] < n:
        g = np.kron(g, f) % 2
    return g


class TestBuildCode:
    def test_small_code_fields(self):
        code = build_code(4, 2, mask_from(4, [0, 1]))
        assert (code.n_codeword, code.k_info, code.rate) == (4, 2, 0.5)
        assert code.crc_spec is None
        assert list(code.info_positions) == [2, 3]

    def test_crc_needs_k_plus_c_free_positions(self):
        crc = PRESETS["32-GZIP"]
        mask = mask_from(2048, range(2048 - 1755))
        code = build_code(2048, 1723, mask, crc)
        assert code.n_payload == 1755
        assert code.rate == pytest.approx(1723 / 2048)

    def test_frozen_count_mismatch(self):
        with pytest.raises(FrozenCountMismatch):
            build_code(4, 3, mask_from(4, [0, 1]))

    def test_non_power_of_two(self):
        with pytest.raises(NonPowerOfTwoN):
            build_code(6, 2, np.zeros(6))

    def test_puncture_pattern_length_checked(self):
        with pytest.raises(PunctureLengthMismatch):
            build_code(8, 2, mask_from(8, range(6)), punct=PuncturePattern.from_string("TTTP"))

    def test_puncture_sets_transmitted_length_and_rate(self):
        punct = PuncturePattern.from_string("PTTTTTTS")
        code = build_code(8, 3, mask_from(8, range(5)), punct=punct)
        assert code.n_transmitted == 6
        assert code.rate == pytest.approx(3 / 6)

    def test_mask_is_read_only(self):
        code = build_code(4, 2, mask_from(4, [0, 1]))
        with pytest.raises(ValueError):
            code.frozen_mask[0] = 0


class TestConstruction:
    def test_hand_recursion_n4(self):
        z = bhattacharyya_parameters(4, 0.5)
        np.testing.assert_allclose(z, [0.9375, 0.5625, 0.4375, 0.0625])
        assert list(np.flatnonzero(construct_frozen_bhattacharyya(4, 2, 0.5))) == [0, 1]

    def test_one_step(self):
        np.testing.assert_allclose(bhattacharyya_parameters(2, 0.5), [0.75, 0.25])
        assert list(construct_frozen_bhattacharyya(2, 1, 0.5)) == [1, 0]

    def test_single_position(self):
        assert list(construct_frozen_bhattacharyya(1, 1, 0.5)) == [0]

    @pytest.mark.parametrize("n,kc", [(64, 32), (1024, 700), (256, 1), (256, 256)])
    def test_exact_frozen_count(self, n, kc):
        mask = construct_frozen_bhattacharyya(n, kc, 0.3)
        assert mask.sum() == n - kc

    def test_ties_freeze_lower_index(self):
        # with erasure 1 every Z is 1, so the lowest indices are frozen
        mask = construct_frozen_bhattacharyya(8, 3, 1.0 - 1e-16)
        assert list(np.flatnonzero(mask)) == [0, 1, 2, 3, 4]

    @pytest.mark.parametrize("eps", [0.0, 1.5, -0.1])
    def test_bad_erasure(self, eps):
        with pytest.raises(InvalidDesignParameter):
            construct_frozen_bhattacharyya(8, 4, eps)


class TestFiles:
    def test_parse_example(self):
        n, k, mask = parse_frozen_text("4 2\n1100")
        assert (n, k) == (4, 2)
        assert list(np.flatnonzero(mask)) == [0, 1]

    def test_short_mask(self):
        with pytest.raises(LengthMismatch):
            parse_frozen_text("4 2\n11")

    def test_bad_character_reports_line(self):
        with pytest.raises(ParseError) as err:
            parse_frozen_text("4 2\n11x0\n")
        assert err.value.line == 2

    def test_bad_header_reports_line(self):
        with pytest.raises(ParseError) as err:
            parse_frozen_text("four two\n1100\n")
        assert err.value.line == 1

    def test_round_trip_1024(self, tmp_path):
        rng = np.random.default_rng(3)
        mask = rng.integers(0, 2, 1024).astype(np.uint8)
        path = tmp_path / "frozen.txt"
        save_frozen_file(path, (1024, int(1024 - mask.sum()), mask))
        n, loaded = load_frozen_file(path)
        assert n == 1024
        np.testing.assert_array_equal(loaded, mask)

    def test_format_text(self):
        assert format_frozen_text(4, 2, [1, 1, 0, 0]) == "4 2\n1100\n"

    def test_puncture_round_trip(self, tmp_path):
        pat = PuncturePattern.from_string("TTPSTTTT")
        path = tmp_path / "p.txt"
        save_puncture_file(path, pat)
        assert load_puncture_file(path).to_string() == "TTPSTTTT"


class TestTransform:
    def test_row_three(self):
        assert list(polar_transform([0, 0, 0, 1])) == [1, 1, 1, 1]

    def test_row_zero(self):
        assert list(polar_transform([1, 0, 0, 0])) == [1, 0, 0, 0]

    @pytest.mark.parametrize("n", [1, 2, 16, 512])
    def test_zero_stays_zero(self, n):
        assert not polar_transform(np.zeros(n)).any()

    def test_matches_kronecker_matrix(self):
        rng = np.random.default_rng(0)
        g = kron_matrix(32)
        for _ in range(20):
            u = rng.integers(0, 2, 32).astype(np.uint8)
            np.testing.assert_array_equal(polar_transform(u), (u @ g) % 2)

    def test_not_power_of_two(self):
        with pytest.raises(NonPowerOfTwoLength):
            polar_transform([1, 0, 1])

    def test_involution(self):
        u = np.random.default_rng(1).integers(0, 2, 256).astype(np.uint8)
        np.testing.assert_array_equal(polar_transform(polar_transform(u)), u)


class TestEncoding:
    def test_small_systematic(self):
        code = build_code(4, 2, mask_from(4, [0, 1]))
        x = encode_systematic(code, [1, 0])
        assert (x[2], x[3]) == (1, 0)

    def test_zero_info(self):
        code = build_code(8, 4, construct_frozen_bhattacharyya(8, 4, 0.5))
        assert not encode_systematic(code, np.zeros(4)).any()

    def test_reencoding_is_zero_on_frozen(self):
        rng = np.random.default_rng(5)
        code = build_code(8, 4, construct_frozen_bhattacharyya(8, 4, 0.5))
        for _ in range(16):
            x = encode_systematic(code, rng.integers(0, 2, 4))
            assert not polar_transform(x)[code.frozen_mask.astype(bool)].any()

    def test_crc_follows_info_on_a(self):
        crc = PRESETS["8"]
        code = build_code(64, 20, construct_frozen_bhattacharyya(64, 28, 0.4), crc)
        info = np.random.default_rng(2).integers(0, 2, 20)
        x = encode_systematic(code, info)
        payload = x[code.info_positions]
        np.testing.assert_array_equal(payload, make_payload(code, info))
        np.testing.assert_array_equal(payload[:20], info)

    def test_wrong_info_length(self):
        code = build_code(4, 2, mask_from(4, [0, 1]))
        with pytest.raises(InfoLengthMismatch):
            encode_systematic(code, [1, 0, 1])


def test_as_bits_rejects_other_values():
    with pytest.raises(ValueError):
        as_bits([0, 2, 1])
