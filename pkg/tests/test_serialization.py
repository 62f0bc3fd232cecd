import json
import os

import numpy as np
import pytest

from cmacg import ValidationError
import cmacg.serialization as ser


def random_draws(n, m, r, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, m, r)) + 1j * rng.standard_normal((n, m, r))


class TestMatrixCsv:
    def test_round_trip_is_exact(self):
        mat = random_draws(1, 3, 3)[0]
        parsed = ser.matrix_from_csv(ser.matrix_to_csv(mat))
        np.testing.assert_array_equal(parsed, mat)

    def test_rejects_odd_columns(self):
        with pytest.raises(ValidationError, match="even column count"):
            ser.matrix_from_csv("1.0,2.0,3.0\n")

    def test_rejects_ragged(self):
        with pytest.raises(ValidationError, match="ragged"):
            ser.matrix_from_csv("1.0,2.0\n1.0,2.0,3.0,4.0\n")

    def test_rejects_non_numeric(self):
        with pytest.raises(ValidationError, match="not numeric"):
            ser.matrix_from_csv("1.0,abc\n")

    def test_rejects_empty(self):
        with pytest.raises(ValidationError, match="no data rows"):
            ser.matrix_from_csv("\n\n")


class TestDrawsCsv:
    def test_round_trip_is_exact(self):
        draws = random_draws(5, 3, 2)
        parsed = ser.draws_from_csv(ser.draws_to_csv(draws))
        np.testing.assert_array_equal(parsed, draws)

    def test_layout(self):
        draws = np.array([[[1.0 + 2.0j, 3.0 - 4.0j]]])
        assert ser.draws_to_csv(draws) == "0,1,2,3,-4\n"

    def test_rejects_gapped_indices(self):
        text = "0,1,0\n2,1,0\n"
        with pytest.raises(ValidationError, match="draw_index"):
            ser.draws_from_csv(text)

    def test_rejects_fractional_index(self):
        with pytest.raises(ValidationError, match="not integral"):
            ser.draws_from_csv("0.5,1,0\n")

    def test_rejects_inconsistent_draw_heights(self):
        text = "0,1,0\n0,1,0\n1,1,0\n"
        with pytest.raises(ValidationError, match="inconsistent row counts"):
            ser.draws_from_csv(text)


class TestDrawsJson:
    def test_round_trip_is_exact(self):
        draws = random_draws(4, 2, 2, seed=1)
        parsed = ser.draws_from_json(ser.draws_to_json(draws))
        np.testing.assert_array_equal(parsed, draws)

    def test_rejects_non_draws_document(self):
        with pytest.raises(ValidationError):
            ser.draws_from_json('{"other": 1}')

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            ser.draws_from_json('{"draws": []}')


class TestChecksumAndSidecar:
    def test_checksum_stable(self):
        mat = random_draws(1, 2, 2, seed=2)[0]
        assert ser.param_checksum(mat) == ser.param_checksum(mat.copy())

    def test_checksum_distinguishes(self):
        mat = random_draws(1, 2, 2, seed=3)[0]
        assert ser.param_checksum(mat) != ser.param_checksum(mat + 1.0)

    def test_write_atomic_and_sidecar(self, tmp_path):
        target = str(tmp_path / "out.csv")
        ser.write_atomic(target, "1,2\n")
        assert open(target).read() == "1,2\n"
        side = ser.write_sidecar(target, {"seed": 0, "n": 1})
        assert side == target + ".meta.json"
        assert json.load(open(side)) == {"seed": 0, "n": 1}
        assert not [p for p in os.listdir(tmp_path) if p.endswith(".part")]
