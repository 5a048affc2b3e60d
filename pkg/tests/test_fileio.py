import numpy as np
import pytest

from robustlrt import BinaryMask, InputError, Raster
from robustlrt.fileio import (
    read_json,
    read_mask_pgm,
    read_raster,
    read_raster_csv,
    write_json,
    write_mask_pgm,
    write_raster,
)


class TestRasterBinary:
    def test_round_trip_is_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        raster = Raster(rng.random((17, 23)).astype(np.float32).astype(float))
        path = tmp_path / "view.rlrt"
        write_raster(path, raster)
        loaded = read_raster(path)
        assert loaded.pixels.shape == (17, 23)
        assert np.array_equal(loaded.pixels, raster.pixels)

    def test_header_layout(self, tmp_path):
        raster = Raster(np.zeros((2, 3)))
        path = tmp_path / "view.rlrt"
        write_raster(path, raster)
        blob = path.read_bytes()
        assert blob[:4] == b"RLRT"
        assert int.from_bytes(blob[4:8], "little") == 3  # width
        assert int.from_bytes(blob[8:12], "little") == 2  # height
        assert len(blob) == 12 + 4 * 6

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.rlrt"
        path.write_bytes(b"NOPE" + b"\x00" * 20)
        with pytest.raises(InputError):
            read_raster(path)

    def test_truncated_payload(self, tmp_path):
        raster = Raster(np.zeros((4, 4)))
        path = tmp_path / "view.rlrt"
        write_raster(path, raster)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(InputError):
            read_raster(path)


class TestRasterCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "fixture.csv"
        path.write_text("0.1,0.2,0.3\n0.4,0.5,0.6\n")
        raster = read_raster_csv(path)
        assert raster.pixels.shape == (2, 3)
        assert raster.pixels[1, 2] == pytest.approx(0.6)

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.1,oops\n")
        with pytest.raises(InputError):
            read_raster_csv(path)


class TestMaskPgm:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        mask = BinaryMask(rng.random((9, 14)) < 0.4)
        path = tmp_path / "mask.pgm"
        write_mask_pgm(path, mask)
        loaded = read_mask_pgm(path)
        assert np.array_equal(loaded.bits, mask.bits)

    def test_header(self, tmp_path):
        mask = BinaryMask(np.ones((2, 5), bool))
        path = tmp_path / "mask.pgm"
        write_mask_pgm(path, mask)
        assert path.read_bytes().startswith(b"P5\n5 2\n1\n")

    def test_wrong_maxval(self, tmp_path):
        path = tmp_path / "gray.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes(4))
        with pytest.raises(InputError):
            read_mask_pgm(path)

    def test_not_pgm(self, tmp_path):
        path = tmp_path / "x.pgm"
        path.write_bytes(b"P6\n2 2\n1\n" + bytes(12))
        with pytest.raises(InputError):
            read_mask_pgm(path)


class TestJson:
    def test_round_trip(self, tmp_path):
        doc = {"alpha": 0.05, "per_target": [{"id": 1, "detected": True}]}
        path = tmp_path / "report.json"
        write_json(path, doc)
        assert read_json(path) == doc

    def test_invalid(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(InputError):
            read_json(path)
