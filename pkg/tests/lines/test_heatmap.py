import numpy as np
import pytest
from PIL import Image

from backend.errors import InvalidParameter
from backend.lines import heatmap_export, line_matrix_sq, read_heatmap_csv


def test_identity_heatmap(tmp_path):
    files = heatmap_export(np.eye(8), tmp_path / "eye.pgm")
    img = np.array(Image.open(files.pgm))
    assert img.shape == (8, 8)
    assert np.array_equal(img, 255 * np.eye(8, dtype=np.uint8))


def test_pgm_is_binary_graymap(tmp_path):
    files = heatmap_export(line_matrix_sq(8, 3.0), tmp_path / "l.pgm")
    assert files.pgm.read_bytes()[:2] == b"P5"


def test_csv_round_trip_is_exact(tmp_path):
    L = line_matrix_sq(8, 2.4)
    files = heatmap_export(L, tmp_path / "l.pgm")
    assert np.array_equal(read_heatmap_csv(files.csv), L)


def test_negative_entries_rejected(tmp_path):
    with pytest.raises(InvalidParameter):
        heatmap_export(-np.eye(2), tmp_path / "bad.pgm")
