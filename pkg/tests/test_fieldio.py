import numpy as np
import pytest

from cmclab import CapSpec, DiskGrid, FieldFormatError, cap_height_field, load_field, save_field

from conftest import smooth_field


def test_round_trip_is_bitwise(tmp_path, rng):
    g = DiskGrid(1.0, 16, 32)
    for f in (cap_height_field(CapSpec.small_cap(1.0, 2.0), g), smooth_field(g, rng),
              g.sample(lambda x, y: np.exp(x) * y)):
        p = tmp_path / "f.txt"
        save_field(p, f)
        back = load_field(p)
        assert back.grid == g
        assert np.array_equal(back.values, f.values)
        assert np.array_equal(back.boundary, f.boundary)


def _write(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    return p


def _good(tmp_path):
    p = tmp_path / "good.txt"
    save_field(p, cap_height_field(CapSpec.small_cap(1.0, 2.0), DiskGrid(1.0, 4, 8)))
    return p.read_text().splitlines()


def test_bad_header(tmp_path):
    with pytest.raises(FieldFormatError, match="line 1"):
        load_field(_write(tmp_path, "nope\n1 4 8\n"))


def test_odd_n_theta(tmp_path):
    with pytest.raises(FieldFormatError, match="line 2.*dimension"):
        load_field(_write(tmp_path, "cmclab-field v1\n1 4 7\n"))


def test_truncated(tmp_path):
    lines = _good(tmp_path)
    with pytest.raises(FieldFormatError, match=f"line {len(lines) - 4}"):
        load_field(_write(tmp_path, "\n".join(lines[:-5]) + "\n"))


def test_wrong_index_and_nonfinite(tmp_path):
    lines = _good(tmp_path)
    swapped = lines.copy()
    swapped[5] = "0 9 0.1"
    with pytest.raises(FieldFormatError, match="line 6"):
        load_field(_write(tmp_path, "\n".join(swapped)))
    nan = lines.copy()
    nan[4] = "0 2 nan"
    with pytest.raises(FieldFormatError, match="line 5.*non-finite"):
        load_field(_write(tmp_path, "\n".join(nan)))


def test_trailing_data(tmp_path):
    lines = _good(tmp_path) + ["5 0 1.0"]
    with pytest.raises(FieldFormatError, match="unexpected data"):
        load_field(_write(tmp_path, "\n".join(lines)))
