import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from localtime_lab.errors import InvalidCode, InvalidPath
from localtime_lab.fileio import format_path, parse_path, read_code, read_path, write_code, write_path, write_sidecar
from localtime_lab.path_model import decode_code
from localtime_lab.sampler import brownian_path, random_code


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 12))
def test_path_round_trip_is_bit_exact(seed, level):
    p = brownian_path(level, seed)
    q = parse_path(format_path(p))
    assert np.array_equal(p.times, q.times)
    assert np.array_equal(p.values, q.values)
    assert q.grid_level == level


def test_path_file_layout(tmp_path):
    f = tmp_path / "tent.csv"
    write_path(decode_code("10"), f)
    lines = f.read_text().splitlines()
    assert lines[0] == "t,value"
    assert lines[1] == "0,0"
    assert len(lines) == 4
    assert read_path(f).values[1] == decode_code("10").values[1]


@pytest.mark.parametrize("text", [
    "",
    "time,value\n0,0\n1,1\n",
    "t,value\n0,0.5\n1,1\n",
    "t,value\n0,0\n1\n",
    "t,value\n0,0\n1,x\n",
    "t,value\n0,0\n0.5,1\n0.5,2\n1,0\n",
])
def test_bad_path_files(text):
    with pytest.raises(InvalidPath):
        parse_path(text)


def test_code_file_round_trip(tmp_path):
    c = random_code(200, 5)
    write_code(c, tmp_path / "a.code")
    assert read_code(tmp_path / "a.code") == c
    (tmp_path / "b.code").write_text("0102\n")
    with pytest.raises(InvalidCode):
        read_code(tmp_path / "b.code")


def test_sidecar_is_sorted_json(tmp_path):
    write_sidecar({"seed": 3, "generator": "philox4x64-10"}, tmp_path / "m.json")
    text = (tmp_path / "m.json").read_text()
    assert json.loads(text) == {"seed": 3, "generator": "philox4x64-10"}
    assert text.index("generator") < text.index("seed")
