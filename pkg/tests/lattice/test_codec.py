import numpy as np
import pytest

from hjbandit.errors import IllegalArgumentError
from hjbandit.lattice import (
    GridSpec,
    ValueField,
    decode_value_field,
    encode_value_field,
    format_number,
    value_csv,
)

from .._testutil import small_grid


@pytest.fixture
def field() -> ValueField:
    grid = small_grid(nx=5, nq=3, nt=4)
    values = np.linspace(0.0, 1.0, grid.size) ** 2
    return ValueField(grid, 2, values)


@pytest.mark.parametrize("compresslevel", [None, 6])
def test_binary_value_field(field: ValueField, compresslevel) -> None:
    data = encode_value_field(field, compresslevel)
    assert data[:4] == b"HJBV"
    decoded = decode_value_field(data)
    assert decoded.grid == field.grid
    assert decoded.time_index == 2
    np.testing.assert_array_equal(decoded.values, field.values)


def test_gzip_flag_set(field: ValueField) -> None:
    plain = encode_value_field(field)
    packed = encode_value_field(field, 9)
    assert plain[5] == 0
    assert packed[5] == 1


def test_decode_accepts_memoryview(field: ValueField) -> None:
    decoded = decode_value_field(memoryview(encode_value_field(field)))
    np.testing.assert_array_equal(decoded.values, field.values)


def test_decode_rejects_garbage(field: ValueField) -> None:
    with pytest.raises(IllegalArgumentError, match="shorter"):
        decode_value_field(b"HJBV")
    data = bytearray(encode_value_field(field))
    data[:4] = b"XXXX"
    with pytest.raises(IllegalArgumentError, match="magic"):
        decode_value_field(bytes(data))
    data = bytearray(encode_value_field(field))
    data[4] = 9
    with pytest.raises(IllegalArgumentError, match="version"):
        decode_value_field(bytes(data))


def test_value_csv_layout() -> None:
    grid = GridSpec(-1.0, 1.0, 3, 1.0, 2)
    field = ValueField(grid, 0, [0.0, 1.0 / 3.0, 2.0, 3.0, 4.0, 5.0])
    lines = value_csv(field, comment="config-sha256=abc").splitlines()
    assert lines[0] == "# config-sha256=abc"
    assert lines[1] == "x,q,value"
    assert lines[2] == "-1,0,0"
    assert lines[3] == "0,0,0.333333333"
    assert len(lines) == 2 + grid.size


def test_value_csv_several_arms() -> None:
    grid = GridSpec(-1.0, 1.0, 3, 1.0, 2, K=2)
    field = ValueField(grid, 0, np.zeros(grid.size))
    header = value_csv(field).splitlines()[0]
    assert header == "x1,q1,x2,q2,value"


def test_format_number() -> None:
    assert format_number(0.1 + 0.2) == "0.3"
    assert format_number(1234567.891) == "1234567.89"
    assert format_number(1e-12) == "1e-12"
