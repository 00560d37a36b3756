import json

import numpy as np
import pytest

from shallowdecode.codes import Code, HadamardCode, brute_force_list, encode, hamming_distance


def test_hadamard_coordinates_follow_integer_bits():
    code = HadamardCode(2)
    # coordinate y pairs bit j of y with x_j
    assert encode(code, [1, 0]).tolist() == [0, 1, 0, 1]
    assert encode(code, [0, 1]).tolist() == [0, 0, 1, 1]
    assert encode(code, [1, 1]).tolist() == [0, 1, 1, 0]


@pytest.mark.parametrize("k", [1, 3, 5, 8])
def test_hadamard_distinct_codewords_are_half_apart(k, rng):
    code = HadamardCode(k)
    xs = rng.integers(0, 2, size=(20, k))
    words = code.encode_many(xs)
    for a in range(len(xs)):
        for b in range(a):
            d = hamming_distance(words[a], words[b])
            assert d == (0 if np.array_equal(xs[a], xs[b]) else code.n // 2)


def test_hadamard_is_linear(rng):
    code = HadamardCode(6)
    x, y = rng.integers(0, 2, size=(2, 6))
    assert np.array_equal(encode(code, (x + y) % 2), (encode(code, x) + encode(code, y)) % 2)


def test_json_round_trip(rng):
    code = Code.random(3, 2, 5, rng)
    back = Code.from_json(json.dumps(code.to_json()))
    assert np.array_equal(back.table(), code.table())


def test_table_shape_is_validated():
    with pytest.raises(ValueError):
        Code(2, 2, 3, table=np.zeros((3, 3)))
    with pytest.raises(ValueError):
        encode(HadamardCode(3), [1, 0])


def test_brute_force_list_matches_distance_scan():
    code = HadamardCode(4)
    y = encode(code, [1, 0, 1, 1]).copy()
    y[[0, 3, 9]] ^= 1
    assert brute_force_list(code, y, 3) == {(1, 0, 1, 1)}
    assert len(brute_force_list(code, y, 16)) == 16
    assert brute_force_list(code, y, 2) == set()


def test_identity_code():
    code = Code.identity(5, 3)
    assert encode(code, [7, 1, 4]).tolist() == [2, 1, 4]
