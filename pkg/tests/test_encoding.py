import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyckcount.encoding import (code_to_set, decode_prediction, encode_indices, encode_one_hot, k_hot,
                                presentation_code, reduce_dyck_n_to_2, reduction_width, target_matrix)
from dyckcount.languages import dyck, shuffle
from dyckcount.oracles import ForeignSymbol, membership


def test_one_hot():
    assert encode_one_hot("(", dyck(1)).tolist() == [1.0, 0.0]
    assert encode_one_hot("]", dyck(2)).tolist() == [0, 0, 0, 1]
    assert encode_indices("([)]", shuffle(2)).tolist() == [0, 1, 2, 3]
    with pytest.raises(ForeignSymbol):
        encode_one_hot("[", dyck(1))
    with pytest.raises(ForeignSymbol):
        encode_indices("(x", dyck(1))


def test_code_to_set_vectors():
    assert k_hot(code_to_set(1, dyck(1)), dyck(1)).tolist() == [1, 1]
    assert k_hot(code_to_set(0, dyck(1)), dyck(1)).tolist() == [1, 0]
    assert k_hot(code_to_set(3, shuffle(2)), shuffle(2)).tolist() == [1, 1, 1, 1]
    with pytest.raises(ValueError):
        code_to_set(2, dyck(1))


def test_presentation_codes():
    assert presentation_code({")"}) == 1
    assert presentation_code({")", "]"}) == 3
    assert presentation_code({"⟩", "⌉"}) == 24
    assert presentation_code(set()) == 0
    assert presentation_code({"(", "[", ")"}) == 1


def test_threshold_is_strict():
    spec = dyck(1)
    assert decode_prediction([0.9, 0.5], spec) == {"("}
    assert decode_prediction([0.9, 0.5000001], spec) == {"(", ")"}
    assert decode_prediction([0.1, 0.2], spec) == frozenset()
    with pytest.raises(ValueError, match="dimension"):
        decode_prediction([0.1, 0.2, 0.3], spec)


def test_target_matrix():
    m = target_matrix("([])", dyck(2))
    assert m.tolist() == [[1, 1, 1, 0], [1, 1, 0, 1], [1, 1, 1, 0], [1, 1, 0, 0]]


def test_reduction_width():
    assert [reduction_width(n) for n in (1, 2, 3, 4, 5, 8, 9)] == [1, 1, 2, 2, 3, 3, 4]


def test_reduction_examples():
    assert reduce_dyck_n_to_2("[]", 2) == "[]"
    assert reduce_dyck_n_to_2("()", 2) == "()"
    assert reduce_dyck_n_to_2("[]", 3) == "([])"
    assert reduce_dyck_n_to_2("{}", 3) == "[()]"
    assert reduce_dyck_n_to_2("⟨⟩", 4) == "[[]]"
    assert reduce_dyck_n_to_2("", 4) == ""
    with pytest.raises(ForeignSymbol):
        reduce_dyck_n_to_2("⟨⟩", 3)


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 6), st.data())
def test_reduction_preserves_membership(n, data):
    spec = dyck(n)
    s = "".join(data.draw(st.lists(st.sampled_from(spec.alphabet), max_size=14)))
    image = reduce_dyck_n_to_2(s, n)
    assert len(image) == reduction_width(n) * len(s)
    assert membership(spec, s) == membership(dyck(2), image)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=4, max_size=4))
def test_decode_round_trip_on_k_hot(values):
    spec = shuffle(2)
    chosen = decode_prediction(values, spec)
    assert decode_prediction(k_hot(chosen, spec), spec) == chosen
    assert np.array_equal(k_hot(chosen, spec) == 1, np.asarray(values) > 0.5)
