import pytest
from hypothesis import given, strategies as st

from credveil.errors import InvalidInput
from credveil.fields import fe_from_hex, fe_to_hex
from credveil.hashing import Site, h1, h2, zero_hashes
from credveil.params import ProtocolParams

P = ProtocolParams(tree_depth=8)

fe = st.integers(min_value=0, max_value=P.prime - 1)


def test_h1_requires_input():
    with pytest.raises(InvalidInput):
        h1(P, [], Site.CRED)


def test_h1_site_separation():
    assert h1(P, [1, 2], Site.CRED) != h1(P, [1, 2], Site.COMMIT)


def test_h1_not_concat_ambiguous():
    # fixed-width limbs: [1, 2] must differ from [1] and from [2, 1]
    assert h1(P, [1, 2], Site.CRED) != h1(P, [1], Site.CRED)
    assert h1(P, [1, 2], Site.CRED) != h1(P, [2, 1], Site.CRED)


@given(fe, fe)
def test_h1_in_field(a, b):
    assert 0 <= h1(P, [a, b], Site.STATE) < P.prime


@given(fe, fe)
def test_h2_deterministic_and_in_field(left, right):
    out = h2(P, left, right)
    assert 0 <= out < P.prime
    assert out == h2(P, left, right)


def test_h2_order_sensitive():
    assert h2(P, 1, 2) != h2(P, 2, 1)


def test_h2_rejects_out_of_range():
    with pytest.raises(InvalidInput):
        h2(P, P.prime, 0)
    with pytest.raises(InvalidInput):
        h2(P, 0, -1)


def test_zero_hashes_chain():
    zeros = zero_hashes(P, 8)
    assert zeros[0] == 0
    assert len(zeros) == 9
    for level in range(8):
        assert zeros[level + 1] == h2(P, zeros[level], zeros[level])


@given(fe)
def test_hex_round_trip(value):
    text = fe_to_hex(P, value)
    assert len(text) == P.hex_width
    assert text == text.lower()
    assert fe_from_hex(P, text) == value


def test_hex_rejects_malformed():
    with pytest.raises(InvalidInput):
        fe_from_hex(P, "zz")
    with pytest.raises(InvalidInput):
        fe_from_hex(P, "A" * P.hex_width)  # uppercase rejected
