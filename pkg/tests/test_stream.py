import os

import pytest
from hypothesis import given, settings, strategies as st

from mv3.keyschedule import KeyMaterial, initialize
from mv3.keystream import next_block
from mv3.stream import StreamSession, decrypt, encrypt

KEY = [0x11111111, 0x22222222, 0x33333333, 0x44444444]
IV = [0xA, 0xB, 0xC, 0xD]


def session(iv=IV):
    return StreamSession.from_key(KEY, iv)


def test_zero_bytes_leaves_state_alone():
    s = session()
    before = s.state.copy()
    assert s.keystream_bytes(0) == b""
    assert s.state.same_as(before) and s.produced == 0


def test_one_block_equals_next_block():
    state, _ = initialize(KeyMaterial(KEY, IV))
    expected = next_block(state).astype("<u4").tobytes()
    assert session().keystream_bytes(128) == expected


def test_concatenation_law_block_boundary():
    a = session()
    assert a.keystream_bytes(100) + a.keystream_bytes(28) == session().keystream_bytes(128)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 400), min_size=1, max_size=8))
def test_concatenation_law(chunks):
    a = session()
    joined = b"".join(a.keystream_bytes(n) for n in chunks)
    assert joined == session().keystream_bytes(sum(chunks))
    assert a.produced == sum(chunks)
    assert len(a.pending) < 128


def test_negative_count_rejected():
    with pytest.raises(ValueError):
        session().keystream_bytes(-1)


def test_empty_plaintext():
    assert session().encrypt(b"") == b""


@pytest.mark.parametrize("n", [0, 1, 127, 128, 129, 4096])
def test_round_trip(n):
    p = os.urandom(n)
    c = encrypt(KEY, IV, p)
    assert len(c) == n
    assert decrypt(KEY, IV, c) == p


def test_zero_plaintext_gives_keystream():
    assert session().encrypt(bytes(300)) == session().keystream_bytes(300)


def test_split_encryption_consumes_keystream_like_joined():
    p1, p2 = os.urandom(77), os.urandom(301)
    s = session()
    assert s.encrypt(p1) + s.encrypt(p2) == session().encrypt(p1 + p2)


def test_distinct_ivs_give_distinct_streams():
    assert session().keystream_bytes(128) != session([0xA, 0xB, 0xC, 0xE]).keystream_bytes(128)
