"""Byte-oriented XOR stream on top of the block generator."""
from __future__ import annotations

import numpy as np

from .core import BLOCK_BYTES, CipherState
from .keyschedule import KeyMaterial, initialize
from .keystream import generate_words


class StreamSession:
    """Sequential keystream consumer.

    Keystream is produced in whole 128-byte blocks; the unread tail of the
    last block is held in ``pending`` so no keystream byte is ever skipped.
    There is no seek: to restart, build a new session.
    """

    def __init__(self, state: CipherState):
        self.state = state
        self.pending = b""
        self.produced = 0

    @classmethod
    def from_key(cls, key, iv, *, cube: bool = False) -> "StreamSession":
        state, _ = initialize(KeyMaterial(key, iv), cube=cube)
        return cls(state)

    def keystream_bytes(self, n: int) -> bytes:
        if n < 0:
            raise ValueError(f"byte count must be non-negative, got {n}")
        if n == 0:
            return b""
        head = self.pending[:n]
        need = n - len(head)
        if need <= 0:
            self.pending = self.pending[n:]
            self.produced += n
            return head
        nblocks = -(-need // BLOCK_BYTES)
        fresh = generate_words(self.state, nblocks * 32).astype("<u4", copy=False).tobytes()
        self.pending = fresh[need:]
        self.produced += n
        return head + fresh[:need]

    def encrypt(self, data: bytes) -> bytes:
        ks = self.keystream_bytes(len(data))
        a = np.frombuffer(data, np.uint8)
        b = np.frombuffer(ks, np.uint8)
        return np.bitwise_xor(a, b).tobytes()

    # XOR is its own inverse
    decrypt = encrypt


def encrypt(key, iv, plaintext: bytes, *, cube: bool = False) -> bytes:
    return StreamSession.from_key(key, iv, cube=cube).encrypt(plaintext)


def decrypt(key, iv, ciphertext: bytes, *, cube: bool = False) -> bytes:
    return StreamSession.from_key(key, iv, cube=cube).decrypt(ciphertext)
