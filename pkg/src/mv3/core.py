"""Word arithmetic and the cipher state container.

All arithmetic is on unsigned 32-bit words. Table indices are bytes and
wrap modulo 256; buffer indices wrap modulo 32.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MASK32 = 0xFFFFFFFF
BUFFER_WORDS = 32
TABLE_WORDS = 256
BLOCK_BYTES = BUFFER_WORDS * 4

# byte-filled initial value for every buffer and table word
FILL_WORD = 0xEFEFEFEF


def rotate_right(w: int, amount: int) -> int:
    """Rotate a 32-bit word right by ``amount mod 32`` bits."""
    amount %= 32
    w &= MASK32
    if amount == 0:
        return w
    return ((w >> amount) | (w << (32 - amount))) & MASK32


def add_mod(a: int, b: int) -> int:
    return (a + b) & MASK32


def mul_mod(a: int, b: int) -> int:
    return (a * b) & MASK32


def words_to_bytes(words) -> bytes:
    return np.asarray(words, dtype="<u4").tobytes()


def bytes_to_words(data: bytes) -> np.ndarray:
    if len(data) % 4:
        raise ValueError(f"byte length {len(data)} is not a multiple of 4")
    return np.frombuffer(data, dtype="<u4").astype(np.uint32)


@dataclass
class CipherState:
    """Full mutable cipher state.

    The three revolving buffers live in one ``(3, 32)`` array; ``rot``
    selects which row currently plays A, B and C, so a revolution is a
    single index bump and no words are copied.
    """

    bufs: np.ndarray = field(default_factory=lambda: np.zeros((3, BUFFER_WORDS), np.uint32))
    t: np.ndarray = field(default_factory=lambda: np.zeros(TABLE_WORDS, np.uint32))
    rot: int = 0
    u: int = 0
    j: int = 0
    c: int = 1
    x: int = 0
    cube: bool = False

    def __post_init__(self):
        self.bufs = np.ascontiguousarray(self.bufs, dtype=np.uint32)
        self.t = np.ascontiguousarray(self.t, dtype=np.uint32)
        if self.bufs.shape != (3, BUFFER_WORDS):
            raise ValueError(f"buffers must have shape (3, 32), got {self.bufs.shape}")
        if self.t.shape != (TABLE_WORDS,):
            raise ValueError(f"table must have 256 entries, got {self.t.shape}")
        self.rot %= 3
        self.u &= 0xFF
        self.j &= 0xFF
        self.c &= MASK32
        self.x &= MASK32

    @classmethod
    def from_buffers(cls, a, b, c_buf, t, *, u=0, j=0, c=1, x=0, cube=False) -> "CipherState":
        bufs = np.stack([np.asarray(a, np.uint32), np.asarray(b, np.uint32), np.asarray(c_buf, np.uint32)])
        return cls(bufs=bufs, t=np.asarray(t, np.uint32), u=u, j=j, c=c, x=x, cube=cube)

    @classmethod
    def filled(cls, *, cube: bool = False) -> "CipherState":
        """State with every buffer and table byte set to 0xEF, j=x=u=0, c=1."""
        return cls(
            bufs=np.full((3, BUFFER_WORDS), FILL_WORD, np.uint32),
            t=np.full(TABLE_WORDS, FILL_WORD, np.uint32),
            cube=cube,
        )

    @property
    def a(self) -> np.ndarray:
        return self.bufs[self.rot]

    @property
    def b(self) -> np.ndarray:
        return self.bufs[(self.rot + 1) % 3]

    @property
    def c_buf(self) -> np.ndarray:
        return self.bufs[(self.rot + 2) % 3]

    def revolve(self) -> None:
        """A takes B's contents, B takes C's; the old A row is recycled as C."""
        self.rot = (self.rot + 1) % 3

    def copy(self) -> "CipherState":
        return CipherState(
            bufs=self.bufs.copy(), t=self.t.copy(), rot=self.rot,
            u=self.u, j=self.j, c=self.c, x=self.x, cube=self.cube,
        )

    def same_as(self, other: "CipherState") -> bool:
        """Logical equality: same buffer contents by role, table and registers."""
        return (
            np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.c_buf, other.c_buf)
            and np.array_equal(self.t, other.t)
            and (self.u, self.j, self.c, self.x, self.cube)
            == (other.u, other.j, other.c, other.x, other.cube)
        )


def state_bits() -> int:
    """Bit size of the secret and public state: three buffers, the table,
    the byte indices u and j, and the words c and x."""
    return 3 * BUFFER_WORDS * 32 + TABLE_WORDS * 32 + 8 + 8 + 32 + 32
