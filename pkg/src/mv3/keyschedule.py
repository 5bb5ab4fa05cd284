"""Key and IV setup.

Initialization mixes the key into the table in four phases, each followed
by eight blocks of keystream XORed back into the table, then does the
same with the IV. The state between the two halves is kept as a snapshot
so a new IV only costs the second half.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import MASK32, TABLE_WORDS, CipherState, bytes_to_words
from .keystream import generate_words

MAX_KEY_WORDS = 256  # 8192 bits
MIX_BLOCKS = 8  # 1024 bytes of keystream per phase


class KeyLengthError(ValueError):
    """Key or IV length outside the accepted range, or key/IV mismatch."""


def parse_hex_words(text: str) -> np.ndarray:
    """Parse a hex string (case-insensitive, 8 hex digits per word) into words.

    Each group of four bytes is read little-endian.
    """
    cleaned = "".join(text.split())
    if cleaned[:2].lower() == "0x":
        cleaned = cleaned[2:]
    if not cleaned or len(cleaned) % 8:
        raise KeyLengthError(f"hex length {len(cleaned)} is not a positive multiple of 8")
    try:
        raw = bytes.fromhex(cleaned)
    except ValueError as exc:
        raise ValueError(f"invalid hex: {exc}") from None
    return bytes_to_words(raw)


def read_key_file(path: str | Path) -> np.ndarray:
    """Read raw key bytes from a binary file (length a multiple of 4)."""
    raw = Path(path).read_bytes()
    if not raw or len(raw) % 4:
        raise KeyLengthError(f"{path}: {len(raw)} bytes is not a positive multiple of 4")
    return bytes_to_words(raw)


def _as_words(v) -> np.ndarray:
    if isinstance(v, (bytes, bytearray)):
        if len(v) % 4:
            raise KeyLengthError(f"{len(v)} bytes is not a multiple of 4")
        return bytes_to_words(bytes(v))
    if isinstance(v, str):
        return parse_hex_words(v)
    arr = np.asarray(v)
    if arr.ndim != 1:
        raise ValueError("key material must be one-dimensional")
    if arr.size and (arr.min() < 0 or arr.max() > MASK32):
        raise ValueError("key words must be unsigned 32-bit values")
    return arr.astype(np.uint32)


def _check_length(n: int, what: str) -> None:
    if not 1 <= n <= MAX_KEY_WORDS:
        raise KeyLengthError(
            f"{what} length {n} words ({32 * n} bits) is outside [1, {MAX_KEY_WORDS}] words"
        )


@dataclass(frozen=True)
class KeyMaterial:
    """Validated key and IV, both as arrays of 32-bit words of equal length.

    Accepts word sequences, raw bytes, or hex strings for either field.
    """

    key: np.ndarray
    iv: np.ndarray

    def __post_init__(self):
        key, iv = _as_words(self.key), _as_words(self.iv)
        _check_length(key.size, "key")
        _check_length(iv.size, "IV")
        if key.size != iv.size:
            raise KeyLengthError(
                f"key/IV length mismatch: key has {key.size} words, IV has {iv.size}"
            )
        key.setflags(write=False)
        iv.setflags(write=False)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "iv", iv)

    @property
    def keylength(self) -> int:
        return int(self.key.size)


class KeyPhaseSnapshot:
    """Read-only copy of the state right after the key half of initialization."""

    __slots__ = ("_state", "keylength")

    def __init__(self, state: CipherState, keylength: int):
        self._state = state.copy()
        self._state.bufs.setflags(write=False)
        self._state.t.setflags(write=False)
        self.keylength = keylength

    def restore(self) -> CipherState:
        """Return a fresh, writable copy of the captured state."""
        return self._state.copy()

    @property
    def state(self) -> CipherState:
        """The captured state itself (arrays are read-only)."""
        return self._state


def mix_material(t: np.ndarray, material: np.ndarray, i: int) -> None:
    """Add rotate_right(material[l mod len], 8i) + l into T[(i + l) mod 256] for l = 0..255."""
    kl = material.size
    ell = np.arange(TABLE_WORDS, dtype=np.uint64)
    idx = (i + np.arange(TABLE_WORDS)) % TABLE_WORDS
    words = material[np.arange(TABLE_WORDS) % kl].astype(np.uint64)
    r = (8 * i) % 32
    if r:
        words = ((words >> np.uint64(r)) | (words << np.uint64(32 - r))) & np.uint64(MASK32)
    # idx is a permutation of 0..255, so the fancy-indexed update has no collisions
    t[idx] = ((t[idx].astype(np.uint64) + words + ell) & np.uint64(MASK32)).astype(np.uint32)


def _mix_phase(state: CipherState, material: np.ndarray, i: int) -> None:
    mix_material(state.t, material, i)
    state.t ^= generate_words(state, MIX_BLOCKS * 32)


def _run_half(state: CipherState, material: np.ndarray, phases: range) -> None:
    for i in phases:
        _mix_phase(state, material, i)


def initialize(km: KeyMaterial, *, cube: bool = False) -> tuple[CipherState, KeyPhaseSnapshot]:
    """Run the full key/IV setup; return the ready state and the key-phase snapshot."""
    state = CipherState.filled(cube=cube)
    _run_half(state, km.key, range(0, 4))
    snap = KeyPhaseSnapshot(state, km.keylength)
    _run_half(state, km.iv, range(4, 8))
    return state, snap


def rekey_iv(snapshot: KeyPhaseSnapshot, iv) -> CipherState:
    """Re-run only the IV half of initialization from a key-phase snapshot."""
    iv = _as_words(iv)
    if iv.size != snapshot.keylength:
        raise KeyLengthError(
            f"key/IV length mismatch: key has {snapshot.keylength} words, IV has {iv.size}"
        )
    state = snapshot.restore()
    _run_half(state, iv, range(4, 8))
    return state
