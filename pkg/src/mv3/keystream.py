"""The main loop: per-step walk and output, per-block table and multiplier update.

``step``/``finish_block``/``next_block`` are the readable word-at-a-time path.
``generate_words`` runs the same loop through the compiled kernel and is what
the key schedule, the stream layer and the benchmarks use.
"""
from __future__ import annotations

import numpy as np

from . import _kernel
from .core import BUFFER_WORDS, CipherState, add_mod, mul_mod, rotate_right


def step(state: CipherState, i: int) -> int:
    """Advance the walk one position inside a block and return the output word."""
    if not 0 <= i < BUFFER_WORDS:
        raise ValueError(f"loop index must be in [0, 32), got {i}")
    a, b, cb = state.a, state.b, state.c_buf
    state.j = (state.j + (int(b[i]) & 0xFF)) & 0xFF
    state.x = add_mod(state.x, int(state.t[state.j]))
    cb[i] = rotate_right(state.x, 8)
    return (
        mul_mod(state.x, state.c)
        ^ int(a[(9 * i + 5) % 32])
        ^ rotate_right(int(b[(7 * i + 18) % 32]), 16)
    )


def finish_block(state: CipherState) -> None:
    """End-of-block update: T[u] refresh, multiplier refresh, buffer revolution."""
    state.u = (state.u + 1) & 0xFF
    state.t[state.u] = add_mod(int(state.t[state.u]), rotate_right(int(state.t[state.j]), 13))
    c = add_mod(state.c, rotate_right(int(state.a[0]), 16))
    c |= 1
    c = mul_mod(mul_mod(c, c), c) if state.cube else mul_mod(c, c)
    state.c = c
    state.revolve()


def next_block(state: CipherState) -> np.ndarray:
    """Run one outer-loop iteration and return its 32 output words."""
    out = np.empty(BUFFER_WORDS, np.uint32)
    for i in range(BUFFER_WORDS):
        out[i] = step(state, i)
    finish_block(state)
    return out


def _regs(state: CipherState) -> np.ndarray:
    return np.array([state.rot, state.u, state.j, state.c, state.x], np.uint64)


def _store_regs(state: CipherState, regs: np.ndarray) -> None:
    state.rot, state.u, state.j, state.c, state.x = (int(v) for v in regs)


def generate_into(state: CipherState, out: np.ndarray) -> np.ndarray:
    """Fill ``out`` (uint32, length a multiple of 32) with keystream words."""
    if out.dtype != np.uint32 or out.ndim != 1 or out.size % BUFFER_WORDS:
        raise ValueError("output must be a 1-D uint32 array whose length is a multiple of 32")
    regs = _regs(state)
    _kernel.generate_blocks(state.bufs, state.t, regs, out, state.cube)
    _store_regs(state, regs)
    return out


def generate_words(state: CipherState, nwords: int) -> np.ndarray:
    """Return ``nwords`` keystream words; ``nwords`` must be a multiple of 32."""
    if nwords < 0 or nwords % BUFFER_WORDS:
        raise ValueError(f"word count must be a non-negative multiple of 32, got {nwords}")
    return generate_into(state, np.empty(nwords, np.uint32))
