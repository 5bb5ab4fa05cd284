"""Compiled block generator.

Registers travel in a uint64 array ``regs = [rot, u, j, c, x]`` so the
kernel can update them in place.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def generate_blocks(bufs, t, regs, out, cube):
    mask = np.uint64(0xFFFFFFFF)
    rot = np.int64(regs[0])
    u = np.uint64(regs[1])
    j = np.uint64(regs[2])
    c = np.uint64(regs[3])
    x = np.uint64(regs[4])
    nblocks = out.size // 32
    for blk in range(nblocks):
        a = bufs[rot]
        b = bufs[(rot + 1) % 3]
        cb = bufs[(rot + 2) % 3]
        base = blk * 32
        for i in range(32):
            j = (j + (np.uint64(b[i]) & np.uint64(0xFF))) & np.uint64(0xFF)
            x = (x + np.uint64(t[j])) & mask
            cb[i] = np.uint32(((x >> np.uint64(8)) | (x << np.uint64(24))) & mask)
            bw = np.uint64(b[(7 * i + 18) & 31])
            bw = ((bw >> np.uint64(16)) | (bw << np.uint64(16))) & mask
            out[base + i] = np.uint32(((x * c) & mask) ^ np.uint64(a[(9 * i + 5) & 31]) ^ bw)
        u = (u + np.uint64(1)) & np.uint64(0xFF)
        tj = np.uint64(t[j])
        t[u] = np.uint32((np.uint64(t[u]) + (((tj >> np.uint64(13)) | (tj << np.uint64(19))) & mask)) & mask)
        a0 = np.uint64(a[0])
        c = (c + (((a0 >> np.uint64(16)) | (a0 << np.uint64(16))) & mask)) & mask
        c = c | np.uint64(1)
        if cube:
            c = (((c * c) & mask) * c) & mask
        else:
            c = (c * c) & mask
        rot = (rot + 1) % 3
    regs[0] = np.uint64(rot)
    regs[1] = u
    regs[2] = j
    regs[3] = c
    regs[4] = x

