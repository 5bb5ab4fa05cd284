"""Straight-line reference transcription of the cipher, used only by tests.

Deliberately shares no code with the package: plain lists, explicit
buffer copies on revolution, no numpy.
"""

M = 0xFFFFFFFF


def rotr(w, n):
    n %= 32
    return ((w >> n) | (w << (32 - n))) & M if n else w


class Ref:
    def __init__(self, cube=False):
        self.cube = cube
        self.j = self.x = self.u = 0
        self.c = 1
        self.A = [0xEFEFEFEF] * 32
        self.B = [0xEFEFEFEF] * 32
        self.C = [0xEFEFEFEF] * 32
        self.T = [0xEFEFEFEF] * 256

    def block(self):
        out = []
        for i in range(32):
            self.j = (self.j + (self.B[i] % 256)) % 256
            self.x = (self.x + self.T[self.j]) % 2**32
            self.C[i] = rotr(self.x, 8)
            out.append(((self.x * self.c) % 2**32) ^ self.A[(9 * i + 5) % 32] ^ rotr(self.B[(7 * i + 18) % 32], 16))
        self.u = (self.u + 1) % 256
        self.T[self.u] = (self.T[self.u] + rotr(self.T[self.j], 13)) % 2**32
        self.c = (self.c + rotr(self.A[0], 16)) % 2**32
        self.c = self.c | 1
        self.c = pow(self.c, 3 if self.cube else 2, 2**32)
        self.A, self.B, self.C = list(self.B), list(self.C), [0] * 32
        return out

    def stream(self, nwords):
        out = []
        while len(out) < nwords:
            out.extend(self.block())
        return out[:nwords]

    def _phase(self, words, i):
        kl = len(words)
        for l in range(256):
            k = (i + l) % 256
            self.T[k] = (self.T[k] + rotr(words[l % kl], 8 * i) + l) % 2**32
        ks = self.stream(256)
        for k in range(256):
            self.T[k] ^= ks[k]

    def setup(self, key, iv):
        for i in range(4):
            self._phase(key, i)
        for i in range(4, 8):
            self._phase(iv, i)
        return self


def ref_keystream_bytes(key_words, iv_words, nbytes, cube=False):
    r = Ref(cube).setup(list(key_words), list(iv_words))
    words = r.stream(-(-nbytes // 4))
    return b"".join(w.to_bytes(4, "little") for w in words)[:nbytes]
