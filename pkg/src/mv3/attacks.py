"""Cost and bound calculators for the attacks considered against the cipher.

Nothing here runs an attack; each function evaluates a closed-form cost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import BUFFER_WORDS, TABLE_WORDS, state_bits


def distinguisher_bound(eps: float, counts: dict[int, float]) -> float:
    """Statistical-distance bound sqrt(sum_a A(a) * eps^(2a)).

    ``counts`` maps a relation weight a >= 1 to the number of relations of
    that weight.
    """
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"bias must lie in [0, 1/2], got {eps}")
    total = 0.0
    for a, n in counts.items():
        if a < 1:
            raise ValueError(f"relation weights start at 1, got {a}")
        if n < 0:
            raise ValueError(f"count for a={a} is negative")
        total += n * eps ** (2 * a)
    return math.sqrt(total)


def log2_distinguisher_bound(log2_eps: float, log2_counts: dict[int, float]) -> float:
    """Same bound in the log domain, for biases too small for floats."""
    terms = [lc + 2 * a * log2_eps for a, lc in log2_counts.items()]
    top = max(terms)
    return 0.5 * (top + math.log2(math.fsum(2.0 ** (t - top) for t in terms)))


# exponent applied to each (1 - m t/256) factor, by keystream loops per setup phase
_LOOP_EXPONENTS = {8: 256, 4: 128, 2: 64}


@dataclass(frozen=True)
class RelatedKeyCost:
    t: float
    loops: int
    insertion: bool
    log2_m: float

    @property
    def m(self) -> float:
        return 2.0 ** self.log2_m

    @property
    def log2_total(self) -> float:
        """log2 of the data/time complexity, about 2^10 keystream words per IV pair times M."""
        return self.log2_m + 10


def related_key_complexity(t: float, loops: int = 8, insertion: bool = False) -> RelatedKeyCost:
    """Number M of related-IV pairs for the equal-keystream distinguisher.

    ``t`` is the number of table words each key word touches per setup
    phase (256 / key words). With ``insertion`` the variant that writes the
    setup keystream into the table instead of XORing it is costed.
    """
    if loops not in _LOOP_EXPONENTS:
        raise ValueError(f"loops per phase must be one of {sorted(_LOOP_EXPONENTS)}, got {loops}")
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    if insertion:
        base = 1 - t / 256
        if base <= 0:
            raise ValueError(f"t={t} makes 1 - t/256 non-positive")
        log2_m = -4 * 256 * math.log2(base)
    else:
        if 1 - 4 * t / 256 <= 0:
            raise ValueError(f"t={t} makes 1 - 4t/256 non-positive (need t < 64)")
        e = _LOOP_EXPONENTS[loops]
        log2_m = -math.fsum(e * math.log2(1 - m * t / 256) for m in range(1, 5))
        log2_m -= 32 * math.log2(1 - 4 * t / 256)
    return RelatedKeyCost(t, loops, insertion, log2_m)


def t_for_key_bits(key_bits: int) -> float:
    return TABLE_WORDS * 32 / key_bits


@dataclass(frozen=True)
class TmdtoMargin:
    key_bits: int
    state_bits: int

    @property
    def required_bits(self) -> int:
        return 2 * self.key_bits

    @property
    def holds(self) -> bool:
        return self.state_bits >= self.required_bits

    @property
    def max_key_bits(self) -> int:
        return self.state_bits // 2


def tmdto_margin(key_bits: int) -> TmdtoMargin:
    """Whether the state is at least twice the key size (state-inversion tradeoffs)."""
    if not 0 < key_bits <= 8192:
        raise ValueError(f"key size must be in (0, 8192] bits, got {key_bits}")
    return TmdtoMargin(key_bits, state_bits())


@dataclass(frozen=True)
class GuessDetermineCost:
    guessed_words: int
    guessed_bits: int
    collisions_needed: int
    loops: int
    expected_collisions: float
    keystream_bits: int


def expected_table_collisions(draws: int, cells: int = TABLE_WORDS) -> float:
    """Expected repeats among ``draws`` uniform picks from ``cells`` slots."""
    return draws - cells * (1 - (1 - 1 / cells) ** draws)


def guess_determine_cost(margin: int = 4) -> GuessDetermineCost:
    """Cost of guessing buffers A and B plus c, x and j, then filtering on table collisions.

    Each loop reveals 32 table reads; a read of an already-known entry is a
    32-bit filter. Runs loops until the expected collisions cover the guess.
    """
    words = 2 * BUFFER_WORDS + 2  # A, B, c, x
    bits = words * 32 + 8  # plus the byte j
    needed = words + margin
    loops = 1
    while expected_table_collisions(BUFFER_WORDS * loops) < needed:
        loops += 1
    return GuessDetermineCost(
        guessed_words=words,
        guessed_bits=bits,
        collisions_needed=needed,
        loops=loops,
        expected_collisions=expected_table_collisions(BUFFER_WORDS * loops),
        keystream_bits=loops * BUFFER_WORDS * 32,
    )
