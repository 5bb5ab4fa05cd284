"""Sequencing schemes and the search for low-weight pair relations.

An output y_i is the XOR of walk values x_{i-d} over the tap offsets d of
its residue class i mod P. A relation XORs some outputs together; when the
resulting set of walk indices has even size it equals a XOR of consecutive
pairs (x_q ^ x_{q+1}), and the fewest pairs needed is the relation weight.

Index sets are Python ints used as bitmasks.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class SequencingScheme:
    """Periodic output rule. ``taps[r]`` holds the offsets i - n_ij for residue r.

    Offsets may repeat, in which case the repeated walk values cancel.
    """

    period: int
    taps: tuple[tuple[int, ...], ...]
    strict_window: bool = False

    def __post_init__(self):
        taps = tuple(tuple(int(d) for d in row) for row in self.taps)
        object.__setattr__(self, "taps", taps)
        if len(taps) != self.period:
            raise SchemeError(f"need {self.period} tap rows, got {len(taps)}")
        for r, row in enumerate(taps):
            if not row:
                raise SchemeError(f"residue {r} has no taps")
            if min(row) < 0:
                raise SchemeError(f"residue {r}: negative offset (taps must not look ahead)")
            if 0 not in row:
                raise SchemeError(f"residue {r}: the newest walk value x_i must be a tap")
        if self.strict_window and not 64 <= self.window <= 256:
            raise SchemeError(f"window {self.window} outside [64, 256]")

    @property
    def window(self) -> int:
        return max(max(row) for row in self.taps)

    def output_mask(self, i: int, base: int = 0) -> int:
        """Bitmask of walk indices in y_i, bit (n - base) for walk index n."""
        m = 0
        for d in self.taps[i % self.period]:
            m ^= 1 << (i - d - base)
        return m

    def to_text(self) -> str:
        return "".join(" ".join(str(d) for d in row) + "\n" for row in self.taps)


def parse_scheme(text: str, strict_window: bool = False) -> SequencingScheme:
    """Read a scheme: one line per residue, listing its offsets; '#' starts a comment."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append(tuple(int(tok) for tok in re.split(r"[,\s]+", line) if tok))
        except ValueError:
            raise SchemeError(f"bad scheme line: {line!r}") from None
    return SequencingScheme(len(rows), tuple(rows), strict_window)


def load_scheme(path: str | Path, strict_window: bool = False) -> SequencingScheme:
    return parse_scheme(Path(path).read_text(), strict_window)


def regular_family(period: int = 32) -> SequencingScheme:
    """y_i = x_{i-(5k mod 16)} ^ x_{i-16-(3k mod 16)} ^ x_i with k = i mod 16."""
    rows = []
    for i in range(period):
        k = i % 16
        rows.append(((5 * k) % 16, 16 + (3 * k) % 16, 0))
    return SequencingScheme(period, tuple(rows))


def cipher_output_scheme() -> SequencingScheme:
    """Taps of the cipher's own output rule at x-resolution.

    Output i of a block XORs the current walk value with A[9i+5] (written two
    blocks earlier) and B[7i+18] (one block earlier). Rotations and the
    multiplier are ignored here; only the index structure is kept.
    """
    rows = []
    for i in range(32):
        rows.append((0, 32 + i - (7 * i + 18) % 32, 64 + i - (9 * i + 5) % 32))
    return SequencingScheme(32, tuple(rows))


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def pair_decomposition(mask: int) -> list[int] | None:
    """Starting indices q of the pairs (q, q+1) whose XOR is the given set.

    The decomposition is unique: q is included iff an odd number of set
    elements are <= q. Returns None for odd-size sets, which have none.
    """
    bits = _bits(mask)
    if len(bits) % 2:
        return None
    out = []
    for lo, hi in zip(bits[0::2], bits[1::2]):
        out.extend(range(lo, hi))
    return out


def pair_weight(mask: int) -> int | None:
    """Number of consecutive pairs needed to express the set, or None if odd-sized."""
    bits = _bits(mask)
    if len(bits) % 2:
        return None
    return sum(hi - lo for lo, hi in zip(bits[0::2], bits[1::2]))


def _settled_weight(mask: int, limit: int) -> int:
    """Pairs (q, q+1) with q < limit that any completion of ``mask`` must contain,
    given that no later change touches indices below ``limit``."""
    cost = 0
    parity = 0
    prev = 0
    while mask:
        low = mask & -mask
        q = low.bit_length() - 1
        if q >= limit:
            break
        if parity:
            cost += q - prev
        parity ^= 1
        prev = q
        mask ^= low
    if parity:
        cost += limit - prev
    return cost


@dataclass(frozen=True)
class RelationWitness:
    y_indices: tuple[int, ...]
    pair_indices: tuple[int, ...]

    @property
    def a(self) -> int:
        return len(self.pair_indices)

    @property
    def b(self) -> int:
        return len(self.y_indices)

    def verify(self, scheme: SequencingScheme) -> bool:
        """Exact GF(2) check: XOR of the outputs equals XOR of the pairs."""
        base = min(self.y_indices) - scheme.window - 1
        lhs = 0
        for j in self.y_indices:
            lhs ^= scheme.output_mask(j, base)
        rhs = 0
        for q in self.pair_indices:
            rhs ^= (1 << (q - base)) ^ (1 << (q + 1 - base))
        return lhs != 0 and lhs == rhs


@dataclass
class PairSearchResult:
    a_min: int | None
    witness: RelationWitness | None
    max_b: int
    horizon: int
    exhaustive: bool
    nodes: int

    @property
    def kind(self) -> str:
        return "exact" if self.exhaustive else "upper bound"


def min_pair_weight(
    scheme: SequencingScheme,
    max_b: int = 6,
    horizon: int | None = None,
    max_nodes: int = 50_000_000,
) -> PairSearchResult:
    """Smallest relation weight over combinations of at most ``max_b`` outputs
    whose indices span fewer than ``horizon`` positions.

    Depth-first branch and bound. Outputs are added in increasing index
    order; once output j is under consideration, walk indices below
    j - window are settled, so their pair count is a lower bound for every
    extension and prunes the rest of the loop. By periodicity the first
    output is drawn from a single period. The result is exact for the given
    ``max_b`` and ``horizon`` unless the node budget runs out, in which case
    the best weight found is an upper bound.
    """
    if max_b < 1:
        raise ValueError("max_b must be at least 1")
    period, window = scheme.period, scheme.window
    if horizon is None:
        horizon = 4 * period + window
    # positions are walk indices relative to 0; the first output sits past the window
    first = window + 1
    cache: dict[int, int] = {}

    def y(j: int) -> int:
        m = cache.get(j)
        if m is None:
            m = cache[j] = scheme.output_mask(j)
        return m

    best = [None, None]  # weight, chosen outputs
    nodes = 0
    exhausted = False

    def consider(mask: int, chosen: tuple[int, ...]) -> None:
        if mask:
            w = pair_weight(mask)
            if w is not None and (best[0] is None or w < best[0]):
                best[0], best[1] = w, chosen

    def dfs(mask: int, chosen: tuple[int, ...]) -> None:
        nonlocal nodes, exhausted
        if len(chosen) == max_b or exhausted:
            return
        for j in range(chosen[-1] + 1, chosen[0] + horizon):
            if best[0] is not None and _settled_weight(mask, j - window) >= best[0]:
                break
            nodes += 1
            if nodes > max_nodes:
                exhausted = True
                return
            m = mask ^ y(j)
            ch = chosen + (j,)
            consider(m, ch)
            dfs(m, ch)

    for j1 in range(first, first + period):
        consider(y(j1), (j1,))
        dfs(y(j1), (j1,))
        if exhausted:
            break

    witness = None
    if best[0] is not None:
        mask = 0
        for j in best[1]:
            mask ^= y(j)
        witness = RelationWitness(tuple(best[1]), tuple(pair_decomposition(mask)))
    return PairSearchResult(best[0], witness, max_b, horizon, not exhausted, nodes)
