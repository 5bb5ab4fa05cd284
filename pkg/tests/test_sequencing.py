import itertools
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mv3.sequencing import (
    RelationWitness, SchemeError, SequencingScheme, cipher_output_scheme, min_pair_weight, pair_decomposition,
    pair_weight, parse_scheme, regular_family,
)


def bfs_pair_weight(positions):
    """Fewest consecutive pairs XORing to the set, by breadth-first search."""
    target = 0
    for p in positions:
        target ^= 1 << p
    if target == 0:
        return 0
    lo, hi = min(positions) - 2, max(positions) + 2
    gens = [(1 << q) | (1 << (q + 1)) for q in range(max(lo, 0), hi)]
    seen = {0}
    frontier = deque([(0, 0)])
    while frontier:
        mask, d = frontier.popleft()
        for g in gens:
            m = mask ^ g
            if m == target:
                return d + 1
            if m not in seen:
                seen.add(m)
                frontier.append((m, d + 1))
    return None


@settings(max_examples=200, deadline=None)
@given(st.sets(st.integers(0, 11), min_size=1, max_size=10))
def test_pair_weight_matches_bfs(positions):
    mask = sum(1 << p for p in positions)
    assert pair_weight(mask) == bfs_pair_weight(sorted(positions))


def test_pair_decomposition_reconstructs_set():
    mask = (1 << 3) | (1 << 7) | (1 << 8) | (1 << 20)
    pairs = pair_decomposition(mask)
    rebuilt = 0
    for q in pairs:
        rebuilt ^= (1 << q) | (1 << (q + 1))
    assert rebuilt == mask and len(pairs) == pair_weight(mask) == 4 + 12
    assert pair_decomposition(0b111) is None


def brute_min_pair_weight(scheme, max_b, horizon):
    first = scheme.window + 1
    best = None
    for j1 in range(first, first + scheme.period):
        for b in range(1, max_b + 1):
            for rest in itertools.combinations(range(j1 + 1, j1 + horizon), b - 1):
                m = 0
                for j in (j1,) + rest:
                    m ^= scheme.output_mask(j)
                if m:
                    w = pair_weight(m)
                    if w is not None and (best is None or w < best):
                        best = w
    return best


def random_scheme(seed, period=4, k=3, window=6):
    rng = np.random.default_rng(seed)
    rows = [tuple(sorted(set(rng.choice(np.arange(1, window + 1), size=k - 1, replace=False)) | {0}))
            for _ in range(period)]
    return SequencingScheme(period, tuple(rows))


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("max_b", [2, 3])
def test_branch_and_bound_matches_enumeration(seed, max_b):
    scheme = random_scheme(seed)
    horizon = 3 * scheme.period + scheme.window
    res = min_pair_weight(scheme, max_b, horizon)
    assert res.a_min == brute_min_pair_weight(scheme, max_b, horizon)
    assert res.exhaustive
    if res.witness is not None:
        assert res.witness.verify(scheme)


def test_identity_scheme():
    res = min_pair_weight(SequencingScheme(1, ((0,),)), max_b=3)
    assert res.a_min == 1


def test_two_tap_scheme_single_output_is_a_pair():
    res = min_pair_weight(SequencingScheme(1, ((0, 1),)), max_b=3)
    assert res.a_min == 1 and res.witness.b == 1


def test_rejects_scheme_without_newest_tap():
    with pytest.raises(SchemeError):
        SequencingScheme(2, ((1, 2), (0, 3)))


def test_strict_window():
    with pytest.raises(SchemeError):
        SequencingScheme(1, ((0, 5),), strict_window=True)
    SequencingScheme(1, ((0, 70),), strict_window=True)


def test_parse_scheme_round_trip():
    scheme = regular_family()
    text = "# family\n" + scheme.to_text()
    assert parse_scheme(text) == scheme
    assert parse_scheme("0, 3\n0 1 # c\n").taps == ((0, 3), (0, 1))
    with pytest.raises(SchemeError):
        parse_scheme("0 x\n")


def test_regular_family_taps():
    fam = regular_family()
    assert fam.period == 32 and fam.window == 31
    assert fam.taps[1] == (5, 19, 0)
    assert fam.taps[16] == (0, 16, 0)  # k = 0: the first and last taps cancel
    assert fam.output_mask(32) == 1 << 16


def test_regular_family_weight_and_witness():
    res = min_pair_weight(regular_family(), max_b=6)
    assert res.exhaustive
    assert res.a_min == 2
    assert res.witness.verify(regular_family())
    assert res.witness.y_indices == (32, 33, 40, 41)


def test_search_is_antitone_in_max_b():
    for scheme in (regular_family(), random_scheme(3)):
        weights = [min_pair_weight(scheme, b).a_min for b in range(1, 6)]
        weights = [w if w is not None else float("inf") for w in weights]
        assert weights == sorted(weights, reverse=True)


def test_cipher_output_scheme():
    scheme = cipher_output_scheme()
    assert scheme.window <= 95
    res = min_pair_weight(scheme, max_b=3)
    assert res.a_min == 12 and res.witness.verify(scheme)


@pytest.mark.slow
def test_cipher_output_scheme_four_outputs():
    res = min_pair_weight(cipher_output_scheme(), max_b=4)
    assert res.a_min == 8 and res.exhaustive


def test_node_budget_reports_upper_bound():
    res = min_pair_weight(cipher_output_scheme(), max_b=5, max_nodes=2000)
    assert not res.exhaustive and res.kind == "upper bound"


def test_tampered_witness_fails():
    fam = regular_family()
    w = min_pair_weight(fam, max_b=4).witness
    bad = RelationWitness(w.y_indices, w.pair_indices[:-1])
    assert not bad.verify(fam)
