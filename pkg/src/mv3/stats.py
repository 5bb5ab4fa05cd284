"""Lightweight keystream sanity tests: monobit, 2-bit serial, per-bit-lane frequency.

Every test is reduced to a standard-normal score so one threshold
(default 4 sigma) covers them all.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

MIN_BYTES = 100_000
TESTS = ("monobit", "serial", "positions")

_POPCOUNT = np.array([bin(v).count("1") for v in range(256)], dtype=np.int64)


@dataclass
class CheckResult:
    name: str
    statistic: float
    z: float
    passed: bool


@dataclass
class StatReport:
    nbytes: int
    sigma: float
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]


def _z_from_upper_tail(p: float) -> float:
    return float(sps.norm.isf(p)) if p > 0 else float("inf")


def monobit(data: np.ndarray) -> tuple[float, float]:
    n = data.size * 8
    ones = int(_POPCOUNT[data].sum())
    return float(ones), (ones - n / 2) / np.sqrt(n / 4)


def serial2(data: np.ndarray) -> tuple[float, float]:
    """Chi-square over non-overlapping 2-bit tuples (3 degrees of freedom).

    The upper-tail probability is mapped back to a one-sided normal score.
    """
    pairs = np.concatenate([(data >> s) & 3 for s in (6, 4, 2, 0)])
    counts = np.bincount(pairs, minlength=4).astype(float)
    expected = pairs.size / 4
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    return chi2, _z_from_upper_tail(float(sps.chi2.sf(chi2, 3)))


def bit_lanes(data: np.ndarray) -> list[tuple[int, float, float]]:
    """Frequency of ones in each bit position of the little-endian 32-bit words."""
    words = data[: data.size - data.size % 4].view("<u4")
    n = words.size
    out = []
    for bit in range(32):
        ones = int(np.count_nonzero((words >> np.uint32(bit)) & np.uint32(1)))
        out.append((bit, float(ones), (ones - n / 2) / np.sqrt(n / 4)))
    return out


def stat_tests(stream: bytes, which=TESTS, sigma: float = 4.0) -> StatReport:
    """Run the selected tests on a byte stream; a test passes when |z| <= sigma."""
    if len(stream) < MIN_BYTES:
        raise ValueError(f"need at least {MIN_BYTES} bytes, got {len(stream)}")
    unknown = set(which) - set(TESTS)
    if unknown:
        raise ValueError(f"unknown tests: {sorted(unknown)}")
    data = np.frombuffer(stream, dtype=np.uint8)
    report = StatReport(len(stream), sigma)
    if "monobit" in which:
        s, z = monobit(data)
        report.results.append(CheckResult("monobit", s, z, abs(z) <= sigma))
    if "serial" in which:
        s, z = serial2(data)
        report.results.append(CheckResult("serial-2bit", s, z, abs(z) <= sigma))
    if "positions" in which:
        for bit, s, z in bit_lanes(data):
            report.results.append(CheckResult(f"bit-lane-{bit:02d}", s, z, abs(z) <= sigma))
    return report
