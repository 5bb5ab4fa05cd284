"""Steady-state keystream throughput."""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .keyschedule import KeyMaterial, initialize
from .keystream import generate_into

WARMUP_BYTES = 1 << 20


@dataclass
class BenchResult:
    nbytes: int
    seconds: float
    cpu_hz: float | None

    @property
    def bytes_per_second(self) -> float:
        return self.nbytes / self.seconds

    @property
    def cycles_per_byte(self) -> float | None:
        if not self.cpu_hz:
            return None
        return self.cpu_hz / self.bytes_per_second


def cpu_hz() -> float | None:
    """Nominal clock from /proc/cpuinfo, or None where unavailable."""
    try:
        for line in Path("/proc/cpuinfo").read_text().splitlines():
            if line.lower().startswith("cpu mhz"):
                return float(line.split(":")[1]) * 1e6
    except (OSError, ValueError, IndexError):
        pass
    return None


def bench_keystream(mib: int = 64, chunk_mib: int = 4, repeats: int = 3, cube: bool = False) -> BenchResult:
    """Time keystream generation after a 1 MiB warm-up; best of ``repeats`` runs.

    Key setup is excluded. Output goes into a reused buffer.
    """
    state, _ = initialize(KeyMaterial([0x01234567, 0x89ABCDEF, 0x0F1E2D3C], [1, 2, 3]), cube=cube)
    buf = np.empty(chunk_mib * (1 << 20) // 4, np.uint32)
    generate_into(state, np.empty(WARMUP_BYTES // 4, np.uint32))
    chunks = max(1, mib // chunk_mib)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(chunks):
            generate_into(state, buf)
        best = min(best, time.perf_counter() - t0)
    return BenchResult(chunks * buf.nbytes, best, cpu_hz())
