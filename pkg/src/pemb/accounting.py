"""Deterministic memory accounting for the construction pipeline.

Tracks the byte sizes of the large working arrays as they are allocated and
released, which makes peak figures reproducible across runs and hardware,
unlike resident-set sampling.
"""

import numpy as np


class MemoryAccountant:
    def __init__(self, input_bytes: int = 0):
        self.input_bytes = input_bytes
        self.current = 0
        self.peak = 0

    def alloc(self, nbytes: int):
        self.current += int(nbytes)
        if self.current > self.peak:
            self.peak = self.current

    def free(self, nbytes: int):
        self.current -= int(nbytes)

    def track(self, arr: np.ndarray) -> np.ndarray:
        self.alloc(arr.nbytes)
        return arr

    def drop(self, arr: np.ndarray):
        self.free(arr.nbytes)

    @property
    def peak_ratio(self) -> float:
        """Peak transient bytes relative to the input representation."""
        if self.input_bytes == 0:
            return 0.0
        return self.peak / self.input_bytes
