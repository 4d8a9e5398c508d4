"""Wall-clock accounting for the solver pipeline stages."""

import time
from contextlib import contextmanager

STAGES = ("forward_fft", "squaring", "hadamard", "inverse_fft", "boundary_recursion")


class Timings:
    """Accumulates seconds per named stage."""

    def __init__(self, stages=STAGES):
        self.seconds = {name: 0.0 for name in stages}

    @contextmanager
    def stage(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.seconds[name] = self.seconds.get(name, 0.0) + time.perf_counter() - start

    @property
    def total(self) -> float:
        return sum(self.seconds.values())


@contextmanager
def maybe_stage(timings, name):
    if timings is None:
        yield
    else:
        with timings.stage(name):
            yield
