from __future__ import absolute_import

import time
import threading

from cokb import config


class TokenBucket(object):
    """Thread-safe token bucket shared by every KB request.

    Callers reserve a token under the lock and sleep outside it, so waiting
    threads are released in arrival order at `rate` per second.
    """

    def __init__(self, rate=config.KB_RATE, capacity=None,
                 clock=time.monotonic, sleep=time.sleep):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = float(rate)
        self.capacity = float(capacity if capacity is not None else rate)
        self.clock = clock
        self.sleep = sleep
        self.tokens = self.capacity
        self.last = clock()
        self._lock = threading.Lock()

    def acquire(self):
        """Take one token, sleeping until it is available.

        Returns the seconds waited."""
        with self._lock:
            now = self.clock()
            elapsed = max(0.0, now - self.last)
            self.tokens = min(self.capacity, self.tokens + elapsed * self.rate)
            self.last = now
            self.tokens -= 1
            wait = -self.tokens / self.rate if self.tokens < 0 else 0.0
        if wait:
            self.sleep(wait)
        return wait
