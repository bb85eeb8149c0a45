# coding=utf8
from __future__ import division, print_function, absolute_import

import functools
import threading
from time import time
from collections import defaultdict

MEASUREMENTS = defaultdict(list)
_lock = threading.Lock()


class measure(object):
    """Context manager (or decorator) for recording a stage measurement"""

    def __init__(self, name):
        self.name = name
        self._local = threading.local()

    def __call__(self, func):
        @functools.wraps(func)
        def decorator(*args, **kwargs):
            start = time()
            try:
                return func(*args, **kwargs)
            finally:
                record(self.name, time() - start)
        return decorator

    def __enter__(self):
        self._local.start = time()

    def __exit__(self, *exc_info):
        record(self.name, time() - self._local.start)


def record(name, seconds):
    with _lock:
        MEASUREMENTS[name].append(seconds)


def reset_measurements():
    with _lock:
        MEASUREMENTS.clear()


def format_measurements(measurements=None):
    """Render a median/min/max table with a histogram per stage."""
    if measurements is None:
        with _lock:
            measurements = dict((k, list(v)) for k, v in MEASUREMENTS.items())
    data = []
    for name, values in measurements.items():
        if not values:
            continue
        mean, median, dmin, dmax, graph = stats(sorted(values))
        data.append((median, mean, dmin, dmax, graph, name))
    data.sort()
    hd = "{:16}| {:>10} | {:>5} {:^32} {:>5}|"
    fmt = "{:16}: {:7.1f} ms [ {:5.1f} {} {:5.1f}]"

    lines = [hd.format('name', 'median', 'min', 'histogram', 'max')]
    lines.append('-' * 76)
    for median, mean, dmin, dmax, graph, name in data:
        lines.append(
            fmt.format(name, median * 1000, dmin * 1000, graph, dmax * 1000))
    return '\n'.join(lines)


def stats(data, bins=32, outliers=2):
    """Summarise sorted timings.

    Returns (mean, median, min, max, histogram). Outliers are only trimmed
    when there are enough samples to spare them.
    """
    outlier_min = data[0]
    outlier_max = data[-1]
    if len(data) > 2 * outliers + 1:
        clean_data = data[outliers:-outliers]
    else:
        clean_data = data
    dmin = clean_data[0]
    dmax = clean_data[-1]

    mean = sum(clean_data) / len(clean_data)
    median = clean_data[len(clean_data) // 2]
    diff = dmax - dmin

    hist = [0] * bins
    for num in clean_data:
        if diff:
            bin = int((num - dmin) / diff * bins)
        else:
            bin = 0
        bin = min(bin, bins-1)
        hist[bin] += 1

    maxcount = max(hist)

    ticks = ['_', '▂', '▃', '▄', '▅', '▆', '▇']  # '█']

    graph = []
    for count in hist:
        if count == 0:
            graph.append(' ')
        elif count == 1:
            graph.append(ticks[0])
        else:
            index = int(count / maxcount * 7)
            index = min(index, 6)
            graph.append(ticks[index])

    return mean, median, outlier_min, outlier_max, ''.join(graph)
