import numpy as np
import pytest

from vgsynth.ingest import Window, minmax_scale


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def make_window(values, ticker="T", start=0):
    """Raw window helper."""
    return Window(ticker=ticker, start_index=start, raw_values=np.asarray(values, float))


def make_scaled_window(values, ticker="T", start=0):
    """Window whose raw values are min-max scaled in place."""
    return minmax_scale(make_window(values, ticker=ticker, start=start))


def make_prescaled_window(scaled, ticker="T", start=0):
    """Window carrying the given values verbatim as its scaled values.

    Useful when a test needs exact scaled values (e.g. similar-value links)
    that min-max scaling would distort.
    """
    arr = np.asarray(scaled, float)
    return Window(ticker=ticker, start_index=start, raw_values=arr.copy(),
                  scale_min=0.0, scale_max=1.0, scaled_values=arr.copy())


def random_scaled_window(rng, length, ticker="T", start=0):
    raw = rng.random(length) * 40.0 + 10.0
    return make_scaled_window(raw, ticker=ticker, start=start)
