"""Seeded random streams and the two samplers the channel model needs.

Every stream is a ``numpy.random.Generator`` backed by PCG64 (64-bit
permuted congruential generator). Only its uniform output ``random()`` is
consumed; Gaussian and exponential variates are derived from uniforms with
fixed transforms so the byte stream is reproducible from the seed alone:

* Gaussian: Box-Muller. Uniforms are drawn in pairs ``(u1, u2)`` and map to
  ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`` and ``... * sin(2 pi u2)``; the two
  outputs are emitted in that order.
* Exponential: inverse CDF, ``-ln(1 - u) / rate``.
"""

import zlib

import numpy as np

from .errors import InvalidParameterError


def make_rng(seed, *keys):
    """Return an independent PCG64 stream for ``seed`` and optional sub-keys.

    Integer or string keys select non-overlapping child streams, so that
    ``make_rng(7, "test")`` and ``make_rng(7, "train")`` never share state.
    """
    return np.random.Generator(np.random.PCG64(_seed_sequence(seed, keys)))


def derive_seed(seed, *keys):
    """Deterministic 63-bit integer seed derived from ``seed`` and ``keys``."""
    state = _seed_sequence(seed, keys).generate_state(1, dtype=np.uint64)[0]
    return int(state >> np.uint64(1))


def _seed_sequence(seed, keys):
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for key in keys:
        if isinstance(key, str):
            key = zlib.crc32(key.encode("utf-8"))
        entropy.append(int(key) & 0xFFFFFFFFFFFFFFFF)
    return np.random.SeedSequence(entropy)


def standard_normal(rng, size):
    """Box-Muller standard normal variates with the given shape."""
    shape = (size,) if np.isscalar(size) else tuple(size)
    count = int(np.prod(shape, dtype=np.int64))
    pairs = (count + 1) // 2
    u = rng.random((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    z = np.empty((pairs, 2))
    z[:, 0] = radius * np.cos(angle)
    z[:, 1] = radius * np.sin(angle)
    return z.reshape(-1)[:count].reshape(shape)


def exponential_from_uniform(u, rate):
    """Inverse-CDF map of uniforms on [0, 1) to exponential(rate) variates."""
    if not rate > 0:
        raise InvalidParameterError(f"exponential rate must be > 0, got {rate}")
    return -np.log1p(-np.asarray(u, dtype=float)) / rate


def sample_exponential(rate, rng, size=None):
    """Draw exponential variates with density ``rate * exp(-rate * x)``.

    Returns a float when ``size`` is None, otherwise an array.
    """
    if not rate > 0:
        raise InvalidParameterError(f"exponential rate must be > 0, got {rate}")
    if size is None:
        return float(exponential_from_uniform(rng.random(), rate))
    return exponential_from_uniform(rng.random(size), rate)
