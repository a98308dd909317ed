"""Seeded pseudo-random stream used by every stochastic doekit operation.

A single algorithm is used toolkit-wide so that any artifact can be rebuilt
from its configuration and seed alone:

* bits come from numpy's PCG64 generator, seeded with a 64-bit integer;
* uniform variates take one 64-bit draw each (53 significant bits);
* Gaussian variates use the Marsaglia polar transform on pairs of uniforms;
* permutations use a Fisher-Yates shuffle driven by the uniform variates.
"""

import logging

import numpy

from .errors import ValidationError

__all__ = ["Random", "seeded_gaussian"]

logger = logging.getLogger(__name__)

SEED_MODULUS = 2**64


def check_seed(value):
    """Integer value of a seed, rejecting non integral ones."""

    try:
        seed = int(value)
    except (TypeError, ValueError, OverflowError):
        raise ValidationError(f"bad seed ({value!r})") from None
    if isinstance(value, bool) or seed != value:
        raise ValidationError(f"bad seed ({value!r})")
    return seed


class Random:
    """Reproducible random stream.

    The ``index`` attribute counts the 64-bit draws consumed since the
    stream was seeded. Setting it jumps the stream to that position, e.g. in
    order to replay a sequence.
    """

    def __init__(self, seed=None, index=0):
        self.seed = seed
        if index:
            self.index = index

    def __repr__(self):
        return f"Random(seed={self._seed}, index={self._index})"

    @property
    def seed(self):
        """The 64-bit seed of the stream."""
        return self._seed

    @seed.setter
    def seed(self, value):
        if value is None:
            value = numpy.random.SeedSequence().entropy
        self._seed = check_seed(value) % SEED_MODULUS
        self._rewind()

    @property
    def index(self):
        """Number of 64-bit draws consumed so far."""
        return self._index

    @index.setter
    def index(self, value):
        value = int(value)
        if value < 0:
            raise ValidationError(f"bad stream index ({value})")
        self._rewind()
        self._bits.advance(value)
        self._index = value

    def _rewind(self):
        self._bits = numpy.random.PCG64(self._seed)
        self._generator = numpy.random.Generator(self._bits)
        self._index = 0

    def uniform01(self, n=None):
        """Uniform variates over [0, 1)."""

        values = self._generator.random(n)
        self._index += 1 if n is None else int(numpy.prod(n))
        return values

    def normal(self, n=None):
        """Standard normal variates (Marsaglia polar method)."""

        count = 1 if n is None else int(n)
        if count < 0:
            raise ValidationError(f"bad variates count ({count})")

        values = numpy.empty(count)
        filled = 0
        while filled < count:
            pairs = (count - filled + 1) // 2
            batch = pairs + pairs // 4 + 4
            u = 2.0 * self.uniform01(2 * batch).reshape(batch, 2) - 1.0
            s = numpy.sum(u**2, axis=1)
            accepted = (s > 0.0) & (s < 1.0)
            u, s = u[accepted], s[accepted]
            scaled = u * numpy.sqrt(-2.0 * numpy.log(s) / s)[:, None]
            fresh = scaled.ravel()[:count - filled]
            values[filled:filled + fresh.size] = fresh
            filled += fresh.size

        return float(values[0]) if n is None else values

    def permutation(self, n):
        """Random permutation of range(n) (Fisher-Yates)."""

        n = int(n)
        order = numpy.arange(n)
        if n < 2:
            return order

        u = self.uniform01(n - 1)
        for k, i in enumerate(range(n - 1, 0, -1)):
            j = int(u[k] * (i + 1))
            order[i], order[j] = order[j], order[i]
        return order


def seeded_gaussian(seed, count):
    """Return ``count`` standard normal variates for the given seed."""

    if count < 0:
        raise ValidationError(f"bad variates count ({count})")
    logger.debug("drawing %d gaussian variates (seed=%d)", count, seed)
    return Random(seed).normal(count)
