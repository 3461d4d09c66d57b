"""Backscatter link analysis: detector error rate and effective bit rate.

The detector decides each backscattered bit from the energy of nsamp
receiver samples; its error probability is

    eps = 0.5 * erfc( (1-beta) p1 mu^2 h1 h12 sqrt(nsamp)
                      / (4 ((1-beta) n0 + ns)) )

and the link is then a binary symmetric channel with crossover eps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ChannelGains, SystemParams

__all__ = [
    "erfc",
    "BerInputs",
    "detector_snr_argument",
    "backscatter_ber",
    "bsc_capacity",
    "backscatter_rate",
]

_SQRT_PI = 1.7724538509055160273
_SERIES_CUTOFF = 2.5


def _erfc_series(x: float) -> float:
    # Maclaurin series of erf; alternating, fine up to the cutoff where the
    # largest term stays ~20 and cancellation costs < 1e-14 absolute.
    term = x
    total = x
    n = 0
    xx = x * x
    while True:
        n += 1
        term *= -xx * (2 * n - 1) / (n * (2 * n + 1))
        total += term
        if abs(term) < 1e-20 * abs(total) + 1e-300:
            break
    return 1.0 - 2.0 * total / _SQRT_PI


def _erfc_cf(x: float) -> float:
    # Continued fraction erfc(x) = exp(-x^2) / (sqrt(pi) * f) with
    # f = x + (1/2)/(x + 1/(x + (3/2)/(x + 2/(x + ...)))), by modified Lentz.
    tiny = 1e-300
    f = x
    c = f
    d = 0.0
    for j in range(1, 300):
        a = 0.5 * j
        d = x + a * d
        if d == 0.0:
            d = tiny
        c = x + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return math.exp(-x * x) / (_SQRT_PI * f)


def erfc(x: float) -> float:
    """Complementary error function, absolute error below 1e-13 on [-10, 10].

    Maclaurin series near zero, a continued fraction in the tail, and the
    reflection erfc(-x) = 2 - erfc(x) for negative arguments.  Raises on
    non-finite input.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("erfc requires a finite argument, got %r" % (x,))
    if x < 0.0:
        return 2.0 - erfc(-x)
    if x == 0.0:
        return 1.0
    if x < _SERIES_CUTOFF:
        return _erfc_series(x)
    return _erfc_cf(x)


@dataclass(frozen=True)
class BerInputs:
    """Argument of the detector erfc and whether it degenerated to 0/0."""

    snr_arg: float
    degenerate: bool = False


def detector_snr_argument(params: SystemParams, gains: ChannelGains) -> BerInputs:
    """Dimensionless erfc argument of the energy detector.

    With beta = 1 and ns = 0 both the detector signal and its noise vanish;
    that 0/0 case is flagged and treated as an uninformative link.
    """
    denom = 4.0 * ((1.0 - params.beta) * params.n0 + params.ns)
    num = (
        (1.0 - params.beta)
        * params.p1
        * params.mu ** 2
        * gains.h1
        * gains.h12
        * math.sqrt(params.nsamp)
    )
    if denom == 0.0:
        return BerInputs(snr_arg=0.0, degenerate=True)
    return BerInputs(snr_arg=num / denom)


def backscatter_ber(params: SystemParams, gains: ChannelGains) -> float:
    """Bit error probability of the backscatter energy detector, in (0, 0.5].

    Equals exactly 0.5 when the reflected path vanishes (mu = 0 or a dead
    hop) or when the detector input degenerates.
    """
    inputs = detector_snr_argument(params, gains)
    if inputs.degenerate:
        return 0.5
    return 0.5 * erfc(inputs.snr_arg)


def bsc_capacity(epsilon: float) -> float:
    """Capacity of a binary symmetric channel, bits per channel use.

    C = 1 + eps*log2(eps) + (1-eps)*log2(1-eps), with 0*log0 = 0, so
    C(0) = C(1) = 1 and C(0.5) = 0 exactly.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1], got %r" % (epsilon,))
    if epsilon == 0.0 or epsilon == 1.0:
        return 1.0
    return (
        1.0
        + epsilon * math.log2(epsilon)
        + (1.0 - epsilon) * math.log2(1.0 - epsilon)
    )


def backscatter_rate(params: SystemParams, gains: ChannelGains, t2: float) -> float:
    """Bits delivered from WD1 to WD2 by backscattering for t2: C * rb * t2."""
    if not t2 >= 0:
        raise ValueError("t2 must be >= 0, got %r" % (t2,))
    if t2 == 0.0:
        return 0.0
    return bsc_capacity(backscatter_ber(params, gains)) * params.rb * t2
