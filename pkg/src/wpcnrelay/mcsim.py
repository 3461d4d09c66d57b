"""Bit-level Monte Carlo simulation of the backscatter energy detector.

The receiver splits its input, feeds 1 - beta of the power to the detector
branch (which adds its own circuit noise), and integrates the energy of
nsamp complex samples per bit.  The HAP's beacon is a known constant
envelope and its channel is estimated beforehand, so the detector cancels
the direct-path contribution before integrating; what remains is the
reflected component (present only for a "1", with a fresh uniform phase
each bit) plus noise.  The decision threshold sits midway between the two
hypothesis mean energies.

This is a trend-level check of the closed-form error probability: the
closed form's constant factors correspond to a small-signal, real-noise
analysis, so agreement is expected within a small constant factor in the
moderate-error regime, not to high precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .link import backscatter_ber
from .model import ChannelGains, SystemParams

__all__ = ["DetectorRun", "BerCurvePoint", "simulate_ber", "ber_curve"]

_TARGET_CHUNK_DOUBLES = 8_000_000


@dataclass(frozen=True)
class DetectorRun:
    """Result of one Monte Carlo detector run."""

    bits: int
    seed: int
    empirical_ber: float
    ci95: float          # binomial 95% half-width
    errors: int = 0


@dataclass(frozen=True)
class BerCurvePoint:
    nsamp: int
    empirical_ber: float
    analytic_ber: float
    ci95: float


def _chunk_bits(nsamp: int) -> int:
    # keep the per-chunk noise workspace near a fixed byte budget; the
    # chunk layout is part of the deterministic stream contract
    return max(64, min(8192, _TARGET_CHUNK_DOUBLES // (2 * nsamp)))


def simulate_ber(
    params: SystemParams,
    gains: ChannelGains,
    bits: int,
    seed: int = 0,
) -> DetectorRun:
    """Empirical detector error rate over the given number of bits.

    Deterministic for a fixed seed: bits are processed in fixed-size
    chunks, each driven by the substream SeedSequence([seed, chunk]).
    """
    if not (isinstance(bits, int) and bits >= 1):
        raise ValueError("bits must be an integer >= 1, got %r" % (bits,))
    beta = params.beta
    sigma_sq = (1.0 - beta) * params.n0 + params.ns
    a_carrier = math.sqrt((1.0 - beta) * params.p1 * gains.h2)
    a_refl = math.sqrt((1.0 - beta) * params.p1) * params.mu * math.sqrt(
        gains.h1 * gains.h12
    )
    noise_std = math.sqrt(sigma_sq / 2.0)  # per real component
    threshold = params.nsamp * (sigma_sq + 0.5 * a_refl * a_refl)

    chunk = _chunk_bits(params.nsamp)
    errors = 0
    done = 0
    index = 0
    while done < bits:
        nb = min(chunk, bits - done)
        bitgen = np.random.PCG64(np.random.SeedSequence([seed, index]))
        errors += _backend.detector_chunk(
            bitgen, nb, params.nsamp, a_carrier, a_refl, noise_std, threshold
        )
        done += nb
        index += 1

    p = errors / bits
    if errors == 0 or errors == bits:
        half = 3.0 / bits  # rule-of-three bound when no failures observed
    else:
        half = 1.96 * math.sqrt(p * (1.0 - p) / bits)
    return DetectorRun(bits=bits, seed=seed, empirical_ber=p, ci95=half, errors=errors)


def ber_curve(
    params: SystemParams,
    gains: ChannelGains,
    n_list,
    bits: int,
    seed: int = 0,
):
    """Empirical and analytic error rates across sample counts.

    One row per entry of n_list; the same seed is reused so all rows share
    noise realizations, which keeps the monotone trend clean.
    """
    if not n_list:
        raise ValueError("n_list must be nonempty")
    rows = []
    for n in n_list:
        p = replace(params, nsamp=int(n))
        run = simulate_ber(p, gains, bits, seed)
        rows.append(
            BerCurvePoint(
                nsamp=int(n),
                empirical_ber=run.empirical_ber,
                analytic_ber=backscatter_ber(p, gains),
                ci95=run.ci95,
            )
        )
    return rows
