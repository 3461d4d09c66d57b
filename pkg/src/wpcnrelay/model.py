"""Physical system model: parameters, path-loss gains and energy bookkeeping.

All quantities are SI (watts, joules, hertz, meters).  Rates elsewhere in the
package are bits per block at unit bandwidth, and the transmission block is
normalized to T = 1, so a duration is a dimensionless fraction of the block
and "energy" carries the same numbers as average power over the block.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "SystemParams",
    "Geometry",
    "ChannelGains",
    "TimeAllocation",
    "EnergySplit",
    "PowerAllocation",
    "channel_gain",
    "gains_from_geometry",
    "harvest_phase1",
    "harvest_phase2",
    "active_power_p3",
]

_LIGHT_SPEED = 3.0e8  # nominal propagation speed used by the link budget


@dataclass(frozen=True)
class SystemParams:
    """Constants of the network.

    p1      HAP transmit power in W.
    eta     RF-to-DC harvesting efficiency, 0 < eta < 1.
    beta    power-splitting factor: fraction of received power harvested
            during the backscatter phase, the rest feeds the detector.
    mu      backscatter reflection coefficient.
    n0      antenna noise power in W (all receivers).
    ns      extra noise power of the information-decoding circuit in W.
    fc      carrier frequency in Hz.
    ga      antenna power gain.
    plexp   path-loss exponent.
    rb      backscatter bit rate in bits/s.
    nsamp   detector samples taken per backscattered bit.
    t0      channel-estimation overhead as a fraction of the block.
    """

    p1: float = 1.0
    eta: float = 0.6
    beta: float = 0.8
    mu: float = 0.8
    n0: float = 1e-10
    ns: float = 1e-10
    fc: float = 915e6
    ga: float = 2.0
    plexp: float = 2.0
    rb: float = 5e4
    nsamp: int = 100
    t0: float = 0.05

    def __post_init__(self):
        if not self.p1 > 0:
            raise ValueError("p1 must be > 0, got %r" % (self.p1,))
        if not 0 < self.eta < 1:
            raise ValueError("eta must be in (0, 1), got %r" % (self.eta,))
        if not 0 <= self.beta <= 1:
            raise ValueError("beta must be in [0, 1], got %r" % (self.beta,))
        if not 0 <= self.mu <= 1:
            raise ValueError("mu must be in [0, 1], got %r" % (self.mu,))
        if not self.n0 > 0:
            raise ValueError("n0 must be > 0, got %r" % (self.n0,))
        if not self.ns >= 0:
            raise ValueError("ns must be >= 0, got %r" % (self.ns,))
        if not self.fc > 0:
            raise ValueError("fc must be > 0, got %r" % (self.fc,))
        if not self.ga > 0:
            raise ValueError("ga must be > 0, got %r" % (self.ga,))
        if not self.plexp >= 1:
            raise ValueError("plexp must be >= 1, got %r" % (self.plexp,))
        if not self.rb > 0:
            raise ValueError("rb must be > 0, got %r" % (self.rb,))
        if not (isinstance(self.nsamp, int) and self.nsamp >= 1):
            raise ValueError("nsamp must be an integer >= 1, got %r" % (self.nsamp,))
        if not 0 <= self.t0 < 1:
            raise ValueError("t0 must be in [0, 1), got %r" % (self.t0,))

    @property
    def block_budget(self) -> float:
        """Usable fraction of the block after channel estimation."""
        return 1.0 - self.t0


@dataclass(frozen=True)
class Geometry:
    """Node placement: d1 = HAP-WD1, d2 = HAP-WD2, d12 = WD1-WD2, meters."""

    d1: float
    d2: float
    d12: float

    def __post_init__(self):
        for name in ("d1", "d2", "d12"):
            if not getattr(self, name) > 0:
                raise ValueError("%s must be > 0, got %r" % (name, getattr(self, name)))

    @classmethod
    def collinear(cls, d1: float, d2: float) -> "Geometry":
        """All three nodes on a line with WD2 between the HAP and WD1."""
        if not d1 > d2:
            raise ValueError("collinear geometry requires d1 > d2")
        return cls(d1=d1, d2=d2, d12=d1 - d2)


@dataclass(frozen=True)
class ChannelGains:
    """Deterministic channel power gains."""

    h1: float   # HAP <-> WD1
    h2: float   # HAP <-> WD2
    h12: float  # WD1 <-> WD2

    def __post_init__(self):
        for name in ("h1", "h2", "h12"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError("%s must be finite and >= 0, got %r" % (name, v))


@dataclass(frozen=True)
class TimeAllocation:
    """Phase durations as fractions of the unit block.

    t1   downlink energy broadcast, both users harvest.
    t2   energy broadcast continues while WD1 backscatters to WD2.
    t3   WD1 transmits actively (WD2 and the HAP both listen).
    t41  WD2 relays WD1's message to the HAP.
    t42  WD2 sends its own message to the HAP.
    """

    t1: float = 0.0
    t2: float = 0.0
    t3: float = 0.0
    t41: float = 0.0
    t42: float = 0.0

    def __post_init__(self):
        for name in ("t1", "t2", "t3", "t41", "t42"):
            if not getattr(self, name) >= 0:
                raise ValueError("%s must be >= 0, got %r" % (name, getattr(self, name)))

    def total(self, t0: float = 0.0) -> float:
        return t0 + self.t1 + self.t2 + self.t3 + self.t41 + self.t42

    def as_tuple(self) -> tuple:
        return (self.t1, self.t2, self.t3, self.t41, self.t42)


@dataclass(frozen=True)
class EnergySplit:
    """WD2's transmit-energy split over the block: tau = t * P, joules."""

    tau41: float = 0.0
    tau42: float = 0.0

    def __post_init__(self):
        if not self.tau41 >= 0:
            raise ValueError("tau41 must be >= 0, got %r" % (self.tau41,))
        if not self.tau42 >= 0:
            raise ValueError("tau42 must be >= 0, got %r" % (self.tau42,))

    @property
    def total(self) -> float:
        return self.tau41 + self.tau42


@dataclass(frozen=True)
class PowerAllocation:
    """Physical transmit powers recovered from a (t, tau) solution, W.

    Flags record degenerate corners: a phase of zero length whose energy
    was left unspent ("stranded_*") or an absent active phase.
    """

    p3: float = 0.0
    p41: float = 0.0
    p42: float = 0.0
    flags: tuple = ()


def channel_gain(d: float, params: SystemParams) -> float:
    """Path-loss power gain at distance d: ga * (c / (4 pi d fc)) ** plexp."""
    if not d > 0:
        raise ValueError("distance must be > 0, got %r" % (d,))
    return params.ga * (_LIGHT_SPEED / (4.0 * math.pi * d * params.fc)) ** params.plexp


def gains_from_geometry(geom: Geometry, params: SystemParams) -> ChannelGains:
    """Map node placement to the three channel power gains."""
    return ChannelGains(
        h1=channel_gain(geom.d1, params),
        h2=channel_gain(geom.d2, params),
        h12=channel_gain(geom.d12, params),
    )


def harvest_phase1(params: SystemParams, gains: ChannelGains, t1: float) -> tuple:
    """Energy harvested by (WD1, WD2) during the dedicated broadcast phase.

    E_i = eta * t1 * p1 * h_i; linear in t1.
    """
    if not t1 >= 0:
        raise ValueError("t1 must be >= 0, got %r" % (t1,))
    base = params.eta * t1 * params.p1
    return (base * gains.h1, base * gains.h2)


def harvest_phase2(params: SystemParams, gains: ChannelGains, t2: float) -> float:
    """Energy harvested by WD2 while WD1 backscatters.

    WD2 sees the direct beacon plus, for half the bits, the reflection off
    WD1.  The reflected path carries a random phase, so direct and
    reflected powers add:

        E = 0.5 * eta * t2 * beta * p1 * (2 h2 + mu^2 h1 h12)

    With mu = 0 this reduces to plain beta-split harvesting at rate
    eta * p1 * h2.
    """
    if not t2 >= 0:
        raise ValueError("t2 must be >= 0, got %r" % (t2,))
    return 0.5 * params.eta * t2 * params.beta * params.p1 * (
        2.0 * gains.h2 + params.mu ** 2 * gains.h1 * gains.h12
    )


def active_power_p3(params: SystemParams, gains: ChannelGains, t1: float, t3: float) -> float:
    """WD1's average transmit power when it spends all harvested energy in t3.

    P3 = eta * p1 * h1 * t1 / t3.  Returns 0.0 when t3 = 0 (the phase is
    absent); rate expressions use the perspective form t3*log(1 + a*t1/t3)
    and never this quotient, so the t3 -> 0 limit stays well defined.
    """
    if not t1 >= 0:
        raise ValueError("t1 must be >= 0, got %r" % (t1,))
    if not t3 >= 0:
        raise ValueError("t3 must be >= 0, got %r" % (t3,))
    if t3 == 0.0:
        return 0.0
    return params.eta * params.p1 * gains.h1 * t1 / t3
