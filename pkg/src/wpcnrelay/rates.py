"""Achievable-rate expressions, feasibility checking and schedule evaluation.

Every Shannon-type quantity is expressed in the perspective form
t * log2(1 + rho * x / t), which is jointly concave in (t, x), extended
by continuity to 0 at t = 0.  The physical (time, power) form is kept as
a separate evaluation path so the two can be cross-checked.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .link import backscatter_rate
from .model import (
    ChannelGains,
    EnergySplit,
    PowerAllocation,
    SystemParams,
    TimeAllocation,
    harvest_phase1,
    harvest_phase2,
)

__all__ = [
    "Scheme",
    "ConstantsRho",
    "RateReport",
    "FeasibilityReport",
    "FeasibilityError",
    "perspective_rate",
    "rate_r12",
    "rate_r13",
    "rate_relay",
    "rate_wd2",
    "compose_r1",
    "feasible",
    "evaluate",
    "evaluate_physical",
]

_LN2 = math.log(2.0)


class Scheme(enum.Enum):
    """Transmission schemes compared in the experiments.

    AB_COOP      full protocol, backscatter phase available.
    ACTIVE_COOP  cooperation through active transmission only (t2 = 0).
    NO_COOP      independent transmission: WD2 never relays
                 (t2 = 0, t41 = 0, tau41 = 0) and WD1 counts only its
                 direct link to the HAP.
    """

    AB_COOP = "ab_coop"
    ACTIVE_COOP = "active_coop"
    NO_COOP = "no_coop"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                "unknown scheme %r (expected one of %s)"
                % (name, ", ".join(s.value for s in cls))
            ) from None


@dataclass(frozen=True)
class ConstantsRho:
    """Effective SNR coefficients of the perspective-form rates."""

    rho12: float  # WD1 -> WD2 active link
    rho13: float  # WD1 -> HAP direct link
    rho2: float   # WD2 -> HAP link

    @classmethod
    def from_params(cls, params: SystemParams, gains: ChannelGains) -> "ConstantsRho":
        scale = params.eta * params.p1 / params.n0
        return cls(
            rho12=gains.h1 * gains.h12 * scale,
            rho13=gains.h1 ** 2 * scale,
            rho2=gains.h2 / params.n0,
        )


def perspective_rate(t: float, x: float, rho: float) -> float:
    """t * log2(1 + rho * x / t), continuously extended to 0 at t = 0.

    The extension also applies when x > 0 with t = 0: energy assigned to a
    zero-length phase yields no bits.
    """
    if t <= 0.0 or x <= 0.0 or rho <= 0.0:
        return 0.0
    arg = rho * x / t
    if arg > 1e15:
        # log1p would lose nothing but the ratio itself may overflow
        return t * (math.log(rho * x) - math.log(t)) / _LN2
    return t * math.log1p(arg) / _LN2


def rate_r12(consts: ConstantsRho, t1: float, t3: float) -> float:
    """Bits WD2 collects from WD1's active transmission."""
    _check_nonneg(t1=t1, t3=t3)
    return perspective_rate(t3, t1, consts.rho12)


def rate_r13(consts: ConstantsRho, t1: float, t3: float) -> float:
    """Bits the HAP overhears from WD1's active transmission."""
    _check_nonneg(t1=t1, t3=t3)
    return perspective_rate(t3, t1, consts.rho13)


def rate_relay(consts: ConstantsRho, t41: float, tau41: float) -> float:
    """Bits WD2 relays to the HAP spending energy tau41 over t41."""
    _check_nonneg(t41=t41, tau41=tau41)
    return perspective_rate(t41, tau41, consts.rho2)


def rate_wd2(consts: ConstantsRho, t42: float, tau42: float) -> float:
    """Bits WD2 delivers for itself spending energy tau42 over t42."""
    _check_nonneg(t42=t42, tau42=tau42)
    return perspective_rate(t42, tau42, consts.rho2)


def compose_r1(scheme: Scheme, r1_bs: float, r12: float, r13: float, r14: float) -> float:
    """WD1's end-to-end rate under the given scheme.

    Decode-and-forward bookkeeping: bits must both reach WD2 (backscatter
    plus active) and reach the HAP (overheard plus relayed), hence the min.
    Without cooperation the inter-user hop does not exist and WD1's rate is
    its direct link alone.
    """
    if scheme is Scheme.NO_COOP:
        return r13
    if scheme is Scheme.ACTIVE_COOP:
        r1_bs = 0.0
    return min(r1_bs + r12, r13 + r14)


@dataclass(frozen=True)
class RateReport:
    """All per-link rates of one schedule, bits over the unit block."""

    r1_bs: float        # WD1 -> WD2 backscatter bits
    r1_to_wd2: float    # WD1 -> WD2 active bits
    r1_to_hap: float    # WD1 -> HAP overheard bits
    r1_relayed: float   # WD1 -> HAP bits relayed by WD2
    r1: float
    r2: float
    objective: float    # min(r1, r2)
    flags: tuple = ()


@dataclass(frozen=True)
class FeasibilityReport:
    """Signed slack of every constraint; feasible iff all >= -tol."""

    entries: tuple      # ((name, slack), ...)
    tol: float = 1e-9

    @property
    def ok(self) -> bool:
        return all(slack >= -self.tol for _, slack in self.entries)

    def worst(self) -> tuple:
        return min(self.entries, key=lambda e: e[1])

    def slack(self, name: str) -> float:
        for n, s in self.entries:
            if n == name:
                return s
        raise KeyError(name)


class FeasibilityError(ValueError):
    """Raised when a schedule violates the model constraints."""

    def __init__(self, report: FeasibilityReport):
        self.report = report
        name, slack = report.worst()
        super().__init__("infeasible schedule: %s slack %.3e" % (name, slack))


def feasible(
    params: SystemParams,
    gains: ChannelGains,
    alloc: TimeAllocation,
    split: EnergySplit,
    scheme: Scheme | None = None,
    tol: float = 1e-9,
) -> FeasibilityReport:
    """Check the block-time and WD2-energy budgets plus nonnegativity.

    When a scheme is given, its pinned variables are checked as well.
    Slacks are signed: negative means violated.
    """
    _, e2_p1 = harvest_phase1(params, gains, alloc.t1)
    e2_p2 = harvest_phase2(params, gains, alloc.t2)
    entries = [
        ("time_budget", (1.0 - params.t0) - (alloc.total() - 0.0)),
        ("energy_budget", e2_p1 + e2_p2 - split.total),
        ("t1", alloc.t1),
        ("t2", alloc.t2),
        ("t3", alloc.t3),
        ("t41", alloc.t41),
        ("t42", alloc.t42),
        ("tau41", split.tau41),
        ("tau42", split.tau42),
    ]
    if scheme in (Scheme.ACTIVE_COOP, Scheme.NO_COOP):
        entries.append(("scheme_t2_zero", -alloc.t2))
    if scheme is Scheme.NO_COOP:
        entries.append(("scheme_t41_zero", -alloc.t41))
        entries.append(("scheme_tau41_zero", -split.tau41))
    return FeasibilityReport(entries=tuple(entries), tol=tol)


def evaluate(
    params: SystemParams,
    gains: ChannelGains,
    alloc: TimeAllocation,
    split: EnergySplit,
    scheme: Scheme = Scheme.AB_COOP,
    tol: float = 1e-9,
) -> RateReport:
    """Rates of a full schedule in the (t, tau) form."""
    report = feasible(params, gains, alloc, split, scheme=scheme, tol=tol)
    if not report.ok:
        raise FeasibilityError(report)
    consts = ConstantsRho.from_params(params, gains)
    r1_bs = backscatter_rate(params, gains, alloc.t2)
    r12 = rate_r12(consts, alloc.t1, alloc.t3)
    r13 = rate_r13(consts, alloc.t1, alloc.t3)
    r14 = rate_relay(consts, alloc.t41, split.tau41)
    r2 = rate_wd2(consts, alloc.t42, split.tau42)
    flags = []
    if split.tau41 > tol and alloc.t41 <= 0.0:
        flags.append("stranded_energy_tau41")
    if split.tau42 > tol and alloc.t42 <= 0.0:
        flags.append("stranded_energy_tau42")
    r1 = compose_r1(scheme, r1_bs, r12, r13, r14)
    return RateReport(
        r1_bs=r1_bs,
        r1_to_wd2=r12,
        r1_to_hap=r13,
        r1_relayed=r14,
        r1=r1,
        r2=r2,
        objective=min(r1, r2),
        flags=tuple(flags),
    )


def _shannon(t: float, p: float, h: float, n0: float) -> float:
    if t <= 0.0 or p <= 0.0 or h <= 0.0:
        return 0.0
    return t * math.log1p(p * h / n0) / _LN2


def evaluate_physical(
    params: SystemParams,
    gains: ChannelGains,
    alloc: TimeAllocation,
    powers: PowerAllocation,
    scheme: Scheme = Scheme.AB_COOP,
) -> RateReport:
    """Rates of a schedule in the physical (t, P) form.

    Agrees with :func:`evaluate` after P = tau / t substitution; used to
    verify the perspective identity.
    """
    r1_bs = backscatter_rate(params, gains, alloc.t2)
    r12 = _shannon(alloc.t3, powers.p3, gains.h12, params.n0)
    r13 = _shannon(alloc.t3, powers.p3, gains.h1, params.n0)
    r14 = _shannon(alloc.t41, powers.p41, gains.h2, params.n0)
    r2 = _shannon(alloc.t42, powers.p42, gains.h2, params.n0)
    r1 = compose_r1(scheme, r1_bs, r12, r13, r14)
    return RateReport(
        r1_bs=r1_bs,
        r1_to_wd2=r12,
        r1_to_hap=r13,
        r1_relayed=r14,
        r1=r1,
        r2=r2,
        objective=min(r1, r2),
        flags=powers.flags,
    )


def _check_nonneg(**kwargs):
    for name, value in kwargs.items():
        if not value >= 0:
            raise ValueError("%s must be >= 0, got %r" % (name, value))
