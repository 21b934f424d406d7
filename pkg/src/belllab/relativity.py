"""Spacetime ordering and hypothesis-gated correlation definability.

Events live in 1+1 dimensions with c = 1.  A pair of spacelike-separated
measurement events has no invariant time order: for any such pair there
are boosts realizing either order, and ``find_observer`` constructs them.

``definable_correlations`` is the decision engine for which of the six
correlations among the axes E, E' (Alice) and P, P' (Bob) have definite
values under a hypothesis set drawn from {QM, WeakRealism, Locality,
EACP, FWP}:

* QM alone fixes only the measured cross correlation <E,P> = -cos(dEP).
* Weak realism makes the primed sequences exist at all.
* Locality transfers the quantum value to every pair, giving -cos on
  cross-side pairs and +cos on same-side pairs.
* The effect-after-cause principle (EACP) alone still fixes the three
  cross correlations <E,P>, <E,P'>, <E',P>, but <E',P'> stops making
  sense, and a same-side pair like <E,E'> is pinned (to zero) only when
  its axes are orthogonal and the free-will principle is also assumed;
  otherwise only the straddle liminf <= 0 <= limsup survives.

``no_correlation_check`` runs a counterfactual model and tests the zero
prediction empirically; a model that correlates orthogonal same-side axes
is thereby flagged as an EACP-violation witness.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import (
    SYM_E,
    SYM_EP,
    SYM_P,
    SYM_PP,
    Angle,
    Block,
    CorrelationEstimate,
    as_angle,
    correlate,
    pair_symbol,
    side_of_symbol,
)
from .realism import generate_block

__all__ = [
    "Boost",
    "CorrelationStatus",
    "DefinabilityEngine",
    "Hypothesis",
    "HypothesisSet",
    "IntervalType",
    "NoCorrelationReport",
    "ORTHOGONALITY_TOL",
    "SIX_PAIRS",
    "SpacetimeEvent",
    "StatusKind",
    "UndefinedCorrelationError",
    "boosted_event",
    "boosted_order",
    "boosted_time",
    "definable_correlations",
    "find_observer",
    "interval_type",
    "no_correlation_check",
]

# Tolerance on |cos(delta)| for treating two axes as orthogonal.
ORTHOGONALITY_TOL = 1e-9

# The six correlations among the four standard axes, in canonical order.
SIX_PAIRS = (
    (SYM_E, SYM_P),
    (SYM_E, SYM_PP),
    (SYM_EP, SYM_P),
    (SYM_EP, SYM_PP),
    (SYM_E, SYM_EP),
    (SYM_P, SYM_PP),
)


class UndefinedCorrelationError(ValueError):
    """A correlation without a definite value was required."""


@dataclass(frozen=True)
class SpacetimeEvent:
    """Event at position x and lab time t; natural units with c = 1."""

    x: float
    t: float

    C = 1.0


class IntervalType(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def interval_type(e1: SpacetimeEvent, e2: SpacetimeEvent) -> IntervalType:
    """Classify the separation by the sign of dx^2 - c^2 dt^2."""
    dx = e2.x - e1.x
    dt = e2.t - e1.t
    s = dx * dx - SpacetimeEvent.C**2 * dt * dt
    if s > 0:
        return IntervalType.SPACELIKE
    if s < 0:
        return IntervalType.TIMELIKE
    return IntervalType.LIGHTLIKE


@dataclass(frozen=True)
class Boost:
    """Lorentz boost along x with velocity beta (units of c), |beta| < 1."""

    beta: float

    def __post_init__(self) -> None:
        if not abs(self.beta) < 1.0:
            raise ValueError(f"|beta| must be < 1, got {self.beta}")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.beta * self.beta)


def boosted_time(e: SpacetimeEvent, b: Boost) -> float:
    """Time coordinate of the event for the boosted observer."""
    return b.gamma * (e.t - b.beta * e.x)


def boosted_event(e: SpacetimeEvent, b: Boost) -> SpacetimeEvent:
    """Full coordinates of the event for the boosted observer."""
    return SpacetimeEvent(
        x=b.gamma * (e.x - b.beta * e.t),
        t=b.gamma * (e.t - b.beta * e.x),
    )


def boosted_order(e1: SpacetimeEvent, e2: SpacetimeEvent, b: Boost) -> int:
    """Sign of t2' - t1' in the boosted frame.

    +1 means e1 happens first for that observer, -1 means e2 does,
    0 means they are simultaneous there.
    """
    dt = boosted_time(e2, b) - boosted_time(e1, b)
    return (dt > 0) - (dt < 0)


def find_observer(
    e_event: SpacetimeEvent, p_event: SpacetimeEvent, desired: str
) -> Boost:
    """A boost under which the desired measurement comes first.

    ``desired`` is "E-P" (the E event first) or "P-E".  Only spacelike
    pairs have frame-dependent order; anything else is an error.  The
    returned velocity is the midpoint of the admissible range.
    """
    if interval_type(e_event, p_event) is not IntervalType.SPACELIKE:
        raise ValueError(
            "events are causally ordered (not spacelike); "
            "no observer can reverse their order"
        )
    if desired == "E-P":
        first, second = e_event, p_event
    elif desired == "P-E":
        first, second = p_event, e_event
    else:
        raise ValueError(f"desired order must be 'E-P' or 'P-E', got {desired!r}")
    dt = first.t - second.t
    dx = first.x - second.x
    # want t'_first < t'_second, i.e. beta * dx > dt; spacelike => |dx| > |dt|
    bound = dt / dx
    beta = (bound + 1.0) / 2.0 if dx > 0 else (bound - 1.0) / 2.0
    return Boost(beta)


class Hypothesis(enum.Enum):
    QM = "QM"
    WEAK_REALISM = "WR"
    LOCALITY = "Locality"
    EACP = "EACP"
    FWP = "FWP"


_HYPOTHESIS_ALIASES = {
    "qm": Hypothesis.QM,
    "wr": Hypothesis.WEAK_REALISM,
    "weakrealism": Hypothesis.WEAK_REALISM,
    "weak-realism": Hypothesis.WEAK_REALISM,
    "weak_realism": Hypothesis.WEAK_REALISM,
    "locality": Hypothesis.LOCALITY,
    "local": Hypothesis.LOCALITY,
    "eacp": Hypothesis.EACP,
    "fwp": Hypothesis.FWP,
    "freewill": Hypothesis.FWP,
    "free-will": Hypothesis.FWP,
}


@dataclass(frozen=True)
class HypothesisSet:
    """A set of working hypotheses; QM is always included.

    Locality implies the effect-after-cause principle, so ``eacp`` reads
    true whenever either flag is present.
    """

    flags: frozenset[Hypothesis]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "flags", frozenset(self.flags) | {Hypothesis.QM}
        )

    @classmethod
    def of(cls, *hypotheses: Hypothesis) -> "HypothesisSet":
        return cls(frozenset(hypotheses))

    @classmethod
    def parse(cls, text: str) -> "HypothesisSet":
        flags = set()
        for token in text.replace("+", ",").split(","):
            token = token.strip()
            if not token:
                continue
            key = token.lower()
            if key not in _HYPOTHESIS_ALIASES:
                raise ValueError(f"unknown hypothesis: {token!r}")
            flags.add(_HYPOTHESIS_ALIASES[key])
        return cls(frozenset(flags))

    def __contains__(self, h: Hypothesis) -> bool:
        return h in self.flags

    @property
    def weak_realism(self) -> bool:
        return Hypothesis.WEAK_REALISM in self.flags

    @property
    def locality(self) -> bool:
        return Hypothesis.LOCALITY in self.flags

    @property
    def eacp(self) -> bool:
        return Hypothesis.EACP in self.flags or self.locality

    @property
    def fwp(self) -> bool:
        return Hypothesis.FWP in self.flags

    def label(self) -> str:
        order = [
            Hypothesis.QM,
            Hypothesis.WEAK_REALISM,
            Hypothesis.LOCALITY,
            Hypothesis.EACP,
            Hypothesis.FWP,
        ]
        return "{" + ",".join(h.value for h in order if h in self.flags) + "}"


class StatusKind(enum.Enum):
    DEFINED = "defined"
    ZERO_BY_NO_CORRELATION = "zero-by-no-correlation"
    BOUNDED = "bounded"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class CorrelationStatus:
    """Definability verdict for one correlation under a hypothesis set.

    ``value`` is set for definite statuses (DEFINED and the lemma's zero).
    For BOUNDED, ``bound_lo``/``bound_hi`` delimit the interval guaranteed
    to lie between liminf and limsup of the running mean (always [0, 0]
    here: the parity argument certifies liminf <= 0 <= limsup and nothing
    more).  ``justification`` names the principle that decided the status.
    """

    pair: tuple[str, str]
    kind: StatusKind
    value: float | None = None
    bound_lo: float | None = None
    bound_hi: float | None = None
    justification: str = ""

    @property
    def symbol(self) -> str:
        return pair_symbol(*self.pair)

    @property
    def definite(self) -> bool:
        return self.value is not None

    def to_dict(self) -> dict:
        return {
            "symbol": self.symbol,
            "status": self.kind.value,
            "value": self.value,
            "lo": self.bound_lo,
            "hi": self.bound_hi,
            "justification": self.justification,
        }


def _pair_kind(a: str, b: str) -> str:
    sides = {side_of_symbol(a), side_of_symbol(b)}
    return "cross" if len(sides) == 2 else "same"


class DefinabilityEngine:
    """Decides status and value of each correlation under fixed hypotheses."""

    def __init__(self, hypotheses: HypothesisSet) -> None:
        self.hypotheses = hypotheses

    def status(
        self, a: str, b: str, angles: Mapping[str, "Angle | float"]
    ) -> CorrelationStatus:
        for symbol in (a, b):
            if symbol not in angles:
                raise KeyError(f"no angle supplied for axis {symbol!r}")
        h = self.hypotheses
        pair = (a, b)
        theta_a = as_angle(angles[a])
        theta_b = as_angle(angles[b])
        delta = (theta_a - theta_b).radians
        needs_realism = a in (SYM_EP, SYM_PP) or b in (SYM_EP, SYM_PP)
        if needs_realism and not h.weak_realism:
            return CorrelationStatus(
                pair, StatusKind.UNDEFINED, justification="requires-weak-realism"
            )
        if _pair_kind(a, b) == "cross":
            both_primed = a in (SYM_EP, SYM_PP) and b in (SYM_EP, SYM_PP)
            if not needs_realism:
                return CorrelationStatus(
                    pair, StatusKind.DEFINED, value=-math.cos(delta),
                    justification="twisted-malus",
                )
            if both_primed:
                if h.locality:
                    return CorrelationStatus(
                        pair, StatusKind.DEFINED, value=-math.cos(delta),
                        justification="locality-mirror",
                    )
                return CorrelationStatus(
                    pair, StatusKind.UNDEFINED,
                    justification="undefined-without-locality",
                )
            if h.locality:
                return CorrelationStatus(
                    pair, StatusKind.DEFINED, value=-math.cos(delta),
                    justification="locality-twisted-malus",
                )
            if h.eacp:
                return CorrelationStatus(
                    pair, StatusKind.DEFINED, value=-math.cos(delta),
                    justification="eacp-transfer",
                )
            return CorrelationStatus(
                pair, StatusKind.UNDEFINED, justification="no-value-transfer-principle"
            )
        # same-side pair: one measured axis, one counterfactual
        if h.locality:
            return CorrelationStatus(
                pair, StatusKind.DEFINED, value=math.cos(delta),
                justification="locality-mirror",
            )
        if h.eacp:
            if h.fwp and abs(math.cos(delta)) <= ORTHOGONALITY_TOL:
                return CorrelationStatus(
                    pair, StatusKind.ZERO_BY_NO_CORRELATION, value=0.0,
                    justification="no-correlation-lemma",
                )
            return CorrelationStatus(
                pair, StatusKind.BOUNDED, bound_lo=0.0, bound_hi=0.0,
                justification="parity-straddle",
            )
        return CorrelationStatus(
            pair, StatusKind.UNDEFINED, justification="no-value-transfer-principle"
        )

    def statuses(
        self,
        angles: Mapping[str, "Angle | float"],
        pairs: Iterable[tuple[str, str]] = SIX_PAIRS,
    ) -> list[CorrelationStatus]:
        return [self.status(a, b, angles) for a, b in pairs]

    def value_or_raise(
        self, a: str, b: str, angles: Mapping[str, "Angle | float"]
    ) -> float:
        st = self.status(a, b, angles)
        if st.value is None:
            raise UndefinedCorrelationError(
                f"{st.symbol} has no definite value under "
                f"{self.hypotheses.label()} ({st.kind.value})"
            )
        return st.value

    def values(self, angles: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
        """Vectorized definite values for every pair of supplied axes.

        Entries are NaN where no definite value exists; suitable as the
        value source of ``falsification_search``.
        """
        h = self.hypotheses
        symbols = [s for s in (SYM_E, SYM_EP, SYM_P, SYM_PP) if s in angles]
        arrays = {s: np.asarray(angles[s], dtype=np.float64) for s in symbols}
        out: dict[str, np.ndarray] = {}
        for i, a in enumerate(symbols):
            for b in symbols[i + 1:]:
                delta = arrays[a] - arrays[b]
                cos_d = np.cos(delta)
                needs_realism = a in (SYM_EP, SYM_PP) or b in (SYM_EP, SYM_PP)
                if _pair_kind(a, b) == "cross":
                    both_primed = a in (SYM_EP, SYM_PP) and b in (SYM_EP, SYM_PP)
                    if not needs_realism:
                        value = -cos_d
                    elif not h.weak_realism or (both_primed and not h.locality):
                        value = np.full_like(cos_d, np.nan)
                    elif h.locality or h.eacp:
                        value = -cos_d
                    else:
                        value = np.full_like(cos_d, np.nan)
                else:
                    if not h.weak_realism:
                        value = np.full_like(cos_d, np.nan)
                    elif h.locality:
                        value = cos_d
                    elif h.eacp and h.fwp:
                        value = np.where(
                            np.abs(cos_d) <= ORTHOGONALITY_TOL, 0.0, np.nan
                        )
                    else:
                        value = np.full_like(cos_d, np.nan)
                out[pair_symbol(a, b)] = value
        return out


def definable_correlations(
    h: HypothesisSet,
    angles: Mapping[str, "Angle | float"],
    pairs: Iterable[tuple[str, str]] | None = None,
) -> list[CorrelationStatus]:
    """Status of each queried correlation under the hypothesis set.

    By default all six pairs among {E, E', P, P'} are queried, which
    requires an angle for each axis; pass ``pairs`` to restrict the query.
    """
    engine = DefinabilityEngine(h)
    return engine.statuses(angles, SIX_PAIRS if pairs is None else pairs)


class NoCorrelationVerdict(enum.Enum):
    CONSISTENT = "consistent"
    WITNESS = "witness-of-eacp-violation"


@dataclass(frozen=True)
class NoCorrelationReport:
    """Empirical test of the zero prediction for same-side axes."""

    model: str
    theta_e: float
    theta_ep: float
    theta_p: float
    orthogonal: bool
    estimate: CorrelationEstimate
    tolerance: float
    verdict: NoCorrelationVerdict

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "theta_E": self.theta_e,
            "theta_E'": self.theta_ep,
            "theta_P": self.theta_p,
            "orthogonal_axes": self.orthogonal,
            "n": self.estimate.n,
            "mean": self.estimate.mean,
            "running_min_mean": self.estimate.running_min_mean,
            "running_max_mean": self.estimate.running_max_mean,
            "tolerance": self.tolerance,
            "verdict": self.verdict.value,
        }


def no_correlation_check(
    model,
    theta_e: "Angle | float",
    theta_ep: "Angle | float",
    theta_p: "Angle | float",
    n_pairs: int,
    seed: int = 0,
    tolerance: float | None = None,
) -> NoCorrelationReport:
    """Estimate <E,E'> for a model and test it against zero.

    CONSISTENT requires the mean within tolerance (default 4/sqrt(N)) of 0
    and the partial-mean extrema to straddle 0; anything else marks the
    model as an EACP-violation witness.  Non-orthogonal axes are allowed
    but flagged, since the zero prediction only covers the orthogonal case.
    """
    theta_e = as_angle(theta_e)
    theta_ep = as_angle(theta_ep)
    theta_p = as_angle(theta_p)
    if tolerance is None:
        tolerance = 4.0 / math.sqrt(n_pairs)
    block = Block.from_angles(
        {SYM_E: theta_e, SYM_EP: theta_ep, SYM_P: theta_p}, count=n_pairs
    )
    assignment = generate_block(model, block, seed)
    est = correlate(assignment[SYM_E], assignment[SYM_EP])
    ok = abs(est.mean) <= tolerance and est.straddles_zero
    return NoCorrelationReport(
        model=getattr(model, "name", type(model).__name__),
        theta_e=theta_e.radians,
        theta_ep=theta_ep.radians,
        theta_p=theta_p.radians,
        orthogonal=abs(math.cos((theta_e - theta_ep).radians)) <= ORTHOGONALITY_TOL,
        estimate=est,
        tolerance=tolerance,
        verdict=(
            NoCorrelationVerdict.CONSISTENT if ok else NoCorrelationVerdict.WITNESS
        ),
    )
