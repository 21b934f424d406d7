"""Angles, outcomes, sequences, blocks, and correlation statistics.

Everything downstream works with sequences of normalized spin projections,
i.e. values in {-1, +1}, grouped into blocks of constant axis settings.
The correlation of two equal-length sequences is

    corr(u, v) = (1/N) * sum_i u_i * v_i          in [-1, 1]

and relates to the probability of equality by p = (1 + corr) / 2.
Products are accumulated as exact integers so that the finite-N inequality
checks elsewhere in the package are arithmetic identities, not float
approximations.  Partial-mean extrema past a sqrt(N) burn-in serve as
finite-sample proxies for liminf/limsup of a possibly non-convergent mean.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "ALICE_SYMBOLS",
    "BOB_SYMBOLS",
    "SYMBOLS",
    "SYM_E",
    "SYM_EP",
    "SYM_P",
    "SYM_PP",
    "Angle",
    "Block",
    "CorrelationEstimate",
    "OrientedAxis",
    "OutcomeSequence",
    "Probability",
    "Provenance",
    "Side",
    "angle_between",
    "corr_to_prob",
    "correlate",
    "default_burn_in",
    "merge",
    "mirror",
    "pair_symbol",
    "prob_to_corr",
    "side_of_symbol",
]

# Canonical axis symbols.  E and E' live on Alice's side, P and P' on Bob's.
SYM_E = "E"
SYM_EP = "E'"
SYM_P = "P"
SYM_PP = "P'"
SYMBOLS = (SYM_E, SYM_EP, SYM_P, SYM_PP)
ALICE_SYMBOLS = frozenset({SYM_E, SYM_EP})
BOB_SYMBOLS = frozenset({SYM_P, SYM_PP})


class Side(enum.Enum):
    ALICE = "alice"
    BOB = "bob"

    @property
    def opposite(self) -> "Side":
        return Side.BOB if self is Side.ALICE else Side.ALICE


class Provenance(enum.Enum):
    MEASURED = "measured"
    COUNTERFACTUAL = "counterfactual"


def side_of_symbol(symbol: str) -> Side:
    """Side an axis symbol belongs to (E, E' -> Alice; P, P' -> Bob)."""
    if symbol in ALICE_SYMBOLS:
        return Side.ALICE
    if symbol in BOB_SYMBOLS:
        return Side.BOB
    raise ValueError(f"unknown axis symbol: {symbol!r}")


def pair_symbol(a: str, b: str) -> str:
    """Canonical display form for a correlation, e.g. '<E,P>'.

    The two axis symbols are sorted into the fixed order E, E', P, P'
    so <P,E> and <E,P> name the same correlation.
    """
    if a not in SYMBOLS or b not in SYMBOLS:
        raise ValueError(f"unknown axis symbol in pair: ({a!r}, {b!r})")
    first, second = sorted((a, b), key=SYMBOLS.index)
    return f"<{first},{second}>"


def _wrap(radians: float) -> float:
    """Map any real angle to the interval (-pi, pi]."""
    r = math.remainder(radians, math.tau)
    if r <= -math.pi:
        r += math.tau
    return r


@dataclass(frozen=True)
class Angle:
    """Planar angle in radians, normalized to (-pi, pi] at construction."""

    radians: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "radians", _wrap(float(self.radians)))

    def __sub__(self, other: "Angle") -> "Angle":
        return Angle(self.radians - other.radians)

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.radians + other.radians)

    def __neg__(self) -> "Angle":
        return Angle(-self.radians)

    def __float__(self) -> float:
        return self.radians


def as_angle(value: "Angle | float") -> Angle:
    return value if isinstance(value, Angle) else Angle(float(value))


@dataclass(frozen=True)
class OrientedAxis:
    """An oriented measurement axis: one planar angle plus the side using it."""

    angle: Angle
    side: Side

    @property
    def opposite(self) -> "OrientedAxis":
        return OrientedAxis(self.angle, self.side.opposite)


def angle_between(a1: OrientedAxis, a2: OrientedAxis) -> Angle:
    """Signed, normalized angle from axis a1 to axis a2."""
    return a2.angle - a1.angle


@dataclass(frozen=True)
class Probability:
    """A probability, validated to lie in [0, 1]."""

    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability out of range [0, 1]: {self.p}")

    def __float__(self) -> float:
        return self.p


def corr_to_prob(c: float) -> Probability:
    """Probability of equality for a given correlation: p = (1 + c) / 2."""
    if not -1.0 <= c <= 1.0:
        raise ValueError(f"correlation out of range [-1, 1]: {c}")
    return Probability((1.0 + c) / 2.0)


def prob_to_corr(p: "Probability | float") -> float:
    """Correlation for a given probability of equality: c = 2p - 1."""
    value = float(p)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"probability out of range [0, 1]: {value}")
    return 2.0 * value - 1.0


class OutcomeSequence:
    """A finite run of +/-1 outcomes observed (or inferred) along one axis.

    Values are stored as an immutable int8 array.  ``provenance`` records
    whether the run was actually measured or only assigned by a
    counterfactual model.
    """

    __slots__ = ("axis", "values", "provenance")

    def __init__(
        self,
        axis: OrientedAxis,
        values: Iterable[int] | np.ndarray,
        provenance: Provenance = Provenance.MEASURED,
    ) -> None:
        arr = np.asarray(values, dtype=np.int8)
        if arr.ndim != 1:
            raise ValueError("outcome values must be one-dimensional")
        if arr.size and not np.all(np.abs(arr) == 1):
            raise ValueError("outcome values must all be +1 or -1")
        arr = arr.copy()
        arr.flags.writeable = False
        self.axis = axis
        self.values = arr
        self.provenance = provenance

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OutcomeSequence):
            return NotImplemented
        return (
            self.axis == other.axis
            and self.provenance == other.provenance
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:
        return (
            f"OutcomeSequence(axis={self.axis!r}, n={len(self)}, "
            f"provenance={self.provenance.value})"
        )

    def negate(self) -> "OutcomeSequence":
        return OutcomeSequence(self.axis, -self.values, self.provenance)


def mirror(q: OutcomeSequence) -> OutcomeSequence:
    """The same run as seen from the opposite side of the source.

    Perfect anti-correlation at equal axes means the opposite side's value
    is the negation: every value flips sign, the axis keeps its angle but
    moves to the other side.  mirror is an involution.
    """
    return OutcomeSequence(q.axis.opposite, -q.values, q.provenance)


@dataclass(frozen=True)
class Block:
    """A stretch of pairs measured with constant axis settings.

    ``axes`` maps axis symbols (E, E', P, P') to their oriented axes; the
    symbols must sit on their conventional sides.
    """

    axes: Mapping[str, OrientedAxis]
    count: int
    index: int = 0

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"block count must be >= 1, got {self.count}")
        axes = dict(self.axes)
        for symbol, axis in axes.items():
            expected = side_of_symbol(symbol)
            if axis.side is not expected:
                raise ValueError(
                    f"axis {symbol!r} must be on side {expected.value}, "
                    f"got {axis.side.value}"
                )
        object.__setattr__(self, "axes", axes)

    @classmethod
    def from_angles(
        cls, angles: Mapping[str, "Angle | float"], count: int, index: int = 0
    ) -> "Block":
        """Build a block from symbol -> angle, inferring sides from symbols."""
        axes = {
            sym: OrientedAxis(as_angle(theta), side_of_symbol(sym))
            for sym, theta in angles.items()
        }
        return cls(axes=axes, count=count, index=index)


def default_burn_in(n: int) -> int:
    """Samples ignored before partial-mean extrema are tracked: ceil(sqrt(N))."""
    return math.isqrt(max(n, 0) - 1) + 1 if n > 0 else 0


@dataclass(frozen=True)
class CorrelationEstimate:
    """Mergeable running estimate of a correlation.

    ``sum_products`` is the exact integer sum of pairwise products, so means
    merge exactly.  ``running_min_mean``/``running_max_mean`` are the extrema
    of the partial means at indices past ``burn_in``; they act as finite-N
    stand-ins for liminf/limsup when convergence is not guaranteed.  For an
    estimate with no tracked partials (n <= burn_in) both extrema collapse
    to the mean.
    """

    n: int
    sum_products: int
    burn_in: int
    running_min_mean: float = field(default=math.nan)
    running_max_mean: float = field(default=math.nan)

    @property
    def mean(self) -> float:
        if self.n == 0:
            raise ValueError("mean of an empty estimate is undefined")
        return self.sum_products / self.n

    @property
    def straddles_zero(self) -> bool:
        return self.running_min_mean <= 0.0 <= self.running_max_mean

    @classmethod
    def empty(cls) -> "CorrelationEstimate":
        return cls(n=0, sum_products=0, burn_in=0)


def correlate(
    u: OutcomeSequence,
    v: OutcomeSequence,
    burn_in: int | None = None,
) -> CorrelationEstimate:
    """Correlation of two equal-length outcome sequences.

    The mean is sum(u_i * v_i) / N with an exact integer numerator.  Partial
    means at indices > burn_in (default ceil(sqrt(N))) feed the running
    extrema.
    """
    n = len(u)
    if n == 0:
        raise ValueError("cannot correlate empty sequences")
    if len(v) != n:
        raise ValueError(f"length mismatch: {n} vs {len(v)}")
    if burn_in is None:
        burn_in = default_burn_in(n)
    products = u.values.astype(np.int64) * v.values.astype(np.int64)
    csum = np.cumsum(products)
    total = int(csum[-1])
    mean = total / n
    if n > burn_in:
        partial = csum[burn_in:] / np.arange(burn_in + 1, n + 1)
        rmin = float(partial.min())
        rmax = float(partial.max())
    else:
        rmin = rmax = mean
    return CorrelationEstimate(
        n=n,
        sum_products=total,
        burn_in=burn_in,
        running_min_mean=rmin,
        running_max_mean=rmax,
    )


def merge(e1: CorrelationEstimate, e2: CorrelationEstimate) -> CorrelationEstimate:
    """Combine two estimates as if their sequences had been concatenated.

    Counts and product sums are exact.  The extrema are conservative: the
    merged interval contains the interval that recomputing on the actual
    concatenation would give (the sqrt-N burn-in discards early partials of
    the concatenation that neither input tracked).
    """
    if e1.n == 0:
        return e2
    if e2.n == 0:
        return e1
    n = e1.n + e2.n
    total = e1.sum_products + e2.sum_products
    mean = total / n
    return CorrelationEstimate(
        n=n,
        sum_products=total,
        burn_in=default_burn_in(n),
        running_min_mean=min(e1.running_min_mean, e2.running_min_mean, mean),
        running_max_mean=max(e1.running_max_mean, e2.running_max_mean, mean),
    )
