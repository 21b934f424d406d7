"""Pluggable counterfactual-assignment models.

A counterfactual model gives every emitted pair one complete +/-1 tuple
over all configured axes, so a value exists for each axis whether or not
that axis is the one actually measured (and the measured axis gets the
same value it would have gotten counterfactually).  Three models ship:

* ``LHVSign`` -- a local hidden-variable instance.  Each pair carries a
  uniform planar angle lam; the outcome along an axis at angle t is
  sign(cos(lam - t)) on Alice's side and its negation on Bob's.  Two-point
  functions are piecewise linear in the angle gap d = |t1 - t2|:
  1 - 2d/pi on the same side, -(1 - 2d/pi) across sides.
* ``CollapseSequential`` -- a nonlocal, measure-P-first rule: P is a fair
  coin, then both Alice-side values are drawn independently from the state
  the P measurement prepares.  Same-side correlations come out as
  cos(tE - tP) * cos(tE' - tP), generally nonzero, which is what makes the
  model useful as a violation witness.
* ``FileReplay`` -- verbatim +/-1 tuples from a text file, for adversarial
  and regression vectors.

Assignments are pure functions of (seed, pair index), so block generation
is order-independent and safely parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .core import (
    SYM_E,
    SYM_EP,
    SYM_P,
    SYM_PP,
    Angle,
    Block,
    OutcomeSequence,
    Provenance,
    Side,
    as_angle,
)
from .quantum import SingletSource, born_outcomes, pair_uniforms

__all__ = [
    "AssignmentBlock",
    "CollapseSequential",
    "FileReplay",
    "HiddenVariable",
    "LHVSign",
    "ReplayFormatError",
    "UnsupportedAxisError",
    "collapse_sequential_assign",
    "generate_block",
    "lhv_outcome",
    "lhv_outcomes",
    "model_from_spec",
]


class UnsupportedAxisError(ValueError):
    """The model has no prescription for one of the requested axes."""


class ReplayFormatError(ValueError):
    """A replay file does not match the expected layout."""


@dataclass(frozen=True)
class HiddenVariable:
    """Per-pair hidden planar direction, drawn uniformly on the circle."""

    angle: Angle


@dataclass(frozen=True)
class AssignmentBlock:
    """A block's complete outcome tuples: one sequence per configured axis."""

    block: Block
    sequences: Mapping[str, OutcomeSequence]

    def __post_init__(self) -> None:
        if set(self.sequences) != set(self.block.axes):
            raise ValueError(
                f"sequences {sorted(self.sequences)} do not match block axes "
                f"{sorted(self.block.axes)}"
            )
        for symbol, seq in self.sequences.items():
            if len(seq) != self.block.count:
                raise ValueError(
                    f"sequence {symbol!r} has {len(seq)} values, "
                    f"block expects {self.block.count}"
                )
        object.__setattr__(self, "sequences", dict(self.sequences))

    def __getitem__(self, symbol: str) -> OutcomeSequence:
        return self.sequences[symbol]


def lhv_outcomes(
    lambdas: np.ndarray, theta: "Angle | float", side: Side
) -> np.ndarray:
    """Vectorized hidden-variable outcomes along one axis.

    sign(cos(lam - t)) with ties resolved to +1; Bob's side is negated so
    equal-angle opposite-side values cancel exactly on every pair.
    """
    c = np.cos(np.asarray(lambdas, dtype=np.float64) - float(as_angle(theta).radians))
    out = np.where(c >= 0.0, 1, -1).astype(np.int8)
    return out if side is Side.ALICE else (-out).astype(np.int8)


def lhv_outcome(
    lam: "HiddenVariable | Angle | float", theta: "Angle | float", side: Side
) -> int:
    """Single hidden-variable outcome (see ``lhv_outcomes``)."""
    value = lam.angle.radians if isinstance(lam, HiddenVariable) else float(as_angle(lam).radians)
    return int(lhv_outcomes(np.array([value]), theta, side)[0])


class LHVSign:
    """Local hidden-variable model; defines every axis on both sides."""

    name = "lhv-sign"

    def lambdas(self, block: Block, seed: int) -> np.ndarray:
        """Hidden angles for the block's pairs, uniform on [0, 2*pi)."""
        u = pair_uniforms(seed, block.index * block.count, block.count)
        return u[:, 0] * math.tau

    def assign(self, block: Block, seed: int) -> dict[str, np.ndarray]:
        lam = self.lambdas(block, seed)
        return {
            symbol: lhv_outcomes(lam, axis.angle, axis.side)
            for symbol, axis in block.axes.items()
        }


class CollapseSequential:
    """Nonlocal measure-P-first model; supports axes {E, E', P} only.

    There is no prescription for a second counterfactual on the collapsing
    side, so requesting P' is an error rather than a guess.
    """

    name = "collapse-sequential"

    def assign(self, block: Block, seed: int) -> dict[str, np.ndarray]:
        if SYM_PP in block.axes:
            raise UnsupportedAxisError(
                "collapse-sequential defines no second axis on the P side"
            )
        if SYM_P not in block.axes:
            raise UnsupportedAxisError("collapse-sequential requires a P axis")
        theta_p = block.axes[SYM_P].angle.radians
        u = pair_uniforms(seed, block.index * block.count, block.count)
        p = np.where(u[:, 0] < 0.5, 1, -1).astype(np.int8)
        out: dict[str, np.ndarray] = {SYM_P: p}
        prepared = -p  # far particle collapses to the opposite sign along theta_p
        for column, symbol in ((1, SYM_E), (2, SYM_EP)):
            if symbol in block.axes:
                delta = block.axes[symbol].angle.radians - theta_p
                out[symbol] = born_outcomes(prepared, delta, u[:, column])
        return out


def collapse_sequential_assign(
    pair: int,
    theta_p: "Angle | float",
    theta_e: "Angle | float",
    theta_ep: "Angle | float",
    source: SingletSource,
) -> tuple[int, int, int]:
    """One pair's (P, E, E') tuple under the measure-P-first rule.

    Pure in (source seed, pair index): P is a fair coin; E and E' are
    independent measurements of the state |-P> prepared along theta_p.
    """
    u = pair_uniforms(source.rng_seed, pair, 1)[0]
    p = 1 if u[0] < 0.5 else -1
    tp = float(as_angle(theta_p).radians)
    e = int(born_outcomes(-p, float(as_angle(theta_e).radians) - tp, u[1]))
    ep = int(born_outcomes(-p, float(as_angle(theta_ep).radians) - tp, u[2]))
    return p, e, ep


class FileReplay:
    """Replay +/-1 tuples from a plain-text vector file.

    Line 1 is a header of ``symbol=angle`` tokens (angles in radians,
    symbols among E, E', P, P'); each following non-empty line carries one
    pair's values in header order.
    """

    name = "file-replay"

    def __init__(self, path: "str | Path") -> None:
        self.path = Path(path)

    def _parse_header(self, line: str) -> dict[str, float]:
        header: dict[str, float] = {}
        for token in line.split():
            sym, sep, val = token.partition("=")
            if not sep:
                raise ReplayFormatError(
                    f"{self.path}: header token {token!r} is not symbol=angle"
                )
            if sym not in (SYM_E, SYM_EP, SYM_P, SYM_PP):
                raise ReplayFormatError(f"{self.path}: unknown axis symbol {sym!r}")
            if sym in header:
                raise ReplayFormatError(f"{self.path}: duplicate axis {sym!r}")
            try:
                header[sym] = float(val)
            except ValueError as exc:
                raise ReplayFormatError(
                    f"{self.path}: bad angle for {sym!r}: {val!r}"
                ) from exc
        if not header:
            raise ReplayFormatError(f"{self.path}: empty header")
        return header

    def assign(self, block: Block, seed: int) -> dict[str, np.ndarray]:
        try:
            lines = self.path.read_text().splitlines()
        except OSError as exc:
            raise ReplayFormatError(f"cannot read replay file {self.path}: {exc}") from exc
        lines = [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines:
            raise ReplayFormatError(f"{self.path}: file is empty")
        header = self._parse_header(lines[0])
        order = list(header)
        missing = set(block.axes) - set(header)
        if missing:
            raise ReplayFormatError(
                f"{self.path}: block needs axes {sorted(missing)} not in header"
            )
        for symbol, axis in block.axes.items():
            if abs((as_angle(header[symbol]) - axis.angle).radians) > 1e-9:
                raise ReplayFormatError(
                    f"{self.path}: angle mismatch for {symbol!r}: file has "
                    f"{header[symbol]}, block wants {axis.angle.radians}"
                )
        rows = lines[1:]
        if len(rows) < block.count:
            raise ReplayFormatError(
                f"{self.path}: {len(rows)} data rows, block needs {block.count}"
            )
        data = np.empty((block.count, len(order)), dtype=np.int8)
        for i, row in enumerate(rows[: block.count]):
            fields = row.split()
            if len(fields) != len(order):
                raise ReplayFormatError(
                    f"{self.path}: line {i + 2} has {len(fields)} values, "
                    f"expected {len(order)}"
                )
            try:
                values = [int(f) for f in fields]
            except ValueError as exc:
                raise ReplayFormatError(f"{self.path}: line {i + 2}: {exc}") from exc
            if any(v not in (-1, 1) for v in values):
                raise ReplayFormatError(
                    f"{self.path}: line {i + 2}: values must be +1 or -1"
                )
            data[i] = values
        return {sym: data[:, order.index(sym)] for sym in block.axes}


CounterfactualModel = LHVSign | CollapseSequential | FileReplay


def generate_block(
    model: "CounterfactualModel", block: Block, seed: int
) -> AssignmentBlock:
    """Run a model over a block: one complete +/-1 tuple per pair.

    Unprimed axes are tagged as measured, primed ones as counterfactual;
    the measured value and the counterfactual value on the same axis are
    one and the same entry, so the single-tuple convention holds by
    construction.
    """
    raw = model.assign(block, seed)
    sequences = {
        symbol: OutcomeSequence(
            axis=block.axes[symbol],
            values=raw[symbol],
            provenance=(
                Provenance.MEASURED
                if symbol in (SYM_E, SYM_P)
                else Provenance.COUNTERFACTUAL
            ),
        )
        for symbol in block.axes
    }
    return AssignmentBlock(block=block, sequences=sequences)


def model_from_spec(name: str, path: "str | Path | None" = None) -> "CounterfactualModel":
    """Build a model from its CLI/config name."""
    key = name.strip().lower().replace("_", "-")
    if key in ("lhv-sign", "lhv", "lhvsign"):
        return LHVSign()
    if key in ("collapse-sequential", "collapse", "collapsesequential"):
        return CollapseSequential()
    if key in ("file-replay", "replay", "filereplay"):
        if path is None:
            raise ValueError("file-replay model needs a path (model.path)")
        return FileReplay(path)
    raise ValueError(f"unknown counterfactual model: {name!r}")
