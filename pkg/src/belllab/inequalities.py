"""Finite-N Bell identities, inequality evaluation, and polytope feasibility.

For any equal-length +/-1 sequences the factorizations

    x*y - x*z = x*y*(1 - y*z)             (three sequences)
    x*(y + z) + w*(y - z),  with min(|y+z|, |y-z|) = 0 and max = 2

force, exactly and at every finite N,

    |Sxy - Sxz| <= N - Syz                       (three-sequence check)
    |Sxy + Sxz| + |Swy - Swz| <= 2N              (four-sequence check)

where Suv is the integer sum of pairwise products.  These are arithmetic
identities: any actual triple or quadruple of sequences satisfies them, no
matter how it was produced.  The asymptotic forms

    |<x,y> - <x,z>| <= 1 - <y,z>                 (V3)
    |<x,y> + <x,z>| + |<w,y> - <w,z>| <= 2       (V4, CHSH)

can nevertheless be *falsified* by correlation values that no single run
of sequences realizes -- that is the content of every Bell-type theorem.
``feasible_triple``/``feasible_quad`` decide by linear programming whether
a correlation target admits any joint +/-1 distribution at all, and
``falsification_search`` scans angle configurations for the strongest
falsification a value source (the hypothesis-definability engine) can
support.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .core import SYM_E, SYM_EP, SYM_P, SYM_PP, OutcomeSequence, pair_symbol

__all__ = [
    "FeasibilityResult",
    "SearchOutcome",
    "V3Report",
    "V4Report",
    "V3_ROLES",
    "V4_ROLES",
    "eval_v3",
    "eval_v4",
    "falsification_search",
    "feasible_quad",
    "feasible_triple",
    "sica_v3_check",
    "sica_v4_check",
]

# Fixed role assignments from abstract sequence slots to axis symbols.
# V3 uses two axes on Alice's side:  x = E, z = E', y = P.
# V4 pairs each side's measured and counterfactual axes:
#   x = E, y = P, w = E', z = P'.
V3_ROLES = {"x": SYM_E, "y": SYM_P, "z": SYM_EP}
V4_ROLES = {"x": SYM_E, "y": SYM_P, "w": SYM_EP, "z": SYM_PP}

# Correlation pairs appearing in each inequality, in report order.
V3_PAIRS = ((SYM_E, SYM_P), (SYM_E, SYM_EP), (SYM_P, SYM_EP))
V4_PAIRS = ((SYM_E, SYM_P), (SYM_E, SYM_PP), (SYM_EP, SYM_P), (SYM_EP, SYM_PP))


def _product_sums(*seqs: OutcomeSequence) -> tuple[int, list[np.ndarray]]:
    n = len(seqs[0])
    if n == 0:
        raise ValueError("sequences must be non-empty")
    arrays = []
    for s in seqs:
        if len(s) != n:
            raise ValueError(f"length mismatch: {n} vs {len(s)}")
        arrays.append(s.values.astype(np.int64))
    return n, arrays


def sica_v3_check(
    x: OutcomeSequence, y: OutcomeSequence, z: OutcomeSequence
) -> float:
    """Slack of the three-sequence identity: (1 - Syz/N) - |Sxy/N - Sxz/N|.

    Computed from exact integer sums; non-negative for every actual triple.
    """
    n, (xa, ya, za) = _product_sums(x, y, z)
    s_xy = int(np.dot(xa, ya))
    s_xz = int(np.dot(xa, za))
    s_yz = int(np.dot(ya, za))
    return ((n - s_yz) - abs(s_xy - s_xz)) / n


def sica_v4_check(
    w: OutcomeSequence, x: OutcomeSequence, y: OutcomeSequence, z: OutcomeSequence
) -> float:
    """Margin of the four-sequence identity: 2 - (|Sxy + Sxz| + |Swy - Swz|)/N.

    Computed from exact integer sums; non-negative for every actual quadruple.
    """
    n, (wa, xa, ya, za) = _product_sums(w, x, y, z)
    s_xy = int(np.dot(xa, ya))
    s_xz = int(np.dot(xa, za))
    s_wy = int(np.dot(wa, ya))
    s_wz = int(np.dot(wa, za))
    return (2 * n - abs(s_xy + s_xz) - abs(s_wy - s_wz)) / n


def _check_corr(name: str, value: float) -> float:
    value = float(value)
    if not -1.0 <= value <= 1.0:
        raise ValueError(f"{name} out of range [-1, 1]: {value}")
    return value


@dataclass(frozen=True)
class V3Report:
    """Evaluation of |c_xy - c_xz| <= 1 - c_yz on given correlation values."""

    c_xy: float
    c_xz: float
    c_yz: float
    lhs: float
    rhs: float
    slack: float
    violated: bool

    @property
    def excess(self) -> float:
        """Amount by which the inequality fails (0 when satisfied)."""
        return max(-self.slack, 0.0)

    def to_dict(self) -> dict:
        return {
            "version": "V3",
            "c_xy": self.c_xy,
            "c_xz": self.c_xz,
            "c_yz": self.c_yz,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "violated": self.violated,
        }


@dataclass(frozen=True)
class V4Report:
    """Evaluation of |c1 + c2| + |c3 - c4| <= 2 on given correlation values."""

    c1: float
    c2: float
    c3: float
    c4: float
    s: float
    violated: bool

    @property
    def excess(self) -> float:
        return max(self.s - 2.0, 0.0)

    def to_dict(self) -> dict:
        return {
            "version": "V4",
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "c4": self.c4,
            "S": self.s,
            "violated": self.violated,
        }


def eval_v3(c_xy: float, c_xz: float, c_yz: float) -> V3Report:
    """Evaluate the three-correlation inequality on (possibly merely
    hypothesized) correlation values; a negative slack is a falsification."""
    c_xy = _check_corr("c_xy", c_xy)
    c_xz = _check_corr("c_xz", c_xz)
    c_yz = _check_corr("c_yz", c_yz)
    lhs = abs(c_xy - c_xz)
    rhs = 1.0 - c_yz
    slack = rhs - lhs
    return V3Report(
        c_xy=c_xy, c_xz=c_xz, c_yz=c_yz,
        lhs=lhs, rhs=rhs, slack=slack, violated=slack < 0.0,
    )


def eval_v4(c1: float, c2: float, c3: float, c4: float) -> V4Report:
    """Evaluate the CHSH combination S = |c1 + c2| + |c3 - c4| against 2."""
    c1 = _check_corr("c1", c1)
    c2 = _check_corr("c2", c2)
    c3 = _check_corr("c3", c3)
    c4 = _check_corr("c4", c4)
    s = abs(c1 + c2) + abs(c3 - c4)
    return V4Report(c1=c1, c2=c2, c3=c3, c4=c4, s=s, violated=s > 2.0)


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of a local-polytope membership test.

    ``witness`` is a distribution over the deterministic +/-1 assignments
    (8 atoms for a triple, 16 for a quadruple); when ``feasible`` it matches
    the targets within tolerance.  ``max_violation`` is the smallest uniform
    slack that would have to be granted on the correlation constraints for a
    distribution to exist (0 when the target is inside the polytope).
    """

    feasible: bool
    witness: tuple[float, ...]
    max_violation: float
    atoms: tuple[tuple[int, ...], ...]
    correlations: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "max_violation": self.max_violation,
            "witness": list(self.witness),
            "atoms": [list(a) for a in self.atoms],
            "witness_correlations": list(self.correlations),
        }


def _feasibility(
    targets: Sequence[float],
    n_vars: int,
    pair_slots: Sequence[tuple[int, int]],
    tol: float,
) -> FeasibilityResult:
    """Chebyshev-fit a distribution over deterministic assignments.

    minimize t  s.t.  |A p - targets| <= t,  sum p = 1,  p >= 0
    where row k of A holds the product of the two slots of pair k for each
    deterministic +/-1 assignment.  Feasible iff the optimum t is ~0.
    """
    targets = [_check_corr(f"target[{i}]", t) for i, t in enumerate(targets)]
    atoms = tuple(itertools.product((-1, 1), repeat=n_vars))
    n_atoms = len(atoms)
    a_rows = np.array(
        [[atom[i] * atom[j] for atom in atoms] for i, j in pair_slots],
        dtype=float,
    )
    n_pairs = len(pair_slots)
    # variables: p_0..p_{n_atoms-1}, t
    c = np.zeros(n_atoms + 1)
    c[-1] = 1.0
    a_ub = np.zeros((2 * n_pairs, n_atoms + 1))
    b_ub = np.zeros(2 * n_pairs)
    a_ub[:n_pairs, :n_atoms] = a_rows
    a_ub[:n_pairs, -1] = -1.0
    b_ub[:n_pairs] = targets
    a_ub[n_pairs:, :n_atoms] = -a_rows
    a_ub[n_pairs:, -1] = -1.0
    b_ub[n_pairs:] = [-t for t in targets]
    a_eq = np.zeros((1, n_atoms + 1))
    a_eq[0, :n_atoms] = 1.0
    bounds = [(0.0, 1.0)] * n_atoms + [(0.0, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds,
                  method="highs")
    if not res.success:
        raise RuntimeError(f"feasibility LP failed: {res.message}")
    witness = tuple(max(float(p), 0.0) for p in res.x[:n_atoms])
    max_violation = float(res.x[-1])
    achieved = tuple(float(v) for v in a_rows @ np.array(witness))
    return FeasibilityResult(
        feasible=max_violation <= tol,
        witness=witness,
        max_violation=max_violation,
        atoms=atoms,
        correlations=achieved,
    )


def feasible_triple(
    c_xy: float, c_xz: float, c_yz: float, tol: float = 1e-9
) -> FeasibilityResult:
    """Does any joint distribution over (x, y, z) in {-1,+1}^3 have these
    three pairwise correlations?"""
    return _feasibility([c_xy, c_xz, c_yz], 3, [(0, 1), (0, 2), (1, 2)], tol)


def feasible_quad(
    c_xy: float, c_xz: float, c_wy: float, c_wz: float, tol: float = 1e-9
) -> FeasibilityResult:
    """Does any joint distribution over (w, x, y, z) in {-1,+1}^4 have these
    four cross correlations (the CHSH set)?"""
    return _feasibility(
        [c_xy, c_xz, c_wy, c_wz], 4, [(1, 2), (1, 3), (0, 2), (0, 3)], tol
    )


# A value source maps {symbol: angle array} to {pair key: value array},
# with NaN wherever no definite value exists under the source's hypotheses.
ValueSource = Callable[[Mapping[str, np.ndarray]], Mapping[str, np.ndarray]]


@dataclass(frozen=True)
class SearchOutcome:
    """Best configuration found by ``falsification_search``."""

    version: str
    found: bool
    reason: str | None = None
    angles: dict[str, float] | None = None
    correlations: dict[str, float] | None = None
    violation: float | None = None
    report: "V3Report | V4Report | None" = field(default=None)

    def to_dict(self) -> dict:
        out: dict = {"version": self.version, "found": self.found}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.found:
            out["angles"] = self.angles
            out["correlations"] = self.correlations
            out["violation"] = self.violation
            out["report"] = self.report.to_dict() if self.report else None
        return out


def _v3_objective(values: Mapping[str, np.ndarray]) -> np.ndarray:
    c_xy = values[pair_symbol(SYM_E, SYM_P)]
    c_xz = values[pair_symbol(SYM_E, SYM_EP)]
    c_yz = values[pair_symbol(SYM_P, SYM_EP)]
    return np.abs(c_xy - c_xz) - (1.0 - c_yz)


def _v4_objective(values: Mapping[str, np.ndarray]) -> np.ndarray:
    c1 = values[pair_symbol(SYM_E, SYM_P)]
    c2 = values[pair_symbol(SYM_E, SYM_PP)]
    c3 = values[pair_symbol(SYM_EP, SYM_P)]
    c4 = values[pair_symbol(SYM_EP, SYM_PP)]
    return np.abs(c1 + c2) + np.abs(c3 - c4) - 2.0


def _scan_v3(
    value_source: ValueSource, e_grid: np.ndarray, ep_grid: np.ndarray, theta_p: float
) -> tuple[float, tuple[float, float]] | None:
    te, tep = np.meshgrid(e_grid, ep_grid, indexing="ij")
    values = value_source(
        {SYM_E: te, SYM_EP: tep, SYM_P: np.full_like(te, theta_p)}
    )
    objective = _v3_objective(values)
    flat = objective.ravel()
    if np.all(np.isnan(flat)):
        return None
    best = int(np.nanargmax(flat))
    i, j = np.unravel_index(best, objective.shape)
    return float(objective[i, j]), (float(e_grid[i]), float(ep_grid[j]))


def _scan_v4(
    value_source: ValueSource,
    e_grid: np.ndarray,
    ep_grid: np.ndarray,
    p_grid: np.ndarray,
    theta_pp: float,
) -> tuple[float, tuple[float, float, float]] | None:
    best_val = -np.inf
    best_cfg: tuple[float, float, float] | None = None
    tep, tp = np.meshgrid(ep_grid, p_grid, indexing="ij")
    tpp = np.full_like(tep, theta_pp)
    for te_value in e_grid:
        te = np.full_like(tep, te_value)
        values = value_source({SYM_E: te, SYM_EP: tep, SYM_P: tp, SYM_PP: tpp})
        objective = _v4_objective(values)
        flat = objective.ravel()
        if np.all(np.isnan(flat)):
            continue
        k = int(np.nanargmax(flat))
        if flat[k] > best_val:
            i, j = np.unravel_index(k, objective.shape)
            best_val = float(flat[k])
            best_cfg = (float(te_value), float(ep_grid[i]), float(p_grid[j]))
    if best_cfg is None:
        return None
    return best_val, best_cfg


def _grid(center: float, half_width: float, step: float) -> np.ndarray:
    k = int(math.ceil(half_width / step))
    return center + step * np.arange(-k, k + 1)


def falsification_search(
    version: str,
    value_source: ValueSource,
    grid_step: float = math.pi / 180.0,
    refinement: int = 10,
) -> SearchOutcome:
    """Scan angle configurations for the strongest inequality falsification.

    Correlation values are taken only where the value source defines them;
    configurations with any required value undefined are skipped.  Because
    the values depend only on angle differences, one reference angle is
    pinned to zero (theta_P for V3, theta_P' for V4) without loss.  A coarse
    full-circle scan at ``grid_step`` is followed by one local refinement at
    ``grid_step / refinement``.

    Returns a non-found outcome with a reason when no configuration has all
    required correlations defined.
    """
    version = version.upper()
    if version not in ("V3", "V4"):
        raise ValueError(f"version must be 'V3' or 'V4', got {version!r}")
    full = np.arange(-math.pi + grid_step, math.pi + grid_step / 2, grid_step)

    if version == "V3":
        coarse = _scan_v3(value_source, full, full, 0.0)
        if coarse is None:
            return SearchOutcome(
                version=version,
                found=False,
                reason="no configuration defines all of "
                f"{pair_symbol(SYM_E, SYM_P)}, {pair_symbol(SYM_E, SYM_EP)}, "
                f"{pair_symbol(SYM_P, SYM_EP)} under these hypotheses",
            )
        _, (te, tep) = coarse
        fine_step = grid_step / refinement
        refined = _scan_v3(
            value_source,
            _grid(te, grid_step, fine_step),
            _grid(tep, grid_step, fine_step),
            0.0,
        )
        value, (te, tep) = refined if refined is not None else coarse
        angles = {SYM_E: te, SYM_EP: tep, SYM_P: 0.0}
        values = value_source({k: np.array([v]) for k, v in angles.items()})
        corr = {k: float(v[0]) for k, v in values.items()}
        report = eval_v3(
            corr[pair_symbol(SYM_E, SYM_P)],
            corr[pair_symbol(SYM_E, SYM_EP)],
            corr[pair_symbol(SYM_P, SYM_EP)],
        )
        return SearchOutcome(
            version=version, found=True, angles=angles,
            correlations=corr, violation=value, report=report,
        )

    coarse = _scan_v4(value_source, full, full, full, 0.0)
    if coarse is None:
        return SearchOutcome(
            version=version,
            found=False,
            reason=f"{pair_symbol(SYM_EP, SYM_PP)} undefined under these hypotheses",
        )
    _, (te, tep, tp) = coarse
    fine_step = grid_step / refinement
    refined = _scan_v4(
        value_source,
        _grid(te, grid_step, fine_step),
        _grid(tep, grid_step, fine_step),
        _grid(tp, grid_step, fine_step),
        0.0,
    )
    value, (te, tep, tp) = refined if refined is not None else coarse
    angles = {SYM_E: te, SYM_EP: tep, SYM_P: tp, SYM_PP: 0.0}
    values = value_source({k: np.array([v]) for k, v in angles.items()})
    corr = {k: float(v[0]) for k, v in values.items()}
    report = eval_v4(
        corr[pair_symbol(SYM_E, SYM_P)],
        corr[pair_symbol(SYM_E, SYM_PP)],
        corr[pair_symbol(SYM_EP, SYM_P)],
        corr[pair_symbol(SYM_EP, SYM_PP)],
    )
    return SearchOutcome(
        version=version, found=True, angles=angles,
        correlations=corr, violation=value, report=report,
    )
