"""Weight polyhedra: the unit box intersected with preference cuts, plus an exact LP.

Every pairwise choice induces a halfspace ``d . w >= 0`` through the origin, so the
feasible set always contains w = 0 and never becomes empty. Linear programs over
these polytopes are solved with a dense simplex using Bland's rule, which keeps the
result a deterministic vertex even on the heavily degenerate cuts (rhs 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

EPS_VALID = 1e-7

_ENTER_TOL = 1e-9
_PIVOT_TOL = 1e-10


@dataclass(eq=False)
class Cut:
    """A preference halfspace ``direction . w >= 0`` with query provenance."""

    direction: np.ndarray
    query_id: Optional[int] = None
    chosen: Optional[int] = None
    negated: bool = False

    def __post_init__(self) -> None:
        self.direction = np.asarray(self.direction, dtype=float)
        if self.direction.ndim != 1:
            raise ValueError("cut direction must be a vector")
        if not np.any(self.direction != 0):
            raise ValueError("cut direction cannot be all zeros")

    def flipped(self) -> "Cut":
        return Cut(-self.direction, query_id=self.query_id, chosen=self.chosen,
                   negated=not self.negated)


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """Unit box [0, 1]^dimension intersected with a tuple of cuts."""

    dimension: int
    cuts: tuple[Cut, ...] = ()

    def cut_matrix(self) -> Optional[np.ndarray]:
        if not self.cuts:
            return None
        return np.vstack([c.direction for c in self.cuts])

    def contains(self, w: np.ndarray, tol: float = 1e-9) -> bool:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.dimension,):
            return False
        if (w < -tol).any() or (w > 1 + tol).any():
            return False
        mat = self.cut_matrix()
        if mat is not None and (mat @ w < -tol).any():
            return False
        return True


def add_cut(poly: Polyhedron, cut: Cut) -> Polyhedron:
    """Return a new polyhedron with one more cut (the input is unchanged)."""
    if cut.direction.shape != (poly.dimension,):
        raise ValueError("cut dimension does not match polyhedron")
    return Polyhedron(poly.dimension, poly.cuts + (cut,))


@dataclass
class LPResult:
    optimizer: np.ndarray
    value: float
    status: str = "optimal"


def _simplex_max(c: np.ndarray, A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Maximize c.x subject to A x <= b, x >= 0 with b >= 0 (slack basis start).

    Entering variable by largest reduced cost; the leaving row is the min-ratio
    row with the largest pivot element among near-ties (tiny pivots amplify
    roundoff until the tableau no longer matches the constraints). Long runs of
    degenerate pivots switch both rules to Bland's smallest-index order, which
    cannot cycle. Deterministic throughout.
    """
    m, n = A.shape
    tableau = np.hstack([A.astype(float), np.eye(m)])
    rhs = b.astype(float).copy()
    reduced = np.concatenate([c.astype(float), np.zeros(m)])
    basis = list(range(n, n + m))
    total = n + m
    bland = False
    stalled = 0
    for _ in range(200 * (m + n)):
        if bland:
            enter = -1
            for j in range(total):
                if reduced[j] > _ENTER_TOL:
                    enter = j
                    break
            if enter < 0:
                break
        else:
            enter = int(np.argmax(reduced))
            if reduced[enter] <= _ENTER_TOL:
                break
        col = tableau[:, enter]
        eligible = col > _PIVOT_TOL
        if not eligible.any():
            raise ArithmeticError("LP unbounded; box constraints missing")
        ratios = np.where(eligible, rhs / np.where(eligible, col, 1.0), np.inf)
        best = float(ratios.min())
        ties = np.flatnonzero(ratios <= best + 1e-9 * (1.0 + abs(best)))
        if bland:
            leave = int(min(ties, key=lambda i: basis[i]))
        else:
            leave = int(ties[np.argmax(col[ties])])
        if best <= 1e-12:
            stalled += 1
            if stalled > m + n:
                bland = True
        else:
            stalled = 0
        pivot = tableau[leave, enter]
        tableau[leave] /= pivot
        rhs[leave] /= pivot
        for i in range(m):
            if i != leave:
                factor = tableau[i, enter]
                if factor != 0.0:
                    tableau[i] -= factor * tableau[leave]
                    rhs[i] -= factor * rhs[leave]
        reduced -= reduced[enter] * tableau[leave]
        np.clip(rhs, 0.0, None, out=rhs)
        basis[leave] = enter
    x = np.zeros(total)
    for i, var in enumerate(basis):
        x[var] = rhs[i]
    return x[:n]


def solve_lp(objective: np.ndarray, poly: Polyhedron, sense: str = "max") -> LPResult:
    """Optimize a linear objective over the polyhedron; the optimizer is a vertex."""
    objective = np.asarray(objective, dtype=float)
    if objective.shape != (poly.dimension,):
        raise ValueError("objective dimension does not match polyhedron")
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    d = poly.dimension
    mat = poly.cut_matrix()
    if mat is None:
        A = np.eye(d)
        b = np.ones(d)
    else:
        A = np.vstack([np.eye(d), -mat])
        b = np.concatenate([np.ones(d), np.zeros(len(poly.cuts))])
    c = objective if sense == "max" else -objective
    w = _simplex_max(c, A, b)
    return LPResult(optimizer=w, value=float(objective @ w), status="optimal")


def is_valid_cut(
    candidate: Union[Cut, np.ndarray], poly: Polyhedron, eps: float = EPS_VALID
) -> bool:
    """A cut is valid iff its hyperplane passes through the polyhedron's interior.

    Both ``max d . w`` and ``max -d . w`` must be strictly positive: the cut has to
    remove some weights yet leave others feasible. Accepts a Cut or a bare direction.
    """
    direction = candidate.direction if isinstance(candidate, Cut) else candidate
    direction = np.asarray(direction, dtype=float)
    if not np.any(direction != 0):
        return False
    forward = solve_lp(direction, poly, "max").value
    if forward <= eps:
        return False
    backward = solve_lp(-direction, poly, "max").value
    return backward > eps


def region_probability(negated: int, total: int, q: float) -> float:
    """Probability of a sampled cut configuration under a static correctness rate q."""
    if not (0.5 < q <= 1):
        raise ValueError("q must lie in (0.5, 1]")
    if not (0 <= negated <= total):
        raise ValueError("negated count out of range")
    return float(q ** (total - negated) * (1 - q) ** negated)


def probable_regions(
    dimension: int,
    cuts: Sequence[Cut],
    n_samples: int,
    cut_prob: Union[float, Callable[[Cut], float]],
    rng: np.random.Generator,
) -> list[tuple[Polyhedron, float]]:
    """Sample polyhedra consistent with noisy answers.

    Each recorded cut is kept with its correctness probability and negated
    otherwise; the returned probability is the product over per-cut factors.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    probs = [cut_prob(c) if callable(cut_prob) else float(cut_prob) for c in cuts]
    for p in probs:
        if not (0.5 < p <= 1):
            raise ValueError("cut probabilities must lie in (0.5, 1]")
    # With every probability at 1 there is nothing to flip; drawing no randomness
    # keeps a q=1 noisy session on the same rng stream as a deterministic one.
    flippable = bool(cuts) and min(probs) < 1.0
    regions: list[tuple[Polyhedron, float]] = []
    for _ in range(n_samples):
        sampled: list[Cut] = []
        probability = 1.0
        draws = rng.random(len(cuts)) if flippable else np.ones(len(cuts))
        for cut, p, u in zip(cuts, probs, draws):
            if u < 1 - p:
                sampled.append(cut.flipped())
                probability *= 1 - p
            else:
                sampled.append(cut)
                probability *= p
        regions.append((Polyhedron(dimension, tuple(sampled)), probability))
    return regions
