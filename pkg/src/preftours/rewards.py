"""Submodular visit rewards and simulated ground-truth users.

Each (region, decay) pair contributes one basis feature: the alpha-th visit to a
region is worth ``gamma**(alpha-1)``, so a decay of 1 counts visits linearly while a
decay near 0 only credits the first visit. A weight vector over all basis features
defines the tour-set reward as a dot product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Optional, Sequence, Union

import numpy as np

if TYPE_CHECKING:
    from .gtop import TourSet
    from .scenario import Environment


@dataclass(frozen=True)
class DecaySet:
    """The decay values gamma shared by every region, strictly increasing in (0, 1]."""

    values: tuple[float, ...] = (0.001, 0.5, 1.0)

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("DecaySet needs at least one decay value")
        for g in self.values:
            if not (0 < g <= 1):
                raise ValueError(f"decay {g} outside (0, 1]")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("decay values must be strictly increasing")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)


DEFAULT_DECAYS = DecaySet()


def dimension(env: "Environment", decays: DecaySet = DEFAULT_DECAYS) -> int:
    """Number of basis features: regions times decays, region-major ordering."""
    return env.num_regions * len(decays)


def _tour_sequences(tours: Union["TourSet", Iterable[Sequence[int]]]) -> list[Sequence[int]]:
    inner = getattr(tours, "tours", tours)
    return [getattr(t, "vertices", t) for t in inner]


def visit_counts(tours: Union["TourSet", Iterable[Sequence[int]]], env: "Environment") -> np.ndarray:
    """Count tour vertex occurrences per region (the depot counts for no region)."""
    psi = np.zeros(env.num_regions, dtype=int)
    for seq in _tour_sequences(tours):
        for v in seq:
            region = env.region_of(v)
            if region is not None:
                psi[region] += 1
    return psi


def basis_value(psi: int, gamma: float) -> float:
    """Value of ``psi`` visits under decay ``gamma``: sum of gamma**(alpha-1)."""
    if psi < 0:
        raise ValueError("visit count cannot be negative")
    if not (0 < gamma <= 1):
        raise ValueError(f"decay {gamma} outside (0, 1]")
    if gamma == 1:
        return float(psi)
    return (1.0 - gamma**psi) / (1.0 - gamma)


def features_from_counts(psi: np.ndarray, decays: DecaySet = DEFAULT_DECAYS) -> np.ndarray:
    """Basis feature vector for given per-region visit counts, region-major layout."""
    psi = np.asarray(psi, dtype=float)
    gammas = decays.array
    with np.errstate(divide="ignore", invalid="ignore"):
        geometric = (1.0 - gammas[None, :] ** psi[:, None]) / (1.0 - gammas[None, :])
    linear = np.broadcast_to(psi[:, None], geometric.shape)
    table = np.where(gammas[None, :] == 1.0, linear, geometric)
    return table.reshape(-1)


def features(
    tours: Union["TourSet", Iterable[Sequence[int]]],
    env: "Environment",
    decays: DecaySet = DEFAULT_DECAYS,
) -> np.ndarray:
    """Feature vector of a tour set; entry (i, j) sits at index i * len(decays) + j."""
    return features_from_counts(visit_counts(tours, env), decays)


def reward(
    tours: Union["TourSet", Iterable[Sequence[int]], np.ndarray],
    weights: np.ndarray,
    env: Optional["Environment"] = None,
    decays: DecaySet = DEFAULT_DECAYS,
) -> float:
    """Weighted reward: dot product of a feature vector (or a tour set's) with weights."""
    weights = np.asarray(weights, dtype=float)
    if isinstance(tours, np.ndarray):
        phi = tours.astype(float, copy=False).reshape(-1)
        if phi.shape != weights.shape:
            raise ValueError(
                f"feature vector has shape {phi.shape}, weights {weights.shape}"
            )
        return float(phi @ weights)
    if env is None:
        raise ValueError("env is required when passing tours rather than features")
    expected = dimension(env, decays)
    if weights.shape != (expected,):
        raise ValueError(f"weight vector has shape {weights.shape}, expected ({expected},)")
    return float(features(tours, env, decays) @ weights)


def marginal_gains(weights: np.ndarray, psi: np.ndarray, decays: DecaySet = DEFAULT_DECAYS) -> np.ndarray:
    """Per-region reward increase for one additional visit at current counts ``psi``.

    The alpha-th visit contributes gamma**(alpha-1) on every decay slot, so the gain
    for region i at count psi_i is ``sum_j w[i, j] * gamma_j ** psi_i``.
    """
    gammas = decays.array
    w = np.asarray(weights, dtype=float).reshape(len(psi), len(gammas))
    return (w * gammas[None, :] ** np.asarray(psi, dtype=float)[:, None]).sum(axis=1)


def full_coverage_reward(weights: np.ndarray, env: "Environment", decays: DecaySet = DEFAULT_DECAYS) -> float:
    """Reward when every vertex of every region is visited (budget ignored)."""
    psi_max = np.array([len(members) for members in env.regions])
    return float(features_from_counts(psi_max, decays) @ np.asarray(weights, dtype=float))


@dataclass
class GroundTruthUser:
    """A simulated user: hidden weights plus a response model.

    ``sigma`` is the variance of the raw weight draw. ``reward_scale`` normalizes
    reward differences inside the noisy response model so that the rationality
    parameter beta acts on a scenario-independent scale; deterministic users
    ignore both.
    """

    weights: np.ndarray
    chosen_decay: tuple[int, ...]
    beta: float = 20.0
    sigma: float = 0.5
    decay_prior: tuple[float, ...] = (1 / 3, 1 / 3, 1 / 3)
    reward_scale: float = 1.0
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "chosen_decay": list(self.chosen_decay),
            "beta": self.beta,
            "sigma": self.sigma,
            "decay_prior": list(self.decay_prior),
            "reward_scale": self.reward_scale,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GroundTruthUser":
        return cls(
            weights=np.array(data["weights"], dtype=float),
            chosen_decay=tuple(data["chosen_decay"]),
            beta=float(data["beta"]),
            sigma=float(data["sigma"]),
            decay_prior=tuple(data["decay_prior"]),
            reward_scale=float(data.get("reward_scale", 1.0)),
            seed=data.get("seed"),
        )


def sample_user(
    env: "Environment",
    sigma: float = 0.5,
    decay_prior: Sequence[float] = (1 / 3, 1 / 3, 1 / 3),
    beta: float = 20.0,
    seed: Union[int, np.random.Generator] = 0,
    decays: DecaySet = DEFAULT_DECAYS,
) -> GroundTruthUser:
    """Draw a ground-truth user for an environment.

    Region magnitudes follow a Gaussian around the squared (normalized) depot
    distance, clamped at zero and rescaled so the largest is 1; each region gets a
    single active decay slot drawn from ``decay_prior``.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    prior = np.asarray(decay_prior, dtype=float)
    if prior.shape != (len(decays),):
        raise ValueError(f"decay_prior needs {len(decays)} entries")
    if (prior < 0).any() or prior.sum() <= 0:
        raise ValueError("decay_prior must be non-negative and sum to a positive value")
    prior = prior / prior.sum()

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dist = env.depot_region_distances()
    dmax = dist.max()
    normalized = dist / dmax if dmax > 0 else np.zeros_like(dist)
    raw = rng.normal(normalized**2, np.sqrt(sigma))
    magnitudes = np.clip(raw, 0.0, None)
    peak = magnitudes.max()
    if peak > 0:
        magnitudes = magnitudes / peak

    n = env.num_regions
    slots = rng.choice(len(decays), size=n, p=prior)
    weights = np.zeros(n * len(decays))
    for i in range(n):
        weights[i * len(decays) + int(slots[i])] = magnitudes[i]

    # Normalize response noise by the best reward this user's weights can actually
    # collect under the budgets, not by the (often unreachable) full-coverage total.
    # Late import: the solver depends on this module for feature computation.
    from .gtop import solve_gtop

    scale = reward(solve_gtop(env, weights, decays), weights, env, decays)
    if scale <= 0:
        scale = max(full_coverage_reward(weights, env, decays), 1.0)
    return GroundTruthUser(
        weights=weights,
        chosen_decay=tuple(int(s) for s in slots),
        beta=beta,
        sigma=sigma,
        decay_prior=tuple(float(p) for p in prior),
        reward_scale=scale,
        seed=seed if isinstance(seed, int) else None,
    )
