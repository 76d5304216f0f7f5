"""Proximity-weighted blending of several obstacle fields."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateBlendError, DomainError
from .fields import DEFAULT_VARTHETA, FieldSample, Obstacle, cavf, snap_to_surface

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class MixConfig:
    eps_m: float = 0.9
    min_separation: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.eps_m < 1.0:
            raise DomainError(f"eps_m must lie in (0, 1), got {self.eps_m}")
        if not self.min_separation > 0:
            raise DomainError(f"min_separation must be positive, got {self.min_separation}")


@dataclass(frozen=True)
class MixWeights:
    """Outcome of the mixing algorithm.

    ``raw`` holds the final blending weights ``w^j``; ``proximity`` the
    weights before the snap/normalization step.  ``branch`` is one of
    ``"snap"``, ``"normalized"`` or ``"free"``.
    """

    raw: tuple[float, ...]
    deltas: tuple[float, ...]
    snapped_index: Optional[int]
    proximity: tuple[float, ...]
    branch: str


def mix_weights(distances: Sequence[tuple[float, float, float]],
                cfg: MixConfig = MixConfig()) -> MixWeights:
    """Blending weights from ``(r, r_o, r_i)`` per obstacle.

    An agent on a surface (``r <= r_o``) snaps to that obstacle.
    """
    deltas = [r - r_o if r - r_i < 0 else -1.0 for r, r_o, r_i in distances]
    n = len(deltas)
    if n == 0:
        return MixWeights((), (), None, (), "free")

    for j, (r, r_o, _) in enumerate(distances):
        if r <= r_o:
            w = tuple(1.0 if k == j else 0.0 for k in range(n))
            return MixWeights(w, tuple(deltas), j, w, "snap")

    sigma = sum(d for d in deltas if d > 0)
    prox = []
    for d in deltas:
        if sigma == d:
            prox.append(1.0)
        elif d > 0:
            prox.append(1.0 - d / sigma)
        else:
            prox.append(0.0)

    ind = max(range(n), key=lambda k: prox[k])
    val = prox[ind]
    total = sum(prox)
    if val > cfg.eps_m:
        w = tuple(1.0 if k == ind else 0.0 for k in range(n))
        return MixWeights(w, tuple(deltas), ind, tuple(prox), "snap")
    if total == 0.0:
        return MixWeights((1.0,) * n, tuple(deltas), None, tuple(prox), "free")
    w = tuple(x / total for x in prox)
    return MixWeights(w, tuple(deltas), None, tuple(prox), "normalized")


def nearest_index(p, obstacles: Sequence[Obstacle]) -> int:
    """Index of the obstacle with the smallest surface clearance from ``p``."""
    return min(
        range(len(obstacles)),
        key=lambda j: math.hypot(p[0] - obstacles[j].center[0], p[1] - obstacles[j].center[1])
        - obstacles[j].r_o,
    )


def mixed_cavf(p, obstacles: Sequence[Obstacle], V: float, cfg: MixConfig = MixConfig(),
               vartheta: float = DEFAULT_VARTHETA, side: int = 1) -> FieldSample:
    """Blend of the per-obstacle fields at ``p``, rescaled to speed ``V``.

    ``lam``/``gamma`` of the result are the minima over the components and
    ``radial_component`` refers to the nearest obstacle.  Raises
    :class:`DegenerateBlendError` when the weighted sum vanishes.
    """
    if not obstacles:
        raise DomainError("mixed_cavf needs at least one obstacle")
    comps = tuple(cavf(p, ob, V, vartheta, side) for ob in obstacles)
    dists = [
        (snap_to_surface(math.hypot(p[0] - ob.center[0], p[1] - ob.center[1]), ob.r_o), ob.r_o, ob.r_i)
        for ob in obstacles
    ]
    weights = mix_weights(dists, cfg)
    total = np.zeros(2)
    for w, c in zip(weights.raw, comps):
        if w:
            total = total + w * c.velocity
    norm = math.hypot(total[0], total[1])
    if norm < DEGENERATE_TOL:
        raise DegenerateBlendError(f"weighted field sum vanishes at ({p[0]}, {p[1]})")
    if weights.snapped_index is not None:
        v = comps[weights.snapped_index].velocity.copy()
    else:
        v = total * (V / norm)
    k = nearest_index(p, obstacles)
    ob = obstacles[k]
    theta = math.atan2(p[1] - ob.center[1], p[0] - ob.center[0])
    radial = v[0] * math.cos(theta) + v[1] * math.sin(theta)
    return FieldSample(
        velocity=v,
        lam=min(c.lam for c in comps),
        gamma=min(c.gamma for c in comps),
        radial_component=radial,
        weights=weights,
        components=comps,
    )


def heading_rate_weights(raw, headings: Sequence[float]) -> list[float]:
    """Weights mapping component heading rates to the blended heading rate.

    ``raw`` is a :class:`MixWeights` or a plain sequence of ``w^j``.  The
    pair sum in the denominator runs over unordered pairs, which makes the
    result sum to one.
    """
    w = list(raw.raw if isinstance(raw, MixWeights) else raw)
    n = len(w)
    if n != len(headings):
        raise DomainError("one heading per weight is required")
    cross = [[w[i] * w[j] * math.cos(headings[i] - headings[j]) for j in range(n)] for i in range(n)]
    denom = sum(x * x for x in w) + sum(cross[i][j] for i in range(n) for j in range(i + 1, n)) * 2.0
    if abs(denom) < DEGENERATE_TOL:
        raise DegenerateBlendError("heading-rate weights undefined: blended field vanishes")
    return [
        (w[i] * w[i] + sum(cross[i][j] for j in range(n) if j != i)) / denom
        for i in range(n)
    ]
