"""Independent ground truth: prime sieve, separation verdicts, threshold planes.

Everything here recomputes from first principles with plain numpy and
shares no state with the separator, so tests can use it to check builds
without circularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Plane


@dataclass
class SieveTable:
    limit: int
    is_prime: np.ndarray

    def primes(self) -> np.ndarray:
        return np.nonzero(self.is_prime)[0]

    def count(self) -> int:
        return int(self.is_prime.sum())


def sieve(limit: int) -> SieveTable:
    """Classic composite-marking sieve up to and including limit."""
    if limit < 2:
        raise ValueError("limit must be at least 2")
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p:: p] = False
    return SieveTable(limit=limit, is_prime=flags)


@dataclass
class Verdict:
    ok: bool
    incidences: list[tuple[int, int]] = field(default_factory=list)
    collisions: list[tuple[int, int]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_separation(points, planes, epsilon: float) -> Verdict:
    """Check that the planes give every point a clear, unique sign vector.

    Recomputes all residuals from scratch: a point within epsilon of any
    plane is an incidence failure, and two points with identical sign rows
    are a collision (any colliding pair shows up adjacently once rows are
    sorted, so this reports the same failures as comparing all pairs).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if isinstance(planes, np.ndarray):
        mat = planes
    else:
        mat = (
            np.stack([pl.alpha for pl in planes])
            if len(planes)
            else np.empty((0, pts.shape[1]))
        )
    verdict = Verdict(ok=True)
    npts = pts.shape[0]
    if mat.shape[0] == 0:
        if npts > 1:
            verdict.ok = False
            verdict.collisions = [(i, i + 1) for i in range(npts - 1)]
        return verdict

    resid = 1.0 + pts @ mat.T
    inc = np.nonzero(np.abs(resid) <= epsilon)
    for i, j in zip(*inc):
        verdict.ok = False
        verdict.incidences.append((int(i), int(j)))

    signs = resid > 0
    order = np.lexsort(signs.T[::-1])
    same = np.all(signs[order[1:]] == signs[order[:-1]], axis=1)
    for k in np.nonzero(same)[0]:
        verdict.ok = False
        verdict.collisions.append((int(order[k]), int(order[k + 1])))
    return verdict


def coordinate_plane_separator(n: int, base: int = 10) -> list[Plane]:
    """Axis-aligned threshold planes x_i = k + 1/2 for every digit gap.

    The (base-1)*n planes separate every pair of distinct digit points:
    two such points differ in some coordinate, and a threshold between the
    two digit values puts them on opposite sides.  Serves as a guaranteed
    (if wasteful) baseline family.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if base < 2:
        raise ValueError("base must be at least 2")
    planes = []
    for i in range(n):
        for k in range(base - 1):
            threshold = k + 0.5
            alpha = np.zeros(n)
            alpha[i] = -1.0 / threshold
            planes.append(Plane(alpha=alpha, saturated=True))
    return planes
