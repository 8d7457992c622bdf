"""Real rays, contexts and Born probabilities.

A :class:`Ray` is a unit vector of real components standing for a rank-1
projector, so ``|b>`` and ``-|b>`` are the same ray. The sign is fixed by
making the first component whose magnitude exceeds the tolerance positive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import config


class DimensionError(ValueError):
    """Raised when rays of different dimension are combined."""


class GeometryError(ValueError):
    """Raised for degenerate geometric input (zero vectors, collinear pairs, ...)."""


def _canonical_sign(xs: Sequence[float], tol: float) -> tuple[float, ...]:
    for x in xs:
        if abs(x) > tol:
            if x < 0:
                return tuple(-y + 0.0 for y in xs)
            break
    return tuple(x + 0.0 for x in xs)


@dataclass(frozen=True)
class Ray:
    """Unit vector in real ``d``-space, stored with canonical sign.

    Construction checks the norm against the tolerance; use :func:`ray` to
    normalize arbitrary coordinates first.
    """

    components: tuple[float, ...]

    def __post_init__(self) -> None:
        comps = tuple(float(x) for x in self.components)
        if len(comps) < 2:
            raise DimensionError(f"a ray needs at least 2 components, got {len(comps)}")
        if not all(math.isfinite(x) for x in comps):
            raise GeometryError(f"non-finite ray components {comps!r}")
        tol = config.get_tolerance()
        norm = math.sqrt(math.fsum(x * x for x in comps))
        # relative slack so that decimal round-trips of unit vectors still pass
        if abs(norm - 1.0) > max(tol, 1e-9):
            raise GeometryError(f"ray {comps!r} has norm {norm!r}, expected 1")
        object.__setattr__(self, "components", _canonical_sign(comps, tol))

    @property
    def dim(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> float:
        return self.components[i]

    def same_as(self, other: Ray, tol: float | None = None) -> bool:
        """True if both rays coincide componentwise within ``tol``."""
        _check_dims(self, other)
        tol = config.resolve(tol)
        return all(abs(x - y) <= tol for x, y in zip(self.components, other.components))


def ray(*components: float) -> Ray:
    """Normalize ``components`` and return the canonical :class:`Ray`.

    Accepts either separate scalars or a single iterable.
    """
    if len(components) == 1 and not isinstance(components[0], (int, float)):
        components = tuple(components[0])
    comps = [float(x) for x in components]
    norm = math.sqrt(math.fsum(x * x for x in comps))
    if norm == 0.0 or not math.isfinite(norm):
        raise GeometryError(f"cannot normalize {comps!r}")
    return Ray(tuple(x / norm for x in comps))


def _check_dims(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) != len(b):
        raise DimensionError(f"dimension mismatch: {len(a)} vs {len(b)}")


def inner_product(a: Ray, b: Ray) -> float:
    """Euclidean dot product of two rays."""
    _check_dims(a, b)
    return math.fsum(x * y for x, y in zip(a, b))


def born_probability(c: Ray, b: Ray) -> float:
    """Probability ``|<c|b>|**2`` of outcome ``b`` given preparation ``c``, clamped to [0, 1]."""
    p = inner_product(c, b) ** 2
    return min(1.0, max(0.0, p))


def is_orthogonal(a: Ray, b: Ray, tol: float | None = None) -> bool:
    return abs(inner_product(a, b)) <= config.resolve(tol)


def cross3(a: Ray, b: Ray, tol: float | None = None) -> Ray:
    """Unit ray orthogonal to two non-collinear rays in three dimensions."""
    _check_dims(a, b)
    if len(a) != 3:
        raise DimensionError(f"cross3 needs 3-dimensional rays, got {len(a)}")
    x = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
    norm = math.sqrt(math.fsum(v * v for v in x))
    if norm <= config.resolve(tol):
        raise GeometryError("cross3 of collinear rays")
    return Ray(tuple(v / norm for v in x))


@dataclass(frozen=True)
class ContextBasis:
    """An orthonormal basis of ``d`` rays, i.e. one context."""

    rays: tuple[Ray, ...]

    def __post_init__(self) -> None:
        rays = tuple(self.rays)
        object.__setattr__(self, "rays", rays)
        if not rays:
            raise GeometryError("empty context")
        d = rays[0].dim
        if len(rays) != d:
            raise GeometryError(f"a context in dimension {d} needs {d} rays, got {len(rays)}")
        for r in rays:
            _check_dims(rays[0], r)
        tol = config.get_tolerance()
        for i in range(d):
            for j in range(i + 1, d):
                overlap = abs(inner_product(rays[i], rays[j]))
                if overlap > tol:
                    raise GeometryError(
                        f"rays {i} and {j} of the context overlap by {overlap:.3e}"
                    )

    @property
    def dim(self) -> int:
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    def __len__(self) -> int:
        return len(self.rays)

    def __getitem__(self, i: int) -> Ray:
        return self.rays[i]

    def index_of(self, r: Ray, tol: float | None = None) -> int:
        for i, q in enumerate(self.rays):
            if q.same_as(r, tol):
                return i
        raise ValueError("ray is not a member of this context")

    def probabilities(self, c: Ray) -> list[float]:
        """Born probabilities of every basis element given preparation ``c``."""
        return [born_probability(c, r) for r in self.rays]


def complete_context(partial: Iterable[Ray], tol: float | None = None) -> ContextBasis:
    """Extend ``k < d`` orthonormal rays to a full context.

    Candidates are the standard basis vectors ``e_1 .. e_d`` in order; each is
    orthogonalized (two Gram-Schmidt passes) against the rays collected so far
    and skipped if what remains is nearly zero. Inputs come first in the result.
    """
    tol = config.resolve(tol)
    rays = list(partial)
    if not rays:
        raise GeometryError("complete_context needs at least one ray")
    d = rays[0].dim
    for r in rays:
        _check_dims(rays[0], r)
    if len(rays) >= d:
        raise GeometryError(f"already {len(rays)} rays in dimension {d}")
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            if not is_orthogonal(rays[i], rays[j], tol):
                raise GeometryError(f"input rays {i} and {j} are not orthogonal")

    basis = [list(r.components) for r in rays]
    for axis in range(d):
        if len(basis) == d:
            break
        v = [1.0 if k == axis else 0.0 for k in range(d)]
        for _ in range(2):
            for q in basis:
                proj = math.fsum(x * y for x, y in zip(v, q))
                v = [x - proj * y for x, y in zip(v, q)]
        norm = math.sqrt(math.fsum(x * x for x in v))
        if norm < 1e-6:
            continue
        basis.append([x / norm for x in v])
    out = rays + [Ray(tuple(v)) for v in basis[len(rays):]]
    return ContextBasis(tuple(out))
