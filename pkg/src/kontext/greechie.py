"""Greechie orthogonality diagrams.

A :class:`Diagram` is a hypergraph whose vertices (atoms) are rays and whose
edges (blocks) are contexts of exactly ``d`` atoms. Atoms may carry a
coordinatization; when every atom does, :func:`realize_check` verifies that
co-occurring atoms are orthogonal.

The module also reads and writes the JSON exchange format, renders DOT, and
builds the two named configurations: the star of contexts sharing one atom and
the 13-atom, 7-block "bug".
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import config
from .ray_space import GeometryError, Ray, cross3, inner_product, is_orthogonal, ray


class DiagramError(ValueError):
    """Base class for malformed or inconsistent diagrams."""


class SchemaError(DiagramError):
    """The document or the constructor arguments do not describe a diagram."""


class UnknownAtomError(DiagramError):
    def __init__(self, atom_id: str):
        super().__init__(f"unknown atom {atom_id!r}")
        self.atom_id = atom_id


class ValidationError(DiagramError):
    """A well-formed diagram violates a structural or geometric condition."""


class LegalityError(ValidationError):
    """Two blocks share more than one atom."""


class MissingCoordinatesError(DiagramError):
    pass


class LegalityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Atom:
    id: str
    ray: Ray | None = None


@dataclass(frozen=True)
class Block:
    name: str
    atom_ids: tuple[str, ...]

    def __contains__(self, atom_id: str) -> bool:
        return atom_id in self.atom_ids

    def __iter__(self):
        return iter(self.atom_ids)

    def __len__(self) -> int:
        return len(self.atom_ids)


def _default_block_name(i: int) -> str:
    return f"C{i + 1}"


@dataclass(frozen=True)
class Diagram:
    """Atoms and blocks in dimension ``dimension``.

    ``blocks`` may be given as :class:`Block` objects or as plain sequences of
    atom ids, in which case they are named ``C1``, ``C2``, ... by position.
    Construction rejects duplicate ids, blocks of the wrong size, unknown ids
    and vectors of the wrong length. Blocks sharing two or more atoms raise
    :class:`LegalityError` when ``dimension == 3`` and emit a
    :class:`LegalityWarning` otherwise.
    """

    dimension: int
    atoms: tuple[Atom, ...]
    blocks: tuple[Block, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if not isinstance(self.dimension, int) or isinstance(self.dimension, bool) or self.dimension < 2:
            raise SchemaError(f"dimension must be an integer >= 2, got {self.dimension!r}")
        d = self.dimension
        atoms = tuple(a if isinstance(a, Atom) else Atom(a) for a in self.atoms)
        index: dict[str, int] = {}
        for i, a in enumerate(atoms):
            if not isinstance(a.id, str) or not a.id:
                raise SchemaError(f"atom id must be a nonempty string, got {a.id!r}")
            if a.id in index:
                raise SchemaError(f"duplicate atom id {a.id!r}")
            if a.ray is not None and a.ray.dim != d:
                raise SchemaError(f"vector of atom {a.id!r} has length {a.ray.dim}, expected {d}")
            index[a.id] = i

        blocks = []
        names = set()
        for i, b in enumerate(self.blocks):
            if not isinstance(b, Block):
                b = Block(_default_block_name(i), tuple(b))
            ids = tuple(b.atom_ids)
            if len(set(ids)) != d or len(ids) != d:
                raise SchemaError(f"block size: block {b.name} has {len(set(ids))} distinct atoms, expected {d}")
            for x in ids:
                if x not in index:
                    raise SchemaError(f"block {b.name} refers to unknown atom {x!r}")
            if b.name in names:
                raise SchemaError(f"duplicate block name {b.name!r}")
            names.add(b.name)
            blocks.append(Block(b.name, ids))

        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "_index", index)
        check_legality(self)

    # lookups

    @property
    def atom_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.atoms)

    def __contains__(self, atom_id: str) -> bool:
        return atom_id in self._index

    def index(self, atom_id: str) -> int:
        try:
            return self._index[atom_id]
        except KeyError:
            raise UnknownAtomError(atom_id) from None

    def atom(self, atom_id: str) -> Atom:
        return self.atoms[self.index(atom_id)]

    def ray_of(self, atom_id: str) -> Ray:
        r = self.atom(atom_id).ray
        if r is None:
            raise MissingCoordinatesError(f"atom {atom_id!r} has no vector")
        return r

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def blocks_containing(self, atom_id: str) -> tuple[Block, ...]:
        self.index(atom_id)
        return tuple(b for b in self.blocks if atom_id in b)

    def degree(self, atom_id: str) -> int:
        return len(self.blocks_containing(atom_id))

    @property
    def is_coordinatized(self) -> bool:
        return all(a.ray is not None for a in self.atoms)


def check_legality(diag: Diagram, strict: bool | None = None) -> list[tuple[str, str, tuple[str, ...]]]:
    """Return block pairs sharing more than one atom.

    With ``strict`` (default: ``dimension == 3``) a violation raises
    :class:`LegalityError`; otherwise it is reported as a warning.
    """
    if strict is None:
        strict = diag.dimension == 3
    sets = [(b.name, set(b.atom_ids)) for b in diag.blocks]
    bad = []
    for (n1, s1), (n2, s2) in combinations(sets, 2):
        shared = s1 & s2
        if len(shared) > 1:
            bad.append((n1, n2, tuple(sorted(shared))))
    if bad:
        n1, n2, shared = bad[0]
        msg = f"blocks {n1} and {n2} share {len(shared)} atoms {list(shared)}"
        if strict:
            raise LegalityError(msg)
        warnings.warn(msg, LegalityWarning, stacklevel=3)
    return bad


def relabel(diag: Diagram, mapping: Mapping[str, str]) -> Diagram:
    """Rename atoms; ids missing from ``mapping`` are kept."""
    new = lambda x: mapping.get(x, x)  # noqa: E731
    return Diagram(
        diag.dimension,
        tuple(Atom(new(a.id), a.ray) for a in diag.atoms),
        tuple(Block(b.name, tuple(new(x) for x in b.atom_ids)) for b in diag.blocks),
    )


# JSON exchange format


def _float_repr(x: float) -> float:
    # shortest round-trip decimal; collapses -0.0
    return x + 0.0


def to_dict(diag: Diagram) -> dict:
    atoms = []
    for a in diag.atoms:
        entry: dict = {"id": a.id}
        if a.ray is not None:
            entry["vector"] = [_float_repr(x) for x in a.ray.components]
        atoms.append(entry)
    doc = {
        "dimension": diag.dimension,
        "atoms": atoms,
        "blocks": [list(b.atom_ids) for b in diag.blocks],
    }
    names = [b.name for b in diag.blocks]
    if names != [_default_block_name(i) for i in range(len(names))]:
        doc["block_names"] = names
    return doc


def serialize(diag: Diagram) -> str:
    """JSON text with one atom and one block per line, fields in fixed order."""
    doc = to_dict(diag)
    lines = ["{", f'  "dimension": {doc["dimension"]},', '  "atoms": [']
    lines += [f"    {json.dumps(a)}," for a in doc["atoms"]]
    if doc["atoms"]:
        lines[-1] = lines[-1].rstrip(",")
    lines.append("  ],")
    lines.append('  "blocks": [')
    lines += [f"    {json.dumps(b)}," for b in doc["blocks"]]
    if doc["blocks"]:
        lines[-1] = lines[-1].rstrip(",")
    if "block_names" in doc:
        lines.append("  ],")
        lines.append(f'  "block_names": {json.dumps(doc["block_names"])}')
    else:
        lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def from_dict(doc: object) -> Diagram:
    if not isinstance(doc, dict):
        raise SchemaError("diagram document must be a JSON object")
    unknown = set(doc) - {"dimension", "atoms", "blocks", "block_names"}
    if unknown:
        raise SchemaError(f"unexpected keys {sorted(unknown)}")
    for key in ("dimension", "atoms", "blocks"):
        if key not in doc:
            raise SchemaError(f"missing key {key!r}")
    d = doc["dimension"]
    if not isinstance(d, int) or isinstance(d, bool):
        raise SchemaError(f"dimension must be an integer, got {d!r}")
    if not isinstance(doc["atoms"], list) or not isinstance(doc["blocks"], list):
        raise SchemaError("'atoms' and 'blocks' must be arrays")
    if not doc["blocks"]:
        raise SchemaError("diagram has no blocks")

    atoms = []
    for entry in doc["atoms"]:
        if isinstance(entry, str):
            entry = {"id": entry}
        if not isinstance(entry, dict) or "id" not in entry:
            raise SchemaError(f"malformed atom entry {entry!r}")
        if set(entry) - {"id", "vector"}:
            raise SchemaError(f"unexpected atom fields {sorted(set(entry) - {'id', 'vector'})}")
        vec = entry.get("vector")
        r = None
        if vec is not None:
            if not isinstance(vec, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in vec
            ):
                raise SchemaError(f"vector of atom {entry['id']!r} must be an array of numbers")
            if len(vec) != d:
                raise SchemaError(f"vector of atom {entry['id']!r} has length {len(vec)}, expected {d}")
            try:
                r = Ray(tuple(float(x) for x in vec))
            except (GeometryError, ValueError) as exc:
                raise SchemaError(f"vector of atom {entry['id']!r}: {exc}") from None
        atoms.append(Atom(entry["id"], r))

    names = doc.get("block_names")
    if names is not None and (
        not isinstance(names, list) or len(names) != len(doc["blocks"])
        or not all(isinstance(n, str) and n for n in names)
    ):
        raise SchemaError("'block_names' must list one nonempty name per block")
    blocks = []
    for i, b in enumerate(doc["blocks"]):
        if not isinstance(b, list) or not all(isinstance(x, str) for x in b):
            raise SchemaError(f"block {i + 1} must be an array of atom ids")
        blocks.append(Block(names[i] if names else _default_block_name(i), tuple(b)))
    return Diagram(d, tuple(atoms), tuple(blocks))


def parse(text: str) -> Diagram:
    """Parse the JSON exchange format."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from None
    return from_dict(doc)


def load(path) -> Diagram:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(diag: Diagram, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(diag))


def to_dot(diag: Diagram, name: str = "greechie") -> str:
    """Graphviz rendering: one node per atom, one chained subgraph per block."""
    q = json.dumps
    lines = [f"graph {q(name)} {{", "  node [shape=circle, width=0.3, fixedsize=false];"]
    for a in diag.atoms:
        lines.append(f"  {q(a.id)} [label={q(a.id)}];")
    for b in diag.blocks:
        lines.append(f"  subgraph {q('block_' + b.name)} {{")
        lines.append(f"    edge [penwidth=2, label={q(b.name)}];")
        lines.append("    " + " -- ".join(q(x) for x in b.atom_ids) + ";")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# geometry-backed construction


def from_vectors(rays: Sequence[Ray], d: int | None = None, tol: float | None = None) -> Diagram:
    """Diagram whose blocks are all ``d``-sets of mutually orthogonal rays.

    Atoms are named ``r0, r1, ...`` in input order; blocks are listed in
    lexicographic order of their atom indices.
    """
    tol = config.resolve(tol)
    rays = list(rays)
    if d is None:
        if not rays:
            raise DiagramError("from_vectors needs at least one ray")
        d = rays[0].dim
    if d > len(rays):
        raise DiagramError(f"dimension {d} exceeds the number of rays ({len(rays)})")
    for r in rays:
        if r.dim != d:
            raise SchemaError(f"ray of dimension {r.dim} in a dimension-{d} diagram")
    for i, j in combinations(range(len(rays)), 2):
        if rays[i].same_as(rays[j], tol):
            raise DiagramError(f"rays {i} and {j} coincide")

    n = len(rays)
    nbrs = [
        [j for j in range(i + 1, n) if is_orthogonal(rays[i], rays[j], tol)]
        for i in range(n)
    ]
    cliques: list[tuple[int, ...]] = []

    def extend(clique: list[int], candidates: list[int]) -> None:
        if len(clique) == d:
            cliques.append(tuple(clique))
            return
        for pos, j in enumerate(candidates):
            if len(clique) + len(candidates) - pos < d:
                return
            nj = set(nbrs[j])
            extend(clique + [j], [k for k in candidates[pos + 1:] if k in nj])

    for i in range(n):
        extend([i], nbrs[i])

    atoms = tuple(Atom(f"r{i}", r) for i, r in enumerate(rays))
    blocks = tuple(tuple(f"r{i}" for i in c) for c in cliques)
    return Diagram(d, atoms, blocks)


@dataclass(frozen=True)
class Violation:
    block: str
    a: str
    b: str
    overlap: float


@dataclass(frozen=True)
class RealizationReport:
    violations: tuple[Violation, ...]
    max_residual: float

    @property
    def ok(self) -> bool:
        return not self.violations


def realize_check(diag: Diagram, tol: float | None = None) -> RealizationReport:
    """List every in-block atom pair whose overlap exceeds ``tol``."""
    tol = config.resolve(tol)
    missing = [a.id for a in diag.atoms if a.ray is None]
    if missing:
        raise MissingCoordinatesError(f"atoms without vectors: {missing}")
    worst = 0.0
    bad = []
    for b in diag.blocks:
        for x, y in combinations(b.atom_ids, 2):
            overlap = abs(inner_product(diag.ray_of(x), diag.ray_of(y)))
            worst = max(worst, overlap)
            if overlap > tol:
                bad.append(Violation(b.name, x, y, overlap))
    return RealizationReport(tuple(bad), worst)


def star(diag: Diagram, atom_id: str) -> Diagram:
    """Sub-diagram of the blocks containing ``atom_id``, keeping block names."""
    blocks = diag.blocks_containing(atom_id)
    keep = {x for b in blocks for x in b.atom_ids}
    atoms = tuple(a for a in diag.atoms if a.id in keep)
    return Diagram(diag.dimension, atoms, blocks)


# named configurations


def make_star(n: int, coordinatize: bool = True) -> Diagram:
    """``n`` contexts in dimension 3 sharing the single atom ``c``.

    Block ``i`` is ``{c, ai, ai'}``; with coordinates ``c = e_z`` and the pair
    ``ai, ai'`` spans the xy-plane rotated by ``i*pi/(2n)``.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"a star needs n >= 1 contexts, got {n!r}")
    atoms = [Atom("c", Ray((0.0, 0.0, 1.0)) if coordinatize else None)]
    blocks = []
    for i in range(1, n + 1):
        theta = i * math.pi / (2 * n)
        a = ray(math.cos(theta), math.sin(theta), 0.0) if coordinatize else None
        a_perp = ray(-math.sin(theta), math.cos(theta), 0.0) if coordinatize else None
        atoms += [Atom(f"a{i}", a), Atom(f"a{i}'", a_perp)]
        blocks.append(("c", f"a{i}", f"a{i}'"))
    return Diagram(3, tuple(atoms), tuple(blocks))


BUG_BLOCKS: tuple[tuple[str, str, str], ...] = (
    ("c", "a", "d"),
    ("c", "m2", "e"),
    ("d", "f", "g"),
    ("e", "h", "k"),
    ("f", "z", "h"),
    ("g", "m6", "b"),
    ("b", "m7", "k"),
)
BUG_ATOMS = ("c", "a", "d", "m2", "e", "f", "g", "h", "k", "z", "m6", "b", "m7")

_R2, _R3, _R12 = math.sqrt(2.0), math.sqrt(3.0), math.sqrt(12.0)

# closed form of the closure found by derive_bug_coordinates()
BUG_COORDINATES: dict[str, tuple[float, float, float]] = {
    "c": (_R2 / _R3, 1 / _R3, 0.0),
    "b": (_R2 / _R3, -1 / _R3, 0.0),
    "a": (1 / _R12, -_R2 / _R12, -3 / _R12),
    "d": (0.5, -_R2 / 2, 0.5),
    "m2": (1 / _R12, -_R2 / _R12, 3 / _R12),
    "e": (0.5, -_R2 / 2, -0.5),
    "f": (1 / _R2, 0.0, -1 / _R2),
    "g": (0.5, _R2 / 2, 0.5),
    "h": (1 / _R2, 0.0, 1 / _R2),
    "k": (0.5, _R2 / 2, -0.5),
    "z": (0.0, 1.0, 0.0),
    "m6": (1 / _R12, _R2 / _R12, -3 / _R12),
    "m7": (1 / _R12, _R2 / _R12, 3 / _R12),
}


def make_bug(coordinatize: bool = True) -> Diagram:
    """Specker's bug: 13 atoms, 7 blocks, ``c`` in C1/C2 and ``b`` in C6/C7.

    The coordinatization puts ``c = (sqrt2, 1, 0)/sqrt3`` and
    ``b = (sqrt2, -1, 0)/sqrt3``, so ``|<c|b>|**2 = 1/9``.
    """
    atoms = tuple(
        Atom(x, ray(BUG_COORDINATES[x]) if coordinatize else None) for x in BUG_ATOMS
    )
    return Diagram(3, atoms, BUG_BLOCKS)


BUG_A_AZIMUTH = -math.pi / 3


def _bug_closure(c: Ray, b: Ray, a: Ray, e: Ray) -> dict[str, Ray]:
    d = cross3(c, a)
    g = cross3(d, b)
    k = cross3(e, b)
    f = cross3(d, g)
    h = cross3(e, k)
    rays = {
        "c": c, "b": b, "a": a, "d": d, "e": e, "m2": cross3(c, e),
        "g": g, "k": k, "f": f, "h": h, "m6": cross3(g, b), "m7": cross3(b, k),
    }
    try:
        rays["z"] = cross3(f, h)
    except GeometryError:
        pass
    return rays


def derive_bug_coordinates(a_azimuth: float = BUG_A_AZIMUTH, samples: int = 720) -> dict[str, Ray]:
    """Numerically close the bug around the fixed rays ``c`` and ``b``.

    ``a`` is placed in the plane orthogonal to ``c`` at ``a_azimuth``; every
    block is then closed with cross products, leaving the azimuth of ``e`` as
    the only free parameter. The C5 residual ``f.h`` is non-negative and only
    touches zero, so the free parameter is pinned by bisecting on the sign of
    its derivative around the smallest sampled residual (ties go to the
    smaller parameter).
    """
    c = ray(_R2, 1.0, 0.0)
    b = ray(_R2, -1.0, 0.0)
    u1, u2 = _plane_basis(c)
    a = _on_plane(u1, u2, a_azimuth)
    d = cross3(c, a)
    f_raw = _sub(b, _scale(d, inner_product(d, b)))

    def residual(phi: float) -> float:
        e = _on_plane(u1, u2, phi)
        h_raw = _sub(b, _scale(e, inner_product(e, b)))
        return _dot(f_raw, h_raw) / math.sqrt(_dot(f_raw, f_raw) * _dot(h_raw, h_raw))

    step = math.pi / samples
    grid = [-math.pi / 2 + i * step for i in range(samples)]
    best = min(grid, key=lambda p: (residual(p), p))
    h = 1e-5

    def slope(phi: float) -> float:
        return (residual(phi + h) - residual(phi - h)) / (2 * h)

    lo, hi = best - step, best + step
    if slope(lo) > 0 or slope(hi) < 0:
        raise GeometryError("bug closure not bracketed")
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if slope(mid) < 0:
            lo = mid
        else:
            hi = mid
    return _bug_closure(c, b, a, _on_plane(u1, u2, lo))


def _plane_basis(c: Ray) -> tuple[Ray, Ray]:
    from .ray_space import complete_context

    basis = complete_context([c])
    return basis[1], basis[2]


def _on_plane(u1: Ray, u2: Ray, phi: float) -> Ray:
    return ray(math.cos(phi) * u1[0] + math.sin(phi) * u2[0],
               math.cos(phi) * u1[1] + math.sin(phi) * u2[1],
               math.cos(phi) * u1[2] + math.sin(phi) * u2[2])


def _dot(x: Iterable[float], y: Iterable[float]) -> float:
    return math.fsum(p * q for p, q in zip(x, y))


def _scale(x: Ray, s: float) -> tuple[float, ...]:
    return tuple(s * v for v in x)


def _sub(x: Iterable[float], y: Iterable[float]) -> tuple[float, ...]:
    return tuple(p - q for p, q in zip(x, y))
