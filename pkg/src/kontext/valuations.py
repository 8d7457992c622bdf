"""Two-valued measures on Greechie diagrams.

A two-valued measure assigns 0 or 1 to every atom so that each block holds
exactly one 1. Partial assignments are plain ``dict[str, int]`` mappings.

Enumeration is a depth-first search over atoms in sorted-id order, value 0
before 1, with unit propagation after every decision; the result is therefore
in lexicographic order of the value vectors read in sorted-id order. The
search itself runs in :mod:`kontext._core` (compiled when available).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import _core
from .greechie import Diagram, DiagramError, UnknownAtomError

PartialValuation = dict[str, int]
Valuation = dict[str, int]


class ContradictionError(DiagramError):
    """Premises cannot be extended: some block got two 1s or only 0s.

    ``witness`` names the offending block and ``assignments`` holds the
    values fixed up to (and including) the step that broke it.
    """

    def __init__(self, witness: str, reason: str, assignments: Mapping[str, int]):
        super().__init__(f"contradiction in block {witness}: {reason}")
        self.witness = witness
        self.reason = reason
        self.assignments = dict(assignments)


class Status(str, enum.Enum):
    FORCED0 = "Forced0"
    FORCED1 = "Forced1"
    CONTINGENT = "Contingent"
    VALUE_INDEFINITE = "ValueIndefinite"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ClassificationReport:
    status: dict[str, Status]
    premises: dict[str, int]

    def __getitem__(self, atom_id: str) -> Status:
        return self.status[atom_id]

    def with_status(self, status: Status) -> list[str]:
        return [x for x, s in self.status.items() if s is status]

    def to_dict(self) -> dict:
        return {
            "premises": dict(sorted(self.premises.items())),
            "status": {x: s.value for x, s in sorted(self.status.items())},
        }


def _check_premises(diag: Diagram, premises: Mapping[str, int]) -> dict[str, int]:
    out = {}
    for x, v in premises.items():
        if x not in diag:
            raise UnknownAtomError(x)
        if v not in (0, 1) or isinstance(v, float):
            raise ValueError(f"value of {x!r} must be 0 or 1, got {v!r}")
        out[x] = int(v)
    return out


def propagate(diag: Diagram, premises: Mapping[str, int]) -> PartialValuation:
    """Close ``premises`` under the two block rules.

    A 1 in a block forces 0 on its other atoms; ``d-1`` zeros in a block force
    1 on the remaining atom. Rules fire in synchronous rounds: every rule is
    evaluated against the previous round's values, and only after the round's
    conclusions are applied are blocks re-checked. A block that ends up with
    two 1s or ``d`` zeros raises :class:`ContradictionError` naming it (the
    first such block in diagram order). When one round forces an atom both
    ways, the 1 is kept, which leaves the block that demanded the 0 holding
    two 1s.
    """
    vals = _check_premises(diag, premises)
    while True:
        _check_blocks(diag, vals)
        forced: dict[str, int] = {}
        for b in diag.blocks:
            ones = [x for x in b.atom_ids if vals.get(x) == 1]
            undefined = [x for x in b.atom_ids if x not in vals]
            if not undefined:
                continue
            if ones:
                for x in undefined:
                    forced.setdefault(x, 0)
            elif len(undefined) == 1:
                forced[undefined[0]] = 1
        if not forced:
            return vals
        vals.update(forced)


def _check_blocks(diag: Diagram, vals: Mapping[str, int]) -> None:
    for b in diag.blocks:
        vs = [vals.get(x) for x in b.atom_ids]
        if vs.count(1) > 1:
            raise ContradictionError(b.name, "two atoms valued 1", vals)
        if vs.count(0) == len(vs):
            raise ContradictionError(b.name, "all atoms valued 0", vals)


def _kernel_args(diag: Diagram, premises: Mapping[str, int]):
    ids = diag.atom_ids
    blocks = [[diag.index(x) for x in b.atom_ids] for b in diag.blocks]
    values = [-1] * len(ids)
    for x, v in premises.items():
        values[diag.index(x)] = v
    order = sorted(range(len(ids)), key=lambda i: ids[i])
    return len(ids), blocks, values, order


def _search(diag: Diagram, premises: Mapping[str, int], limit: int) -> list[Valuation]:
    ids = diag.atom_ids
    if not diag.blocks:
        # nothing constrains the atoms; every free atom may take either value
        return _unconstrained(ids, premises, limit)
    found = _core.search(*_kernel_args(diag, premises), limit)
    return [dict(zip(ids, raw)) for raw in found]


def _unconstrained(ids, premises, limit) -> list[Valuation]:
    free = sorted(x for x in ids if x not in premises)
    out = []
    for k in range(2 ** len(free)):
        v = dict(premises)
        for pos, x in enumerate(free):
            v[x] = (k >> (len(free) - 1 - pos)) & 1
        out.append({x: v[x] for x in ids})
        if limit and len(out) >= limit:
            break
    return out


def enumerate_two_valued(diag: Diagram, premises: Mapping[str, int] | None = None,
                         limit: int = 0) -> list[Valuation]:
    """All two-valued measures (extending ``premises``), in deterministic order.

    ``limit > 0`` stops after that many. An empty list means the diagram
    admits no two-valued measure.
    """
    vals = _check_premises(diag, premises or {})
    return _search(diag, vals, limit)


def count_two_valued(diag: Diagram, premises: Mapping[str, int] | None = None) -> int:
    """Number of two-valued measures, without materializing them."""
    vals = _check_premises(diag, premises or {})
    if not diag.blocks:
        return 2 ** (len(diag.atoms) - len(vals))
    return _core.count(*_kernel_args(diag, vals))


def admits_two_valued(diag: Diagram) -> bool:
    return bool(enumerate_two_valued(diag, limit=1))


def is_separating(diag: Diagram, measures: Iterable[Mapping[str, int]] | None = None) -> bool:
    """True if every pair of distinct atoms is told apart by some measure."""
    if measures is None:
        measures = enumerate_two_valued(diag)
    ids = diag.atom_ids
    # atoms are separated iff their value columns differ
    columns = {}
    for x in ids:
        col = tuple(m[x] for m in measures)
        if col in columns:
            return False
        columns[col] = x
    return True


def is_unital(diag: Diagram, measures: Iterable[Mapping[str, int]] | None = None) -> bool:
    """True if every atom takes the value 1 in some measure."""
    if measures is None:
        measures = enumerate_two_valued(diag)
    seen = set()
    for m in measures:
        seen.update(x for x, v in m.items() if v == 1)
    return all(x in seen for x in diag.atom_ids)


def classify(diag: Diagram, premises: Mapping[str, int]) -> ClassificationReport:
    """Status of every atom relative to ``premises``.

    For each atom, ask whether some two-valued measure extending the premises
    gives it 0, and whether one gives it 1. Both: ``Contingent``; only one:
    ``Forced0``/``Forced1``; neither: ``ValueIndefinite``. Raises
    :class:`ContradictionError` if propagation already refutes the premises.
    """
    vals = _check_premises(diag, premises)
    fixed = propagate(diag, vals)
    ids = diag.atom_ids
    seen: dict[str, set[int]] = {x: set() for x in ids}

    def record(found: list[Valuation]) -> None:
        for m in found:
            for x, v in m.items():
                seen[x].add(v)

    first = _search(diag, fixed, 1)
    if not first:
        status = {x: Status.VALUE_INDEFINITE for x in ids}
        return ClassificationReport(status, vals)
    record(first)
    for x in sorted(ids):
        for v in (0, 1):
            if v in seen[x] or fixed.get(x, v) != v:
                continue
            record(_search(diag, {**fixed, x: v}, 1))

    status = {}
    for x in ids:
        s = seen[x]
        if s == {0, 1}:
            status[x] = Status.CONTINGENT
        elif s == {0}:
            status[x] = Status.FORCED0
        elif s == {1}:
            status[x] = Status.FORCED1
        else:
            status[x] = Status.VALUE_INDEFINITE
    return ClassificationReport(status, vals)


def cnf_clauses(diag: Diagram) -> list[list[int]]:
    """Exactly-one-per-block CNF over atoms numbered 1..n in diagram order."""
    clauses = []
    for b in diag.blocks:
        lits = [diag.index(x) + 1 for x in b.atom_ids]
        clauses.append(lits)
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                clauses.append([-lits[i], -lits[j]])
    return clauses


def to_dimacs(diag: Diagram) -> str:
    """DIMACS CNF whose models are exactly the two-valued measures."""
    clauses = cnf_clauses(diag)
    lines = [f"c {i + 1} {x}" for i, x in enumerate(diag.atom_ids)]
    lines.append(f"p cnf {len(diag.atoms)} {len(clauses)}")
    lines += [" ".join(map(str, cl)) + " 0" for cl in clauses]
    return "\n".join(lines) + "\n"
