"""Pure-Python search kernel (fallback for the compiled ``_kernels``).

Both implementations share one contract (plus ``count``, which returns the
number of solutions without materializing them):

``search(n_atoms, blocks, values, order, limit)``
    ``blocks`` is a sequence of equal-length sequences of atom indices,
    ``values`` the initial assignment (-1 undefined, 0, 1), ``order`` the
    branching order over atom indices and ``limit`` the maximum number of
    solutions to return (0 = all). Returns a list of ``bytes`` objects, one
    per total two-valued assignment (exactly one 1 per block), in the order
    the depth-first search finds them: branch on the first undefined atom of
    ``order``, value 0 before 1, unit-propagating after every decision.
"""
from __future__ import annotations

from typing import Sequence


def search(
    n_atoms: int,
    blocks: Sequence[Sequence[int]],
    values: Sequence[int],
    order: Sequence[int],
    limit: int = 0,
) -> list[bytes]:
    return _run(n_atoms, blocks, values, order, limit, collect=True)


def count(n_atoms: int, blocks: Sequence[Sequence[int]], values: Sequence[int],
          order: Sequence[int]) -> int:
    """Number of solutions ``search`` would return with ``limit=0``."""
    return _run(n_atoms, blocks, values, order, 0, collect=False)


def _run(n_atoms, blocks, values, order, limit, collect):
    blocks = [list(b) for b in blocks]
    d = len(blocks[0]) if blocks else 0
    incidence: list[list[int]] = [[] for _ in range(n_atoms)]
    for bi, blk in enumerate(blocks):
        for x in blk:
            incidence[x].append(bi)

    val = [-1] * n_atoms
    ones = [0] * len(blocks)
    zeros = [0] * len(blocks)
    trail: list[int] = []
    out: list[bytes] = []
    found = 0

    def assign(x: int, v: int) -> bool:
        """Set ``x := v`` and propagate; False on conflict (trail keeps partial work)."""
        stack = [(x, v)]
        while stack:
            x, v = stack.pop()
            cur = val[x]
            if cur == v:
                continue
            if cur != -1:
                return False
            val[x] = v
            trail.append(x)
            touched = incidence[x]
            # finish every counter update before failing: undo() reverts them all
            ok = True
            for bi in touched:
                if v:
                    ones[bi] += 1
                    ok = ok and ones[bi] <= 1
                else:
                    zeros[bi] += 1
                    ok = ok and zeros[bi] < d
            if not ok:
                return False
            for bi in touched:
                if ones[bi] == 1:
                    for y in blocks[bi]:
                        if val[y] == -1:
                            stack.append((y, 0))
                elif zeros[bi] == d - 1:
                    for y in blocks[bi]:
                        if val[y] == -1:
                            stack.append((y, 1))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            x = trail.pop()
            v = val[x]
            val[x] = -1
            for bi in incidence[x]:
                if v:
                    ones[bi] -= 1
                else:
                    zeros[bi] -= 1

    for x, v in enumerate(values):
        if v != -1 and not assign(x, v):
            return out if collect else 0

    def dfs(pos: int) -> bool:
        while pos < len(order) and val[order[pos]] != -1:
            pos += 1
        if pos == len(order):
            # atoms outside ``order`` must already be fixed by propagation
            if -1 in val:
                return False
            nonlocal found
            found += 1
            if collect:
                out.append(bytes(val))
            return bool(limit) and found >= limit
        x = order[pos]
        for v in (0, 1):
            mark = len(trail)
            if assign(x, v) and dfs(pos + 1):
                return True
            undo(mark)
        return False

    dfs(0)
    return out if collect else found
