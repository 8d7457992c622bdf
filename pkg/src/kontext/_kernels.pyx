# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernel; same contract as ``kontext._kernels_py.search``."""
from libc.stdlib cimport malloc, free
from libc.string cimport memset


cdef struct State:
    int n
    int m
    int d
    int *blocks        # m * d atom indices
    int *inc_ptr       # n + 1 offsets into inc_blk
    int *inc_blk
    signed char *val
    int *ones
    int *zeros
    int *trail
    int trail_len
    int *stack_x       # pending (atom, value) pairs
    signed char *stack_v
    int stack_len
    int stack_cap


cdef bint _push(State *s, int x, signed char v) nogil:
    if s.stack_len >= s.stack_cap:
        return False
    s.stack_x[s.stack_len] = x
    s.stack_v[s.stack_len] = v
    s.stack_len += 1
    return True


cdef bint _assign(State *s, int x0, signed char v0) nogil:
    cdef int x, k, bi, j, y
    cdef signed char v, cur
    cdef bint ok
    s.stack_len = 0
    _push(s, x0, v0)
    while s.stack_len > 0:
        s.stack_len -= 1
        x = s.stack_x[s.stack_len]
        v = s.stack_v[s.stack_len]
        cur = s.val[x]
        if cur == v:
            continue
        if cur != -1:
            return False
        s.val[x] = v
        s.trail[s.trail_len] = x
        s.trail_len += 1
        # finish every counter update before failing: _undo reverts them all
        ok = True
        for k in range(s.inc_ptr[x], s.inc_ptr[x + 1]):
            bi = s.inc_blk[k]
            if v:
                s.ones[bi] += 1
                if s.ones[bi] > 1:
                    ok = False
            else:
                s.zeros[bi] += 1
                if s.zeros[bi] == s.d:
                    ok = False
        if not ok:
            return False
        for k in range(s.inc_ptr[x], s.inc_ptr[x + 1]):
            bi = s.inc_blk[k]
            if s.ones[bi] == 1:
                for j in range(s.d):
                    y = s.blocks[bi * s.d + j]
                    if s.val[y] == -1 and not _push(s, y, 0):
                        return False
            elif s.zeros[bi] == s.d - 1:
                for j in range(s.d):
                    y = s.blocks[bi * s.d + j]
                    if s.val[y] == -1 and not _push(s, y, 1):
                        return False
    return True


cdef void _undo(State *s, int mark) nogil:
    cdef int x, k, bi
    cdef signed char v
    while s.trail_len > mark:
        s.trail_len -= 1
        x = s.trail[s.trail_len]
        v = s.val[x]
        s.val[x] = -1
        for k in range(s.inc_ptr[x], s.inc_ptr[x + 1]):
            bi = s.inc_blk[k]
            if v:
                s.ones[bi] -= 1
            else:
                s.zeros[bi] -= 1


cdef bint _complete(State *s) nogil:
    cdef int i
    for i in range(s.n):
        if s.val[i] == -1:
            return False
    return True


cdef int _dfs(State *s, int *order, int n_order, int pos, list out, int limit,
              long long *found) except -1:
    cdef int x, mark
    cdef signed char v
    while pos < n_order and s.val[order[pos]] != -1:
        pos += 1
    if pos == n_order:
        if not _complete(s):
            return 0
        found[0] += 1
        if out is not None:
            out.append((<char *> s.val)[:s.n])
        return 1 if (limit > 0 and found[0] >= limit) else 0
    x = order[pos]
    for v in range(2):
        mark = s.trail_len
        if _assign(s, x, v):
            if _dfs(s, order, n_order, pos + 1, out, limit, found):
                return 1
        _undo(s, mark)
    return 0


def search(int n_atoms, blocks, values, order, int limit=0):
    out = []
    _run(n_atoms, blocks, values, order, limit, out)
    return out


def count(int n_atoms, blocks, values, order):
    return _run(n_atoms, blocks, values, order, 0, None)


cdef long long _run(int n_atoms, blocks, values, order, int limit, list out) except -1:
    cdef State s
    cdef long long found = 0
    cdef int m = len(blocks)
    cdef int d = len(blocks[0]) if m else 0
    cdef int i, j, x, k, n_inc = 0
    cdef int n_order = len(order)
    cdef int *c_order = NULL
    cdef int *fill = NULL

    memset(&s, 0, sizeof(State))
    s.n = n_atoms
    s.m = m
    s.d = d
    s.stack_cap = n_atoms * (m + 1) * (d + 1) + 1
    try:
        s.blocks = <int *> malloc(max(1, m * d) * sizeof(int))
        s.inc_ptr = <int *> malloc((n_atoms + 1) * sizeof(int))
        s.inc_blk = <int *> malloc(max(1, m * d) * sizeof(int))
        s.val = <signed char *> malloc(max(1, n_atoms) * sizeof(signed char))
        s.ones = <int *> malloc(max(1, m) * sizeof(int))
        s.zeros = <int *> malloc(max(1, m) * sizeof(int))
        s.trail = <int *> malloc(max(1, n_atoms) * sizeof(int))
        s.stack_x = <int *> malloc(s.stack_cap * sizeof(int))
        s.stack_v = <signed char *> malloc(s.stack_cap * sizeof(signed char))
        c_order = <int *> malloc(max(1, n_order) * sizeof(int))
        fill = <int *> malloc((n_atoms + 1) * sizeof(int))
        if (s.blocks == NULL or s.inc_ptr == NULL or s.inc_blk == NULL or s.val == NULL
                or s.ones == NULL or s.zeros == NULL or s.trail == NULL
                or s.stack_x == NULL or s.stack_v == NULL or c_order == NULL or fill == NULL):
            raise MemoryError()

        for i in range(n_atoms + 1):
            s.inc_ptr[i] = 0
        for i in range(m):
            blk = blocks[i]
            if len(blk) != d:
                raise ValueError("all blocks must have the same size")
            for j in range(d):
                x = blk[j]
                if x < 0 or x >= n_atoms:
                    raise IndexError(f"atom index {x} out of range")
                s.blocks[i * d + j] = x
                s.inc_ptr[x + 1] += 1
        for i in range(n_atoms):
            s.inc_ptr[i + 1] += s.inc_ptr[i]
            fill[i] = s.inc_ptr[i]
        for i in range(m):
            for j in range(d):
                x = s.blocks[i * d + j]
                s.inc_blk[fill[x]] = i
                fill[x] += 1
        for i in range(n_atoms):
            s.val[i] = -1
        for i in range(m):
            s.ones[i] = 0
            s.zeros[i] = 0
        for i in range(n_order):
            x = order[i]
            if x < 0 or x >= n_atoms:
                raise IndexError(f"atom index {x} out of range")
            c_order[i] = x

        for i in range(n_atoms):
            k = values[i]
            if k != -1:
                if not _assign(&s, i, <signed char> k):
                    return 0
        _dfs(&s, c_order, n_order, 0, out, limit, &found)
        return found
    finally:
        free(s.blocks)
        free(s.inc_ptr)
        free(s.inc_blk)
        free(s.val)
        free(s.ones)
        free(s.zeros)
        free(s.trail)
        free(s.stack_x)
        free(s.stack_v)
        free(c_order)
        free(fill)
