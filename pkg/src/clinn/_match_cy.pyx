# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled matching kernel; behavioral twin of clinn._match_py.

Same integer encoding, same pinned search order, same first-solution
semantics. Any change here must be mirrored there (the test suite checks
the two against each other on random instances).
"""

from libc.stdlib cimport malloc, free

DEF KIND_NOVAL = 0
DEF KIND_CONST = 1
DEF KIND_VAR = 2


cdef int _search(
    int g,
    int n_pats,
    const int* pats,
    const int* pat_sec,
    const int* items,
    const int* item_off,
    int* used,
    int* bindings,
) noexcept:
    if g == n_pats:
        return 1
    cdef int s = pat_sec[g]
    cdef int base = g * 4
    cdef int p_act = pats[base]
    cdef int p_slot = pats[base + 1]
    cdef int p_kind = pats[base + 2]
    cdef int p_val = pats[base + 3]
    cdef int j, ib, iv, bound
    for j in range(item_off[s], item_off[s + 1]):
        if used[j]:
            continue
        ib = j * 3
        if items[ib] != p_act or items[ib + 1] != p_slot:
            continue
        iv = items[ib + 2]
        if p_kind == KIND_NOVAL:
            if iv != -1:
                continue
        elif p_kind == KIND_CONST:
            if iv != p_val:
                continue
        else:
            if iv == -1:
                continue
            bound = bindings[p_val]
            if bound == -1:
                bindings[p_val] = iv
                used[j] = 1
                if _search(g + 1, n_pats, pats, pat_sec, items, item_off, used, bindings):
                    return 1
                used[j] = 0
                bindings[p_val] = -1
                continue
            if bound != iv:
                continue
        used[j] = 1
        if _search(g + 1, n_pats, pats, pat_sec, items, item_off, used, bindings):
            return 1
        used[j] = 0
    return 0


def match_first(pats, pat_off, items, item_off, sec_exact, int n_vars, seed):
    """Return the first consistent binding list, or None."""
    cdef int n_sections = len(pat_off) - 1
    cdef int s
    for s in range(n_sections):
        if sec_exact[s] and (pat_off[s + 1] - pat_off[s]) != (item_off[s + 1] - item_off[s]):
            return None

    cdef int n_pats = pat_off[n_sections]
    cdef int n_items = item_off[n_sections]
    cdef int total = n_pats * 4 + n_pats + n_items * 3 + (n_sections + 1) + n_items + n_vars
    cdef int* buf = <int*> malloc((total if total > 0 else 1) * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    cdef int* c_pats = buf
    cdef int* c_pat_sec = c_pats + n_pats * 4
    cdef int* c_items = c_pat_sec + n_pats
    cdef int* c_item_off = c_items + n_items * 3
    cdef int* c_used = c_item_off + (n_sections + 1)
    cdef int* c_bind = c_used + n_items

    cdef int i, g
    try:
        for i in range(n_pats * 4):
            c_pats[i] = pats[i]
        for s in range(n_sections):
            for g in range(pat_off[s], pat_off[s + 1]):
                c_pat_sec[g] = s
        for i in range(n_items * 3):
            c_items[i] = items[i]
        for i in range(n_sections + 1):
            c_item_off[i] = item_off[i]
        for i in range(n_items):
            c_used[i] = 0
        for i in range(n_vars):
            c_bind[i] = seed[i]

        if _search(0, n_pats, c_pats, c_pat_sec, c_items, c_item_off, c_used, c_bind):
            return [c_bind[i] for i in range(n_vars)]
        return None
    finally:
        free(buf)
