"""Pure-Python matching kernel.

Operates on the integer encoding produced by clinn.engine. A pattern is
four ints (act, slot, kind, val) and an item three (act, slot, val), both
flattened section-major; string identity has already been reduced to id
equality. Mirrored by the optional compiled kernel in _match_cy.pyx; the
two must stay behaviorally identical.

Search order is part of the engine contract: patterns in declaration
order, items in canonical sorted order (the encoder sorts them), first
complete solution wins.
"""

from __future__ import annotations

# pattern value kinds
KIND_NOVAL = 0  # item must have no value
KIND_CONST = 1  # item value must equal the pattern's
KIND_VAR = 2  # item must have a value; bind or check the variable


def match_first(
    pats,  # flat ints, 4 per pattern: act, slot, kind, val
    pat_off,  # per-section pattern offsets, len n_sections + 1 (pattern counts)
    items,  # flat ints, 3 per item: act, slot, val
    item_off,  # per-section item offsets, len n_sections + 1 (item counts)
    sec_exact,  # per-section flag: require a bijection with the section's items
    n_vars,
    seed,  # seed bindings, len n_vars, -1 for unbound
):
    """Return the first consistent binding list, or None."""
    n_sections = len(pat_off) - 1
    for s in range(n_sections):
        if sec_exact[s] and (pat_off[s + 1] - pat_off[s]) != (item_off[s + 1] - item_off[s]):
            return None

    bindings = list(seed)
    n_pats = pat_off[n_sections]
    used = [False] * item_off[n_sections]

    # Section index per global pattern, precomputed to keep the inner loop flat.
    pat_sec = [0] * n_pats
    for s in range(n_sections):
        for g in range(pat_off[s], pat_off[s + 1]):
            pat_sec[g] = s

    def search(g: int) -> bool:
        if g == n_pats:
            return True
        s = pat_sec[g]
        base = g * 4
        p_act = pats[base]
        p_slot = pats[base + 1]
        p_kind = pats[base + 2]
        p_val = pats[base + 3]
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
            else:  # KIND_VAR
                if iv == -1:
                    continue
                bound = bindings[p_val]
                if bound == -1:
                    bindings[p_val] = iv
                    used[j] = True
                    if search(g + 1):
                        return True
                    used[j] = False
                    bindings[p_val] = -1
                    continue
                if bound != iv:
                    continue
            used[j] = True
            if search(g + 1):
                return True
            used[j] = False
        return False

    if search(0):
        return bindings
    return None
