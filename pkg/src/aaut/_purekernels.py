"""Pure-Python hot kernels; the reference for ``_speedups.pyx``.

Addresses are digit tuples.  A leaf map is a dict from domain leaves to range
leaves; ``maxlen`` is the longest domain leaf, bounding prefix scans.
"""

from bisect import bisect_left

BACKEND = "python"


def leaf_prefix(mapping, addr, maxlen):
    """Domain leaf that is a prefix of ``addr``, or None."""
    n = min(len(addr), maxlen)
    for i in range(1, n + 1):
        p = addr[:i]
        if p in mapping:
            return p
    return None


def image(mapping, addr, maxlen):
    """Image of the ball ``addr`` under the prefix substitution, or None."""
    n = min(len(addr), maxlen)
    for i in range(1, n + 1):
        p = addr[:i]
        q = mapping.get(p)
        if q is not None:
            return q + addr[i:]
    return None


def extension_range(sorted_addrs, addr):
    """Half-open index range of entries having ``addr`` as a prefix."""
    lo = bisect_left(sorted_addrs, addr)
    hi = bisect_left(sorted_addrs, addr[:-1] + (addr[-1] + 1,), lo)
    return lo, hi


def compose_pairs(g_map, g_sorted, g_maxlen, h_pairs):
    """Unreduced leaf pairs of ``g o h`` (apply ``h`` first)."""
    out = []
    for p, q in h_pairs:
        img = image(g_map, q, g_maxlen)
        if img is not None:
            out.append((p, img))
            continue
        lo, hi = extension_range(g_sorted, q)
        n = len(q)
        for i in range(lo, hi):
            r = g_sorted[i]
            out.append((p + r[n:], g_map[r]))
    return out


def reduce_pairs(pairs, d):
    """Collapse full sibling blocks that map in order onto a sibling block.

    Returns the pairs sorted by domain leaf.  Blocks never collapse onto the
    root on either side.
    """
    m = dict(pairs)
    stack = sorted({p[:-1] for p in m if len(p) >= 2})
    while stack:
        p = stack.pop()
        q0 = m.get(p + (0,))
        if q0 is None or len(q0) < 2 or q0[-1] != 0:
            continue
        q = q0[:-1]
        ok = True
        for i in range(1, d):
            if m.get(p + (i,)) != q + (i,):
                ok = False
                break
        if not ok:
            continue
        for i in range(d):
            del m[p + (i,)]
        m[p] = q
        if len(p) >= 2:
            stack.append(p[:-1])
    return sorted(m.items())


def minimal_sorted(addrs):
    """The inclusion-minimal balls (deepest vertices) of a sorted, deduplicated list."""
    out = []
    n = len(addrs)
    for i in range(n):
        c = addrs[i]
        if i + 1 < n:
            nxt = addrs[i + 1]
            if len(nxt) > len(c) and nxt[: len(c)] == c:
                continue
        out.append(c)
    return out


def theta_sweep(targets, cands):
    """For each target ball, the minimal candidates inside it (possibly none).

    ``cands`` must be sorted and deduplicated.
    """
    result = []
    for t in targets:
        lo, hi = extension_range(cands, t)
        result.append(minimal_sorted(cands[lo:hi]))
    return result
