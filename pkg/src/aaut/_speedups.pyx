# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels.  Same contract as ``_purekernels``."""

BACKEND = "cython"


cdef inline Py_ssize_t _bisect_left(list a, object x, Py_ssize_t lo):
    cdef Py_ssize_t hi = len(a)
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline bint _has_prefix(tuple a, tuple p):
    cdef Py_ssize_t n = len(p)
    cdef Py_ssize_t i
    if len(a) < n:
        return False
    for i in range(n):
        if a[i] != p[i]:
            return False
    return True


cpdef object leaf_prefix(dict mapping, tuple addr, Py_ssize_t maxlen):
    cdef Py_ssize_t n = len(addr)
    cdef Py_ssize_t i
    cdef tuple p
    if n > maxlen:
        n = maxlen
    for i in range(1, n + 1):
        p = addr[:i]
        if p in mapping:
            return p
    return None


cpdef object image(dict mapping, tuple addr, Py_ssize_t maxlen):
    cdef Py_ssize_t n = len(addr)
    cdef Py_ssize_t i
    cdef object q
    if n > maxlen:
        n = maxlen
    for i in range(1, n + 1):
        q = mapping.get(addr[:i])
        if q is not None:
            return <tuple>q + addr[i:]
    return None


cpdef tuple extension_range(list sorted_addrs, tuple addr):
    cdef Py_ssize_t lo = _bisect_left(sorted_addrs, addr, 0)
    cdef tuple bound = addr[:-1] + (addr[len(addr) - 1] + 1,)
    cdef Py_ssize_t hi = _bisect_left(sorted_addrs, bound, lo)
    return lo, hi


cpdef list compose_pairs(dict g_map, list g_sorted, Py_ssize_t g_maxlen, list h_pairs):
    cdef list out = []
    cdef tuple p, q, r
    cdef object img
    cdef Py_ssize_t lo, hi, i, n
    for pair in h_pairs:
        p = <tuple>pair[0]
        q = <tuple>pair[1]
        img = image(g_map, q, g_maxlen)
        if img is not None:
            out.append((p, img))
            continue
        lo, hi = extension_range(g_sorted, q)
        n = len(q)
        for i in range(lo, hi):
            r = <tuple>g_sorted[i]
            out.append((p + r[n:], g_map[r]))
    return out


cpdef list reduce_pairs(list pairs, int d):
    cdef dict m = dict(pairs)
    cdef list stack = sorted({(<tuple>p)[:-1] for p in m if len(<tuple>p) >= 2})
    cdef tuple p, q
    cdef object q0
    cdef int i
    cdef bint ok
    while stack:
        p = <tuple>stack.pop()
        q0 = m.get(p + (0,))
        if q0 is None or len(<tuple>q0) < 2 or (<tuple>q0)[len(<tuple>q0) - 1] != 0:
            continue
        q = (<tuple>q0)[:-1]
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


cpdef list minimal_sorted(list addrs):
    cdef list out = []
    cdef Py_ssize_t n = len(addrs)
    cdef Py_ssize_t i
    cdef tuple c, nxt
    for i in range(n):
        c = <tuple>addrs[i]
        if i + 1 < n:
            nxt = <tuple>addrs[i + 1]
            if len(nxt) > len(c) and _has_prefix(nxt, c):
                continue
        out.append(c)
    return out


cpdef list theta_sweep(list targets, list cands):
    cdef list result = []
    cdef Py_ssize_t lo, hi
    for t in targets:
        lo, hi = extension_range(cands, <tuple>t)
        result.append(minimal_sorted(cands[lo:hi]))
    return result
