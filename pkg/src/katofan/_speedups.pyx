# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the scan kernels in _purekernels.py.

Same contracts, same iteration order, same overflow window.  Inputs are
validated to |x| <= 2**20 and dimension <= 16, which makes every
accumulated dot product provably fit in int64 (16 * 2**40 < 2**63).
"""

from libc.stdlib cimport free, malloc

from .errors import ArithmeticOverflow, COORD_BOUND

BACKEND = "compiled"

cdef long long _BOUND = COORD_BOUND


cdef struct ConeTable:
    # flattened facet normals and equations for a list of cones
    long long *data
    int *facet_off   # per cone: offset into data of the facet block
    int *facet_cnt
    int *eq_off
    int *eq_cnt
    int n_cones


cdef int _fill_table(ConeTable *t, list facets, list eqs, int dim) except -1:
    cdef int n = len(facets)
    cdef Py_ssize_t total = 0
    cdef int i, j, k
    cdef long long v
    for i in range(n):
        total += len(facets[i]) + len(eqs[i])
    t.n_cones = n
    t.data = <long long *> malloc(sizeof(long long) * max(total * dim, 1))
    t.facet_off = <int *> malloc(sizeof(int) * max(n, 1))
    t.facet_cnt = <int *> malloc(sizeof(int) * max(n, 1))
    t.eq_off = <int *> malloc(sizeof(int) * max(n, 1))
    t.eq_cnt = <int *> malloc(sizeof(int) * max(n, 1))
    if (t.data == NULL or t.facet_off == NULL or t.facet_cnt == NULL
            or t.eq_off == NULL or t.eq_cnt == NULL):
        raise MemoryError()
    cdef Py_ssize_t pos = 0
    for i in range(n):
        t.facet_off[i] = pos
        t.facet_cnt[i] = len(facets[i])
        for row in facets[i]:
            if len(row) != dim:
                raise ValueError("normal has wrong dimension")
            for j in range(dim):
                v = row[j]
                if v > _BOUND or v < -_BOUND:
                    raise ArithmeticOverflow(
                        "kernel input outside supported range")
                t.data[pos] = v
                pos += 1
        t.eq_off[i] = pos
        t.eq_cnt[i] = len(eqs[i])
        for row in eqs[i]:
            if len(row) != dim:
                raise ValueError("equation has wrong dimension")
            for j in range(dim):
                v = row[j]
                if v > _BOUND or v < -_BOUND:
                    raise ArithmeticOverflow(
                        "kernel input outside supported range")
                t.data[pos] = v
                pos += 1
    return 0


cdef void _free_table(ConeTable *t) noexcept:
    free(t.data)
    free(t.facet_off)
    free(t.facet_cnt)
    free(t.eq_off)
    free(t.eq_cnt)


cdef inline long long _cdot(long long *a, long long *p, int dim) noexcept:
    cdef long long s = 0
    cdef int i
    for i in range(dim):
        s += a[i] * p[i]
    return s


cdef inline int _classify(ConeTable *t, long long *p, int dim,
                          int *n_relint) noexcept:
    # returns 1 when p lies in the support; counts relative interiors
    cdef int c, k, inside, strict
    cdef long long val
    cdef int found = 0
    n_relint[0] = 0
    for c in range(t.n_cones):
        inside = 1
        for k in range(t.eq_cnt[c]):
            if _cdot(t.data + t.eq_off[c] + k * dim, p, dim) != 0:
                inside = 0
                break
        if not inside:
            continue
        strict = 1
        for k in range(t.facet_cnt[c]):
            val = _cdot(t.data + t.facet_off[c] + k * dim, p, dim)
            if val < 0:
                inside = 0
                break
            if val == 0:
                strict = 0
        if inside:
            found = 1
            if strict:
                n_relint[0] += 1
    return found


def scan_box_classify(int dim, long long bound, list src_facets, list src_eqs,
                      list tgt_facets, list tgt_eqs):
    """See katofan._purekernels.scan_box_classify."""
    if dim > 16:
        raise ArithmeticOverflow("kernel supports dimension <= 16")
    if bound > _BOUND:
        raise ArithmeticOverflow("scan bound outside supported range")
    cdef ConeTable src, tgt
    cdef long long point[16]
    cdef int i, n_relint, in_src, in_tgt
    cdef bint done
    _fill_table(&src, src_facets, src_eqs, dim)
    try:
        _fill_table(&tgt, tgt_facets, tgt_eqs, dim)
    except BaseException:
        _free_table(&src)
        raise
    try:
        for i in range(dim):
            point[i] = -bound
        done = dim == 0
        while not done:
            for i in range(dim):
                if point[i] != 0:
                    break
            else:
                i = -1
            if i >= 0:  # nonzero point
                in_src = _classify(&src, point, dim, &n_relint)
                in_tgt = _classify(&tgt, point, dim, &i)
                if in_tgt != in_src or (in_tgt and n_relint != 1):
                    return (
                        tuple(point[k] for k in range(dim)),
                        n_relint,
                        bool(in_src),
                        bool(in_tgt),
                    )
            # odometer step, last coordinate fastest (lexicographic order)
            i = dim - 1
            while i >= 0:
                point[i] += 1
                if point[i] <= bound:
                    break
                point[i] = -bound
                i -= 1
            if i < 0:
                done = True
        return None
    finally:
        _free_table(&src)
        _free_table(&tgt)


def filter_irreducible(list points, list normals):
    """See katofan._purekernels.filter_irreducible."""
    cdef int n = len(points)
    if n == 0:
        return []
    cdef int dim = len(points[0])
    if dim > 16:
        raise ArithmeticOverflow("kernel supports dimension <= 16")
    cdef int m = len(normals)
    cdef long long *pts = <long long *> malloc(
        sizeof(long long) * max(n * dim, 1))
    cdef long long *nrm = <long long *> malloc(
        sizeof(long long) * max(m * dim, 1))
    if pts == NULL or nrm == NULL:
        free(pts)
        free(nrm)
        raise MemoryError()
    cdef int i, j, k
    cdef long long v
    cdef long long diff[16]
    cdef bint reducible, same, zero, incone
    try:
        for i in range(n):
            row = points[i]
            for j in range(dim):
                v = row[j]
                if v > _BOUND or v < -_BOUND:
                    raise ArithmeticOverflow(
                        "kernel input outside supported range")
                pts[i * dim + j] = v
        for i in range(m):
            row = normals[i]
            for j in range(dim):
                v = row[j]
                if v > _BOUND or v < -_BOUND:
                    raise ArithmeticOverflow(
                        "kernel input outside supported range")
                nrm[i * dim + j] = v
        out = []
        for i in range(n):
            reducible = False
            for j in range(n):
                same = True
                zero = True
                for k in range(dim):
                    if pts[j * dim + k] != pts[i * dim + k]:
                        same = False
                    if pts[j * dim + k] != 0:
                        zero = False
                if same or zero:
                    continue
                for k in range(dim):
                    diff[k] = pts[i * dim + k] - pts[j * dim + k]
                incone = True
                for k in range(m):
                    if _cdot(nrm + k * dim, diff, dim) < 0:
                        incone = False
                        break
                if incone:
                    reducible = True
                    break
            if not reducible:
                out.append(tuple(pts[i * dim + k] for k in range(dim)))
        return out
    finally:
        free(pts)
        free(nrm)
