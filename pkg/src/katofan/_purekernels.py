"""Pure-Python reference implementations of the hot scan kernels.

katofan._speedups implements the same two functions in compiled form;
katofan.kernels picks whichever is available.  Both implementations
must stay bit-for-bit interchangeable: same iteration order, same
results, same overflow guards.
"""

from itertools import product

from .errors import ArithmeticOverflow, COORD_BOUND

BACKEND = "pure"


def _check_ranges(dim, vectors_groups, bound=0):
    if dim > 16:
        raise ArithmeticOverflow("kernel supports dimension <= 16")
    if bound > COORD_BOUND:
        raise ArithmeticOverflow("scan bound outside supported range")
    for group in vectors_groups:
        for vecs in group:
            for v in vecs:
                for x in v:
                    if x > COORD_BOUND or x < -COORD_BOUND:
                        raise ArithmeticOverflow(
                            "kernel input outside supported range"
                        )


def scan_box_classify(dim, bound, src_facets, src_eqs, tgt_facets, tgt_eqs):
    """Scan lattice points of [-bound, bound]^dim against two cone lists.

    src_* describe the cones of a candidate subdivision, tgt_* the cones
    of the fan being subdivided; each cone is a list of facet normals
    plus a list of span equations.  For every nonzero point the scan
    tests: point in the target support iff in the source support, and if
    so, in the relative interior of exactly one source cone.

    Returns None if no point violates this, else a tuple
    (point, relint_count, in_source_support, in_target_support) for the
    lexicographically first violation.
    """
    _check_ranges(dim, (src_facets, src_eqs, tgt_facets, tgt_eqs), bound)
    src = list(zip(src_facets, src_eqs))
    tgt = list(zip(tgt_facets, tgt_eqs))
    for point in product(range(-bound, bound + 1), repeat=dim):
        if not any(point):
            continue
        n_relint = 0
        in_src = False
        for facets, eqs in src:
            if any(_dot(e, point) for e in eqs):
                continue
            vals = [_dot(f, point) for f in facets]
            if all(v >= 0 for v in vals):
                in_src = True
                if all(v > 0 for v in vals):
                    n_relint += 1
        in_tgt = any(
            not any(_dot(e, point) for e in eqs)
            and all(_dot(f, point) >= 0 for f in facets)
            for facets, eqs in tgt
        )
        if in_tgt != in_src or (in_tgt and n_relint != 1):
            return (tuple(point), n_relint, in_src, in_tgt)
    return None


def filter_irreducible(points, normals):
    """Keep the points not expressible as a sum of two nonzero points.

    points must be the candidate generating set of a pointed
    full-dimensional saturated monoid (cone cut out by the facet
    normals, intersected with the full lattice); then a point h is
    reducible iff h - c lands back in the cone for some other listed
    point c.
    """
    if points:
        _check_ranges(len(points[0]), ((points,), (normals,)))
    out = []
    for h in points:
        reducible = False
        for c in points:
            if c == h or not any(c):
                continue
            diff = tuple(a - b for a, b in zip(h, c))
            if all(_dot(n, diff) >= 0 for n in normals):
                reducible = True
                break
        if not reducible:
            out.append(tuple(h))
    return out


def _dot(a, b):
    s = 0
    for x, y in zip(a, b):
        s += x * y
    return s
