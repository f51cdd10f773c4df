"""Hilbert bases of cone-and-lattice monoids.

The generating-set algorithm is the classical one: split the cone into
simplicial pieces spanned by its rays, collect the lattice points of
each half-open fundamental parallelepiped, and filter the union down to
the irreducible elements.  Cones with lineality are reduced to the
pointed quotient; the result is the quotient's basis lifted through a
fixed section plus +/- a basis of the unit lattice.
"""

from math import floor

from . import kernels, linalg
from .cones import RationalCone, quotient_map, triangulate


def hilbert_basis(rays, lattice_basis):
    """Minimal generating set of cone(rays) intersected with a lattice.

    lattice_basis: rows of a basis of the lattice (inside Z^n).  Returns
    vectors in ambient Z^n coordinates, sorted.
    """
    rays = [linalg.primitive(tuple(r)) for r in rays if any(r)]
    if not rays or not lattice_basis:
        return ()
    # lattice points of the cone live in span(rays) /\ lattice
    span_eqs = linalg.right_kernel_basis(rays)
    M = _lattice_in_span(lattice_basis, span_eqs)
    if not M:
        return ()
    k = len(M)
    ray_coords = []
    for r in rays:
        x = linalg.rational_solve([list(row) for row in linalg.transpose(M)], r)
        if x is None:
            # the lattice meets the span in a smaller subspace: cut the
            # cone down to it and restart
            sub_eqs = linalg.right_kernel_basis(M)
            from .cones import cone_from_inequalities
            n = len(rays[0])
            cut = cone_from_inequalities(
                n, _facets(rays, n), list(span_eqs) + list(sub_eqs))
            if not cut.rays:
                return ()
            return hilbert_basis(cut.rays, lattice_basis)
        ray_coords.append(_primitive_direction(x))
    K = RationalCone(k, ray_coords)
    lin = K.lineality_basis()
    if lin:
        q = quotient_map(lin, k)
        sec = linalg.complement_section(q)
        imgs = {linalg.primitive(linalg.mat_vec(q, r)) for r in K.rays}
        imgs.discard((0,) * len(q))
        pointed = RationalCone(len(q), sorted(imgs))
        basis_c = [linalg.mat_vec(sec, h) for h in _pointed_basis(pointed)]
        for u in lin:
            basis_c.append(tuple(u))
            basis_c.append(tuple(-x for x in u))
    else:
        basis_c = list(_pointed_basis(K))
    Mt = linalg.transpose(M)
    return tuple(sorted(linalg.mat_vec(Mt, h) for h in basis_c))


def _pointed_basis(K):
    """Hilbert basis of a pointed cone cut with the full lattice Z^k."""
    if not K.rays:
        return ()
    candidates = set(K.rays)
    for piece in triangulate(K):
        candidates.update(parallelepiped_points(piece.rays))
    return tuple(kernels.filter_irreducible(
        sorted(candidates), [list(f) for f in K.facets()]))


def parallelepiped_points(rays):
    """Nonzero lattice points of {sum t_i r_i : 0 <= t_i < 1}.

    rays must be linearly independent; there are |det|-many points
    (counting zero), one per residue class modulo the ray lattice.
    """
    rays = [tuple(r) for r in rays]
    k = len(rays)
    H, _ = linalg.hnf(rays)
    diag = []
    for i in range(k):
        lead = next((x for x in H[i] if x), None)
        if lead is None:
            raise ValueError("rays are linearly dependent")
        diag.append(lead)
    if all(d == 1 for d in diag):
        return []
    rt = [list(row) for row in linalg.transpose(rays)]
    out = []
    counters = [0] * k
    while True:
        y = _residue_vector(H, counters, k)
        if any(y):
            t = linalg.rational_solve(rt, y)
            shift = [floor(ti) for ti in t]
            x = tuple(
                yi - sum(shift[j] * rays[j][i] for j in range(k))
                for i, yi in enumerate(y))
            if any(x):
                out.append(x)
        # odometer over residue coordinates
        i = k - 1
        while i >= 0:
            counters[i] += 1
            if counters[i] < diag[i]:
                break
            counters[i] = 0
            i -= 1
        if i < 0:
            break
    return out


def _residue_vector(H, counters, k):
    # representative c_0 * e(p_0) + ... with e(p_i) the pivot columns
    n = len(H[0])
    v = [0] * n
    for i in range(k):
        lead = next(j for j, x in enumerate(H[i]) if x)
        v[lead] = counters[i]
    return tuple(v)


def _lattice_in_span(lattice_basis, span_eqs):
    """Basis of (row lattice) /\ {x : span_eqs . x = 0}."""
    L = linalg.row_basis(lattice_basis)
    if not span_eqs:
        return L
    if not L:
        return ()
    A = linalg.mat_mul(L, linalg.transpose(span_eqs))
    coeffs = linalg.kernel_basis(A)
    if not coeffs:
        return ()
    return linalg.row_basis(linalg.mat_mul(coeffs, L))


def _primitive_direction(x):
    denom = 1
    for v in x:
        denom = denom * v.denominator // _gcd(denom, v.denominator)
    ints = [int(v * denom) for v in x]
    return linalg.primitive(tuple(ints))


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _facets(rays, n):
    from .cones import _facets_of
    return _facets_of(rays, n)[0]
