"""Strongly convex rational polyhedral cones with exact integer arithmetic.

A cone is stored by a canonical generating set: primitive rays, sorted
lexicographically, with non-extreme generators removed (for cones with
lineality the canonical set is a lifted generating set of the pointed
quotient together with +/- a basis of the lineality lattice).  Cone
equality is equality of these ray sets.
"""

from dataclasses import dataclass
from itertools import combinations

from . import linalg
from .errors import (
    NotSimplicial,
    NotStronglyConvex,
    check_coords,
)


class RationalCone:
    """A rational polyhedral cone in Z^ambient_rank, given by rays."""

    __slots__ = ("ambient_rank", "rays", "_facets", "_equations", "_dim",
                 "_lineality")

    def __init__(self, ambient_rank, rays):
        check_coords(rays, "ray coordinate")
        rays = [linalg.primitive(tuple(r)) for r in rays]
        rays = sorted({r for r in rays if any(r)})
        for r in rays:
            if len(r) != ambient_rank:
                raise ValueError("ray length differs from ambient rank")
        self.ambient_rank = ambient_rank
        self._facets = None
        self._equations = None
        self._dim = None
        self._lineality = None
        self.rays = self._canonical(rays)

    def _canonical(self, rays):
        if not rays:
            return ()
        facets, equations = _facets_of(rays, self.ambient_rank)
        lin = _lineality_basis(facets, equations, self.ambient_rank)
        if not lin:
            # pointed: keep extreme rays only (the minimal face containing
            # an extreme ray is one-dimensional)
            keep = []
            for r in rays:
                active = [list(h) for h in facets if linalg.dot(h, r) == 0]
                active += [list(e) for e in equations]
                if self.ambient_rank - linalg.rational_rank(active) == 1:
                    keep.append(r)
            out = tuple(sorted(keep))
        else:
            # lineality basis +/- plus canonical lifts of the quotient rays
            q = quotient_map(lin, self.ambient_rank)
            sec = linalg.complement_section(q)
            imgs = sorted({linalg.primitive(linalg.mat_vec(q, r))
                           for r in rays} - {(0,) * len(q)})
            quot = RationalCone(len(q), imgs)
            lifted = [linalg.mat_vec(sec, r) for r in quot.rays]
            out = []
            for b in lin:
                out.append(tuple(b))
                out.append(tuple(-x for x in b))
            out.extend(tuple(v) for v in lifted)
            out = tuple(sorted(set(out)))
        self._facets = None  # facet cache refers to the old generating set
        self._equations = None
        return out

    # -- cached descriptions ------------------------------------------------

    def facets(self):
        """Inner facet normals: the cone is {x : N x >= 0, E x = 0}."""
        if self._facets is None:
            self._facets, self._equations = _facets_of(
                self.rays, self.ambient_rank)
        return self._facets

    def equations(self):
        if self._equations is None:
            self.facets()
        return self._equations

    def dim(self):
        if self._dim is None:
            self._dim = linalg.rank(self.rays)
        return self._dim

    def lineality_basis(self):
        if self._lineality is None:
            self._lineality = _lineality_basis(
                self.facets(), self.equations(), self.ambient_rank)
        return self._lineality

    def is_strongly_convex(self):
        return not self.lineality_basis()

    def is_simplicial(self):
        return len(self.rays) == self.dim()

    # -- predicates ----------------------------------------------------------

    def contains(self, v, mode="closure"):
        """Exact membership, in the closure or the relative interior."""
        v = tuple(v)
        if len(v) != self.ambient_rank:
            raise ValueError("vector length differs from ambient rank")
        if any(linalg.dot(e, v) for e in self.equations()):
            return False
        vals = [linalg.dot(h, v) for h in self.facets()]
        if mode == "closure":
            return all(x >= 0 for x in vals)
        if mode == "relative_interior":
            return all(x > 0 for x in vals)
        raise ValueError(f"unknown mode {mode!r}")

    def contains_cone(self, other):
        return all(self.contains(r) for r in other.rays)

    # -- dunder --------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, RationalCone)
                and self.ambient_rank == other.ambient_rank
                and self.rays == other.rays)

    def __hash__(self):
        return hash((self.ambient_rank, self.rays))

    def __repr__(self):
        return f"RationalCone({self.ambient_rank}, {list(self.rays)})"


@dataclass(frozen=True)
class Face:
    """A face of a cone with one integer functional cutting it out."""
    cone: RationalCone
    functional: tuple


def _facets_of(rays, n):
    """Facet normals and span equations of cone(rays) in Z^n.

    Every facet contains dim-1 independent rays, so normals are found
    among the integer kernels of (dim-1)-subsets of the rays.
    """
    if not rays:
        return (), tuple(linalg.identity(n))
    equations = linalg.right_kernel_basis(rays)
    d = n - len(equations)
    if d == 0:
        return (), tuple(equations)
    normals = set()
    for sub in combinations(rays, d - 1):
        if linalg.rank(sub) != d - 1:
            continue
        stacked = list(sub) + [list(e) for e in equations]
        if stacked:
            ker = linalg.right_kernel_basis(stacked)
        else:
            ker = linalg.identity(n)
        if len(ker) != 1:
            continue
        h = linalg.primitive(ker[0])
        vals = [linalg.dot(h, r) for r in rays]
        if all(x >= 0 for x in vals) and any(vals):
            normals.add(h)
        elif all(x <= 0 for x in vals) and any(vals):
            normals.add(tuple(-x for x in h))
    return tuple(sorted(normals)), tuple(equations)


def _lineality_basis(facets, equations, n):
    """Saturated basis of the lineality lattice of {Nx >= 0, Ex = 0}."""
    stacked = list(facets) + list(equations)
    if not stacked:
        return tuple(linalg.row_basis(linalg.identity(n)))
    return linalg.right_kernel_basis(stacked)


def quotient_map(kernel_rows, n):
    """Surjection q : Z^n -> Z^(n-m) whose kernel is the given saturated
    lattice (rows)."""
    if not kernel_rows:
        return linalg.identity(n)
    B = _snf_right_transform(kernel_rows, n)
    m = linalg.rank(kernel_rows)
    bt = linalg.transpose(B)
    return tuple(bt[m:])


def _snf_right_transform(rows, n):
    """Unimodular B with rows * B = [D | 0] in Smith form."""
    a = [list(r) for r in rows]
    m = len(a)
    b = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    top = 0
    while top < m and top < n:
        piv = None
        for i in range(top, m):
            for j in range(top, n):
                if a[i][j]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i0, j0 = piv
        a[top], a[i0] = a[i0], a[top]
        if j0 != top:
            for r in a:
                r[top], r[j0] = r[j0], r[top]
            for r in b:
                r[top], r[j0] = r[j0], r[top]
        while True:
            for i in range(top + 1, m):
                while a[i][top]:
                    q = a[top][top] // a[i][top]
                    for c in range(n):
                        a[top][c] -= q * a[i][c]
                    a[top], a[i] = a[i], a[top]
            col_clear = True
            for j in range(top + 1, n):
                while a[top][j]:
                    q = a[top][top] // a[top][j]
                    for r in a:
                        r[top] -= q * r[j]
                    for r in b:
                        r[top] -= q * r[j]
                    for r in a:
                        r[top], r[j] = r[j], r[top]
                    for r in b:
                        r[top], r[j] = r[j], r[top]
                    col_clear = False
            if col_clear and all(a[i][top] == 0 for i in range(top + 1, m)):
                break
        top += 1
    return tuple(tuple(r) for r in b)


# ---------------------------------------------------------------------------
# operations


def dual_cone(c):
    """The cone of integer functionals nonnegative on c.

    Equals the cone generated by the facet normals of c together with
    +/- its span equations.
    """
    gens = list(c.facets())
    for e in c.equations():
        gens.append(tuple(e))
        gens.append(tuple(-x for x in e))
    return RationalCone(c.ambient_rank, gens)


def cone_from_inequalities(n, normals, equations=()):
    """The cone {x in R^n : normals . x >= 0, equations . x = 0}."""
    gens = [tuple(h) for h in normals]
    for e in equations:
        gens.append(tuple(e))
        gens.append(tuple(-x for x in e))
    return dual_cone(RationalCone(n, gens))


def intersect(c1, c2):
    if c1.ambient_rank != c2.ambient_rank:
        raise ValueError("ambient ranks differ")
    return cone_from_inequalities(
        c1.ambient_rank,
        list(c1.facets()) + list(c2.facets()),
        list(c1.equations()) + list(c2.equations()),
    )


def is_strongly_convex(c):
    return c.is_strongly_convex()


def faces(c):
    """All faces of a strongly convex cone, ordered by inclusion.

    Returns a list of Face records (cone + a functional cutting the face
    out of c); the list is sorted by (dim, rays) and always contains the
    zero cone and c itself.
    """
    if not c.is_strongly_convex():
        raise NotStronglyConvex("faces are only enumerated for pointed cones")
    facet_list = c.facets()
    seen = {}
    for k in range(len(facet_list) + 1):
        for sub in combinations(range(len(facet_list)), k):
            rays = [r for r in c.rays
                    if all(linalg.dot(facet_list[i], r) == 0 for i in sub)]
            face_cone = RationalCone(c.ambient_rank, rays)
            if face_cone.rays in seen:
                continue
            functional = tuple(
                sum(facet_list[i][j] for i in sub)
                for j in range(c.ambient_rank))
            seen[face_cone.rays] = Face(face_cone, functional)
    return sorted(seen.values(), key=lambda f: (f.cone.dim(), f.cone.rays))


def face_cones(c):
    return [f.cone for f in faces(c)]


def multiplicity(c):
    """Index of the ray lattice in the lattice of the linear span."""
    if not c.is_simplicial():
        raise NotSimplicial("multiplicity needs ray count = dimension")
    if not c.rays:
        return 1
    return linalg.lattice_index(c.rays)


def normalized_volume(c):
    """Sum of multiplicities over a triangulation (lattice volume)."""
    return sum(multiplicity(s) for s in triangulate(c))


def triangulate(c):
    """Split a pointed cone into simplicial cones spanned by its rays."""
    if not c.is_strongly_convex():
        raise NotStronglyConvex("triangulation needs a pointed cone")
    if c.is_simplicial():
        return [c]
    r0 = c.rays[0]
    out = []
    for f in faces(c):
        if f.cone.dim() != c.dim() - 1 or f.cone.contains(r0):
            continue
        for piece in triangulate(f.cone):
            out.append(RationalCone(c.ambient_rank, piece.rays + (r0,)))
    return out


def contains(c, v, mode="closure"):
    return c.contains(v, mode)
