"""Finitely generated submonoids of integer lattices.

Saturation, groupification, units and sharpening, localization, and the
prime spectrum.  Monoid membership is exact: for saturated monoids it
reduces to cone-and-lattice tests, otherwise to a bounded coefficient
search along a positive functional.
"""

from collections import namedtuple
from dataclasses import dataclass

from . import linalg
from ._hilbert import hilbert_basis as _hilbert_of
from .cones import RationalCone, quotient_map
from .errors import (
    ElementNotInMonoid,
    InvalidInput,
    NotAnIdeal,
    NotSaturated,
    NotSharp,
    check_coords,
)

Lattice = namedtuple("Lattice", ["rank", "basis"])


class AffineMonoid:
    """Submonoid of Z^ambient_rank generated by finitely many vectors.

    The trivial monoid is the empty generator list.  saturated is a
    cache bit: True promises the generated set equals its saturation.
    """

    __slots__ = ("ambient_rank", "generators", "labels", "saturated_flag",
                 "_hilbert", "_cone", "_gp", "_label_map")

    def __init__(self, ambient_rank, generators, labels=None, saturated=False):
        generators = tuple(tuple(g) for g in generators)
        check_coords(generators, "generator coordinate")
        for g in generators:
            if len(g) != ambient_rank:
                raise InvalidInput("generator length differs from ambient rank")
        if labels is not None and len(labels) != len(generators):
            raise InvalidInput("labels must match generators one to one")
        self.ambient_rank = ambient_rank
        self.generators = generators
        self.labels = tuple(labels) if labels is not None else None
        self.saturated_flag = bool(saturated)
        self._hilbert = None
        self._cone = None
        self._gp = None
        self._label_map = None

    # -- basic structure -----------------------------------------------------

    def cone(self):
        if self._cone is None:
            self._cone = RationalCone(self.ambient_rank, self.generators)
        return self._cone

    def group(self):
        """The subgroup of Z^d generated by the generators."""
        if self._gp is None:
            basis = linalg.row_basis(self.generators)
            self._gp = Lattice(len(basis), basis)
        return self._gp

    @property
    def hilbert_basis(self):
        """Minimal generating set of the saturation.

        For monoids with units: canonical lifts of the sharp quotient's
        basis plus +/- a basis of the unit lattice.
        """
        if self._hilbert is None:
            self._hilbert = _hilbert_of(self.cone().rays, self.group().basis)
        return self._hilbert

    def is_trivial(self):
        return not self.generators or all(not any(g) for g in self.generators)

    def is_sharp(self):
        """True iff the only unit is 0."""
        cone = self.cone()
        return all(not cone.contains(tuple(-x for x in g))
                   for g in self.generators if any(g))

    def is_saturated(self):
        """Decide saturation; caches a positive answer."""
        if self.saturated_flag:
            return True
        ok = all(self.contains(h) for h in self.hilbert_basis)
        if ok:
            self.saturated_flag = True
        return ok

    def label_of(self, vector):
        if self._label_map is None:
            pairs = {}
            for i, g in enumerate(self.generators):
                name = self.labels[i] if self.labels else f"g{i}"
                pairs.setdefault(g, name)
            self._label_map = pairs
        v = tuple(vector)
        if v in self._label_map:
            return self._label_map[v]
        return "(" + ",".join(str(x) for x in v) + ")"

    # -- membership ----------------------------------------------------------

    def contains(self, v):
        v = tuple(v)
        if len(v) != self.ambient_rank:
            raise InvalidInput("vector length differs from ambient rank")
        if not any(v):
            return True
        if not linalg.in_row_lattice(self.group().basis, v):
            return False
        cone = self.cone()
        if not cone.contains(v):
            return False
        if self.saturated_flag:
            return True
        return self._search_decomposition(v)

    def _search_decomposition(self, v):
        # split generators into units (invertible iff -g stays in the
        # cone) and the pointed rest; search the pointed part under a
        # functional that is positive there and zero on the units
        cone = self.cone()
        units = []
        pointed = []
        for g in self.generators:
            if not any(g):
                continue
            if cone.contains(tuple(-x for x in g)):
                units.append(g)
            else:
                pointed.append(g)
        unit_basis = linalg.row_basis(units)
        phi = tuple(
            sum(f[i] for f in cone.facets()) for i in range(self.ambient_rank))
        pointed = sorted(set(pointed), key=lambda g: -linalg.dot(phi, g))
        weights = [linalg.dot(phi, g) for g in pointed]
        seen = set()

        def rec(idx, residual, budget):
            if linalg.in_row_lattice(unit_basis, residual):
                return True
            if idx == len(pointed):
                return False
            key = (idx, residual)
            if key in seen:
                return False
            w = weights[idx]
            top = budget // w if w else 0
            g = pointed[idx]
            for count in range(top + 1):
                r = tuple(x - count * y for x, y in zip(residual, g))
                if rec(idx + 1, r, budget - count * w):
                    return True
            seen.add(key)
            return False

        budget = linalg.dot(phi, v)
        if budget < 0:
            return False
        return rec(0, v, budget)

    # -- dunder ---------------------------------------------------------------

    def __repr__(self):
        flag = ", saturated" if self.saturated_flag else ""
        return (f"AffineMonoid({self.ambient_rank}, "
                f"{[list(g) for g in self.generators]}{flag})")


def same_monoid(a, b):
    """Equality as subsets of the ambient lattice (mutual membership)."""
    if a.ambient_rank != b.ambient_rank:
        return False
    return (all(b.contains(g) for g in a.generators)
            and all(a.contains(g) for g in b.generators))


def full_form(m):
    """Re-coordinatize so the group of the monoid is the full lattice.

    Returns (monoid', basis) with basis rows spanning gp(m) and
    monoid' the same monoid written in basis coordinates.
    """
    basis = linalg.row_basis(m.generators)
    gens = [linalg.solve_left(basis, g) for g in m.generators]
    return AffineMonoid(len(basis), gens, labels=m.labels,
                        saturated=m.saturated_flag), basis


# ---------------------------------------------------------------------------
# operations


def saturate(m):
    """Lattice points of cone(m) inside gp(m)."""
    if m.saturated_flag:
        return m
    hb = m.hilbert_basis
    out = AffineMonoid(m.ambient_rank, hb, saturated=True)
    out._hilbert = hb
    return out


def groupify(m):
    return m.group()


def units_and_sharpen(m):
    """(unit lattice, sharp quotient, quotient matrix) of a saturated monoid."""
    if not m.is_saturated():
        raise NotSaturated("units_and_sharpen needs a saturated monoid")
    lin = m.cone().lineality_basis()
    units = _intersect_group(m.group().basis, lin)
    q = quotient_map(lin, m.ambient_rank)
    gens = [linalg.mat_vec(q, g) for g in m.generators]
    sharp = AffineMonoid(len(q), [g for g in gens if any(g)], saturated=True)
    return Lattice(len(units), units), sharp, q


def _intersect_group(basis, span_rows):
    """Basis of rowlattice(basis) /\ span(span_rows)."""
    if not span_rows or not basis:
        return ()
    span_eqs = linalg.right_kernel_basis(span_rows)
    if not span_eqs:
        return linalg.row_basis(basis)
    A = linalg.mat_mul(basis, linalg.transpose(span_eqs))
    coeffs = linalg.kernel_basis(A)
    if not coeffs:
        return ()
    return linalg.row_basis(linalg.mat_mul(coeffs, basis))


def localize(m, f):
    """Invert one element: the monoid generated by m and -f."""
    f = tuple(f)
    if not m.contains(f):
        raise ElementNotInMonoid(f"{f} is not in the monoid")
    if not any(f):
        return m
    gens = m.generators + (tuple(-x for x in f),)
    return AffineMonoid(m.ambient_rank, gens, saturated=m.saturated_flag)


@dataclass(frozen=True)
class MonoidIdeal:
    """Ideal of an affine monoid, by generators (the ideal is gens + M)."""
    parent: AffineMonoid
    generators: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "generators",
            tuple(tuple(g) for g in self.generators))

    def contains(self, v):
        v = tuple(v)
        return any(
            self.parent.contains(tuple(a - b for a, b in zip(v, g)))
            for g in self.generators)


@dataclass(frozen=True)
class PrimeIdeal:
    """Prime ideal, stored by the complementary face.

    complement_face: indices into parent.hilbert_basis of the elements
    lying on the face; face_functional: integer functional vanishing
    exactly on the face (within the monoid).
    """
    parent: AffineMonoid
    complement_face: tuple
    face_functional: tuple

    def contains(self, v):
        if not self.parent.contains(v):
            return False
        return linalg.dot(self.face_functional, v) != 0

    def members(self):
        """Hilbert basis elements inside the prime."""
        hb = self.parent.hilbert_basis
        comp = set(self.complement_face)
        return tuple(h for i, h in enumerate(hb) if i not in comp)

    def describe(self):
        names = ",".join(self.parent.label_of(h) for h in self.members())
        return f"prime({names})"


class SpecResult:
    """All primes of a saturated monoid, with the generization order."""

    def __init__(self, monoid, primes):
        self.monoid = monoid
        self.primes = tuple(primes)
        self._stalks = {}

    def __len__(self):
        return len(self.primes)

    def leq(self, i, j):
        """prime_i contained in prime_j (i generizes j)."""
        return set(self.primes[i].complement_face) >= set(
            self.primes[j].complement_face)

    def closed_point(self):
        return next(i for i, p in enumerate(self.primes)
                    if not p.complement_face)

    def generic_point(self):
        hb_count = len(self.monoid.hilbert_basis)
        return next(i for i, p in enumerate(self.primes)
                    if len(p.complement_face) == hb_count)

    def basic_open(self, f):
        """Indices of the primes not containing f (the set D(f))."""
        f = tuple(f)
        if not self.monoid.contains(f):
            raise ElementNotInMonoid(f"{f} is not in the monoid")
        return tuple(i for i, p in enumerate(self.primes)
                     if linalg.dot(p.face_functional, f) == 0)

    def stalk(self, i):
        """(sharp localized stalk in full-lattice coordinates, projection).

        The projection matrix sends ambient vectors of the monoid to
        stalk coordinates; on the monoid it is localization at the prime
        followed by sharpening.
        """
        if i not in self._stalks:
            prime = self.primes[i]
            hb = self.monoid.hilbert_basis
            f_sum = tuple(
                sum(hb[j][c] for j in prime.complement_face)
                for c in range(self.monoid.ambient_rank))
            loc = localize(self.monoid, f_sum)
            _, sharp, q = units_and_sharpen(loc)
            sharp_full, basis = full_form(sharp)
            if basis:
                coords = linalg.transpose(linalg.complement_section(
                    linalg.transpose(basis)))
                proj = linalg.mat_mul(coords, q)
            else:
                proj = tuple(() for _ in range(0))
                proj = ()
            self._stalks[i] = (sharp_full, proj)
        return self._stalks[i]


def spec(m):
    """Prime spectrum of a saturated monoid (sharpened internally)."""
    if not m.is_saturated():
        raise NotSaturated("spec needs a saturated monoid")
    _, sharp, q = units_and_sharpen(m)
    hb = m.hilbert_basis
    from .cones import faces as cone_faces
    primes = []
    for face in cone_faces(sharp.cone()):
        functional = _vec_mat(face.functional, q)
        comp = tuple(i for i, h in enumerate(hb)
                     if linalg.dot(functional, h) == 0)
        primes.append(PrimeIdeal(m, comp, functional))
    primes.sort(key=lambda p: (-len(p.complement_face), p.complement_face))
    return SpecResult(m, primes)


def _vec_mat(v, mat):
    if not mat:
        return ()
    cols = len(mat[0])
    return tuple(sum(v[i] * mat[i][j] for i in range(len(mat)))
                 for j in range(cols))


def is_prime(ideal):
    """True iff the complement of the generated ideal is a face."""
    parent = ideal.parent
    if not parent.is_saturated():
        raise NotSaturated("is_prime needs a saturated parent")
    if not parent.is_sharp():
        raise NotSharp("is_prime needs a sharp parent")
    for g in ideal.generators:
        if not parent.contains(g):
            raise NotAnIdeal(f"generator {g} is not in the parent monoid")
    if not ideal.generators:
        return True
    hb = parent.hilbert_basis
    outside = [h for h in hb if not ideal.contains(h)]
    cone = parent.cone()
    active = [f for f in cone.facets()
              if all(linalg.dot(f, h) == 0 for h in outside)]
    # prime iff no generator lies on the minimal face containing the
    # complement's Hilbert basis elements
    for g in ideal.generators:
        if all(linalg.dot(f, g) == 0 for f in active):
            return False
    return True
