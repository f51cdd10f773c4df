"""Monoidal spaces, Kato fans, rational fans, and their morphisms.

A monoidal space is a finite Alexandrov space: the topology is the
generization partial order (a <= b reads "a is a generization of b";
open sets are downward closed, minimal points are generic).  Stalks are
sharp saturated monoids whose group is the full ambient lattice, and
every generization map must be a localization at a prime followed by
sharpening, certified on construction.
"""

from dataclasses import dataclass, field

from . import linalg
from .cones import RationalCone, faces as cone_faces, intersect
from .errors import (
    InvalidFan,
    InvalidInput,
    InvariantViolation,
    NotSharp,
)
from .monoid import (
    AffineMonoid,
    full_form,
    localize,
    same_monoid,
    spec,
    units_and_sharpen,
)


class MonoidalSpace:
    """Finite poset of points with sharp monoid stalks and localization
    generization maps."""

    def __init__(self, points, order_pairs, stalks, maps, validate=True):
        self.points = tuple(sorted(points))
        if len(set(self.points)) != len(self.points):
            raise InvalidInput("point names must be unique")
        below = {p: {p} for p in self.points}
        for a, b in order_pairs:
            below[b].add(a)
        # transitive closure
        changed = True
        while changed:
            changed = False
            for b in self.points:
                extra = set()
                for a in below[b]:
                    extra |= below[a]
                if not extra <= below[b]:
                    below[b] |= extra
                    changed = True
        self._below = {p: frozenset(s) for p, s in below.items()}
        for a in self.points:
            for b in self.points:
                if a != b and a in self._below[b] and b in self._below[a]:
                    raise InvalidInput(f"order cycle through {a!r} and {b!r}")
        self.stalks = dict(stalks)
        self.maps = {}
        for (b, a), mat in maps.items():
            self.maps[(b, a)] = tuple(tuple(row) for row in mat)
        self._complete_maps()
        self._certificates = {}
        if validate:
            self._validate()

    # -- order ----------------------------------------------------------------

    def leq(self, a, b):
        """a is a generization of b (a lies in every open set containing b)."""
        return a in self._below[b]

    def generizations(self, b):
        """The minimal open neighborhood of b."""
        return tuple(sorted(self._below[b]))

    def hasse_pairs(self):
        out = []
        for b in self.points:
            for a in self._below[b]:
                if a == b:
                    continue
                if any(c not in (a, b) and self.leq(a, c) and self.leq(c, b)
                       for c in self._below[b]):
                    continue
                out.append((a, b))
        return sorted(out)

    def map(self, b, a):
        """Generization map on stalks: stalk(b) -> stalk(a) for a <= b."""
        if a == b:
            return linalg.identity(self.stalks[b].ambient_rank)
        return self.maps[(b, a)]

    def _complete_maps(self):
        # fill in missing composites along the order, checking consistency
        pairs = [(a, b) for b in self.points for a in self._below[b] if a != b]
        # process by interval length so composites exist when needed
        progress = True
        while progress:
            progress = False
            for a, b in pairs:
                if (b, a) in self.maps:
                    continue
                for c in self._below[b]:
                    if c in (a, b) or not self.leq(a, c):
                        continue
                    if (b, c) in self.maps and (c, a) in self.maps:
                        self.maps[(b, a)] = linalg.mat_mul(
                            self.maps[(c, a)], self.maps[(b, c)])
                        progress = True
                        break
        missing = [(a, b) for a, b in pairs if (b, a) not in self.maps]
        if missing:
            raise InvalidInput(f"missing generization maps: {missing}")

    # -- validation -----------------------------------------------------------

    def _validate(self):
        for p, m in self.stalks.items():
            if not m.is_saturated():
                raise InvariantViolation(p, "stalk must be saturated")
            if not m.is_sharp():
                raise InvariantViolation(p, "stalk must be sharp")
            basis = linalg.row_basis(m.generators)
            if len(basis) != m.ambient_rank or linalg.lattice_index(basis) != 1:
                raise InvariantViolation(
                    p, "stalk group must be the full ambient lattice")
        for b in self.points:
            for a in self._below[b]:
                if a == b:
                    continue
                mat = self.maps[(b, a)]
                cert = localization_certificate(
                    self.stalks[b], self.stalks[a], mat)
                if cert is None:
                    raise InvariantViolation(
                        (b, a),
                        "generization map is not localization-then-sharpening")
                self._certificates[(b, a)] = cert
        # functoriality along chains
        for b in self.points:
            for c in self._below[b]:
                if c == b:
                    continue
                for a in self._below[c]:
                    if a == c:
                        continue
                    comp = linalg.mat_mul(self.maps[(c, a)], self.maps[(b, c)])
                    if comp != self.maps[(b, a)]:
                        raise InvariantViolation(
                            (b, c, a), "generization maps do not compose")

    def certificate(self, b, a):
        """The prime at which stalk(b) is localized to give stalk(a)."""
        if (b, a) not in self._certificates:
            self._certificates[(b, a)] = localization_certificate(
                self.stalks[b], self.stalks[a], self.maps[(b, a)])
        return self._certificates[(b, a)]

    def __eq__(self, other):
        return (isinstance(other, MonoidalSpace)
                and self.points == other.points
                and self._below == other._below
                and self.maps == other.maps
                and all(self.stalks[p].ambient_rank ==
                        other.stalks[p].ambient_rank
                        and sorted(self.stalks[p].generators) ==
                        sorted(other.stalks[p].generators)
                        for p in self.points))

    def __repr__(self):
        return f"MonoidalSpace({len(self.points)} points)"


def localization_certificate(source, target, mat):
    """Certify mat : source -> target as localization-then-sharpening.

    Returns the prime of spec(source) whose localization (sharpened and
    written in target coordinates through mat) is an isomorphism onto
    the target stalk, or None.
    """
    hb = source.hilbert_basis
    for g in hb:
        if not target.contains(linalg.mat_vec(mat, g)):
            return None
    killed = tuple(i for i, g in enumerate(hb)
                   if not any(linalg.mat_vec(mat, g)))
    s = spec(source)
    idx = next((i for i, p in enumerate(s.primes)
                if set(p.complement_face) == set(killed)), None)
    if idx is None:
        return None
    stalk, proj = s.stalk(idx)
    # mat must factor through proj by an isomorphism psi
    psi = _factor_through(proj, mat, source)
    if psi is None:
        return None
    if not _is_monoid_iso(psi, stalk, target):
        return None
    return idx


def _factor_through(proj, mat, source):
    """Integer psi with psi * proj = mat on gp(source), if any."""
    rows_out = len(mat)
    cols = len(proj) if proj else 0
    if cols == 0:
        return tuple(() for _ in range(rows_out)) if all(
            not any(row) for row in mat) else None
    # solve psi * proj = mat column-space-wise: proj is surjective, so
    # psi = mat * section works iff it is consistent on ker(proj)
    sec = linalg.complement_section(proj)
    psi = linalg.mat_mul(mat, sec)
    if linalg.mat_mul(psi, proj) != tuple(tuple(r) for r in mat):
        return None
    return psi


def _is_monoid_iso(mat, source, target):
    """mat gives an isomorphism of monoids source -> target."""
    n, m = len(mat), len(mat[0]) if mat else 0
    if source.ambient_rank != m or target.ambient_rank != n:
        return False
    if n != m:
        return False
    if n == 0:
        return True
    d = linalg.det(mat)
    if d not in (1, -1):
        return False
    for g in source.hilbert_basis:
        if not target.contains(linalg.mat_vec(mat, g)):
            return False
    inv = _integer_inverse(mat)
    for g in target.hilbert_basis:
        if not source.contains(linalg.mat_vec(inv, g)):
            return False
    return True


def _integer_inverse(mat):
    n = len(mat)
    cols = []
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        x = linalg.solve_left(linalg.transpose(mat), e)
        cols.append(x)
    return linalg.transpose(cols)


# ---------------------------------------------------------------------------
# Kato fans


@dataclass
class Chart:
    """Open chart at a point: the minimal open set matched with
    Spec(stalk)."""
    point: str
    prime_of: dict            # generization point -> prime index
    spec: object              # SpecResult of the stalk


class KatoFan:
    """Monoidal space locally isomorphic to Spec of its stalks."""

    def __init__(self, space, charts):
        self.space = space
        self.charts = charts
        self.cone_of_point = None  # set for fans built from rational fans

    @property
    def points(self):
        return self.space.points

    def __repr__(self):
        return f"KatoFan({len(self.space.points)} points)"


@dataclass
class FanCheck:
    ok: bool
    witness: str = ""
    reason: str = ""
    charts: dict = field(default_factory=dict)


def is_fan(space):
    """Match each point's minimal open set against Spec of its stalk."""
    charts = {}
    for t in space.points:
        s = spec(space.stalks[t])
        opens = space.generizations(t)
        if len(opens) != len(s.primes):
            return FanCheck(
                False, t,
                f"minimal open set of {t!r} has {len(opens)} points but "
                f"Spec(stalk) has {len(s.primes)}")
        prime_of = {}
        for a in opens:
            if a == t:
                prime_of[a] = s.closed_point()
                continue
            idx = space.certificate(t, a)
            if idx is None:
                return FanCheck(False, t,
                                f"map {t!r} -> {a!r} is not a localization")
            prime_of[a] = idx
        if len(set(prime_of.values())) != len(opens):
            return FanCheck(False, t,
                            f"two generizations of {t!r} hit the same prime")
        for a in opens:
            for b in opens:
                if space.leq(a, b) != s.leq(prime_of[a], prime_of[b]):
                    return FanCheck(
                        False, t,
                        f"order mismatch under the chart at {t!r}: "
                        f"({a!r}, {b!r})")
        charts[t] = Chart(t, prime_of, s)
    return FanCheck(True, charts=charts)


def to_kato(space):
    check = is_fan(space)
    if not check.ok:
        raise InvalidInput(f"not a fan: {check.reason}")
    return KatoFan(space, check.charts)


def spec_to_space(m):
    """Spec of a sharp saturated monoid as a Kato fan."""
    if not m.is_sharp():
        raise NotSharp("spec_to_space needs a sharp monoid")
    mm, _ = full_form(m)
    s = spec(mm)
    names = {}
    for i, p in enumerate(s.primes):
        members = ",".join(sorted(mm.label_of(h) for h in p.members()))
        names[i] = f"<{members}>"
    points = [names[i] for i in range(len(s.primes))]
    order = []
    for i in range(len(s.primes)):
        for j in range(len(s.primes)):
            if i != j and s.leq(i, j):
                order.append((names[i], names[j]))
    stalks = {}
    projs = {}
    for i in range(len(s.primes)):
        stalk, proj = s.stalk(i)
        stalks[names[i]] = stalk
        projs[i] = proj
    maps = {}
    for j in range(len(s.primes)):
        # stalk(prime_j) -> stalk(prime_i): proj_i factors through proj_j
        sec = linalg.complement_section(projs[j]) if projs[j] else ()
        for i in range(len(s.primes)):
            if i == j or not s.leq(i, j):
                continue
            if not projs[j]:
                maps[(names[j], names[i])] = tuple(
                    () for _ in range(len(projs[i])))
                continue
            maps[(names[j], names[i])] = linalg.mat_mul(projs[i], sec)
    space = MonoidalSpace(points, order, stalks, maps)
    return to_kato(space)


# ---------------------------------------------------------------------------
# rational fans


class RationalFan:
    """Finite set of strongly convex cones, closed under faces."""

    def __init__(self, ambient_rank, cones, close=True):
        self.ambient_rank = ambient_rank
        cone_set = set()
        for c in cones:
            if not isinstance(c, RationalCone):
                c = RationalCone(ambient_rank, c)
            if c.ambient_rank != ambient_rank:
                raise InvalidInput("cone ambient rank differs from fan's")
            cone_set.add(c)
            if close and c.is_strongly_convex():
                for f in cone_faces(c):
                    cone_set.add(f.cone)
        if close:
            cone_set.add(RationalCone(ambient_rank, []))
        self.cones = tuple(sorted(cone_set, key=lambda c: (c.dim(), c.rays)))

    def rays(self):
        out = set()
        for c in self.cones:
            out.update(c.rays)
        return tuple(sorted(out))

    def maximal_cones(self):
        return tuple(
            c for c in self.cones
            if not any(o is not c and o.contains_cone(c) for o in self.cones))

    def contains_vector(self, v):
        return any(c.contains(v) for c in self.cones)

    def smallest_containing(self, cone):
        best = None
        for c in self.cones:
            if c.contains_cone(cone):
                if best is None or best.contains_cone(c):
                    best = c
        return best

    def index_of(self, cone):
        for i, c in enumerate(self.cones):
            if c == cone:
                return i
        return None

    def __eq__(self, other):
        return (isinstance(other, RationalFan)
                and self.ambient_rank == other.ambient_rank
                and self.cones == other.cones)

    def __hash__(self):
        return hash((self.ambient_rank, self.cones))

    def __repr__(self):
        return f"RationalFan({self.ambient_rank}, {len(self.cones)} cones)"


@dataclass
class FanValidation:
    ok: bool
    failures: list = field(default_factory=list)

    def first(self):
        return self.failures[0] if self.failures else None


def validate_rational_fan(fan):
    """Check strong convexity, face closure, and face-compatible
    intersections; failures are reported, not raised."""
    failures = []
    for c in fan.cones:
        if not c.is_strongly_convex():
            failures.append(("not strongly convex", c))
    if failures:
        return FanValidation(False, failures)
    for c in fan.cones:
        for f in cone_faces(c):
            if f.cone not in fan.cones:
                failures.append(("missing face", c, f.cone))
                return FanValidation(False, failures)
    for i, c in enumerate(fan.cones):
        for d in fan.cones[i + 1:]:
            meet = intersect(c, d)
            faces_c = {f.cone for f in cone_faces(c)}
            faces_d = {f.cone for f in cone_faces(d)}
            if meet not in faces_c or meet not in faces_d:
                failures.append(("intersection is not a common face", c, d,
                                 meet))
                return FanValidation(False, failures)
    return FanValidation(True)


def stalk_projection(cone):
    """Projection of the dual lattice onto the stalk lattice at a cone.

    Rows are a basis of N /\ span(cone); applying the matrix to a
    functional h gives its pairings with the basis, i.e. the class of h
    in M / cone-perp written in the dual coordinates.
    """
    if not cone.rays:
        return ()
    return linalg.saturation_basis(cone.rays)


def rational_to_kato(fan, validated=False):
    """The Kato fan of a rational fan: points are cones, stalks the
    sharpened dual monoids, generization maps the localizations."""
    from ._hilbert import hilbert_basis
    if not validated:
        chk = validate_rational_fan(fan)
        if not chk.ok:
            raise InvalidFan(str(chk.first()))
    names = {c: _cone_point_name(i, c) for i, c in enumerate(fan.cones)}
    points = [names[c] for c in fan.cones]
    order = []
    for c in fan.cones:
        for d in fan.cones:
            if c is d:
                continue
            if d.contains_cone(c) and c in {f.cone for f in cone_faces(d)}:
                order.append((names[c], names[d]))
    stalks = {}
    projs = {}
    full = linalg.identity(fan.ambient_rank)
    for c in fan.cones:
        proj = stalk_projection(c)
        projs[c] = proj
        from .cones import dual_cone
        dual_hb = hilbert_basis(dual_cone(c).rays, full)
        gens = [linalg.mat_vec(proj, h) for h in dual_hb] if proj else []
        gens = [g for g in gens if any(g)]
        stalks[names[c]] = AffineMonoid(len(proj), gens, saturated=True)
    maps = {}
    for a, b in order:
        # map stalk(b) -> stalk(a): cone(a) is a face of cone(b)
        cb = fan.cones[points.index(b)]
        ca = fan.cones[points.index(a)]
        if not projs[ca]:
            maps[(b, a)] = ()
        elif not projs[cb]:
            maps[(b, a)] = tuple(() for _ in range(len(projs[ca])))
        else:
            sec = linalg.complement_section(projs[cb])
            maps[(b, a)] = linalg.mat_mul(projs[ca], sec)
    kato = to_kato(MonoidalSpace(points, order, stalks, maps))
    kato.cone_of_point = {names[c]: c for c in fan.cones}
    kato.fan = fan
    kato.point_of_cone = names
    return kato


def _cone_point_name(i, c):
    rays = ";".join(",".join(str(x) for x in r) for r in c.rays)
    return f"c{i}[{rays}]" if rays else f"c{i}[0]"


# ---------------------------------------------------------------------------
# morphisms


class FanMorphism:
    """Morphism of monoidal spaces: monotone point map plus stalk maps
    (stalk at the image -> stalk at the source) with commuting squares."""

    def __init__(self, source, target, point_map, stalk_maps, validate=True):
        self.source = source
        self.target = target
        self.point_map = dict(point_map)
        self.stalk_maps = {x: tuple(tuple(r) for r in m)
                           for x, m in stalk_maps.items()}
        if validate:
            self._validate()

    def _validate(self):
        src = self.source
        tgt = self.target.space if isinstance(self.target, KatoFan) \
            else self.target
        self._target_space = tgt
        for x in src.points:
            if x not in self.point_map:
                raise InvalidInput(f"point {x!r} has no image")
            if self.point_map[x] not in tgt.points:
                raise InvalidInput(f"image of {x!r} is not a target point")
        for x in src.points:
            for y in src.points:
                if src.leq(x, y) and not tgt.leq(self.point_map[x],
                                                 self.point_map[y]):
                    raise InvalidInput(
                        f"point map is not continuous at ({x!r}, {y!r})")
        for x in src.points:
            mat = self.stalk_maps.get(x)
            if mat is None:
                raise InvalidInput(f"missing stalk map at {x!r}")
            m_t = tgt.stalks[self.point_map[x]]
            m_s = src.stalks[x]
            for g in m_t.generators:
                if not m_s.contains(linalg.mat_vec(mat, g)):
                    raise InvalidInput(
                        f"stalk map at {x!r} does not send the stalk at "
                        f"{self.point_map[x]!r} into the stalk")
        # commuting squares on generators
        for y in src.points:
            for x in src.generizations(y):
                if x == y:
                    continue
                fy, fx = self.point_map[y], self.point_map[x]
                left = linalg.mat_mul(src.map(y, x), self.stalk_maps[y])
                right = linalg.mat_mul(self.stalk_maps[x], tgt.map(fy, fx))
                for g in tgt.stalks[fy].generators:
                    if linalg.mat_vec(left, g) != linalg.mat_vec(right, g):
                        raise InvalidInput(
                            f"stalk square at ({y!r} -> {x!r}) does not "
                            "commute")

    @property
    def target_space(self):
        return self.target.space if isinstance(self.target, KatoFan) \
            else self.target

    def target_cone(self, x):
        """For cone-backed targets: the cone under the image of x."""
        if not isinstance(self.target, KatoFan) or \
                self.target.cone_of_point is None:
            raise InvalidInput("target is not backed by a rational fan")
        return self.target.cone_of_point[self.point_map[x]]


def identity_morphism(space):
    return FanMorphism(
        space, space,
        {p: p for p in space.points},
        {p: linalg.identity(space.stalks[p].ambient_rank)
         for p in space.points},
        validate=False)


def compose(g, f):
    """g after f."""
    point_map = {x: g.point_map[f.point_map[x]] for x in f.source.points}
    stalk_maps = {
        x: linalg.mat_mul(f.stalk_maps[x], g.stalk_maps[f.point_map[x]])
        for x in f.source.points}
    return FanMorphism(f.source, g.target, point_map, stalk_maps)


def is_strict(f):
    """True iff every stalk map is an isomorphism of monoids."""
    src = f.source
    tgt = f.target_space
    for x in src.points:
        mat = f.stalk_maps[x]
        if not _is_monoid_iso(mat, tgt.stalks[f.point_map[x]],
                              src.stalks[x]):
            return False
    return True


def are_isomorphic(space_a, space_b):
    """Isomorphism test for monoidal spaces (backtracking, desk scale).

    Searches for an order isomorphism of the point posets together with
    compatible monoid isomorphisms of the stalks.
    """
    if len(space_a.points) != len(space_b.points):
        return False
    pa = sorted(space_a.points,
                key=lambda p: (len(space_a.generizations(p)), p))
    used = set()
    assignment = {}
    isos = {}

    def key(space, p):
        m = space.stalks[p]
        return (len(space.generizations(p)), m.ambient_rank,
                len(m.hilbert_basis))

    def stalk_isos(ma, mb):
        from itertools import permutations
        hb_a, hb_b = ma.hilbert_basis, mb.hilbert_basis
        if len(hb_a) != len(hb_b) or ma.ambient_rank != mb.ambient_rank:
            return []
        if ma.ambient_rank == 0:
            return [()]
        out = []
        basis = linalg.row_basis(hb_a)
        for perm in permutations(range(len(hb_b))):
            # solve mat * hb_a[i] = hb_b[perm[i]] for an integer matrix
            target = [hb_b[perm[i]] for i in range(len(hb_a))]
            sol = _solve_matrix_on_generators(hb_a, target, ma.ambient_rank)
            if sol is not None and _is_monoid_iso(sol, ma, mb):
                out.append(sol)
        return out

    def compatible(p, q, iso):
        # squares with already-assigned neighbors
        for p2, q2 in assignment.items():
            if space_a.leq(p2, p) and p2 != p:
                left = linalg.mat_mul(space_a.map(p, p2), iso)
                right = linalg.mat_mul(isos[p2], space_b.map(q, q2))
                for g in space_b.stalks[q].generators:
                    if linalg.mat_vec(left, g) != linalg.mat_vec(right, g):
                        return False
            if space_a.leq(p, p2) and p2 != p:
                left = linalg.mat_mul(space_a.map(p2, p), isos[p2])
                right = linalg.mat_mul(iso, space_b.map(q2, q))
                for g in space_b.stalks[q2].generators:
                    if linalg.mat_vec(left, g) != linalg.mat_vec(right, g):
                        return False
        return True

    def rec(i):
        if i == len(pa):
            return True
        p = pa[i]
        for q in space_b.points:
            if q in used or key(space_a, p) != key(space_b, q):
                continue
            ok_order = all(
                space_a.leq(p2, p) == space_b.leq(q2, q)
                and space_a.leq(p, p2) == space_b.leq(q, q2)
                for p2, q2 in assignment.items())
            if not ok_order:
                continue
            for iso in stalk_isos(space_b.stalks[q], space_a.stalks[p]):
                # iso maps stalk(q)-coords to stalk(p)-coords
                if not compatible(p, q, iso):
                    continue
                assignment[p] = q
                isos[p] = iso
                used.add(q)
                if rec(i + 1):
                    return True
                del assignment[p]
                del isos[p]
                used.discard(q)
        return False

    return rec(0)


def _solve_matrix_on_generators(sources, targets, n):
    """Integer matrix sending each source vector to its target, if any."""
    # solve column by column: mat * s_i = t_i  <=>  S^T mat^T = T^T
    st = [list(s) for s in sources]
    rows = []
    for j in range(n):
        col = linalg.rational_solve(st, [t[j] for t in targets])
        if col is None:
            return None
        if any(x.denominator != 1 for x in col):
            return None
        rows.append(tuple(int(x) for x in col))
    mat = tuple(rows)
    if any(linalg.mat_vec(mat, s) != tuple(t)
           for s, t in zip(sources, targets)):
        return None
    return mat


# ---------------------------------------------------------------------------
# associated fans (gluing Spec charts, with obstruction detection)


@dataclass
class Obstruction:
    """Two distinct primes of one stalk forced equal by the gluing."""
    point: str
    prime_a: str
    prime_b: str
    message: str


@dataclass
class AssocFanResult:
    fan: object = None            # KatoFan on success
    morphism: object = None       # strict morphism X -> fan
    obstruction: Obstruction = None
    eta_points: tuple = ()        # classes with no closed-point representative
    notes: tuple = ()

    @property
    def ok(self):
        return self.obstruction is None


class _UnionFind:
    """Union-find on chart primes carrying stalk-coordinate transports.

    Each node is (point, prime index); the transport matrix of a node
    maps its stalk coordinates to its root's stalk coordinates.
    """

    def __init__(self):
        self.parent = {}
        self.transport = {}

    def add(self, node, rank):
        if node not in self.parent:
            self.parent[node] = node
            self.transport[node] = linalg.identity(rank)

    def find(self, node):
        path = []
        while self.parent[node] != node:
            path.append(node)
            node = self.parent[node]
        # compress: walk the path root-side first so each parent's
        # transport already points at the root when it is composed in
        for p in reversed(path):
            par = self.parent[p]
            if par != node:
                self.transport[p] = linalg.mat_mul(
                    self.transport[par], self.transport[p])
                self.parent[p] = node
        return node

    def union(self, a, b, iso_ab):
        """Declare b = a with iso_ab mapping a-stalk coords to b-stalk
        coords.  Returns False on an inconsistent identification."""
        ra = self.find(a)
        rb = self.find(b)
        t_a = self.transport[a]   # a -> ra
        t_b = self.transport[b]   # b -> rb
        if ra == rb:
            # consistency: going a -> b -> rb must equal a -> ra
            via_b = linalg.mat_mul(t_b, iso_ab)
            return via_b == t_a
        # attach rb under ra: rb -> b -> a -> ra
        inv_iso = _integer_inverse(iso_ab)
        t = linalg.mat_mul(t_a, linalg.mat_mul(
            inv_iso, _integer_inverse(t_b)))
        self.parent[rb] = ra
        self.transport[rb] = t
        return True


def build_associated_fan(x_space, mode="log_regular"):
    """Glue the Spec charts of a monoidal space along its generizations.

    Returns a KatoFan plus a strict morphism from the space, or an
    Obstruction when two distinct primes of one stalk are forced equal
    (the phenomenon that rules out an associated fan).
    """
    if mode not in ("log_regular", "over_standard_log_point"):
        raise InvalidInput(f"unknown mode {mode!r}")
    specs = {p: spec(x_space.stalks[p]) for p in x_space.points}
    uf = _UnionFind()
    for p in x_space.points:
        for i in range(len(specs[p].primes)):
            stalk, _ = specs[p].stalk(i)
            uf.add((p, i), stalk.ambient_rank)
    notes = []
    for b in sorted(x_space.points):
        for a in sorted(x_space.generizations(b)):
            if a == b:
                continue
            ok = _glue_chart(x_space, specs, uf, b, a)
            if not ok:
                notes.append(f"inconsistent stalk identification along "
                             f"{b!r} -> {a!r}")
    # detect clashes: two primes of one chart in a single class
    roots = {}
    for p in sorted(x_space.points):
        seen = {}
        for i in range(len(specs[p].primes)):
            r = uf.find((p, i))
            if r in seen:
                pa = specs[p].primes[seen[r]].describe()
                pb = specs[p].primes[i].describe()
                return AssocFanResult(obstruction=Obstruction(
                    p, pa, pb,
                    f"{pa} identified with {pb} in stalk at {p}"),
                    notes=tuple(notes))
            seen[r] = i
        roots[p] = seen
    if notes:
        return AssocFanResult(obstruction=Obstruction(
            "", "", "", "; ".join(notes)), notes=tuple(notes))
    return _assemble_fan(x_space, specs, uf, mode, notes)


def _glue_chart(x_space, specs, uf, b, a):
    """Embed the chart at a into the chart at b along the localization."""
    cert = x_space.certificate(b, a)
    mat = x_space.map(b, a)
    sb = specs[b]
    sa = specs[a]
    hb_b = x_space.stalks[b].hilbert_basis
    ok = True
    for i, prime_a in enumerate(sa.primes):
        # pull the prime back: elements of stalk(b) whose image meets it
        func = prime_a.face_functional
        comp = tuple(
            j for j, h in enumerate(hb_b)
            if linalg.dot(func, linalg.mat_vec(mat, h)) == 0)
        j_idx = next((j for j, q in enumerate(sb.primes)
                      if set(q.complement_face) == set(comp)), None)
        if j_idx is None:
            return False
        # transport iso between the two stalk copies
        stalk_a, proj_a = sa.stalk(i)
        stalk_b, proj_b = sb.stalk(j_idx)
        iso = _induced_stalk_iso(x_space.stalks[b], mat, proj_a, proj_b,
                                 stalk_a, stalk_b)
        if iso is None:
            return False
        if not uf.union((a, i), (b, j_idx), iso):
            ok = False
    return ok


def _induced_stalk_iso(stalk_b_monoid, mat, proj_a, proj_b, stalk_a, stalk_b):
    """Iso stalk_a-coords -> stalk_b-coords with iso . proj_a . mat =
    proj_b on gp(stalk at b)."""
    lhs_rows = len(proj_b) if proj_b else 0
    if not proj_a:
        if lhs_rows == 0:
            return ()
        return None
    compo = linalg.mat_mul(proj_a, mat)
    # solve iso * compo = proj_b; compo is surjective onto stalk_a coords
    sec = linalg.complement_section(compo)
    iso = linalg.mat_mul(proj_b, sec) if proj_b else ()
    if proj_b and linalg.mat_mul(iso, compo) != tuple(
            tuple(r) for r in proj_b):
        return None
    if not _is_monoid_iso(iso, stalk_a, stalk_b):
        return None
    return iso


def _assemble_fan(x_space, specs, uf, mode, notes):
    # the union-find root is the canonical representative: transports of
    # all members target its stalk coordinates
    classes = {}
    for p in sorted(x_space.points):
        for i in range(len(specs[p].primes)):
            r = uf.find((p, i))
            classes.setdefault(r, []).append((p, i))
    reps = {r: r for r in classes}
    # names: the class of (p, closed prime) is called p; emergent
    # classes get named after their representative (or eta)
    names = {}
    closed_class = {}
    for p in x_space.points:
        r = uf.find((p, specs[p].closed_point()))
        closed_class[p] = r
    for r, members in classes.items():
        named = sorted(p for p, i in members
                       if i == specs[p].closed_point())
        if named:
            names[r] = named[0]
        else:
            rp, ri = reps[r]
            names[r] = f"{rp}~{specs[rp].primes[ri].describe()}"
    emergent = sorted(names[r] for r in classes
                      if all(i != specs[p].closed_point()
                             for p, i in classes[r]))
    if mode == "over_standard_log_point" and len(emergent) == 1:
        old = emergent[0]
        r_old = next(r for r in classes if names[r] == old)
        names[r_old] = "eta"
        emergent = ("eta",)
    # order: within-chart prime containments, transitively closed by
    # MonoidalSpace
    order = set()
    for p in x_space.points:
        s = specs[p]
        for i in range(len(s.primes)):
            for j in range(len(s.primes)):
                if i != j and s.leq(i, j):
                    order.add((names[uf.find((p, i))],
                               names[uf.find((p, j))]))
    stalks = {}
    for r, members in classes.items():
        rp, ri = reps[r]
        stalks[names[r]] = specs[rp].stalk(ri)[0]
    # generization maps via a chart realizing each pair
    maps = {}
    for p in x_space.points:
        s = specs[p]
        for j in range(len(s.primes)):
            for i in range(len(s.primes)):
                if i == j or not s.leq(i, j):
                    continue
                cj = names[uf.find((p, j))]
                ci = names[uf.find((p, i))]
                if cj == ci or (cj, ci) in maps:
                    continue
                stalk_j, proj_j = s.stalk(j)
                stalk_i, proj_i = s.stalk(i)
                # localization map between the chart copies
                if not proj_i:
                    loc = ()
                elif proj_j:
                    sec = linalg.complement_section(proj_j)
                    loc = linalg.mat_mul(proj_i, sec)
                else:
                    loc = tuple(() for _ in range(len(proj_i)))
                # transport both ends into class coordinates
                uf.find((p, j))
                uf.find((p, i))
                t_j = uf.transport[(p, j)]
                t_i = uf.transport[(p, i)]
                if not stalks[ci].ambient_rank:
                    mat = ()
                elif not stalks[cj].ambient_rank:
                    mat = tuple(() for _ in range(stalks[ci].ambient_rank))
                else:
                    mat = linalg.mat_mul(
                        t_i, linalg.mat_mul(loc, _integer_inverse(t_j)))
                maps[(cj, ci)] = mat
    points = sorted(names[r] for r in classes)
    space = MonoidalSpace(points, sorted(order), stalks, maps)
    fan = to_kato(space)
    # strict morphism X -> fan through the closed-point classes
    point_map = {p: names[closed_class[p]] for p in x_space.points}
    stalk_maps = {}
    for p in x_space.points:
        closed = specs[p].closed_point()
        uf.find((p, closed))
        t = uf.transport[(p, closed)]
        # class coords -> chart coords -> X stalk ambient coords; at the
        # closed point the localization projection is an isomorphism
        _, proj = specs[p].stalk(closed)
        inv_proj = _integer_inverse(proj) if proj else ()
        stalk_maps[p] = linalg.mat_mul(inv_proj, _integer_inverse(t)) \
            if proj else ()
    morphism = FanMorphism(x_space, fan, point_map, stalk_maps)
    return AssocFanResult(fan=fan, morphism=morphism,
                          eta_points=tuple(emergent), notes=tuple(notes))
