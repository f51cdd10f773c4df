"""Exact linear algebra over Z and Q.

Everything works on tuples of tuples of Python ints (or Fractions for
the rational routines).  Matrices are row-major; "row lattice" means
the subgroup of Z^n generated by the rows.
"""

from fractions import Fraction
from math import gcd


def vec_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive(v):
    """Divide an integer vector by the gcd of its entries (0 stays 0)."""
    g = vec_gcd(v)
    if g in (0, 1):
        return tuple(v)
    return tuple(x // g for x in v)


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(k, a):
    return tuple(k * x for x in a)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def mat_vec(m, v):
    return tuple(dot(row, v) for row in m)


def mat_mul(a, b):
    bt = list(zip(*b))
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m):
    return tuple(zip(*m))


def hnf(rows):
    """Row Hermite normal form.

    Returns (H, U) with U unimodular, U * rows = H stacked over the zero
    rows; H has positive pivots, entries above a pivot reduced into
    [0, pivot).
    """
    rows = [list(r) for r in rows]
    m = len(rows)
    n = len(rows[0]) if m else 0
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    pivot_row = 0
    pivot_cols = []
    for col in range(n):
        # find a nonzero entry at or below pivot_row
        piv = None
        for r in range(pivot_row, m):
            if rows[r][col]:
                piv = r
                break
        if piv is None:
            continue
        rows[pivot_row], rows[piv] = rows[piv], rows[pivot_row]
        u[pivot_row], u[piv] = u[piv], u[pivot_row]
        # eliminate below by gcd steps
        for r in range(pivot_row + 1, m):
            while rows[r][col]:
                q = rows[pivot_row][col] // rows[r][col]
                for c in range(n):
                    rows[pivot_row][c] -= q * rows[r][c]
                for c in range(m):
                    u[pivot_row][c] -= q * u[r][c]
                rows[pivot_row], rows[r] = rows[r], rows[pivot_row]
                u[pivot_row], u[r] = u[r], u[pivot_row]
        if rows[pivot_row][col] < 0:
            rows[pivot_row] = [-x for x in rows[pivot_row]]
            u[pivot_row] = [-x for x in u[pivot_row]]
        # reduce entries above the pivot
        p = rows[pivot_row][col]
        for r in range(pivot_row):
            q = rows[r][col] // p
            if q:
                for c in range(n):
                    rows[r][c] -= q * rows[pivot_row][c]
                for c in range(m):
                    u[r][c] -= q * u[pivot_row][c]
        pivot_cols.append(col)
        pivot_row += 1
        if pivot_row == m:
            break
    H = tuple(tuple(r) for r in rows)
    U = tuple(tuple(r) for r in u)
    return H, U


def row_basis(rows):
    """Basis (HNF rows) of the row lattice."""
    if not rows:
        return ()
    H, _ = hnf(rows)
    return tuple(r for r in H if any(r))


def rank(rows):
    return len(row_basis(rows))


def kernel_basis(rows):
    """Basis of the integer left kernel {x : x * rows = 0}.

    For the right kernel of A pass transpose(A).
    """
    rows = list(rows)
    if not rows:
        return ()
    H, U = hnf(rows)
    return tuple(U[i] for i in range(len(rows)) if not any(H[i]))


def right_kernel_basis(mat):
    """Basis of {v : mat * v = 0} over Z (saturated: a lattice basis)."""
    if not mat:
        return ()
    return kernel_basis(transpose(mat))


def solve_left(rows, target):
    """One integer solution x of x * rows = target, or None."""
    rows = list(rows)
    if not rows:
        return () if not any(target) else None
    H, U = hnf(rows)
    # express target over the HNF rows by forward elimination
    t = list(target)
    coeff = [0] * len(rows)
    for i, h in enumerate(H):
        if not any(h):
            continue
        lead = next(j for j, x in enumerate(h) if x)
        if t[lead] % h[lead]:
            return None
        q = t[lead] // h[lead]
        coeff[i] = q
        if q:
            for j in range(len(t)):
                t[j] -= q * h[j]
    if any(t):
        return None
    n = len(rows)
    return tuple(sum(coeff[i] * U[i][j] for i in range(n)) for j in range(n))


def in_row_lattice(rows, target):
    return solve_left(rows, target) is not None


def saturation_basis(rows):
    """Basis of the saturation (Q-span intersect Z^n) of the row lattice."""
    B = row_basis(rows)
    if not B:
        return ()
    n = len(B[0])
    # saturation = orthogonal complement of the orthogonal complement
    comp = right_kernel_basis(B)
    if not comp:
        return row_basis(identity(n))
    return right_kernel_basis(comp)


def snf_diagonal(rows):
    """Elementary divisors (nonzero diagonal of the Smith normal form)."""
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    divisors = []
    top = 0
    while top < m and top < n:
        # find nonzero pivot
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
        for row in a:
            row[top], row[j0] = row[j0], row[top]
        while True:
            # clear column
            again = False
            for i in range(top + 1, m):
                while a[i][top]:
                    q = a[top][top] // a[i][top]
                    for c in range(top, n):
                        a[top][c] -= q * a[i][c]
                    a[top], a[i] = a[i], a[top]
            for j in range(top + 1, n):
                while a[top][j]:
                    q = a[top][top] // a[top][j]
                    for r in range(top, m):
                        a[r][top] -= q * a[r][j]
                    for r in range(top, m):
                        a[r][top], a[r][j] = a[r][j], a[r][top]
                    again = True
            if not again and all(a[i][top] == 0 for i in range(top + 1, m)):
                break
        # ensure divisibility of the rest by the pivot
        p = a[top][top]
        bad = None
        for i in range(top + 1, m):
            for j in range(top + 1, n):
                if a[i][j] % p:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            for c in range(top, n):
                a[top][c] += a[bad][c]
            continue
        divisors.append(abs(p))
        top += 1
    return tuple(divisors)


def det(rows):
    """Determinant of a square integer matrix (Bareiss, exact)."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def lattice_index(rows):
    """Covolume of the row lattice inside the saturated lattice of its span."""
    d = 1
    for e in snf_diagonal(rows):
        d *= e
    return d


def coords_in_basis(basis, v):
    """Integer coordinates of v in the given lattice basis, or None."""
    return solve_left(basis, v)


def complement_section(proj):
    """Right inverse over Z of a surjective integer matrix proj (r x n).

    Returns an n x r matrix S with proj * S = identity(r).  Raises
    ValueError if proj is not surjective onto Z^r.
    """
    rows = transpose(proj)  # n x r; column lattice of proj = row lattice here
    H, U = hnf(rows)
    r = len(proj)
    sol_cols = []
    for i in range(r):
        e = tuple(1 if j == i else 0 for j in range(r))
        x = solve_left(rows, e)
        if x is None:
            raise ValueError("matrix is not surjective over Z")
        sol_cols.append(x)
    # sol_cols[i] has length n with sol_cols[i] * rows = e_i,
    # i.e. proj * sol_cols[i]^T = e_i
    return transpose(sol_cols)


# ---------------------------------------------------------------------------
# rational routines


def frac_mat(rows):
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows):
    """Reduced row echelon form over Q.  Returns (R, pivot_columns)."""
    a = frac_mat(rows)
    m = len(a)
    n = len(a[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return [row for row in a if any(row)], pivots


def rational_rank(rows):
    return len(rref(rows)[0])


def rational_right_kernel(mat):
    """Basis of {v : mat v = 0} over Q."""
    if not mat:
        return []
    R, pivots = rref(mat)
    n = len(mat[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fc]
        basis.append(v)
    return basis


def rational_solve(mat, target):
    """One solution x of mat x = target over Q, or None."""
    if not mat:
        return None if any(target) else []
    n = len(mat[0])
    aug = [list(row) + [t] for row, t in zip(mat, target)]
    R, pivots = rref(aug)
    for row in R:
        if not any(row[:-1]) and row[-1]:
            return None
    x = [Fraction(0)] * n
    for i, pc in enumerate(pivots):
        if pc == n:
            return None
        x[pc] = R[i][-1]
    return x


def in_rational_span(rows, v):
    if not rows:
        return not any(v)
    return rational_solve(list(transpose(rows)), v) is not None
