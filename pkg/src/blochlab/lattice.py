"""Exact integer linear algebra: LLL reduction, Smith normal form,
determinants, kernels, and lattice saturation.

Matrices are plain lists of lists of Python ints (rows).  Everything here
is exact; the only parameter is the LLL quality delta, fixed at 99/100.
"""

from fractions import Fraction

from .errors import DependentRowsError, InternalAssertionError

try:  # gmpy2 speeds up the rational Gram-Schmidt bookkeeping noticeably
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

LLL_DELTA = (99, 100)


def _nearest_int(q):
    """Round an exact rational to the nearest integer (half away handled consistently)."""
    num, den = q.numerator, q.denominator
    return int((2 * num + den) // (2 * den))


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            x = ai[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    oi[j] += x * bk[j]
    return out


def determinant(a):
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("determinant requires a square matrix")
    m = [list(map(int, row)) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return sign * m[-1][-1]


def lll_reduce_with_transform(rows, delta=LLL_DELTA):
    """LLL-reduce integer basis rows; returns (reduced, U) with U @ rows == reduced.

    Integer-only variant (de Weger bookkeeping: lambda/d arrays, all
    divisions exact), delta = 99/100.  Raises DependentRowsError when the
    rows are linearly dependent over Q.
    """
    if not rows or not rows[0]:
        raise ValueError("empty basis")
    basis = [list(map(int, r)) for r in rows]
    n = len(basis)
    cols = len(basis[0])
    if any(len(r) != cols for r in basis):
        raise ValueError("ragged basis")
    transform = identity_matrix(n)
    d_num, d_den = delta

    # d[j] = Gram determinant of basis[0..j-1] (d[0] = 1);
    # lam[i][j] = d[j+1] * mu_ij, exact integers throughout.
    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * n for _ in range(n)]

    def dot(i, j):
        return sum(x * y for x, y in zip(basis[i], basis[j]))

    def red(k, l):
        lkl = lam[k][l]
        dl = d[l + 1]
        if 2 * abs(lkl) > dl:
            q = (2 * lkl + dl) // (2 * dl)
            bl, bk = basis[l], basis[k]
            for j in range(cols):
                bk[j] -= q * bl[j]
            tl, tk = transform[l], transform[k]
            for j in range(n):
                tk[j] -= q * tl[j]
            lam[k][l] = lkl - q * dl
            lamk, laml = lam[k], lam[l]
            for i in range(l):
                lamk[i] -= q * laml[i]

    d[1] = dot(0, 0)
    if d[1] == 0:
        raise DependentRowsError("row 0 is zero")
    k = 1
    kmax = 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = dot(k, j)
                lamk, dj = lam[k], d
                for i in range(j):
                    u = (d[i + 1] * u - lamk[i] * lam[j][i]) // d[i]
                if j < k:
                    lamk[j] = u
                else:
                    d[k + 1] = u
            if d[k + 1] == 0:
                raise DependentRowsError(f"row {k} is in the span of earlier rows")
        while True:
            red(k, k - 1)
            lkk = lam[k][k - 1]
            # Lovasz (integer form): swap when
            #   d[k+1] d[k-1] < delta d[k]^2 - lam^2
            if d_den * (d[k + 1] * d[k - 1] + lkk * lkk) < d_num * d[k] * d[k]:
                # SWAP(k)
                basis[k - 1], basis[k] = basis[k], basis[k - 1]
                transform[k - 1], transform[k] = transform[k], transform[k - 1]
                for j in range(k - 1):
                    lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
                lam_ = lkk
                b_new = (d[k - 1] * d[k + 1] + lam_ * lam_) // d[k]
                for i in range(k + 1, kmax + 1):
                    t = lam[i][k]
                    lam[i][k] = (d[k + 1] * lam[i][k - 1] - lam_ * t) // d[k]
                    lam[i][k - 1] = (b_new * t + lam_ * lam[i][k]) // d[k + 1]
                d[k] = b_new
                k = max(1, k - 1)
            else:
                for l in range(k - 2, -1, -1):
                    red(k, l)
                k += 1
                break
    return basis, transform


def lll_reduce(rows, delta=LLL_DELTA):
    """LLL-reduced basis spanning the same lattice (exact arithmetic)."""
    reduced, _ = lll_reduce_with_transform(rows, delta)
    return reduced


def smith_normal_form(a):
    """Smith normal form with transforms: returns (d, u, v label) with u @ a @ v = d.

    d is diagonal with d[i] | d[i+1], entries nonnegative; u, v unimodular.
    """
    rows = len(a)
    cols = len(a[0])
    m = [list(map(int, r)) for r in a]
    u = identity_matrix(rows)
    v = identity_matrix(cols)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def addmul_row(dst, src, c):
        mdst, msrc = m[dst], m[src]
        for j in range(cols):
            mdst[j] += c * msrc[j]
        udst, usrc = u[dst], u[src]
        for j in range(rows):
            udst[j] += c * usrc[j]

    def addmul_col(dst, src, c):
        for r in m:
            r[dst] += c * r[src]
        for r in v:
            r[dst] += c * r[src]

    def negate_row(i):
        m[i] = [-x for x in m[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    size = min(rows, cols)
    while t < size:
        # pivot: smallest |nonzero| entry of the trailing submatrix
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = m[i][j]
                if x and (piv is None or abs(x) < abs(m[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    addmul_row(i, t, -q)
                    if m[i][t]:  # remainder smaller than pivot: swap up, redo
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    addmul_col(j, t, -q)
                    if m[t][j]:
                        swap_cols(t, j)
                        dirty = True
        if m[t][t] < 0:
            negate_row(t)
        # divisibility: pivot must divide every remaining entry
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if m[i][j] % m[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            addmul_row(t, offender, 1)
            continue  # redo this pivot position
        t += 1
    return m, u, v


def snf_diagonal(a):
    d, _, _ = smith_normal_form(a)
    return [d[i][i] for i in range(min(len(d), len(d[0])))]


def integer_matrix_inverse(a):
    """Exact inverse of a unimodular integer matrix."""
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = []
    for row in aug:
        vals = row[n:]
        if any(x.denominator != 1 for x in vals):
            raise ValueError("matrix is not unimodular over Z")
        out.append([int(x) for x in vals])
    return out


def right_kernel(a):
    """Basis (list of length-cols integer vectors) of {x : a @ x = 0}."""
    d, _, v = smith_normal_form(a)
    cols = len(a[0])
    rank = sum(1 for i in range(min(len(d), cols)) if d[i][i])
    return [[v[r][j] for r in range(cols)] for j in range(rank, cols)]


def saturate_rowspace(rows):
    """Basis of the saturation {x in Z^k : q x in L for some q != 0} of L = rowspace.

    Returned as a list of integer rows; empty input gives an empty basis.
    """
    if not rows:
        return []
    d, _, v = smith_normal_form(rows)
    cols = len(rows[0])
    rank = sum(1 for i in range(min(len(d), cols)) if d[i][i])
    w = integer_matrix_inverse(v)
    sat = w[:rank]
    # sanity: every original row must be an integer combination of sat rows
    if rank and len(sat) != rank:
        raise InternalAssertionError("saturation basis extraction failed")
    return sat


def rowspace_rank(rows):
    if not rows:
        return 0
    d = snf_diagonal(rows)
    return sum(1 for x in d if x)
