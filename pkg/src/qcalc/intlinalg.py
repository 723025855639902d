"""Exact integer linear algebra.

Smith normal form with unimodular transforms, Hermite normal form, rational
rank, Bareiss determinants, cohomology of integer cochain complexes, and an
independent local-elimination routine used as a cross-check oracle.
"""

from fractions import Fraction

from sympy import factorint


def zeros(rows, cols):
    return [[0] * cols for _ in range(rows)]


def identity(n):
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = 1
    return out


def matmul(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    acc[j] += x * bk[j]
        out.append(acc)
    return out


def matvec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a, cols=None):
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(r) for r in zip(*a)]


def is_zero_matrix(a):
    return all(x == 0 for row in a for x in row)


class SmithForm:
    """U * A * V = D with D diagonal, d_1 | d_2 | ... and U, V unimodular."""

    def __init__(self, diag, U, Uinv, V, Vinv, shape):
        self.diag = diag
        self.U = U
        self.Uinv = Uinv
        self.V = V
        self.Vinv = Vinv
        self.shape = shape

    @property
    def rank(self):
        return len(self.diag)


def smith_normal_form(matrix, rows=None, cols=None, transforms=True):
    """Smith normal form of an integer matrix given as a list of rows."""
    A = [list(r) for r in matrix]
    m = len(A) if rows is None else rows
    n = (len(A[0]) if A else 0) if cols is None else cols
    if not A:
        A = zeros(m, n)
    U = identity(m) if transforms else None
    Uinv = identity(m) if transforms else None
    V = identity(n) if transforms else None
    Vinv = identity(n) if transforms else None

    def swap_rows(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        if transforms:
            U[i], U[j] = U[j], U[i]
            for row in Uinv:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i == j:
            return
        for row in A:
            row[i], row[j] = row[j], row[i]
        if transforms:
            for row in V:
                row[i], row[j] = row[j], row[i]
            Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        if not c:
            return
        rs, rd = A[src], A[dst]
        for k in range(n):
            if rs[k]:
                rd[k] += c * rs[k]
        if transforms:
            us, ud = U[src], U[dst]
            for k in range(m):
                if us[k]:
                    ud[k] += c * us[k]
            for row in Uinv:
                if row[dst]:
                    row[src] -= c * row[dst]

    def add_col(dst, src, c):
        # col_dst += c * col_src
        if not c:
            return
        for row in A:
            if row[src]:
                row[dst] += c * row[src]
        if transforms:
            for row in V:
                if row[src]:
                    row[dst] += c * row[src]
            vd, vs = Vinv[dst], Vinv[src]
            for k in range(n):
                if vd[k]:
                    vs[k] -= c * vd[k]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        if transforms:
            U[i] = [-x for x in U[i]]
            for row in Uinv:
                row[i] = -row[i]

    diag = []
    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the trailing block
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        done = False
            if not done:
                # move the smallest leftover entry of row/column t into the pivot
                cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            # divisibility of the remaining block
            p = A[t][t]
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            negate_row(t)
        diag.append(A[t][t])
        t += 1
    return SmithForm(diag, U, Uinv, V, Vinv, (m, n))


def invariant_factors(matrix, rows=None, cols=None):
    return smith_normal_form(matrix, rows, cols, transforms=False).diag


def hermite_normal_form(rows_in, ncols):
    """Row-style HNF basis of the lattice spanned by the given integer rows."""
    pending = [list(r) for r in rows_in if any(r)]
    out = []
    for col in range(ncols):
        if not pending:
            break
        while True:
            nz = [r for r in pending if r[col]]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda r: abs(r[col]))
            fresh = []
            for r in pending:
                if r is not piv and r[col]:
                    c = r[col] // piv[col]
                    r = [x - c * y for x, y in zip(r, piv)]
                if any(r):
                    fresh.append(r)
            pending = fresh
        nz = [r for r in pending if r[col]]
        if not nz:
            continue
        piv = nz[0]
        pending = [r for r in pending if r is not piv]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append((col, piv))
    basis = list(out)
    # clear entries above each pivot
    for i in range(len(basis)):
        pc, r = basis[i]
        for k in range(i):
            kc, kr = basis[k]
            c = kr[pc] // r[pc]
            if c:
                basis[k] = (kc, [x - c * y for x, y in zip(kr, r)])
    return [r for _, r in basis]


def rank_rational(matrix):
    """Rank over Q by fraction-free elimination."""
    return len(_rational_pivots(matrix)[0])


def _rational_pivots(matrix):
    """Return (pivot rows, pivot columns) of an independent maximal minor."""
    A = [[Fraction(x) for x in r] for r in matrix]
    if not A:
        return [], []
    m, n = len(A), len(A[0])
    order = list(range(m))
    prow, pcol = [], []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        order[r], order[piv] = order[piv], order[r]
        for i in range(r + 1, m):
            if A[i][c]:
                f = A[i][c] / A[r][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        prow.append(order[r])
        pcol.append(c)
        r += 1
        if r == m:
            break
    return prow, pcol


def det_bareiss(matrix):
    """Determinant by Bareiss fraction-free elimination."""
    A = [list(r) for r in matrix]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


# ---------------------------------------------------------------------------
# independent oracle


def _local_exponents(matrix, ell, top):
    """Elementary-divisor exponents of a matrix over Z/ell^top by valuation pivoting."""
    mod = ell ** top
    A = [[x % mod for x in r] for r in matrix]
    m = len(A)
    n = len(A[0]) if A else 0

    def val(x):
        if x == 0:
            return top
        v = 0
        while x % ell == 0:
            x //= ell
            v += 1
        return v

    exps = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j]:
                    v = val(A[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        unit = A[t][t] // ell ** v
        inv = pow(unit, -1, mod)
        for i in range(t + 1, m):
            if A[i][t]:
                c = (A[i][t] // ell ** v) * inv % mod
                A[i] = [(x - c * y) % mod for x, y in zip(A[i], A[t])]
        for j in range(t + 1, n):
            if A[t][j]:
                c = (A[t][j] // ell ** v) * inv % mod
                for row in A:
                    row[j] = (row[j] - c * row[t]) % mod
        exps.append(v)
        t += 1
    return exps


def invariant_factors_oracle(matrix):
    """Invariant factors via rational rank, one maximal minor and local elimination.

    Shares no code with smith_normal_form.
    """
    prow, pcol = _rational_pivots(matrix)
    r = len(prow)
    if r == 0:
        return []
    minor = det_bareiss([[matrix[i][j] for j in pcol] for i in prow])
    per_prime = {}
    for ell, v in factorint(abs(minor)).items():
        exps = _local_exponents(matrix, ell, v + 1)
        if len(exps) != r or any(e > v for e in exps):
            raise AssertionError("local elimination disagrees with rational rank")
        per_prime[ell] = sorted(exps)
    out = []
    for i in range(r):
        d = 1
        for ell, exps in per_prime.items():
            d *= ell ** exps[i]
        out.append(d)
    return out


# ---------------------------------------------------------------------------
# cohomology of integer cochain complexes


class Cohomology:
    """H = ker(d_out) / im(d_in) as a finitely generated abelian group.

    ``gens`` are cocycle vectors; ``orders[i]`` is the order of gens[i]
    (0 for a free generator).  Trivial summands are dropped.
    """

    def __init__(self, dim, d_in, d_out, dim_prev=None, dim_next=None):
        self.dim = dim
        if d_out is None or dim_next == 0 or not d_out:
            out_form = smith_normal_form(zeros(0, dim), 0, dim)
        else:
            out_form = smith_normal_form(d_out, len(d_out), dim)
        r = out_form.rank
        self._Vinv = out_form.Vinv
        self._r = r
        kernel = [[out_form.V[i][j] for j in range(r, dim)] for i in range(dim)]
        z = dim - r
        if d_in is None or not dim_prev:
            bcoords = zeros(z, 0)
            cols = 0
        else:
            cols = len(d_in[0]) if d_in and d_in[0] is not None else 0
            full = matmul(out_form.Vinv, d_in) if dim else []
            bcoords = [full[r + i] for i in range(z)]
        img_form = smith_normal_form(bcoords, z, cols)
        self._U2 = img_form.U
        gen_basis = matmul(kernel, img_form.Uinv) if z else []
        self.gens = []
        self.orders = []
        self._slots = []
        diag = img_form.diag
        for i in range(z):
            order = diag[i] if i < len(diag) else 0
            if order == 1:
                continue
            self._slots.append(i)
            self.orders.append(order)
            self.gens.append([gen_basis[k][i] for k in range(dim)])

    @property
    def free_rank(self):
        return sum(1 for o in self.orders if o == 0)

    @property
    def torsion(self):
        return sorted(o for o in self.orders if o)

    def is_zero(self):
        return not self.orders

    def coords(self, w):
        """Coordinates of a cocycle w in the generator basis."""
        full = matvec(self._Vinv, w)
        if any(full[i] for i in range(self._r)):
            raise ValueError("vector is not a cocycle")
        z = full[self._r:]
        c = matvec(self._U2, z) if z else []
        out = []
        for slot, order in zip(self._slots, self.orders):
            x = c[slot]
            out.append(x % order if order else x)
        return out

    def reduce(self, coords):
        return [x % o if o else x for x, o in zip(coords, self.orders)]

    def induced(self, chain_map, target):
        """Matrix of the map induced by a chain map (target coordinates per column)."""
        cols = [target.coords(matvec(chain_map, g)) for g in self.gens]
        return transpose(cols, len(target.orders)) if cols else [[] for _ in target.orders]

    def summary(self):
        return {"free_rank": self.free_rank, "torsion": self.torsion}
