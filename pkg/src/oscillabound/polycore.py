"""Exact polynomial curves, frequency phases, and the constants they certify.

Everything in this module is exact rational arithmetic (fractions.Fraction);
floats only appear on the way out, rounded in whichever direction keeps the
downstream certificate valid.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

ISOLATION_WIDTH = Fraction(1, 10**12)
_EIG_BITS = 80  # bisection depth for smallest-eigenvalue enclosures


def parse_rational(x):
    """Accept Fraction/int/float or a 'num/den' (or 'num') string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            num, den = s.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(s))
    raise TypeError(f"cannot interpret {x!r} as a rational")


class RationalPoly:
    """Dense univariate polynomial over Q, coefficients ascending (a0, a1, ...)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [parse_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self):
        return not self.coeffs

    def __call__(self, x):
        acc = 0 if not isinstance(x, float) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + (float(c) if isinstance(x, float) else c)
        return acc

    def derivative(self):
        return RationalPoly([i * c for i, c in enumerate(self.coeffs)][1:] or [0])

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return RationalPoly([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalPoly([c * other for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, RationalPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RationalPoly({[str(c) for c in self.coeffs]})"

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 1)
        d = other.coeffs
        while len(rem) >= len(d) and any(rem):
            if rem[-1] == 0:
                rem.pop()
                continue
            k = len(rem) - len(d)
            f = rem[-1] / d[-1]
            q[k] = f
            for i, c in enumerate(d):
                rem[k + i] -= f * c
            rem.pop()
        return RationalPoly(q), RationalPoly(rem)

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        if a.is_zero():
            return a
        return a * (1 / a.coeffs[-1])  # monic

    def squarefree(self):
        if self.degree <= 0:
            return self
        g = self.gcd(self.derivative())
        if g.degree <= 0:
            return self
        return self.divmod(g)[0]

    def compose_linear(self, c, d):
        """p(c + d*x), exact."""
        c, d = parse_rational(c), parse_rational(d)
        out = RationalPoly([0])
        for a in reversed(self.coeffs):
            out = out * RationalPoly([c, d]) + RationalPoly([a])
        return out


def _sturm_chain(p):
    chain = [p, p.derivative()]
    while chain[-1].degree > 0:
        chain.append(-(chain[-2].divmod(chain[-1])[1]))
        if chain[-1].is_zero():
            chain.pop()
            break
    return chain


def _sign_changes(chain, x):
    signs = []
    for q in chain:
        v = q(x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_roots(chain, lo, hi):
    """Number of distinct roots in (lo, hi]."""
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


def isolate_positive_roots(poly, lo, hi):
    """Isolating intervals for the distinct real roots of poly in (lo, hi).

    Returns a sorted list of (left, right) Fraction pairs with right - left
    <= 1e-12, each containing exactly one root; an exact rational root shows
    up as a degenerate pair (r, r).  Endpoint roots are excluded (open
    interval).  Sturm-chain counting, exact arithmetic throughout.
    """
    lo, hi = parse_rational(lo), parse_rational(hi)
    if lo >= hi:
        return []
    p = poly.squarefree()
    if p.degree <= 0:
        return []
    chain = _sturm_chain(p)
    total = _count_roots(chain, lo, hi)
    if p(hi) == 0:
        total -= 1  # (lo, hi] counted it; the contract is the open interval
    out = []

    def split(a, b, count):
        if count == 0:
            return
        if count == 1 and b - a <= ISOLATION_WIDTH:
            out.append((a, b))
            return
        mid = (a + b) / 2
        if p(mid) == 0:
            out.append((mid, mid))
            left = _count_roots(chain, a, mid) - 1
            right = count - 1 - left
            split(a, mid, left)
            split(mid, b, right)
            return
        left = _count_roots(chain, a, mid)
        split(a, mid, left)
        split(mid, b, count - left)

    split(lo, hi, total)
    return sorted(out)


class ExpPoly:
    """Finite sums  sum_j c_j * e^{j t}  with rational c_j, integer j >= 0."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = {int(j): parse_rational(c) for j, c in dict(terms).items() if parse_rational(c) != 0}
        if any(j < 0 for j in self.terms):
            raise ValueError("negative exponents are not allowed")

    @property
    def max_index(self):
        return max(self.terms) if self.terms else 0

    def is_constant(self):
        return all(j == 0 for j in self.terms)

    def constant_term(self):
        return self.terms.get(0, Fraction(0))

    def __call__(self, t):
        return sum(float(c) * math.exp(j * t) for j, c in self.terms.items())

    def eval_exact(self, x):
        """Value at t = ln(x) for rational x, i.e. the x-polynomial at x."""
        return sum(c * x**j for j, c in self.terms.items())

    def as_x_poly(self):
        """The polynomial g with Phi(t) = g(e^t)."""
        n = self.max_index
        cs = [Fraction(0)] * (n + 1)
        for j, c in self.terms.items():
            cs[j] = c
        return RationalPoly(cs)

    def __repr__(self):
        return f"ExpPoly({dict(sorted(self.terms.items()))})"


def exp_poly_derivative(phi, k=1):
    """k-th t-derivative: e^{jt} picks up j^k."""
    if k < 0:
        raise ValueError("derivative order must be >= 0")
    return ExpPoly({j: c * j**k for j, c in phi.terms.items()})


class CurveFamily:
    """A tuple of nonconstant rational polynomials f_1..f_m defining the curve
    t -> (f_1(e^t), ..., f_m(e^t))."""

    def __init__(self, polys):
        ps = []
        for p in polys:
            if not isinstance(p, RationalPoly):
                p = RationalPoly(p)
            if p.degree < 1:
                raise ValueError("curve components must be nonconstant")
            ps.append(p)
        if not ps:
            raise ValueError("empty curve family")
        self.polys = tuple(ps)

    @property
    def m(self):
        return len(self.polys)

    @property
    def n(self):
        return max(p.degree for p in self.polys)

    def coefficient_matrix(self):
        """Rows a_{i0..in}, one per component, zero-padded to the max degree."""
        n = self.n
        return [list(p.coeffs) + [Fraction(0)] * (n + 1 - len(p.coeffs)) for p in self.polys]

    @property
    def a0_unbounded_below(self):
        """True when every component vanishes at 0 (window start may be any real)."""
        return all(p.coeffs[0] == 0 for p in self.polys)

    def __repr__(self):
        return f"CurveFamily({list(self.polys)})"


def parse_curve_family(data):
    """Coefficient lists (ascending, 'num/den' strings allowed) -> CurveFamily."""
    return CurveFamily([RationalPoly(row) for row in data])


def _rank(rows):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [v - f * w for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def check_independence(family):
    """True iff 1, f_1, ..., f_m are linearly independent over Q.

    Exact rank of the coefficient matrix augmented with the row (1, 0, ..., 0).
    """
    rows = family.coefficient_matrix()
    aug = rows + [[Fraction(1)] + [Fraction(0)] * family.n]
    return _rank(aug) == family.m + 1


def phi_from_frequency(family, lam):
    """The phase Phi(t) = sum_i lam_i f_i(e^t) as an ExpPoly (exact)."""
    lam = [parse_rational(v) for v in lam]
    if len(lam) != family.m:
        raise ValueError(f"frequency has {len(lam)} components, family has {family.m}")
    terms = {}
    for lv, p in zip(lam, family.polys):
        if lv == 0:
            continue
        for j, c in enumerate(p.coeffs):
            terms[j] = terms.get(j, Fraction(0)) + lv * c
    return ExpPoly(terms)


def _solve_exact(mat, rhs):
    """Gaussian elimination over Q; raises on a singular matrix."""
    n = len(mat)
    a = [list(row) + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def vandermonde_interpolation(values, n):
    """Solve sum_{k=1}^{n} alpha_k * j^k = values_j for j = 1..n, exactly.

    values may be a sequence of n rationals or the string "ones".
    """
    if values == "ones":
        values = [Fraction(1)] * n
    values = [parse_rational(v) for v in values]
    if len(values) != n:
        raise ValueError("need exactly n target values")
    mat = [[Fraction(j**k) for k in range(1, n + 1)] for j in range(1, n + 1)]
    return tuple(_solve_exact(mat, values))


def compute_a0_real(family):
    """Largest t >= 0 at which every component vanishes at e^t; 0 if none.

    The common roots are the roots of gcd(f_1, ..., f_m); only roots x >= 1
    matter.  Returns a float (ln of the top root, refined to 1e-12).
    """
    g = family.polys[0]
    for p in family.polys[1:]:
        g = g.gcd(p)
    if g.degree < 1:
        return 0.0
    if g(Fraction(1)) == 0:
        best = Fraction(1)
    else:
        best = None
    cauchy = Fraction(1) + max(abs(c) for c in g.coeffs[:-1]) / abs(g.coeffs[-1]) if g.degree >= 1 else Fraction(2)
    for left, right in isolate_positive_roots(g, Fraction(1), cauchy + 1):
        if best is None or right > best:
            best = right
    if best is None or best < 1:
        return 0.0
    return math.log(float(best))


# --- operator norms of inverse submatrices, exactly bounded -----------------


def _det(mat):
    n = len(mat)
    a = [list(r) for r in mat]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return det


def _char_poly(mat):
    """det(x I - mat) as a RationalPoly, by interpolation at x = 0..n."""
    n = len(mat)
    xs = [Fraction(k) for k in range(n + 1)]
    ys = []
    for x in xs:
        shifted = [[(x if i == j else Fraction(0)) - mat[i][j] for j in range(n)] for i in range(n)]
        ys.append(_det(shifted))
    # Lagrange interpolation (n+1 points determine the degree-n char poly)
    acc = RationalPoly([0])
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term = RationalPoly([yi])
        for j, xj in enumerate(xs):
            if j != i:
                term = term * RationalPoly([-xj, 1]) * Fraction(1, int(xi - xj))
        acc = acc + term
    return acc


def _min_eigenvalue_lower(gram):
    """A positive rational lower bound on the smallest eigenvalue of a
    positive-definite Gram matrix, via exact bisection on its char poly."""
    p = _char_poly(gram)
    chain = _sturm_chain(p.squarefree())
    hi = sum(gram[i][i] for i in range(len(gram))) + 1  # trace bounds every eigenvalue
    lo = Fraction(0)
    # invariant: no root in (0, lo];  at least one root in (lo, hi]
    for _ in range(_EIG_BITS):
        mid = (lo + hi) / 2
        if mid == 0:
            break
        if _count_roots(chain, Fraction(0), mid) == 0 and p(mid) != 0:
            lo = mid
        else:
            hi = mid
    if lo <= 0:
        raise ArithmeticError("Gram matrix is numerically singular")
    return lo


def _operator_norm_inverse_upper(mat):
    """Upper bound (float, rounded up) on ||mat^{-1}||_op for invertible mat."""
    m = len(mat)
    gram = [[sum(mat[k][i] * mat[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    lam = _min_eigenvalue_lower(gram)
    val = 1.0 / math.sqrt(float(lam))
    return math.nextafter(val * (1 + 1e-12), math.inf)


@dataclass(frozen=True)
class HighFreqConstants:
    """Certified constants for the high-frequency estimates of a curve family.

    alpha solves sum_k alpha_k j^k = 1 (j = 1..n); beta[l] solves the same
    system with target delta_{j,l+1}.  All floats are rounded so that the
    downstream bound C only gets larger: H, H_prime, M, L up; eps down.
    """

    m: int
    n: int
    alpha: tuple
    H: float
    beta: tuple
    H_prime: float
    M: float
    L: float
    eps: float


def _up(x):
    return math.nextafter(float(x), math.inf)


def high_freq_constants(family):
    if not check_independence(family):
        raise ValueError("family is not independent together with constants")
    m, n = family.m, family.n
    alpha = vandermonde_interpolation("ones", n)
    H = _up(max(abs(a) for a in alpha))
    beta = []
    for ell in range(1, n + 1):
        target = [Fraction(1) if j == ell else Fraction(0) for j in range(1, n + 1)]
        beta.append(vandermonde_interpolation(target, n))
    H_prime = _up(max(abs(b) for row in beta for b in row))
    rows = family.coefficient_matrix()
    aprime = [r[1:] for r in rows]  # drop the constant column
    # max over invertible m x m column-submatrices of the inverse operator norm
    M = 0.0
    for cols in combinations(range(n), m):
        sub = [[row[c] for c in cols] for row in aprime]
        if _det(sub) == 0:
            continue
        M = max(M, _operator_norm_inverse_upper(sub))
    if M == 0.0:
        raise ArithmeticError("no invertible submatrix despite independence")
    L2 = sum(r[0] ** 2 for r in rows)
    L = _up(math.sqrt(float(L2))) if L2 > 0 else 0.0
    if L == 0.0:
        eps = math.inf
    else:
        eps = (1.0 / (8.0 * math.sqrt(m) * L * M)) * (1 - 1e-9)  # round down
    return HighFreqConstants(m=m, n=n, alpha=alpha, H=H, beta=tuple(beta), H_prime=H_prime, M=M, L=L, eps=eps)
