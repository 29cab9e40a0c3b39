"""Oscillatory integrals of exp(2*pi*i*Phi(t)) with Phi(t) = sum c_j e^{jt},
interval decompositions with derivative witnesses, and the certified constant
C with mu_hat_T >= -C/(T-a) uniformly in the frequency.

Evaluation strategy.  The window is first cut at the (Sturm-isolated) roots
of Phi' and Phi'' so that Phi and Phi' are monotone on every piece.  A piece
spanning few oscillations is integrated directly by adaptive bisection with
a nested Clenshaw-Curtis 16/8 pair (the 8-point rule rides on every other
node of the 16-point rule, so the error estimate costs nothing extra); a
panel is split unconditionally whenever the phase 2*pi*Phi moves by more
than pi across it, which prevents a smooth-looking aliased panel from being
accepted.  A piece spanning many oscillations is split at |Phi'| = Omega
into a slow zone (direct) and a fast zone handled in closed form by
three-term integration by parts: with psi = 2*pi*Phi and
A = psi''' psi' - 3 psi''^2,

    int e^{i psi} dt = [e^{i psi} (1/(i psi') - psi''/psi'^3 + A/(i psi'^5))]
                       + R3,
    |R3| <= int |A'/psi'^5 - 5 A psi''/psi'^6| dt,

where the remainder bound is an ordinary non-oscillatory integral charged to
the error estimate, and Omega is grown until that charge fits the tolerance.
This evaluates frequencies with |lambda| ~ 1e6 (phase counts ~ 1e60) at
fixed cost.
"""

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polycore import (
    RationalPoly,
    compute_a0_real,
    exp_poly_derivative,
    high_freq_constants,
    isolate_positive_roots,
    parse_rational,
    phi_from_frequency,
)

LOW = "low"
HIGH = "high"

_DIRECT_SPAN = 24.0  # max |Delta Phi| (in periods) integrated without IBP
_MAX_PANELS = 400_000
_MAX_DEPTH = 52
_CC_N = 16
_EPS = 2.3e-16  # float64 phase-evaluation granularity


class QuadratureError(RuntimeError):
    """Raised when adaptive refinement hits its depth/panel ceiling."""

    def __init__(self, message, partial=None, error=None):
        super().__init__(message)
        self.partial = partial
        self.error = error


@dataclass(frozen=True)
class Window:
    a: float
    T: float

    def __post_init__(self):
        if not self.T > self.a:
            raise ValueError("window needs T > a")

    @property
    def length(self):
        return self.T - self.a


def _as_window(w):
    if isinstance(w, Window):
        return w
    a, T = w
    return Window(float(a), float(T))


@dataclass(frozen=True)
class WitnessInterval:
    lo: float
    hi: float
    k: int  # |Phi^(k)| >= eta on [lo, hi]
    eta: float
    dphi_monotone: bool


@dataclass(frozen=True)
class IntervalDecomposition:
    intervals: tuple

    def __len__(self):
        return len(self.intervals)

    def spot_check(self, phi, points=32):
        """Verify each witness |Phi^{(k)}| >= eta at interior sample points."""
        for iv in self.intervals:
            der = exp_poly_derivative(phi, iv.k)
            ts = np.linspace(iv.lo, iv.hi, points + 2)[1:-1]
            for t in ts:
                if abs(der(float(t))) < iv.eta * (1 - 1e-9):
                    return False
        return True


@dataclass(frozen=True)
class CertifiedBound:
    C: float
    breakdown: dict  # case -> (interval budget, case total)
    constants: object  # HighFreqConstants snapshot


def vdc_bound(k, eta):
    """Oscillation bound 12*k/eta^(1/k) for phases with |psi^(k)| >= eta."""
    if k < 1:
        raise ValueError("derivative order must be >= 1")
    eta = float(eta)
    if eta <= 0:
        raise ValueError("eta must be positive")
    return 12.0 * k / eta ** (1.0 / k)


def classify_frequency(family, lam):
    """LOW iff |sum lam_i f_i(0)| <= 1/8 (exact rational test)."""
    lams = [parse_rational(v) for v in lam]
    if all(v == 0 for v in lams):
        raise ValueError("lambda = 0 has no frequency class")
    s = sum(lv * f.coeffs[0] for lv, f in zip(lams, family.polys))
    return LOW if abs(s) <= Fraction(1, 8) else HIGH


# --- Clenshaw-Curtis panel rule --------------------------------------------


def _cc_rule(n):
    """Nodes cos(j*pi/n) (j = 0..n) and weights integrating exactly up to
    degree n on [-1, 1]; built from the cosine-transform identities."""
    j = np.arange(n + 1)
    theta = np.pi * j / n
    x = np.cos(theta)
    coef = np.cos(np.outer(np.arange(n + 1), theta)) * (2.0 / n)
    coef[:, 0] *= 0.5
    coef[:, -1] *= 0.5
    c = np.zeros(n + 1)
    even = np.arange(0, n + 1, 2)
    c[even] = 2.0 / (1.0 - even.astype(float) ** 2)
    c[0] = 2.0
    half = np.ones(n + 1)
    half[0] = 0.5
    half[-1] = 0.5
    return x, coef.T @ (c * half)


_CC_X, _CC_W = _cc_rule(_CC_N)
_CC_W_COARSE = _cc_rule(_CC_N // 2)[1]


def _adaptive_cc(values_at, lo, hi, tol_abs, phase_at=None, rel=0.0):
    """Adaptive bisection with the nested CC16/CC8 pair.

    values_at(ts) -> complex ndarray of integrand values; phase_at(t), when
    given, supplies Phi for the oscillation guard: a panel across which the
    phase 2*pi*Phi moves by more than pi is split unconditionally, so an
    aliased panel can never look converged.  rel > 0 additionally accepts a
    panel at that relative accuracy -- only use it for sign-definite
    integrands (error/remainder weights), where per-panel relative control
    gives total relative control; the accepted estimates accumulate into the
    returned error bound either way.
    """
    total = 0.0 + 0.0j
    err_total = 0.0
    width_all = hi - lo
    panels = 0
    fa0 = phase_at(lo) if phase_at is not None else 0.0
    fb0 = phase_at(hi) if phase_at is not None else 0.0
    stack = [(lo, hi, 0, fa0, fb0)]
    while stack:
        a, b, depth, fa, fb = stack.pop()
        panels += 1
        if panels > _MAX_PANELS or depth > _MAX_DEPTH:
            raise QuadratureError(
                "quadrature failed to converge", partial=total, error=err_total + abs(b - a)
            )
        if phase_at is not None and abs(fb - fa) > 0.5:
            mid = 0.5 * (a + b)
            fm = phase_at(mid)
            stack.append((a, mid, depth + 1, fa, fm))
            stack.append((mid, b, depth + 1, fm, fb))
            continue
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        ts = mid + half * _CC_X
        with np.errstate(over="ignore", invalid="ignore"):
            vals = values_at(ts)
            fine = half * complex(vals @ _CC_W)
            coarse = half * complex(vals[::2] @ _CC_W_COARSE)
        err = abs(fine - coarse)
        budget = tol_abs * max((b - a) / width_all, 1e-300)
        if err <= budget or err <= rel * abs(fine) or err <= 1e-15 * (1.0 + abs(fine)):
            total += fine
            err_total += err
            continue
        fm = phase_at(mid) if phase_at is not None else 0.0
        stack.append((a, mid, depth + 1, fa, fm))
        stack.append((mid, b, depth + 1, fm, fb))
    return total, err_total


# --- piecewise oscillatory integration --------------------------------------


def _phi_evaluators(phi):
    js = np.array(sorted(phi.terms), dtype=float)
    cs = np.array([float(phi.terms[int(j)]) for j in js])
    js_col = js.reshape(-1, 1)

    def vec(ts):
        return cs @ np.exp(js_col * ts)

    def scal(t):
        return float(cs @ np.exp(js * t))

    return vec, scal


def _breakpoints(phi, a, T):
    """Interior roots of Phi' and Phi'' (t-coordinates), Sturm-isolated."""
    xlo = Fraction(math.exp(a)) * (1 - Fraction(1, 10**15))
    xhi = Fraction(math.exp(T)) * (1 + Fraction(1, 10**15))
    cuts = set()
    for k in (1, 2):
        poly = exp_poly_derivative(phi, k).as_x_poly()
        if poly.degree < 1:
            continue
        # cheap Descartes screen: no sign change -> no positive roots
        signs = [1 if c > 0 else -1 for c in poly.coeffs if c != 0]
        if all(s == signs[0] for s in signs):
            continue
        for left, right in isolate_positive_roots(poly, xlo, xhi):
            x = float(left + right) / 2.0
            if x > 0:
                t = math.log(x)
                if a < t < T:
                    cuts.add(t)
    return sorted(cuts)


def _ibp_boundary(derivs_at, t):
    """Three-term stationary boundary e^{i psi}(1/(i psi') - psi''/psi'^3
    + (psi''' psi' - 3 psi''^2)/(i psi'^5)) at t, with psi = 2*pi*Phi.

    Evaluated via q = 1/psi' and the ratios psi^(k)/psi', which stay modest
    even when psi' itself would overflow raised to the fifth power."""
    f, p1, p2, p3, _ = derivs_at(t)
    e = complex(math.cos(f), math.sin(f))
    q = 1.0 / p1
    u2, u3 = p2 * q, p3 * q
    return e * q * (-1j - u2 * q - 1j * (u3 - 3.0 * u2 * u2) * q * q)


def _phase_noise(phi_s, lo, hi):
    """Honest bound on the float64 argument-reduction error of cos(2*pi*Phi)
    integrated over [lo, hi]; Phi is monotone there so |Phi| peaks at an end."""
    peak = max(abs(phi_s(lo)), abs(phi_s(hi)))
    return min(2.0 * (hi - lo), math.tau * peak * _EPS * (hi - lo))


def _integrate_piece(phi, c, d, tol_piece):
    """One piece with Phi and Phi' monotone; returns (value, error_bound)."""
    vec, phi_s = _phi_evaluators(phi)
    dvecs, dscals = zip(*(_phi_evaluators(exp_poly_derivative(phi, k)) for k in range(1, 5)))
    dphi_s = dscals[0]

    def derivs_at(t):
        return (math.tau * phi_s(t),) + tuple(math.tau * s(t) for s in dscals)

    def integrand(ts):
        return np.exp(2j * np.pi * vec(ts))

    span = abs(phi_s(d) - phi_s(c))
    if span <= _DIRECT_SPAN:
        val, err = _adaptive_cc(integrand, c, d, tol_piece, phase_at=phi_s)
        return val, err + _phase_noise(phi_s, c, d)

    # |Phi'| is monotone on the piece; identify the slow end
    dc, dd = abs(dphi_s(c)), abs(dphi_s(d))
    slow_at_left = dc < dd
    omega = max(_DIRECT_SPAN / max(d - c, 1e-12), 1.0)

    def weight(ts):
        # |A'/psi'^5 - 5 A psi''/psi'^6| = |q^3 (u4 - 10 u2 u3 + 15 u2^3)|
        # with q = 1/psi', u_k = psi^(k)/psi'  (overflow-safe for huge psi')
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            p1, p2, p3, p4 = (math.tau * dv(ts) for dv in dvecs)
            q = 1.0 / p1
            u2, u3, u4 = p2 * q, p3 * q, p4 * q
            return np.abs(q**3 * (u4 - 10.0 * u2 * u3 + 15.0 * u2**3)) + 0j

    for _ in range(60):
        if omega >= max(dc, dd):
            # no fast zone left; integrate the whole piece directly
            val, err = _adaptive_cc(integrand, c, d, tol_piece, phase_at=phi_s)
            return val, err + _phase_noise(phi_s, c, d)
        if min(dc, dd) >= omega:
            t_star = c if slow_at_left else d  # entire piece is fast
        else:
            lo, hi = c, d
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if (abs(dphi_s(mid)) < omega) == slow_at_left:
                    lo = mid
                else:
                    hi = mid
            t_star = 0.5 * (lo + hi)
        fast_lo, fast_hi = (t_star, d) if slow_at_left else (c, t_star)
        if fast_hi - fast_lo <= 1e-13 * max(1.0, abs(c), abs(d)):
            val, err = _adaptive_cc(integrand, c, d, tol_piece, phase_at=phi_s)
            return val, err + _phase_noise(phi_s, c, d)
        try:
            r3, werr = _adaptive_cc(weight, fast_lo, fast_hi, 0.05 * tol_piece + 1e-300, rel=0.05)
            r3 = abs(r3) + werr
        except QuadratureError:
            # the remainder integral would not converge at this omega, and a
            # failed refinement carries no usable estimate; force the growth
            # step below to push omega past the bad layer
            r3 = math.inf
        if math.isnan(r3):
            r3 = math.inf
        if r3 <= 0.4 * tol_piece:
            b_hi = _ibp_boundary(derivs_at, fast_hi)
            b_lo = _ibp_boundary(derivs_at, fast_lo)
            noise = sum(
                2.0 * abs(term) * min(1.0, math.tau * abs(phi_s(t)) * _EPS)
                for term, t in ((b_hi, fast_hi), (b_lo, fast_lo))
            )
            slow_lo, slow_hi = (c, t_star) if slow_at_left else (t_star, d)
            sval, serr = (0.0 + 0.0j, 0.0)
            swidth = slow_hi - slow_lo
            if swidth > 0:
                if swidth <= 0.5 * tol_piece:
                    serr = swidth  # measure bound: |integrand| = 1
                else:
                    try:
                        sval, serr = _adaptive_cc(
                            integrand, slow_lo, slow_hi, 0.5 * tol_piece, phase_at=phi_s
                        )
                        serr += _phase_noise(phi_s, slow_lo, slow_hi)
                    except QuadratureError:
                        sval, serr = 0.0 + 0.0j, math.inf
                    if serr > swidth:
                        sval, serr = 0.0 + 0.0j, swidth
            return sval + b_hi - b_lo, serr + r3 + noise
        # the remainder decays like Omega^-3; jump near the needed level
        jump = omega * (r3 / (0.4 * tol_piece)) ** (1.0 / 3.0) * 1.5
        omega = max(4.0 * omega, min(jump, 1e12 * omega))
    raise QuadratureError("IBP remainder failed to stabilize", partial=None, error=None)


def osc_integral(phi, a, T, tol_abs):
    """int_a^T exp(2*pi*i*Phi(t)) dt with an error estimate <= tol_abs."""
    if phi.is_constant():
        c0 = float(phi.constant_term())
        return complex(math.cos(math.tau * c0), math.sin(math.tau * c0)) * (T - a), 0.0
    cuts = _breakpoints(phi, a, T)
    knots = [a] + cuts + [T]
    total = 0.0 + 0.0j
    err = 0.0
    width = T - a
    for lo, hi in zip(knots, knots[1:]):
        if hi - lo <= 0:
            continue
        try:
            val, e = _integrate_piece(phi, lo, hi, tol_abs * (hi - lo) / width)
        except QuadratureError:
            val, e = 0.0 + 0.0j, math.inf
        if e > hi - lo:
            # |exp(2*pi*i*Phi)| = 1, so the piece's measure always bounds it;
            # rescues slivers between near-coincident breakpoints and slow
            # zones whose phase exceeds float resolution
            val, e = 0.0 + 0.0j, hi - lo
        total += val
        err += e
    return total, err


def mu_hat_real(family, window, lam, tol=1e-9):
    """Normalized transform (1/(T-a)) int_a^T cos(2*pi*Phi) dt within tol.

    Phi(t) = sum_i lam_i f_i(e^t); exact rational phase construction, then
    the piecewise oscillatory integrator above.  Raises QuadratureError
    (with the partial estimate attached) if refinement cannot reach tol.
    """
    window = _as_window(window)
    if not (0 < tol <= 1e-3):
        raise ValueError("tol must lie in (0, 1e-3]")
    a0 = compute_a0_real(family)
    if not window.a > a0:
        raise ValueError(f"window start {window.a} must exceed a0 = {a0}")
    lams = [parse_rational(v) for v in lam]
    if all(v == 0 for v in lams):
        return 1.0
    phi = phi_from_frequency(family, lams)
    value, err = osc_integral(phi, window.a, window.T, tol * window.length)
    if err > tol * window.length * 1.5:
        raise QuadratureError("requested tolerance not reached", partial=value, error=err)
    mu = value.real / window.length
    if abs(mu) > 1 + 1e-7 + tol:
        raise ArithmeticError(f"mu_hat left [-1,1]: {mu}")
    return min(1.0, max(-1.0, mu))


def mu_hat_real_with_error(family, window, lam, tol=1e-9):
    """Same as mu_hat_real but returns (value, error_estimate)."""
    window = _as_window(window)
    lams = [parse_rational(v) for v in lam]
    if all(v == 0 for v in lams):
        return 1.0, 0.0
    phi = phi_from_frequency(family, lams)
    value, err = osc_integral(phi, window.a, window.T, tol * window.length)
    return value.real / window.length, err / window.length


# --- interval decompositions -------------------------------------------------


def superlevel_decompose(phi, M, window):
    """{t in [a,T] : |Phi(t)| >= M} as <= 3n intervals with Phi' monotone.

    Exact endpoint machinery: the crossings are roots of g(x) -/+ M and the
    monotonicity cuts are roots of sum c_j j^2 x^j, all Sturm-isolated; the
    membership of each elementary gap is decided by one exact sign test.
    """
    window = _as_window(window)
    g = phi.as_x_poly()
    if g.degree < 1:
        raise ValueError("phase must be nonconstant")
    M = parse_rational(M)
    if M <= 0:
        raise ValueError("level must be positive")
    n = phi.max_index
    xlo = Fraction(math.exp(window.a)) * (1 - Fraction(1, 10**15))
    xhi = Fraction(math.exp(window.T)) * (1 + Fraction(1, 10**15))
    crossing_cuts = []
    for shifted in (g - RationalPoly([M]), g + RationalPoly([M])):
        for left, right in isolate_positive_roots(shifted, xlo, xhi):
            crossing_cuts.append((left + right) / 2)
    second = exp_poly_derivative(phi, 2).as_x_poly()
    curvature_cuts = []
    if second.degree >= 1:
        for left, right in isolate_positive_roots(second, xlo, xhi):
            curvature_cuts.append((left + right) / 2)
    curvature_set = set(curvature_cuts)
    cuts = sorted(set(crossing_cuts) | curvature_set | {xlo, xhi})
    kept = []  # (x_left, x_right) elementary pieces where |g| >= M
    for left, right in zip(cuts, cuts[1:]):
        if right <= xlo or left >= xhi:
            continue
        left, right = max(left, xlo), min(right, xhi)
        if right <= left:
            continue
        mid = (left + right) / 2
        if abs(g(mid)) >= M:
            kept.append((left, right))
    merged = []
    for left, right in kept:
        if merged and merged[-1][1] == left and left not in curvature_set:
            merged[-1] = (merged[-1][0], right)
        else:
            merged.append((left, right))
    intervals = []
    for left, right in merged:
        lo_t = max(window.a, math.log(float(left))) if left > 0 else window.a
        hi_t = min(window.T, math.log(float(right)))
        if hi_t > lo_t:
            intervals.append(WitnessInterval(lo_t, hi_t, 0, float(M), True))
    if len(intervals) > 3 * max(n, 1):
        raise ArithmeticError("superlevel interval count exceeded the 3n cap")
    return IntervalDecomposition(tuple(intervals))


def merge_intervals(sets):
    """Disjoint cover of a union of interval sets, with containment witnesses.

    Input: list of interval unions [(lo, hi), ...].  Output: list of
    (lo, hi, witness) where witness indexes a set containing [lo, hi].
    The sweep prefers extending the previous witness, so adjacent fragments
    covered by the same set fuse; the count is capped by 2 n^4.
    """
    if not sets:
        return []
    endpoints = sorted({float(e) for s in sets for iv in s for e in iv})
    out = []
    for x, y in zip(endpoints, endpoints[1:]):
        if y <= x:
            continue
        mid = 0.5 * (x + y)
        prev_w = out[-1][2] if out else None
        witness = None
        candidates = ([prev_w] if prev_w is not None else []) + list(range(len(sets)))
        for idx in candidates:
            if any(float(lo) <= mid <= float(hi) for lo, hi in sets[idx]):
                witness = idx
                break
        if witness is None:
            continue
        if out and out[-1][1] == x and out[-1][2] == witness:
            out[-1] = (out[-1][0], y, witness)
        else:
            out.append((x, y, witness))
    n = max(len(sets), max((len(s) for s in sets), default=1), 1)
    if len(out) > 2 * n**4:
        raise ArithmeticError("merged interval count exceeded the 2n^4 cap")
    return out


def witness_intervals(phi, k, eta, window):
    """Intervals where |Phi^{(k)}| >= eta, integration-ready for order k.

    Built from the superlevel decomposition of Phi^{(k)}; for k = 1 the
    pieces are additionally cut at the roots of Phi'' so the first-derivative
    oscillation estimate's monotonicity proviso holds.
    """
    window = _as_window(window)
    dec = superlevel_decompose(exp_poly_derivative(phi, k), eta, window)
    cuts = []
    if k == 1:
        second = exp_poly_derivative(phi, 2).as_x_poly()
        if second.degree >= 1:
            xlo = Fraction(math.exp(window.a)) * (1 - Fraction(1, 10**15))
            xhi = Fraction(math.exp(window.T)) * (1 + Fraction(1, 10**15))
            for left, right in isolate_positive_roots(second, xlo, xhi):
                x = float(left + right) / 2
                if x > 0:
                    cuts.append(math.log(x))
    out = []
    for iv in dec.intervals:
        inner = sorted([t for t in cuts if iv.lo < t < iv.hi])
        knots = [iv.lo] + inner + [iv.hi]
        for lo, hi in zip(knots, knots[1:]):
            if hi > lo:
                out.append(WitnessInterval(lo, hi, k, float(eta), True))
    return IntervalDecomposition(tuple(out))


def certified_constant_real(family):
    """The uniform constant C with mu_hat_T(lambda) >= -C/(T-a) for all
    frequencies and all valid windows.

    Low class: on {|Phi| >= 1/4} some |Phi^{(k)}| >= 1/(8Hn) (interpolation
    through the all-ones target); high class: some |Phi^{(k)}| >= eps/(nH')
    (single-coordinate targets plus the submatrix inversion bound).  Each
    surviving interval is charged the worst oscillation bound over k, with
    the phase scaled by 2*pi, and the interval budget kappa = 3n * 2(3n)^4
    composes the two decomposition lemmas.  When L = 0 every frequency is in
    the low class and the high case is vacuous.
    """
    hc = high_freq_constants(family)
    n = family.n
    kappa = 3 * n * 2 * (3 * n) ** 4
    eta_low = math.tau / (8.0 * hc.H * n)
    low_total = kappa * max(vdc_bound(k, eta_low) for k in range(1, n + 1))
    if hc.L == 0.0:
        high = (0, 0.0)
        c_val = low_total
    else:
        eta_high = math.tau * hc.eps / (n * hc.H_prime)
        high_total = kappa * max(vdc_bound(k, eta_high) for k in range(1, n + 1))
        high = (kappa, high_total)
        c_val = max(low_total, high_total)
    return CertifiedBound(C=c_val, breakdown={LOW: (kappa, low_total), HIGH: high}, constants=hc)


def write_profile_csv(path, family, window, lams, tol=1e-6):
    """mu_hat profile rows (lambda components, value, error estimate) as CSV."""
    window = _as_window(window)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"lambda_{i+1}" for i in range(family.m)] + ["value", "error"])
        for lam in lams:
            val, err = mu_hat_real_with_error(family, window, lam, tol)
            writer.writerow([repr(float(v)) for v in lam] + [repr(val), repr(err)])
    return path
