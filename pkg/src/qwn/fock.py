"""Deformed Heisenberg algebras and their graded Fock modules.

Root bosons alpha^a_n (a = 1..N-1) are the stored generators; the N
constrained fundamental bosons h^i_n are always expanded over them via
``h_in_alpha``, which solves

    h^a_n - h^(a+1)_n = alpha^a_n,     sum_i p^(i n) h^i_n = 0

(classical mode: the same with p = 1).  Creation monomials are tuples of
(n, a) sorted by mode descending then component ascending; a Fock state
is a momentum plus a map from monomials to scalars.

Zero modes: alpha^a_0 acts on F_gamma as the scalar gamma^a and the
exponential factors q^(sqrt(beta) h^i_0) act as the scalar
q^(sqrt(beta) h_i . gamma).  For momenta of the lattice form
gamma^a = sqrt(beta) m_a + n_a / sqrt(beta) that scalar is

    t^(sum_{a>=i} m_a) q^(sum_{a>=i} n_a) * C,
    C = (t^-R q^-S)^(1/N),  R = sum a m_a,  S = sum a n_a,

and the i-independent N-th root C is dropped: this rescales the degree-d
current W^d by the constant C^-d, which no kernel, proportionality or
degeneracy statement can see, and keeps every stored scalar inside
Q(s, u).  Generic momenta instead adjoin eigenvalue variables
y_1..y_{N-1} (with y_N = 1/(y_1...y_{N-1})) to the field.

The bilinear (Shapovalov-style) form uses the anti-involution

    omega(alpha^a_n) = p^(n(1-a)) alpha^a_{-n}      (quantum)
    omega(alpha^a_n) = alpha^a_{-n}                 (classical)

with <gamma|gamma> = 1.  The p-twist is forced: the plain flip is not an
anti-automorphism of the quantum relations for N >= 3, while this one is,
and it makes the form symmetric; for a = 1 (all of N = 2) it reduces to
the plain flip.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .coeff import p_pow


# -- A_{N-1} weight-space pairings (exact rationals) --

def cartan(N, a, b):
    if a == b:
        return 2
    return -1 if abs(a - b) == 1 else 0


def inv_cartan(N, a, b):
    return Fraction(min(a, b) * N - a * b, N)


def h_dot_lam(N, i, a):
    """h_i . Lambda_a."""
    return Fraction((N if i <= a else 0) - a, N)


def h_dot_h(N, i, j):
    return Fraction((N if i == j else 0) - 1, N)


class WeightVector:
    """Coefficients over the fundamental-weight basis Lambda_a."""

    __slots__ = ("N", "coeffs")

    def __init__(self, N, coeffs):
        self.N = N
        self.coeffs = tuple(coeffs)
        if len(self.coeffs) != N - 1:
            raise ValueError("need N-1 fundamental-weight components")

    def __repr__(self):
        return "WeightVector(N=%d, %s)" % (self.N, list(self.coeffs))

    def __add__(self, other):
        return WeightVector(self.N, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return WeightVector(self.N, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __eq__(self, other):
        return self.N == other.N and all(
            not (a - b) for a, b in zip(self.coeffs, other.coeffs))

    def dot(self, other):
        """gamma . gamma' through Lambda_a . Lambda_b = (A^-1)_{ab}."""
        out = None
        for a, ca in enumerate(self.coeffs, 1):
            for b, cb in enumerate(other.coeffs, 1):
                term = ca * cb * inv_cartan(self.N, a, b)
                out = term if out is None else out + term
        return out

    def dot_h(self, i):
        """gamma . h_i."""
        out = None
        for a, ca in enumerate(self.coeffs, 1):
            term = ca * h_dot_lam(self.N, i, a)
            out = term if out is None else out + term
        return out

    def dot_alpha(self, a):
        return self.coeffs[a - 1]


def rho_dot(N, vec):
    """rho . gamma with rho = sum_a Lambda_a."""
    out = None
    for a, ca in enumerate(vec.coeffs, 1):
        term = ca * inv_cartan_row_sum(N, a)
        out = term if out is None else out + term
    return out


@lru_cache(maxsize=None)
def inv_cartan_row_sum(N, a):
    return sum(inv_cartan(N, a, b) for b in range(1, N))


class BosonAlgebra:
    """Rank-N root-boson algebra, classical or quantum, over a CoeffField."""

    def __init__(self, N, mode, ctx):
        if mode not in ("classical", "quantum"):
            raise ValueError("mode must be 'classical' or 'quantum'")
        self.N = N
        self.mode = mode
        self.ctx = ctx
        self._K = {}
        self._M = {}

    def __repr__(self):
        return "BosonAlgebra(N=%d, %s)" % (self.N, self.mode)

    def K(self, a, b, n):
        """[alpha^a_n, alpha^b_{-n}]."""
        if n == 0:
            raise ValueError("zero modes act through the momentum")
        key = (a, b, n)
        got = self._K.get(key)
        if got is None:
            got = self._K[key] = self._commutator(a, b, n)
        return got

    def _commutator(self, a, b, n):
        ctx = self.ctx
        if abs(a - b) > 1:
            return ctx.ff_zero
        if self.mode == "classical":
            return ctx.ff(Fraction(cartan(self.N, a, b) * n))
        xn = (p_q(ctx, n) - p_q(ctx, -n)) * (p_t(ctx, n) - p_t(ctx, -n))
        if a == b:
            fac = p_pow(ctx, n, 2) + p_pow(ctx, -n, 2)
        else:
            fac = -p_pow(ctx, n if b > a else -n, 2)
        return xn * fac * Fraction(1, n)

    def h_in_alpha(self, i, n):
        """Coefficients M with h^i_n = sum_a M[a-1] alpha^a_n."""
        if n == 0:
            raise ValueError("h^i_0 has no root-boson expansion")
        key = (i, n)
        got = self._M.get(key)
        if got is None:
            got = self._M[key] = self._solve_h(i, n)
        return got

    def _solve_h(self, i, n):
        ctx, N = self.ctx, self.N
        out = []
        if self.mode == "classical":
            for a in range(1, N):
                out.append(ctx.ff(h_dot_lam(N, i, a)))
            return out
        tot = ctx.ff_zero
        for k in range(1, N + 1):
            tot = tot + p_pow(ctx, k * n)
        tot_inv = tot.inv()
        for a in range(1, N):
            tail = ctx.ff_zero
            for k in range(a + 1, N + 1):
                tail = tail + p_pow(ctx, k * n)
            m = tail * tot_inv
            if a < i:
                m = m - 1
            out.append(m)
        return out


def p_q(ctx, n):
    """q^(n/2) = s^n."""
    exps = [0] * len(ctx.names)
    exps[ctx.names.index("s")] = n
    return ctx.monomial(exps)


def p_t(ctx, n):
    """t^(n/2) = u^n."""
    exps = [0] * len(ctx.names)
    exps[ctx.names.index("u")] = n
    return ctx.monomial(exps)


# -- momenta --

class GenericMomentum:
    """Symbolic momentum: zero-mode eigenvalues are field variables y_a."""

    def __init__(self, N, ctx):
        self.N = N
        self.ctx = ctx
        self._y = [ctx.names.index("y%d" % a) for a in range(1, N)]

    def zero_mode_eig(self, evec, ctx=None):
        """Eigenvalue of prod_i q^(sqrt(beta) h^i_0)^(e_i) on |gamma>."""
        exps = [0] * len(self.ctx.names)
        ylast = evec[self.N - 1]
        for a in range(self.N - 1):
            exps[self._y[a]] = evec[a] - ylast
        return self.ctx.monomial(exps)

    def key(self):
        return ("generic", self.N)


class ExpMomentum:
    """gamma = sum_a (sqrt(beta) m_a + n_a / sqrt(beta)) Lambda_a, integer m, n.

    Quantum zero-mode eigenvalues are materialized with the common N-th
    root factor dropped (see module docstring).
    """

    def __init__(self, N, mvec, nvec):
        self.N = N
        self.m = tuple(mvec)
        self.n = tuple(nvec)
        if len(self.m) != N - 1 or len(self.n) != N - 1:
            raise ValueError("need N-1 components")

    def __repr__(self):
        return "ExpMomentum(N=%d, m=%s, n=%s)" % (self.N, self.m, self.n)

    def zero_mode_eig(self, evec, ctx=None):
        # reduced: Yhat_i = t^(sum_{a>=i} m_a) q^(sum_{a>=i} n_a)
        su = 0
        ss = 0
        for i in range(1, self.N + 1):
            e = evec[i - 1]
            if e:
                su += e * sum(self.m[i - 1:])
                ss += e * sum(self.n[i - 1:])
        exps = [0] * len(ctx.names)
        exps[ctx.names.index("s")] = 2 * ss
        exps[ctx.names.index("u")] = 2 * su
        return ctx.monomial(exps)

    def dropped_root(self):
        """(R, S) with the dropped factor C = (t^-R q^-S)^(1/N) per zm degree."""
        R = sum(a * m for a, m in enumerate(self.m, 1))
        S = sum(a * n for a, n in enumerate(self.n, 1))
        return R, S

    def exact_y(self, ctx):
        """Exact eigenvalues Y_i = q^(sqrt(beta) h_i . gamma) when materializable."""
        R, S = self.dropped_root()
        out = []
        for i in range(1, self.N + 1):
            es = Fraction(2) * (sum(self.n[i - 1:]) - Fraction(S, self.N))
            eu = Fraction(2) * (sum(self.m[i - 1:]) - Fraction(R, self.N))
            if es.denominator != 1 or eu.denominator != 1:
                raise ValueError("eigenvalue needs a %d-th root of q or t" % self.N)
            exps = [0] * len(ctx.names)
            exps[ctx.names.index("s")] = int(es)
            exps[ctx.names.index("u")] = int(eu)
            out.append(ctx.monomial(exps))
        return out

    def weight_vector(self, ctx):
        """gamma over Q(b): components b m_a + n_a / b."""
        b = ctx.gen("b")
        return WeightVector(self.N, [b * m + ctx.from_fraction(n) / b
                                     for m, n in zip(self.m, self.n)])

    def key(self):
        return ("exp", self.N, self.m, self.n)


class FieldMomentum:
    """Classical momentum with explicit field-valued components gamma^a."""

    def __init__(self, N, values):
        self.N = N
        self.values = tuple(values)

    def alpha0(self, a):
        return self.values[a - 1]

    def h_dot_gamma(self, i, ctx):
        out = ctx.ff_zero
        for a, g in enumerate(self.values, 1):
            out = out + ctx.ff(g) * h_dot_lam(self.N, i, a)
        return out

    def dot_self(self, ctx):
        out = ctx.ff_zero
        for a, ga in enumerate(self.values, 1):
            for b, gb in enumerate(self.values, 1):
                out = out + ctx.ff(ga) * gb * inv_cartan(self.N, a, b)
        return out

    def rho_dot_gamma(self, ctx):
        out = ctx.ff_zero
        for a, g in enumerate(self.values, 1):
            out = out + ctx.ff(g) * inv_cartan_row_sum(self.N, a)
        return out

    def key(self):
        return ("field", self.N, tuple(str(v) for v in self.values))


# -- graded Fock slices --

@lru_cache(maxsize=None)
def basis_at_level(N, level):
    """Creation monomials of total mode = level, deterministically ordered.

    A monomial is a tuple of (n, a); slots sorted by mode descending then
    component ascending.
    """
    if level < 0:
        return ()
    out = []

    def rec(remaining, max_n, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for n in range(min(remaining, max_n), 0, -1):
            for a in range(1, N):
                if prefix and prefix[-1][0] == n and prefix[-1][1] > a:
                    continue
                rec(remaining - n, n, prefix + [(n, a)])

    rec(level, level, [])
    return tuple(out)


def level_dim(N, level):
    return len(basis_at_level(N, level))


def monomial_insert(mon, n, a):
    """Insert a creation slot keeping the canonical order."""
    out = list(mon)
    i = 0
    while i < len(out) and (-out[i][0], out[i][1]) <= (-n, a):
        i += 1
    out.insert(i, (n, a))
    return tuple(out)


class FockState:
    """Momentum plus a finite combination of creation monomials."""

    __slots__ = ("momentum", "terms")

    def __init__(self, momentum, terms):
        self.momentum = momentum
        self.terms = {m: c for m, c in terms.items() if c}

    @classmethod
    def vacuum(cls, momentum, ctx):
        return cls(momentum, {(): ctx.ff_one})

    def level(self):
        levels = {sum(n for n, _ in m) for m in self.terms}
        if len(levels) > 1:
            raise ValueError("state is not graded: levels %s" % levels)
        return levels.pop() if levels else 0

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            out[m] = c if v is None else v + c
        return FockState(self.momentum, out)

    def scale(self, c):
        return FockState(self.momentum, {m: v * c for m, v in self.terms.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        return "FockState(%s)" % (self.terms,)


def act_lowering(algebra, a, n, terms):
    """alpha^a_n (n > 0) applied to a monomial->scalar map; pure contraction."""
    if n <= 0:
        raise ValueError("act_lowering needs n > 0")
    out = {}
    for mon, c in terms.items():
        seen = set()
        for i, (m, b) in enumerate(mon):
            if m != n or (m, b) in seen:
                continue
            seen.add((m, b))
            k = algebra.K(a, b, n)
            if k.is_zero():
                continue
            mult = sum(1 for s in mon if s == (m, b))
            rest = mon[:i] + mon[i + 1:]
            v = c * k * mult
            got = out.get(rest)
            out[rest] = v if got is None else got + v
    return {m: c for m, c in out.items() if c}


def act_lowering_state(algebra, a, n, state):
    return FockState(state.momentum, act_lowering(algebra, a, n, state.terms))


def shapovalov(algebra, bra, ket):
    """Bilinear form with omega(alpha^a_n) = p^(n(1-a)) alpha^a_{-n} (quantum).

    Zero unless levels and momenta agree; <gamma|gamma> = 1.
    """
    ctx = algebra.ctx
    if bra.momentum.key() != ket.momentum.key():
        return ctx.ff_zero
    out = ctx.ff_zero
    for bmon, bc in bra.terms.items():
        twist = ctx.ff_one
        if algebra.mode == "quantum":
            for n, a in bmon:
                if a != 1:
                    twist = twist * p_pow(ctx, n * (a - 1))
        cur = dict(ket.terms)
        # apply the lowered bra slots, smallest mode first (any order works)
        for n, a in sorted(bmon):
            cur = act_lowering(algebra, a, n, cur)
            if not cur:
                break
        val = cur.get((), None)
        if val is not None:
            out = out + bc * twist * val
    return out
