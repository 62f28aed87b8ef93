"""Vertex factors, (q-)Miura currents, and mode actions on Fock slices.

Quantum currents are sums of normal-ordered exponentials

    V = pref * :exp(sum cre[(n,a)] alpha^a_{-n} z^n)
               exp(sum ann[(n,a)] alpha^a_n z^{-n}): * (zero mode)

where argument shifts p^c z are pre-folded into the coefficients
(cre *= p^(cn), ann *= p^(-cn)), so z never appears symbolically.  The
degree-i current of the deformed Miura transformation is

    W^i(z) = sum over subsets j_1 < ... < j_i of
             :Lambda_{j_1}(p^((i-1)/2) z) ... Lambda_{j_i}(p^(-(i-1)/2) z):

with Lambda_j the exponentiated fundamental boson carrying zero mode
q^(sqrt(beta) h^j_0) p^((N+1)/2 - j).  Modes W^i_k (coefficient of
z^{-k}) act on a graded slice by a finite sum: annihilation multisets of
weight D <= level, creation multisets of weight D - k.

The classical side expands fields over root bosons: a ``PhiField`` is a
combination of normal-ordered monomials prod d^(m_j) phi^(a_j)(z), and
the classical Miura product is collected into powers of (alpha_0 d/dz)
by the standard derivative-transfer recursion.  Mode conventions:
a monomial of total derivative order k contributes to z^(-n-k) at mode n,
so the spin-k current W^k(z) = sum W^k_n z^(-n-k) needs no extra offsets.

Everything is generic over the scalar domain so the classical-limit
module can run the same engines with truncated-series scalars.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .coeff import FracDomain, Series, frac_map, p_pow
from .fock import (act_lowering, basis_at_level, cartan, h_dot_lam, inv_cartan,
                   inv_cartan_row_sum, monomial_insert)


# -- quantum vertex factors --

class VertexFactor:
    """Normal-ordered exponential of root-boson modes with a zero-mode tag.

    ``zm`` is an integer vector e over the fundamental bosons: the factor
    carries prod_i q^(sqrt(beta) h^i_0)^(e_i), evaluated on the module's
    momentum.  ``zm=None`` means the prefactor already contains any
    zero-mode action (used by the classical-limit engine).
    """

    __slots__ = ("ctx", "cre", "ann", "zm", "pref")

    def __init__(self, ctx, cre, ann, zm, pref):
        self.ctx = ctx
        self.cre = {k: v for k, v in cre.items() if v}
        self.ann = {k: v for k, v in ann.items() if v}
        self.zm = zm
        self.pref = pref

    def merged(self, other):
        """Normal-ordered product (coefficients add, zero modes compose)."""
        cre = dict(self.cre)
        for k, v in other.cre.items():
            got = cre.get(k)
            cre[k] = v if got is None else got + v
        ann = dict(self.ann)
        for k, v in other.ann.items():
            got = ann.get(k)
            ann[k] = v if got is None else got + v
        if (self.zm is None) != (other.zm is None):
            raise ValueError("cannot merge tagged and untagged zero modes")
        zm = None if self.zm is None else tuple(x + y for x, y in zip(self.zm, other.zm))
        return VertexFactor(self.ctx, cre, ann, zm, self.pref * other.pref)


def lambda_factor(algebra, i, shift=Fraction(0), max_mode=24):
    """Lambda_i(p^shift z) over the root bosons, modes up to ``max_mode``."""
    ctx = algebra.ctx
    N = algebra.N
    cre, ann = {}, {}
    for n in range(1, max_mode + 1):
        up = p_pow(ctx, 2 * shift * n, 2)
        dn = p_pow(ctx, -2 * shift * n, 2)
        Mc = algebra.h_in_alpha(i, -n)
        Ma = algebra.h_in_alpha(i, n)
        for a in range(1, N):
            c = Mc[a - 1] * up
            if not c.is_zero():
                cre[(n, a)] = c
            c = Ma[a - 1] * dn
            if not c.is_zero():
                ann[(n, a)] = c
    zm = tuple(1 if j == i else 0 for j in range(1, N + 1))
    pref = p_pow(ctx, N + 1 - 2 * i, 2)
    return VertexFactor(ctx, cre, ann, zm, pref)


def qmiura_current(algebra, i, max_mode=24):
    """The degree-i deformed Miura current as a list of vertex factors."""
    N = algebra.N
    if not 1 <= i <= N - 1:
        raise ValueError("currents are indexed 1..N-1")
    out = []
    for subset in itertools.combinations(range(1, N + 1), i):
        fac = None
        for k, j in enumerate(subset, 1):
            shift = Fraction(i + 1 - 2 * k, 2)
            lf = lambda_factor(algebra, j, shift, max_mode)
            fac = lf if fac is None else fac.merged(lf)
        out.append(fac)
    return out


def contraction(algebra, A, B, order):
    """Scalar series C(w/z) with A(z) B(w) = C(w/z) :A(z) B(w):."""
    ctx = algebra.ctx
    from .coeff import FFDomain
    dom = FFDomain(ctx)
    coeffs = [ctx.ff_zero] * (order + 1)
    for n in range(1, order + 1):
        acc = ctx.ff_zero
        for a in range(1, algebra.N):
            ca = A.ann.get((n, a))
            if ca is None:
                continue
            for b in range(1, algebra.N):
                cb = B.cre.get((n, b))
                if cb is None:
                    continue
                k = algebra.K(a, b, n)
                if not k.is_zero():
                    acc = acc + ca * k * cb
        coeffs[n] = acc
    return Series(dom, coeffs, order).exp()


@lru_cache(maxsize=None)
def _multisets(N, weight):
    """Creation-monomial multisets of a given weight with 1/symmetry factors."""
    out = []
    for mon in basis_at_level(N, weight):
        sym = Fraction(1)
        mult = {}
        for slot in mon:
            mult[slot] = mult.get(slot, 0) + 1
        for m in mult.values():
            for k in range(1, m + 1):
                sym /= k
        out.append((mon, sym))
    return tuple(out)


class ModeEngine:
    """Cached mode actions of the Miura currents on one Fock module."""

    def __init__(self, algebra, momentum):
        self.algebra = algebra
        self.momentum = momentum
        self.ctx = algebra.ctx
        self._currents = {}
        self._actions = {}
        self._ann_cache = {}

    def current(self, i):
        got = self._currents.get(i)
        if got is None:
            got = self._currents[i] = qmiura_current(self.algebra, i)
        return got

    def _ann_expand(self, fac_key, fac, vmon):
        """exp(annihilation part) |vmon>: dict weight -> {monomial: scalar}."""
        key = (fac_key, vmon)
        got = self._ann_cache.get(key)
        if got is not None:
            return got
        level = sum(n for n, _ in vmon)
        out = {0: {vmon: self.ctx.ff_one}}
        N = self.algebra.N
        for D in range(1, level + 1):
            acc = {}
            for mset, sym in _multisets(N, D):
                c = self.ctx.ff_one
                ok = True
                for n, a in mset:
                    v = fac.ann.get((n, a))
                    if v is None:
                        ok = False
                        break
                    c = c * v
                if not ok:
                    continue
                cur = {vmon: c * sym}
                for n, a in sorted(mset):
                    cur = act_lowering(self.algebra, a, n, cur)
                    if not cur:
                        break
                for mon, val in cur.items():
                    gotv = acc.get(mon)
                    acc[mon] = val if gotv is None else gotv + val
            acc = {m: v for m, v in acc.items() if v}
            if acc:
                out[D] = acc
        self._ann_cache[key] = out
        return out

    def action(self, i, k, level):
        """Action of W^i_k on the level slice: {vmon: {outmon: scalar}}.

        i = 0 or N is the unit current; i outside 0..N gives zero.
        """
        key = (i, k, level)
        got = self._actions.get(key)
        if got is not None:
            return got
        N = self.algebra.N
        out = {}
        if i == 0 or i == N:
            if k == 0:
                for vmon in basis_at_level(N, level):
                    out[vmon] = {vmon: self.ctx.ff_one}
        elif 1 <= i <= N - 1 and level - k >= 0:
            for vmon in basis_at_level(N, level):
                acc = {}
                for fi, fac in enumerate(self.current(i)):
                    zscal = fac.pref
                    if fac.zm is not None:
                        zscal = zscal * self.momentum.zero_mode_eig(fac.zm, ctx=self.ctx)
                    expand = self._ann_expand((i, fi), fac, vmon)
                    for D, res in expand.items():
                        R = D - k
                        if R < 0:
                            continue
                        for mset, sym in _multisets(N, R):
                            c = self.ctx.ff_one
                            ok = True
                            for n, a in mset:
                                v = fac.cre.get((n, a))
                                if v is None:
                                    ok = False
                                    break
                                c = c * v
                            if not ok:
                                continue
                            c = c * sym * zscal
                            for mon, val in res.items():
                                outmon = mon
                                for n, a in mset:
                                    outmon = monomial_insert(outmon, n, a)
                                v2 = val * c
                                gotv = acc.get(outmon)
                                acc[outmon] = v2 if gotv is None else gotv + v2
                out[vmon] = {m: v for m, v in acc.items() if v}
        self._actions[key] = out
        return out

    def apply(self, i, k, state):
        """W^i_k applied to a graded FockState (returns monomial map)."""
        if not state:
            return {}
        level = sum(n for n, _ in next(iter(state)))
        act = self.action(i, k, level)
        out = {}
        for vmon, c in state.items():
            for outmon, val in act.get(vmon, {}).items():
                v = val * c
                got = out.get(outmon)
                out[outmon] = v if got is None else got + v
        return {m: v for m, v in out.items() if v}

    def matrix(self, i, k, level):
        """Mode matrix as {(row_index, col_index): scalar} over the level bases."""
        N = self.algebra.N
        src = basis_at_level(N, level)
        tgt = basis_at_level(N, level - k)
        tidx = {m: r for r, m in enumerate(tgt)}
        act = self.action(i, k, level)
        out = {}
        for c, vmon in enumerate(src):
            for outmon, val in act.get(vmon, {}).items():
                out[(tidx[outmon], c)] = val
        return out, len(tgt), len(src)


# -- structure functions --

def structure_function(ctx, N, i, j, L):
    """Coefficients f^{ij}_l, l = 0..L, as a Series over canonical elements.

    Defined for 1 <= i, j <= N; indices N (the unit current) give the
    constant series 1.  f^{ij}_0 = 1 and f^{ij} = f^{ji} = f^{N-i,N-j}.
    """
    if not (1 <= i <= N and 1 <= j <= N):
        raise ValueError("structure function indices out of range")
    dom = FracDomain(ctx)
    lo, hi = min(i, j), max(i, j)
    s, u = ctx.gen("s"), ctx.gen("u")
    coeffs = [ctx.zero] * (L + 1)
    for n in range(1, L + 1):
        if N == hi:
            continue
        X = (s ** n - s ** -n) * (u ** n - u ** -n)
        ph = (s / u) ** n
        num1 = ph ** lo - ph ** -lo
        num2 = ph ** (N - hi) - ph ** -(N - hi)
        den1 = ph - 1 / ph
        den2 = ph ** N - ph ** -N
        coeffs[n] = -Fraction(1, n) * X * num1 * num2 / (den1 * den2)
    return Series(dom, coeffs, L).exp()


def structure_function_ff(ctx, N, i, j, L):
    """Same series with FFrac coefficients (for matrix accumulation)."""
    ser = structure_function(ctx, N, i, j, L)
    return [ctx.ff(c) for c in ser.coeffs]


# -- classical fields over root bosons --

class PhiField:
    """Combination of normal-ordered monomials prod d^(m_j) phi^(a_j)(z).

    Monomial keys are sorted tuples of (m, a), m >= 1; the empty tuple is
    the identity field.  Products never contract (free normal ordering).
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms):
        self.ctx = ctx
        self.terms = {m: c for m, c in terms.items() if c}

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, {})

    @classmethod
    def one(cls, ctx):
        return cls(ctx, {(): ctx.ff_one})

    @classmethod
    def d_phi(cls, ctx, a, order=1, coeff=None):
        c = ctx.ff_one if coeff is None else coeff
        return cls(ctx, {((order, a),): c})

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            got = out.get(m)
            out[m] = c if got is None else got + c
        return PhiField(self.ctx, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return PhiField(self.ctx, {m: v * c for m, v in self.terms.items()})

    def nprod(self, other):
        """Normal-ordered product."""
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mon = tuple(sorted(m1 + m2))
                v = c1 * c2
                got = out.get(mon)
                out[mon] = v if got is None else got + v
        return PhiField(self.ctx, out)

    def deriv(self):
        """d/dz by Leibniz over slots."""
        out = {}
        for mon, c in self.terms.items():
            for i, (m, a) in enumerate(mon):
                nm = tuple(sorted(mon[:i] + ((m + 1, a),) + mon[i + 1:]))
                got = out.get(nm)
                out[nm] = c if got is None else got + c
        return PhiField(self.ctx, out)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (self - other).is_zero()

    def __repr__(self):
        return "PhiField(%s)" % (self.terms,)


def alpha0(ctx):
    """alpha_0 = b - 1/b."""
    b = ctx.names.index("b")
    up = [0] * len(ctx.names)
    dn = [0] * len(ctx.names)
    up[b], dn[b] = 1, -1
    return ctx.monomial(up) - ctx.monomial(dn)


def dh_field(algebra, i):
    """d h^i(z) expanded over root bosons (classical coefficients)."""
    ctx = algebra.ctx
    out = PhiField.zero(ctx)
    for a in range(1, algebra.N):
        out = out + PhiField.d_phi(ctx, a, 1, ctx.ff(h_dot_lam(algebra.N, i, a)))
    return out


def classical_miura_currents(algebra):
    """Fields W^0..W^N from :prod_i (alpha_0 d + d h^i(z)): collected in (alpha_0 d)^j.

    Recursion: appending a factor sends the coefficient of (alpha_0 d)^j to

        V_j  ->  V_{j-1}  +  sum_{r>=0} C(j+r, r) alpha_0^r :V_{j+r} d^r v:.
    """
    ctx = algebra.ctx
    N = algebra.N
    a0 = alpha0(ctx)
    V = {1: PhiField.one(ctx), 0: dh_field(algebra, 1)}
    for k in range(2, N + 1):
        v = dh_field(algebra, k)
        derivs = {0: v}
        nxt = {}
        for i in range(0, k + 1):
            acc = V.get(i - 1, PhiField.zero(ctx))
            r = 0
            a0r = ctx.ff_one
            binom = Fraction(1)
            while i + r <= k - 1:
                Vj = V.get(i + r)
                if Vj is not None and not Vj.is_zero():
                    if r not in derivs:
                        derivs[r] = derivs[r - 1].deriv()
                    acc = acc + Vj.nprod(derivs[r]).scale(a0r * binom)
                elif r not in derivs:
                    derivs[r] = derivs[r - 1].deriv()
                r += 1
                a0r = a0r * a0
                binom = binom * Fraction(i + r, r)
            nxt[i] = acc
        V = nxt
    return [V.get(N - k, PhiField.zero(ctx)) for k in range(N + 1)]


def virasoro_field(algebra):
    """L(z) = 1/2 :d phi . d phi: + alpha_0 rho . d^2 phi, directly."""
    ctx = algebra.ctx
    N = algebra.N
    out = PhiField.zero(ctx)
    for a in range(1, N):
        for b in range(1, N):
            c = ctx.ff(Fraction(1, 2) * inv_cartan(N, a, b))
            out = out + PhiField(ctx, {tuple(sorted(((1, a), (1, b)))): c})
    a0 = alpha0(ctx)
    for b in range(1, N):
        out = out + PhiField.d_phi(ctx, b, 2, a0 * inv_cartan_row_sum(N, b))
    return out


def _dcoeff(m, n):
    """Coefficient of h_n z^(-n-m) in d^m phi: prod_{j=1}^{m-1} (-n-j)."""
    c = Fraction(1)
    for j in range(1, m):
        c *= -n - j
    return c


class ClassicalEngine:
    """Cached mode actions of classical fields on one Fock module."""

    def __init__(self, algebra, momentum):
        self.algebra = algebra
        self.momentum = momentum
        self.ctx = algebra.ctx
        self._actions = {}

    def action(self, field, field_key, n, level):
        """Action of the mode (coefficient of z^(-n-k), k = derivative order)."""
        key = (field_key, n, level)
        got = self._actions.get(key)
        if got is not None:
            return got
        out = {}
        for vmon in basis_at_level(self.algebra.N, level):
            acc = {}
            self._apply_monomials(field, n, vmon, acc)
            out[vmon] = {m: v for m, v in acc.items() if v}
        self._actions[key] = out
        return out

    def _apply_monomials(self, field, n, vmon, acc):
        level = sum(x for x, _ in vmon)
        for mon, coeff in field.terms.items():
            if not mon:
                if n == 0:
                    got = acc.get(vmon)
                    acc[vmon] = coeff if got is None else got + coeff
                continue
            r = len(mon)
            # ordered assignments (n_1..n_r), sum = n; positives bounded by
            # the level, so n_j >= n - (r-1)*level
            lo = n - (r - 1) * level
            for assign in self._assignments(mon, n, lo, level):
                c = Fraction(1)
                for (m, _a), nj in zip(mon, assign):
                    c *= _dcoeff(m, nj)
                    if not c:
                        break
                if not c:
                    continue
                # normal-ordered application: annihilators, then zero modes,
                # then creations appended (no cross contraction)
                cur = {vmon: coeff * c}
                for (m, a), nj in zip(mon, assign):
                    if nj > 0:
                        cur = act_lowering(self.algebra, a, nj, cur)
                        if not cur:
                            break
                if not cur:
                    continue
                scal = None
                negs = []
                for (m, a), nj in zip(mon, assign):
                    if nj == 0:
                        g = self.momentum.alpha0(a)
                        scal = g if scal is None else scal * g
                    elif nj < 0:
                        negs.append((-nj, a))
                for mon2, val in cur.items():
                    if scal is not None:
                        val = val * scal
                    for nn, aa in negs:
                        mon2 = monomial_insert(mon2, nn, aa)
                    got = acc.get(mon2)
                    acc[mon2] = val if got is None else got + val

    @staticmethod
    def _assignments(mon, total, lo, hi):
        """All ordered integer tuples over the slots with the given sum."""
        r = len(mon)

        def rec(idx, remaining):
            if idx == r - 1:
                if lo <= remaining <= hi:
                    yield (remaining,)
                return
            for nj in range(hi, lo - 1, -1):
                for rest in rec(idx + 1, remaining - nj):
                    yield (nj,) + rest

        return rec(0, total)

    def apply(self, field, field_key, n, state):
        if not state:
            return {}
        level = sum(x for x, _ in next(iter(state)))
        act = self.action(field, field_key, n, level)
        out = {}
        for vmon, c in state.items():
            for outmon, val in act.get(vmon, {}).items():
                v = val * c
                got = out.get(outmon)
                out[outmon] = v if got is None else got + v
        return {m: v for m, v in out.items() if v}


# -- involutions --

_INVOLUTIONS = ("theta", "omega", "omegap")


def involution_images(ctx, which):
    """Generator images for theta (q,t -> inverses), omega (q <-> t), omegap."""
    if which not in _INVOLUTIONS:
        raise ValueError("unknown involution %r" % which)
    s, u = ctx.gen("s"), ctx.gen("u")
    table = {"theta": (1 / s, 1 / u), "omega": (u, s), "omegap": (1 / u, 1 / s)}
    img_s, img_u = table[which]
    out = []
    for name in ctx.names:
        if name == "s":
            out.append(img_s)
        elif name == "u":
            out.append(img_u)
        else:
            out.append(ctx.gen(name))
    return out


def apply_involution_scalar(ctx, which, el):
    return frac_map(el, involution_images(ctx, which), ctx)


def momentum_involution(which, mom):
    """Image of an ExpMomentum under an involution (lattice data transform)."""
    from .fock import ExpMomentum
    N = mom.N
    if which == "omegap":
        # gamma -> -gamma with beta -> 1/beta: (m, n) -> (-n, -m)
        return ExpMomentum(N, tuple(-x for x in mom.n), tuple(-x for x in mom.m))
    if which == "theta":
        # alpha^a_0 -> alpha^{N-a}_0, beta fixed
        return ExpMomentum(N, tuple(reversed(mom.m)), tuple(reversed(mom.n)))
    if which == "omega":
        # alpha^a_0 -> -alpha^{N-a}_0, beta -> 1/beta
        return ExpMomentum(N, tuple(-x for x in reversed(mom.n)),
                           tuple(-x for x in reversed(mom.m)))
    raise ValueError("unknown involution %r" % which)
