"""Verification of the quadratic q-W_N relations and the classical algebra.

The defining relation pairs the currents through structure functions:

    f^{ij}(w/z) W^i(z) W^j(w) - W^j(w) W^i(z) f^{ji}(z/w)
        = (delta-function right-hand sides),

and is checked here in mode form: the coefficient of z^(-n) w^(-m) of
both sides is evaluated as an exact operator on a graded Fock slice.
On a level-d slice the structure-function sums truncate on their own
(modes beyond the grading kill every state), so both sides are finite
matrices and the check is exact, with fully symbolic q, t and symbolic
zero-mode eigenvalues (generic momentum).

Right-hand sides exist in printed closed form for the pairs (1, j) and
(2, j) and reduce correctly at the boundaries through W^0 = W^N = 1 and
W^i = 0 for i > N; other pairs are reported as uncovered rather than
guessed.  A delta-function term delta(p^a w/z) G(p^c w) contributes
p^(a n) p^(-c (n+m)) G_{n+m} to the (n, m) mode; normal-ordered pairs
follow their own mode expansion (``normal_ordered_pair``).

The classical checks run the Miura currents on classical Fock modules:
the Virasoro bracket with central charge c = N - 1 - 12 alpha_0^2 rho^2,
rho^2 = N(N^2-1)/12, and Kac-type Gram matrices of W-descendants whose
determinant detects singular momenta.
"""

from __future__ import annotations

from fractions import Fraction

from . import coeff, currents, fock
from .coeff import p_pow
from .currents import ModeEngine, structure_function_ff
from .fock import BosonAlgebra, GenericMomentum, basis_at_level


class RelationInstance:
    """Result record for one (N, i, j, n, m) mode check on a level window."""

    def __init__(self, N, i, j, n, m, level, ok, first_bad=None):
        self.N, self.i, self.j = N, i, j
        self.n, self.m = n, m
        self.level = level
        self.ok = ok
        self.first_bad = first_bad

    def to_json(self):
        out = {"N": self.N, "i": self.i, "j": self.j, "n": self.n, "m": self.m,
               "level": self.level, "ok": self.ok}
        if self.first_bad is not None:
            d, vmon, outmon, val = self.first_bad
            out["first_bad"] = {"source_level": d, "in": list(vmon),
                                "out": list(outmon), "residual": coeff.scalar_str(val)}
        return out


_ENGINES = {}


def engine_for(N, momentum=None, ctx=None):
    """Shared quantum ModeEngine per (N, momentum); default generic momentum."""
    if momentum is None:
        if ctx is None:
            ctx = coeff.qt_field(tuple("y%d" % a for a in range(1, N)))
        momentum = GenericMomentum(N, ctx)
    elif ctx is None:
        ctx = coeff.qt_field()
    key = (N, momentum.key(), id(ctx))
    got = _ENGINES.get(key)
    if got is None:
        algebra = BosonAlgebra(N, "quantum", ctx)
        got = _ENGINES[key] = ModeEngine(algebra, momentum)
    return got


def _accumulate(dst, src, scale):
    for mon, v in src.items():
        val = v * scale
        got = dst.get(mon)
        dst[mon] = val if got is None else got + val


def lhs_action(engine, N, i, j, n, m, state, fcache):
    """LHS modes applied to a monomial map at one level."""
    if not state:
        return {}
    level = sum(x for x, _ in next(iter(state)))
    need = max(level - m, level - n, 0)
    fij = fcache(i, j, need)
    fji = fcache(j, i, need)
    out = {}
    for l in range(0, level - m + 1):
        if fij[l].is_zero():
            continue
        mid = engine.apply(j, m + l, state)
        if mid:
            res = engine.apply(i, n - l, mid)
            _accumulate(out, res, fij[l])
    for l in range(0, level - n + 1):
        if fji[l].is_zero():
            continue
        mid = engine.apply(i, n + l, state)
        if mid:
            res = engine.apply(j, m - l, mid)
            _accumulate(out, res, -fji[l])
    return {k: v for k, v in out.items() if v}


def _cfac(ctx):
    """-(1-q)(1-1/t)/(1-p) as an FFrac."""
    s, u = ctx.gen("s"), ctx.gen("u")
    q, t = s * s, u * u
    p = q / t
    return ctx.ff(-(1 - q) * (1 - 1 / t) / (1 - p))


def normal_ordered_pair(engine, i, j, r_exp, n, state, fcache):
    """Modes of the normal-ordered product with relative shift r = p^(r_exp).

    P_n = sum_{m>=0} sum_{l<=m} f^{ij}_l ( r^(m-l) W^i_{-m} W^j_{n+m}
                                         + r^(l-m-1) W^j_{n-m-1} W^i_{m+1} ),
    truncated by the grading of the source state.
    """
    if not state:
        return {}
    ctx = engine.ctx
    level = sum(x for x, _ in next(iter(state)))
    mmax = max(level - n, level - 1)
    f = fcache(i, j, max(mmax, 0) + 1)
    out = {}
    for mm in range(0, mmax + 1):
        first = engine.apply(j, n + mm, state) if n + mm <= level else {}
        if first:
            first = engine.apply(i, -mm, first)
        second = engine.apply(i, mm + 1, state) if mm + 1 <= level else {}
        if second:
            second = engine.apply(j, n - mm - 1, second)
        if not first and not second:
            continue
        for l in range(0, mm + 1):
            fl = f[l]
            if fl.is_zero():
                continue
            if first:
                _accumulate(out, first, fl * p_pow(ctx, 2 * r_exp * (mm - l), 2))
            if second:
                _accumulate(out, second, fl * p_pow(ctx, 2 * r_exp * (l - mm - 1), 2))
    return {k: v for k, v in out.items() if v}


def rhs_action(engine, N, i, j, n, m, state, fcache):
    """Printed right-hand sides for the pairs (1, j) and (2, j)."""
    if not state:
        return {}
    ctx = engine.ctx
    c1 = _cfac(ctx)
    out = {}
    if i == 1:
        # -c1 ( delta(p^((j+1)/2) w/z) W^(j+1)(p^(1/2) w) - mirror )
        g = engine.apply(j + 1, n + m, state)
        if g:
            sc = p_pow(ctx, (j + 1) * n - (n + m), 2) \
                - p_pow(ctx, -(j + 1) * n + (n + m), 2)
            _accumulate(out, g, c1 * sc)
        return {k: v for k, v in out.items() if v}
    if i == 2 and j >= 2:
        s, u = ctx.gen("s"), ctx.gen("u")
        q, t = s * s, u * u
        p = q / t
        # group 1: W^(j+2) with the (1-qp)(1-p/t) prefactor
        g = engine.apply(j + 2, n + m, state)
        if g:
            pre = ctx.ff((1 - q * p) * (1 - p / t) / ((1 - p) * (1 - p * p)))
            sc = p_pow(ctx, (j + 2) * n - 2 * (n + m), 2) \
                - p_pow(ctx, -(j + 2) * n + 2 * (n + m), 2)
            _accumulate(out, g, c1 * pre * sc)
        # group 2: normal-ordered W^1 W^(j+1) pairs on the delta support
        pair1 = normal_ordered_pair(engine, 1, j + 1, Fraction(j - 2, 2), n + m,
                                    state, fcache)
        if pair1:
            _accumulate(out, pair1, c1 * p_pow(ctx, j * n - (n + m), 2))
        pair2 = normal_ordered_pair(engine, 1, j + 1, Fraction(2 - j, 2), n + m,
                                    state, fcache)
        if pair2:
            _accumulate(out, pair2, -c1 * p_pow(ctx, -j * n + (n + m), 2))
        # group 3: the c1^2 corrections
        g = engine.apply(j + 2, n + m, state)
        if g:
            c2 = c1 * c1
            pp = ctx.ff(p)
            inv_p2 = ctx.ff(1 / (1 - p * p))
            inv_pj = ctx.ff(1 / (1 - p ** j))
            sc = p_pow(ctx, j * n, 2) * (pp * pp * inv_p2 * p_pow(ctx, -2 * (n + m), 2)
                                         + inv_pj) \
                - p_pow(ctx, -j * n, 2) * (ctx.ff(p ** j) * inv_pj
                                           + inv_p2 * p_pow(ctx, 2 * (n + m), 2))
            _accumulate(out, g, c2 * sc)
        return {k: v for k, v in out.items() if v}
    raise ValueError("no printed right-hand side for the pair (%d, %d)" % (i, j))


def _fcache_for(ctx, N):
    cache = {}

    def fc(i, j, need):
        got = cache.get((i, j))
        if got is None or len(got) < need + 1:
            got = cache[(i, j)] = structure_function_ff(ctx, N, i, j, need + 4)
        return got

    return fc


def verify_relation(N, i, j, n, m, level, momentum=None, engine=None):
    """Exact mode check of the quadratic relation on levels 0..level."""
    if i > j:
        raise ValueError("order the pair so that i <= j")
    if engine is None:
        engine = engine_for(N, momentum)
    fc = _fcache_for(engine.ctx, N)
    first_bad = None
    for d in range(0, level + 1):
        if d - n - m < 0:
            continue
        for vmon in basis_at_level(N, d):
            state = {vmon: engine.ctx.ff_one}
            lhs = lhs_action(engine, N, i, j, n, m, state, fc)
            rhs = rhs_action(engine, N, i, j, n, m, state, fc)
            for outmon in set(lhs) | set(rhs):
                rv = lhs.get(outmon, engine.ctx.ff_zero) - rhs.get(outmon, engine.ctx.ff_zero)
                if not rv.is_zero():
                    if first_bad is None:
                        first_bad = (d, vmon, outmon, rv.to_frac())
    return RelationInstance(N, i, j, n, m, level, first_bad is None, first_bad)


# -- classical Virasoro --

def classical_setup(N, momentum=None, ctx=None):
    if ctx is None:
        ctx = coeff.beta_field(tuple("g%d" % a for a in range(1, N)))
    algebra = BosonAlgebra(N, "classical", ctx)
    if momentum is None:
        momentum = fock.FieldMomentum(N, [ctx.ff(ctx.gen("g%d" % a))
                                          for a in range(1, N)])
    eng = currents.ClassicalEngine(algebra, momentum)
    return ctx, algebra, eng


def central_charge(ctx, N):
    """c = N - 1 - 12 alpha_0^2 rho^2 with rho^2 = N(N^2-1)/12."""
    a0 = currents.alpha0(ctx)
    return ctx.ff(Fraction(N - 1)) - a0 * a0 * Fraction(N * (N * N - 1))


def verify_classical_virasoro(N, n, m, level, setup=None):
    """[L_n, L_m] = (n-m) L_{n+m} + c/12 (n^3 - n) delta_{n+m} exactly."""
    if setup is None:
        setup = classical_setup(N)
    ctx, algebra, eng = setup
    L = currents.virasoro_field(algebra)  # equals -W^2 of the Miura product
    W = currents.classical_miura_currents(algebra)
    assert (W[2] + L).is_zero()
    c = central_charge(ctx, N)
    ok = True
    first_bad = None
    for d in range(0, level + 1):
        for vmon in basis_at_level(N, d):
            state = {vmon: ctx.ff_one}
            ab = eng.apply(L, "L", m, state)
            ab = eng.apply(L, "L", n, ab) if ab else {}
            ba = eng.apply(L, "L", n, state)
            ba = eng.apply(L, "L", m, ba) if ba else {}
            rhs = eng.apply(L, "L", n + m, state)
            out = {}
            _accumulate(out, ab, ctx.ff_one)
            _accumulate(out, ba, -ctx.ff_one)
            _accumulate(out, rhs, ctx.ff(Fraction(-(n - m))))
            if n + m == 0:
                _accumulate(out, state, -c * Fraction(n ** 3 - n, 12))
            for outmon, v in out.items():
                if not v.is_zero():
                    ok = False
                    if first_bad is None:
                        first_bad = (d, vmon, outmon, v.to_frac())
    return RelationInstance(N, 2, 2, n, m, level, ok, first_bad)


# -- Kac-type Gram matrices of W-descendants --

def w_descendant_basis(N, level):
    """Monomials in W^i_{-k}: tuples of (k, i), k descending then i ascending."""
    return basis_at_level(N, level)


def w_descendant_state(engine, mon):
    """prod W^i_{-k} |gamma>, rightmost factor applied first."""
    state = {(): engine.ctx.ff_one}
    for k, i in reversed(mon):
        state = engine.apply(i, -k, state)
        if not state:
            return {}
    return state


def gram_matrix(N, momentum=None, level=0, engine=None):
    """G_{lm} = <gamma| W_{l} W_{-m} |gamma> over the W-descendant basis.

    The lowering string W_{l} is the reversal of the raising string, so
    the matrix is the Kac-type pairing ((W_k)^dagger = W_{-k}); its
    determinant vanishes exactly at the singular momenta.
    """
    if engine is None:
        engine = engine_for(N, momentum)
    basis = w_descendant_basis(N, level)
    raised = [w_descendant_state(engine, mon) for mon in basis]
    G = []
    for bmon in basis:
        row = []
        for st in raised:
            cur = dict(st)
            for k, i in sorted(bmon):  # smallest mode lowered first
                cur = engine.apply(i, k, cur) if cur else {}
            row.append(cur.get((), engine.ctx.ff_zero))
        G.append(row)
    return G


def gram_det(G):
    """Exact determinant via fraction-free expansion (tiny matrices)."""
    n = len(G)
    if n == 0:
        return None
    if n == 1:
        return G[0][0]
    out = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in G[1:]]
        term = G[0][j] * gram_det(minor)
        if j % 2:
            term = -term
        out = term if out is None else out + term
    return out


def jacobi_cyclic(N, n, m, k, level, setup=None):
    """[[L_n, L_m], L_k] + cyclic = 0 on a level window (consistency test)."""
    if setup is None:
        setup = classical_setup(N)
    ctx, algebra, eng = setup
    L = currents.virasoro_field(algebra)

    def bracket_apply(a, b, state):
        ab = eng.apply(L, "L", b, state)
        ab = eng.apply(L, "L", a, ab) if ab else {}
        ba = eng.apply(L, "L", a, state)
        ba = eng.apply(L, "L", b, ba) if ba else {}
        out = {}
        _accumulate(out, ab, ctx.ff_one)
        _accumulate(out, ba, -ctx.ff_one)
        return {kk: v for kk, v in out.items() if v}

    for d in range(0, level + 1):
        for vmon in basis_at_level(N, d):
            state = {vmon: ctx.ff_one}
            acc = {}
            for (a, b, cc) in ((n, m, k), (m, k, n), (k, n, m)):
                inner = bracket_apply(a, b, state)
                outer = {}
                got = eng.apply(L, "L", cc, inner) if inner else {}
                _accumulate(outer, got, ctx.ff_one)
                mid = eng.apply(L, "L", cc, state)
                mid = bracket_apply(a, b, mid) if mid else {}
                _accumulate(outer, mid, -ctx.ff_one)
                _accumulate(acc, outer, ctx.ff_one)
            for v in acc.values():
                if not v.is_zero():
                    return False
    return True
