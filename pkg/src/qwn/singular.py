"""Singular vectors and their identification with Macdonald/Jack polynomials.

A lattice datum (r, s) with r_1 > ... > r_{N-1} >= 0 (r_0 = 0, zero rows
absent) and positive s_a places a singular vector at level sum r_a s_a in
the Fock module over

    gamma^+ = sum_a ( sqrt(beta) (1 + r_a - r_{a-1}) - (1 + s_a)/sqrt(beta) ) Lambda_a,

the minus-sign datum being the omega'-mirror.  Two independent
constructions are implemented:

* ``singular_kernel`` -- the joint kernel of all lowering current modes
  W^i_n (1 <= n <= level + extra) on the graded slice, solved exactly.

* ``integral_singular_vector`` -- the screening-current contour integral
  evaluated as a constant term: the integrand is the product of the pair
  kernels Delta, pi, C (each an exponential of an explicit mode series),
  the powers x^(-s_a), and the negative-mode parts of the screening
  currents.  Contour integration = total constant-term extraction, which
  is exact whenever all x-exponents are integers: always for single
  screening rows (all r_a <= 1, fully symbolic q, t), and at positive
  integer beta (t = q^beta) otherwise.  Truncation of the infinite ratio
  series is certified by re-running at order + 1.

The map to symmetric functions sends a creation monomial to
prod sigma_{a_k}(n_k) p_{n_k}, where sigma is computed generically as
sigma_a(n) = [h^1_n, alpha^a_{-n}] / (q^(n/2) - q^(-n/2)) (quantum) and
sqrt(beta)/n [hbar^1_n, alpha^a_{-n}] (classical); that sigma_a = 0 for
a >= 2 is then a checked consequence.  Images are compared with the
oracle polynomials coefficient-by-coefficient up to one overall scalar.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import coeff, symfun
from .coeff import CoeffField, specialize_beta
from .currents import ClassicalEngine, ModeEngine, classical_miura_currents
from .fock import BosonAlgebra, ExpMomentum, FieldMomentum, basis_at_level, cartan


class RSData:
    """Rectangle datum: strictly decreasing r (zeros trailing), positive s."""

    def __init__(self, r, s, sign="+"):
        self.r = tuple(r)
        self.s = tuple(s)
        self.sign = sign
        if sign not in "+-":
            raise ValueError("sign must be '+' or '-'")
        if len(self.r) != len(self.s):
            raise ValueError("r and s need equal length")
        pos = [x for x in self.r if x > 0]
        if any(x < 0 for x in self.r) or list(self.r) != sorted(self.r, reverse=True) \
                or len(set(pos)) != len(pos):
            raise ValueError("need r_1 > r_2 > ... >= 0")
        if any(x > 0 and y <= 0 for x, y in zip(self.r, self.s)):
            raise ValueError("s_a must be positive")

    def level(self):
        return sum(r * s for r, s in zip(self.r, self.s))

    def __repr__(self):
        return "RSData(r=%s, s=%s, %s)" % (self.r, self.s, self.sign)


def momentum_rs(N, data):
    """(alpha_rs, alpha~_rs) as exponent momenta (m, n integer lattice data)."""
    if len(data.r) != N - 1:
        raise ValueError("need N-1 rows")
    r = (0,) + data.r
    if data.sign == "+":
        m = tuple(1 + r[a] - r[a - 1] for a in range(1, N))
        n = tuple(-(1 + s) for s in data.s)
    else:
        m = tuple(1 + s for s in data.s)
        n = tuple(-(1 + r[a] - r[a - 1]) for a in range(1, N))
    base = ExpMomentum(N, m, n)
    # alpha~ = alpha - sqrt(beta)^(+-1) sum_a r_a alpha^a; alpha^a over the
    # Lambda basis is the Cartan row, so only m (resp. n) shifts.
    shift = [sum(data.r[a - 1] * cartan(N, a, b) for a in range(1, N))
             for b in range(1, N)]
    if data.sign == "+":
        tilde = ExpMomentum(N, tuple(x - y for x, y in zip(m, shift)), n)
    else:
        tilde = ExpMomentum(N, m, tuple(x - y for x, y in zip(n, shift)))
    return base, tilde


def partition_from_rs(data):
    """lambda with lambda' = ((r_1)^(s_1), ..., (r_{N-1})^(s_{N-1}))."""
    lam_c = []
    for r, s in zip(data.r, data.s):
        lam_c.extend([r] * (s if r else 0))
    return symfun.conjugate(tuple(x for x in lam_c if x))


# -- kernel solver --

def nullspace(rows, ncols, zero, one):
    """Exact right kernel of a list of dense rows over a field."""
    mat = [row[:] for row in rows]
    pivots = []
    rr = 0
    for col in range(ncols):
        piv = None
        for r in range(rr, len(mat)):
            if mat[r][col]:
                piv = r
                break
        if piv is None:
            continue
        mat[rr], mat[piv] = mat[piv], mat[rr]
        d = mat[rr][col]
        mat[rr] = [x / d for x in mat[rr]]
        for r in range(len(mat)):
            if r != rr and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rr])]
        pivots.append(col)
        rr += 1
        if rr == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        vec = [zero] * ncols
        vec[fc] = one
        for prow, pcol in enumerate(pivots):
            vec[pcol] = -mat[prow][fc]
        out.append(vec)
    return out


def singular_kernel(N, mode, data, extra_levels=1, engine=None):
    """Joint kernel of the lowering current modes at the singular level.

    Returns (module objects, list of states as monomial->FracElement maps).
    """
    level = data.level()
    mom, _ = momentum_rs(N, data)
    if mode == "quantum":
        ctx = coeff.qt_field()
        if engine is None:
            engine = ModeEngine(BosonAlgebra(N, "quantum", ctx), mom)
        ctx = engine.ctx
        basis = basis_at_level(N, level)
        rows = []
        for i in range(1, N):
            for n in range(1, level + extra_levels + 1):
                act = engine.action(i, n, level)
                tgt = basis_at_level(N, level - n)
                for outmon in tgt:
                    row = [act[v].get(outmon, ctx.ff_zero).to_frac() for v in basis]
                    if any(row):
                        rows.append(row)
        vecs = nullspace(rows, len(basis), ctx.zero, ctx.one)
        return engine, [dict((mon, c) for mon, c in zip(basis, v) if c) for v in vecs]
    if mode == "classical":
        ctx = coeff.beta_field()
        algebra = BosonAlgebra(N, "classical", ctx)
        gam = mom.weight_vector(ctx)
        momentum = FieldMomentum(N, [ctx.ff(v) for v in gam.coeffs])
        eng = ClassicalEngine(algebra, momentum)
        W = classical_miura_currents(algebra)
        basis = basis_at_level(N, level)
        rows = []
        for k in range(2, N + 1):
            for n in range(1, level + extra_levels + 1):
                act = eng.action(W[k], ("W", k), n, level)
                tgt = basis_at_level(N, level - n)
                for outmon in tgt:
                    row = [act[v].get(outmon, ctx.ff_zero).to_frac() for v in basis]
                    if any(row):
                        rows.append(row)
        vecs = nullspace(rows, len(basis), ctx.zero, ctx.one)
        return eng, [dict((mon, c) for mon, c in zip(basis, v) if c) for v in vecs]
    raise ValueError("mode must be 'quantum' or 'classical'")


# -- map to symmetric functions --

def sigma_factor(algebra, a, n):
    """Coefficient replacing alpha^a_{-n} by sigma p_n under the boson-to-
    symmetric-function map; computed from the algebra, not assumed."""
    ctx = algebra.ctx
    M = algebra.h_in_alpha(1, n)
    acc = ctx.ff_zero
    for b in range(1, algebra.N):
        k = algebra.K(b, a, n)
        if not k.is_zero():
            acc = acc + M[b - 1] * k
    if algebra.mode == "quantum":
        den = ctx.ff(ctx.gen("s") ** n - ctx.gen("s") ** (-n))
        return acc * den.inv()
    b = ctx.names.index("b")
    e = [0] * len(ctx.names)
    e[b] = 1
    return acc * ctx.monomial(e) * Fraction(1, n)


def to_symfunc(algebra, state, ctx=None):
    """Power-sum image of a Fock state (monomial->scalar map)."""
    ctx = ctx or algebra.ctx
    sig = {}
    out = {}
    for mon, c in state.items():
        val = c if hasattr(c, "field") else c  # FracElement or FFrac
        lam = []
        dead = False
        for n, a in mon:
            key = (a, n)
            if key not in sig:
                sig[key] = sigma_factor(algebra, a, n).to_frac()
            sv = sig[key]
            if not sv:
                dead = True
                break
            val = val * sv
            lam.append(n)
        if dead:
            continue
        lam = tuple(sorted(lam, reverse=True))
        if hasattr(val, "to_frac"):
            val = val.to_frac()
        got = out.get(lam)
        out[lam] = val if got is None else got + val
    return symfun.SymFunc("p", out, ctx)


def compare_with_oracle(image, oracle):
    """True iff image = ratio * oracle with one scalar ratio; returns (ok, ratio)."""
    a = symfun.m_to_p(image) if image.basis == "m" else image
    b = symfun.m_to_p(oracle) if oracle.basis == "m" else oracle
    if a.is_zero() or set(a.terms) != set(b.terms):
        return False, None
    ratio = None
    for lam, c in a.terms.items():
        r = c / b.terms[lam]
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False, None
    return True, ratio


# -- screening factors --

class ScreeningFactor:
    """Oscillator data of S^a_+- : creation/annihilation coefficient maps,
    the momentum shift over the Lambda basis (as (dm, dn) lattice data), and
    the symbolic z-power (sqrt(beta)^(+-1) alpha^a_0)."""

    def __init__(self, a, sign, cre, ann, dm, dn, zpow):
        self.a = a
        self.sign = sign
        self.cre = cre
        self.ann = ann
        self.dm = dm
        self.dn = dn
        self.zpow = zpow


def screening_factor(algebra, a, sign, max_mode=12):
    """S^a_+ or S^a_- of the given algebra (quantum or classical)."""
    ctx = algebra.ctx
    N = algebra.N
    cre, ann = {}, {}
    for n in range(1, max_mode + 1):
        if algebra.mode == "quantum":
            if sign == "+":
                d = ctx.ff(ctx.gen("s") ** n - ctx.gen("s") ** (-n)).inv()
                cre[n] = d
                ann[n] = -d
            else:
                d = ctx.ff(ctx.gen("u") ** n - ctx.gen("u") ** (-n)).inv()
                cre[n] = -d
                ann[n] = d
        else:
            bidx = ctx.names.index("b")
            e = [0] * len(ctx.names)
            e[bidx] = 1 if sign == "+" else -1
            apm = ctx.monomial(e) * (1 if sign == "+" else -1)
            cre[n] = apm * Fraction(1, n)
            ann[n] = -apm * Fraction(1, n)
    row = [cartan(N, a, b) for b in range(1, N)]
    if sign == "+":
        dm, dn = tuple(row), (0,) * (N - 1)
    else:
        dm, dn = (0,) * (N - 1), tuple(-x for x in row)
    return ScreeningFactor(a, sign, cre, ann, dm, dn, ("alpha0", a, sign))


# -- constant-term (contour) evaluation --

def _lp_mul(A, B):
    out = {}
    for ea, ca in A.items():
        for eb, cb in B.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = ca * cb
            got = out.get(e)
            out[e] = v if got is None else got + v
    return {e: c for e, c in out.items() if c}


def _pair_series(ctx, nvars, vi, vj, coeff_fn, order):
    """exp(sum_{n=1..order} coeff_fn(n)/n * (x_vi/x_vj)^n) as a Laurent poly."""
    one = ctx.one
    out = {(0,) * nvars: one}
    # exponent polynomial truncated, then exp via powers (series in the ratio)
    lam = [ctx.zero] * (order + 1)
    for n in range(1, order + 1):
        lam[n] = coeff_fn(n) / Fraction(n)
    # exp of a univariate series
    es = [one] + [ctx.zero] * order
    for k in range(1, order + 1):
        acc = ctx.zero
        for j in range(1, k + 1):
            if lam[j]:
                acc = acc + Fraction(j) * lam[j] * es[k - j]
        es[k] = acc / Fraction(k)
    out = {}
    for k, c in enumerate(es):
        if c:
            e = [0] * nvars
            e[vi] += k
            e[vj] -= k
            out[tuple(e)] = c
    return out


def _variables(data):
    """Flat list of (group a, index j) integration variables."""
    out = []
    for a, r in enumerate(data.r, 1):
        for j in range(r):
            out.append((a, j))
    return out


def _scalar_integrand(ctx, N, data, beta, order, classical=False):
    """Product of Delta, pi, C and x^(-s) factors as one Laurent polynomial.

    ``beta`` is None for symbolic runs (requires all r_a <= 1) or a
    positive integer (t = q^beta substituted, univariate field).
    """
    varlist = _variables(data)
    nv = len(varlist)
    vidx = {v: k for k, v in enumerate(varlist)}

    if classical:
        bsq = Fraction(beta)

        def Acoef(n):  # exponent coefficient of Delta-bar and pi-bar
            return ctx.from_fraction(bsq)

        def Bcoef(n):
            return ctx.from_fraction(bsq)
    elif beta is None:
        s = ctx.gen("s")
        u = ctx.gen("u")

        def Acoef(n):
            return (u ** (2 * n) - 1) / (s ** (2 * n) - 1)

        def Bcoef(n):
            return (1 - u ** (-2 * n)) / (1 - s ** (-2 * n))
    else:
        s = ctx.gen("s")

        def Acoef(n):
            # (t^n - 1)/(q^n - 1) at t = q^beta: geometric sum
            acc = ctx.zero
            for k in range(beta):
                acc = acc + s ** (2 * n * k)
            return acc

        def Bcoef(n):
            return Acoef(n) * (s ** (2 * n * (1 - beta)))  # p^n A(n)

    out = {(0,) * nv: ctx.one}
    # x^(-s_a)
    e = [0] * nv
    for (a, j), k in vidx.items():
        e[k] -= data.s[a - 1]
    out = {tuple(e): ctx.one}
    # Delta(x^a): ordered pairs i != j inside a group, series in x_j/x_i
    for a, r in enumerate(data.r, 1):
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                fac = _pair_series(ctx, nv, vidx[(a, j)], vidx[(a, i)],
                                   lambda n: -Acoef(n), order)
                out = _lp_mul(out, fac)
    # pi(1/x^a, p x^{a+1}) (classical: pi-bar(1/x^a, x^{a+1}))
    for a in range(1, len(data.r)):
        if data.r[a - 1] == 0 or data.r[a] == 0:
            continue
        for i in range(data.r[a - 1]):
            for j in range(data.r[a]):
                fac = _pair_series(ctx, nv, vidx[(a + 1, j)], vidx[(a, i)],
                                   Acoef if classical else Bcoef, order)
                out = _lp_mul(out, fac)
    # C(x^a): quantum only; needs integer beta when r_a >= 2
    if not classical:
        for a, r in enumerate(data.r, 1):
            if r < 2:
                continue
            if beta is None:
                raise ValueError("multi-screening rows need a positive integer beta")
            for i in range(r):
                for j in range(i + 1, r):
                    f1 = _pair_series(ctx, nv, vidx[(a, i)], vidx[(a, j)],
                                      Acoef, order)
                    f2 = _pair_series(ctx, nv, vidx[(a, j)], vidx[(a, i)],
                                      lambda n: -Bcoef(n), order)
                    out = _lp_mul(out, _lp_mul(f1, f2))
            e = [0] * nv
            for i in range(r):
                e[vidx[(a, i)]] += (r - 1 - 2 * i) * beta
            out = _lp_mul(out, {tuple(e): ctx.one})
    return out, varlist, vidx


def _osc_coeff(ctx, mode, n, beta):
    """Screening-current creation coefficient of alpha^a_{-n} x^n."""
    s = ctx.gen("s")
    if mode == "quantum":
        return 1 / (s ** n - s ** (-n))
    # classical: sqrt(beta)/n, kept as b/n in Q(b)
    return ctx.gen("b") / Fraction(n)


def _constant_term_state(ctx, N, data, beta, order, mode):
    """Total constant term of the screening integrand: {monomial: scalar}."""
    classical = mode == "classical"
    scal, varlist, vidx = _scalar_integrand(ctx, N, data, beta, order,
                                            classical=classical)
    L = data.level()
    out = {}
    # oscillator terms: each variable carries a partition; total weight L
    choices = []
    for v in varlist:
        opts = []
        for w in range(0, L + 1):
            for lam in symfun.partitions(w):
                opts.append((w, lam))
        choices.append(opts)
    for combo in itertools.product(*choices):
        if sum(w for w, _ in combo) != L:
            continue
        target = tuple(-w for w, _ in combo)
        c0 = scal.get(target)
        if c0 is None:
            continue
        mon = []
        val = c0
        for (a, _j), (w, lam) in zip(varlist, combo):
            mult = {}
            for part in lam:
                mon.append((part, a))
                mult[part] = mult.get(part, 0) + 1
                val = val * _osc_coeff(ctx, mode, part, beta)
            for m in mult.values():
                for k in range(2, m + 1):
                    val = val / Fraction(k)
        if not val:
            continue
        mon = tuple(sorted(mon, key=lambda t: (-t[0], t[1])))
        got = out.get(mon)
        out[mon] = val if got is None else got + val
    return {m: c for m, c in out.items() if c}


def default_order(data, beta):
    b = beta if beta else 1
    rmax = max(data.r) if data.r else 1
    return 2 * data.level() + max(data.s) + 2 * b * rmax + 2


def integral_singular_vector(N, data, beta=None, mode="quantum", order=None):
    """Screening-integral singular vector by constant-term extraction.

    Symbolic (s, u) when all r_a <= 1 and beta is None; otherwise t = q^beta
    for a positive integer beta.  The truncation order is certified by
    recomputing at order + 1; a mismatch raises RuntimeError.
    """
    if data.sign != "+":
        raise ValueError("the integral construction is implemented for the + datum")
    if mode == "quantum":
        ctx = coeff.qt_field() if beta is None else CoeffField(("s",))
    else:
        if beta is None:
            raise ValueError("classical integral needs integer beta")
        ctx = coeff.beta_field()
    if order is None:
        order = default_order(data, beta)
    state = _constant_term_state(ctx, N, data, beta, order, mode)
    check = _constant_term_state(ctx, N, data, beta, order + 1, mode)
    if set(state) != set(check) or any((state[k] - check[k]) for k in state):
        raise RuntimeError("truncation insufficient; retry with order >= %d" % (order + 2))
    return ctx, state


def integral_macdonald(N, data, beta, n_vars=None, order=None):
    """Constant-term evaluation of the symmetric-function-side integrand.

    Returns the image polynomial in the monomial basis; proportional to
    the Macdonald polynomial of partition_from_rs(data) at t = q^beta.
    """
    ctx = CoeffField(("s",))
    if order is None:
        order = default_order(data, beta)
    scal, varlist, vidx = _scalar_integrand(ctx, N, data, beta, order)
    L = data.level()
    s = ctx.gen("s")

    def Bcoef(n):
        acc = ctx.zero
        for k in range(beta):
            acc = acc + s ** (2 * n * k)
        return acc * (s ** (2 * n * (1 - beta)))

    # expand exp(sum (1/n) B(n) p_n q_n(x^1)) to total p-weight L
    group1 = [vidx[(1, j)] for j in range(data.r[0])]
    nv = len(varlist)
    out_terms = {}
    for lam in symfun.partitions(L):
        # coefficient polynomial multiplying p_lam
        mult = {}
        for part in lam:
            mult[part] = mult.get(part, 0) + 1
        kernel = {(0,) * nv: ctx.one}
        cnum = Fraction(1)
        for part, m in mult.items():
            cnum /= Fraction(part) ** m
            for k in range(1, m + 1):
                cnum /= k
        for part in lam:
            qn = {}
            for v in group1:
                e = [0] * nv
                e[v] = part
                qn[tuple(e)] = ctx.one
            kernel = _lp_mul(kernel, qn)
        kernel = {e: c * Bcoef_prod(ctx, Bcoef, lam) * ctx.from_fraction(cnum)
                  for e, c in kernel.items()}
        acc = ctx.zero
        for e, c in kernel.items():
            target = tuple(-x for x in e)
            c0 = scal.get(target)
            if c0 is not None:
                acc = acc + c * c0
        if acc:
            out_terms[lam] = acc
    return symfun.p_to_m(symfun.SymFunc("p", out_terms, ctx))


def Bcoef_prod(ctx, Bcoef, lam):
    acc = ctx.one
    for part in lam:
        acc = acc * Bcoef(part)
    return acc


def integral_jack(N, data, beta, order=None):
    """Classical constant-term chain: proportional to the Jack polynomial."""
    ctx = coeff.beta_field()
    if order is None:
        order = default_order(data, beta)
    scal, varlist, vidx = _scalar_integrand(ctx, N, data, beta, order,
                                            classical=True)
    L = data.level()
    group1 = [vidx[(1, j)] for j in range(data.r[0])]
    nv = len(varlist)
    out_terms = {}
    for lam in symfun.partitions(L):
        mult = {}
        for part in lam:
            mult[part] = mult.get(part, 0) + 1
        cnum = Fraction(beta) ** len(lam)
        for part, m in mult.items():
            cnum /= Fraction(part) ** m
            for k in range(1, m + 1):
                cnum /= k
        kernel = {(0,) * nv: ctx.one}
        for part in lam:
            qn = {}
            for v in group1:
                e = [0] * nv
                e[v] = part
                qn[tuple(e)] = ctx.one
            kernel = _lp_mul(kernel, qn)
        acc = ctx.zero
        for e, c in kernel.items():
            target = tuple(-x for x in e)
            c0 = scal.get(target)
            if c0 is not None:
                acc = acc + c * c0
        if acc:
            out_terms[lam] = acc * ctx.from_fraction(cnum)
    return symfun.p_to_m(symfun.SymFunc("p", out_terms, ctx))
