"""Partitions and symmetric functions; the Macdonald and Jack oracles.

Symmetric functions are finite linear combinations over either the
power-sum basis p_lambda or the monomial basis m_lambda, with
coefficients in a rational-function field.  The two bases are linked by
the exact expansion of p_lambda over monomials (no variable truncation).

Macdonald polynomials P_lambda(x; q, t) are produced by Gram-Schmidt
against the power-sum inner product

    <p_lam, p_mu> = delta z_lam prod_i (1 - q^lam_i) / (1 - t^lam_i)

processed along a linear extension of dominance order, normalized monic
in m_lambda.  Jack polynomials use the beta-pairing z_lam beta^(-len),
which is the t = q^beta, q -> 1 limit of the Macdonald pairing; with the
conventions here J_lambda corresponds to Jack parameter alpha = 1/beta.
Schur functions via Jacobi-Trudi serve as an independent cross-check.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache

from .coeff import frac_map, parse_scalar, scalar_str


# -- partitions --

def is_partition(lam):
    return all(isinstance(x, int) and x > 0 for x in lam) and \
        all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))


def check_partition(lam):
    lam = tuple(lam)
    if not is_partition(lam):
        raise ValueError("not a partition: %r" % (lam,))
    return lam


@lru_cache(maxsize=None)
def partitions(n, maxpart=None):
    """All partitions of n with parts <= maxpart, in lexicographic descending order."""
    if maxpart is None:
        maxpart = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, maxpart), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def conjugate(lam):
    lam = check_partition(lam)
    if not lam:
        return ()
    return tuple(sum(1 for x in lam if x > i) for i in range(lam[0]))


def z_lambda(lam):
    """z_lam = prod_i i^(m_i) m_i! over part multiplicities m_i."""
    lam = check_partition(lam)
    out = Fraction(1)
    mult = {}
    for x in lam:
        mult[x] = mult.get(x, 0) + 1
    for i, m in mult.items():
        out *= Fraction(i) ** m
        for k in range(1, m + 1):
            out *= k
    return out


def dominance_leq(lam, mu):
    """True iff lam <= mu in dominance order (equal weights required)."""
    lam, mu = check_partition(lam), check_partition(mu)
    if sum(lam) != sum(mu):
        raise ValueError("dominance compares equal weights only")
    a = b = 0
    for i in range(max(len(lam), len(mu))):
        a += lam[i] if i < len(lam) else 0
        b += mu[i] if i < len(mu) else 0
        if a > b:
            return False
    return True


def _order_key(lam):
    # lexicographic on the padded part list; refines dominance upward
    return lam


# -- symmetric functions --

class SymFunc:
    """Finite combination of p_lambda ("p") or m_lambda ("m") basis elements."""

    __slots__ = ("basis", "terms", "ctx")

    def __init__(self, basis, terms, ctx):
        if basis not in ("p", "m"):
            raise ValueError("basis must be 'p' or 'm'")
        self.basis = basis
        self.ctx = ctx
        self.terms = {lam: c for lam, c in terms.items() if c}

    @classmethod
    def zero(cls, basis, ctx):
        return cls(basis, {}, ctx)

    @classmethod
    def unit(cls, basis, lam, ctx, coeff=None):
        c = ctx.one if coeff is None else coeff
        return cls(basis, {check_partition(lam): c}, ctx)

    def __add__(self, other):
        assert self.basis == other.basis
        out = dict(self.terms)
        for lam, c in other.terms.items():
            out[lam] = out.get(lam, self.ctx.zero) + c
        return SymFunc(self.basis, out, self.ctx)

    def __sub__(self, other):
        return self + other.scale(-self.ctx.one)

    def scale(self, c):
        return SymFunc(self.basis, {lam: v * c for lam, v in self.terms.items()}, self.ctx)

    def __eq__(self, other):
        return self.basis == other.basis and (self - other).is_zero()

    def is_zero(self):
        return not self.terms

    def coeff(self, lam):
        return self.terms.get(tuple(lam), self.ctx.zero)

    def weights(self):
        return sorted({sum(lam) for lam in self.terms})

    def map_coeffs(self, fn, ctx=None):
        return SymFunc(self.basis, {lam: fn(c) for lam, c in self.terms.items()},
                       ctx or self.ctx)

    def __repr__(self):
        items = sorted(self.terms.items())
        return " + ".join("(%s)*%s_%s" % (c, self.basis, list(lam)) for lam, c in items) or "0"

    def to_json(self):
        return {"basis": self.basis,
                "terms": [{"partition": list(lam), "coeff": scalar_str(c)}
                          for lam, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, data, ctx):
        terms = {check_partition(t["partition"]): parse_scalar(ctx, t["coeff"])
                 for t in data["terms"]}
        return cls(data["basis"], terms, ctx)

    def dumps(self):
        return json.dumps(self.to_json())


# -- p <-> m basis conversion (exact, partition combinatorics) --

@lru_cache(maxsize=None)
def _pn_times_m(n, mu):
    """Expansion of p_n * m_mu over monomials: {nu: integer coefficient}.

    Adding n to a part k of mu (k = 0 means appending a new part) lands
    in m_nu with multiplicity m_{k+n}(nu), counted once per distinct k.
    """
    out = {}
    sources = set(mu) | {0}
    for k in sources:
        lam = list(mu)
        if k:
            lam.remove(k)
        lam.append(k + n)
        nu = tuple(sorted(lam, reverse=True))
        out[nu] = out.get(nu, 0) + sum(1 for x in nu if x == k + n)
    return out


@lru_cache(maxsize=None)
def _p_to_m(lam):
    """p_lam in the monomial basis, integer coefficients."""
    acc = {(): 1}
    for n in lam:
        nxt = {}
        for mu, c in acc.items():
            for nu, d in _pn_times_m(n, mu).items():
                nxt[nu] = nxt.get(nu, 0) + c * d
        acc = nxt
    return acc


def _m_to_p_matrix(weight):
    """Inverse change of basis at fixed weight, exact over Q."""
    parts = partitions(weight)
    idx = {lam: i for i, lam in enumerate(parts)}
    n = len(parts)
    # A[i][j] = coefficient of m_parts[i] in p_parts[j]
    A = [[Fraction(0)] * n for _ in range(n)]
    for j, lam in enumerate(parts):
        for mu, c in _p_to_m(lam).items():
            A[idx[mu]][j] = Fraction(c)
    # invert by Gauss-Jordan
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    M = [row[:] for row in A]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col])
        M[col], M[piv] = M[piv], M[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = M[col][col]
        M[col] = [x / d for x in M[col]]
        inv[col] = [x / d for x in inv[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
                inv[r] = [a - f * b for a, b in zip(inv[r], inv[col])]
    return parts, inv, A


_M2P_CACHE = {}


def m_to_p(f):
    """Convert a monomial-basis SymFunc to the power-sum basis."""
    assert f.basis == "m"
    out = {}
    ctx = f.ctx
    for w in f.weights():
        if w not in _M2P_CACHE:
            _M2P_CACHE[w] = _m_to_p_matrix(w)
        parts, inv, _ = _M2P_CACHE[w]
        idx = {lam: i for i, lam in enumerate(parts)}
        vec = [f.terms.get(lam, None) for lam in parts]
        for j, lam in enumerate(parts):
            acc = ctx.zero
            for i, c in enumerate(vec):
                if c is not None and inv[j][i]:
                    acc = acc + c * ctx.from_fraction(inv[j][i])
            if acc:
                out[lam] = acc
    return SymFunc("p", out, ctx)


def p_to_m(f):
    """Convert a power-sum-basis SymFunc to the monomial basis (exact)."""
    assert f.basis == "p"
    out = {}
    ctx = f.ctx
    for lam, c in f.terms.items():
        for mu, d in _p_to_m(lam).items():
            out[mu] = out.get(mu, ctx.zero) + c * ctx.from_fraction(d)
    return SymFunc("m", out, ctx)


def monomial_expand(f, n_vars=None):
    """Monomial expansion of a power-sum SymFunc.

    ``n_vars`` is accepted for interface compatibility; the conversion is
    exact for any number of variables >= the weight, which the partition
    combinatorics realizes directly.
    """
    if n_vars is not None:
        top = max([0] + [sum(lam) for lam in f.terms])
        if n_vars < top:
            raise ValueError("n_vars below the top weight would truncate")
    return p_to_m(f)


# -- inner products --

def pairing_macdonald(ctx, lam, mu):
    """<p_lam, p_mu> = delta z_lam prod (1-q^lam_i)/(1-t^lam_i) in Q(s,u)."""
    lam, mu = check_partition(lam), check_partition(mu)
    if lam != mu:
        return ctx.zero
    s, u = ctx.gen("s"), ctx.gen("u")
    out = ctx.from_fraction(z_lambda(lam))
    for part in lam:
        out = out * (1 - s ** (2 * part)) / (1 - u ** (2 * part))
    return out


def pairing_jack(ctx, lam, mu):
    """<p_lam, p_mu> = delta z_lam beta^(-len(lam)) in Q(b), beta = b^2."""
    lam, mu = check_partition(lam), check_partition(mu)
    if lam != mu:
        return ctx.zero
    b = ctx.gen("b")
    return ctx.from_fraction(z_lambda(lam)) / b ** (2 * len(lam))


def sym_pairing(f, g, pairing):
    """Bilinear pairing of two SymFuncs via the power-sum basis."""
    fp = m_to_p(f) if f.basis == "m" else f
    gp = m_to_p(g) if g.basis == "m" else g
    ctx = f.ctx
    out = ctx.zero
    for lam, c in fp.terms.items():
        d = gp.terms.get(lam)
        if d is not None:
            out = out + c * d * pairing(ctx, lam, lam)
    return out


# -- the oracles --

def _gram_schmidt(ctx, weight, pairing):
    """Monic-in-m orthogonal basis at a weight, smallest dominance first."""
    parts = sorted(partitions(weight), key=_order_key)
    basis = {}
    for lam in parts:
        f = SymFunc.unit("m", lam, ctx)
        for mu in parts:
            if mu == lam:
                break
            g = basis[mu]
            num = sym_pairing(f, g, pairing)
            if num:
                den = sym_pairing(g, g, pairing)
                if not den:
                    raise ZeroDivisionError("degenerate pairing at weight %d" % weight)
                f = f - g.scale(num / den)
        basis[lam] = f
    return basis


_MACD_CACHE = {}
_JACK_CACHE = {}


def macdonald_P(ctx, lam):
    """Macdonald polynomial P_lambda(x; q, t) in the monomial basis."""
    lam = check_partition(lam)
    w = sum(lam)
    key = (id(ctx), w)
    if key not in _MACD_CACHE:
        _MACD_CACHE[key] = _gram_schmidt(ctx, w, pairing_macdonald)
    return _MACD_CACHE[key][lam]


def jack_J(ctx, lam):
    """Jack polynomial (monic in m_lambda) for the beta-pairing, beta = b^2."""
    lam = check_partition(lam)
    w = sum(lam)
    key = (id(ctx), w)
    if key not in _JACK_CACHE:
        _JACK_CACHE[key] = _gram_schmidt(ctx, w, pairing_jack)
    return _JACK_CACHE[key][lam]


def complete_h(ctx, n):
    """h_n = sum over |lam| = n of p_lam / z_lam."""
    return SymFunc("p", {lam: ctx.from_fraction(1 / z_lambda(lam)) if lam else ctx.one
                         for lam in partitions(n)}, ctx) if n > 0 else \
        SymFunc("p", {(): ctx.one}, ctx)


def schur(ctx, lam):
    """Schur function via the Jacobi-Trudi determinant, monomial basis."""
    lam = check_partition(lam)
    n = len(lam)
    if n == 0:
        return SymFunc("p", {(): ctx.one}, ctx)
    # det(h_{lam_i - i + j}) expanded over permutations; h_k = 0 for k < 0
    import itertools
    out = SymFunc.zero("p", ctx)
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        degs = [lam[i] - i + perm[i] for i in range(n)]
        if any(d < 0 for d in degs):
            continue
        term = SymFunc("p", {(): ctx.from_fraction(sign)}, ctx)
        for d in degs:
            if d == 0:
                continue
            term = p_mult(term, complete_h(ctx, d))
        out = out + term
    return p_to_m(out)


def p_mult(f, g):
    """Product of two power-sum-basis SymFuncs (concatenation of indices)."""
    assert f.basis == g.basis == "p"
    ctx = f.ctx
    out = {}
    for lam, c in f.terms.items():
        for mu, d in g.terms.items():
            nu = tuple(sorted(lam + mu, reverse=True))
            prod = c * d
            out[nu] = out.get(nu, ctx.zero) + prod
    return SymFunc("p", out, ctx)
