"""Exact scalar arithmetic over rational-function fields.

Every quantity in this package lives in a field of multivariate rational
functions over Q.  Half-integer powers are avoided by adjoining square
roots as primitive variables:

    s = q^(1/2),   u = t^(1/2),   b = beta^(1/2).

so q = s^2, t = u^2, p = q/t = s^2 u^-2, alpha_0 = b - 1/b, and every
half-integer power of q, t, p is an honest Laurent monomial.  Extra
transcendentals (generic momentum components, zero-mode eigenvalues) are
adjoined as further variables when needed.

Two element representations are used:

* ``FracElement`` (sympy's fraction field) -- canonical reduced form.
  Used wherever values are reported, compared or serialized.  Reduction
  runs a multivariate gcd per operation, which is too slow for matrix
  kernels.

* ``FFrac`` -- a numerator polynomial together with a *factored*
  denominator (a multiset of registered factor polynomials).  Addition
  and multiplication never compute a gcd, so these are cheap enough for
  the mode-matrix arithmetic.  Zero tests stay exact (numerator == 0).

``Series`` is a truncated formal power series over either representation;
it backs the structure-function expansions (in a formal ratio variable)
and the hbar-expansions of the classical limit.
"""

from __future__ import annotations

import ast
from fractions import Fraction

from sympy import QQ
from sympy.polys.fields import field as _field
from sympy.polys.rings import ring as _ring


class CoeffField:
    """A named rational-function field Q(v1, ..., vk) and its factor registry.

    ``gens`` are the field generators (FracElement); ``rgens`` the
    corresponding polynomial-ring generators used for FFrac numerators.
    """

    def __init__(self, names):
        self.names = tuple(names)
        objs = _field(",".join(self.names), QQ)
        self.field, self.gens = objs[0], objs[1:]
        robjs = _ring(",".join(self.names), QQ)
        self.ring, self.rgens = robjs[0], robjs[1:]
        self.zero = self.field.zero
        self.one = self.field.one
        self._factors = {}      # key -> ring element
        self._prod_cache = {}   # frozenset of (key, exp) -> ring element
        for i, g in enumerate(self.rgens):
            self._factors[("g", i)] = g

    def __repr__(self):
        return "CoeffField(%s)" % ",".join(self.names)

    def gen(self, name):
        return self.gens[self.names.index(name)]

    def rgen(self, name):
        return self.rgens[self.names.index(name)]

    def from_fraction(self, a):
        a = Fraction(a)
        return self.field.ground_new(QQ(a.numerator, a.denominator))

    def ring_from_fraction(self, a):
        a = Fraction(a)
        return self.ring.ground_new(QQ(a.numerator, a.denominator))

    # -- factor registry (for FFrac denominators) --

    def register_factor(self, poly):
        """Return a hashable key for a ring element used as a denominator factor."""
        if poly.is_ground:
            raise ValueError("constant denominators are folded into numerators")
        if poly.is_monomial and poly.LC == QQ(1):
            mon = poly.monoms()[0]
            nz = [(i, e) for i, e in enumerate(mon) if e]
            if len(nz) == 1:
                i, e = nz[0]
                if e == 1:
                    return ("g", i)
        key = ("poly", tuple(sorted(poly.terms())))
        self._factors.setdefault(key, poly)
        return key

    def factor_poly(self, key):
        return self._factors[key]

    def denom_poly(self, den):
        """Product of registered factors; ``den`` is a dict key -> exponent."""
        fkey = frozenset(den.items())
        got = self._prod_cache.get(fkey)
        if got is None:
            got = self.ring.one
            for key, e in den.items():
                got = got * self.factor_poly(key) ** e
            self._prod_cache[fkey] = got
        return got

    # -- FFrac constructors --

    def ff(self, a):
        """Coerce an int/Fraction/ring/field element into an FFrac."""
        if isinstance(a, FFrac):
            return a
        if isinstance(a, (int, Fraction)):
            return FFrac(self, self.ring_from_fraction(a), {})
        if hasattr(a, "numer"):  # FracElement
            return self.ff_from_frac(a)
        return FFrac(self, a, {})  # ring element

    def ff_from_frac(self, el):
        num, den = el.numer, el.denom
        if den == el.field.ring.one:
            return FFrac(self, num.set_ring(self.ring), {})
        lc = den.LC
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
        key = self.register_factor(den.set_ring(self.ring))
        return FFrac(self, num.set_ring(self.ring), {key: 1})

    @property
    def ff_zero(self):
        return FFrac(self, self.ring.zero, {})

    @property
    def ff_one(self):
        return FFrac(self, self.ring.one, {})

    def monomial(self, exps):
        """FFrac for prod(gen_i ** e_i) with integer (possibly negative) e_i."""
        num = self.ring.one
        den = {}
        for i, e in enumerate(exps):
            if e > 0:
                num = num * self.rgens[i] ** e
            elif e < 0:
                den[("g", i)] = den.get(("g", i), 0) - e
        return FFrac(self, num, den)


class FFrac:
    """numerator / (product of registered factors), without gcd reduction.

    The denominator is a dict mapping factor keys to positive exponents.
    Sums scale numerators up to the exponent-wise max of the two
    denominators; the representation is not reduced, which is fine for
    exact zero tests and keeps hot loops gcd-free.
    """

    __slots__ = ("ctx", "num", "den")

    def __init__(self, ctx, num, den):
        self.ctx = ctx
        self.num = num
        self.den = den if num else {}

    def __repr__(self):
        return "FFrac(%s, %s)" % (self.num, self.den)

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def _coerce(self, other):
        if isinstance(other, FFrac):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.ff(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            return FFrac(self.ctx, self.num + other.num, self.den)
        den = dict(self.den)
        for k, e in other.den.items():
            den[k] = max(den.get(k, 0), e)
        n1 = self.num * self.ctx.denom_poly(
            {k: e - self.den.get(k, 0) for k, e in den.items() if e > self.den.get(k, 0)})
        n2 = other.num * self.ctx.denom_poly(
            {k: e - other.den.get(k, 0) for k, e in den.items() if e > other.den.get(k, 0)})
        return FFrac(self.ctx, n1 + n2, den)

    __radd__ = __add__

    def __neg__(self):
        return FFrac(self.ctx, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num or not other.num:
            return self.ctx.ff_zero
        den = dict(self.den)
        for k, e in other.den.items():
            den[k] = den.get(k, 0) + e
        return FFrac(self.ctx, self.num * other.num, den)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n == 0:
            return self.ctx.ff_one
        if n < 0:
            return self.inv() ** (-n)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def inv(self):
        if not self.num:
            raise ZeroDivisionError("division by zero")
        num = self.ctx.denom_poly(self.den)
        c = self.num
        if c.is_ground:
            return FFrac(self.ctx, num.quo_ground(c.LC), {})
        lc = c.LC
        key = self.ctx.register_factor(c.quo_ground(lc))
        return FFrac(self.ctx, num.quo_ground(lc), {key: 1})

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("FFrac is unhashable; compare via to_frac()")

    def to_frac(self):
        """Canonical FracElement in the ambient fraction field."""
        f = self.ctx.field
        num = self.num.set_ring(f.ring)
        out = f.raw_new(num, f.ring.one)
        for key, e in self.den.items():
            out = out / f.raw_new(self.ctx.factor_poly(key).set_ring(f.ring), f.ring.one) ** e
        return out


class FFDomain:
    """Ring-operations adapter over FFrac values, for Series and matrices."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.zero = ctx.ff_zero
        self.one = ctx.ff_one

    def from_fraction(self, a):
        return self.ctx.ff(a)

    def is_zero(self, a):
        return a.is_zero()

    def inv(self, a):
        return a.inv()


class FracDomain:
    """Same adapter over canonical FracElement values."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.zero = ctx.zero
        self.one = ctx.one

    def from_fraction(self, a):
        return self.ctx.from_fraction(a)

    def is_zero(self, a):
        return not a

    def inv(self, a):
        return 1 / a


class Series:
    """Truncated power series sum(c_k x^k, k = 0..order) over a domain adapter.

    The expansion variable is anonymous; modules use it as the formal
    ratio w/z (structure functions, contractions) or as hbar' (classical
    limit).  Mixed-order arithmetic truncates to the smaller order.
    """

    __slots__ = ("dom", "coeffs", "order")

    def __init__(self, dom, coeffs, order=None):
        self.dom = dom
        if order is None:
            order = len(coeffs) - 1
        coeffs = list(coeffs[: order + 1])
        coeffs += [dom.zero] * (order + 1 - len(coeffs))
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def const(cls, dom, value, order):
        return cls(dom, [value], order)

    @classmethod
    def variable(cls, dom, order, coeff=None):
        c = dom.one if coeff is None else coeff
        return cls(dom, [dom.zero, c], order)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self):
        return "Series(%s; O(%d))" % (self.coeffs, self.order + 1)

    def _common(self, other):
        return min(self.order, other.order)

    def __add__(self, other):
        if not isinstance(other, Series):
            other = Series.const(self.dom, self.dom.from_fraction(other)
                                 if isinstance(other, (int, Fraction)) else other, self.order)
        n = self._common(other)
        return Series(self.dom, [self.coeffs[k] + other.coeffs[k] for k in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.dom, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        if not isinstance(other, Series):
            return self + (-self.dom.from_fraction(other)
                           if isinstance(other, (int, Fraction)) else -other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            if isinstance(other, (int, Fraction)):
                other = self.dom.from_fraction(other)
            return Series(self.dom, [c * other for c in self.coeffs], self.order)
        n = self._common(other)
        out = [self.dom.zero] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if self.dom.is_zero(a):
                continue
            for j in range(n + 1 - i):
                bj = other.coeffs[j]
                if not self.dom.is_zero(bj):
                    out[i + j] = out[i + j] + a * bj
        return Series(self.dom, out, n)

    __rmul__ = __mul__

    def __pow__(self, m):
        out = Series.const(self.dom, self.dom.one, self.order)
        for _ in range(m):
            out = out * self
        return out

    def is_zero(self):
        return all(self.dom.is_zero(c) for c in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Series) and (self - other).is_zero()

    def truncate(self, order):
        return Series(self.dom, self.coeffs[: order + 1], order)

    def shift(self, k):
        """Multiply by x^k; for k < 0 the low coefficients must vanish."""
        if k >= 0:
            return Series(self.dom, [self.dom.zero] * k + self.coeffs, self.order + k)
        if any(not self.dom.is_zero(c) for c in self.coeffs[:-k]):
            raise ValueError("shift below valuation")
        return Series(self.dom, self.coeffs[-k:], self.order + k)

    def map(self, fn):
        return Series(self.dom, [fn(c) for c in self.coeffs], self.order)

    def scale_arg(self, c):
        """Substitute x -> c*x."""
        out, acc = [], self.dom.one
        for k, a in enumerate(self.coeffs):
            out.append(a * acc)
            acc = acc * c
        return Series(self.dom, out, self.order)

    def exp(self):
        if not self.dom.is_zero(self.coeffs[0]):
            raise ValueError("series_exp needs zero constant term")
        n = self.order
        e = [self.dom.one] + [self.dom.zero] * n
        for k in range(1, n + 1):
            acc = self.dom.zero
            for j in range(1, k + 1):
                aj = self.coeffs[j]
                if not self.dom.is_zero(aj):
                    acc = acc + (aj * e[k - j]) * Fraction(j)
            e[k] = acc * Fraction(1, k)
        return Series(self.dom, e, n)

    def log(self):
        if self.dom.is_zero(self.coeffs[0] - self.dom.one):
            pass
        else:
            raise ValueError("series_log needs constant term 1")
        n = self.order
        l = [self.dom.zero] * (n + 1)
        for k in range(1, n + 1):
            acc = self.coeffs[k]
            for j in range(1, k):
                acc = acc - (l[j] * self.coeffs[k - j]) * Fraction(j, k)
            l[k] = acc
        return Series(self.dom, l, n)

    def sqrt(self):
        if not self.dom.is_zero(self.coeffs[0] - self.dom.one):
            raise ValueError("series_sqrt needs constant term 1")
        n = self.order
        s = [self.dom.one] + [self.dom.zero] * n
        for k in range(1, n + 1):
            acc = self.coeffs[k]
            for j in range(1, k):
                acc = acc - s[j] * s[k - j]
            s[k] = acc * Fraction(1, 2)
        return Series(self.dom, s, n)

    def inv(self):
        c0 = self.coeffs[0]
        if self.dom.is_zero(c0):
            raise ValueError("series inverse needs a unit constant term")
        n = self.order
        c0i = self.dom.inv(c0)
        b = [c0i] + [self.dom.zero] * n
        for k in range(1, n + 1):
            acc = self.dom.zero
            for j in range(1, k + 1):
                aj = self.coeffs[j]
                if not self.dom.is_zero(aj):
                    acc = acc + aj * b[k - j]
            b[k] = -(c0i * acc)
        return Series(self.dom, b, n)

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.inv()
        if isinstance(other, (int, Fraction)):
            return self * Fraction(1, 1) / self.dom.from_fraction(other)
        return self * self.dom.inv(other)


# the two standard fields

def qt_field(extra=()):
    """Q(s, u)[extra...]: the quantum coefficient field, s=q^(1/2), u=t^(1/2)."""
    return CoeffField(("s", "u") + tuple(extra))


def beta_field(extra=()):
    """Q(b)[extra...]: the classical coefficient field, b=sqrt(beta)."""
    return CoeffField(("b",) + tuple(extra))


def q_pow(ctx, num, den=1):
    """q^(num/den) as an FFrac; den must divide 2*num exactly."""
    e = Fraction(num, den) * 2
    if e.denominator != 1:
        raise ValueError("q^%s/%s is not a Laurent monomial in s" % (num, den))
    exps = [0] * len(ctx.names)
    exps[ctx.names.index("s")] = int(e)
    return ctx.monomial(exps)


def t_pow(ctx, num, den=1):
    e = Fraction(num, den) * 2
    if e.denominator != 1:
        raise ValueError("t^%s/%s is not a Laurent monomial in u" % (num, den))
    exps = [0] * len(ctx.names)
    exps[ctx.names.index("u")] = int(e)
    return ctx.monomial(exps)


def p_pow(ctx, num, den=1):
    """p^(num/den) with p = q/t = s^2 u^-2."""
    e = Fraction(num, den) * 2
    if e.denominator != 1:
        raise ValueError("p^%s/%s is not a Laurent monomial" % (num, den))
    exps = [0] * len(ctx.names)
    exps[ctx.names.index("s")] = int(e)
    exps[ctx.names.index("u")] = -int(e)
    return ctx.monomial(exps)


def normalize(num, den):
    """Canonical quotient of two field elements (or FFracs).

    Raises ZeroDivisionError on an identically zero denominator.  Equal
    quotients yield structurally identical FracElements.
    """
    if isinstance(num, FFrac):
        num = num.to_frac()
    if isinstance(den, FFrac):
        den = den.to_frac()
    if not den:
        raise ZeroDivisionError("division by zero")
    return num / den


# -- serialization: canonical strings like "(s^2-u^2)/(s*u)" --

def _write_poly(poly, names):
    terms = sorted(poly.terms(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
    parts = []
    for monom, coeff in terms:
        c = Fraction(int(coeff.numerator), int(coeff.denominator))
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e != 0:
                factors.append("%s^%d" % (name, e))
        if not factors:
            body = str(abs(c))
        else:
            body = "*".join(factors)
            if abs(c) != 1:
                body = "%s*%s" % (abs(c), body)
        parts.append(("-" if c < 0 else "+") + body)
    out = "".join(parts)
    return out[1:] if out.startswith("+") else out


def scalar_str(el):
    """Canonical string of a field element; Laurent content moved upstairs."""
    if isinstance(el, FFrac):
        el = el.to_frac()
    names = el.field.symbols
    names = [str(x) for x in names]
    num, den = el.numer, el.denom
    if den == el.field.ring.one:
        return _write_poly(num, names)
    # strip monomial content of the denominator into the numerator string
    dmon = den.monoms()
    shift = tuple(min(m[i] for m in dmon) for i in range(len(names)))
    if any(shift):
        ring = den.ring
        den = den.quo_term((shift, ring.domain.one))
        numstr = _write_poly(num, names)
        monparts = []
        for name, e in zip(names, shift):
            if e:
                monparts.append(name if e == 1 else "%s^%d" % (name, e))
        monstr = "*".join(monparts)
        if den == ring.one:
            return "(%s)/(%s)" % (numstr, monstr)
        return "(%s)/(%s*(%s))" % (numstr, monstr, _write_poly(den, names))
    return "(%s)/(%s)" % (_write_poly(num, names), _write_poly(den, names))


_ALLOWED = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Add, ast.Sub, ast.Mult,
            ast.Div, ast.Pow, ast.USub, ast.UAdd, ast.Name, ast.Constant, ast.Load)


def parse_scalar(ctx, text):
    """Parse the canonical scalar grammar back into a FracElement."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise ValueError("bad token in scalar string: %r" % node)
        if isinstance(node, ast.Constant) and not isinstance(node.value, int):
            raise ValueError("only integer literals allowed")
        if isinstance(node, ast.Name) and node.id not in ctx.names:
            raise ValueError("unknown variable %r" % node.id)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            return ctx.from_fraction(node.value)
        if isinstance(node, ast.Name):
            return ctx.gen(node.id)
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        a, b = ev(node.left), ev(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            if not b:
                raise ZeroDivisionError("division by zero")
            return a / b
        if isinstance(node.op, ast.Pow):
            e = node.right
            neg = False
            if isinstance(e, ast.UnaryOp) and isinstance(e.op, ast.USub):
                neg, e = True, e.operand
            k = e.value
            return a ** (-k if neg else k)
        raise ValueError("unreachable")

    return ev(tree)


# -- homomorphisms between fields --

def poly_map(poly, images, target):
    """Evaluate a ring element on generator images living in ``target.field``."""
    out = target.zero
    for monom, coeff in poly.terms():
        c = Fraction(int(coeff.numerator), int(coeff.denominator))
        term = target.from_fraction(c)
        for img, e in zip(images, monom):
            if e:
                term = term * img ** e
        out = out + term
    return out


def frac_map(el, images, target):
    """Field homomorphism determined by generator images (poles must not collapse)."""
    if isinstance(el, FFrac):
        el = el.to_frac()
    num = poly_map(el.numer, images, target)
    den = poly_map(el.denom, images, target)
    if not den:
        raise ZeroDivisionError("specialization pole")
    return num / den


def specialize_beta(ctx, el, beta):
    """Substitute t = q^beta (i.e. u -> s^beta) into a Q(s,u,...) element.

    Returns an element of Q(s, [extras]).  A vanishing denominator after
    substitution raises (a "specialization pole").
    """
    if beta < 1:
        raise ValueError("beta must be a positive integer")
    extras = tuple(n for n in ctx.names if n not in ("s", "u"))
    tgt = CoeffField(("s",) + extras)
    images = []
    for n in ctx.names:
        if n == "s":
            images.append(tgt.gen("s"))
        elif n == "u":
            images.append(tgt.gen("s") ** beta)
        else:
            images.append(tgt.gen(n))
    return tgt, frac_map(el, images, tgt)


def eval_fraction(el, values):
    """Evaluate a field element at Fraction points; exact, raises on poles."""
    if isinstance(el, FFrac):
        el = el.to_frac()

    def pval(poly):
        out = Fraction(0)
        for monom, coeff in poly.terms():
            c = Fraction(int(coeff.numerator), int(coeff.denominator))
            for v, e in zip(values, monom):
                c *= Fraction(v) ** e
            out += c
        return out

    den = pval(el.denom)
    if den == 0:
        raise ZeroDivisionError("evaluation at a pole")
    return pval(el.numer) / den


def limit_at_one(ctx, el, var="s", order=0):
    """Leading Taylor coefficients of ``el`` at var -> 1.

    Substitutes var = 1 + eps, expands numerator and denominator as
    polynomials in eps, cancels the common eps-valuation and returns the
    series coefficient of eps^order (order 0 = the finite limit value).
    The remaining variables must have been eliminated beforehand.
    """
    if isinstance(el, FFrac):
        el = el.to_frac()
    i = ctx.names.index(var)
    if len(ctx.names) != 1:
        raise ValueError("limit_at_one expects a univariate element")

    def taylor(poly):
        # coefficients of poly(1 + eps) as a list indexed by eps power
        deg = max((m[i] for m in poly.monoms()), default=0)
        out = [Fraction(0)] * (deg + 1)
        for monom, coeff in poly.terms():
            c = Fraction(int(coeff.numerator), int(coeff.denominator))
            e = monom[i]
            # (1+eps)^e, binomial expansion
            binom = Fraction(1)
            for k in range(e + 1):
                out[k] += c * binom
                binom = binom * (e - k) / (k + 1)
        return out

    num, den = taylor(el.numer), taylor(el.denom)
    vnum = next((k for k, c in enumerate(num) if c), None)
    vden = next((k for k, c in enumerate(den) if c), None)
    if vnum is None:
        return Fraction(0)
    if vden is None:
        raise ZeroDivisionError("limit of 1/0")
    if vnum < vden:
        raise ZeroDivisionError("pole at %s=1" % var)
    num, den = num[vnum:], den[vden:]
    shift = vnum - vden
    # series division up to the requested order
    need = order - shift
    if need < 0:
        return Fraction(0)
    num += [Fraction(0)] * (need + 1)
    den += [Fraction(0)] * (need + 1)
    out = []
    for k in range(need + 1):
        acc = num[k]
        for j in range(k):
            acc -= out[j] * den[k - j]
        out.append(acc / den[0])
    return out[need]
