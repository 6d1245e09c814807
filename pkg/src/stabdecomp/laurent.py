"""Laurent polynomials in two variables over a prime field.

Everything downstream works over R = F_p[x, y, x^-1, y^-1].  A polynomial
is stored as a dict mapping exponent pairs (a, b) to nonzero coefficients
in {1, .., p-1}.  Instances are treated as immutable: every operation
returns a new object and nothing mutates ``terms`` after construction.

The antipode ``bar`` sends x -> x^-1, y -> y^-1 and fixes coefficients.
Division helpers for the augmentation ideal (x-1, y-1) and a Euclidean
division for single-variable Laurent polynomials live at module level.
"""

from __future__ import annotations

from typing import Iterable

from .errors import ParityObstruction, PolyParseError, PrimeMismatch


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class LaurentPoly:
    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        if not is_prime(p):
            raise ValueError(f"modulus must be prime, got {p}")
        object.__setattr__(self, "p", p)
        clean = {}
        if terms:
            for (a, b), c in terms.items():
                c %= p
                if c:
                    clean[(int(a), int(b))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "LaurentPoly":
        return cls(p, {})

    @classmethod
    def one(cls, p: int) -> "LaurentPoly":
        return cls(p, {(0, 0): 1})

    @classmethod
    def const(cls, p: int, c: int) -> "LaurentPoly":
        return cls(p, {(0, 0): c})

    @classmethod
    def monomial(cls, p: int, a: int, b: int, c: int = 1) -> "LaurentPoly":
        return cls(p, {(a, b): c})

    @classmethod
    def variable(cls, p: int, name: str) -> "LaurentPoly":
        if name == "x":
            return cls(p, {(1, 0): 1})
        if name == "y":
            return cls(p, {(0, 1): 1})
        raise ValueError(f"unknown variable {name!r}")

    @classmethod
    def from_str(cls, p: int, text: str) -> "LaurentPoly":
        return parse_poly(p, text)

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "LaurentPoly"):
        if self.p != other.p:
            raise PrimeMismatch(f"p={self.p} vs p={other.p}")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return LaurentPoly(self.p, t)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) - c
        return LaurentPoly(self.p, t)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.p, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        t: dict = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                t[k] = t.get(k, 0) + c1 * c2
        return LaurentPoly(self.p, t)

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            ((a, b), c) = next(iter(self.terms.items()))
            cinv = pow(c, -1, self.p)
            return LaurentPoly(self.p, {(n * a, n * b): pow(cinv, -n, self.p)})
        out = LaurentPoly.one(self.p)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c: int) -> "LaurentPoly":
        return LaurentPoly(self.p, {k: v * c for k, v in self.terms.items()})

    def shift(self, da: int, db: int) -> "LaurentPoly":
        """Multiply by the monomial x^da y^db."""
        return LaurentPoly(self.p, {(a + da, b + db): c for (a, b), c in self.terms.items()})

    def bar(self) -> "LaurentPoly":
        """x -> x^-1, y -> y^-1."""
        return LaurentPoly(self.p, {(-a, -b): c for (a, b), c in self.terms.items()})

    # -- evaluation and substitution ---------------------------------------

    def eval_at_unity(self) -> int:
        return sum(self.terms.values()) % self.p

    def subs_x1(self) -> "LaurentPoly":
        """Set x = 1, leaving a polynomial in y alone."""
        t: dict = {}
        for (a, b), c in self.terms.items():
            k = (0, b)
            t[k] = t.get(k, 0) + c
        return LaurentPoly(self.p, t)

    def subs_y1(self) -> "LaurentPoly":
        t: dict = {}
        for (a, b), c in self.terms.items():
            k = (a, 0)
            t[k] = t.get(k, 0) + c
        return LaurentPoly(self.p, t)

    # -- predicates and views ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0, 0): 1}

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def coeff(self, a: int, b: int) -> int:
        return self.terms.get((a, b), 0)

    def support(self):
        return set(self.terms)

    def max_abs_exponent(self) -> int:
        m = 0
        for a, b in self.terms:
            m = max(m, abs(a), abs(b))
        return m

    def involves(self, var: str) -> bool:
        i = 0 if var == "x" else 1
        return any(k[i] for k in self.terms)

    def as_univar(self, var: str) -> dict:
        """View as a one-variable Laurent polynomial in ``var``.

        Raises ValueError if the other variable actually appears.
        """
        if var not in ("x", "y"):
            raise ValueError(f"unknown variable {var!r}")
        keep, drop = (0, 1) if var == "x" else (1, 0)
        out = {}
        for k, c in self.terms.items():
            if k[drop]:
                raise ValueError(f"polynomial involves the other variable: {self}")
            out[k[keep]] = c
        return out

    @classmethod
    def from_univar(cls, p: int, var: str, d: dict) -> "LaurentPoly":
        if var == "x":
            return cls(p, {(e, 0): c for e, c in d.items()})
        if var == "y":
            return cls(p, {(0, e): c for e, c in d.items()})
        raise ValueError(f"unknown variable {var!r}")

    # -- equality, hashing, display ----------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"LaurentPoly({self.p}, {self.to_str()!r})"

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b) in sorted(self.terms):
            c = self.terms[(a, b)]
            factors = []
            if a:
                factors.append("x" if a == 1 else f"x^{a}")
            if b:
                factors.append("y" if b == 1 else f"y^{b}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([str(c)] + factors))
        return " + ".join(parts)


# -- parsing ---------------------------------------------------------------

def _tokenize(text: str):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*^":
            toks.append((ch, i))
            i += 1
        elif ch in "xy":
            toks.append((ch, i))
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append((text[i:j], i))
            i = j
        else:
            raise PolyParseError(f"unexpected character {ch!r}", i)
    return toks


def parse_poly(p: int, text: str) -> LaurentPoly:
    """Parse the serialization grammar; accepts unary leading minus too."""
    toks = _tokenize(text)
    if not toks:
        raise PolyParseError("empty polynomial", 0)
    pos = 0
    terms: dict = {}

    def peek():
        return toks[pos][0] if pos < len(toks) else None

    def take():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def parse_exponent() -> int:
        sign = 1
        if peek() == "-":
            take()
            sign = -1
        tok, at = take() if pos < len(toks) else (None, len(text))
        if tok is None or not tok.isdigit():
            raise PolyParseError("expected integer exponent", at)
        return sign * int(tok)

    def parse_factor():
        tok, at = take()
        if tok not in ("x", "y"):
            raise PolyParseError(f"expected variable, got {tok!r}", at)
        e = 1
        if peek() == "^":
            take()
            e = parse_exponent()
        return (e, 0) if tok == "x" else (0, e)

    def parse_term():
        coeff = 1
        a = b = 0
        saw_factor = False
        tok = peek()
        if tok is not None and tok.isdigit():
            coeff = int(take()[0])
            if peek() == "*":
                take()
            else:
                return coeff, 0, 0
        while True:
            tok = peek()
            if tok in ("x", "y"):
                da, db = parse_factor()
                a += da
                b += db
                saw_factor = True
            else:
                break
            if peek() == "*":
                take()
        if not saw_factor and coeff == 1 and tok not in ("x", "y"):
            _, at = toks[pos] if pos < len(toks) else (None, len(text))
            raise PolyParseError("expected a term", at)
        return coeff, a, b

    sign = 1
    if peek() == "-":
        take()
        sign = -1
    while True:
        c, a, b = parse_term()
        k = (a, b)
        terms[k] = terms.get(k, 0) + sign * c
        tok = peek()
        if tok is None:
            break
        if tok == "+":
            sign = 1
        elif tok == "-":
            sign = -1
        else:
            raise PolyParseError(f"expected + or -, got {tok!r}", toks[pos][1])
        take()
    return LaurentPoly(p, terms)


# -- division by the augmentation generators ------------------------------

def _geom(lo: int, hi: int) -> Iterable[int]:
    return range(lo, hi)


def divmod_x1(f: LaurentPoly):
    """Write f = q*(x-1) + r with r = f at x=1 (a polynomial in y).

    For a single term c x^a y^b the quotient slice is c y^b (1+x+..+x^{a-1})
    when a > 0 and -c y^b (x^a+..+x^{-1}) when a < 0.
    """
    p = f.p
    q: dict = {}
    for (a, b), c in f.terms.items():
        if a > 0:
            for k in _geom(0, a):
                q[(k, b)] = q.get((k, b), 0) + c
        elif a < 0:
            for k in _geom(a, 0):
                q[(k, b)] = q.get((k, b), 0) - c
    return LaurentPoly(p, q), f.subs_x1()


def divmod_y1(f: LaurentPoly):
    """Write f = q*(y-1) + r with r = f at y=1 (a polynomial in x)."""
    p = f.p
    q: dict = {}
    for (a, b), c in f.terms.items():
        if b > 0:
            for k in _geom(0, b):
                q[(a, k)] = q.get((a, k), 0) + c
        elif b < 0:
            for k in _geom(b, 0):
                q[(a, k)] = q.get((a, k), 0) - c
    return LaurentPoly(p, q), f.subs_y1()


def divmod_xbar1(f: LaurentPoly):
    """Write f = q*(x^-1 - 1) + r, with r = f at x=1."""
    q, r = divmod_x1(f)
    return -q.shift(1, 0), r


def divmod_ybar1(f: LaurentPoly):
    """Write f = q*(y^-1 - 1) + r, with r = f at y=1."""
    q, r = divmod_y1(f)
    return -q.shift(0, 1), r


def _exact(divmod_fn, f: LaurentPoly, what: str) -> LaurentPoly:
    q, r = divmod_fn(f)
    if not r.is_zero():
        raise ValueError(f"{f} is not divisible by {what}")
    return q


def exact_div_x1(f: LaurentPoly) -> LaurentPoly:
    return _exact(divmod_x1, f, "x-1")


def exact_div_y1(f: LaurentPoly) -> LaurentPoly:
    return _exact(divmod_y1, f, "y-1")


def exact_div_xbar1(f: LaurentPoly) -> LaurentPoly:
    return _exact(divmod_xbar1, f, "x^-1-1")


def exact_div_ybar1(f: LaurentPoly) -> LaurentPoly:
    return _exact(divmod_ybar1, f, "y^-1-1")


# -- single-variable Euclidean division ------------------------------------

def uni_span(d: dict) -> int:
    """Exponent spread of a one-variable Laurent polynomial (dict exp->coeff)."""
    if not d:
        return -1
    return max(d) - min(d)


def poly_divmod_uni(fd: dict, gd: dict, p: int):
    """Divide in F_p[t, t^-1]: f = q*g + r with span(r) < span(g).

    Inputs and outputs are dicts {exponent: coeff}.  g must be nonzero.
    Units (monomials) divide everything exactly.
    """
    if not gd:
        raise ZeroDivisionError("division by zero polynomial")
    f = {e: c % p for e, c in fd.items() if c % p}
    g = {e: c % p for e, c in gd.items() if c % p}
    if not g:
        raise ZeroDivisionError("division by zero polynomial")
    gtop = max(g)
    ginv = pow(g[gtop], -1, p)
    gspan = gtop - min(g)
    q: dict = {}
    guard = uni_span(f) + gspan + 4
    while f and (max(f) - min(f)) >= gspan:
        guard -= 1
        if guard < 0:
            raise RuntimeError("division failed to terminate")
        ftop = max(f)
        d = ftop - gtop
        c = (f[ftop] * ginv) % p
        q[d] = (q.get(d, 0) + c) % p
        for e, gc in g.items():
            k = e + d
            v = (f.get(k, 0) - c * gc) % p
            if v:
                f[k] = v
            else:
                f.pop(k, None)
    q = {e: c for e, c in q.items() if c}
    return q, f


def gcd_uni(fd: dict, gd: dict, p: int) -> dict:
    """Euclidean gcd in F_p[t, t^-1], normalized to lowest exponent 0, monic."""
    a = {e: c % p for e, c in fd.items() if c % p}
    b = {e: c % p for e, c in gd.items() if c % p}
    while b:
        _, r = poly_divmod_uni(a, b, p)
        a, b = b, r
    if not a:
        return {}
    lo = min(a)
    inv = pow(a[max(a)], -1, p)
    return {e - lo: (c * inv) % p for e, c in a.items()}


# -- symmetric halves -------------------------------------------------------

def sym_halves(f: LaurentPoly) -> LaurentPoly:
    """Find a with a + bar(a) = f, given f = bar(f).

    For p = 2 this needs the constant coefficient to vanish; a nonzero
    constant raises ParityObstruction so the caller can enlarge the cell.
    """
    if f.bar() != f:
        raise ValueError(f"{f} is not bar-invariant")
    p = f.p
    out: dict = {}
    c0 = f.coeff(0, 0)
    if c0:
        if p == 2:
            raise ParityObstruction(
                f"constant coefficient of {f} is not twice anything mod 2"
            )
        out[(0, 0)] = (c0 * pow(2, -1, p)) % p
    for (a, b), c in f.terms.items():
        if (a, b) > (0, 0):
            out[(a, b)] = c
    return LaurentPoly(p, out)
