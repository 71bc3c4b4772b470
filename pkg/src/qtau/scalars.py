"""Exact coefficient arithmetic.

Three coefficient rings are used, each embedded in the next:

* ``mpq`` rationals (gmpy2), the hot-path ring;
* :class:`Root2Number`, the quadratic field Q(sqrt 2);
* :class:`CoeffScalar`, Laurent polynomials in ``beta`` and polynomials in
  ``nu`` with Q(sqrt 2) coefficients.

Mixed arithmetic promotes to the larger ring, so a polynomial may hold
coefficients of any of the three types.
"""

from __future__ import annotations

from numbers import Integral, Rational as _AbstractRational

from gmpy2 import mpq

__all__ = [
    "mpq",
    "Root2Number",
    "CoeffScalar",
    "SQRT2",
    "BETA",
    "NU",
    "as_rational",
    "root2_mul",
    "scalar_specialize",
    "is_root2_free",
    "scalar_to_json",
    "scalar_from_json",
    "format_scalar",
]

_RATIONAL_TYPES = (int, type(mpq(0)))


def as_rational(x) -> mpq:
    """Convert an int, mpq, Fraction or "p/q" string to ``mpq``."""
    if isinstance(x, str):
        return mpq(x)
    if isinstance(x, (Integral, _AbstractRational)) or isinstance(x, _RATIONAL_TYPES):
        return mpq(x)
    raise TypeError(f"not a rational: {x!r}")


def _is_rational(x) -> bool:
    return isinstance(x, _RATIONAL_TYPES)


class Root2Number:
    """``a + b*sqrt(2)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = mpq(a)
        self.b = mpq(b)

    @classmethod
    def coerce(cls, x) -> "Root2Number":
        if isinstance(x, Root2Number):
            return x
        if _is_rational(x):
            return cls(x, 0)
        return NotImplemented

    def is_rational(self) -> bool:
        return self.b == 0

    def conjugate(self) -> "Root2Number":
        return Root2Number(self.a, -self.b)

    def norm(self) -> mpq:
        return self.a * self.a - 2 * self.b * self.b

    def inverse(self) -> "Root2Number":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt2)")
        return Root2Number(self.a / n, -self.b / n)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, Root2Number):
            return self.a == other.a and self.b == other.b
        if _is_rational(other):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __neg__(self):
        return Root2Number(-self.a, -self.b)

    def __pos__(self):
        return self

    def __add__(self, other):
        if _is_rational(other):
            return Root2Number(self.a + other, self.b)
        if isinstance(other, Root2Number):
            return Root2Number(self.a + other.a, self.b + other.b)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if _is_rational(other):
            return Root2Number(self.a - other, self.b)
        if isinstance(other, Root2Number):
            return Root2Number(self.a - other.a, self.b - other.b)
        return NotImplemented

    def __rsub__(self, other):
        if _is_rational(other):
            return Root2Number(other - self.a, -self.b)
        return NotImplemented

    def __mul__(self, other):
        if _is_rational(other):
            return Root2Number(self.a * other, self.b * other)
        if isinstance(other, Root2Number):
            a1, b1, a2, b2 = self.a, self.b, other.a, other.b
            return Root2Number(a1 * a2 + 2 * b1 * b2, a1 * b2 + a2 * b1)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_rational(other):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return Root2Number(self.a / other, self.b / other)
        if isinstance(other, Root2Number):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_rational(other):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Root2Number(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self):
        return f"Root2Number({self.a}, {self.b})"

    def __str__(self):
        return format_scalar(self)


SQRT2 = Root2Number(0, 1)


def root2_mul(x: Root2Number, y: Root2Number) -> Root2Number:
    return Root2Number.coerce(x) * Root2Number.coerce(y)


def _clean(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if v}


class CoeffScalar:
    """Finite sum of ``value * beta**i * nu**j`` with ``value`` in Q(sqrt 2).

    ``beta`` is a Laurent symbol (negative ``i`` allowed), ``nu`` is
    polynomial (``j >= 0``).  Values are stored as ``mpq`` when rational and
    promoted to :class:`Root2Number` only when a sqrt(2)-part appears.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = _clean(terms) if terms else {}

    @classmethod
    def constant(cls, value) -> "CoeffScalar":
        return cls({(0, 0): _normalize_value(value)})

    @classmethod
    def coerce(cls, x) -> "CoeffScalar":
        if isinstance(x, CoeffScalar):
            return x
        if _is_rational(x) or isinstance(x, Root2Number):
            return cls.constant(x)
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        other = CoeffScalar.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).terms == {}

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self):
        return CoeffScalar({k: -v for k, v in self.terms.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        other = CoeffScalar.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = _normalize_value(out[k] + v) if k in out else v
        return CoeffScalar(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = CoeffScalar.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_rational(other) or isinstance(other, Root2Number):
            if not other:
                return CoeffScalar()
            return CoeffScalar(
                {k: _normalize_value(v * other) for k, v in self.terms.items()}
            )
        if not isinstance(other, CoeffScalar):
            return NotImplemented
        out: dict = {}
        for (b1, n1), v1 in self.terms.items():
            for (b2, n2), v2 in other.terms.items():
                key = (b1 + b2, n1 + n2)
                p = v1 * v2
                out[key] = _normalize_value(out[key] + p) if key in out else p
        return CoeffScalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_rational(other):
            return self * (mpq(1) / other)
        if isinstance(other, Root2Number):
            return self * other.inverse()
        if isinstance(other, CoeffScalar) and len(other.terms) == 1:
            ((b, n), v), = other.terms.items()
            if n != 0:
                raise ZeroDivisionError("nu is not invertible")
            return self * CoeffScalar({(-b, 0): _normalize_value(1 / Root2Number.coerce(v))})
        return NotImplemented

    def __rtruediv__(self, other):
        return CoeffScalar.coerce(other) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (CoeffScalar.constant(1) / self) ** -n
        result = CoeffScalar.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def beta_exponents(self) -> set[int]:
        return {b for b, _ in self.terms}

    def nu_degree(self) -> int:
        return max((n for _, n in self.terms), default=0)

    def constant_value(self):
        """The value when free of beta and nu, else ``None``."""
        if not self.terms:
            return mpq(0)
        if set(self.terms) == {(0, 0)}:
            return self.terms[(0, 0)]
        return None

    def __repr__(self):
        return f"CoeffScalar({self.terms!r})"

    def __str__(self):
        return format_scalar(self)


def _normalize_value(v):
    if isinstance(v, Root2Number) and v.b == 0:
        return v.a
    if isinstance(v, int):
        return mpq(v)
    return v


BETA = CoeffScalar({(1, 0): mpq(1)})
NU = CoeffScalar({(0, 1): mpq(1)})


def scalar_specialize(c, beta0, nu0) -> Root2Number:
    """Evaluate ``c`` at ``beta = beta0`` and ``nu = nu0``.

    Raises ``ValueError`` for ``beta0 == 0`` since beta is a Laurent symbol.
    """
    beta0 = Root2Number.coerce(beta0)
    nu0 = Root2Number.coerce(nu0)
    if not beta0:
        raise ValueError("beta must be specialized to a nonzero value")
    if not isinstance(c, CoeffScalar):
        return Root2Number.coerce(c)
    total = Root2Number(0)
    for (b, n), v in c.terms.items():
        total = total + Root2Number.coerce(v) * beta0**b * nu0**n
    return total


def is_root2_free(c) -> bool:
    if _is_rational(c):
        return True
    if isinstance(c, Root2Number):
        return c.b == 0
    return all(is_root2_free(v) for v in c.terms.values())


# -- serialization ---------------------------------------------------------

def _rat_to_json(x) -> str:
    return str(mpq(x))


def scalar_to_json(c):
    """Rationals as "p/q" strings, Root2Number as {a, b}, CoeffScalar as a
    list of {beta, nu, value}."""
    if _is_rational(c):
        return _rat_to_json(c)
    if isinstance(c, Root2Number):
        return {"a": _rat_to_json(c.a), "b": _rat_to_json(c.b)}
    if isinstance(c, CoeffScalar):
        return [
            {"beta": b, "nu": n, "value": scalar_to_json(v)}
            for (b, n), v in sorted(c.terms.items())
        ]
    raise TypeError(f"cannot serialize {c!r}")


def scalar_from_json(obj):
    if isinstance(obj, str):
        return mpq(obj)
    if isinstance(obj, int):
        return mpq(obj)
    if isinstance(obj, dict):
        return Root2Number(mpq(obj["a"]), mpq(obj["b"]))
    if isinstance(obj, list):
        return CoeffScalar(
            {(int(t["beta"]), int(t["nu"])): _normalize_value(scalar_from_json(t["value"])) for t in obj}
        )
    raise TypeError(f"cannot deserialize {obj!r}")


# -- text form --------------------------------------------------------------

def _format_root2(x: Root2Number) -> str:
    if x.b == 0:
        return str(x.a)
    mag = "sqrt2" if abs(x.b) == 1 else f"{abs(x.b)}*sqrt2"
    if x.a == 0:
        return "-" + mag if x.b < 0 else mag
    sign = "-" if x.b < 0 else "+"
    return f"{x.a} {sign} {mag}"


def format_scalar(c) -> str:
    if _is_rational(c):
        return str(mpq(c))
    if isinstance(c, Root2Number):
        return _format_root2(c)
    if not c.terms:
        return "0"
    parts = []
    for (b, n), v in sorted(c.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        sym = []
        if b:
            sym.append("beta" if b == 1 else f"beta^{b}")
        if n:
            sym.append("nu" if n == 1 else f"nu^{n}")
        vs = format_scalar(v)
        if isinstance(v, Root2Number) and v.a != 0 and v.b != 0:
            vs = f"({vs})"
        if not sym:
            parts.append(vs)
        elif vs == "1":
            parts.append("*".join(sym))
        elif vs == "-1":
            parts.append("-" + "*".join(sym))
        else:
            parts.append(vs + "*" + "*".join(sym))
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out
