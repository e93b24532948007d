"""Truncated Taylor jets in four variables, total degree 3.

A jet is stored as a float array whose *leading* axis has length 35: one slot
per multi-index ``alpha`` with ``|alpha| <= 3`` in graded order. Slot values
are Taylor coefficients ``d^alpha f / alpha!`` at the expansion point. Any
trailing axes are tensor indices, so a whole 4x4 metric is one ``(35, 4, 4)``
array and every operation below acts on all components at once.

``Jet3`` wraps a single scalar jet with operator overloads for the expression
evaluator; the array functions are what the curvature code uses directly.

Differentiating a jet (``partial``) lowers the degree to which it is valid by
one. Products never mix in coefficients above the valid degree, so a chain of
derivatives and products stays exact on whatever degree is still valid.
"""

import itertools
import math

import numpy as np

from .exceptions import DivisionByZeroJet, DomainErrorJet

NVARS = 4
DEGREE = 3


def _multi_indices():
    out = []
    for d in range(DEGREE + 1):
        level = [a for a in itertools.product(range(d + 1), repeat=NVARS) if sum(a) == d]
        out.extend(sorted(level, reverse=True))
    return tuple(out)


MULTI_INDICES = _multi_indices()
NCOEF = len(MULTI_INDICES)
INDEX = {a: k for k, a in enumerate(MULTI_INDICES)}
ORDER = np.array([sum(a) for a in MULTI_INDICES])
FACTORIAL = np.array([math.prod(math.factorial(n) for n in a) for a in MULTI_INDICES], dtype=float)


def _product_table():
    left, right, target = [], [], []
    for i, a in enumerate(MULTI_INDICES):
        for j, b in enumerate(MULTI_INDICES):
            c = tuple(x + y for x, y in zip(a, b))
            if sum(c) <= DEGREE:
                left.append(i)
                right.append(j)
                target.append(INDEX[c])
    scatter = np.zeros((NCOEF, len(target)))
    scatter[target, np.arange(len(target))] = 1.0
    return np.array(left), np.array(right), scatter


_LEFT, _RIGHT, _SCATTER = _product_table()


def _derivative_maps():
    maps = []
    for v in range(NVARS):
        dst, src, fac = [], [], []
        for k, a in enumerate(MULTI_INDICES):
            if sum(a) == DEGREE:
                continue
            up = list(a)
            up[v] += 1
            dst.append(k)
            src.append(INDEX[tuple(up)])
            fac.append(float(up[v]))
        maps.append((np.array(dst), np.array(src), np.array(fac)))
    return maps


_DERIV = _derivative_maps()


def _unit(v):
    e = [0] * NVARS
    e[v] = 1
    return INDEX[tuple(e)]


UNIT = tuple(_unit(v) for v in range(NVARS))


# ---------------------------------------------------------------------------
# array-level operations (leading axis = jet coefficients)
# ---------------------------------------------------------------------------

def constant(value):
    value = np.asarray(value, dtype=float)
    out = np.zeros((NCOEF,) + value.shape)
    out[0] = value
    return out


def variable(index, value):
    if index not in range(NVARS):
        raise ValueError(f"variable index must be in 0..{NVARS - 1}, got {index}")
    out = constant(value)
    out[UNIT[index]] = 1.0
    return out


def _scatter(prod):
    shape = prod.shape[1:]
    return (_SCATTER @ prod.reshape(prod.shape[0], -1)).reshape((NCOEF,) + shape)


def mul(a, b):
    """Elementwise (broadcast) truncated Cauchy product."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    rank = max(a.ndim, b.ndim) - 1
    a = a.reshape(a.shape[:1] + (1,) * (rank - a.ndim + 1) + a.shape[1:])
    b = b.reshape(b.shape[:1] + (1,) * (rank - b.ndim + 1) + b.shape[1:])
    return _scatter(a[_LEFT] * b[_RIGHT])


def contract(subscripts, a, b):
    """Jet-valued ``np.einsum(subscripts, a, b)`` over the tensor axes.

    ``subscripts`` names tensor axes only, e.g. ``"hk,kij->hij"``.
    """
    ins, out = subscripts.replace(" ", "").split("->")
    sa, sb = ins.split(",")
    z = next(c for c in "ZYXWVU" if c not in subscripts)
    prod = np.einsum(f"{z}{sa},{z}{sb}->{z}{out}", a[_LEFT], b[_RIGHT])
    return _scatter(prod)


def partial(a, v):
    """Partial derivative along variable ``v``; valid degree drops by one."""
    dst, src, fac = _DERIV[v]
    out = np.zeros_like(a)
    out[dst] = a[src] * fac.reshape((-1,) + (1,) * (a.ndim - 1))
    return out


def gradient(a):
    """Stack of partials with the derivative index inserted as axis 1."""
    return np.stack([partial(a, v) for v in range(NVARS)], axis=1)


def _compose(a, series):
    """Evaluate ``sum_n series[n] * (a - a0)^n`` for n = 0..3."""
    h = np.array(a, dtype=float)
    h[0] = 0.0
    h2 = mul(h, h)
    h3 = mul(h2, h)
    out = h3 * series[3] + h2 * series[2] + h * series[1]
    out[0] = series[0]
    return out


def _value(a):
    return np.asarray(a, dtype=float)[0]


def reciprocal(a):
    c = _value(a)
    if np.any(np.abs(c) < 1e-300):
        raise DivisionByZeroJet("jet division by a zero value coefficient")
    r = 1.0 / c
    return _compose(a, (r, -r * r, r ** 3, -(r ** 4)))


def div(a, b):
    return mul(a, reciprocal(b))


def exp(a):
    e = np.exp(_value(a))
    return _compose(a, (e, e, e / 2, e / 6))


def log(a):
    c = _value(a)
    if np.any(c <= 0):
        raise DomainErrorJet("log of a non-positive value")
    r = 1.0 / c
    return _compose(a, (np.log(c), r, -r * r / 2, r ** 3 / 3))


def sin(a):
    s, c = np.sin(_value(a)), np.cos(_value(a))
    return _compose(a, (s, c, -s / 2, -c / 6))


def cos(a):
    s, c = np.sin(_value(a)), np.cos(_value(a))
    return _compose(a, (c, -s, -c / 2, s / 6))


def sinh(a):
    s, c = np.sinh(_value(a)), np.cosh(_value(a))
    return _compose(a, (s, c, s / 2, c / 6))


def cosh(a):
    s, c = np.sinh(_value(a)), np.cosh(_value(a))
    return _compose(a, (c, s, c / 2, s / 6))


def sqrt(a):
    c = _value(a)
    if np.any(c <= 0):
        raise DomainErrorJet("sqrt of a non-positive value")
    s = np.sqrt(c)
    return _compose(a, (s, 0.5 / s, -0.125 / (s * c), 0.0625 / (s * c * c)))


def powi(a, n):
    """Integer power. Non-negative ``n`` is exact even at a zero value."""
    n = int(n)
    if n < 0:
        return reciprocal(powi(a, -n))
    c = _value(a)
    series = [math.comb(n, k) * c ** (n - k) if k <= n else np.zeros_like(c) for k in range(DEGREE + 1)]
    return _compose(a, series)


def matinv(a):
    """Inverse of a jet-valued square matrix with shape ``(35, n, n)``.

    Solves ``a @ x = I`` degree by degree: the value part is a plain inverse
    and each higher coefficient follows from the lower ones.
    """
    a = np.asarray(a, dtype=float)
    a0inv = np.linalg.inv(a[0])
    x = np.zeros_like(a)
    x[0] = a0inv
    for k in range(1, NCOEF):
        target = MULTI_INDICES[k]
        acc = np.zeros_like(a0inv)
        for i, alpha in enumerate(MULTI_INDICES[1:k + 1], start=1):
            rest = tuple(t - s for t, s in zip(target, alpha))
            if min(rest) < 0:
                continue
            acc += a[i] @ x[INDEX[rest]]
        x[k] = -a0inv @ acc
    return x


def derivative(a, alpha):
    """True partial derivative ``d^alpha`` at the expansion point."""
    alpha = tuple(int(n) for n in alpha)
    if len(alpha) != NVARS or min(alpha) < 0:
        raise ValueError(f"multi-index must have {NVARS} non-negative entries")
    if sum(alpha) > DEGREE:
        raise ValueError(f"derivative order {sum(alpha)} exceeds jet degree {DEGREE}")
    k = INDEX[alpha]
    return np.asarray(a)[k] * FACTORIAL[k]


def truncate(a, degree):
    """Zero every coefficient above ``degree``."""
    out = np.array(a, dtype=float)
    out[ORDER > degree] = 0.0
    return out


# ---------------------------------------------------------------------------
# scalar jets
# ---------------------------------------------------------------------------

class Jet3:
    """Immutable scalar jet."""

    __slots__ = ("coeffs",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.shape != (NCOEF,):
            raise ValueError(f"expected {NCOEF} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Jet3 is immutable")

    @classmethod
    def constant(cls, value):
        return cls(constant(value))

    @classmethod
    def variable(cls, index, value):
        return cls(variable(index, value))

    @property
    def value(self):
        return float(self.coeffs[0])

    def partial(self, alpha):
        return float(derivative(self.coeffs, alpha))

    def coefficient(self, alpha):
        return float(self.coeffs[INDEX[tuple(alpha)]])

    @staticmethod
    def _lift(other):
        if isinstance(other, Jet3):
            return other.coeffs
        if isinstance(other, (int, float, np.floating, np.integer)):
            return constant(float(other))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Jet3(self.coeffs + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Jet3(self.coeffs - o)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Jet3(o - self.coeffs)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Jet3(mul(self.coeffs, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Jet3(div(self.coeffs, o))

    def __rtruediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Jet3(div(o, self.coeffs))

    def __neg__(self):
        return Jet3(-self.coeffs)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)) or (isinstance(n, float) and n.is_integer()):
            return Jet3(powi(self.coeffs, int(n)))
        raise TypeError("jets only support integer powers")

    def __eq__(self, other):
        return isinstance(other, Jet3) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        nz = {MULTI_INDICES[k]: float(c) for k, c in enumerate(self.coeffs) if c != 0.0}
        return f"Jet3({nz})"


# Operation-style entry points.

def jet_constant(v):
    return Jet3.constant(v)


def jet_variable(index, value):
    return Jet3.variable(index, value)


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "neg": lambda a, b: -a,
}

ELEMENTARY = {
    "exp": exp,
    "log": log,
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "sqrt": sqrt,
}


def jet_arith(op, a, b=None):
    try:
        f = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown jet operation {op!r}") from None
    return f(a, b)


def jet_elementary(func, a, n=None):
    if func == "powi":
        if n is None:
            raise ValueError("powi needs an integer exponent")
        return Jet3(powi(a.coeffs, n))
    try:
        f = ELEMENTARY[func]
    except KeyError:
        raise ValueError(f"unknown elementary function {func!r}") from None
    return Jet3(f(a.coeffs))


def extract_partial(a, alpha):
    coeffs = a.coeffs if isinstance(a, Jet3) else a
    return float(derivative(coeffs, alpha))
