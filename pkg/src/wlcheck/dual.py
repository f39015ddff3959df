"""First-order forward-mode differentiation.

A Dual1 carries a value and a gradient tuple with one slot per independent
coordinate.  Gradient entries are normally floats, but they may themselves be
Dual1 instances: nesting one level yields derivatives of expressions that
already contain a first derivative (used for profile derivatives such as W'),
so no dedicated second-order type is needed anywhere.
"""

import math

from .errors import DomainError

_NUM = (int, float)


def scalar_value(z):
    """Plain float of a possibly nested dual."""
    while isinstance(z, Dual1):
        z = z.val
    return float(z)


class Dual1:
    __slots__ = ("val", "grad")

    def __init__(self, val, grad):
        self.val = val
        self.grad = tuple(grad)

    @classmethod
    def constant(cls, val, n):
        return cls(val, (0.0,) * n)

    @classmethod
    def variable(cls, val, k, n):
        return cls(val, tuple(1.0 if i == k else 0.0 for i in range(n)))

    def __repr__(self):
        return f"Dual1({self.val!r}, grad={self.grad!r})"

    # ----- arithmetic -----

    def __add__(self, other):
        if isinstance(other, Dual1):
            return Dual1(self.val + other.val,
                         tuple(a + b for a, b in zip(self.grad, other.grad)))
        if isinstance(other, _NUM):
            return Dual1(self.val + other, self.grad)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual1):
            return Dual1(self.val - other.val,
                         tuple(a - b for a, b in zip(self.grad, other.grad)))
        if isinstance(other, _NUM):
            return Dual1(self.val - other, self.grad)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _NUM):
            return Dual1(other - self.val, tuple(-g for g in self.grad))
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Dual1):
            return Dual1(self.val * other.val,
                         tuple(a * other.val + self.val * b
                               for a, b in zip(self.grad, other.grad)))
        if isinstance(other, _NUM):
            return Dual1(self.val * other, tuple(g * other for g in self.grad))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual1):
            inv2 = 1.0 / (other.val * other.val)
            return Dual1(self.val / other.val,
                         tuple((a * other.val - self.val * b) * inv2
                               for a, b in zip(self.grad, other.grad)))
        if isinstance(other, _NUM):
            inv = 1.0 / other
            return Dual1(self.val * inv, tuple(g * inv for g in self.grad))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _NUM):
            inv2 = 1.0 / (self.val * self.val)
            return Dual1(other / self.val,
                         tuple(-other * g * inv2 for g in self.grad))
        return NotImplemented

    def __neg__(self):
        return Dual1(-self.val, tuple(-g for g in self.grad))

    def __pos__(self):
        return self

    def __pow__(self, other):
        if isinstance(other, Dual1):
            return (other * self.log()).exp()
        if not isinstance(other, _NUM):
            return NotImplemented
        c = float(other)
        if c.is_integer():
            n = int(c)
            if n == 0:
                # keeps nested structure intact
                return self * 0.0 + 1.0
            if n == 1:
                return Dual1(self.val, self.grad)
            coeff = n * self.val ** (n - 1)
            return Dual1(self.val ** n, tuple(coeff * g for g in self.grad))
        if scalar_value(self.val) <= 0.0:
            raise DomainError(
                f"power with non-integer exponent {c} needs a positive base, "
                f"got {scalar_value(self.val)}")
        return (self.log() * c).exp()

    # comparisons act on the underlying scalar value (domain guards)

    def __lt__(self, other):
        return scalar_value(self) < _as_value(other)

    def __le__(self, other):
        return scalar_value(self) <= _as_value(other)

    def __gt__(self, other):
        return scalar_value(self) > _as_value(other)

    def __ge__(self, other):
        return scalar_value(self) >= _as_value(other)

    def __float__(self):
        return scalar_value(self)

    # ----- elementary functions -----

    def sqrt(self):
        if scalar_value(self.val) <= 0.0:
            raise DomainError(
                f"sqrt needs a positive argument for a derivative, "
                f"got {scalar_value(self.val)}")
        r = _sqrt_scalar(self.val)
        coeff = 0.5 / r
        return Dual1(r, tuple(coeff * g for g in self.grad))

    def exp(self):
        r = _exp_scalar(self.val)
        return Dual1(r, tuple(r * g for g in self.grad))

    def log(self):
        if scalar_value(self.val) <= 0.0:
            raise DomainError(
                f"log needs a positive argument, got {scalar_value(self.val)}")
        r = _log_scalar(self.val)
        coeff = 1.0 / self.val
        return Dual1(r, tuple(coeff * g for g in self.grad))

    def sin(self):
        c = _cos_scalar(self.val)
        return Dual1(_sin_scalar(self.val), tuple(c * g for g in self.grad))

    def cos(self):
        s = _sin_scalar(self.val)
        return Dual1(_cos_scalar(self.val), tuple(-s * g for g in self.grad))

    def __abs__(self):
        sv = scalar_value(self.val)
        s = 1.0 if sv > 0.0 else (-1.0 if sv < 0.0 else 0.0)
        return Dual1(self.val * s if s != 1.0 else self.val,
                     tuple(s * g for g in self.grad))


def _as_value(z):
    return scalar_value(z) if isinstance(z, Dual1) else float(z)


def _sqrt_scalar(z):
    return z.sqrt() if isinstance(z, Dual1) else math.sqrt(z)


def _exp_scalar(z):
    if isinstance(z, Dual1):
        return z.exp()
    try:
        return math.exp(z)
    except OverflowError:
        raise DomainError(f"exp overflow at {z}") from None


def _log_scalar(z):
    return z.log() if isinstance(z, Dual1) else math.log(z)


def _sin_scalar(z):
    return z.sin() if isinstance(z, Dual1) else math.sin(z)


def _cos_scalar(z):
    return z.cos() if isinstance(z, Dual1) else math.cos(z)


# ----- generic wrappers usable on floats and duals alike -----

def sqrt(z):
    if isinstance(z, Dual1):
        return z.sqrt()
    if z < 0.0:
        raise DomainError(f"sqrt of negative value {z}")
    return math.sqrt(z)


def exp(z):
    return _exp_scalar(z)


def log(z):
    if isinstance(z, Dual1):
        return z.log()
    if z <= 0.0:
        raise DomainError(f"log of non-positive value {z}")
    return math.log(z)


def sin(z):
    return _sin_scalar(z)


def cos(z):
    return _cos_scalar(z)


def fabs(z):
    return abs(z)


def powz(base, expo):
    """Power with the domain rules of the expression language."""
    if isinstance(expo, Dual1):
        if not isinstance(base, Dual1):
            base = Dual1.constant(float(base), len(expo.grad))
        return base ** expo
    if isinstance(base, Dual1):
        return base ** expo
    c = float(expo)
    if c.is_integer():
        n = int(c)
        if base == 0.0 and n < 0:
            raise DomainError("zero base with negative exponent")
        return float(base) ** n
    if base < 0.0:
        raise DomainError(
            f"power with non-integer exponent {c} needs a non-negative base, "
            f"got {base}")
    return math.pow(base, c)


# ----- lifting scalar fields over a phase point -----

def dual_coords(x_rows, v_rows):
    """Nested lists of coordinate duals for a phase point.

    Ordering of gradient slots: all positions (particle-major), then all
    velocities.
    """
    n = len(x_rows)
    dim = 6 * n
    xs = [[Dual1.variable(float(x_rows[a][i]), 3 * a + i, dim)
           for i in range(3)] for a in range(n)]
    vs = [[Dual1.variable(float(v_rows[a][i]), 3 * n + 3 * a + i, dim)
           for i in range(3)] for a in range(n)]
    return xs, vs


def lift_eval(f, p):
    """Evaluate the scalar field f(x, v) at phase point p with coordinate
    duals seeded, returning a Dual1 with the full gradient.

    p needs .x and .v of shape (N, 3); f receives nested lists of scalars.
    """
    x_rows = [[float(c) for c in row] for row in p.x]
    v_rows = [[float(c) for c in row] for row in p.v]
    xs, vs = dual_coords(x_rows, v_rows)
    r = f(xs, vs)
    if isinstance(r, Dual1):
        return r
    return Dual1.constant(float(r), 6 * len(x_rows))


def finite_diff_grad(f, p, h=1e-4):
    """Central finite-difference gradient of f at p; the independent check
    for the dual-number kernel.  Raises DomainError if any stencil point
    leaves f's domain."""
    x_rows = [[float(c) for c in row] for row in p.x]
    v_rows = [[float(c) for c in row] for row in p.v]
    n = len(x_rows)
    grad = []

    def eval_at(rows_x, rows_v):
        r = f(rows_x, rows_v)
        r = float(r)
        if not math.isfinite(r):
            raise DomainError("field evaluated to a non-finite value")
        return r

    for block, rows in (("x", x_rows), ("v", v_rows)):
        for a in range(n):
            for i in range(3):
                orig = rows[a][i]
                rows[a][i] = orig + h
                fp = eval_at(x_rows, v_rows)
                rows[a][i] = orig - h
                fm = eval_at(x_rows, v_rows)
                rows[a][i] = orig
                grad.append((fp - fm) / (2.0 * h))
    return grad
