"""Exact ground-space degeneracies of anyon models and the prime-factor phase test.

On a genus-``g`` surface the degeneracy is ``sum_i (D^2 / d_i^2)^(g-1)`` with
``D^2 = sum_i d_i^2``. Quantum dimensions live in ``Z[tau]``, ``tau^2 = tau + 1``,
so the computation is exact. A state in the phase cannot be mapped to a
stabilizer state on local dimensions ``q_1..q_m`` by a shallow circuit when the
degeneracy has a prime factor not dividing ``prod q_i``.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CapExceeded, LrmError

TRIAL_DIVISION_LIMIT = 10**6
RHO_ITERATION_BUDGET = 2_000_000
_SQRT5 = math.sqrt(5)


@dataclass(frozen=True, slots=True)
class GoldenInt:
    """``a + b*tau`` with integer ``a, b``."""

    a: int
    b: int = 0

    @classmethod
    def coerce(cls, v: GoldenInt | int) -> GoldenInt:
        if isinstance(v, GoldenInt):
            return v
        if isinstance(v, int):
            return cls(v, 0)
        return NotImplemented

    @classmethod
    def tau(cls) -> GoldenInt:
        return cls(0, 1)

    def __add__(self, other: GoldenInt | int) -> GoldenInt:
        o = GoldenInt.coerce(other)
        return GoldenInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> GoldenInt:
        return GoldenInt(-self.a, -self.b)

    def __sub__(self, other: GoldenInt | int) -> GoldenInt:
        return self + (-GoldenInt.coerce(other))

    def __rsub__(self, other: GoldenInt | int) -> GoldenInt:
        return GoldenInt.coerce(other) - self

    def __mul__(self, other: GoldenInt | int) -> GoldenInt:
        o = GoldenInt.coerce(other)
        a, b, c, d = self.a, self.b, o.a, o.b
        return GoldenInt(a * c + b * d, a * d + b * c + b * d)

    __rmul__ = __mul__

    def conjugate(self) -> GoldenInt:
        """Image under ``tau -> 1 - tau``."""
        return GoldenInt(self.a + self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a + self.a * self.b - self.b * self.b

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def exact_div(self, other: GoldenInt | int) -> GoldenInt:
        o = GoldenInt.coerce(other)
        nrm = o.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Z[tau]")
        num = self * o.conjugate()
        if num.a % nrm or num.b % nrm:
            raise LrmError(f"{self} is not divisible by {o} in Z[tau]")
        return GoldenInt(num.a // nrm, num.b // nrm)

    def __pow__(self, e: int) -> GoldenInt:
        base = self
        if e < 0:
            if not self.is_unit():
                raise LrmError(f"{self} is not a unit, negative powers leave Z[tau]")
            base = self.conjugate() * self.norm()
            e = -e
        out = GoldenInt(1)
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def sign(self) -> int:
        """Exact sign of ``a + b*tau`` as a real number."""
        # 2(a + b tau) = (2a + b) + b sqrt(5)
        u, v = 2 * self.a + self.b, self.b
        su, sv = (u > 0) - (u < 0), (v > 0) - (v < 0)
        if su == sv or sv == 0:
            return su
        if su == 0:
            return sv
        cmp = u * u - 5 * v * v
        return su if cmp > 0 else (sv if cmp < 0 else 0)

    def __lt__(self, other: GoldenInt | int) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: GoldenInt | int) -> bool:
        return (self - other).sign() <= 0

    def __float__(self) -> float:
        return self.a + self.b * (1 + _SQRT5) / 2

    @property
    def is_integer(self) -> bool:
        return self.b == 0

    def __int__(self) -> int:
        if self.b:
            raise LrmError(f"{self} is not an integer")
        return self.a

    def __str__(self) -> str:
        if not self.b:
            return str(self.a)
        t = "t" if self.b == 1 else ("-t" if self.b == -1 else f"{self.b}t")
        if not self.a:
            return t
        return f"{self.a}{'+' if self.b > 0 else ''}{t}"


_TERM_RE = re.compile(r"([+-]?)(\d*)\*?(tau|t|τ)?")


def parse_golden(text: str) -> GoldenInt:
    """Read ``"1"``, ``"t"``, ``"1+t"``, ``"2t-1"`` (``tau`` and ``τ`` also accepted)."""
    s = text.replace(" ", "")
    if not s:
        raise LrmError("empty quantum dimension")
    pos, a, b = 0, 0, 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise LrmError(f"cannot parse quantum dimension {text!r}; use forms like 1, t, 1+t, 2t")
        sign = -1 if m.group(1) == "-" else 1
        coef = int(m.group(2)) if m.group(2) else 1
        if m.group(3):
            b += sign * coef
        else:
            a += sign * coef
        pos = m.end()
    return GoldenInt(a, b)


@dataclass(frozen=True)
class AnyonModel:
    name: str
    dims: tuple[GoldenInt, ...]

    def __post_init__(self) -> None:
        dims = tuple(GoldenInt.coerce(d) for d in self.dims)
        if not dims:
            raise LrmError("an anyon model needs at least one anyon")
        if dims[0] != GoldenInt(1):
            raise LrmError(f"the vacuum dimension d_0 must be 1, got {dims[0]}")
        for i, d in enumerate(dims):
            if d < 1:
                raise LrmError(f"quantum dimension d_{i} = {d} is below 1")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim_sq(self) -> GoldenInt:
        return sum((d * d for d in self.dims), GoldenInt(0))

    @classmethod
    def fibonacci(cls) -> AnyonModel:
        """Doubled Fibonacci order."""
        t = GoldenInt.tau()
        return cls("fibonacci", (GoldenInt(1), t, t, t * t))

    @classmethod
    def s3(cls) -> AnyonModel:
        """Quantum double of ``S_3``."""
        return cls("s3", tuple(GoldenInt(d) for d in (1, 1, 2, 3, 3, 2, 2, 2)))

    @classmethod
    def toric(cls) -> AnyonModel:
        return cls("toric", tuple(GoldenInt(1) for _ in range(4)))

    @classmethod
    def parse(cls, spec: str) -> AnyonModel:
        """``fibonacci``, ``s3``, ``toric`` or ``dims:<comma list>``."""
        key = spec.strip().lower()
        builtin = {"fibonacci": cls.fibonacci, "fib": cls.fibonacci, "s3": cls.s3, "toric": cls.toric}
        if key in builtin:
            return builtin[key]()
        if key.startswith("dims:"):
            parts = [p for p in spec.split(":", 1)[1].split(",") if p.strip()]
            return cls(spec.strip(), tuple(parse_golden(p) for p in parts))
        raise LrmError(f"unknown anyon model {spec!r}; expected fibonacci, s3, toric or dims:<list>")


# --------------------------------------------------------------------------- factorization


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for ``n < 3.3e24`` and overwhelmingly reliable above."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random, budget: list[int]) -> int:
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            budget[0] -= r
            if budget[0] < 0:
                raise CapExceeded("Pollard rho iterations", RHO_ITERATION_BUDGET - budget[0], RHO_ITERATION_BUDGET)
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int, budget: int = RHO_ITERATION_BUDGET) -> list[int]:
    """Prime factors of ``n >= 1`` with multiplicity, ascending."""
    if n < 1:
        raise LrmError(f"can only factor positive integers, got {n}")
    out: list[int] = []
    for p in (2, 3, 5):
        while n % p == 0:
            out.append(p)
            n //= p
    # wheel over residues coprime to 30
    p, steps, i = 7, (4, 2, 4, 2, 4, 6, 2, 6), 0
    limit = TRIAL_DIVISION_LIMIT
    while p <= limit and p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += steps[i]
        i = (i + 1) % 8
    if n == 1:
        return out
    rng = random.Random(0)
    left = [budget]
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out.append(m)
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_brent(m, rng, left)
        stack += [d, m // d]
    return sorted(out)


def strip_common(n: int, modulus: int) -> int:
    """``n`` with every prime factor of ``modulus`` removed."""
    if modulus < 1:
        raise LrmError("local dimensions must be positive")
    g = math.gcd(n, modulus)
    while g > 1:
        n //= g
        g = math.gcd(n, g)
    return n


# --------------------------------------------------------------------------- degeneracy


@dataclass(frozen=True)
class GsdReport:
    model: str
    genus: int
    gsd: int

    @cached_property
    def prime_factors(self) -> tuple[int, ...]:
        return tuple(factorize(self.gsd))

    def verdict(self, local_dims: Sequence[int]) -> bool:
        return strong_lrm_verdict(self, local_dims)

    def to_dict(self, local_dims: Sequence[int] | None = None, factor: bool = True) -> dict:
        out: dict = {"model": self.model, "genus": self.genus, "gsd": self.gsd}
        if factor:
            try:
                out["prime_factors"] = list(self.prime_factors)
            except CapExceeded as exc:
                out["prime_factors"] = None
                out["factorization_error"] = str(exc)
        if local_dims is not None:
            out["local_config"] = list(local_dims)
            out["verdict"] = self.verdict(local_dims)
        return out


def gsd(model: AnyonModel, genus: int) -> GsdReport:
    if genus < 1:
        raise LrmError(f"genus must be at least 1, got {genus}")
    dsq = model.total_dim_sq
    total = GoldenInt(0)
    for d in model.dims:
        try:
            ratio = dsq.exact_div(d * d)
        except LrmError as exc:
            raise LrmError(f"D^2 / d^2 for d = {d} is not an integer in Z[tau]; the quantum dimensions are inconsistent") from exc
        total = total + ratio ** (genus - 1)
    if not total.is_integer:
        raise LrmError(f"degeneracy {total} is not an integer; the quantum dimensions are inconsistent")
    return GsdReport(model.name, genus, total.a)


def lucas_fibonacci(n: int) -> tuple[int, int]:
    """``(F_n, L_n)`` by fast doubling."""
    if n < 0:
        raise LrmError("index must be non-negative")

    def fib(k: int) -> tuple[int, int]:
        if k == 0:
            return 0, 1
        a, b = fib(k >> 1)
        c = a * (2 * b - a)
        d = a * a + b * b
        return (d, c + d) if k & 1 else (c, d)

    f, f1 = fib(n)
    return f, 2 * f1 - f


def fibonacci_gsd_closed(genus: int) -> int:
    if genus < 1:
        raise LrmError(f"genus must be at least 1, got {genus}")
    f, lucas = lucas_fibonacci(genus - 1)
    if genus % 2:
        return 5 ** (genus - 1) * lucas * lucas
    return 5**genus * f * f


def s3_gsd_closed(genus: int) -> int:
    if genus < 1:
        raise LrmError(f"genus must be at least 1, got {genus}")
    e = 2 * genus - 2
    return 2 * 6**e + 4 * 3**e + 2 * 2**e


def strong_lrm_verdict(report: GsdReport | int, local_dims: Iterable[int]) -> bool:
    """True iff the degeneracy has a prime factor dividing no ``q_i``."""
    value = report.gsd if isinstance(report, GsdReport) else int(report)
    dims = list(local_dims)
    if not dims or any(q < 2 for q in dims):
        raise LrmError(f"local dimensions must all be at least 2, got {dims}")
    return strip_common(value, math.prod(dims)) > 1
