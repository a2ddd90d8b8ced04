"""Two-point correlations reachable from K EPR pairs by local measurements.

A symmetric pair state with ``<P x P> = b`` and ``<P x I> = <I x P> = c`` can be
prepared from ``K`` EPR pairs iff, with ``N = 2^K`` and ``t = (1+c)/2 * N``,

* c1: ``1 + 2c + b >= 0``
* c2: ``1 - 2c + b >= 0``
* c3(l): ``(1+2c+b)/4 * N <= l + (t-l)^2`` for ``l = 0..N-1``.

Only one ``l`` in c3 can bind: ``l + (t-l)^2`` steps by ``2 - 2(t-l)``, so its
minimum over integers sits at ``l = ceil(t) - 1`` (clipped to ``0..N-1``).
All arithmetic is exact on :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import LrmError
from .magic import reduced_density

Number = Fraction | int | float | str

EXHAUSTIVE_MAX_K = 10
WITNESS_MAX_K = 16
MIN_EPR_MAX_K = 62
DIAGNOSE_MAX_K = 20
DENSE_CNZ_MAX_N = 12
VERDICT_CERTIFIED = "LRM certified (EPR-correlation criterion)"
VERDICT_NOT_CERTIFIED = "not certified"


def as_fraction(value: Number) -> Fraction:
    """Exact rational; strings like ``"0.3333333"`` or ``"1/3"`` are read literally."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float) and not math.isfinite(value):
        raise LrmError(f"non-finite value {value}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise LrmError(f"cannot read {value!r} as a rational number") from exc


@dataclass(frozen=True)
class CorrelationPoint:
    b: Fraction
    c: Fraction
    pauli: str = "Z"

    def __post_init__(self) -> None:
        b, c = as_fraction(self.b), as_fraction(self.c)
        if not (-1 <= b <= 1 and -1 <= c <= 1):
            raise LrmError(f"correlations must lie in [-1, 1], got b = {b}, c = {c}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def to_dict(self) -> dict:
        return {"b": str(self.b), "c": str(self.c), "b_float": float(self.b), "c_float": float(self.c), "pauli": self.pauli}


@dataclass(frozen=True)
class Violation:
    constraint: str
    lhs: Fraction
    rhs: Fraction

    def to_dict(self) -> dict:
        return {"constraint": self.constraint, "lhs": str(self.lhs), "rhs": str(self.rhs),
                "lhs_float": float(self.lhs), "rhs_float": float(self.rhs)}


@dataclass(frozen=True)
class FeasibilityCertificate:
    point: CorrelationPoint
    K: int
    feasible: bool
    binding_l: int
    slack: Fraction
    violated: Violation | None = None
    witness: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None = None

    def to_dict(self) -> dict:
        out = {
            "b": str(self.point.b),
            "c": str(self.point.c),
            "K": self.K,
            "feasible": self.feasible,
            "binding_constraint": f"c3({self.binding_l})",
            "slack": float(self.slack),
            "violated": self.violated.to_dict() if self.violated else None,
        }
        if self.witness is not None:
            out["witness"] = {"E": [str(v) for v in self.witness[0]], "F": [str(v) for v in self.witness[1]]}
        return out


def _targets(point: CorrelationPoint, K: int) -> tuple[int, Fraction, Fraction]:
    size = 2**K
    t = (1 + point.c) / 2 * size
    target = (1 + 2 * point.c + point.b) / 4 * size
    return size, t, target


def binding_l(t: Fraction, size: int) -> int:
    return min(max(math.ceil(t) - 1, 0), size - 1)


def _quadratic(l: int, t: Fraction) -> Fraction:
    return l + (t - l) ** 2


def _check_k(K: int, limit: int | None = None) -> None:
    if not isinstance(K, int) or K < 1:
        raise LrmError(f"K must be a positive integer, got {K}")
    if limit is not None and K > limit:
        raise LrmError(f"K = {K} exceeds the limit of {limit}")


def feasible(point: CorrelationPoint, K: int, exhaustive: bool | None = None,
             with_witness: bool = True) -> FeasibilityCertificate:
    """Exact membership test; ``exhaustive`` scans every ``l`` (default for ``K <= 10``)."""
    _check_k(K)
    size, t, target = _targets(point, K)
    lin1 = 1 + 2 * point.c + point.b
    lin2 = 1 - 2 * point.c + point.b
    lb = binding_l(t, size)
    if exhaustive is None:
        exhaustive = K <= EXHAUSTIVE_MAX_K
    if exhaustive:
        quad = min(((_quadratic(l, t), l) for l in range(size)))
        if quad[1] != lb and quad[0] != _quadratic(lb, t):
            raise AssertionError(f"binding index {lb} disagrees with the scan minimum at {quad[1]}")
    rhs = _quadratic(lb, t)
    slack3 = (rhs - target) * 4 / size
    slack = min(lin1, lin2, slack3)
    violated = None
    if lin1 < 0:
        violated = Violation("c1", lin1, Fraction(0))
    elif lin2 < 0:
        violated = Violation("c2", lin2, Fraction(0))
    elif target > rhs:
        violated = Violation(f"c3({lb})", target, rhs)
    cert = FeasibilityCertificate(point, K, violated is None, lb, slack, violated)
    if cert.feasible and with_witness and K <= WITNESS_MAX_K:
        e, f = _build_witness(t, target, size)
        cert = FeasibilityCertificate(point, K, True, lb, slack, None, (e, f))
    return cert


def _aligned(t: Fraction, size: int) -> list[Fraction]:
    ones = min(math.floor(t), size)
    out = [Fraction(1)] * ones
    if ones < size:
        out.append(t - ones)
        out.extend([Fraction(0)] * (size - ones - 1))
    return out


def _build_witness(t: Fraction, target: Fraction, size: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    e = _aligned(t, size)
    f0 = e[::-1]
    lo = sum(a * b for a, b in zip(e, f0))
    hi = sum(a * a for a in e)
    lam = Fraction(1) if hi == lo else (target - lo) / (hi - lo)
    f = [(1 - lam) * a + lam * b for a, b in zip(f0, e)]
    return tuple(e), tuple(f)


def verify_witness(point: CorrelationPoint, K: int, e: Sequence[Fraction], f: Sequence[Fraction]) -> float:
    """Largest deviation from the trace targets; raises if an entry leaves ``[0, 1]``."""
    size, t, target = _targets(point, K)
    if len(e) != size or len(f) != size:
        raise LrmError(f"witness diagonals must have length {size}")
    for v in (*e, *f):
        if not 0 <= v <= 1:
            raise LrmError(f"POVM entry {v} outside [0, 1]")
    dev = [abs(sum(e) - t), abs(sum(f) - t), abs(sum(a * b for a, b in zip(e, f)) - target)]
    return float(max(dev))


def construct_povm(point: CorrelationPoint, K: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Diagonal effects ``E``, ``F`` reproducing ``point`` from ``K`` EPR pairs.

    ``E`` is the aligned profile ``(1, ..., 1, t - l, 0, ..., 0)``. ``F`` moves
    linearly from the reversed profile (overlap ``max(0, 2t - N)``) to ``E``
    (overlap ``l + (t - l)^2``); the overlap is linear in the mixing weight,
    so the target is hit exactly.
    """
    _check_k(K, WITNESS_MAX_K)
    cert = feasible(point, K)
    if not cert.feasible:
        v = cert.violated
        raise LrmError(f"point is infeasible at K = {K}: {v.constraint} fails ({v.lhs} vs {v.rhs})")
    e, f = cert.witness
    if verify_witness(point, K, e, f) != 0:
        raise AssertionError("witness does not meet its trace targets")
    return e, f


def min_epr(point: CorrelationPoint, k_max: int = 20) -> int | None:
    _check_k(k_max, MIN_EPR_MAX_K)
    for K in range(1, k_max + 1):
        if feasible(point, K, exhaustive=False, with_witness=False).feasible:
            return K
    return None


def epr_cost_upper_bound(n_qubits: int) -> int:
    """EPR pairs sufficient for any bipartite stabilizer mixed state on ``n_qubits`` qubits."""
    if n_qubits < 1:
        raise LrmError(f"need at least one qubit, got {n_qubits}")
    return n_qubits


# --------------------------------------------------------------------------- families


def cnz_point(n: int) -> CorrelationPoint:
    """X correlations of two qubits of ``C^{n-1}Z |+^n>``."""
    if n < 3:
        raise LrmError(f"the C^(n-1)Z family needs n >= 3, got {n}")
    v = 1 - Fraction(1, 2 ** (n - 2))
    return CorrelationPoint(v, v, "X")


def ghz_point(alpha: Number) -> CorrelationPoint:
    """Z correlations of ``sqrt(1-alpha)|0...0> + sqrt(alpha)|1...1>``."""
    a = as_fraction(alpha)
    if not 0 <= a <= 1:
        raise LrmError(f"alpha must lie in [0, 1], got {a}")
    return CorrelationPoint(Fraction(1), 1 - 2 * a, "Z")


def cnz_state(n: int) -> np.ndarray:
    if not 3 <= n <= DENSE_CNZ_MAX_N:
        raise LrmError(f"dense C^(n-1)Z state needs 3 <= n <= {DENSE_CNZ_MAX_N}, got {n}")
    psi = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    psi[-1] *= -1
    return psi


_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def two_point(state: np.ndarray, i: int, j: int, pauli: str = "X") -> tuple[float, float, float]:
    """``(<P_i P_j>, <P_i>, <P_j>)`` from the two-site reduced density matrix."""
    n = int(round(math.log2(np.asarray(state).shape[0])))
    if i == j:
        raise LrmError("two_point needs distinct sites")
    red = reduced_density(state, [i, j], n)
    if i > j:
        red = red.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    p, eye = _PAULI[pauli], np.eye(2)
    vals = [np.trace(red @ np.kron(a, b)).real for a, b in ((p, p), (p, eye), (eye, p))]
    return tuple(float(v) for v in vals)


@dataclass(frozen=True)
class DiagnosisRow:
    K: int
    witness: str | None
    violated: str | None

    def to_dict(self) -> dict:
        return {"K": self.K, "witness": self.witness if self.witness is not None else "never within bounds",
                "violated": self.violated}


@dataclass(frozen=True)
class Diagnosis:
    family: str
    rows: tuple[DiagnosisRow, ...]

    @property
    def certified(self) -> bool:
        return all(r.witness is not None for r in self.rows)

    @property
    def verdict(self) -> str:
        return VERDICT_CERTIFIED if self.certified else VERDICT_NOT_CERTIFIED

    def to_dict(self) -> dict:
        return {"family": self.family, "verdict": self.verdict, "table": [r.to_dict() for r in self.rows]}


def parse_family(spec: str) -> tuple[str, Fraction | None]:
    """``cnz`` or ``ghz(alpha)`` / ``ghz:alpha``."""
    s = spec.strip().lower()
    if s == "cnz":
        return "cnz", None
    if s.startswith("ghz"):
        arg = s[3:].strip("():= ")
        if not arg:
            raise LrmError("ghz family needs alpha, e.g. ghz(1/3)")
        return "ghz", as_fraction(arg)
    raise LrmError(f"unknown family {spec!r}; expected cnz or ghz(alpha)")


def diagnose_family(family: str, k_max: int = 3, n_max: int | None = None) -> Diagnosis:
    """Per K, the smallest family parameter whose point leaves the K-pair region."""
    _check_k(k_max, DIAGNOSE_MAX_K)
    name, alpha = parse_family(family)
    rows = []
    for K in range(1, k_max + 1):
        if name == "cnz":
            top = n_max if n_max is not None else K + 40
            hit = None
            for n in range(3, top + 1):
                cert = feasible(cnz_point(n), K, exhaustive=False, with_witness=False)
                if not cert.feasible:
                    hit = (f"n={n}", cert.violated.constraint)
                    break
            rows.append(DiagnosisRow(K, *(hit or (None, None))))
        else:
            cert = feasible(ghz_point(alpha), K, exhaustive=False, with_witness=False)
            if cert.feasible:
                rows.append(DiagnosisRow(K, None, None))
            else:
                rows.append(DiagnosisRow(K, f"alpha={alpha}", cert.violated.constraint))
    label = "cnz" if name == "cnz" else f"ghz({alpha})"
    return Diagnosis(label, tuple(rows))


# --------------------------------------------------------------------------- boundary


@dataclass(frozen=True)
class BoundaryPoint:
    b: float
    c: float
    K: int
    binding: str


def _upper_b(c: Fraction, K: int) -> tuple[Fraction, int]:
    size = 2**K
    t = (1 + c) / 2 * size
    lb = binding_l(t, size)
    return 4 * _quadratic(lb, t) / size - 1 - 2 * c, lb


def region_boundary(K: int, samples: int = 64) -> list[BoundaryPoint]:
    """Closed polyline: upper (c3) boundary for ``c`` from -1 to 1, then lower (c1/c2) back.

    Slices are ``samples`` evenly spaced ``c`` values plus every kink where ``t`` is an integer.
    """
    _check_k(K, WITNESS_MAX_K)
    if samples < 16:
        raise LrmError(f"need at least 16 samples, got {samples}")
    size = 2**K
    cs = {Fraction(2 * j, samples - 1) - 1 for j in range(samples)}
    cs |= {Fraction(2 * j, size) - 1 for j in range(size + 1)}
    cs |= {Fraction(0)}
    ordered = sorted(cs)
    upper = []
    for c in ordered:
        b, lb = _upper_b(c, K)
        upper.append(BoundaryPoint(float(b), float(c), K, f"c3({lb})"))
    lower = []
    for c in reversed(ordered):
        b1, b2 = -1 - 2 * c, -1 + 2 * c
        b, tag = (b1, "c1") if b1 >= b2 else (b2, "c2")
        lower.append(BoundaryPoint(float(b), float(c), K, tag))
    return upper + lower


def boundary_csv(points: Sequence[BoundaryPoint]) -> str:
    lines = ["b,c,K,binding_constraint"]
    lines += [f"{p.b!r},{p.c!r},{p.K},{p.binding}" for p in points]
    return "\n".join(lines) + "\n"


def grid(steps: int) -> Iterator[CorrelationPoint]:
    """Rational ``steps x steps`` grid over ``[-1, 1]^2``."""
    for i in range(steps):
        for j in range(steps):
            yield CorrelationPoint(Fraction(2 * i, steps - 1) - 1, Fraction(2 * j, steps - 1) - 1)
