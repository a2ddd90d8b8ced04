"""Phase-tracked generalized Pauli operators.

Two representations live here:

* :class:`PauliOperator` works on any :class:`LocalConfiguration` (mixed qudit
  dimensions) and stores per-site exponent tuples.
* :class:`QubitPauli` is the all-qubit fast path: the X and Z parts are packed
  into Python integers used as bit sets, so symplectic products reduce to a few
  word-parallel ``&``/``^`` operations and a popcount.

Phase convention
----------------
An operator is ``exp(i*pi*phase/L) * (site_0 (x) site_1 (x) ...)`` where ``L`` is
the lcm of the local dimensions. A site of dimension ``q >= 3`` carries
``X^a Z^b``. A qubit site carries ``i^(a*b) X^a Z^b``, so ``(a, b) = (1, 1)`` is
the Hermitian ``Y`` and every string over ``{I, X, Y, Z}`` has phase 0. On an
all-qubit configuration ``L = 2`` and the phase is the exponent of ``i``.

``Z X = exp(2*pi*i/q) X Z`` on each site.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ConfigurationMismatch, LrmError

__all__ = [
    "LocalConfiguration",
    "PauliOperator",
    "QubitPauli",
    "AnyPauli",
    "multiply",
    "commutation_phase",
    "commutes",
    "order",
    "support",
    "weight",
    "parse_pauli",
    "render_pauli",
    "to_general",
    "to_qubit",
    "pauli_matrix",
]


@dataclass(frozen=True)
class LocalConfiguration:
    """Tensor structure ``(q_1, ..., q_m)`` of the Hilbert space."""

    dims: tuple[int, ...]
    lcm: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        dims = tuple(int(q) for q in self.dims)
        if any(q < 2 for q in dims):
            raise LrmError(f"every local dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "lcm", reduce(math.lcm, dims, 1))

    @classmethod
    def qubits(cls, n: int) -> LocalConfiguration:
        return cls((2,) * n)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def is_qubit(self) -> bool:
        return all(q == 2 for q in self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)


@dataclass(frozen=True)
class PauliOperator:
    """Generalized Pauli string on an arbitrary local configuration.

    ``phase`` is reduced mod ``2L``; ``x[j]`` and ``z[j]`` are reduced mod ``dims[j]``.
    """

    config: LocalConfiguration
    phase: int
    x: tuple[int, ...]
    z: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = self.config.dims
        if len(self.x) != len(dims) or len(self.z) != len(dims):
            raise LrmError(
                f"exponent vectors of length {len(self.x)}/{len(self.z)} "
                f"do not match {len(dims)} sites"
            )
        object.__setattr__(self, "phase", int(self.phase) % (2 * self.config.lcm))
        object.__setattr__(self, "x", tuple(int(a) % q for a, q in zip(self.x, dims)))
        object.__setattr__(self, "z", tuple(int(b) % q for b, q in zip(self.z, dims)))

    @classmethod
    def identity(cls, config: LocalConfiguration) -> PauliOperator:
        zeros = (0,) * config.n
        return cls(config, 0, zeros, zeros)

    @property
    def n(self) -> int:
        return self.config.n

    def is_identity(self) -> bool:
        return self.phase == 0 and not any(self.x) and not any(self.z)

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def __pow__(self, exponent: int) -> PauliOperator:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = PauliOperator.identity(self.config)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> PauliOperator:
        return self ** (order(self) - 1)

    def with_phase(self, phase: int) -> PauliOperator:
        return PauliOperator(self.config, phase, self.x, self.z)

    def __str__(self) -> str:
        return render_pauli(self)


@dataclass(frozen=True, slots=True)
class QubitPauli:
    """All-qubit Pauli string ``i^phase * sigma_0 (x) ... (x) sigma_{n-1}``.

    Bit ``j`` of ``x`` / ``z`` is site ``j``; ``(1, 1)`` is ``Y``.
    """

    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self) -> None:
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise LrmError(f"bit vectors exceed {self.n} qubits")
        object.__setattr__(self, "phase", self.phase & 3)

    @classmethod
    def identity(cls, n: int) -> QubitPauli:
        return cls(n, 0, 0, 0)

    @classmethod
    def from_sites(cls, n: int, sites: dict[int, str], phase: int = 0) -> QubitPauli:
        """Build from a sparse ``{site: 'X'|'Y'|'Z'}`` map."""
        x = z = 0
        for j, letter in sites.items():
            bx, bz = _LETTER_BITS[letter]
            x |= bx << j
            z |= bz << j
        return cls(n, x, z, phase)

    @property
    def config(self) -> LocalConfiguration:
        return LocalConfiguration.qubits(self.n)

    def is_identity(self) -> bool:
        return self.phase == 0 and not self.x and not self.z

    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    def __mul__(self, other: QubitPauli) -> QubitPauli:
        if self.n != other.n:
            raise ConfigurationMismatch(f"{self.n} vs {other.n} qubits")
        x1, z1, x2, z2 = self.x, self.z, other.x, other.z
        x3, z3 = x1 ^ x2, z1 ^ z2
        ph = (
            self.phase
            + other.phase
            + (x1 & z1).bit_count()
            + (x2 & z2).bit_count()
            + 2 * (z1 & x2).bit_count()
            - (x3 & z3).bit_count()
        )
        return QubitPauli(self.n, x3, z3, ph)

    def __pow__(self, exponent: int) -> QubitPauli:
        exponent %= 4
        result = QubitPauli.identity(self.n)
        for _ in range(exponent):
            result = result * self
        return result

    def inverse(self) -> QubitPauli:
        return self ** (order(self) - 1)

    def anticommutes(self, other: QubitPauli) -> bool:
        return bool(((self.x & other.z).bit_count() ^ (self.z & other.x).bit_count()) & 1)

    def with_phase(self, phase: int) -> QubitPauli:
        return QubitPauli(self.n, self.x, self.z, phase)

    def unsigned(self) -> QubitPauli:
        return QubitPauli(self.n, self.x, self.z, 0)

    @property
    def support_mask(self) -> int:
        return self.x | self.z

    def __str__(self) -> str:
        return render_pauli(self)


AnyPauli = Union[PauliOperator, QubitPauli]

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_QUBIT_PHASE_TOKENS = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_QUBIT_PHASE_RENDER = {0: "", 1: "+i", 2: "-", 3: "-i"}


def _check_same(p: AnyPauli, q: AnyPauli) -> None:
    if type(p) is not type(q):
        raise ConfigurationMismatch(
            f"cannot combine {type(p).__name__} with {type(q).__name__}"
        )
    if isinstance(p, PauliOperator) and p.config.dims != q.config.dims:
        raise ConfigurationMismatch(f"configurations {p.config.dims} and {q.config.dims} differ")
    if isinstance(p, QubitPauli) and p.n != q.n:
        raise ConfigurationMismatch(f"{p.n} vs {q.n} qubits")


def multiply(p: AnyPauli, q: AnyPauli) -> AnyPauli:
    """Group product ``p * q`` with exact phase."""
    _check_same(p, q)
    if isinstance(p, QubitPauli):
        return p * q
    cfg = p.config
    L = cfg.lcm
    ph = p.phase + q.phase
    xs = []
    zs = []
    for qd, a, b, c, d in zip(cfg.dims, p.x, p.z, q.x, q.z):
        # Z^b X^c = w^(bc) X^c Z^b with w = exp(2 pi i / qd) = exp(i pi (2L/qd) / L)
        ph += 2 * (L // qd) * b * c
        a2 = (a + c) % qd
        b2 = (b + d) % qd
        if qd == 2:
            ph += (L // 2) * (a * b + c * d - a2 * b2)
        xs.append(a2)
        zs.append(b2)
    return PauliOperator(cfg, ph, tuple(xs), tuple(zs))


def commutation_phase(p: AnyPauli, q: AnyPauli) -> int:
    """Return ``t`` (mod ``2L``) with ``p q = exp(i pi t / L) q p``."""
    _check_same(p, q)
    if isinstance(p, QubitPauli):
        return 2 if p.anticommutes(q) else 0
    cfg = p.config
    L = cfg.lcm
    t = 0
    for qd, a, b, c, d in zip(cfg.dims, p.x, p.z, q.x, q.z):
        t += 2 * (L // qd) * (b * c - a * d)
    return t % (2 * L)


def commutes(p: AnyPauli, q: AnyPauli) -> bool:
    return commutation_phase(p, q) == 0


def order(p: AnyPauli) -> int:
    """Smallest ``r >= 1`` with ``p**r`` equal to the identity (phase included)."""
    if isinstance(p, QubitPauli):
        if not p.x and not p.z:
            return {0: 1, 2: 2}.get(p.phase, 4)
        return 2 if p.phase % 2 == 0 else 4
    power = p
    for r in range(1, 2 * p.config.lcm + 1):
        if power.is_identity():
            return r
        power = power * p
    raise AssertionError(f"order of {p} exceeds 2L")  # pragma: no cover


def support(p: AnyPauli) -> frozenset[int]:
    if isinstance(p, QubitPauli):
        mask = p.x | p.z
        return frozenset(j for j in range(p.n) if mask >> j & 1)
    return frozenset(j for j, (a, b) in enumerate(zip(p.x, p.z)) if a or b)


def weight(p: AnyPauli) -> int:
    if isinstance(p, QubitPauli):
        return (p.x | p.z).bit_count()
    return len(support(p))


def to_general(p: QubitPauli) -> PauliOperator:
    cfg = LocalConfiguration.qubits(p.n)
    xs = tuple(p.x >> j & 1 for j in range(p.n))
    zs = tuple(p.z >> j & 1 for j in range(p.n))
    return PauliOperator(cfg, p.phase, xs, zs)


def to_qubit(p: PauliOperator) -> QubitPauli:
    if not p.config.is_qubit:
        raise ConfigurationMismatch(f"configuration {p.config.dims} is not all-qubit")
    x = sum(a << j for j, a in enumerate(p.x))
    z = sum(b << j for j, b in enumerate(p.z))
    return QubitPauli(p.n, x, z, p.phase)


_TOKEN_RE = re.compile(r"x(\d+)z(\d+)")
_PHASE_PREFIX_RE = re.compile(r"^\[(-?\d+)\]")


def parse_pauli(text: str, config: LocalConfiguration | None = None) -> AnyPauli:
    """Parse the text form of a Pauli operator.

    Qubit strings use the letters ``IXYZ`` with an optional leading ``+``, ``-``,
    ``+i`` or ``-i`` and parse to :class:`QubitPauli`. General strings are dot
    separated ``x<a>z<b>`` site tokens, optionally prefixed by ``[k]`` for the
    phase exponent, and need ``config``.
    """
    s = text.strip().replace("−", "-")
    if not s:
        raise LrmError("empty Pauli string")
    if s[0] in "[x":
        return _parse_general(s, config)
    m = re.fullmatch(r"([+-]?i?)([IXYZ]+)", s)
    if m is None:
        bad = sorted(set(s) - set("IXYZ+-i"))
        raise LrmError(f"invalid character(s) {bad} in Pauli string {text!r}")
    sign, letters = m.groups()
    if config is not None:
        if not config.is_qubit:
            raise ConfigurationMismatch(
                f"letter strings need an all-qubit configuration, got {config.dims}"
            )
        if config.n != len(letters):
            raise LrmError(f"length mismatch: {len(letters)} letters for {config.n} sites")
    x = z = 0
    for j, ch in enumerate(letters):
        bx, bz = _LETTER_BITS[ch]
        x |= bx << j
        z |= bz << j
    return QubitPauli(len(letters), x, z, _QUBIT_PHASE_TOKENS[sign])


def _parse_general(s: str, config: LocalConfiguration | None) -> PauliOperator:
    if config is None:
        raise LrmError("site-token Pauli strings need an explicit local configuration")
    phase = 0
    m = _PHASE_PREFIX_RE.match(s)
    if m:
        phase = int(m.group(1))
        s = s[m.end():]
    tokens = s.split(".")
    if len(tokens) != config.n:
        raise LrmError(f"length mismatch: {len(tokens)} tokens for {config.n} sites")
    xs, zs = [], []
    for j, (tok, q) in enumerate(zip(tokens, config.dims)):
        tm = _TOKEN_RE.fullmatch(tok)
        if tm is None:
            raise LrmError(f"invalid site token {tok!r} at site {j}")
        a, b = int(tm.group(1)), int(tm.group(2))
        if a >= q or b >= q:
            raise LrmError(f"exponent out of range at site {j}: x{a}z{b} with dimension {q}")
        xs.append(a)
        zs.append(b)
    if not 0 <= phase < 2 * config.lcm:
        raise LrmError(f"phase exponent {phase} out of range [0, {2 * config.lcm})")
    return PauliOperator(config, phase, tuple(xs), tuple(zs))


def render_pauli(p: AnyPauli) -> str:
    if isinstance(p, QubitPauli):
        letters = "".join(
            _BITS_LETTER[(p.x >> j & 1, p.z >> j & 1)] for j in range(p.n)
        )
        return _QUBIT_PHASE_RENDER[p.phase] + letters
    body = ".".join(f"x{a}z{b}" for a, b in zip(p.x, p.z))
    return f"[{p.phase}]{body}" if p.phase else body


def _site_matrix(q: int, a: int, b: int) -> np.ndarray:
    shift = np.roll(np.eye(q), 1, axis=0)  # |j> -> |j+1>
    clock = np.diag(np.exp(2j * np.pi * np.arange(q) / q))
    m = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
    if q == 2 and a and b:
        m = 1j * m
    return m


def pauli_matrix(p: AnyPauli) -> np.ndarray:
    """Dense matrix; site 0 is the most significant tensor factor."""
    if isinstance(p, QubitPauli):
        p = to_general(p)
    out = np.array([[np.exp(1j * np.pi * p.phase / p.config.lcm)]])
    for q, a, b in zip(p.config.dims, p.x, p.z):
        out = np.kron(out, _site_matrix(q, a, b))
    return out


def qubit_paulis_on(n: int, sites: Sequence[int]) -> Iterable[QubitPauli]:
    """All ``3**len(sites)`` phase-0 qubit Paulis acting nontrivially on exactly ``sites``.

    Ordering is lexicographic in the site order with ``X < Y < Z``.
    """
    for letters in itertools.product("XYZ", repeat=len(sites)):
        yield QubitPauli.from_sites(n, dict(zip(sites, letters)))
