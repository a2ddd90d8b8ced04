"""Stabilizer groups and codes.

Qubit groups are handled symbolically: generators are reduced to an echelon form
over GF(2) (rows packed as ``x | z << n`` integers) while recording, for every
row, which generators were multiplied together. Phases are never guessed; they
are recovered by multiplying the recorded generator word out exactly.

Groups on other local configurations are small by assumption and are handled by
enumerating the generated group.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import CapExceeded, ConfigurationMismatch, LrmError, UnsupportedConfiguration, ValidationError
from .pauli import (
    AnyPauli,
    LocalConfiguration,
    PauliOperator,
    QubitPauli,
    commutation_phase,
    pauli_matrix,
    to_qubit,
)

DENSE_DIM_CAP = 2**14
ENUMERATION_CAP = 2**18
BRUTE_DISTANCE_MAX_N = 16
QUDIT_COMPLETION_DIM_CAP = 512


# --------------------------------------------------------------------------- GF(2)


class _Echelon:
    """Incremental GF(2) row echelon form with witness tracking.

    Each stored row has a distinct leading (highest) bit. ``witness`` is a bit mask
    over the original generator indices whose product (up to phase) equals the row.
    """

    def __init__(self) -> None:
        self._pivots: list[int] = []  # ascending
        self._rows: dict[int, tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, v: int, w: int = 0) -> tuple[int, int]:
        for piv in reversed(self._pivots):
            if not v:
                break
            if v >> piv & 1:
                row, rw = self._rows[piv]
                v ^= row
                w ^= rw
        return v, w

    def insert(self, v: int, w: int) -> tuple[int, int] | None:
        """Reduce ``v``; store it if independent. Returns the dependency witness otherwise."""
        v, w = self.reduce(v, w)
        if v == 0:
            return (0, w)
        piv = v.bit_length() - 1
        bisect.insort(self._pivots, piv)
        self._rows[piv] = (v, w)
        return None

    def rows(self) -> list[tuple[int, int]]:
        return [self._rows[p] for p in self._pivots]

    def copy(self) -> _Echelon:
        other = _Echelon()
        other._pivots = list(self._pivots)
        other._rows = dict(self._rows)
        return other


def gf2_nullspace(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of ``{v : popcount(v & r) even for every r}``, ordered by free column."""
    reduced: list[int] = []
    pivot_cols: list[int] = []
    work = [r for r in rows if r]
    for col in range(ncols):
        bit = 1 << col
        hit = next((i for i, r in enumerate(work) if r & bit), None)
        if hit is None:
            continue
        row = work.pop(hit)
        work = [r ^ row if r & bit else r for r in work]
        reduced = [r ^ row if r & bit else r for r in reduced]
        reduced.append(row)
        pivot_cols.append(col)
    pivot_set = set(pivot_cols)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, p in zip(reduced, pivot_cols):
            if r >> f & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def _pack(p: QubitPauli) -> int:
    return p.x | (p.z << p.n)


def _unpack(v: int, n: int, phase: int = 0) -> QubitPauli:
    mask = (1 << n) - 1
    return QubitPauli(n, v & mask, v >> n, phase)


def _swap(v: int, n: int) -> int:
    mask = (1 << n) - 1
    return (v >> n) | ((v & mask) << n)


# --------------------------------------------------------------------------- groups


@dataclass(frozen=True)
class Diagnostics:
    """Outcome of :func:`validate`."""

    ok: bool
    message: str
    size: int | None
    rank: int | None
    pair: tuple[int, int] | None = None


class StabilizerGroup:
    """Group generated by a list of Pauli operators on one local configuration."""

    def __init__(
        self,
        generators: Sequence[AnyPauli],
        config: LocalConfiguration | None = None,
    ) -> None:
        if config is None:
            if not generators:
                raise LrmError("an empty generator list needs an explicit configuration")
            config = generators[0].config
        self.config = config
        gens: list[AnyPauli] = []
        for g in generators:
            if g.config.dims != config.dims:
                raise ConfigurationMismatch(
                    f"generator on {g.config.dims} does not match configuration {config.dims}"
                )
            if config.is_qubit and isinstance(g, PauliOperator):
                g = to_qubit(g)
            gens.append(g)
        self.generators: tuple[AnyPauli, ...] = tuple(gens)
        self.is_qubit = config.is_qubit
        if self.is_qubit:
            self._build_qubit()
        else:
            self._build_general()

    # ---- construction

    def _build_qubit(self) -> None:
        n = self.config.n
        ech = _Echelon()
        dependencies = []
        for i, g in enumerate(self.generators):
            dep = ech.insert(_pack(g), 1 << i)
            if dep is not None:
                dependencies.append(dep[1])
        self._echelon = ech
        self._dependencies = dependencies
        self._swapped = [_swap(_pack(g), n) for g in self.generators]
        self._diagnostics = self._diagnose_qubit()

    def _diagnose_qubit(self) -> Diagnostics:
        gens = self.generators
        rank = len(self._echelon)
        for i, g in enumerate(gens):
            if g.phase % 2:
                return Diagnostics(
                    False, f"generator {i} is not Hermitian, its square is -I", None, rank
                )
        for i, j in itertools.combinations(range(len(gens)), 2):
            if gens[i].anticommutes(gens[j]):
                return Diagnostics(
                    False, f"non-Abelian: generators {i} and {j} anticommute", None, rank, (i, j)
                )
        for w in self._dependencies:
            prod = self.word_product(w)
            if prod.phase != 0:
                idx = [k for k in range(len(gens)) if w >> k & 1]
                return Diagnostics(
                    False,
                    f"group contains {'-I' if prod.phase == 2 else 'a non-trivial phase times I'}"
                    f" (product of generators {idx})",
                    None,
                    rank,
                )
        return Diagnostics(True, "OK", 2**rank, rank)

    def _build_general(self) -> None:
        cfg = self.config
        for i, j in itertools.combinations(range(len(self.generators)), 2):
            if commutation_phase(self.generators[i], self.generators[j]) != 0:
                self._elements = None
                self._diagnostics = Diagnostics(
                    False,
                    f"non-Abelian: generators {i} and {j} do not commute",
                    None,
                    None,
                    (i, j),
                )
                return
        elements = {PauliOperator.identity(cfg)}
        rank = 0
        for g in self.generators:
            if g in elements:
                continue
            rank += 1
            frontier = list(elements)
            while frontier:
                new = []
                for e in frontier:
                    h = e * g
                    if h not in elements:
                        elements.add(h)
                        new.append(h)
                        if len(elements) > ENUMERATION_CAP:
                            raise CapExceeded("enumerated group size", len(elements), ENUMERATION_CAP)
                frontier = new
        self._elements = frozenset(elements)
        bad = [e for e in elements if not any(e.x) and not any(e.z) and e.phase != 0]
        if bad:
            self._diagnostics = Diagnostics(
                False,
                f"group contains exp(i*pi*{min(e.phase for e in bad)}/{cfg.lcm}) * I",
                None,
                rank,
            )
        else:
            self._diagnostics = Diagnostics(True, "OK", len(elements), rank)

    # ---- queries

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def diagnostics(self) -> Diagnostics:
        return self._diagnostics

    @property
    def is_valid(self) -> bool:
        return self._diagnostics.ok

    @property
    def rank(self) -> int:
        return self._diagnostics.rank

    @property
    def size(self) -> int:
        if not self.is_valid:
            raise ValidationError(self._diagnostics.message)
        return self._diagnostics.size

    def word_product(self, witness: int) -> QubitPauli:
        """Exact product of the generators selected by bit mask ``witness`` (index order)."""
        out = QubitPauli.identity(self.n)
        k = 0
        while witness:
            if witness & 1:
                out = out * self.generators[k]
            witness >>= 1
            k += 1
        return out

    @cached_property
    def basis(self) -> tuple[AnyPauli, ...]:
        """Independent elements generating the group, with exact phases."""
        if self.is_qubit:
            return tuple(self.word_product(w) for _, w in self._echelon.rows())
        return self.generators

    def in_normalizer(self, p: AnyPauli) -> bool:
        if self.is_qubit:
            if isinstance(p, PauliOperator):
                p = to_qubit(p)
            if p.n != self.n:
                raise ConfigurationMismatch(f"{p.n} vs {self.n} qubits")
            v = _pack(p)
            return not any((v & s).bit_count() & 1 for s in self._swapped)
        return all(commutation_phase(p, g) == 0 for g in self.generators)

    def member_up_to_phase(self, p: AnyPauli) -> int | None:
        """Phase exponent ``e`` with ``i^e * p`` in the group, or ``None``."""
        if not self.is_qubit:
            raise UnsupportedConfiguration(
                "phase-resolved membership is implemented for qubit groups only"
            )
        if isinstance(p, PauliOperator):
            p = to_qubit(p)
        if p.n != self.n:
            raise ConfigurationMismatch(f"{p.n} vs {self.n} qubits")
        residual, w = self._echelon.reduce(_pack(p))
        if residual:
            return None
        return (self.word_product(w).phase - p.phase) % 4

    def contains(self, p: AnyPauli) -> bool:
        if self.is_qubit:
            return self.member_up_to_phase(p) == 0
        return p in self._elements

    def elements(self) -> Iterator[AnyPauli]:
        if not self.is_valid:
            raise ValidationError(self._diagnostics.message)
        if not self.is_qubit:
            yield from sorted(self._elements, key=lambda e: (e.x, e.z, e.phase))
            return
        if self.size > ENUMERATION_CAP:
            raise CapExceeded("group size", self.size, ENUMERATION_CAP)
        basis = self.basis
        for bits in range(2 ** len(basis)):
            out = QubitPauli.identity(self.n)
            for k, g in enumerate(basis):
                if bits >> k & 1:
                    out = out * g
            yield out

    def with_generators(self, extra: Sequence[AnyPauli]) -> StabilizerGroup:
        return StabilizerGroup(list(self.generators) + list(extra), self.config)


# --------------------------------------------------------------------------- codes


@dataclass(frozen=True)
class LogicalBasis:
    """Logical ``X`` and ``Z`` representatives, paired by index."""

    logical_x: tuple[QubitPauli, ...]
    logical_z: tuple[QubitPauli, ...]

    @property
    def k(self) -> int:
        return len(self.logical_x)

    def encode(self, xmask: int, zmask: int) -> QubitPauli:
        """Image of the Hermitian logical Pauli with bit masks ``(xmask, zmask)``.

        Per logical qubit ``Y = i X Z``, so the product picks up ``i^popcount(x & z)``.
        """
        n = self.logical_x[0].n
        out = QubitPauli(n, 0, 0, (xmask & zmask).bit_count())
        for i in range(self.k):
            if xmask >> i & 1:
                out = out * self.logical_x[i]
            if zmask >> i & 1:
                out = out * self.logical_z[i]
        return out

    def check(self, group: StabilizerGroup) -> None:
        """Raise :class:`ValidationError` on the first violated invariant."""
        if len(self.logical_z) != self.k:
            raise ValidationError("logical_x and logical_z have different lengths")
        ops = [("X", i, p) for i, p in enumerate(self.logical_x)]
        ops += [("Z", i, p) for i, p in enumerate(self.logical_z)]
        for kind, i, p in ops:
            if p.phase != 0:
                raise ValidationError(f"logical {kind}{i + 1} must have phase 0")
            if not group.in_normalizer(p):
                raise ValidationError(f"logical {kind}{i + 1} does not commute with the stabilizers")
            if group.member_up_to_phase(p) is not None:
                raise ValidationError(f"logical {kind}{i + 1} lies in the stabilizer group")
        for (ka, i, a), (kb, j, b) in itertools.combinations(ops, 2):
            expected = ka != kb and i == j
            if a.anticommutes(b) != expected:
                rel = "anticommute" if expected else "commute"
                raise ValidationError(f"logical {ka}{i + 1} and {kb}{j + 1} must {rel}")


@dataclass(frozen=True)
class StabilizerCode:
    group: StabilizerGroup
    logicals: LogicalBasis | None = None
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.group.is_valid:
            raise ValidationError(self.group.diagnostics.message)
        if self.logicals is not None:
            if not self.group.is_qubit:
                raise UnsupportedConfiguration("logical bases are supported for qubit codes only")
            if self.logicals.k != self.k:
                raise ValidationError(
                    f"{self.logicals.k} logical pairs given but the code has k = {self.k}"
                )
            self.logicals.check(self.group)

    @property
    def config(self) -> LocalConfiguration:
        return self.group.config

    @property
    def n(self) -> int:
        return self.group.n

    @property
    def code_dim(self) -> Fraction:
        return Fraction(self.config.total_dim, self.group.size)

    @property
    def k(self) -> int | None:
        if not self.group.is_qubit:
            return None
        return self.n - self.group.rank

    def require_qubit(self) -> None:
        if not self.group.is_qubit:
            raise UnsupportedConfiguration(
                f"operation needs a qubit code, configuration is {self.config.dims}"
            )

    def require_logicals(self) -> LogicalBasis:
        self.require_qubit()
        if self.logicals is None:
            raise LrmError(f"code {self.name or '<unnamed>'} has no logical basis")
        return self.logicals


# --------------------------------------------------------------------------- operations


def validate(group: StabilizerGroup) -> Diagnostics:
    return group.diagnostics


def member_up_to_phase(group: StabilizerGroup, p: AnyPauli) -> int | None:
    return group.member_up_to_phase(p)


def in_normalizer(group: StabilizerGroup, p: AnyPauli) -> bool:
    return group.in_normalizer(p)


def stabilizer_state_expectation(group: StabilizerGroup, p: QubitPauli) -> float:
    """``<S|p|S>`` for the stabilizer state of a maximal qubit group."""
    if not group.is_valid:
        raise ValidationError(group.diagnostics.message)
    if not group.is_qubit:
        raise UnsupportedConfiguration("stabilizer expectations are implemented for qubits only")
    if group.rank != group.n:
        raise LrmError(f"group of rank {group.rank} on {group.n} qubits is not maximal")
    if isinstance(p, PauliOperator):
        p = to_qubit(p)
    if not p.is_hermitian():
        raise LrmError("expectation requested for a non-Hermitian Pauli")
    e = group.member_up_to_phase(p)
    if e is None:
        return 0.0
    return 1.0 if e == 0 else -1.0


def complete_group(group: StabilizerGroup) -> StabilizerGroup:
    """Extend ``group`` to a maximal stabilizer group (``|G'| = prod q_i``).

    Qubits: at each step the first symplectic-complement basis vector (ordered by
    free column of the reduced echelon form) outside the group is added with phase 0.
    Other configurations: candidates are scanned in lexicographic exponent order
    and the smallest phase exponent that keeps the group valid is used.
    """
    if not group.is_valid:
        raise ValidationError(group.diagnostics.message)
    if group.is_qubit:
        return _complete_qubit(group)
    return _complete_general(group)


def _complete_qubit(group: StabilizerGroup) -> StabilizerGroup:
    n = group.n
    ech = group._echelon.copy()
    added: list[QubitPauli] = []
    while len(ech) < n:
        swapped = [_swap(row, n) for row, _ in ech.rows()]
        for v in gf2_nullspace(swapped, 2 * n):
            if ech.reduce(v)[0]:
                added.append(_unpack(v, n))
                ech.insert(v, 0)
                break
        else:  # pragma: no cover - the complement always contains a new element
            raise AssertionError("no extension found")
    return group.with_generators(added)


def _complete_general(group: StabilizerGroup) -> StabilizerGroup:
    cfg = group.config
    if cfg.total_dim > QUDIT_COMPLETION_DIM_CAP:
        raise CapExceeded("total dimension", cfg.total_dim, QUDIT_COMPLETION_DIM_CAP)
    current = group
    ranges = [range(q) for q in cfg.dims]
    while current.size < cfg.total_dim:
        patterns = {(e.x, e.z) for e in current.elements()}
        extended = None
        for xs in itertools.product(*ranges):
            for zs in itertools.product(*ranges):
                if (xs, zs) in patterns:
                    continue
                cand = PauliOperator(cfg, 0, xs, zs)
                if not current.in_normalizer(cand):
                    continue
                for s in range(2 * cfg.lcm):
                    trial = current.with_generators([cand.with_phase(s)])
                    if trial.is_valid:
                        extended = trial
                        break
                if extended is not None:
                    break
            if extended is not None:
                break
        if extended is None:  # pragma: no cover
            raise AssertionError("no extension found")
        current = extended
    return current


def brute_distance(code: StabilizerCode) -> int:
    """Minimum weight of a normalizer element outside the group (exhaustive)."""
    code.require_qubit()
    n = code.n
    if n > BRUTE_DISTANCE_MAX_N:
        raise CapExceeded("qubit count for brute_distance", n, BRUTE_DISTANCE_MAX_N)
    if code.k == 0:
        raise LrmError("code encodes no logical qubits; distance is undefined")
    group = code.group
    swapped = group._swapped
    for w in range(1, n + 1):
        for sites in itertools.combinations(range(n), w):
            for letters in itertools.product((1, 2, 3), repeat=w):
                x = z = 0
                for j, code_ in zip(sites, letters):
                    if code_ & 1:
                        x |= 1 << j
                    if code_ & 2:
                        z |= 1 << j
                v = x | (z << n)
                if any((v & s).bit_count() & 1 for s in swapped):
                    continue
                if group._echelon.reduce(v)[0]:
                    return w
    raise AssertionError("no logical operator found")  # pragma: no cover


# --------------------------------------------------------------------------- dense oracle


def _check_dense(config: LocalConfiguration) -> None:
    if config.total_dim > DENSE_DIM_CAP:
        raise CapExceeded("total Hilbert-space dimension", config.total_dim, DENSE_DIM_CAP)


def dense_codespace_projector(code: StabilizerCode | StabilizerGroup) -> np.ndarray:
    """Projector ``(1/|G|) sum_g g`` as a dense matrix."""
    group = code.group if isinstance(code, StabilizerCode) else code
    if not group.is_valid:
        raise ValidationError(group.diagnostics.message)
    _check_dense(group.config)
    dim = group.config.total_dim
    if group.is_qubit:
        proj = np.eye(dim, dtype=complex)
        for g in group.basis:
            proj = proj @ (np.eye(dim) + pauli_matrix(g)) / 2
        return proj
    acc = np.zeros((dim, dim), dtype=complex)
    for g in group.elements():
        acc += pauli_matrix(g)
    return acc / group.size


def _hermitian_paulis(k: int) -> Iterator[tuple[int, int]]:
    for xmask in range(2**k):
        for zmask in range(2**k):
            yield xmask, zmask


def dense_encode(code: StabilizerCode, rho: np.ndarray, logicals: LogicalBasis | None = None) -> np.ndarray:
    """Encoded density matrix ``(2^-k sum_Q Tr(Q rho) Qbar) Pi``."""
    basis = logicals or code.require_logicals()
    k = basis.k
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2**k, 2**k):
        raise LrmError(f"logical density matrix must be {2**k}x{2**k}, got {rho.shape}")
    _check_dense(code.config)
    dim = 2**code.n
    acc = np.zeros((dim, dim), dtype=complex)
    for xmask, zmask in _hermitian_paulis(k):
        q = QubitPauli(k, xmask, zmask)
        coeff = np.trace(pauli_matrix(q) @ rho).real
        if coeff == 0:
            continue
        acc += coeff * pauli_matrix(basis.encode(xmask, zmask))
    return acc / 2**k @ dense_codespace_projector(code)


def dense_expectation(state: np.ndarray, p: AnyPauli) -> complex:
    """``<psi|p|psi>`` for a state vector or ``Tr(rho p)`` for a density matrix."""
    state = np.asarray(state)
    m = pauli_matrix(p)
    if state.ndim == 1:
        return complex(np.vdot(state, m @ state))
    return complex(np.trace(state @ m))

