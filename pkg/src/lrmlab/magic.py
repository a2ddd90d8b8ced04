"""Pauli expectations of encoded logical states and the support-restricted weight f.

For a qubit code with stabilizer group ``G`` and logical basis ``Xbar_i, Zbar_i``,
every ``p`` in the normalizer factors as ``p = +-Qbar s`` with ``s`` in ``G`` and
``Q`` a logical Pauli, so ``<p> = +-Tr(Q rho)``. Outside the normalizer ``<p> = 0``.

``f(psi, R)`` sums ``<P>^2`` over the ``3^|R|`` Hermitian Paulis acting
non-trivially on exactly the sites ``R``. It is unchanged by tensor products of
single-qubit unitaries and is an integer on stabilizer states.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import CapExceeded, LrmError, ValidationError
from .pauli import PauliOperator, QubitPauli, pauli_matrix, render_pauli, to_qubit
from .stabilizer import ENUMERATION_CAP, LogicalBasis, StabilizerCode

REGION_CAP = 16
DENSE_LOGICAL_CAP = 12
DENSE_GATE_CAP = 6
DENSE_STATE_CAP = 10
INPUT_SAMPLE_CAP = 64
DEFAULT_TOLERANCE = 1e-6
SCAN_BLOCK_ROWS = 1 << 17

_I2 = np.eye(2, dtype=complex)
_SINGLE = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


# --------------------------------------------------------------------------- logical states


def _bloch_to_rho(v: Sequence[float]) -> np.ndarray:
    x, y, z = v
    return 0.5 * (_I2 + x * _SINGLE["X"] + y * _SINGLE["Y"] + z * _SINGLE["Z"])


def _rho_to_bloch(rho: np.ndarray) -> tuple[float, float, float]:
    return tuple(float(np.trace(rho @ _SINGLE[s]).real) for s in "XYZ")


def _check_density(rho: np.ndarray, what: str) -> None:
    if not np.allclose(rho, rho.conj().T, atol=1e-10):
        raise ValidationError(f"{what} is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-10:
        raise ValidationError(f"{what} does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-12:
        raise ValidationError(f"{what} is not positive semidefinite")


@dataclass(frozen=True)
class LogicalState:
    """State of ``k`` logical qubits, as a product of Bloch vectors or a dense matrix.

    Logical qubit ``i`` is bit ``i`` of the Pauli masks and the ``i``-th tensor
    factor (most significant first) of the dense matrix.
    """

    k: int
    bloch: tuple[tuple[float, float, float], ...] | None = None
    rho: np.ndarray | None = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self) -> None:
        if (self.bloch is None) == (self.rho is None):
            raise LrmError("give exactly one of bloch vectors or a dense matrix")
        if self.bloch is not None:
            if len(self.bloch) != self.k:
                raise LrmError(f"{len(self.bloch)} Bloch vectors for k = {self.k}")
            vecs = tuple(tuple(float(c) for c in v) for v in self.bloch)
            for i, v in enumerate(vecs):
                if len(v) != 3:
                    raise LrmError(f"Bloch vector {i} must have three components")
                if math.fsum(c * c for c in v) > 1 + 1e-12:
                    raise ValidationError(f"Bloch vector {i} lies outside the unit ball")
            object.__setattr__(self, "bloch", vecs)
        else:
            if self.k > DENSE_LOGICAL_CAP:
                raise CapExceeded("dense logical qubit count", self.k, DENSE_LOGICAL_CAP)
            rho = np.asarray(self.rho, dtype=complex)
            if rho.shape != (2**self.k, 2**self.k):
                raise LrmError(f"dense state must be {2**self.k}x{2**self.k}, got {rho.shape}")
            _check_density(rho, "logical density matrix")
            object.__setattr__(self, "rho", rho)

    # ---- constructors

    @classmethod
    def product(cls, vectors: Sequence[Sequence[float]], label: str = "") -> LogicalState:
        return cls(len(vectors), bloch=tuple(tuple(v) for v in vectors), label=label)

    @classmethod
    def plus(cls, k: int) -> LogicalState:
        return cls.product([(1.0, 0.0, 0.0)] * k, label="+" * k)

    @classmethod
    def zero(cls, k: int) -> LogicalState:
        return cls.product([(0.0, 0.0, 1.0)] * k, label="0" * k)

    @classmethod
    def axis(cls, k: int, basis: str, bits: int) -> LogicalState:
        """Product of X (``basis='X'``) or Z eigenstates; bit ``i`` set selects the -1 eigenstate."""
        idx = "XYZ".index(basis)
        vecs, label = [], []
        for i in range(k):
            v = [0.0, 0.0, 0.0]
            v[idx] = -1.0 if bits >> i & 1 else 1.0
            vecs.append(v)
            label.append({"X": "+-", "Y": "ab", "Z": "01"}[basis][bits >> i & 1])
        return cls.product(vecs, label="".join(label))

    @classmethod
    def dense(cls, rho: np.ndarray, label: str = "") -> LogicalState:
        rho = np.asarray(rho, dtype=complex)
        k = int(round(math.log2(rho.shape[0])))
        return cls(k, rho=rho, label=label)

    @classmethod
    def from_vector(cls, psi: np.ndarray, label: str = "") -> LogicalState:
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls.dense(np.outer(psi, psi.conj()), label=label)

    # ---- evolution

    @property
    def is_product(self) -> bool:
        return self.bloch is not None

    def apply_single(self, target: int, u: np.ndarray, label: str = "") -> LogicalState:
        """``u`` on logical qubit ``target`` (0-based)."""
        if not 0 <= target < self.k:
            raise LrmError(f"logical index {target + 1} out of range 1..{self.k}")
        u = np.asarray(u, dtype=complex)
        if self.is_product:
            vecs = list(self.bloch)
            r = _bloch_to_rho(vecs[target])
            vecs[target] = _rho_to_bloch(u @ r @ u.conj().T)
            return LogicalState.product(vecs, label=label)
        full = np.ones((1, 1), dtype=complex)
        for i in range(self.k):
            full = np.kron(full, u if i == target else _I2)
        return self.apply(full, label)

    def apply(self, u: np.ndarray, label: str = "") -> LogicalState:
        """Dense ``k``-qubit unitary."""
        u = np.asarray(u, dtype=complex)
        rho = self.to_density()
        return LogicalState.dense(u @ rho @ u.conj().T, label=label)

    def to_density(self) -> np.ndarray:
        if not self.is_product:
            return self.rho
        if self.k > DENSE_LOGICAL_CAP:
            raise CapExceeded("dense logical qubit count", self.k, DENSE_LOGICAL_CAP)
        out = np.ones((1, 1), dtype=complex)
        for v in self.bloch:
            out = np.kron(out, _bloch_to_rho(v))
        return out

    def pauli_expectation(self, xmask: int, zmask: int) -> float:
        """``Tr(Q rho)`` for the Hermitian logical Pauli with masks ``(xmask, zmask)``."""
        if self.is_product:
            out = 1.0
            for i, v in enumerate(self.bloch):
                a, b = xmask >> i & 1, zmask >> i & 1
                if a or b:
                    out *= v[0] if not b else (v[1] if a else v[2])
            return out
        q = QubitPauli(self.k, xmask, zmask)
        return float(np.trace(pauli_matrix(q) @ self.rho).real)

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.is_product:
            return ";".join(",".join(f"{c:.6g}" for c in v) for v in self.bloch)
        return f"dense[{self.k}]"


# --------------------------------------------------------------------------- expectations


def _as_hermitian(p: QubitPauli | PauliOperator) -> QubitPauli:
    if isinstance(p, PauliOperator):
        p = to_qubit(p)
    if p.phase != 0:
        raise LrmError(f"expectation needs a phase-free Hermitian Pauli, got {render_pauli(p)}")
    return p


def logical_class(basis: LogicalBasis, p: QubitPauli) -> tuple[int, int]:
    """Masks ``(x, z)`` of the logical Pauli ``Q`` with ``p`` in ``+-Qbar G``."""
    xmask = zmask = 0
    for i in range(basis.k):
        if p.anticommutes(basis.logical_z[i]):
            xmask |= 1 << i
        if p.anticommutes(basis.logical_x[i]):
            zmask |= 1 << i
    return xmask, zmask


def decompose(code: StabilizerCode, p: QubitPauli | PauliOperator) -> tuple[int, int, int] | None:
    """``(xmask, zmask, sign)`` with ``p = sign * Qbar * s`` for ``s`` in ``G``, or ``None`` off the normalizer."""
    basis = code.require_logicals()
    p = _as_hermitian(p)
    group = code.group
    if not group.in_normalizer(p):
        return None
    xmask, zmask = logical_class(basis, p)
    qbar = basis.encode(xmask, zmask)
    e = group.member_up_to_phase(qbar * p)
    if e is None:
        raise ValidationError(
            "normalizer element is not a logical Pauli times a stabilizer; the logical basis is incomplete"
        )
    if e % 2:
        raise ValidationError("phase resolution produced +-i; Pauli phase conventions are inconsistent")
    return xmask, zmask, 1 if e == 0 else -1


def logical_expectation(
    code: StabilizerCode, rho: LogicalState, p: QubitPauli | PauliOperator
) -> float:
    """``<psi_bar|p|psi_bar>`` without building any ``n``-qubit state."""
    if rho.k != code.require_logicals().k:
        raise LrmError(f"state has {rho.k} logical qubits, the code encodes {code.logicals.k}")
    parts = decompose(code, p)
    if parts is None:
        return 0.0
    xmask, zmask, sign = parts
    return sign * rho.pauli_expectation(xmask, zmask)


def pauli_spectrum(code: StabilizerCode, rho: LogicalState) -> Iterator[tuple[QubitPauli, float]]:
    """Every Hermitian normalizer element with its expectation (all other Paulis give 0)."""
    basis = code.require_logicals()
    k = basis.k
    total = 4**k * code.group.size
    if total > ENUMERATION_CAP:
        raise CapExceeded("normalizer size", total, ENUMERATION_CAP)
    elements = list(code.group.elements())
    for xmask in range(2**k):
        for zmask in range(2**k):
            val = rho.pauli_expectation(xmask, zmask)
            qbar = basis.encode(xmask, zmask)
            for s in elements:
                p = qbar * s
                # p is Hermitian with phase 0 or 2; strip the sign into the value
                yield p.unsigned(), val if p.phase == 0 else -val


# --------------------------------------------------------------------------- region enumeration


def _letter_masks() -> list[tuple[int, int]]:
    return [(1, 0), (1, 1), (0, 1)]


def _syndrome_table(code: StabilizerCode, sites: Sequence[int]) -> np.ndarray:
    """``table[j, l]`` = packed commutation syndrome of letter ``l`` (X, Y, Z) on site ``sites[j]``."""
    gens = code.group.generators
    rows = np.zeros((len(sites), 3, len(gens)), dtype=bool)
    for j, site in enumerate(sites):
        for c, g in enumerate(gens):
            gx, gz = g.x >> site & 1, g.z >> site & 1
            for li, (a, b) in enumerate(_letter_masks()):
                rows[j, li, c] = (a & gz) ^ (b & gx)
    return np.packbits(rows, axis=2)


def _half_syndromes(table: np.ndarray) -> np.ndarray:
    """Syndromes of all ``3^m`` letter strings on the given sites, first site most significant."""
    acc = np.zeros((1, table.shape[2]), dtype=np.uint8)
    for j in range(table.shape[0]):
        acc = (acc[:, None, :] ^ table[j][None, :, :]).reshape(-1, table.shape[2])
    return acc


def _decode_index(index: int, sites: Sequence[int], n: int) -> QubitPauli:
    x = z = 0
    for site in reversed(sites):
        index, li = divmod(index, 3)
        a, b = _letter_masks()[li]
        x |= a << site
        z |= b << site
    return QubitPauli(n, x, z)


def _normalize_region(code: StabilizerCode, region: Iterable[int]) -> tuple[int, ...]:
    sites = tuple(sorted(set(int(s) for s in region)))
    if not sites:
        raise LrmError("region is empty")
    if sites[0] < 0 or sites[-1] >= code.n:
        raise LrmError(f"region sites must lie in 0..{code.n - 1}")
    if len(sites) > REGION_CAP:
        raise CapExceeded("region size", len(sites), REGION_CAP)
    return sites


def normalizer_on_region(
    code: StabilizerCode, region: Iterable[int], workers: int = 1
) -> list[QubitPauli]:
    """Hermitian normalizer elements with support exactly ``region``, in enumeration order.

    All ``3^|R|`` candidates are checked against every generator. The candidate
    index is split as ``(head, tail)``; each head chunk XORs its syndrome into
    the full tail table, so the work is a deterministic map over head chunks.
    """
    code.require_qubit()
    sites = _normalize_region(code, region)
    table = _syndrome_table(code, sites)
    split = len(sites) // 2
    head = _half_syndromes(table[:split]) if split else np.zeros((1, table.shape[2]), np.uint8)
    tail = _half_syndromes(table[split:])
    ntail = tail.shape[0]

    def scan(lo: int, hi: int) -> list[int]:
        block = head[lo:hi, None, :] ^ tail[None, :, :]
        hit = ~block.any(axis=2)
        a, b = np.nonzero(hit)
        return [int(lo + i) * ntail + int(j) for i, j in zip(a, b)]

    nhead = head.shape[0]
    chunk = max(1, min(nhead, SCAN_BLOCK_ROWS // max(ntail, 1)))
    bounds = [(lo, min(lo + chunk, nhead)) for lo in range(0, nhead, chunk)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: scan(*b), bounds))
    else:
        parts = [scan(*b) for b in bounds]
    return [_decode_index(i, sites, code.n) for part in parts for i in part]


def uniqueness_scan(code: StabilizerCode, region: Iterable[int], workers: int = 1) -> list[QubitPauli]:
    """All normalizer elements supported exactly on ``region`` (phases left unresolved)."""
    return normalizer_on_region(code, region, workers)


# --------------------------------------------------------------------------- f and reports


@dataclass(frozen=True)
class SpectrumReport:
    region: tuple[int, ...]
    f_value: float
    terms: tuple[tuple[QubitPauli, float], ...]
    tolerance: float
    candidates: int

    @property
    def nearest_integer(self) -> int:
        return int(round(self.f_value))

    @property
    def margin(self) -> float:
        return abs(self.f_value - self.nearest_integer)

    @property
    def verdict(self) -> str:
        return "LRM0_certified" if self.margin > self.tolerance else "inconclusive"

    @property
    def certified(self) -> bool:
        return self.verdict == "LRM0_certified"

    def to_dict(self) -> dict:
        return {
            "region": list(self.region),
            "f_value": self.f_value,
            "nearest_integer": self.nearest_integer,
            "margin": self.margin,
            "verdict": self.verdict,
            "witnesses": [{"pauli": render_pauli(p), "expectation": e} for p, e in self.terms],
        }


def f_from_survivors(
    code: StabilizerCode,
    rho: LogicalState,
    region: tuple[int, ...],
    survivors: Sequence[QubitPauli],
    tolerance: float = DEFAULT_TOLERANCE,
) -> SpectrumReport:
    terms = tuple((p, logical_expectation(code, rho, p)) for p in survivors)
    f_value = math.fsum(e * e for _, e in terms)
    return SpectrumReport(region, f_value, terms, tolerance, 3 ** len(region))


def f_support(
    code: StabilizerCode,
    rho: LogicalState,
    region: Iterable[int],
    tolerance: float = DEFAULT_TOLERANCE,
    workers: int = 1,
) -> SpectrumReport:
    """``f(psi_bar, R)`` with the integer test applied at ``tolerance``."""
    code.require_logicals()
    sites = _normalize_region(code, region)
    survivors = normalizer_on_region(code, sites, workers)
    return f_from_survivors(code, rho, sites, survivors, tolerance)


# --------------------------------------------------------------------------- transversal test


_SINGLE_GATES = {
    "T": np.diag([1, cmath.exp(1j * math.pi / 4)]),
    "Tdg": np.diag([1, cmath.exp(-1j * math.pi / 4)]),
    "sqrtT": np.diag([1, cmath.exp(1j * math.pi / 8)]),
    "X": _SINGLE["X"],
    "Y": _SINGLE["Y"],
    "Z": _SINGLE["Z"],
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "S": np.diag([1, 1j]),
    "Sdg": np.diag([1, -1j]),
}


@dataclass(frozen=True)
class GateSpec:
    """A single-qubit gate on logical ``target`` (0-based) or a dense ``k``-qubit unitary."""

    name: str
    matrix: np.ndarray = field(compare=False)
    target: int | None = None

    @classmethod
    def single(cls, name: str, target: int) -> GateSpec:
        if name.startswith("phase:"):
            try:
                theta = float(name.split(":", 1)[1])
            except ValueError as exc:
                raise LrmError(f"malformed phase gate {name!r}, expected phase:<radians>") from exc
            mat = np.diag([1, cmath.exp(1j * theta)])
        elif name in _SINGLE_GATES:
            mat = np.asarray(_SINGLE_GATES[name], dtype=complex)
        else:
            raise LrmError(
                f"unknown gate {name!r}; expected one of {', '.join(_SINGLE_GATES)} or phase:<radians>"
            )
        return cls(name, mat, target)

    @classmethod
    def dense(cls, matrix: np.ndarray, name: str = "dense") -> GateSpec:
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise LrmError(f"dense gate must be a 2^k x 2^k matrix, got shape {m.shape}")
        if not np.allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=1e-10):
            raise LrmError("dense gate is not unitary")
        k = m.shape[0].bit_length() - 1
        if k > DENSE_GATE_CAP:
            raise CapExceeded("dense gate qubit count", k, DENSE_GATE_CAP)
        return cls(name, m, None)

    def apply(self, state: LogicalState) -> LogicalState:
        if self.target is not None:
            return state.apply_single(self.target, self.matrix)
        if self.matrix.shape[0] != 2**state.k:
            raise LrmError(f"dense gate acts on {self.matrix.shape[0]} dims, the code has k = {state.k}")
        return state.apply(self.matrix)

    def describe(self) -> str:
        return self.name if self.target is None else f"{self.name} on logical {self.target + 1}"


def default_inputs(k: int, seed: int = 0) -> list[LogicalState]:
    """``|+^k>``, ``|0^k>``, then the remaining X- and Z-basis product states.

    For ``k > 5`` the remainder is a seeded sample so that at most 64 inputs are used.
    """
    rest = [("X", b) for b in range(1, 2**k)] + [("Z", b) for b in range(1, 2**k)]
    if 2 + len(rest) > INPUT_SAMPLE_CAP:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(rest), size=INPUT_SAMPLE_CAP - 2, replace=False)
        rest = [rest[i] for i in pick]
    return [LogicalState.plus(k), LogicalState.zero(k)] + [LogicalState.axis(k, b, s) for b, s in rest]


def logical_regions(code: StabilizerCode) -> list[tuple[str, tuple[int, ...]]]:
    basis = code.require_logicals()
    out = []
    for kind, ops in (("X", basis.logical_x), ("Z", basis.logical_z)):
        for i, p in enumerate(ops):
            out.append((f"supp({kind}bar_{i + 1})", tuple(sorted(_bits(p.support_mask)))))
    return out


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass
class TransversalReport:
    gate: str
    certified: bool
    witness_input: str | None = None
    witness_region_label: str | None = None
    witness: SpectrumReport | None = None
    inputs_tried: int = 0
    regions_tried: int = 0
    skipped_regions: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "no strictly transversal implementation" if self.certified else "inconclusive"

    def to_dict(self) -> dict:
        out = {
            "gate": self.gate,
            "verdict": self.verdict,
            "inputs_tried": self.inputs_tried,
            "regions_tried": self.regions_tried,
            "skipped_regions": self.skipped_regions,
        }
        if self.witness is not None:
            out["witness"] = {
                "input": self.witness_input,
                "region_label": self.witness_region_label,
                **self.witness.to_dict(),
            }
        return out


def transversal_report(
    code: StabilizerCode,
    gate: GateSpec,
    tolerance: float = DEFAULT_TOLERANCE,
    inputs: Sequence[LogicalState] | None = None,
    seed: int = 0,
    workers: int = 1,
) -> TransversalReport:
    """Search for a stabilizer input ``S`` and region ``R`` with ``f(U S, R)`` not an integer.

    A hit proves that no tensor product of single-qubit unitaries implements
    ``U``. No hit is reported as inconclusive.
    """
    basis = code.require_logicals()
    if gate.target is not None and not 0 <= gate.target < basis.k:
        raise LrmError(f"logical index {gate.target + 1} out of range 1..{basis.k}")
    states = list(inputs) if inputs is not None else default_inputs(basis.k, seed)
    regions = []
    report = TransversalReport(gate.describe(), False)
    for label, sites in logical_regions(code):
        if len(sites) > REGION_CAP:
            report.skipped_regions.append(label)
        else:
            regions.append((label, sites))
    survivors: dict[tuple[int, ...], list[QubitPauli]] = {}
    for state in states:
        report.inputs_tried += 1
        image = gate.apply(state)
        for label, sites in regions:
            if sites not in survivors:
                survivors[sites] = normalizer_on_region(code, sites, workers)
                report.regions_tried += 1
            rep = f_from_survivors(code, image, sites, survivors[sites], tolerance)
            if rep.certified:
                report.certified = True
                report.witness = rep
                report.witness_input = state.describe()
                report.witness_region_label = label
                return report
    return report


# --------------------------------------------------------------------------- dense f


def _as_density(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def reduced_density(state: np.ndarray, region: Sequence[int], n: int) -> np.ndarray:
    """Partial trace onto ``region`` (site 0 most significant), sites kept in sorted order."""
    rho = _as_density(state).reshape([2] * (2 * n))
    keep = sorted(region)
    drop = [s for s in range(n) if s not in keep]
    perm = keep + drop + [n + s for s in keep] + [n + s for s in drop]
    rho = rho.transpose(perm)
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    rho = rho.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", rho)


def dense_f(state: np.ndarray, region: Sequence[int], n: int | None = None) -> float:
    """``f`` evaluated directly from the reduced density matrix on ``region``."""
    state = np.asarray(state)
    if n is None:
        n = int(round(math.log2(state.shape[0])))
    if n > DENSE_STATE_CAP:
        raise CapExceeded("dense qubit count", n, DENSE_STATE_CAP)
    sites = sorted(set(region))
    if not sites:
        raise LrmError("region is empty")
    red = reduced_density(state, sites, n)
    m = len(sites)
    total = []
    for letters in np.ndindex(*([3] * m)):
        mat = np.ones((1, 1), dtype=complex)
        for li in letters:
            mat = np.kron(mat, _SINGLE["XYZ"[li]])
        total.append(float(np.trace(mat @ red).real) ** 2)
    return math.fsum(total)


def apply_product_unitary(state: np.ndarray, unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """``(U_0 x ... x U_{n-1}) psi`` for a state vector, or the conjugated density matrix."""
    n = len(unitaries)
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        psi = state.reshape([2] * n)
        for s, u in enumerate(unitaries):
            psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [s])), 0, s)
        return psi.reshape(-1)
    rho = state.reshape([2] * (2 * n))
    for s, u in enumerate(unitaries):
        rho = np.moveaxis(np.tensordot(u, rho, axes=([1], [s])), 0, s)
        rho = np.moveaxis(np.tensordot(u.conj(), rho, axes=([1], [n + s])), 0, n + s)
    return rho.reshape(2**n, 2**n)


def invariance_check(
    state: np.ndarray, region: Sequence[int], trials: int = 100, seed: int = 0
) -> float:
    """Max ``|f(psi, R) - f(U psi, R)|`` over random product unitaries ``U``."""
    state = np.asarray(state, dtype=complex)
    n = int(round(math.log2(state.shape[0])))
    if n > DENSE_STATE_CAP:
        raise CapExceeded("dense qubit count", n, DENSE_STATE_CAP)
    base = dense_f(state, region, n)
    rng = np.random.default_rng(seed)
    haar = unitary_group(2)
    worst = 0.0
    for _ in range(trials):
        us = [haar.rvs(random_state=rng) for _ in range(n)]
        worst = max(worst, abs(dense_f(apply_product_unitary(state, us), region, n) - base))
    return worst
