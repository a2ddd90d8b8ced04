"""Concrete stabilizer codes and the JSON interchange format.

Bivariate bicycle sites are keyed ``(sector, a, b)`` for the monomial ``x^a y^b``
with sector ``L`` (0) or ``R`` (1), flattened as ``sector*l*m + b*l + a``.
Toric-code qubits sit on edges ``(vertex, direction)`` of the periodic lattice,
flattened as ``direction * L**D + sum_i c_i * L**i``.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from importlib import resources
from typing import IO, Iterable, Sequence

from .errors import LrmError, ValidationError
from .pauli import LocalConfiguration, QubitPauli, parse_pauli, render_pauli
from .stabilizer import LogicalBasis, StabilizerCode, StabilizerGroup

Monomial = tuple[int, int]
Polynomial = tuple[Monomial, ...]

FORMAT_TAG = "lrm-code/1"


# --------------------------------------------------------------------------- bivariate bicycle


@dataclass(frozen=True)
class BivariateBicycleSpec:
    """Torus size, check polynomials and logical data of a bivariate bicycle code.

    ``X(P, Q)`` acts with X on the L qubits listed by ``P`` and the R qubits listed
    by ``Q``. Checks are all translates of ``X(A, B)`` and ``Z(B^T, A^T)``.
    Logical X operators are ``alpha_i X(p, q)`` and ``beta_i^T X(r, s)``; the Z
    partners are ``beta_i Z(nu s^T, nu r^T)`` and ``alpha_i^T Z(mu q^T, mu p^T)``.
    """

    ell: int
    m: int
    poly_a: Polynomial
    poly_b: Polynomial
    p: Polynomial
    q: Polynomial
    r: Polynomial
    s: Polynomial
    mu: Monomial
    nu: Monomial
    alpha: tuple[Monomial, ...]
    beta: tuple[Monomial, ...]

    def __post_init__(self) -> None:
        red = self.reduce
        for name in ("poly_a", "poly_b", "p", "q", "r", "s", "alpha", "beta"):
            object.__setattr__(self, name, tuple(red(t) for t in getattr(self, name)))
        object.__setattr__(self, "mu", red(self.mu))
        object.__setattr__(self, "nu", red(self.nu))

    def reduce(self, mono: Monomial) -> Monomial:
        return (mono[0] % self.ell, mono[1] % self.m)

    @property
    def n(self) -> int:
        return 2 * self.ell * self.m

    def site(self, sector: int, mono: Monomial) -> int:
        a, b = self.reduce(mono)
        return sector * self.ell * self.m + b * self.ell + a

    def site_label(self, index: int) -> str:
        sector, rest = divmod(index, self.ell * self.m)
        b, a = divmod(rest, self.ell)
        return f"({'LR'[sector]},x^{a}y^{b})"

    def shift(self, poly: Iterable[Monomial], by: Monomial) -> Polynomial:
        return tuple(self.reduce((a + by[0], b + by[1])) for a, b in poly)

    def transpose(self, poly: Iterable[Monomial]) -> Polynomial:
        return tuple(self.reduce((-a, -b)) for a, b in poly)

    def mask(self, left: Iterable[Monomial], right: Iterable[Monomial]) -> int:
        bits = 0
        for mono in left:
            bits ^= 1 << self.site(0, mono)
        for mono in right:
            bits ^= 1 << self.site(1, mono)
        return bits

    def x_check(self, gamma: Monomial) -> QubitPauli:
        """``gamma X(A, B)``."""
        return QubitPauli(self.n, self.mask(self.shift(self.poly_a, gamma), self.shift(self.poly_b, gamma)), 0)

    def z_check(self, gamma: Monomial) -> QubitPauli:
        """``gamma Z(B^T, A^T)``."""
        bt, at = self.transpose(self.poly_b), self.transpose(self.poly_a)
        return QubitPauli(self.n, 0, self.mask(self.shift(bt, gamma), self.shift(at, gamma)))

    def monomials(self) -> list[Monomial]:
        return [(a, b) for b in range(self.m) for a in range(self.ell)]

    def logical_x_ops(self) -> list[QubitPauli]:
        half = len(self.alpha)
        ops = []
        for g in self.alpha:
            ops.append(QubitPauli(self.n, self.mask(self.shift(self.p, g), self.shift(self.q, g)), 0))
        for g in self.beta[:half]:
            gt = self.transpose([g])[0]
            ops.append(QubitPauli(self.n, self.mask(self.shift(self.r, gt), self.shift(self.s, gt)), 0))
        return ops

    def logical_z_ops(self) -> list[QubitPauli]:
        """The Z representatives exactly as listed (not index-paired with X)."""
        left1 = self.shift(self.transpose(self.s), self.nu)
        right1 = self.shift(self.transpose(self.r), self.nu)
        left7 = self.shift(self.transpose(self.q), self.mu)
        right7 = self.shift(self.transpose(self.p), self.mu)
        ops = []
        for g in self.beta:
            ops.append(QubitPauli(self.n, 0, self.mask(self.shift(left1, g), self.shift(right1, g))))
        for g in self.alpha:
            gt = self.transpose([g])[0]
            ops.append(QubitPauli(self.n, 0, self.mask(self.shift(left7, gt), self.shift(right7, gt))))
        return ops


def _poly(*terms: Monomial) -> Polynomial:
    return tuple(terms)


GROSS_SPEC = BivariateBicycleSpec(
    ell=12,
    m=6,
    poly_a=_poly((0, 0), (0, 1), (3, -1)),
    poly_b=_poly((0, 0), (1, 0), (-1, -3)),
    p=_poly((4, 0), (5, 0), (6, 1), (4, 2), (5, 4), (6, 5)),
    q=_poly((3, 0), (4, 0), (3, 1), (3, 2), (4, 2), (3, 5)),
    r=_poly((0, 0), (8, 0), (1, 1), (9, 1), (3, 4), (11, 4)),
    s=_poly((1, 0), (9, 0), (4, 4), (8, 4), (0, 5), (8, 5)),
    mu=(1, 1),
    nu=(1, 1),
    alpha=((0, 0), (3, 5), (11, 5), (10, 1), (5, 4), (4, 2)),
    beta=((0, 0), (1, 1), (4, 0), (5, 4), (4, 3), (3, 5)),
)

# (q, gamma_q): the check gamma_q X(A, B) meets supp(Xbar_1) only at q.
GROSS_SINGLE_OVERLAP_X1: tuple[tuple[int, Monomial, Monomial], ...] = (
    (0, (4, 0), (1, 1)),
    (0, (4, 2), (1, 3)),
    (0, (5, 0), (5, 0)),
    (0, (5, 4), (5, 4)),
    (0, (6, 1), (6, 1)),
    (0, (6, 5), (6, 5)),
    (1, (3, 0), (2, 0)),
    (1, (3, 1), (3, 1)),
    (1, (3, 2), (2, 2)),
    (1, (3, 5), (3, 5)),
)
# Checks isolating the two remaining R positions of supp(Xbar_1).
GROSS_SINGLE_OVERLAP_X1_REMAINDER: tuple[tuple[int, Monomial, Monomial], ...] = (
    (1, (4, 0), (4, 0)),
    (1, (4, 2), (4, 2)),
)
# Checks ruling out Z on the R qubits, then on the L qubits, of supp(Xbar_7).
GROSS_X7_R_CHECKS: tuple[Monomial, ...] = ((2, 3), (4, 4), (7, 5), (8, 4), (10, 3), (11, 5))
GROSS_X7_L_CHECKS: tuple[Monomial, ...] = ((0, 0), (8, 0), (1, 1), (9, 1), (3, 4), (11, 4))


def _gf2_inverse(matrix: list[list[int]]) -> list[list[int]]:
    size = len(matrix)
    aug = [row[:] + [int(i == j) for j in range(size)] for i, row in enumerate(matrix)]
    for col in range(size):
        piv = next((r for r in range(col, size) if aug[r][col]), None)
        if piv is None:
            raise ValidationError("logical pairing matrix is singular over GF(2)")
        aug[col], aug[piv] = aug[piv], aug[col]
        for r in range(size):
            if r != col and aug[r][col]:
                aug[r] = [u ^ v for u, v in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


def dual_z_basis(logical_x: Sequence[QubitPauli], z_ops: Sequence[QubitPauli]) -> list[QubitPauli]:
    """Recombine Z-type ``z_ops`` so that ``Zbar_j`` anticommutes with ``Xbar_i`` iff ``i == j``."""
    pairing = [[int(x.anticommutes(z)) for z in z_ops] for x in logical_x]
    inv = _gf2_inverse(pairing)
    n = logical_x[0].n
    out = []
    for j in range(len(z_ops)):
        zbits = 0
        for k, z in enumerate(z_ops):
            if inv[k][j]:
                zbits ^= z.z
        out.append(QubitPauli(n, 0, zbits))
    return out


def build_bivariate_bicycle(spec: BivariateBicycleSpec, name: str = "") -> StabilizerCode:
    monos = spec.monomials()
    checks = [spec.x_check(g) for g in monos] + [spec.z_check(g) for g in monos]
    group = StabilizerGroup(checks, LocalConfiguration.qubits(spec.n))
    lx = spec.logical_x_ops()
    lz = dual_z_basis(lx, spec.logical_z_ops())
    return StabilizerCode(group, LogicalBasis(tuple(lx), tuple(lz)), name=name)


def build_gross() -> StabilizerCode:
    """The [[144, 12, 12]] gross code with its logical basis."""
    return build_bivariate_bicycle(GROSS_SPEC, name="gross")


# --------------------------------------------------------------------------- toric codes


@dataclass(frozen=True)
class ToricSpec:
    dimension: int
    size: int

    def __post_init__(self) -> None:
        if self.dimension not in (2, 3):
            raise LrmError(f"toric codes are built for D in {{2, 3}}, got D = {self.dimension}")
        if self.size < 2:
            raise LrmError(f"toric code needs L >= 2, got L = {self.size}")

    @property
    def n(self) -> int:
        return self.dimension * self.size**self.dimension

    @property
    def k(self) -> int:
        return self.dimension

    def vertices(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.size), repeat=self.dimension))

    def edge(self, vertex: Sequence[int], direction: int) -> int:
        L = self.size
        return direction * L**self.dimension + sum((c % L) * L**i for i, c in enumerate(vertex))

    def step(self, vertex: Sequence[int], direction: int, amount: int = 1) -> tuple[int, ...]:
        v = list(vertex)
        v[direction] = (v[direction] + amount) % self.size
        return tuple(v)


def build_toric(dimension: int, size: int) -> StabilizerCode:
    """Toric code with X vertex stars and Z face plaquettes.

    ``Xbar_i`` is X on every direction-``i`` edge leaving the hyperplane
    ``c_i = 0`` (a membrane for D = 3); ``Zbar_i`` is Z on the direction-``i``
    string through the origin.
    """
    spec = ToricSpec(dimension, size)
    D, n = spec.dimension, spec.n
    stars = []
    faces = []
    for v in spec.vertices():
        bits = 0
        for d in range(D):
            bits |= 1 << spec.edge(v, d)
            bits |= 1 << spec.edge(spec.step(v, d, -1), d)
        stars.append(QubitPauli(n, bits, 0))
    for v in spec.vertices():
        for d1, d2 in itertools.combinations(range(D), 2):
            bits = (
                1 << spec.edge(v, d1)
                | 1 << spec.edge(spec.step(v, d1), d2)
                | 1 << spec.edge(spec.step(v, d2), d1)
                | 1 << spec.edge(v, d2)
            )
            faces.append(QubitPauli(n, 0, bits))
    lx, lz = [], []
    for i in range(D):
        xb = sum(1 << spec.edge(v, i) for v in spec.vertices() if v[i] == 0)
        zb = sum(
            1 << spec.edge(v, i)
            for v in spec.vertices()
            if all(c == 0 for j, c in enumerate(v) if j != i)
        )
        lx.append(QubitPauli(n, xb, 0))
        lz.append(QubitPauli(n, 0, zb))
    group = StabilizerGroup(stars + faces, LocalConfiguration.qubits(n))
    return StabilizerCode(group, LogicalBasis(tuple(lx), tuple(lz)), name=f"toric{D}d:{size}")


def build_toric2d(size: int) -> StabilizerCode:
    return build_toric(2, size)


def build_toric3d(size: int) -> StabilizerCode:
    return build_toric(3, size)


# --------------------------------------------------------------------------- small fixtures


def _from_strings(stabs: Sequence[str], lx: Sequence[str], lz: Sequence[str], name: str) -> StabilizerCode:
    gens = [parse_pauli(s) for s in stabs]
    group = StabilizerGroup(gens, LocalConfiguration.qubits(gens[0].n))
    basis = LogicalBasis(tuple(parse_pauli(s) for s in lx), tuple(parse_pauli(s) for s in lz))
    return StabilizerCode(group, basis, name=name)


def build_repetition(n: int = 3) -> StabilizerCode:
    if n < 2:
        raise LrmError(f"repetition code needs n >= 2, got {n}")
    stabs = ["I" * i + "ZZ" + "I" * (n - i - 2) for i in range(n - 1)]
    return _from_strings(stabs, ["X" * n], ["Z" + "I" * (n - 1)], f"repetition:{n}")


def build_five_one_three() -> StabilizerCode:
    stabs = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    return _from_strings(stabs, ["XXXXX"], ["ZZZZZ"], "five-one-three")


def build_steane() -> StabilizerCode:
    rows = ["IIIXXXX", "IXXIIXX", "XIXIXIX"]
    stabs = rows + [r.replace("X", "Z") for r in rows]
    return _from_strings(stabs, ["X" * 7], ["Z" * 7], "steane")


def builtin_code(name: str) -> StabilizerCode:
    """Resolve ``gross``, ``toric2d:L``, ``toric3d:L``, ``repetition:n``, ``five-one-three``, ``steane``."""
    base, _, arg = name.partition(":")
    if arg and base in ("gross", "five-one-three", "513", "steane"):
        raise LrmError(f"code {base!r} takes no size argument, got {name!r}")
    try:
        if base == "gross":
            return build_gross()
        if base in ("toric2d", "toric3d"):
            return build_toric(int(base[5]), int(arg or 2))
        if base == "repetition":
            return build_repetition(int(arg or 3))
        if base in ("five-one-three", "513"):
            return build_five_one_three()
        if base == "steane":
            return build_steane()
    except ValueError as exc:
        if isinstance(exc, LrmError):
            raise
        raise LrmError(f"bad size in code name {name!r}") from exc
    raise LrmError(
        f"unknown code name {name!r}; expected gross, toric2d:L, toric3d:L, "
        "repetition:n, five-one-three or steane"
    )


# --------------------------------------------------------------------------- JSON


def code_to_dict(code: StabilizerCode) -> dict:
    doc = {
        "format": FORMAT_TAG,
        "local_dims": list(code.config.dims),
        "stabilizers": [render_pauli(g) for g in code.group.generators],
        "logical_x": [],
        "logical_z": [],
        "meta": {"name": code.name, **code.meta},
    }
    if code.logicals is not None:
        doc["logical_x"] = [render_pauli(p) for p in code.logicals.logical_x]
        doc["logical_z"] = [render_pauli(p) for p in code.logicals.logical_z]
    return doc


def code_from_dict(doc: dict) -> StabilizerCode:
    if not isinstance(doc, dict):
        raise ValidationError("code document must be a JSON object")
    if doc.get("format") != FORMAT_TAG:
        raise ValidationError(f"unsupported format tag {doc.get('format')!r}, expected {FORMAT_TAG!r}")
    for key in ("local_dims", "stabilizers"):
        if key not in doc:
            raise ValidationError(f"code document is missing {key!r}")
    try:
        config = LocalConfiguration(tuple(doc["local_dims"]))
        gens = [parse_pauli(s, config) for s in doc["stabilizers"]]
        lx = [parse_pauli(s, config) for s in doc.get("logical_x", [])]
        lz = [parse_pauli(s, config) for s in doc.get("logical_z", [])]
    except (TypeError, LrmError) as exc:
        raise ValidationError(f"malformed code document: {exc}") from exc
    group = StabilizerGroup(gens, config)
    if not group.is_valid:
        diag = group.diagnostics
        if diag.pair is not None:
            i, j = diag.pair
            raise ValidationError(
                f"stabilizers {i} ({doc['stabilizers'][i]}) and {j} ({doc['stabilizers'][j]}) do not commute"
            )
        raise ValidationError(diag.message)
    meta = dict(doc.get("meta") or {})
    name = meta.pop("name", "")
    logicals = LogicalBasis(tuple(lx), tuple(lz)) if (lx or lz) else None
    return StabilizerCode(group, logicals, name=name, meta=meta)


def save_code(code: StabilizerCode, sink: str | os.PathLike | IO[str]) -> None:
    doc = code_to_dict(code)
    if hasattr(sink, "write"):
        json.dump(doc, sink, indent=1)
        sink.write("\n")
        return
    with open(sink, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_code(source: str | os.PathLike | IO[str]) -> StabilizerCode:
    try:
        if hasattr(source, "read"):
            doc = json.load(source)
        else:
            with open(source, encoding="utf-8") as fh:
                doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from exc
    return code_from_dict(doc)


def fixture_path(name: str):
    """Path of a shipped fixture (``gross``, ``toric2d-2``, ``toric3d-2``)."""
    return resources.files("lrmlab") / "data" / f"{name}.json"
