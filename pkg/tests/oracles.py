"""Dense reference computations built from bit manipulation, independent of ``pauli_matrix``."""

from __future__ import annotations

import numpy as np


def _site_bits(n: int, mask: int) -> int:
    """Map a site mask (bit j = site j) to a basis-index mask (site 0 most significant)."""
    out = 0
    for j in range(n):
        if mask >> j & 1:
            out |= 1 << (n - 1 - j)
    return out


def qubit_pauli_dense(n: int, x: int, z: int, phase: int = 0) -> np.ndarray:
    """``i^phase * prod_j (i^{x_j z_j} X^{x_j} Z^{z_j})`` as a dense matrix."""
    dim = 2**n
    xi, zi = _site_bits(n, x), _site_bits(n, z)
    coeff = 1j ** ((phase + (x & z).bit_count()) % 4)
    m = np.zeros((dim, dim), dtype=complex)
    for s in range(dim):
        sign = -1 if (zi & s).bit_count() & 1 else 1
        m[s ^ xi, s] = coeff * sign
    return m


def expectation_table(rho: np.ndarray, n: int):
    """Callable ``(x, z) -> Tr(rho P)`` evaluated without forming ``P``."""
    dim = 2**n
    idx = np.arange(dim)
    popc = np.array([bin(i).count("1") for i in range(dim)])

    def expect(x: int, z: int) -> float:
        xi, zi = _site_bits(n, x), _site_bits(n, z)
        coeff = 1j ** ((x & z).bit_count() % 4)
        sign = 1 - 2 * (popc[idx & zi] & 1)
        # P|s> = coeff sign_s |s ^ xi>, so Tr(rho P) = sum_s coeff sign_s rho[s, s ^ xi]
        return float((coeff * np.sum(sign * rho[idx, idx ^ xi])).real)

    return expect


def codespace_projector(n: int, generators) -> np.ndarray:
    proj = np.eye(2**n, dtype=complex)
    for g in generators:
        proj = proj @ (np.eye(2**n) + qubit_pauli_dense(n, g.x, g.z, g.phase)) / 2
    return proj


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def encoded_vector(code, amplitudes: np.ndarray) -> np.ndarray:
    """Encode a logical state vector for a code whose logical Z operators are Z-type.

    ``|0bar>`` is the normalized codespace projection of ``|0...0>``; basis states
    follow by applying logical X operators. Logical qubit 0 is most significant.
    """
    n, basis = code.n, code.logicals
    k = basis.k
    assert all(p.x == 0 for p in basis.logical_z)
    proj = codespace_projector(n, code.group.generators)
    zero = proj[:, 0] / np.linalg.norm(proj[:, 0])
    out = np.zeros(2**n, dtype=complex)
    for idx, amp in enumerate(np.asarray(amplitudes, dtype=complex)):
        if amp == 0:
            continue
        v = zero
        for i in range(k):
            if idx >> (k - 1 - i) & 1:
                lx = basis.logical_x[i]
                v = qubit_pauli_dense(n, lx.x, lx.z, lx.phase) @ v
        out += amp * v
    return out / np.linalg.norm(out)
