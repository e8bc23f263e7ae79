"""Seeded benchmark circuit generators.

Four families: QAOA on a random (Erdos-Renyi) graph, QAOA on a random
d-regular graph, randomized Hamiltonian-simulation Pauli strings, and
Bernstein-Vazirani.  Generation is a pure function of the parameters and
seed; gate angles are drawn from the seeded stream (the fidelity model is
angle-independent, so only structure matters downstream).
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .circuit import _FIXED_1Q, Circuit

TAU = 2.0 * np.pi

_H = _FIXED_1Q["h"]
_S = _FIXED_1Q["s"]
_SDG = _FIXED_1Q["sdg"]


def _rz(theta: float) -> tuple[float, float, float]:
    return (0.0, 0.0, theta)


def _rx(theta: float) -> tuple[float, float, float]:
    return (theta, -math.pi / 2, math.pi / 2)


def _zz(c: Circuit, a: int, b: int, theta: float) -> None:
    c.add("cx", (a, b))
    c.add("u", (b,), _rz(theta))
    c.add("cx", (a, b))


def gen_qaoa_random(n: int, p: float, seed: int) -> Circuit:
    """One QAOA layer on G(n, p): ZZ per sampled pair, then an RX mixer."""
    if n < 2:
        raise ValueError("need at least 2 qubits")
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must be in [0, 1]")
    rng = np.random.default_rng(seed)
    c = Circuit(n)
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                _zz(c, a, b, float(rng.uniform(0.0, TAU)))
    for q in range(n):
        c.add("u", (q,), _rx(float(rng.uniform(0.0, TAU))))
    return c


def random_regular_edges(n: int, d: int, seed: int) -> list[tuple[int, int]]:
    """Uniform random d-regular graph by the pairing model: pair up n*d
    stubs, reject until simple (no loops, no parallel edges)."""
    if (n * d) % 2:
        raise ValueError("n * d must be even")
    if not 0 <= d < n:
        raise ValueError("degree must satisfy 0 <= d < n")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    while True:
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        if (pairs[:, 0] == pairs[:, 1]).any():
            continue
        edges = {(min(a, b), max(a, b)) for a, b in pairs.tolist()}
        if len(edges) == len(pairs):
            return sorted(edges)


def gen_qaoa_regular(n: int, d: int, seed: int) -> Circuit:
    """One QAOA layer on a random d-regular graph: exactly n*d/2 ZZ terms."""
    edges = random_regular_edges(n, d, seed)
    rng = np.random.default_rng(seed + 1)
    c = Circuit(n)
    for a, b in edges:
        _zz(c, a, b, float(rng.uniform(0.0, TAU)))
    for q in range(n):
        c.add("u", (q,), _rx(float(rng.uniform(0.0, TAU))))
    return c


def append_pauli_rotation(c: Circuit, paulis: str, theta: float) -> None:
    """Append exp(-i theta/2 * P) for the Pauli string P (one letter per
    qubit, 'I'/'X'/'Y'/'Z'): basis-change active qubits into Z, CX-chain them
    onto the last active one, RZ there, then undo.  All-identity is a no-op.
    """
    active = [q for q, s in enumerate(paulis) if s != "I"]
    if not active:
        return
    for q in active:
        if paulis[q] == "X":
            c.add("u", (q,), _H)
        elif paulis[q] == "Y":
            c.add("u", (q,), _SDG)
            c.add("u", (q,), _H)
    last = active[-1]
    for q in active[:-1]:
        c.add("cx", (q, last))
    c.add("u", (last,), _rz(theta))
    for q in reversed(active[:-1]):
        c.add("cx", (q, last))
    for q in active:
        if paulis[q] == "X":
            c.add("u", (q,), _H)
        elif paulis[q] == "Y":
            c.add("u", (q,), _H)
            c.add("u", (q,), _S)


def gen_qsim_random(n: int, p_non_identity: float, n_strings: int, seed: int) -> Circuit:
    """Trotterized random Pauli strings.

    Per string each qubit is I with probability 1 - p_non_identity, else a
    uniform X/Y/Z; the string exponential is emitted by
    :func:`append_pauli_rotation`.  All-identity strings are skipped.
    """
    if n < 1 or n_strings < 1:
        raise ValueError("need n >= 1 and n_strings >= 1")
    if not 0.0 <= p_non_identity <= 1.0:
        raise ValueError("p_non_identity must be in [0, 1]")
    rng = np.random.default_rng(seed)
    c = Circuit(n)
    for _ in range(n_strings):
        paulis = "".join("I" if rng.random() >= p_non_identity
                         else "XYZ"[rng.integers(3)] for _ in range(n))
        append_pauli_rotation(c, paulis, float(rng.uniform(0.0, TAU)))
    return c


def bv_secret(n: int, n_set: int, seed: int) -> str:
    """A length n-1 secret with exactly n_set ones, positions seeded."""
    if not 0 <= n_set <= n - 1:
        raise ValueError("n_set must be in [0, n-1]")
    rng = np.random.default_rng(seed)
    ones = set(rng.choice(n - 1, size=n_set, replace=False).tolist())
    return "".join("1" if i in ones else "0" for i in range(n - 1))


def gen_bv(n: int, secret: str, seed: int = 0) -> Circuit:
    """Bernstein-Vazirani: H layer, CX(i, n-1) per set secret bit, H layer."""
    if len(secret) != n - 1:
        raise ValueError(f"secret must have {n - 1} bits, got {len(secret)}")
    if set(secret) - {"0", "1"}:
        raise ValueError("secret must be a bitstring")
    c = Circuit(n)
    for q in range(n):
        c.add("u", (q,), _H)
    for i, bit in enumerate(secret):
        if bit == "1":
            c.add("cx", (i, n - 1))
    for q in range(n):
        c.add("u", (q,), _H)
    return c


def gen_random_pairs(n: int, gates_per_qubit: float, seed: int) -> Circuit:
    """Unstructured stress load: CZs on uniform random distinct pairs until
    the average gate count per qubit reaches the target."""
    rng = np.random.default_rng(seed)
    c = Circuit(n)
    for _ in range(round(n * gates_per_qubit / 2)):
        a, b = rng.choice(n, size=2, replace=False)
        c.add("cz", (int(min(a, b)), int(max(a, b))))
    return c


FAMILIES = ("qaoa-rand", "qaoa-regular", "qsim-rand", "bv", "random-pairs")


@dataclass(frozen=True)
class WorkloadSpec:
    family: str
    n_qubits: int
    seed: int = 0
    p: float = 0.5               # qaoa-rand edge probability
    d: int = 3                   # qaoa-regular degree
    p_non_identity: float = 0.5  # qsim-rand
    n_strings: int = 10          # qsim-rand
    secret: str | None = None    # bv (defaults to a seeded half-weight secret)
    gates_per_qubit: float = 10.0  # random-pairs

    def generate(self) -> Circuit:
        n, s = self.n_qubits, self.seed
        if self.family == "qaoa-rand":
            return gen_qaoa_random(n, self.p, s)
        if self.family == "qaoa-regular":
            return gen_qaoa_regular(n, self.d, s)
        if self.family == "qsim-rand":
            return gen_qsim_random(n, self.p_non_identity, self.n_strings, s)
        if self.family == "bv":
            secret = self.secret
            if secret is None:
                secret = bv_secret(n, (n - 1) // 2, s)
            return gen_bv(n, secret, s)
        if self.family == "random-pairs":
            return gen_random_pairs(n, self.gates_per_qubit, s)
        raise ValueError(f"unknown workload family {self.family!r}")
