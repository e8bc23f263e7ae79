"""Inter-array SWAP routing on the complete multipartite coupling graph.

Atoms in different arrays can always be brought together, so the coupling
graph is complete multipartite: a CZ is executable iff its endpoints live in
different arrays, blocked iff they share one.  Distance is therefore 0/1 and
a SABRE-style lookahead reduces to counting how many upcoming blocked gates a
candidate SWAP would leave co-array.

Slots are the initial positions of the logical qubits (slot i starts out
holding logical i) and never change arrays; SWAPs exchange the logical
payload of two slots.  The routed circuit is expressed on slots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, build_dag, _FIXED_1Q

_H = _FIXED_1Q["h"]


def _lowered_swap(s: int, t: int) -> list[Gate]:
    """SWAP as 3 CZ + 6 one-qubit gates (CX conjugated by H, fused)."""
    return [
        Gate("u", (t,), _H), Gate("cz", (s, t), ()), Gate("u", (t,), _H),
        Gate("u", (s,), _H), Gate("cz", (s, t), ()), Gate("u", (s,), _H),
        Gate("u", (t,), _H), Gate("cz", (s, t), ()), Gate("u", (t,), _H),
    ]


@dataclass
class RoutedCircuit:
    circuit: Circuit        # slot-space basis circuit, SWAPs expanded
    assignment: np.ndarray  # slot -> array id
    perm: list[int]         # logical qubit -> slot holding it afterwards
    added_cx: int

    def intra_array_cz(self) -> int:
        a = self.assignment
        return sum(1 for g in self.circuit.gates
                   if g.kind == "cz" and a[g.qubits[0]] == a[g.qubits[1]])


def route_inter_array(circuit: Circuit, assignment,
                      lookahead_window: int = 20,
                      decay: float = 0.7) -> RoutedCircuit:
    """Eliminate intra-array CZ gates by inserting SWAPs.

    Front-layer loop: every ready gate whose endpoints sit in different
    arrays is emitted.  When only blocked gates remain ready, the earliest
    one picks a SWAP(q, r) between one of its endpoints q and a logical r
    currently held in another array.  The winning candidate minimizes
    sum(decay^pos) over the next `lookahead_window` blocked CZs that would
    *stay* co-array after the swap; ties fall to fewer remaining gates on r,
    then lower r, then the later gate endpoint.
    """
    s_arr = np.asarray(assignment, dtype=np.int64)
    n = circuit.n_qubits
    if s_arr.shape != (n,):
        raise ValueError("assignment must cover every qubit")
    gates = circuit.gates
    dag = build_dag(circuit)

    l2s = list(range(n))  # logical -> slot
    future = [0] * n      # remaining CZ count per logical qubit
    for g in gates:
        if g.kind == "cz":
            future[g.qubits[0]] += 1
            future[g.qubits[1]] += 1

    out = Circuit(n)
    added_cx = 0
    executed = [False] * len(gates)
    pending = [len(p) for p in dag.preds]
    ready = {i for i, c in enumerate(pending) if c == 0}

    def arr(logical: int) -> int:
        return int(s_arr[l2s[logical]])

    def emit(gi: int) -> None:
        g = gates[gi]
        out.gates.append(Gate(g.kind, tuple(l2s[q] for q in g.qubits), g.params))
        executed[gi] = True
        if g.kind == "cz":
            future[g.qubits[0]] -= 1
            future[g.qubits[1]] -= 1
        ready.discard(gi)
        for s in dag.succs[gi]:
            pending[s] -= 1
            if pending[s] == 0:
                ready.add(s)

    def blocked_window() -> list[tuple[int, int]]:
        win = []
        for gi, g in enumerate(gates):
            if executed[gi] or g.kind != "cz":
                continue
            a, b = g.qubits
            if arr(a) == arr(b):
                win.append((a, b))
                if len(win) == lookahead_window:
                    break
        return win

    while True:
        progress = True
        while progress:
            progress = False
            for gi in sorted(ready):
                g = gates[gi]
                if g.kind == "cz" and arr(g.qubits[0]) == arr(g.qubits[1]):
                    continue
                emit(gi)
                progress = True
        if not ready:
            break

        # everything ready is a blocked CZ; unblock the earliest one
        target = gates[min(ready)]
        t_a, t_b = target.qubits
        home = arr(t_a)
        window = blocked_window()
        outside = [r for r in range(n) if int(s_arr[l2s[r]]) != home]
        if not outside:
            raise RuntimeError("all qubits share one array; CZ cannot be routed")

        best_key, best = None, None
        for q in (t_a, t_b):
            q_arr = arr(q)
            for r in outside:
                r_arr = int(s_arr[l2s[r]])
                cost = 0.0
                for pos, (a, b) in enumerate(window):
                    aa = r_arr if a == q else (q_arr if a == r else arr(a))
                    bb = r_arr if b == q else (q_arr if b == r else arr(b))
                    if aa == bb:
                        cost += decay ** pos
                key = (cost, future[r], r, 0 if q == t_b else 1)
                if best_key is None or key < best_key:
                    best_key, best = key, (q, r)

        q, r = best
        sq, sr = l2s[q], l2s[r]
        out.gates.extend(_lowered_swap(sq, sr))
        added_cx += 3
        l2s[q], l2s[r] = sr, sq

    routed = RoutedCircuit(out, s_arr, list(l2s), added_cx)
    assert routed.intra_array_cz() == 0
    return routed
