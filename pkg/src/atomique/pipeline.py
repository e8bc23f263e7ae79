"""Full compile pipeline: circuit in, scored movement schedule out.

Order: basis lowering -> interaction-frequency graph -> array partition ->
inter-array SWAP routing -> slot placement -> stage routing -> fidelity
scoring.  Everything downstream of parsing is deterministic for a fixed
(circuit, config, seed), so the emitted schedule and stats are reproducible
byte for byte (wall time aside).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .arch import ArchConfig, HardwareParams
from .array_mapper import assign_arrays, partition_capacities
from .atom_mapper import Placement, place_atoms
from .circuit import Circuit, circuit_stats, gate_frequency_graph, to_basis
from .fidelity import FidelityReport, TimeLedger, apply_schedule, execution_time
from .stage_router import Schedule, relax_constraint, route
from .swap_router import RoutedCircuit, route_inter_array


def random_assignment(n: int, config: ArchConfig, seed: int) -> np.ndarray:
    """Ablation baseline: qubits dropped uniformly onto free array slots."""
    slots = np.repeat(np.arange(config.n_arrays),
                      [config.array_capacity(a) for a in range(config.n_arrays)])
    rng = np.random.default_rng(seed)
    rng.shuffle(slots)
    if n > len(slots):
        raise ValueError(f"{n} qubits exceed total capacity {len(slots)}")
    return slots[:n].copy()


@dataclass
class CompileResult:
    circuit: Circuit          # basis-lowered input
    assignment: np.ndarray    # qubit -> array id
    routed: RoutedCircuit
    placement: Placement
    schedule: Schedule
    report: FidelityReport
    ledger: TimeLedger
    stats: dict


def compile_circuit(
    circuit: Circuit,
    config: ArchConfig,
    params: HardwareParams | None = None,
    *,
    seed: int = 0,
    serial: bool = False,
    relaxed: tuple[str, ...] = (),
    order: str = "weight",
    mapper: str = "greedy",
) -> CompileResult:
    """Run the whole pipeline and score the result.

    mapper="random" replaces the greedy partitioner with a seeded uniform
    slot assignment (the ablation baseline); everything downstream is shared.
    """
    if params is None:
        params = HardwareParams()
    for name in relaxed:
        config = relax_constraint(config, name)
    t0 = time.perf_counter()

    basis = to_basis(circuit)
    n = basis.n_qubits
    if n > sum(partition_capacities(config)):
        raise ValueError(f"{n} qubits exceed total array capacity")

    if mapper == "greedy":
        weights = gate_frequency_graph(basis)
        assignment = assign_arrays(weights, config, order=order)
    elif mapper == "random":
        assignment = random_assignment(n, config, seed)
    else:
        raise ValueError(f"unknown mapper {mapper!r}")

    routed = route_inter_array(basis, assignment)
    placement = place_atoms(routed.circuit, routed.assignment, config)
    schedule = route(routed, placement, config, serial=serial)
    report, ledger = apply_schedule(schedule, params)
    wall = time.perf_counter() - t0

    in_stats = circuit_stats(basis)
    stats = {
        "schema_version": 1,
        "n_qubits": n,
        "n_1q_input": in_stats.n_1q,
        "n_2q_input": in_stats.n_2q,
        "n_1q": report.N_1Q,
        "n_2q": report.N_2Q,
        "added_cx": routed.added_cx,
        "two_qubit_depth": schedule.depth,
        "n_stages": len(schedule.stages),
        "n_raman_layers": schedule.n_raman_layers,
        "n_coolings": report.N_cooling,
        "overlap_rejections": schedule.overlap_rejections,
        "execution_time_s": execution_time(ledger),
        "total_move_distance_mm": schedule.total_distance_um / 1000.0,
        "fidelity": {"F_total": report.F_total, **report.factors()},
        "neg_log": report.neg_log_breakdown(),
        "times": {
            "T_1Q_total": ledger.T_1Q_total,
            "T_2Q_total": ledger.T_2Q_total,
            "T_move_total": ledger.T_move_total,
            "T_transfer_total": ledger.T_transfer_total,
        },
        "assignment": [int(a) for a in assignment],
        "placement": [[placement[q].array, placement[q].row, placement[q].col]
                      for q in range(n)],
        "perm": list(routed.perm),
        "compile_wall_time_s": wall,
    }
    return CompileResult(basis, assignment, routed, placement, schedule,
                         report, ledger, stats)
