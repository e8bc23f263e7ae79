"""Compiler and fidelity estimator for reconfigurable neutral-atom arrays."""

from .arch import (
    ArchConfig,
    AtomCoord,
    HardwareParams,
    LaneModel,
    Violation,
    load_config,
    min_separation_audit,
)
from .array_mapper import assign_arrays, brute_force_max_kcut, greedy_max_kcut
from .atom_mapper import place_atoms
from .circuit import (
    Circuit,
    Gate,
    ParseError,
    build_dag,
    circuit_stats,
    front_layer,
    gate_frequency_graph,
    parse_qasm,
    to_basis,
    to_qasm,
)
from .fidelity import (
    FidelityReport,
    TimeLedger,
    apply_schedule,
    delta_nvib,
    execution_time,
    heating_factor,
    move_survival,
)
from .oracle import equivalent_up_to_permutation, flatten, simulate
from .pipeline import CompileResult, compile_circuit
from .stage_router import (
    Schedule,
    Stage,
    audit_schedule,
    route,
    route_serial,
    schedule_from_dict,
    schedule_to_dict,
)
from .swap_router import RoutedCircuit, route_inter_array
from .workloads import (
    WorkloadSpec,
    gen_bv,
    gen_qaoa_random,
    gen_qaoa_regular,
    gen_qsim_random,
    gen_random_pairs,
)

__version__ = "0.1.0"
