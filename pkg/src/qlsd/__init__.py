"""Exact verification toolkit for entanglement-assisted local state discrimination."""

from .scalars import CScalar, QScalar
from .linalg import Matrix, kron, null_space_real, projector
from .model import (
    Ket,
    PartyLayout,
    ProductState,
    Resource,
    StateSet,
    inner,
    lu_relabel_check,
    schmidt_rank,
    single_party_marginal,
    tensor,
)
from .catalog import (
    build_g3,
    build_g_general,
    build_h,
    build_s_ben,
    build_sg5,
    build_sigma,
    append_fixed_local,
    union_orthogonal,
)
from .protocol import (
    Leaf,
    MeasurementNode,
    ProtocolTree,
    RunReport,
    SequentialTask,
    run_exhaustive,
    run_sequential,
    validate,
)
from .builders import (
    build_prop3_protocol,
    build_prop5_protocol,
    build_theorem1_protocol,
    build_twistbreak_L1,
    twistbreak_stall_report,
)
from .irreducibility import gnps_evidence, oplm_space
from .ordering import Task, ordering_report, payoff

__all__ = [
    "CScalar", "QScalar", "Matrix", "kron", "null_space_real", "projector",
    "Ket", "PartyLayout", "ProductState", "Resource", "StateSet", "inner",
    "lu_relabel_check", "schmidt_rank", "single_party_marginal", "tensor",
    "build_g3", "build_g_general", "build_h", "build_s_ben", "build_sg5",
    "build_sigma", "append_fixed_local", "union_orthogonal",
    "Leaf", "MeasurementNode", "ProtocolTree", "RunReport", "SequentialTask",
    "run_exhaustive", "run_sequential", "validate",
    "build_prop3_protocol", "build_prop5_protocol", "build_theorem1_protocol",
    "build_twistbreak_L1", "twistbreak_stall_report",
    "gnps_evidence", "oplm_space",
    "Task", "ordering_report", "payoff",
]
