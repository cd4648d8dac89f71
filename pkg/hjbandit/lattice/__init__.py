from .codec import (
    decode_value_field,
    encode_value_field,
    format_number,
    value_csv,
    write_value_csv,
)
from .grid import PRESETS, GridPreset, GridSpec, ValueField
from .interp import clamp_states, multilinear
from .operator import (
    ArmBlockSolver,
    Coefficients,
    SparseStep,
    apply_block,
    assemble_generator,
    check_cfl,
    explicit_dt_bound,
    factorize,
    generator_matrix,
    is_m_matrix,
)
from .stencils import forward_q, second_x, upwind_first_x

__all__ = [
    # grids
    "GridPreset",
    "GridSpec",
    "PRESETS",
    "ValueField",
    "clamp_states",
    "multilinear",
    # stencils and operators
    "ArmBlockSolver",
    "Coefficients",
    "SparseStep",
    "apply_block",
    "assemble_generator",
    "check_cfl",
    "explicit_dt_bound",
    "factorize",
    "forward_q",
    "generator_matrix",
    "is_m_matrix",
    "second_x",
    "upwind_first_x",
    # serialisation
    "decode_value_field",
    "encode_value_field",
    "format_number",
    "value_csv",
    "write_value_csv",
]
