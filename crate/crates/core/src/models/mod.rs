//! Benchmark circuit families.

mod e3lin2;
mod layered;

pub use e3lin2::{
    build_qaoa_circuit, generate_e3lin2, instance_max_nonzero_order, max_nonzero_order, max_nonzero_order_at,
    qaoa_cost, qaoa_programs, Clause, E3Lin2Instance, QaoaTerm, MAX_ORDER_PROBE_GAMMA, NONZERO_TOLERANCE,
};
pub use layered::{generate_layered_clifford, LayeredCliffordSpec};
