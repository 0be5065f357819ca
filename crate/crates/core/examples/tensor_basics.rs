//! Partial traces, matrix functions and entropies on two qubits.

use ee_response::response::{binary_entropy, von_neumann_entropy};
use ee_response::tensor::{
    kron, matrix_func_hermitian, partial_trace, pauli, BipartitePartition, MatrixFunction, Subsystem,
};
use ee_response::models::maximally_entangled_state;

fn main() -> ee_response::Result<()> {
    let bell = maximally_entangled_state(2)?;
    let part = BipartitePartition::new(2, 2)?;
    let rho_a = partial_trace(&bell, part, Subsystem::A)?;
    println!("Bell state: S(rho_A) = {:.12} (ln 2 = {:.12})", von_neumann_entropy(&rho_a)?, 2f64.ln());

    // ln of a rank-deficient matrix needs the floor
    let log = matrix_func_hermitian(rho_a.operator(), MatrixFunction::Log, 1e-14)?;
    println!("ln rho_A diagonal: {:.6} {:.6}, floored {}", log.op.get(0, 0).re, log.op.get(1, 1).re, log.floored);

    let h = kron(&pauli::z(), &pauli::identity()).try_add(&kron(&pauli::x(), &pauli::x()))?;
    let u = matrix_func_hermitian(&h, MatrixFunction::Exp, 0.0)?;
    println!("tr exp(H) = {:.10}", u.op.trace().re);

    for p in [0.0, 0.1, 0.5] {
        println!("binary entropy({p}) = {:.12}", binary_entropy(p));
    }
    Ok(())
}
