//! Ladder operators on a truncated Fock space, Pauli algebra on a qubit,
//! and how the hard cutoff shows up in the canonical commutator.

use energy_exchange::hilbert::{Operator, Pauli, SpaceDescriptor, StateVector};
use energy_exchange::CoherentSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mode = SpaceDescriptor::boson(6)?;
    let a = Operator::annihilation(&mode, 0)?;
    let comm = a.commutator(&a.dagger())?;
    // [a, a^dagger] = 1 everywhere except the top level, which reads 1 - dim
    for n in 0..6 {
        println!("[a, a+] on |{n}> = {:+.1}", comm.matrix()[(n, n)].re);
    }

    let qubit = SpaceDescriptor::two_level();
    let x = Operator::pauli(&qubit, 0, Pauli::X)?;
    let y = Operator::pauli(&qubit, 0, Pauli::Y)?;
    let z = Operator::pauli(&qubit, 0, Pauli::Z)?;
    let lhs = x.commutator(&y)?;
    let rhs = z.scale(num_complex::Complex64::new(0.0, 2.0));
    println!("|[sx, sy] - 2i sz| = {:.1e}", lhs.sub(&rhs)?.max_abs());

    let joint = mode.tensor(&qubit);
    let psi = StateVector::basis(&joint, &[2, 1])?;
    let n = Operator::number(&joint, 0)?;
    println!("<n> on |2> x |e> = {}", n.expectation(&psi)?.re);

    let coherent = CoherentSpec::real(2.0);
    println!(
        "coherent |alpha|=2 needs cutoff {} for tail <= {:e}",
        coherent.min_cutoff(),
        CoherentSpec::DEFAULT_TAIL
    );
    Ok(())
}
