//! Fixtures shared by the criterion benchmarks.

use linfqmc::oracle::{random_instance, InstanceLimits};
use linfqmc::{FiniteInstance, FunctionModel, Partition};

/// `sin(2 pi x)` on `2^m` equal cells.
pub fn sine_on_dyadic(m: u32) -> (FunctionModel, Partition) {
    (
        FunctionModel::sinusoid(0.0, 1.0, 1.0, 0.0),
        Partition::dyadic(m).expect("m <= 20"),
    )
}

/// A finite instance with a sizeable enumeration: six atoms, sixteen nodes.
pub fn large_finite_instance() -> FiniteInstance {
    let limits = InstanceLimits {
        max_atoms: 6,
        max_cells: 2,
        max_n: 16,
        value_range: (-10.0, 10.0),
    };
    (0..)
        .map(|s| random_instance(s, &limits))
        .find(|i| i.n == 16 && i.space().atom_count() == 6 && i.partition.len() == 2)
        .expect("some seed matches")
}
