//! Shared inputs for the criterion benches.

use qinv_core::reductions::quartic_generators;
use qinv_core::PermTuple;

/// `(p1, p1, p2, p3)` over the three quartic 4-cycles.
pub fn quartic_tuple() -> PermTuple {
    let [p1, p2, p3] = quartic_generators();
    PermTuple::new(vec![p1.clone(), p1, p2, p3]).expect("four letters")
}

/// The five-copy tuple that merges and splices down to a quadratic invariant.
pub fn quintic_tuple() -> PermTuple {
    PermTuple::parse(
        "(1,2)(3,4,5);(1,2,3)(4,5);(1,2,4)(3,5);(1,2,5)(3,4)",
        Some(5),
    )
    .expect("valid tuple")
}
