//! Exact rational arithmetic with p-adic valuations and normal forms over
//! the local ring `Z_(p)`.

mod matrix;
mod normal_form;
mod rat;

pub use matrix::RatMatrix;
pub use normal_form::{
    complete_basis, elementary_divisors, hnf_local, hnf_with_pivots, intersect_saturate,
    smith_local, LocalSmith,
};
pub use rat::{check_prime, is_prime, vval, ExtVal, Rat};

/// Results of the subspace operations used when building common frames.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceOps {
    /// Hermite basis of the saturated sublattice `L ∩ W`.
    pub intersect_saturate: RatMatrix,
    /// Vectors completing `intersect_saturate` to a basis of `L`, if any.
    pub complete: Option<RatMatrix>,
}

/// Saturate `W` inside `L` and complete the result to a basis of `L`.
pub fn subspace_ops(l: &RatMatrix, w: &RatMatrix, p: u64) -> crate::Result<SubspaceOps> {
    let sat = intersect_saturate(l, w, p)?;
    let complete = complete_basis(l, &sat, p)?;
    Ok(SubspaceOps { intersect_saturate: sat, complete })
}
