// `!(a < b)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod choreo;
pub mod convexity;
pub mod dynamics;
pub mod integrator;
pub mod interval;
pub mod rootfind;
pub mod scalar;
