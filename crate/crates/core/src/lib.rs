//! Harmonic analysis on finite non-homogeneous metric measure spaces.
//!
//! A [`Space`] is a finite point cloud with a metric, an atomic measure and a
//! dominating function `λ(x, r)`. On top of it this crate provides:
//!
//! * [`geometry`]: closed balls, dilation, `(α, β)`-doubling detection, the
//!   smallest doubling dilate `B̃`, the layer coefficients `K^(β)_{B,Q}` and a
//!   greedy disjoint-ball selection with the 5r covering guarantee.
//! * [`operators`]: fractional kernels, the fractional integral `I_α`, its
//!   commutators `[b, I_α]` and multilinear commutators `I_{α,b⃗}`.
//! * [`maximal`]: `Lᵖ(μ)` norms, the doubling maximal operator `N`, the sharp
//!   maximal operator `M^{♯,(β)}` and the fractional maximal operators
//!   `M^{(β)}_{r,(η)}`.
//! * [`rbmo`]: ball means and RBMO norm estimates with witnesses.
//! * [`harness`]: seeded generators and verification experiments that fit the
//!   constants of the boundedness estimates.
//!
//! All suprema over balls are maxima over the [`CanonicalFamily`], the
//! deduplicated set of closed balls the space actually distinguishes.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod field;
pub mod geometry;
pub mod harness;
pub mod maximal;
pub(crate) mod math;
pub mod mspace;
pub mod operators;
pub mod rbmo;
pub mod report;

pub use error::{Error, Result};
pub use field::FieldFunction;
pub use geometry::{Ball, BallPair, CanonicalFamily};
pub use mspace::{DominatingSpec, Space};
pub use operators::FractionalKernel;
pub use report::VerificationReport;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::mspace::{build_space, DominatingSpec, Space};
    use alloc::vec;

    /// Points `a`, `b` at distance 1 with the given weights, `λ = 2r`, `n = 1`.
    pub fn two_point_weighted(wa: f64, wb: f64) -> Space {
        build_space(
            vec![0.0, 1.0, 1.0, 0.0],
            vec![wa, wb],
            DominatingSpec::Power { c: 2.0, k: 1.0 },
            Some(1.0),
        )
        .unwrap()
    }

    pub fn two_point() -> Space {
        two_point_weighted(1.0, 1.0)
    }

    /// Unit-spaced line of `n` points with unit weights and `λ = (n + 1)·r⁰`.
    pub fn line(n: usize) -> Space {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = (i as f64 - j as f64).abs();
            }
        }
        build_space(
            d,
            vec![1.0; n],
            DominatingSpec::Power {
                c: n as f64 + 1.0,
                k: 0.0,
            },
            Some(1.0),
        )
        .unwrap()
    }
}
