//! Two small symmetric 2×2×2 tensors whose spectral and nuclear norms have
//! known closed forms that depend on the base field. They drive the
//! `demo-basefield` CLI subcommand and double as fixtures across the test
//! suite.

use crate::tensor::{DenseTensor, Field, Scalar};

fn r(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// Symmetric tensor with entries a₁₁₂ = a₁₂₁ = a₂₁₁ = 1/2 and a₂₂₂ = −1/2
/// (1-based indices, all other entries zero).
///
/// Closed-form values: ‖B‖_σ = 1/2 over ℝ and 1/√2 over ℂ;
/// ‖B‖_* = 2 over ℝ and √2 over ℂ; ‖B‖ = 1.
pub fn tensor_b() -> DenseTensor {
    let mut e = vec![r(0.0); 8];
    e[0b001] = r(0.5);
    e[0b010] = r(0.5);
    e[0b100] = r(0.5);
    e[0b111] = r(-0.5);
    DenseTensor::new(vec![2, 2, 2], Field::Real, e).expect("static entries")
}

/// Symmetric tensor with entries a₁₁₂ = a₁₂₁ = a₂₁₁ = 1/√3 (1-based
/// indices, all other entries zero).
///
/// Closed-form values: ‖C‖_σ = 2/3 over both ℝ and ℂ;
/// ‖C‖_* = √3 over ℝ and 3/2 over ℂ; ‖C‖ = 1.
pub fn tensor_c() -> DenseTensor {
    let s = 1.0 / 3.0f64.sqrt();
    let mut e = vec![r(0.0); 8];
    e[0b001] = r(s);
    e[0b010] = r(s);
    e[0b100] = r(s);
    DenseTensor::new(vec![2, 2, 2], Field::Real, e).expect("static entries")
}

/// Known values for [`tensor_b`]: (σ over ℝ, σ over ℂ, nuclear over ℝ,
/// nuclear over ℂ).
pub const B_VALUES: (f64, f64, f64, f64) = (
    0.5,
    std::f64::consts::FRAC_1_SQRT_2,
    2.0,
    std::f64::consts::SQRT_2,
);

/// Known values for [`tensor_c`]: (σ over ℝ, σ over ℂ, nuclear over ℝ,
/// nuclear over ℂ). The spectral norm does not depend on the field here
/// because the tensor is entrywise nonnegative.
pub fn c_values() -> (f64, f64, f64, f64) {
    (2.0 / 3.0, 2.0 / 3.0, 3.0f64.sqrt(), 1.5)
}
