use crate::linalg::{determinant, dot};
use crate::special::factorial;

/// `√|det G|` with `G_ij = ⟨v_i, v_j⟩`; zero for a dependent frame.
pub fn gram_volume(frame: &[&[f64]]) -> f64 {
    let m = frame.len();
    if m == 0 {
        return 1.0;
    }
    let mut g = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let v = dot(frame[i], frame[j]);
            g[i * m + j] = v;
            g[j * m + i] = v;
        }
    }
    determinant(m, &g).abs().sqrt()
}

/// `m! (max_i ‖v_i‖₂)^m`, the majorant of the Gram volume used in the bound.
pub fn hadamard_majorant(frame: &[&[f64]]) -> f64 {
    let m = frame.len();
    let max = frame.iter().map(|v| dot(v, v).sqrt()).fold(0.0, f64::max);
    factorial(m) * max.powi(m as i32)
}

/// Hadamard's sharper `Π_i ‖v_i‖₂`.
pub fn hadamard_product(frame: &[&[f64]]) -> f64 {
    frame.iter().map(|v| dot(v, v).sqrt()).product()
}

/// True iff `gram_volume ≤ m! (max_i ‖v_i‖₂)^m` (up to round-off).
pub fn gram_hadamard_check(frame: &[&[f64]]) -> bool {
    gram_volume(frame) <= hadamard_majorant(frame) * (1.0 + 1e-12)
}
