//! Gauss rules for expectations under a Gamma law.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes `x_i` and weights `w_i` such that
/// `E[g(X)] ≈ Σ w_i g(x_i)` for `X ~ Gamma(shape, 1)`.
///
/// Generalized Gauss–Laguerre rule with parameter `shape - 1` built by the
/// Golub–Welsch method. The Jacobi matrix is centred on `shape` and scaled
/// by `sqrt(shape)` before the eigen-decomposition so that large shapes
/// (nearly degenerate distributions) keep full relative accuracy. Weights
/// are normalised to sum to one.
pub fn gamma_rule(shape: f64, nodes: usize) -> Result<Vec<(f64, f64)>> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::Domain(format!("Gamma shape must be positive, got {shape}")));
    }
    if nodes == 0 {
        return Err(Error::InvalidConfig("need at least one quadrature node".into()));
    }
    let alpha = shape - 1.0;
    let centre = shape;
    let scale = shape.sqrt();
    let mut jacobi = DMatrix::<f64>::zeros(nodes, nodes);
    for i in 0..nodes {
        let fi = i as f64;
        // diagonal 2i + alpha + 1, shifted by `centre`
        jacobi[(i, i)] = 2.0 * fi / scale;
        if i > 0 {
            let off = (fi * (fi + alpha)).sqrt() / scale;
            jacobi[(i, i - 1)] = off;
            jacobi[(i - 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..nodes)
        .map(|j| {
            let x = centre + scale * eig.eigenvalues[j];
            let v0 = eig.eigenvectors[(0, j)];
            (x.max(0.0), v0 * v0)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = rule.iter().map(|r| r.1).sum();
    for r in &mut rule {
        r.1 /= total;
    }
    Ok(rule)
}
