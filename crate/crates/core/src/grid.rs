//! Radial discretization of the unit disk: mesh, disk-measure quadrature and
//! the discrete L²(B) inner product in which every integral identity of the
//! solver is evaluated.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform radial mesh on [0, 1] with disk quadrature weights.
///
/// Nodes are r_i = i·h for i = 0..n+1 with h = 1/(n+1); r_0 = 0 is the
/// center, r_{n+1} = 1 the Dirichlet boundary. The weights are the exact
/// areas of the cells [r_i - h/2, r_i + h/2] ∩ [0, 1], so Σ wᵢ = π to
/// round-off and the flux-form Laplacian is exactly self-adjoint in the
/// induced inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    n: usize,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    /// Number of interior nodes (excludes center and boundary).
    pub fn n_interior(&self) -> usize {
        self.n
    }

    /// Total node count, n + 2.
    pub fn len(&self) -> usize {
        self.n + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mesh spacing h = 1/(n+1).
    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    pub(crate) fn check_len(&self, field: &RadialField) -> Result<()> {
        if field.len() == self.len() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.len(),
                got: field.len(),
            })
        }
    }
}

/// Nodal values of a radial function, including center and boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField(Vec<f64>);

impl RadialField {
    pub fn zeros_on(grid: &RadialGrid) -> Self {
        Self(vec![0.0; grid.len()])
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self(values)
    }

    /// Sample a function of r at every node.
    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self(grid.nodes().iter().map(|&r| f(r)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    /// ‖u‖∞ over all nodes.
    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, &v| m.max(libm::fabs(v)))
    }

    /// self += c · other (lengths must already agree).
    pub fn add_scaled(&mut self, c: f64, other: &RadialField) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for a in &mut self.0 {
            *a *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> RadialField {
        let mut out = self.clone();
        out.scale(c);
        out
    }
}

/// Build the uniform grid with cell-area quadrature weights.
pub fn make_grid(n: usize) -> Result<RadialGrid> {
    if n < 8 {
        return Err(Error::Config(format!(
            "grid needs n >= 8 interior nodes, got {n}"
        )));
    }
    let h = 1.0 / (n as f64 + 1.0);
    let nodes: Vec<f64> = (0..n + 2).map(|i| i as f64 * h).collect();
    let mut weights = vec![0.0; n + 2];
    weights[0] = 0.25 * PI * h * h;
    for (i, w) in weights.iter_mut().enumerate().take(n + 1).skip(1) {
        *w = 2.0 * PI * (i as f64 * h) * h;
    }
    weights[n + 1] = PI * h * (1.0 - 0.25 * h);
    Ok(RadialGrid {
        n,
        h,
        nodes,
        weights,
    })
}

/// Σ wᵢ vᵢ ≈ ∫_B v dx = 2π ∫₀¹ v(r) r dr.
pub fn integrate_disk(grid: &RadialGrid, v: &RadialField) -> Result<f64> {
    grid.check_len(v)?;
    let mut sum = 0.0;
    for (w, x) in grid.weights().iter().zip(v.values()) {
        sum += w * x;
    }
    Ok(sum)
}

/// Discrete L²(B) pairing Σ wᵢ uᵢ vᵢ; symmetric and, on fields vanishing at
/// the boundary, positive definite.
pub fn inner(grid: &RadialGrid, u: &RadialField, v: &RadialField) -> Result<f64> {
    grid.check_len(u)?;
    grid.check_len(v)?;
    let mut sum = 0.0;
    for ((w, a), b) in grid.weights().iter().zip(u.values()).zip(v.values()) {
        sum += w * (a * b);
    }
    Ok(sum)
}

/// Disk-L² norm, sqrt(inner(u, u)).
pub fn disk_norm(grid: &RadialGrid, u: &RadialField) -> Result<f64> {
    Ok(libm::sqrt(inner(grid, u, u)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_tiny_grids() {
        assert!(matches!(make_grid(4), Err(Error::Config(_))));
        assert!(matches!(make_grid(7), Err(Error::Config(_))));
        assert!(make_grid(8).is_ok());
    }

    #[test]
    fn smallest_grid_layout() {
        let g = make_grid(8).unwrap();
        assert_eq!(g.len(), 10);
        assert!((g.spacing() - 1.0 / 9.0).abs() < 1e-16);
        assert!((g.node(1) - 1.0 / 9.0).abs() < 1e-16);
        assert_eq!(g.node(0), 0.0);
        assert!((g.node(9) - 1.0).abs() < 1e-16);
    }

    #[test]
    fn nodes_increase_and_weights_positive() {
        let g = make_grid(128).unwrap();
        for i in 1..g.len() {
            assert!(g.node(i) > g.node(i - 1));
        }
        assert!(g.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn unit_integrates_to_disk_area() {
        for n in [8, 128, 256, 512] {
            let g = make_grid(n).unwrap();
            let one = RadialField::from_fn(&g, |_| 1.0);
            let q = integrate_disk(&g, &one).unwrap();
            // Cell areas tile the disk; only round-off remains.
            assert!((q - core::f64::consts::PI).abs() < 1e-12, "n={n}: {q}");
        }
    }

    #[test]
    fn paraboloid_quadrature_matches_derived_value() {
        let g = make_grid(256).unwrap();
        let v = RadialField::from_fn(&g, |r| 1.0 - r * r);
        let q = integrate_disk(&g, &v).unwrap();
        let h = g.spacing();
        // Exact discrete value of the cell-area rule on 1 - r², by hand.
        let exact_discrete = 0.5 * core::f64::consts::PI - 0.25 * core::f64::consts::PI * h * h;
        assert!((q - exact_discrete).abs() < 1e-12);
        assert!((q - 0.5 * core::f64::consts::PI).abs() < 1.3e-5);
    }

    #[test]
    fn zero_field_integrates_to_zero() {
        let g = make_grid(64).unwrap();
        let z = RadialField::zeros_on(&g);
        assert_eq!(integrate_disk(&g, &z).unwrap(), 0.0);
        let u = RadialField::from_fn(&g, |r| r + 0.3);
        assert_eq!(inner(&g, &u, &z).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_error_decays_second_order() {
        // Reference: 2π ∫₀¹ cos(r) r dr = 2π (cos 1 + sin 1 - 1).
        let reference = 2.0 * core::f64::consts::PI * (1.0f64.cos() + 1.0f64.sin() - 1.0);
        let err = |n: usize| {
            let g = make_grid(n).unwrap();
            let v = RadialField::from_fn(&g, |r| r.cos());
            (integrate_disk(&g, &v).unwrap() - reference).abs()
        };
        let ratio = err(128) / err(256);
        assert!(
            (3.0..5.0).contains(&ratio),
            "expected ~4x error drop per doubling, got {ratio}"
        );
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let g = make_grid(16).unwrap();
        let short = RadialField::from_values(vec![1.0; 5]);
        assert!(matches!(
            integrate_disk(&g, &short),
            Err(Error::Shape {
                expected: 18,
                got: 5
            })
        ));
    }

    #[test]
    fn inner_positive_definite_on_dirichlet_fields() {
        let g = make_grid(32).unwrap();
        // A field supported on the center node alone must still have
        // positive norm.
        let mut u = RadialField::zeros_on(&g);
        u.values_mut()[0] = 1.0;
        assert!(inner(&g, &u, &u).unwrap() > 0.0);
    }

    proptest! {
        #[test]
        fn inner_is_symmetric_and_bilinear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            use rand::{Rng, SeedableRng};
            let g = make_grid(24).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let u = RadialField::from_values((0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect());
            let v = RadialField::from_values((0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect());
            let w = RadialField::from_values((0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect());

            prop_assert_eq!(inner(&g, &u, &v).unwrap(), inner(&g, &v, &u).unwrap());

            let mut au_bv = u.scaled(a);
            au_bv.add_scaled(b, &v);
            let lhs = inner(&g, &au_bv, &w).unwrap();
            let rhs = a * inner(&g, &u, &w).unwrap() + b * inner(&g, &v, &w).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs() + rhs.abs()));
        }
    }
}
