use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic-in-x, wall-graded-in-z channel discretization.
///
/// The `z` nodes are mirror symmetric about 1/2 and carry composite
/// trapezoid weights for `∫₀¹ dz`. Second-order three-point stencils for the
/// first and second z-derivative are precomputed once.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGrid {
    length: f64,
    nx: usize,
    z: Vec<f64>,
    weights: Vec<f64>,
    stretch: f64,
    d1: Vec<[f64; 3]>,
    d2: Vec<[f64; 3]>,
}

/// Wall index: 0 is the lower wall `z = 0`, 1 the upper wall `z = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wall {
    Lower,
    Upper,
}

impl Wall {
    pub const BOTH: [Wall; 2] = [Wall::Lower, Wall::Upper];

    pub fn coordinate(self) -> f64 {
        match self {
            Wall::Lower => 0.0,
            Wall::Upper => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Wall::Lower => 0,
            Wall::Upper => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Wall::Lower => "lower",
            Wall::Upper => "upper",
        }
    }
}

impl ChannelGrid {
    /// Build the channel grid.
    ///
    /// Nodes follow `z_j = ½(1 + tanh(β ξ_j)/tanh β)` with `ξ_j = 2j/(nz−1) − 1`
    /// and `β = atanh(stretch)`, which reduces to the uniform mesh at
    /// `stretch = 0` and clusters nodes at both walls as `stretch → 1`.
    pub fn new(nx: usize, nz: usize, stretch: f64, length: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if nx < 4 || nx % 2 != 0 {
            problems.push(format!("nx must be even and >= 4 (got {nx})"));
        }
        if nz < 3 || nz % 2 == 0 {
            problems.push(format!("nz must be odd and >= 3 (got {nz})"));
        }
        if !(0.0..1.0).contains(&stretch) {
            problems.push(format!("stretch must lie in [0,1) (got {stretch})"));
        }
        if !(length > 0.0 && length.is_finite()) {
            problems.push(format!("length must be positive (got {length})"));
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems.join("; ")));
        }

        let beta = stretch.atanh();
        let last = nz - 1;
        let mid = last / 2;
        let mut z = vec![0.0; nz];
        for j in 1..mid {
            let xi = 2.0 * j as f64 / last as f64 - 1.0;
            z[j] = if beta == 0.0 {
                0.5 * (1.0 + xi)
            } else {
                0.5 * (1.0 + (beta * xi).tanh() / beta.tanh())
            };
        }
        z[mid] = 0.5;
        for j in 0..mid {
            z[last - j] = 1.0 - z[j];
        }
        z[0] = 0.0;
        z[last] = 1.0;

        let mut weights = vec![0.0; nz];
        for j in 0..last {
            let h = z[j + 1] - z[j];
            weights[j] += 0.5 * h;
            weights[j + 1] += 0.5 * h;
        }

        let mut d1 = vec![[0.0; 3]; nz];
        let mut d2 = vec![[0.0; 3]; nz];
        {
            let (h1, h2) = (z[1] - z[0], z[2] - z[1]);
            d1[0] = [
                -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
                (h1 + h2) / (h1 * h2),
                -h1 / (h2 * (h1 + h2)),
            ];
            let (h1, h2) = (z[last] - z[last - 1], z[last - 1] - z[last - 2]);
            d1[last] = [
                h1 / (h2 * (h1 + h2)),
                -(h1 + h2) / (h1 * h2),
                (2.0 * h1 + h2) / (h1 * (h1 + h2)),
            ];
        }
        for j in 1..last {
            let hm = z[j] - z[j - 1];
            let hp = z[j + 1] - z[j];
            d1[j] = [-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))];
            d2[j] = [2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))];
        }

        Ok(Self { length, nx, z, weights, stretch, d1, d2 })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nz(&self) -> usize {
        self.z.len()
    }

    /// Number of stored (non-negative) Fourier modes, `nx/2 + 1`.
    pub fn nmodes(&self) -> usize {
        self.nx / 2 + 1
    }

    pub fn stretch(&self) -> f64 {
        self.stretch
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| i as f64 * self.length / self.nx as f64).collect()
    }

    /// `2πk/L`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.length
    }

    /// Wavenumber used for odd x-derivatives: zero at the Nyquist mode.
    pub fn derivative_wavenumber(&self, k: usize) -> f64 {
        if k == self.nx / 2 {
            0.0
        } else {
            self.wavenumber(k)
        }
    }

    /// Parseval multiplicity of stored mode `k` (1 for the mean and Nyquist, 2 otherwise).
    pub fn mode_multiplicity(&self, k: usize) -> f64 {
        if k == 0 || k == self.nx / 2 {
            1.0
        } else {
            2.0
        }
    }

    /// Three-point first-derivative stencil at node `j`: `(start, coefficients)`.
    pub fn d1_stencil(&self, j: usize) -> (usize, [f64; 3]) {
        let last = self.nz() - 1;
        let start = if j == 0 {
            0
        } else if j == last {
            last - 2
        } else {
            j - 1
        };
        (start, self.d1[j])
    }

    /// Three-point second-derivative stencil at interior node `j`.
    pub fn d2_stencil(&self, j: usize) -> [f64; 3] {
        self.d2[j]
    }

    pub fn min_spacing(&self) -> f64 {
        self.z.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Count of nodes strictly inside the layer `dist(z, wall) < width`, wall node excluded.
    pub fn nodes_within(&self, width: f64, wall: Wall) -> usize {
        match wall {
            Wall::Lower => self.z.iter().skip(1).filter(|&&z| z < width).count(),
            Wall::Upper => self.z.iter().rev().skip(1).filter(|&&z| 1.0 - z < width).count(),
        }
    }

    /// At least eight nodes within `√ε` of each wall.
    pub fn resolves_layer(&self, epsilon: f64) -> bool {
        let width = epsilon.sqrt();
        Wall::BOTH.iter().all(|&w| self.nodes_within(width, w) >= 8)
    }
}

/// Uniform grid on the truncated half-line `[0, z_max]` in the stretched variable.
#[derive(Debug, Clone, PartialEq)]
pub struct BlGrid {
    z_max: f64,
    n: usize,
}

impl BlGrid {
    pub const DEFAULT_Z_MAX: f64 = 12.0;
    pub const DEFAULT_NODES: usize = 961;

    pub fn new(z_max: f64, n: usize) -> Result<Self> {
        if !(z_max >= 12.0 && z_max.is_finite()) {
            return Err(Error::Config(format!("z_max must be >= 12 (got {z_max})")));
        }
        if n < 3 {
            return Err(Error::Config(format!("boundary-layer grid needs >= 3 nodes (got {n})")));
        }
        let dz = z_max / (n - 1) as f64;
        if dz > 0.05 + 1e-15 {
            return Err(Error::Config(format!(
                "boundary-layer spacing {dz} exceeds 0.05; use more nodes"
            )));
        }
        Ok(Self { z_max, n })
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.z_max / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

impl Default for BlGrid {
    fn default() -> Self {
        Self::new(Self::DEFAULT_Z_MAX, Self::DEFAULT_NODES).expect("default boundary-layer grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn degenerate_uniform_grid() {
        let g = ChannelGrid::new(4, 3, 0.0, 2.0 * PI).unwrap();
        assert_eq!(g.z(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn uniform_trapezoid_weights() {
        let g = ChannelGrid::new(16, 33, 0.0, 2.0 * PI).unwrap();
        let w = g.weights();
        assert!((w[0] - 0.5 / 32.0).abs() < 1e-15);
        assert!((w[32] - 0.5 / 32.0).abs() < 1e-15);
        for &wj in &w[1..32] {
            assert!((wj - 1.0 / 32.0).abs() < 1e-15);
        }
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn graded_grid_resolves_smallest_layer() {
        let g = ChannelGrid::new(16, 2049, 0.995, 2.0 * PI).unwrap();
        // Mapping derivative at the wall: ½ β sech²β / tanh β times dξ = 2/(nz−1).
        let beta = 0.995_f64.atanh();
        let wall_slope = 0.5 * beta / (beta.cosh().powi(2) * beta.tanh());
        let predicted = wall_slope * 2.0 / 2048.0;
        assert!((g.min_spacing() - predicted).abs() / predicted < 1e-2);
        assert!(g.min_spacing() <= 0.01 / 8.0);
        assert!(g.resolves_layer(1e-4));
        assert!(g.nodes_within(0.01, Wall::Lower) >= 8);
    }

    #[test]
    fn grid_is_mirror_symmetric() {
        let g = ChannelGrid::new(8, 101, 0.9, 1.0).unwrap();
        let z = g.z();
        let n = z.len();
        for j in 0..n {
            assert!((z[j] + z[n - 1 - j] - 1.0).abs() < 1e-15);
        }
        assert!(z.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        assert!(ChannelGrid::new(5, 33, 0.0, 1.0).is_err());
        assert!(ChannelGrid::new(8, 32, 0.0, 1.0).is_err());
        assert!(ChannelGrid::new(8, 33, 1.0, 1.0).is_err());
        assert!(ChannelGrid::new(8, 33, -0.1, 1.0).is_err());
        assert!(BlGrid::new(10.0, 1000).is_err());
        assert!(BlGrid::new(12.0, 100).is_err());
    }

    #[test]
    fn uniform_mesh_is_flagged_under_resolved() {
        let g = ChannelGrid::new(16, 129, 0.0, 2.0 * PI).unwrap();
        assert!(!g.resolves_layer(1e-4));
    }
}
