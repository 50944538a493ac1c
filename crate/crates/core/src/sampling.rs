//! Deterministic seeded sampling: low-discrepancy direction sets on the
//! metric unit sphere and Kronecker lattices over chart boxes. No global
//! RNG; every sample set is a pure function of its seed.

use crate::{Matrix, Vector};

/// SplitMix64, used to derive per-seed phases.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Symmetric square root of an SPD matrix and its inverse.
pub fn spd_sqrt_and_inv_sqrt(g: &Matrix) -> (Matrix, Matrix) {
    let eig = nalgebra::SymmetricEigen::new(g.clone());
    let m = g.nrows();
    let mut s = Matrix::zeros(m, m);
    let mut si = Matrix::zeros(m, m);
    for k in 0..m {
        let lam = eig.eigenvalues[k].max(0.0).sqrt();
        let col = eig.eigenvectors.column(k);
        let outer = &col * col.transpose();
        s += &outer * lam;
        si += &outer / lam;
    }
    (s, si)
}

/// Euclidean-unit directions in `R^m`: equispaced-with-phase on the circle
/// for `m = 2`, a Fibonacci sphere for `m = 3`, seeded Gaussian-free
/// rejection-free mapping otherwise.
pub fn unit_directions(m: usize, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = SplitMix64::new(seed);
    let phase = rng.next_f64();
    match m {
        1 => (0..count)
            .map(|k| Vector::from_vec(vec![if k % 2 == 0 { 1.0 } else { -1.0 }]))
            .collect(),
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * ((k as f64 + phase) / count as f64);
                Vector::from_vec(vec![a.cos(), a.sin()])
            })
            .collect(),
        3 => {
            // Fibonacci sphere with a seeded longitude phase.
            let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let a = 2.0 * std::f64::consts::PI * ((k as f64 / golden + phase) % 1.0);
                    Vector::from_vec(vec![r * a.cos(), r * a.sin(), z])
                })
                .collect()
        }
        _ => (0..count)
            .map(|_| {
                // Box-Muller-free: normalize a vector of centered uniforms;
                // adequate for the m > 3 fallback which the catalog never hits.
                let mut v = Vector::from_iterator(m, (0..m).map(|_| rng.next_f64() - 0.5));
                while v.norm() < 1e-9 {
                    v = Vector::from_iterator(m, (0..m).map(|_| rng.next_f64() - 0.5));
                }
                let n = v.norm();
                v / n
            })
            .collect(),
    }
}

/// `count` directions of unit g-norm: Euclidean unit directions mapped
/// through `g^{-1/2}`.
pub fn g_unit_directions(g: &Matrix, count: usize, seed: u64) -> Vec<Vector> {
    let (_, gi) = spd_sqrt_and_inv_sqrt(g);
    unit_directions(g.nrows(), count, seed)
        .into_iter()
        .map(|v| &gi * v)
        .collect()
}

/// g-orthonormal pairs `(x, y)`: the Euclidean pre-images are orthogonal,
/// so the images are g-orthonormal.
pub fn g_orthonormal_pairs(g: &Matrix, count: usize, seed: u64) -> Vec<(Vector, Vector)> {
    let m = g.nrows();
    let (_, gi) = spd_sqrt_and_inv_sqrt(g);
    let dirs = unit_directions(m, count, seed);
    let mut rng = SplitMix64::new(seed ^ 0xa5a5_a5a5_dead_beef);
    dirs.into_iter()
        .map(|v| {
            let w = match m {
                2 => Vector::from_vec(vec![-v[1], v[0]]),
                _ => {
                    // Any unit vector orthogonal to v, deterministic per draw.
                    let mut cand = Vector::from_iterator(m, (0..m).map(|_| rng.next_f64() - 0.5));
                    let mut w = &cand - &v * v.dot(&cand);
                    while w.norm() < 1e-6 {
                        cand = Vector::from_iterator(m, (0..m).map(|_| rng.next_f64() - 0.5));
                        w = &cand - &v * v.dot(&cand);
                    }
                    let n = w.norm();
                    w / n
                }
            };
            (&gi * v, &gi * w)
        })
        .collect()
}

/// Kronecker lattice over the central part of a domain box: deterministic,
/// roughly equidistributed chart points with a margin from the boundary.
pub fn lattice_points(domain: &[[f64; 2]], count: usize, margin: f64, seed: u64) -> Vec<Vector> {
    let m = domain.len();
    // Generalized golden ratios per Kronecker sequence practice.
    let mut alphas = Vec::with_capacity(m);
    let phi = match m {
        1 => 1.618_033_988_749_895,
        2 => 1.324_717_957_244_746, // plastic number
        _ => 1.220_744_084_605_76,
    };
    let mut a = 1.0 / phi;
    for _ in 0..m {
        alphas.push(a);
        a = (a / phi) % 1.0 + (a * a) % 1.0;
        a %= 1.0;
        if a == 0.0 {
            a = 0.37;
        }
    }
    let mut rng = SplitMix64::new(seed);
    let offsets: Vec<f64> = (0..m).map(|_| rng.next_f64()).collect();
    (0..count)
        .map(|k| {
            Vector::from_iterator(
                m,
                (0..m).map(|i| {
                    let frac = (offsets[i] + (k as f64 + 1.0) * alphas[i]) % 1.0;
                    let [lo, hi] = domain[i];
                    let width = hi - lo;
                    lo + width * (margin + (1.0 - 2.0 * margin) * frac)
                }),
            )
        })
        .collect()
}
