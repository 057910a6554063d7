//! Seeded random matrices for tests and the property suite.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    General,
    /// `X - (tr X / n) I`
    Traceless,
    /// `(X + X^*) / 2`
    Hermitian,
}

/// Stream of random matrices with real and imaginary parts uniform in `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct MatrixSampler {
    rng: ChaCha8Rng,
}

impl MatrixSampler {
    pub fn new(seed: Seed) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed.0),
        }
    }

    pub fn scalar(&mut self) -> Complex64 {
        Complex64::new(self.rng.random_range(-1.0..=1.0), self.rng.random_range(-1.0..=1.0))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// A fresh seed for a sub-stream.
    pub fn seed(&mut self) -> Seed {
        Seed(self.rng.random())
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    pub fn rect(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.scalar())
    }

    /// Real entries uniform in `[-1, 1]`.
    pub fn real(&mut self, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(self.rng.random_range(-1.0..=1.0), 0.0))
    }

    pub fn matrix(&mut self, n: usize, kind: MatrixKind) -> ComplexMatrix {
        let x = self.rect(n, n);
        match kind {
            MatrixKind::General => x,
            MatrixKind::Traceless => {
                let shift: Complex64 = (0..n).map(|i| x[(i, i)]).sum::<Complex64>() / n as f64;
                let mut y = x;
                for i in 0..n {
                    y[(i, i)] -= shift;
                }
                y
            }
            MatrixKind::Hermitian => (&x + &x.adjoint()).scale_real(0.5),
        }
    }
}

/// One `n x n` sample drawn from a fresh stream for `seed`.
pub fn sample_matrix(n: usize, seed: Seed, kind: MatrixKind) -> ComplexMatrix {
    MatrixSampler::new(seed).matrix(n, kind)
}
