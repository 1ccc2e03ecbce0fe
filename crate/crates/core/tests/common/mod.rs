#![allow(dead_code)]

use faer::Mat;
use helmfft::oracle::{dense_from_tricorner, kron};
use helmfft::{Complex64 as C64, KroneckerOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_vec(len: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_err(x: &[C64], reference: &[C64]) -> f64 {
    assert_eq!(x.len(), reference.len());
    let d: f64 = x.iter().zip(reference).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    d / norm(reference).max(f64::MIN_POSITIVE)
}

/// Dense matrix of a Kronecker operator, term by term.
pub fn dense_operator(op: &KroneckerOperator) -> Mat<C64> {
    let n = op.len();
    let mut total = Mat::<C64>::zeros(n, n);
    for term in op.terms() {
        let mut m = dense_from_tricorner(&term.factors[0]);
        for f in &term.factors[1..] {
            m = kron(&m, &dense_from_tricorner(f));
        }
        total = &total + &(&m * faer::Scale(term.coeff));
    }
    total
}
