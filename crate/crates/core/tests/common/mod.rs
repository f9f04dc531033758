//! Seeded random inputs shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsdistill::linalg::CMatrix;
use qsdistill::states::{DensityMatrix, Ket, MM, MP, PM, PP};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut impl Rng) -> f64 {
    // Box-Muller
    let u: f64 = r.gen_range(f64::EPSILON..1.0);
    let v: f64 = r.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn complex_gaussian(r: &mut impl Rng) -> C64 {
    C64::new(gaussian(r), gaussian(r))
}

pub fn random_hermitian(r: &mut impl Rng, dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = C64::new(gaussian(r), 0.0);
        for j in i + 1..dim {
            let z = complex_gaussian(r);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn random_matrix(r: &mut impl Rng, dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = complex_gaussian(r);
        }
    }
    m
}

/// `G G† / tr(G G†)` for a Gaussian `G`; full rank with probability one.
pub fn random_density(r: &mut impl Rng) -> DensityMatrix {
    let g = random_matrix(r, 4);
    let m = &g * &g.dagger();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}

pub fn random_ket(r: &mut impl Rng) -> Ket {
    let mut k = [C64::new(0.0, 0.0); 4];
    k.iter_mut().for_each(|z| *z = complex_gaussian(r));
    let norm = k.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    k.map(|z| z / norm)
}

/// Random state supported on the diagonal and the two anti-diagonals of the
/// 2x2 blocks.
pub fn random_x_state(r: &mut impl Rng) -> DensityMatrix {
    let w: [f64; 4] = [r.gen(), r.gen(), r.gen(), r.gen()];
    let total: f64 = w.iter().sum();
    let p = w.map(|x| x / total);
    let mut m = CMatrix::from_real_diag(&p);
    let inner = (p[PM] * p[MP]).sqrt() * r.gen::<f64>();
    let outer = (p[PP] * p[MM]).sqrt() * r.gen::<f64>();
    let z_in = C64::from_polar(inner, r.gen_range(0.0..std::f64::consts::TAU));
    let z_out = C64::from_polar(outer, r.gen_range(0.0..std::f64::consts::TAU));
    m[(PM, MP)] = z_in;
    m[(MP, PM)] = z_in.conj();
    m[(PP, MM)] = z_out;
    m[(MM, PP)] = z_out.conj();
    DensityMatrix::new(m).unwrap()
}

/// Haar-random element of U(2).
pub fn random_unitary2(r: &mut impl Rng) -> CMatrix {
    let a = complex_gaussian(r);
    let b = complex_gaussian(r);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    let phase = C64::from_polar(1.0, r.gen_range(0.0..std::f64::consts::TAU));
    CMatrix::from_rows(&[&[a, -b.conj() * phase], &[b, a.conj() * phase]]).unwrap()
}

pub fn random_local_unitary(r: &mut impl Rng) -> CMatrix {
    random_unitary2(r).tensor(&random_unitary2(r)).unwrap()
}
