#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex;
use ptcmm::measures::{ModePair, ReducedCM};
use ptcmm::model::SystemParams;
use rand::Rng;

pub const OMEGA_B: f64 = 1.0;

/// Random valid parameters with rates in units of `omega_b = 1`.
pub fn random_params<R: Rng>(rng: &mut R) -> SystemParams {
    SystemParams::builder()
        .omega_a(1e3)
        .omega_m(1e3)
        .omega_b(OMEGA_B)
        .delta_a(rng.random_range(-2.0..2.0))
        .delta_m_eff(rng.random_range(-2.0..2.0))
        .kappa_a(rng.random_range(-0.3..0.3))
        .kappa_m(rng.random_range(0.01..0.3))
        .gamma_b(rng.random_range(1e-6..1e-2))
        .g_ma(rng.random_range(0.0..1.5))
        .g_eff(rng.random_range(0.0..1.0))
        .temperature(rng.random_range(0.0..1e-3))
        .build()
        .expect("ranges are valid")
}

/// Smallest achievable worst-case distance when pairing the two spectra,
/// by trying every permutation.
pub fn bottleneck_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut idx: Vec<usize> = (0..b.len()).collect();
    let mut best = f64::INFINITY;
    permute(&mut idx, 0, &mut |perm| {
        let worst = a.iter().zip(perm).map(|(x, &j)| (x - b[j]).norm()).fold(0.0, f64::max);
        best = best.min(worst);
    });
    best
}

fn permute(idx: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == idx.len() {
        visit(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, visit);
        idx.swap(k, i);
    }
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn block(a: Matrix2<f64>, b: Matrix2<f64>, c: Matrix2<f64>, d: Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&d);
    m
}

/// Random two-mode symplectic matrix built from local rotations and
/// squeezers, a beam splitter and a two-mode squeezer.
pub fn random_symplectic<R: Rng>(rng: &mut R) -> Matrix4<f64> {
    let z = Matrix2::zeros();
    let local = |rng: &mut R| {
        let r1: f64 = rng.random_range(-1.0..1.0);
        let r2: f64 = rng.random_range(-1.0..1.0);
        let s1 = Matrix2::new(r1.exp(), 0.0, 0.0, (-r1).exp());
        let s2 = Matrix2::new(r2.exp(), 0.0, 0.0, (-r2).exp());
        let a = rotation(rng.random_range(0.0..6.3)) * s1 * rotation(rng.random_range(0.0..6.3));
        let b = rotation(rng.random_range(0.0..6.3)) * s2 * rotation(rng.random_range(0.0..6.3));
        block(a, z, z, b)
    };
    let theta: f64 = rng.random_range(0.0..6.3);
    let (s, c) = theta.sin_cos();
    let id = Matrix2::identity();
    let splitter = block(id * c, id * s, -id * s, id * c);
    let r: f64 = rng.random_range(-1.0..1.0);
    let zz = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    let tms = block(id * r.cosh(), zz * r.sinh(), zz * r.sinh(), id * r.cosh());
    local(rng) * splitter * tms * local(rng)
}

/// `S (I/2 + P) Sᵀ` with `P` positive semidefinite: always a physical state.
pub fn random_physical_cm<R: Rng>(rng: &mut R) -> ReducedCM {
    let l = Matrix4::from_fn(|_, _| rng.random_range(-0.5..0.5));
    let noise = l * l.transpose() * rng.random_range(0.0..1.0);
    let s = random_symplectic(rng);
    let v = s * (Matrix4::identity() * 0.5 + noise) * s.transpose();
    let v = (v + v.transpose()) * 0.5;
    ReducedCM::from_matrix(ModePair::AM, &v)
}

/// Two-mode squeezed vacuum with squeezing `r`, vacuum variance 1/2.
pub fn tmsv(r: f64) -> ReducedCM {
    let ch = (2.0 * r).cosh() / 2.0;
    let sh = (2.0 * r).sinh() / 2.0;
    ReducedCM::from_blocks(
        ModePair::AM,
        Matrix2::identity() * ch,
        Matrix2::identity() * ch,
        Matrix2::new(sh, 0.0, 0.0, -sh),
    )
}

/// Smallest symplectic eigenvalue of the partial transpose, from the
/// general eigenvalues of `Ω Ṽ` (they come as `±iν`).
pub fn eta_minus_oracle(vs: &ReducedCM) -> f64 {
    let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    let vt = p * vs.matrix() * p;
    let mut omega = Matrix4::zeros();
    omega[(0, 1)] = 1.0;
    omega[(1, 0)] = -1.0;
    omega[(2, 3)] = 1.0;
    omega[(3, 2)] = -1.0;
    let eig = (omega * vt).complex_eigenvalues();
    eig.iter().map(|z| z.im.abs()).fold(f64::INFINITY, f64::min)
}
