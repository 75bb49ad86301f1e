//! Steady-state covariance matrix and bipartite Gaussian measures.
//!
//! Covariances use the convention in which the vacuum is `I/2`. All
//! logarithms are natural, so measures are in nats.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, SMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::Serialize;

use crate::dd::{self, Dd};
use crate::dynamics::{DiffusionMatrix, Matrix6, QuadratureDrift, STABILITY_REL_TOL};
use crate::error::{Error, Result};

/// Pivot ratio of the vectorized Lyapunov system below which it is singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-14;
/// Relative slack before a negative discriminant or determinant is fatal.
const CLAMP_REL: f64 = 1e-12;
/// Upper bound on iterative-refinement sweeps of the Lyapunov solve.
const REFINEMENT_STEPS: usize = 4;
/// Measures at or below this many nats are reported as exactly zero.
pub const MEASURE_FLOOR: f64 = 1e-12;
/// Agreement required between the two `η⁻` evaluations.
pub const ETA_CROSS_CHECK_REL: f64 = 1e-9;

type Matrix36 = SMatrix<f64, 36, 36>;
type Vector36 = SMatrix<f64, 36, 1>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceMatrix {
    #[serde(skip)]
    pub v: Matrix6,
    /// `‖AV + VAᵀ + D‖_max / ‖D‖_max` after symmetrization.
    pub residual: f64,
    /// Smallest eigenvalue of the Hermitian matrix `V + iΩ/2`.
    pub physicality_margin: f64,
}

/// Block-diagonal symplectic form `⊕ [[0, 1], [-1, 0]]` on `modes` modes.
fn symplectic_form<const N: usize>() -> SMatrix<f64, N, N> {
    let mut omega = SMatrix::<f64, N, N>::zeros();
    for k in (0..N).step_by(2) {
        omega[(k, k + 1)] = 1.0;
        omega[(k + 1, k)] = -1.0;
    }
    omega
}

fn max_abs<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Smallest eigenvalue of `V + iΩ/2`; non-negative for a physical state.
pub fn physicality_margin(v: &Matrix6) -> f64 {
    let omega = symplectic_form::<6>();
    let h = SMatrix::<Complex<f64>, 6, 6>::from_fn(|i, j| Complex::new(v[(i, j)], 0.5 * omega[(i, j)]));
    SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `AV + VAᵀ + D`, accumulated in double-double so that the cancellation
/// between large covariances and the drift does not swamp the result.
fn lyapunov_residual(a: &Matrix6, v: &Matrix6, d: &Matrix6) -> Matrix6 {
    Matrix6::from_fn(|i, j| {
        let av = dd::dot((0..6).map(|k| (a[(i, k)], v[(k, j)])));
        let va = dd::dot((0..6).map(|k| (v[(i, k)], a[(j, k)])));
        (av + va + Dd::from(d[(i, j)])).to_f64()
    })
}

/// Solves `AV + VAᵀ = -D` for the steady-state covariance matrix, checking
/// stability with a tolerance of `1e-9 · max|A_ij|`.
pub fn solve_lyapunov(a: &QuadratureDrift, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    let tol = STABILITY_REL_TOL * max_abs(a.matrix());
    solve_lyapunov_with_tolerance(a, d, tol)
}

/// [`solve_lyapunov`] with an explicit absolute stability tolerance (rad/s).
pub fn solve_lyapunov_with_tolerance(
    a: &QuadratureDrift,
    d: &DiffusionMatrix,
    tol_abs: f64,
) -> Result<CovarianceMatrix> {
    let report = crate::dynamics::stability(a, tol_abs)?;
    if !report.stable {
        return Err(Error::UnstableSystem { max_lyapunov: report.max_lyapunov });
    }
    solve_stable(a.matrix(), d.matrix())
}

fn symmetric(x: &Vector36) -> Matrix6 {
    let v = Matrix6::from_column_slice(x.as_slice());
    (v + v.transpose()) * 0.5
}

fn solve_stable(a: &Matrix6, d: &Matrix6) -> Result<CovarianceMatrix> {
    // Column-major vec: vec(AV) = (I⊗A) vec V, vec(VAᵀ) = (A⊗I) vec V.
    let mut k = Matrix36::zeros();
    for j in 0..6 {
        for i in 0..6 {
            let row = i + 6 * j;
            for l in 0..6 {
                k[(row, i + 6 * l)] += a[(j, l)];
            }
            for m in 0..6 {
                k[(row, m + 6 * j)] += a[(i, m)];
            }
        }
    }
    let lu = k.lu();
    let u = lu.u();
    let pivots = u.diagonal().map(f64::abs);
    let (pmin, pmax) = (pivots.min(), pivots.max());
    let pivot_ratio = if pmax > 0.0 { pmin / pmax } else { 0.0 };
    if pivot_ratio < SINGULAR_PIVOT_RATIO {
        return Err(Error::SingularSolve { pivot_ratio });
    }

    let rhs = Vector36::from_iterator(d.iter().map(|x| -x));
    let x = lu.solve(&rhs).ok_or(Error::SingularSolve { pivot_ratio })?;
    let mut v = symmetric(&x);
    let mut r = lyapunov_residual(a, &v, d);
    let mut abs_residual = max_abs(&r);
    // Iterative refinement against the extended-precision residual; stop
    // once a step no longer helps.
    for _ in 0..REFINEMENT_STEPS {
        let Some(dx) = lu.solve(&-Vector36::from_column_slice(r.as_slice())) else { break };
        let candidate = symmetric(&(Vector36::from_column_slice(v.as_slice()) + dx));
        let r_new = lyapunov_residual(a, &candidate, d);
        let norm = max_abs(&r_new);
        if norm >= abs_residual || norm.is_nan() {
            break;
        }
        (v, r, abs_residual) = (candidate, r_new, norm);
    }

    let d_norm = max_abs(d);
    let residual = if d_norm > 0.0 { abs_residual / d_norm } else { abs_residual };
    Ok(CovarianceMatrix { v, residual, physicality_margin: physicality_margin(&v) })
}

/// The three bosonic modes, in quadrature-basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    /// Cavity photon `a`.
    Photon,
    /// Kittel magnon `m`.
    Magnon,
    /// Mechanical phonon `b`.
    Phonon,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Photon, Mode::Magnon, Mode::Phonon];

    /// Row of this mode's first quadrature in the 6x6 covariance matrix.
    pub fn offset(self) -> usize {
        match self {
            Mode::Photon => 0,
            Mode::Magnon => 2,
            Mode::Phonon => 4,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Mode::Photon => 'a',
            Mode::Magnon => 'm',
            Mode::Phonon => 'b',
        }
    }

    pub fn from_symbol(c: char) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.symbol() == c)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "a" | "photon" | "cavity" => Ok(Mode::Photon),
            "m" | "magnon" => Ok(Mode::Magnon),
            "b" | "phonon" | "mechanics" => Ok(Mode::Phonon),
            _ => Err(Error::InvalidParams(format!("unknown mode `{s}` (use a, m or b)"))),
        }
    }
}

/// Ordered pair of distinct modes; `first` owns the `A` block and is the
/// steering party for `s_12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModePair {
    first: Mode,
    second: Mode,
}

impl ModePair {
    /// Photon-magnon.
    pub const AM: ModePair = ModePair { first: Mode::Photon, second: Mode::Magnon };
    /// Phonon-magnon.
    pub const BM: ModePair = ModePair { first: Mode::Phonon, second: Mode::Magnon };
    /// Photon-phonon.
    pub const AB: ModePair = ModePair { first: Mode::Photon, second: Mode::Phonon };

    pub fn new(first: Mode, second: Mode) -> Result<ModePair> {
        if first == second {
            return Err(Error::InvalidParams(format!(
                "mode pair needs two distinct modes, got {first}{first}"
            )));
        }
        Ok(ModePair { first, second })
    }

    pub fn first(self) -> Mode {
        self.first
    }

    pub fn second(self) -> Mode {
        self.second
    }

    pub fn swapped(self) -> ModePair {
        ModePair { first: self.second, second: self.first }
    }

    /// Quadrature indices, first mode's pair first.
    pub fn indices(self) -> [usize; 4] {
        let (p, q) = (self.first.offset(), self.second.offset());
        [p, p + 1, q, q + 1]
    }
}

impl fmt::Display for ModePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

impl FromStr for ModePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModePair> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 2 {
            return Err(Error::InvalidParams(format!("mode pair `{s}` must be two letters from a, m, b")));
        }
        let mode = |c: char| {
            Mode::from_symbol(c)
                .ok_or_else(|| Error::InvalidParams(format!("unknown mode `{c}` in pair `{s}`")))
        };
        ModePair::new(mode(chars[0])?, mode(chars[1])?)
    }
}

impl Serialize for ModePair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Two-mode covariance matrix `[[A, C], [Cᵀ, B]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedCM {
    pub pair: ModePair,
    #[serde(skip)]
    pub a: Matrix2<f64>,
    #[serde(skip)]
    pub b: Matrix2<f64>,
    #[serde(skip)]
    pub c: Matrix2<f64>,
}

impl ReducedCM {
    pub fn from_blocks(pair: ModePair, a: Matrix2<f64>, b: Matrix2<f64>, c: Matrix2<f64>) -> Self {
        ReducedCM { pair, a, b, c }
    }

    pub fn from_matrix(pair: ModePair, m: &Matrix4<f64>) -> Self {
        ReducedCM {
            pair,
            a: m.fixed_view::<2, 2>(0, 0).into_owned(),
            b: m.fixed_view::<2, 2>(2, 2).into_owned(),
            c: m.fixed_view::<2, 2>(0, 2).into_owned(),
        }
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.c);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.c.transpose());
        m
    }

    pub fn det(&self) -> f64 {
        self.det_dd().to_f64()
    }

    /// `det A + det B - 2 det C`, the partially transposed seralian.
    pub fn sigma(&self) -> f64 {
        self.sigma_dd().to_f64()
    }

    /// Laplace expansion along the first two rows.
    fn det_dd(&self) -> Dd {
        let m = self.matrix();
        let minor =
            |r: usize, j: usize, k: usize| dd::dot([(m[(r, j)], m[(r + 1, k)]), (-m[(r, k)], m[(r + 1, j)])]);
        let mut det = Dd::default();
        for j in 0..4 {
            for k in j + 1..4 {
                let mut rest = (0..4).filter(|&c| c != j && c != k);
                let (l, n) = (rest.next().unwrap(), rest.next().unwrap());
                let term = minor(0, j, k) * minor(2, l, n);
                det = if (j + k) % 2 == 1 { det + term } else { det - term };
            }
        }
        det
    }

    fn sigma_dd(&self) -> Dd {
        let det2 = |m: &Matrix2<f64>| dd::dot([(m[(0, 0)], m[(1, 1)]), (-m[(0, 1)], m[(1, 0)])]);
        det2(&self.a) + det2(&self.b) - Dd::from(2.0) * det2(&self.c)
    }
}

/// Extracts the two-mode covariance matrix of `pair` from a 6x6 matrix.
pub fn reduce_cm(v: &CovarianceMatrix, pair: ModePair) -> ReducedCM {
    reduce_matrix(&v.v, pair)
}

pub fn reduce_matrix(v: &Matrix6, pair: ModePair) -> ReducedCM {
    let idx = pair.indices();
    ReducedCM::from_matrix(pair, &Matrix4::from_fn(|i, j| v[(idx[i], idx[j])]))
}

fn checked_det(vs: &ReducedCM) -> Result<f64> {
    let det = vs.det();
    let scale = vs.a.determinant().abs() * vs.b.determinant().abs();
    if !det.is_finite() || det < -CLAMP_REL * scale {
        return Err(Error::NonPhysicalCM(format!("det V_s = {det:e}")));
    }
    Ok(det.max(0.0))
}

fn floored(x: f64) -> f64 {
    if x > MEASURE_FLOOR {
        x
    } else {
        0.0
    }
}

/// Logarithmic negativity and smallest partially-transposed symplectic
/// eigenvalue, `E_N = max(0, -ln 2η⁻)` with
/// `η⁻ = 2^{-1/2} [Σ - (Σ² - 4 det V_s)^{1/2}]^{1/2}`.
pub fn log_negativity(vs: &ReducedCM) -> Result<(f64, f64)> {
    let det = checked_det(vs)?;
    let sigma_dd = vs.sigma_dd();
    let sigma = sigma_dd.to_f64();
    // Near a symmetric state the discriminant is a difference of two nearly
    // equal numbers and its square root amplifies the rounding.
    let disc = (sigma_dd * sigma_dd - Dd::from(4.0) * vs.det_dd()).to_f64();
    if disc < -CLAMP_REL * sigma * sigma {
        return Err(Error::NonPhysicalCM(format!("Σ² - 4 det V_s = {disc:e}")));
    }
    let root = disc.max(0.0).sqrt();
    // (Σ - √disc)/2 rewritten as 2 det/(Σ + √disc) to avoid cancellation.
    let denom = sigma + root;
    if denom <= 0.0 || denom.is_nan() {
        return Err(Error::NonPhysicalCM(format!("Σ = {sigma:e}")));
    }
    let eta_sq = 2.0 * det / denom;
    let eta_minus = eta_sq.sqrt();
    if eta_minus == 0.0 {
        return Err(Error::NonPhysicalCM("vanishing symplectic eigenvalue".into()));
    }
    Ok((floored(-(2.0 * eta_minus).ln()), eta_minus))
}

/// Steering direction relative to the pair's ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// First mode steers the second (uses `det A`).
    Forward,
    /// Second mode steers the first (uses `det B`).
    Backward,
}

/// Gaussian steering `max[0, ½ ln(det X / 4 det V_s)]` with `X = A` forward
/// and `X = B` backward.
pub fn steering(vs: &ReducedCM, direction: Direction) -> Result<f64> {
    let det = checked_det(vs)?;
    let local = match direction {
        Direction::Forward => vs.a.determinant(),
        Direction::Backward => vs.b.determinant(),
    };
    if det == 0.0 {
        return Err(Error::NonPhysicalCM("singular two-mode covariance".into()));
    }
    Ok(floored(0.5 * (local / (4.0 * det)).ln()))
}

/// `η⁻` from the spectrum of the Hermitian matrix `i Ṽ^{1/2} Ω Ṽ^{1/2}`,
/// where `Ṽ` is the partial transpose (sign flip of the second momentum).
pub fn symplectic_eta_minus(vs: &ReducedCM) -> Result<f64> {
    let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    let vt = p * vs.matrix() * p;
    let eig = SymmetricEigen::new(vt);
    if eig.eigenvalues.iter().any(|&l| l <= 0.0 || l.is_nan()) {
        return Err(Error::NonPhysicalCM("two-mode covariance is not positive definite".into()));
    }
    let root = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let omega = symplectic_form::<4>();
    let k = root * omega * root;
    let h = Matrix4::<Complex<f64>>::from_fn(|i, j| Complex::new(0.0, k[(i, j)]));
    let nu = SymmetricEigen::new(h).eigenvalues;
    Ok(nu.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMeasures {
    pub pair: ModePair,
    /// Logarithmic negativity, nats.
    pub e_n: f64,
    /// Steering of the second mode by the first, nats.
    pub s_12: f64,
    /// Steering of the first mode by the second, nats.
    pub s_21: f64,
    pub eta_minus: f64,
    #[serde(skip)]
    pub reduced: ReducedCM,
}

/// All bipartite measures of one pair, with `η⁻` checked against the
/// symplectic spectrum.
pub fn pair_measures(v: &CovarianceMatrix, pair: ModePair) -> Result<PairMeasures> {
    reduced_measures(&reduce_cm(v, pair))
}

pub fn reduced_measures(vs: &ReducedCM) -> Result<PairMeasures> {
    let (e_n, eta_minus) = log_negativity(vs)?;
    let symplectic = symplectic_eta_minus(vs)?;
    if (eta_minus - symplectic).abs() > ETA_CROSS_CHECK_REL * symplectic {
        return Err(Error::CrossCheckMismatch { formula: eta_minus, symplectic });
    }
    Ok(PairMeasures {
        pair: vs.pair,
        e_n,
        s_12: steering(vs, Direction::Forward)?,
        s_21: steering(vs, Direction::Backward)?,
        eta_minus,
        reduced: *vs,
    })
}
