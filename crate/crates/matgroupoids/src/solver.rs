//! Numeric mode: detect material isomorphisms and sample local symmetry
//! groups directly from stored-energy constitutive laws.
//!
//! A transplant P between two points with energies ψ1, ψ2 satisfies
//! ψ1(F·P) = ψ2(F) for all deformation gradients F. The identity cannot be
//! checked for all F, so it is replaced by damped least squares over a finite
//! sample set with a held-out split guarding against overfitting.
//!
//! Conventions: solutions compose as P13 = P23·P12 (ψ1(F·P23·P12) = ψ3(F)),
//! and a converged P is identified only up to right multiplication by a
//! symmetry element of the source model. Orientation: candidates with
//! det P ≤ 0.05 are rejected.

use crate::groups::MatrixGroup;
use crate::linalg::{self, rot2, rot3, solve_dense, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("deformation gradient has non-positive determinant ({0})")]
    NonPositiveDeterminant(f64),
    #[error("models have different dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid model parameters: {0}")]
    InvalidParameters(String),
    #[error("Mooney-Rivlin is implemented for dimension 3 only")]
    UnsupportedDimension,
}

/// Hyperelastic stored-energy densities ψ(F).
///
/// Mooney-Rivlin uses the compressible invariant form
/// ψ = c1·(Ī1 − 3) + c2·(Ī2 − 3) + (λ/2)·(J − 1)² with J = det F,
/// C = FᵀF, Ī1 = J^(−2/3)·tr C, Ī2 = J^(−4/3)·((tr C)² − tr C²)/2.
#[derive(Clone, Debug)]
pub enum ConstitutiveModel {
    NeoHookean { dim: usize, mu: f64, lambda: f64 },
    StVenantKirchhoff { dim: usize, mu: f64, lambda: f64 },
    MooneyRivlin { c1: f64, c2: f64, lambda: f64 },
    /// F ↦ energy(base, F·p): the base response seen through a fixed
    /// transplant. Used to plant known isomorphisms.
    Precomposed { base: Box<ConstitutiveModel>, p: Matrix },
}

impl ConstitutiveModel {
    pub fn dim(&self) -> usize {
        match self {
            ConstitutiveModel::NeoHookean { dim, .. }
            | ConstitutiveModel::StVenantKirchhoff { dim, .. } => *dim,
            ConstitutiveModel::MooneyRivlin { .. } => 3,
            ConstitutiveModel::Precomposed { base, .. } => base.dim(),
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidParameters(msg.into()));
        match self {
            ConstitutiveModel::NeoHookean { mu, lambda, dim }
            | ConstitutiveModel::StVenantKirchhoff { mu, lambda, dim } => {
                if !(*dim == 2 || *dim == 3) {
                    return Err(SolverError::UnsupportedDimension);
                }
                if *mu <= 0.0 || *lambda < 0.0 {
                    return bad("require mu > 0 and lambda >= 0");
                }
                Ok(())
            }
            ConstitutiveModel::MooneyRivlin { c1, c2, lambda } => {
                if *c1 <= 0.0 || *c2 <= 0.0 || *lambda < 0.0 {
                    return bad("require c1, c2 > 0 and lambda >= 0");
                }
                Ok(())
            }
            ConstitutiveModel::Precomposed { base, p } => {
                if p.dim() != base.dim() {
                    return Err(SolverError::DimensionMismatch(p.dim(), base.dim()));
                }
                if p.det() <= 0.0 {
                    return bad("precomposed transplant must have positive determinant");
                }
                base.validate()
            }
        }
    }

    /// Stored energy density at deformation gradient `f`.
    pub fn energy(&self, f: &Matrix) -> Result<f64, SolverError> {
        let j = f.det();
        if j <= 0.0 {
            return Err(SolverError::NonPositiveDeterminant(j));
        }
        Ok(match self {
            ConstitutiveModel::NeoHookean { dim, mu, lambda } => {
                let c = f.transpose().mul(f);
                let lnj = j.ln();
                0.5 * mu * (c.trace() - *dim as f64) - mu * lnj + 0.5 * lambda * lnj * lnj
            }
            ConstitutiveModel::StVenantKirchhoff { dim, mu, lambda } => {
                let e = f
                    .transpose()
                    .mul(f)
                    .sub(&Matrix::identity(*dim))
                    .scale(0.5);
                0.5 * lambda * e.trace() * e.trace() + mu * e.mul(&e).trace()
            }
            ConstitutiveModel::MooneyRivlin { c1, c2, lambda } => {
                let c = f.transpose().mul(f);
                let i1 = c.trace();
                let i2 = 0.5 * (i1 * i1 - c.mul(&c).trace());
                let i1b = j.powf(-2.0 / 3.0) * i1;
                let i2b = j.powf(-4.0 / 3.0) * i2;
                c1 * (i1b - 3.0) + c2 * (i2b - 3.0) + 0.5 * lambda * (j - 1.0) * (j - 1.0)
            }
            ConstitutiveModel::Precomposed { base, p } => base.energy(&f.mul(p))?,
        })
    }

    /// Gradient ∂ψ/∂F: analytic for Neo-Hookean and St. Venant-Kirchhoff,
    /// central finite differences (step 1e-6·scale) for Mooney-Rivlin.
    pub fn energy_grad(&self, f: &Matrix) -> Result<Matrix, SolverError> {
        let j = f.det();
        if j <= 0.0 {
            return Err(SolverError::NonPositiveDeterminant(j));
        }
        match self {
            ConstitutiveModel::NeoHookean { mu, lambda, .. } => {
                let f_inv_t = f.inverse().map_err(|_| {
                    SolverError::NonPositiveDeterminant(j)
                })?
                .transpose();
                Ok(f.scale(*mu)
                    .sub(&f_inv_t.scale(*mu))
                    .add(&f_inv_t.scale(lambda * j.ln())))
            }
            ConstitutiveModel::StVenantKirchhoff { dim, mu, lambda } => {
                let e = f
                    .transpose()
                    .mul(f)
                    .sub(&Matrix::identity(*dim))
                    .scale(0.5);
                let s = Matrix::identity(*dim)
                    .scale(lambda * e.trace())
                    .add(&e.scale(2.0 * mu));
                Ok(f.mul(&s))
            }
            ConstitutiveModel::MooneyRivlin { .. } => self.fd_grad(f),
            ConstitutiveModel::Precomposed { base, p } => {
                Ok(base.energy_grad(&f.mul(p))?.mul(&p.transpose()))
            }
        }
    }

    fn fd_grad(&self, f: &Matrix) -> Result<Matrix, SolverError> {
        let n = f.dim();
        let h = 1e-6 * f.frobenius_norm().max(1.0);
        let mut g = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut fp = *f;
                let mut fm = *f;
                fp.set(i, j, f.at(i, j) + h);
                fm.set(i, j, f.at(i, j) - h);
                g.set(i, j, (self.energy(&fp)? - self.energy(&fm)?) / (2.0 * h));
            }
        }
        Ok(g)
    }
}

/// Deformation-gradient samples with a held-out split.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub train: Vec<Matrix>,
    pub holdout: Vec<Matrix>,
}

impl SampleSet {
    /// Deterministic sample set: 4 volumetric modes, uniaxial and shear
    /// modes, then random perturbations I + 0.3·N clipped to det > 0.2 and
    /// condition number ≤ 10. The held-out gradients are all random.
    pub fn generate(dim: usize, train: usize, holdout: usize, seed: u64) -> SampleSet {
        assert!(dim == 2 || dim == 3);
        let min_train = if dim == 3 { 12 } else { 6 };
        let train = train.max(min_train);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fs: Vec<Matrix> = Vec::new();
        for s in [0.8, 0.9, 1.1, 1.25] {
            fs.push(Matrix::identity(dim).scale(s));
        }
        for i in 0..dim {
            let mut f = Matrix::identity(dim);
            f.set(i, i, 1.2);
            fs.push(f);
        }
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    let mut f = Matrix::identity(dim);
                    f.set(i, j, 0.3);
                    fs.push(f);
                }
            }
        }
        fs.truncate(train);
        while fs.len() < train + holdout {
            fs.push(random_gradient(dim, &mut rng));
        }
        let holdout_set = fs.split_off(train);
        SampleSet {
            train: fs,
            holdout: holdout_set,
        }
    }
}

fn random_gradient<R: Rng>(dim: usize, rng: &mut R) -> Matrix {
    loop {
        let mut f = Matrix::identity(dim);
        for i in 0..dim {
            for j in 0..dim {
                f.set(i, j, f.at(i, j) + 0.3 * rng.gen_range(-1.0..1.0));
            }
        }
        if f.det() <= 0.2 {
            continue;
        }
        if let Ok(sv) = linalg::singular_values(&f) {
            if sv[dim - 1] / sv[0] <= 10.0 {
                return f;
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Held-out RMS residual threshold for convergence.
    pub tol: f64,
    /// Seed for the multi-start perturbations.
    pub seed: u64,
    pub max_iterations: usize,
    /// Total starts: the identity plus `starts - 1` random perturbations.
    pub starts: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            seed: 0,
            max_iterations: 200,
            starts: 9,
        }
    }
}

/// Transplant P with ψ1(F·P) = ψ2(F); `residual` is the RMS energy mismatch
/// over the held-out samples.
#[derive(Clone, Debug)]
pub struct TransplantSolution {
    pub p: Matrix,
    pub residual: f64,
    pub converged: bool,
    pub starts_tried: usize,
}

/// Least-squares search for a transplant from m1 to m2. Always returns the
/// best candidate found; `converged` is false when no start reaches the
/// held-out tolerance (e.g. genuinely different materials).
pub fn solve_transplant(
    m1: &ConstitutiveModel,
    m2: &ConstitutiveModel,
    samples: &SampleSet,
    opts: &SolveOptions,
) -> Result<TransplantSolution, SolverError> {
    if m1.dim() != m2.dim() {
        return Err(SolverError::DimensionMismatch(m1.dim(), m2.dim()));
    }
    m1.validate()?;
    m2.validate()?;
    let dim = m1.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![Matrix::identity(dim)];
    for _ in 1..opts.starts.max(1) {
        let mut p0 = Matrix::identity(dim);
        for i in 0..dim {
            for j in 0..dim {
                p0.set(i, j, p0.at(i, j) + 0.2 * rng.gen_range(-1.0..1.0));
            }
        }
        starts.push(p0);
    }
    // targets are fixed across iterations
    let targets: Result<Vec<f64>, SolverError> =
        samples.train.iter().map(|f| m2.energy(f)).collect();
    let targets = targets?;

    let candidates: Vec<Option<Matrix>> = starts
        .par_iter()
        .map(|p0| levenberg_marquardt(m1, &samples.train, &targets, p0, opts))
        .collect();

    // first converged start wins (start order is deterministic, identity
    // first), so the returned gauge point does not depend on residual noise
    // among equally converged candidates
    let mut best: Option<TransplantSolution> = None;
    for p in candidates.into_iter().flatten() {
        if p.det() <= 0.05 {
            continue;
        }
        let res = holdout_residual(m1, m2, &samples.holdout, &p);
        let res = match res {
            Some(r) => r,
            None => continue,
        };
        if res < opts.tol {
            return Ok(TransplantSolution {
                p,
                residual: res,
                converged: true,
                starts_tried: starts.len(),
            });
        }
        if best.as_ref().map_or(true, |b| res < b.residual) {
            best = Some(TransplantSolution {
                p,
                residual: res,
                converged: false,
                starts_tried: starts.len(),
            });
        }
    }
    Ok(best.unwrap_or(TransplantSolution {
        p: Matrix::identity(dim),
        residual: f64::INFINITY,
        converged: false,
        starts_tried: starts.len(),
    }))
}

fn holdout_residual(
    m1: &ConstitutiveModel,
    m2: &ConstitutiveModel,
    holdout: &[Matrix],
    p: &Matrix,
) -> Option<f64> {
    let mut acc = 0.0;
    for f in holdout {
        let a = m1.energy(&f.mul(p)).ok()?;
        let b = m2.energy(f).ok()?;
        acc += (a - b) * (a - b);
    }
    Some((acc / holdout.len() as f64).sqrt())
}

/// Damped least squares on the n² entries of P. Residuals are
/// r_k = ψ1(F_k·P) − t_k with Jacobian row ∂r_k/∂P = F_kᵀ·∇ψ1(F_k·P).
fn levenberg_marquardt(
    m1: &ConstitutiveModel,
    train: &[Matrix],
    targets: &[f64],
    p0: &Matrix,
    opts: &SolveOptions,
) -> Option<Matrix> {
    let dim = p0.dim();
    let np = dim * dim;
    let mut p = *p0;

    let residuals = |p: &Matrix| -> Option<Vec<f64>> {
        train
            .iter()
            .zip(targets)
            .map(|(f, t)| m1.energy(&f.mul(p)).ok().map(|e| e - t))
            .collect()
    };
    let mut r = residuals(&p)?;
    let mut cost: f64 = r.iter().map(|x| x * x).sum();
    let mut lambda = 1e-3;

    for _ in 0..opts.max_iterations {
        // assemble J (K x np) row-wise
        let mut jac: Vec<Vec<f64>> = Vec::with_capacity(train.len());
        for f in train {
            let g = m1.energy_grad(&f.mul(&p)).ok()?;
            jac.push(f.transpose().mul(&g).row_major());
        }
        // normal equations
        let mut jtj = vec![0.0; np * np];
        let mut jtr = vec![0.0; np];
        for (row, rk) in jac.iter().zip(&r) {
            for a in 0..np {
                jtr[a] += row[a] * rk;
                for b in 0..np {
                    jtj[a * np + b] += row[a] * row[b];
                }
            }
        }
        // Marquardt diagonal scaling keeps the iterate path invariant under
        // uniform scaling of both energies (objective scales by s²)
        let diag_floor =
            1e-12 * (0..np).map(|d| jtj[d * np + d]).sum::<f64>() / np as f64;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for d in 0..np {
                a[d * np + d] += lambda * jtj[d * np + d].max(diag_floor);
            }
            let mut b: Vec<f64> = jtr.iter().map(|x| -x).collect();
            let step = match solve_dense(np, &mut a, &mut b) {
                Ok(s) => s,
                Err(_) => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let mut trial = p;
            for i in 0..dim {
                for j in 0..dim {
                    trial.set(i, j, p.at(i, j) + step[i * dim + j]);
                }
            }
            let trial_cost = residuals(&trial)
                .map(|rr| rr.iter().map(|x| x * x).sum::<f64>())
                .unwrap_or(f64::INFINITY);
            if trial_cost.is_finite() && trial_cost < cost {
                let step_norm: f64 = step.iter().map(|x| x * x).sum::<f64>().sqrt();
                p = trial;
                cost = trial_cost;
                lambda = (lambda * 0.3).max(1e-14);
                improved = true;
                if step_norm < 1e-14 {
                    return Some(p);
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                return Some(p);
            }
        }
        if !improved {
            break;
        }
        // restore residuals of the accepted point for the next Jacobian
        r = residuals(&p)?;
    }
    Some(p)
}

/// Result of sampling the symmetry group of a model at a point.
#[derive(Clone, Debug)]
pub struct SymmetrySample {
    pub group: MatrixGroup,
    /// A 1-parameter path of near-zero residuals was found (probed along
    /// geodesic directions), indicating a continuous symmetry group.
    pub continuous_detected: bool,
}

/// Search orthogonal Q with ψ(F·Q) = ψ(F) over the samples. Finite
/// candidates are the signed coordinate diagonal matrices with det +1;
/// continuous symmetry is probed along 64 geodesic directions and, when
/// found, confirmed with 10³ random rotations before reporting SO(n).
pub fn sample_symmetry_group(
    m: &ConstitutiveModel,
    samples: &SampleSet,
    tol: f64,
    seed: u64,
) -> Result<SymmetrySample, SolverError> {
    m.validate()?;
    let dim = m.dim();
    let objective = |q: &Matrix| -> Option<f64> {
        let mut acc = 0.0;
        for f in samples.train.iter().chain(&samples.holdout) {
            let a = m.energy(&f.mul(q)).ok()?;
            let b = m.energy(f).ok()?;
            acc += (a - b) * (a - b);
        }
        Some(acc.sqrt())
    };

    // finite candidates: proper signed diagonal matrices
    let mut candidates = vec![Matrix::identity(dim)];
    if dim == 2 {
        candidates.push(rot2(std::f64::consts::PI));
    } else {
        for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            candidates.push(linalg::pi_rotation(&axis));
        }
    }
    let found: Vec<Matrix> = candidates
        .into_iter()
        .filter(|q| objective(q).map_or(false, |r| r < tol))
        .collect();

    // probe geodesic directions exp(theta W) for small theta
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = 0.05;
    let mut continuous = false;
    for k in 0..64 {
        let q = if dim == 2 {
            rot2(theta * if k % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0f64),
            ];
            if linalg::norm(&v) < 1e-6 {
                continue;
            }
            rot3(&linalg::normalize(&v), theta)
        };
        if objective(&q).map_or(false, |r| r < tol) {
            continuous = true;
            break;
        }
    }
    if continuous {
        let confirmed = (0..1000).all(|_| {
            let q = linalg::random_rotation(&mut rng, dim);
            objective(&q).map_or(false, |r| r < tol)
        });
        if confirmed {
            return Ok(SymmetrySample {
                group: MatrixGroup::special_orthogonal(dim),
                continuous_detected: true,
            });
        }
    }
    let group = if found.len() <= 1 {
        MatrixGroup::trivial(dim)
    } else {
        MatrixGroup::finite(dim, found)
            .map_err(|e| SolverError::InvalidParameters(e.to_string()))?
    };
    Ok(SymmetrySample {
        group,
        continuous_detected: continuous,
    })
}
