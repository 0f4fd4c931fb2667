//! Numerical recovery of a material isomorphism: plant a transplant P* into
//! a neo-Hookean energy, then recover it from sampled energies alone and
//! compare against the plant up to the material symmetry gauge.

use matgroupoids::linalg::{svd_proper, Matrix};
use matgroupoids::solver::{
    sample_symmetry_group, solve_transplant, ConstitutiveModel, SampleSet, SolveOptions,
};

fn main() {
    let base = ConstitutiveModel::NeoHookean {
        dim: 3,
        mu: 1.0,
        lambda: 0.5,
    };
    // W1(F) = W2(F·P*) with a volume-preserving plant
    let planted = Matrix::diag(&[1.2, 1.0 / 1.2, 1.0]);
    let m1 = ConstitutiveModel::Precomposed {
        base: Box::new(base.clone()),
        p: planted,
    };

    let samples = SampleSet::generate(3, 48, 16, 42);
    let opts = SolveOptions::default();
    // solve_transplant(m1, m2) finds P with m2(F) = m1(F·P); here
    // m1(F) = base(F) and m2(F) = base(F·P*), so P recovers P*
    let sol = solve_transplant(&base, &m1, &samples, &opts).expect("well-posed problem");
    println!(
        "converged = {}, held-out RMS residual = {:.3e}, starts tried = {}",
        sol.converged, sol.residual, sol.starts_tried
    );
    println!("recovered transplant:\n{:?}", sol.p);

    // the recovered P is unique only up to right-multiplication by a material
    // symmetry of the target
    let sym = sample_symmetry_group(&base, &samples, 1e-6, 42).expect("sampled symmetries");
    println!(
        "sampled symmetry group of the target: {:?} (continuous = {})",
        sym.group.kind(),
        sym.continuous_detected
    );

    // for a rotational gauge the closest symmetry is the orthogonal
    // Procrustes rotation g = UVᵀ from the SVD of P*ᵀ·P̂
    let (u, _, v) = svd_proper(&planted.transpose().mul(&sol.p)).expect("full-rank product");
    let g = u.mul(&v.transpose());
    let err = sol.p.distance(&planted.mul(&g)) / planted.frobenius_norm();
    println!("relative error to the plant after gauge fixing: {err:.3e}");
}
