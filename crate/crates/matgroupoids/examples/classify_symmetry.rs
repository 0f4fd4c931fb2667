//! Symmetry classification of an implant H through the eigenvalues of
//! C = HᵀH: the orthogonal normalizer of C decides whether the induced
//! symmetry is orthotropic, transversely isotropic, or isotropic.

use matgroupoids::groups::{classify_normalizer, DEFAULT_EIG_TOL};
use matgroupoids::linalg::{rot3, Matrix};

fn main() {
    let cases: Vec<(&str, Matrix)> = vec![
        ("distinct stretches diag(1, 2, 3)", Matrix::diag(&[1.0, 2.0, 3.0])),
        ("transverse stretch diag(2, 2, 1)", Matrix::diag(&[2.0, 2.0, 1.0])),
        ("pure dilatation 3·I", Matrix::diag(&[3.0, 3.0, 3.0])),
        (
            "rotated transverse stretch",
            rot3(&[1.0, 1.0, 0.0], 0.7).mul(&Matrix::diag(&[2.0, 2.0, 1.0])),
        ),
    ];
    for (label, h) in cases {
        let class = classify_normalizer(&h, DEFAULT_EIG_TOL).expect("classifiable");
        println!("{label:<35} -> {}", class.label());
    }
}
