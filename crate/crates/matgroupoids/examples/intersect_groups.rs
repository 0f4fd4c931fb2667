//! Intersections of matrix symmetry groups: what survives when two
//! constituents with different symmetries share a material point.

use matgroupoids::groups::{intersect, MatrixGroup};
use matgroupoids::linalg::{rot2, Matrix};

fn show(label: &str, g1: &MatrixGroup, g2: &MatrixGroup) {
    match intersect(g1, g2) {
        Ok(inter) => {
            let size = inter
                .elements()
                .map(|e| e.len().to_string())
                .unwrap_or_else(|| "infinite".to_string());
            println!("{label:<45} -> {:?} (order {size})", inter.kind());
        }
        Err(e) => println!("{label:<45} -> undecidable: {e}"),
    }
}

fn main() {
    let so2 = MatrixGroup::special_orthogonal(2);
    let trivial = MatrixGroup::trivial(2);
    show("SO(2) ∩ trivial", &so2, &trivial);

    // a sheared copy of SO(2) meets SO(2) only in ±I
    let a = Matrix::diag(&[1.3, 0.8]);
    let sheared = MatrixGroup::conjugated(so2.clone(), &a).expect("valid conjugation");
    show("SO(2) ∩ A·SO(2)·A⁻¹, A = diag(1.3, 0.8)", &so2, &sheared);

    // conjugating by a rotation changes nothing
    let rotated = MatrixGroup::conjugated(so2.clone(), &rot2(0.4)).expect("valid conjugation");
    show("SO(2) ∩ R·SO(2)·R⁻¹", &so2, &rotated);

    // in 3D, rotations about two different axes share only the identity
    let z = MatrixGroup::axis_rotations([0.0, 0.0, 1.0]).unwrap();
    let x = MatrixGroup::axis_rotations([1.0, 0.0, 0.0]).unwrap();
    show("axis rotations z ∩ axis rotations x", &z, &x);

    show("SO(3) ∩ axis rotations z", &MatrixGroup::special_orthogonal(3), &z);
}
