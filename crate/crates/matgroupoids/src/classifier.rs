//! End-to-end composite analysis: intersect the material groupoids of two
//! constituents, build the commuting material double groupoid, cross-check
//! that uniformity of the intersection coincides with transitivity of the
//! double groupoid's core, classify the pointwise symmetry, and decide
//! whether the composite admits a stress-free homogeneous configuration.

use crate::body::{
    is_discretely_homogeneous, is_uniform, BodyError, HomogeneityVerdict, MaterialGroupoid,
    PointData, UniformityVerdict,
};
use crate::double::{core_material_groupoid, DoubleGroupoid, DoubleError, SideRef, SquarePredicate};
use crate::groupoid::ObjectId;
use crate::groups::{self, GroupError, GroupKind, MatrixGroup, SymmetryClass, DEFAULT_EIG_TOL};
use crate::linalg::Matrix;
use std::collections::BTreeMap;
use thiserror::Error;

/// Tolerance for matching candidate left Cauchy–Green tensors B = (Pg)(Pg)ᵀ
/// across points when deciding stress-free realizability.
pub const STRESS_FREE_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("constituent bodies live on different grids")]
    BodyMismatch,
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error(transparent)]
    Double(#[from] DoubleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StressFree {
    Exists,
    NotExists,
    Unknown,
}

impl StressFree {
    pub fn label(&self) -> &'static str {
        match self {
            StressFree::Exists => "exists",
            StressFree::NotExists => "not-exists",
            StressFree::Unknown => "unknown",
        }
    }
}

/// Outcome of analyzing a binary composite.
#[derive(Clone, Debug)]
pub struct CompositeReport {
    pub uniform: bool,
    /// Transitivity components of the composite groupoid (singleton list
    /// when uniform), each sorted, ordered by smallest member.
    pub components: Vec<Vec<ObjectId>>,
    /// Symmetry class of the composite vertex group at each point, up to
    /// conjugation.
    pub pointwise_class: BTreeMap<ObjectId, SymmetryClass>,
    /// Discrete homogeneity of the composite groupoid; None when the
    /// composite is not uniform (homogeneity presupposes uniformity).
    pub homogeneous: Option<HomogeneityVerdict>,
    pub core_transitive: bool,
    /// (horizontal, vertical) local triviality of the material double
    /// groupoid; None when the descriptor family cannot decide it.
    pub locally_trivial: Option<(bool, bool)>,
    pub stress_free: StressFree,
    pub warnings: Vec<String>,
}

fn same_grid(a: &MaterialGroupoid, b: &MaterialGroupoid) -> bool {
    a.body.dim == b.body.dim
        && a.body.points.len() == b.body.points.len()
        && a.body
            .points
            .iter()
            .zip(&b.body.points)
            .all(|(p, q)| p.id == q.id && p.grid_pos == q.grid_pos)
}

/// Intersection groupoid of two constituents over the same body grid:
/// arrow sets are coset intersections, vertex groups are group
/// intersections. This is exactly the core of the commuting material double
/// groupoid with sides (a, b).
pub fn intersect_material_groupoids(
    a: &MaterialGroupoid,
    b: &MaterialGroupoid,
) -> Result<MaterialGroupoid, ClassifierError> {
    if !same_grid(a, b) {
        return Err(ClassifierError::BodyMismatch);
    }
    Ok(core_material_groupoid(a, b)?)
}

/// Symmetry class of a composite vertex group descriptor, up to conjugation.
fn classify_group(group: &MatrixGroup, warnings: &mut Vec<String>) -> SymmetryClass {
    match group.kind() {
        GroupKind::Trivial => SymmetryClass::Trivial,
        GroupKind::SpecialOrthogonal | GroupKind::Orthogonal => SymmetryClass::Isotropic,
        GroupKind::AxisRotations(axis) => SymmetryClass::TransverselyIsotropic { axis: *axis },
        GroupKind::Finite(els) => classify_finite(group.dim(), els),
        GroupKind::Conjugated(base, h) => {
            // the class is a conjugation invariant; transform directional
            // data only when the conjugator is orthogonal enough to keep it
            // meaningful
            let inner = classify_group(base, warnings);
            match inner {
                SymmetryClass::TransverselyIsotropic { axis } if h.is_orthogonal(1e-9) => {
                    let v = h.matvec(&axis);
                    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    SymmetryClass::TransverselyIsotropic {
                        axis: [v[0] / n, v[1] / n, v[2] / n],
                    }
                }
                other => other,
            }
        }
    }
}

fn classify_finite(dim: usize, els: &[Matrix]) -> SymmetryClass {
    if els.len() == 1 {
        return SymmetryClass::Trivial;
    }
    if dim == 3 {
        // orthotropic: the proper part is {I} ∪ {π-rotations about three
        // mutually orthogonal axes}
        let proper: Vec<&Matrix> = els.iter().filter(|m| m.det() > 0.0).collect();
        if proper.len() == 4 {
            let mut axes: Vec<[f64; 3]> = Vec::new();
            let mut ok = true;
            for m in &proper {
                if m.approx_eq(&Matrix::identity(3), 1e-9) {
                    continue;
                }
                // π-rotation: symmetric with trace −1; its axis spans the
                // +1 eigenspace, read off from any nonzero column of R + I
                if !m.is_symmetric(1e-9) || (m.trace() + 1.0).abs() > 1e-9 {
                    ok = false;
                    break;
                }
                let shifted = m.add(&Matrix::identity(3));
                let mut axis = [0.0; 3];
                for c in 0..3 {
                    let col = shifted.col(c);
                    let norm = (col[0] * col[0] + col[1] * col[1] + col[2] * col[2]).sqrt();
                    if norm > 1e-9 {
                        axis = [col[0] / norm, col[1] / norm, col[2] / norm];
                        break;
                    }
                }
                axes.push(axis);
            }
            if ok && axes.len() == 3 {
                let mut frame = Matrix::identity(3);
                for (c, axis) in axes.iter().enumerate() {
                    frame.set_col(c, axis);
                }
                return SymmetryClass::Orthotropic { frame };
            }
        }
    }
    SymmetryClass::DiscreteOther
}

/// Candidate left Cauchy–Green tensors {(Pg)(Pg)ᵀ : g in the archetype
/// group} at one point; None when the set is not finitely enumerable and
/// not a singleton.
fn stress_free_candidates(group: &MatrixGroup, p: &Matrix, tol: f64) -> Option<Vec<Matrix>> {
    let b0 = p.mul(&p.transpose());
    match group.kind() {
        // orthogonal-flavored archetype groups leave PPᵀ unchanged
        GroupKind::Trivial
        | GroupKind::SpecialOrthogonal
        | GroupKind::Orthogonal
        | GroupKind::AxisRotations(_) => Some(vec![b0]),
        GroupKind::Finite(els) => {
            let mut out: Vec<Matrix> = Vec::new();
            for g in els {
                let pg = p.mul(g);
                let b = pg.mul(&pg.transpose());
                if !out.iter().any(|m| m.approx_eq(&b, tol)) {
                    out.push(b);
                }
            }
            Some(out)
        }
        GroupKind::Conjugated(..) => match group.elements() {
            Some(els) => {
                let mut out: Vec<Matrix> = Vec::new();
                for g in &els {
                    let pg = p.mul(g);
                    let b = pg.mul(&pg.transpose());
                    if !out.iter().any(|m| m.approx_eq(&b, tol)) {
                        out.push(b);
                    }
                }
                Some(out)
            }
            None => None,
        },
    }
}

/// A composite admits a stress-free homogeneous configuration iff one common
/// SPD tensor B is realizable as (P(X)g)(P(X)g)ᵀ at every point of both
/// constituents: the affine change of reference with FᵀF = B⁻¹ then renders
/// every transplant orthogonal simultaneously.
fn stress_free_verdict(
    a: &MaterialGroupoid,
    b: &MaterialGroupoid,
    tol: f64,
    warnings: &mut Vec<String>,
) -> StressFree {
    let mut feasible: Option<Vec<Matrix>> = None;
    for mg in [a, b] {
        for point in &mg.body.points {
            let (group, p) = match &point.data {
                PointData::Symbolic { group, transplant } => (group, transplant),
                PointData::Numeric { .. } => {
                    warnings.push(
                        "stress-free verdict unavailable for numeric constituents".into(),
                    );
                    return StressFree::Unknown;
                }
            };
            let cands = match stress_free_candidates(group, p, tol) {
                Some(c) => c,
                None => {
                    warnings.push(format!(
                        "stress-free verdict undecidable for the archetype group at {:?}",
                        point.id
                    ));
                    return StressFree::Unknown;
                }
            };
            feasible = Some(match feasible {
                None => cands,
                Some(prev) => prev
                    .into_iter()
                    .filter(|m| cands.iter().any(|c| c.approx_eq(m, tol)))
                    .collect(),
            });
            if feasible.as_ref().map_or(false, |f| f.is_empty()) {
                return StressFree::NotExists;
            }
        }
    }
    StressFree::Exists
}

/// Full analysis of the binary composite with constituents (a, b).
pub fn analyze_composite(
    a: &MaterialGroupoid,
    b: &MaterialGroupoid,
) -> Result<CompositeReport, ClassifierError> {
    analyze_composite_with_tol(a, b, DEFAULT_EIG_TOL)
}

pub fn analyze_composite_with_tol(
    a: &MaterialGroupoid,
    b: &MaterialGroupoid,
    eig_tol: f64,
) -> Result<CompositeReport, ClassifierError> {
    analyze_composite_with_tols(a, b, eig_tol, STRESS_FREE_TOL)
}

/// Analysis with explicit eigenvalue-multiplicity and stress-free matching
/// tolerances.
pub fn analyze_composite_with_tols(
    a: &MaterialGroupoid,
    b: &MaterialGroupoid,
    eig_tol: f64,
    stress_tol: f64,
) -> Result<CompositeReport, ClassifierError> {
    if !same_grid(a, b) {
        return Err(ClassifierError::BodyMismatch);
    }
    let mut warnings = Vec::new();
    let core = core_material_groupoid(a, b)?;

    // uniformity of the intersection, via transitivity components
    let (uniform, components) = match is_uniform(&core) {
        UniformityVerdict::Uniform =>

            (true, vec![core.body.points.iter().map(|p| p.id).collect()]),
        UniformityVerdict::NonUniform { components } => (false, components),
    };

    // transitivity of the double groupoid's core, checked independently as
    // presence of a core arrow set for every ordered pair of points
    let ids: Vec<ObjectId> = core.body.points.iter().map(|p| p.id).collect();
    let core_transitive = ids
        .iter()
        .all(|&x| ids.iter().all(|&y| core.arrows(x, y).is_some()));
    if uniform != core_transitive {
        return Err(ClassifierError::Internal(format!(
            "uniformity ({uniform}) disagrees with core transitivity ({core_transitive})"
        )));
    }

    // pointwise symmetry class of the composite vertex groups
    let mut pointwise_class = BTreeMap::new();
    for &x in &ids {
        let ga = a.vertex(x).expect("constituent vertex group");
        let gb = b.vertex(x).expect("constituent vertex group");
        let inter = groups::intersect_with_tol(ga, gb, eig_tol)?;
        pointwise_class.insert(x, classify_group(&inter, &mut warnings));
    }

    // local triviality of the commuting material double groupoid
    let dg = DoubleGroupoid::new(
        SideRef::Material(a),
        SideRef::Material(b),
        SquarePredicate::Commuting,
    )?;
    let locally_trivial = match dg.is_locally_trivial() {
        Ok(lt) => Some(lt),
        Err(DoubleError::UnsupportedDescriptor(msg))
        | Err(DoubleError::Group(GroupError::UnsupportedPair(msg))) => {
            warnings.push(format!("local triviality undecided: {msg}"));
            None
        }
        Err(e) => return Err(e.into()),
    };

    let stress_free = stress_free_verdict(a, b, stress_tol, &mut warnings);

    let homogeneous = if uniform {
        Some(is_discretely_homogeneous(&core)?)
    } else {
        None
    };

    Ok(CompositeReport {
        uniform,
        components,
        homogeneous,
        pointwise_class,
        core_transitive,
        locally_trivial,
        stress_free,
        warnings,
    })
}
