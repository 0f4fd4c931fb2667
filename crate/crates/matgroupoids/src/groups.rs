//! Symbolic descriptors for the closed subgroups of GL(n, R), n in {2, 3},
//! needed by the material-groupoid calculus: membership, conjugation and
//! intersection.
//!
//! Continuous groups are never sampled; they stay symbolic. The descriptor
//! family {Trivial, Finite, SO, O, AxisRotations, Conjugated} is closed under
//! the intersections the composite analysis needs. Pairs outside the closure
//! raise `UnsupportedPair` instead of approximating.

use crate::linalg::{
    self, eig_sym, pi_rotation, rot2, svd, LinalgError, Matrix, PAYLOAD_TOL,
};
use thiserror::Error;

/// Relative eigenvalue-multiplicity tolerance for the normalizer analysis.
pub const DEFAULT_EIG_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("conjugator is singular")]
    SingularConjugator,
    #[error("finite element list is not closed: {0}")]
    NotClosed(String),
    #[error("axis must be a unit vector")]
    InvalidAxis,
    #[error("unsupported descriptor pair: {0}")]
    UnsupportedPair(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug)]
pub enum GroupKind {
    /// Only the identity.
    Trivial,
    /// Explicit element list, closed under product and inverse, containing I.
    Finite(Vec<Matrix>),
    /// SO(n).
    SpecialOrthogonal,
    /// O(n).
    Orthogonal,
    /// All rotations about a fixed unit axis (3D only).
    AxisRotations([f64; 3]),
    /// { a g a⁻¹ : g in base }. Nested conjugations are flattened at
    /// construction; orthogonal (up to scale) conjugators are absorbed.
    Conjugated(Box<MatrixGroup>, Matrix),
}

#[derive(Clone, Debug)]
pub struct MatrixGroup {
    kind: GroupKind,
    dim: usize,
}

impl MatrixGroup {
    pub fn trivial(dim: usize) -> Self {
        MatrixGroup {
            kind: GroupKind::Trivial,
            dim,
        }
    }

    pub fn special_orthogonal(dim: usize) -> Self {
        MatrixGroup {
            kind: GroupKind::SpecialOrthogonal,
            dim,
        }
    }

    pub fn orthogonal(dim: usize) -> Self {
        MatrixGroup {
            kind: GroupKind::Orthogonal,
            dim,
        }
    }

    pub fn axis_rotations(axis: [f64; 3]) -> Result<Self, GroupError> {
        if (linalg::norm(&axis) - 1.0).abs() >= 1e-12 {
            return Err(GroupError::InvalidAxis);
        }
        Ok(MatrixGroup {
            kind: GroupKind::AxisRotations(axis),
            dim: 3,
        })
    }

    /// Finite descriptor; verifies closure under product and inverse and the
    /// presence of the identity, within payload tolerance.
    pub fn finite(dim: usize, elements: Vec<Matrix>) -> Result<Self, GroupError> {
        let mut elems: Vec<Matrix> = Vec::new();
        for e in elements {
            if e.dim() != dim {
                return Err(GroupError::DimensionMismatch(e.dim(), dim));
            }
            if !elems.iter().any(|x| x.approx_eq(&e, PAYLOAD_TOL)) {
                elems.push(e);
            }
        }
        let contains = |m: &Matrix, elems: &[Matrix]| {
            elems.iter().any(|x| x.approx_eq(m, PAYLOAD_TOL))
        };
        if !contains(&Matrix::identity(dim), &elems) {
            return Err(GroupError::NotClosed("missing identity".into()));
        }
        for a in &elems {
            let inv = a.inverse().map_err(GroupError::Linalg)?;
            if !contains(&inv, &elems) {
                return Err(GroupError::NotClosed("missing an inverse".into()));
            }
            for b in &elems {
                if !contains(&a.mul(b), &elems) {
                    return Err(GroupError::NotClosed("missing a product".into()));
                }
            }
        }
        Ok(MatrixGroup {
            kind: GroupKind::Finite(elems),
            dim,
        })
    }

    fn finite_unchecked(dim: usize, elems: Vec<Matrix>) -> Self {
        MatrixGroup {
            kind: GroupKind::Finite(elems),
            dim,
        }
    }

    /// { a g a⁻¹ : g in base }, flattened.
    pub fn conjugated(base: MatrixGroup, a: &Matrix) -> Result<Self, GroupError> {
        if a.dim() != base.dim {
            return Err(GroupError::DimensionMismatch(a.dim(), base.dim));
        }
        let a_inv = a.inverse().map_err(|_| GroupError::SingularConjugator)?;
        let dim = base.dim;
        match base.kind {
            GroupKind::Trivial => Ok(MatrixGroup::trivial(dim)),
            GroupKind::Finite(elems) => Ok(MatrixGroup::finite_unchecked(
                dim,
                elems.iter().map(|g| a.mul(g).mul(&a_inv)).collect(),
            )),
            GroupKind::Conjugated(inner, b) => {
                MatrixGroup::conjugated(*inner, &a.mul(&b))
            }
            GroupKind::SpecialOrthogonal | GroupKind::Orthogonal
                if is_scaled_orthogonal(a) =>
            {
                Ok(base)
            }
            GroupKind::AxisRotations(axis) if is_scaled_orthogonal(a) => {
                let v = a.matvec(&axis);
                MatrixGroup::axis_rotations(normalize3(&v))
            }
            kind => Ok(MatrixGroup {
                kind: GroupKind::Conjugated(
                    Box::new(MatrixGroup { kind, dim }),
                    *a,
                ),
                dim,
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn is_trivial(&self) -> bool {
        match &self.kind {
            GroupKind::Trivial => true,
            GroupKind::Finite(e) => e.len() == 1,
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::Trivial | GroupKind::Finite(_))
    }

    /// Explicit element list, when the descriptor is finite.
    pub fn elements(&self) -> Option<Vec<Matrix>> {
        match &self.kind {
            GroupKind::Trivial => Some(vec![Matrix::identity(self.dim)]),
            GroupKind::Finite(e) => Some(e.clone()),
            _ => None,
        }
    }

    /// Membership within tolerance 1e-9.
    pub fn contains(&self, m: &Matrix) -> Result<bool, GroupError> {
        if m.dim() != self.dim {
            return Err(GroupError::DimensionMismatch(m.dim(), self.dim));
        }
        Ok(match &self.kind {
            GroupKind::Trivial => m.approx_eq(&Matrix::identity(self.dim), PAYLOAD_TOL),
            GroupKind::Finite(elems) => elems.iter().any(|e| e.distance(m) < PAYLOAD_TOL * 10.0f64.max(m.frobenius_norm())),
            GroupKind::SpecialOrthogonal => m.is_orthogonal(PAYLOAD_TOL) && m.det() > 0.0,
            GroupKind::Orthogonal => m.is_orthogonal(PAYLOAD_TOL),
            GroupKind::AxisRotations(axis) => {
                if !(m.is_orthogonal(PAYLOAD_TOL) && m.det() > 0.0) {
                    false
                } else {
                    let ma = m.matvec(axis);
                    linalg::norm(
                        &ma.iter()
                            .zip(axis.iter())
                            .map(|(a, b)| a - b)
                            .collect::<Vec<_>>(),
                    ) < PAYLOAD_TOL * 10.0
                }
            }
            GroupKind::Conjugated(base, a) => {
                let a_inv = a.inverse().map_err(|_| GroupError::SingularConjugator)?;
                base.contains(&a_inv.mul(m).mul(a))?
            }
        })
    }

    /// Conjugation by an invertible matrix.
    pub fn conjugate(&self, a: &Matrix) -> Result<MatrixGroup, GroupError> {
        MatrixGroup::conjugated(self.clone(), a)
    }

    /// Structural equality of descriptors (same subgroup of GL(n)).
    pub fn same_group(&self, other: &MatrixGroup) -> bool {
        if self.dim != other.dim {
            return false;
        }
        match (&self.kind, &other.kind) {
            (GroupKind::Trivial, GroupKind::Trivial) => true,
            (GroupKind::Trivial, GroupKind::Finite(e))
            | (GroupKind::Finite(e), GroupKind::Trivial) => e.len() == 1,
            (GroupKind::Finite(a), GroupKind::Finite(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .all(|x| b.iter().any(|y| x.approx_eq(y, PAYLOAD_TOL * 10.0)))
            }
            (GroupKind::SpecialOrthogonal, GroupKind::SpecialOrthogonal) => true,
            (GroupKind::Orthogonal, GroupKind::Orthogonal) => true,
            (GroupKind::AxisRotations(a), GroupKind::AxisRotations(b)) => {
                linalg::dot(a, b).abs() > 1.0 - 1e-9
            }
            (GroupKind::Conjugated(b1, a1), GroupKind::Conjugated(b2, a2)) => {
                // equal iff bases match and a2⁻¹a1 normalizes the base
                match (&b1.kind, &b2.kind) {
                    (GroupKind::SpecialOrthogonal, GroupKind::SpecialOrthogonal)
                    | (GroupKind::Orthogonal, GroupKind::Orthogonal) => {
                        match a2.inverse() {
                            Ok(inv) => is_scaled_orthogonal(&inv.mul(a1)),
                            Err(_) => false,
                        }
                    }
                    _ => false,
                }
            }
            _ => false,
        }
    }

    /// Conservative subgroup test within the descriptor family. `true` means
    /// proven; `false` means not proven (which for the supported closure is
    /// the same as disproven).
    pub fn is_subgroup_of(&self, other: &MatrixGroup) -> bool {
        if self.dim != other.dim {
            return false;
        }
        match &self.kind {
            GroupKind::Trivial => true,
            GroupKind::Finite(elems) => elems
                .iter()
                .all(|e| other.contains(e).unwrap_or(false)),
            GroupKind::SpecialOrthogonal => match &other.kind {
                GroupKind::SpecialOrthogonal | GroupKind::Orthogonal => true,
                GroupKind::Conjugated(base, a) => {
                    matches!(base.kind, GroupKind::SpecialOrthogonal | GroupKind::Orthogonal)
                        && is_scaled_orthogonal(a)
                }
                _ => false,
            },
            GroupKind::Orthogonal => matches!(other.kind, GroupKind::Orthogonal),
            GroupKind::AxisRotations(axis) => match &other.kind {
                GroupKind::SpecialOrthogonal | GroupKind::Orthogonal => true,
                GroupKind::AxisRotations(b) => linalg::dot(axis, b).abs() > 1.0 - 1e-9,
                _ => false,
            },
            GroupKind::Conjugated(base, a) => match &other.kind {
                GroupKind::Conjugated(base2, a2) => {
                    base.is_subgroup_of(base2)
                        && a2
                            .inverse()
                            .map(|inv| is_scaled_orthogonal(&inv.mul(a)))
                            .unwrap_or(false)
                }
                GroupKind::Orthogonal => false,
                _ => false,
            },
        }
    }
}

fn is_scaled_orthogonal(a: &Matrix) -> bool {
    let ata = a.transpose().mul(a);
    let s = ata.trace() / a.dim() as f64;
    if s <= 0.0 {
        return false;
    }
    ata.approx_eq(&Matrix::identity(a.dim()).scale(s), PAYLOAD_TOL * 10.0)
}

fn normalize3(v: &[f64]) -> [f64; 3] {
    let u = linalg::normalize(v);
    [u[0], u[1], u[2]]
}

// ---- symmetry classes -------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum SymmetryClass {
    Isotropic,
    TransverselyIsotropic { axis: [f64; 3] },
    Orthotropic { frame: Matrix },
    DiscreteOther,
    Trivial,
}

impl SymmetryClass {
    pub fn label(&self) -> &'static str {
        match self {
            SymmetryClass::Isotropic => "isotropic",
            SymmetryClass::TransverselyIsotropic { .. } => "transversely-isotropic",
            SymmetryClass::Orthotropic { .. } => "orthotropic",
            SymmetryClass::DiscreteOther => "discrete",
            SymmetryClass::Trivial => "trivial",
        }
    }
}

/// Eigenvalue multiplicity pattern of a sorted positive spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    AllEqual,
    /// Two eigenvalues coincide; the index of the simple one (0..n).
    TwoEqual { distinct: usize },
    AllDistinct,
}

/// Classify a sorted positive spectrum with relative tolerance `delta`
/// (relative to the largest eigenvalue).
pub fn multiplicity(vals: &[f64], delta: f64) -> Multiplicity {
    let scale = vals.last().copied().unwrap_or(1.0);
    let close = |a: f64, b: f64| (a - b).abs() <= delta * scale;
    match vals.len() {
        2 => {
            if close(vals[0], vals[1]) {
                Multiplicity::AllEqual
            } else {
                Multiplicity::AllDistinct
            }
        }
        3 => {
            let lo = close(vals[0], vals[1]);
            let hi = close(vals[1], vals[2]);
            match (lo, hi) {
                (true, true) => Multiplicity::AllEqual,
                (true, false) => Multiplicity::TwoEqual { distinct: 2 },
                (false, true) => Multiplicity::TwoEqual { distinct: 0 },
                (false, false) => Multiplicity::AllDistinct,
            }
        }
        _ => unreachable!(),
    }
}

/// `true` when the spectrum sits close to a multiplicity boundary: the
/// pattern would change if `delta` were relaxed by one order of magnitude.
pub fn near_degenerate(vals: &[f64], delta: f64) -> bool {
    multiplicity(vals, delta) != multiplicity(vals, delta * 10.0)
}

/// Classify the composite symmetry induced by a conjugator `h` through the
/// eigenvalue multiplicities of C = hᵀh.
pub fn classify_normalizer(h: &Matrix, delta: f64) -> Result<SymmetryClass, GroupError> {
    if h.det().abs() <= 1e-12 {
        return Err(GroupError::Linalg(LinalgError::Singular(1e-12)));
    }
    let c = h.transpose().mul(h);
    let (vals, v) = eig_sym(&c)?;
    Ok(match (h.dim(), multiplicity(&vals, delta)) {
        (_, Multiplicity::AllEqual) => SymmetryClass::Isotropic,
        (2, _) => SymmetryClass::DiscreteOther,
        (3, Multiplicity::TwoEqual { distinct }) => {
            let axis = v.col(distinct);
            SymmetryClass::TransverselyIsotropic {
                axis: [axis[0], axis[1], axis[2]],
            }
        }
        (3, Multiplicity::AllDistinct) => SymmetryClass::Orthotropic { frame: v },
        _ => unreachable!(),
    })
}

// ---- intersection ------------------------------------------------------------

/// Intersection of two descriptors with the default multiplicity tolerance.
pub fn intersect(g1: &MatrixGroup, g2: &MatrixGroup) -> Result<MatrixGroup, GroupError> {
    intersect_with_tol(g1, g2, DEFAULT_EIG_TOL)
}

/// Intersection of two descriptors. `delta` is the relative eigenvalue
/// multiplicity tolerance for the normalizer branches.
pub fn intersect_with_tol(
    g1: &MatrixGroup,
    g2: &MatrixGroup,
    delta: f64,
) -> Result<MatrixGroup, GroupError> {
    if g1.dim() != g2.dim() {
        return Err(GroupError::DimensionMismatch(g1.dim(), g2.dim()));
    }
    let dim = g1.dim();
    if g1.same_group(g2) {
        return Ok(g1.clone());
    }
    if g1.is_subgroup_of(g2) {
        return Ok(g1.clone());
    }
    if g2.is_subgroup_of(g1) {
        return Ok(g2.clone());
    }
    // trivial / finite absorb everything through membership
    if matches!(g1.kind, GroupKind::Trivial) || matches!(g2.kind, GroupKind::Trivial) {
        return Ok(MatrixGroup::trivial(dim));
    }
    if let GroupKind::Finite(elems) = &g1.kind {
        let kept: Result<Vec<Matrix>, GroupError> = elems
            .iter()
            .filter_map(|e| match g2.contains(e) {
                Ok(true) => Some(Ok(*e)),
                Ok(false) => None,
                Err(err) => Some(Err(err)),
            })
            .collect();
        return Ok(MatrixGroup::finite_unchecked(dim, kept?));
    }
    if matches!(g2.kind, GroupKind::Finite(_)) {
        return intersect_with_tol(g2, g1, delta);
    }
    match (&g1.kind, &g2.kind) {
        (GroupKind::SpecialOrthogonal, GroupKind::Orthogonal)
        | (GroupKind::Orthogonal, GroupKind::SpecialOrthogonal) => {
            Ok(MatrixGroup::special_orthogonal(dim))
        }
        (GroupKind::AxisRotations(a), GroupKind::AxisRotations(b)) => {
            if linalg::dot(a, b).abs() > 1.0 - 1e-9 {
                Ok(MatrixGroup {
                    kind: GroupKind::AxisRotations(*a),
                    dim,
                })
            } else {
                Ok(MatrixGroup::trivial(dim))
            }
        }
        (GroupKind::AxisRotations(a), GroupKind::SpecialOrthogonal)
        | (GroupKind::AxisRotations(a), GroupKind::Orthogonal) => Ok(MatrixGroup {
            kind: GroupKind::AxisRotations(*a),
            dim,
        }),
        (GroupKind::SpecialOrthogonal, GroupKind::AxisRotations(_))
        | (GroupKind::Orthogonal, GroupKind::AxisRotations(_)) => {
            intersect_with_tol(g2, g1, delta)
        }
        (GroupKind::SpecialOrthogonal, GroupKind::Conjugated(base, h))
        | (GroupKind::Orthogonal, GroupKind::Conjugated(base, h)) => {
            let proper = matches!(g1.kind, GroupKind::SpecialOrthogonal)
                || matches!(base.kind, GroupKind::SpecialOrthogonal);
            match base.kind {
                GroupKind::SpecialOrthogonal | GroupKind::Orthogonal => {
                    normalizer_intersection(h, dim, proper, delta)
                }
                _ => Err(GroupError::UnsupportedPair(format!(
                    "{:?} vs {:?}",
                    g1.kind, g2.kind
                ))),
            }
        }
        (GroupKind::Conjugated(_, _), GroupKind::SpecialOrthogonal)
        | (GroupKind::Conjugated(_, _), GroupKind::Orthogonal) => {
            intersect_with_tol(g2, g1, delta)
        }
        (GroupKind::Conjugated(b1, a1), GroupKind::Conjugated(b2, a2)) => {
            // pull both back through a1, intersect, push forward again
            let a1_inv = a1.inverse().map_err(|_| GroupError::SingularConjugator)?;
            let pulled = MatrixGroup::conjugated((**b2).clone(), &a1_inv.mul(a2))?;
            let inner = intersect_with_tol(&(**b1).clone(), &pulled, delta)?;
            MatrixGroup::conjugated(inner, a1)
        }
        (k1, k2) => Err(GroupError::UnsupportedPair(format!("{k1:?} vs {k2:?}"))),
    }
}

/// Intersection of the orthogonal archetype with its conjugate by `h`:
/// the orthogonal matrices commuting with C = h hᵀ, branched on the
/// eigenvalue multiplicities of C. `proper` selects SO(n) (vs O(n)).
///
/// Note: membership `Q ∈ O(n) ∩ hO(n)h⁻¹` is equivalent to `QC = CQ` with
/// C = h hᵀ. For symmetric h this is the same matrix as hᵀh; for general h
/// only C = h hᵀ matches conjugation semantics, and the eigenvalue
/// multiplicities (hence the symmetry class) agree between the two.
fn normalizer_intersection(
    h: &Matrix,
    dim: usize,
    proper: bool,
    delta: f64,
) -> Result<MatrixGroup, GroupError> {
    let c = h.mul(&h.transpose());
    let (vals, v) = eig_sym(&c)?;
    let m = multiplicity(&vals, delta);
    match (dim, m, proper) {
        (_, Multiplicity::AllEqual, true) => Ok(MatrixGroup::special_orthogonal(dim)),
        (_, Multiplicity::AllEqual, false) => Ok(MatrixGroup::orthogonal(dim)),
        (2, Multiplicity::AllDistinct, true) => Ok(MatrixGroup::finite_unchecked(
            2,
            vec![Matrix::identity(2), rot2(std::f64::consts::PI)],
        )),
        (2, Multiplicity::AllDistinct, false) => {
            let mut elems = Vec::new();
            for s0 in [1.0, -1.0] {
                for s1 in [1.0, -1.0] {
                    elems.push(v.mul(&Matrix::diag(&[s0, s1])).mul(&v.transpose()));
                }
            }
            Ok(MatrixGroup::finite_unchecked(2, elems))
        }
        (3, Multiplicity::AllDistinct, true) => {
            let mut elems = vec![Matrix::identity(3)];
            for k in 0..3 {
                elems.push(pi_rotation(&v.col(k)));
            }
            Ok(MatrixGroup::finite_unchecked(3, elems))
        }
        (3, Multiplicity::AllDistinct, false) => {
            let mut elems = Vec::new();
            for s0 in [1.0, -1.0] {
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        elems.push(
                            v.mul(&Matrix::diag(&[s0, s1, s2])).mul(&v.transpose()),
                        );
                    }
                }
            }
            Ok(MatrixGroup::finite_unchecked(3, elems))
        }
        (3, Multiplicity::TwoEqual { distinct }, true) => {
            let axis = v.col(distinct);
            MatrixGroup::axis_rotations([axis[0], axis[1], axis[2]])
        }
        (3, Multiplicity::TwoEqual { .. }, false) => Err(GroupError::UnsupportedPair(
            "O(3) normalizer with a repeated eigenvalue (axis rotations with reflections) \
             is outside the descriptor family"
                .into(),
        )),
        _ => unreachable!(),
    }
}

// ---- coset product membership -------------------------------------------------

/// Decide whether `m` lies in the product set G2·G1 and, if so, produce one
/// factorization m = g2·g1. This is the membership test behind coset
/// intersection: P2·G2 and P1·G1 meet iff P2⁻¹P1 is in G2·G1.
pub fn product_factor(
    m: &Matrix,
    g2: &MatrixGroup,
    g1: &MatrixGroup,
) -> Result<Option<(Matrix, Matrix)>, GroupError> {
    if m.dim() != g1.dim() || m.dim() != g2.dim() {
        return Err(GroupError::DimensionMismatch(g1.dim(), g2.dim()));
    }
    let dim = m.dim();
    let identity = Matrix::identity(dim);
    if let Some(elems) = g2.elements() {
        for f in &elems {
            let rest = f.inverse()?.mul(m);
            if g1.contains(&rest)? {
                return Ok(Some((*f, rest)));
            }
        }
        return Ok(None);
    }
    if let Some(elems) = g1.elements() {
        for f in &elems {
            let rest = m.mul(&f.inverse()?);
            if g2.contains(&rest)? {
                return Ok(Some((rest, *f)));
            }
        }
        return Ok(None);
    }
    // both continuous: must be (conjugated) orthogonal descriptors
    let (h2, proper2) = orthogonal_frame(g2)?;
    let (h1, proper1) = orthogonal_frame(g1)?;
    // m = h2 R2 h2⁻¹ · h1 R1 h1⁻¹  ⇔  h2⁻¹ m h1 = R2 (h2⁻¹ h1) R1
    let n = h2.inverse()?.mul(m).mul(&h1);
    let k = h2.inverse()?.mul(&h1);
    let (u_n, s_n, v_n) = svd(&n)?;
    let (u_k, s_k, v_k) = svd(&k)?;
    let scale = s_k.last().copied().unwrap_or(1.0).max(s_n.last().copied().unwrap_or(1.0));
    let sv_match = s_n
        .iter()
        .zip(&s_k)
        .all(|(a, b)| (a - b).abs() <= 1e-8 * scale.max(1.0));
    if !sv_match {
        return Ok(None);
    }
    // R2 = U_N U_Kᵀ, R1 = V_K V_Nᵀ; flipping one shared column of U_N and
    // V_N flips both determinants, which is the only freedom we need.
    let mut u_n = u_n;
    let mut v_n = v_n;
    let det_r2 = (u_n.det() * u_k.det()).signum();
    let det_r1 = (v_k.det() * v_n.det()).signum();
    let need_flip = if proper2 && proper1 {
        if det_r2 < 0.0 && det_r1 < 0.0 {
            true
        } else if det_r2 > 0.0 && det_r1 > 0.0 {
            false
        } else {
            return Ok(None);
        }
    } else if proper2 {
        det_r2 < 0.0
    } else if proper1 {
        det_r1 < 0.0
    } else {
        false
    };
    if need_flip {
        for mat in [&mut u_n, &mut v_n] {
            let c: Vec<f64> = mat.col(0).iter().map(|x| -x).collect();
            mat.set_col(0, &c);
        }
    }
    let r2 = u_n.mul(&u_k.transpose());
    let r1 = v_k.mul(&v_n.transpose());
    debug_assert!(r2.mul(&k).mul(&r1).approx_eq(&n, 1e-7));
    let f2 = h2.mul(&r2).mul(&h2.inverse()?);
    let f1 = h1.mul(&r1).mul(&h1.inverse()?);
    debug_assert!(f2.mul(&f1).approx_eq(m, 1e-6));
    let _ = identity;
    Ok(Some((f2, f1)))
}

/// `true` iff `m` lies in the product set G2·G1.
pub fn product_contains(
    m: &Matrix,
    g2: &MatrixGroup,
    g1: &MatrixGroup,
) -> Result<bool, GroupError> {
    Ok(product_factor(m, g2, g1)?.is_some())
}

/// View a continuous descriptor as h·B·h⁻¹ with B = SO(n) or O(n); returns
/// (h, proper).
fn orthogonal_frame(g: &MatrixGroup) -> Result<(Matrix, bool), GroupError> {
    match &g.kind {
        GroupKind::SpecialOrthogonal => Ok((Matrix::identity(g.dim), true)),
        GroupKind::Orthogonal => Ok((Matrix::identity(g.dim), false)),
        GroupKind::Conjugated(base, h) => match base.kind {
            GroupKind::SpecialOrthogonal => Ok((*h, true)),
            GroupKind::Orthogonal => Ok((*h, false)),
            _ => Err(GroupError::UnsupportedPair(format!(
                "conjugated base {:?} in product membership",
                base.kind
            ))),
        },
        k => Err(GroupError::UnsupportedPair(format!(
            "descriptor {k:?} in product membership"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_rotation, rot3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn so2_contains_rotation() {
        let g = MatrixGroup::special_orthogonal(2);
        assert!(g.contains(&rot2(0.7)).unwrap());
    }

    #[test]
    fn so3_rejects_improper() {
        let g = MatrixGroup::special_orthogonal(3);
        assert!(!g.contains(&Matrix::diag(&[1.0, 1.0, -1.0])).unwrap());
        assert!(MatrixGroup::orthogonal(3)
            .contains(&Matrix::diag(&[1.0, 1.0, -1.0]))
            .unwrap());
    }

    #[test]
    fn conjugated_membership() {
        let a = Matrix::diag(&[2.0, 1.0]);
        let g = MatrixGroup::conjugated(MatrixGroup::special_orthogonal(2), &a).unwrap();
        let m = a
            .mul(&rot2(std::f64::consts::PI / 3.0))
            .mul(&a.inverse().unwrap());
        assert!(g.contains(&m).unwrap());
        assert!(!g.contains(&rot2(0.3)).unwrap());
    }

    #[test]
    fn conjugation_by_orthogonal_is_absorbed() {
        let q = rot3(&[0.0, 0.0, 1.0], 0.4);
        let g = MatrixGroup::special_orthogonal(3).conjugate(&q).unwrap();
        assert!(matches!(g.kind(), GroupKind::SpecialOrthogonal));
        // axis rotations get their axis rotated
        let to_e1 = rot3(&[0.0, 1.0, 0.0], std::f64::consts::FRAC_PI_2);
        let g = MatrixGroup::axis_rotations([0.0, 0.0, 1.0])
            .unwrap()
            .conjugate(&to_e1)
            .unwrap();
        match g.kind() {
            GroupKind::AxisRotations(a) => {
                assert!((a[0].abs() - 1.0).abs() < 1e-9, "axis {a:?}");
            }
            k => panic!("expected axis rotations, got {k:?}"),
        }
    }

    #[test]
    fn finite_conjugation_of_half_turn() {
        let a = Matrix::diag(&[2.0, 1.0]);
        let base = MatrixGroup::finite(
            2,
            vec![Matrix::identity(2), rot2(std::f64::consts::PI)],
        )
        .unwrap();
        let g = base.conjugate(&a).unwrap();
        // R(pi) = -I commutes with everything
        assert!(g.contains(&rot2(std::f64::consts::PI)).unwrap());
    }

    #[test]
    fn normalizer_orthotropic_branch() {
        let h = Matrix::diag(&[1.0, 2.0f64.sqrt(), 3.0f64.sqrt()]);
        let g = intersect(
            &MatrixGroup::special_orthogonal(3),
            &MatrixGroup::conjugated(MatrixGroup::special_orthogonal(3), &h).unwrap(),
        )
        .unwrap();
        let elems = g.elements().expect("finite result");
        assert_eq!(elems.len(), 4);
        for want in [
            Matrix::identity(3),
            Matrix::diag(&[1.0, -1.0, -1.0]),
            Matrix::diag(&[-1.0, 1.0, -1.0]),
            Matrix::diag(&[-1.0, -1.0, 1.0]),
        ] {
            assert!(
                elems.iter().any(|e| e.approx_eq(&want, 1e-8)),
                "missing {want:?}"
            );
        }
    }

    #[test]
    fn normalizer_axis_branch() {
        let h = Matrix::diag(&[2.0, 2.0, 1.0]);
        let g = intersect(
            &MatrixGroup::special_orthogonal(3),
            &MatrixGroup::conjugated(MatrixGroup::special_orthogonal(3), &h).unwrap(),
        )
        .unwrap();
        match g.kind() {
            GroupKind::AxisRotations(a) => assert!(a[2].abs() > 1.0 - 1e-9),
            k => panic!("expected axis rotations, got {k:?}"),
        }
    }

    #[test]
    fn normalizer_isotropic_branch() {
        let h = Matrix::identity(3).scale(3.0);
        let g = intersect(
            &MatrixGroup::special_orthogonal(3),
            &MatrixGroup::conjugated(MatrixGroup::special_orthogonal(3), &h).unwrap(),
        )
        .unwrap();
        assert!(matches!(g.kind(), GroupKind::SpecialOrthogonal));
    }

    #[test]
    fn normalizer_2d_discrete_branch() {
        let h = Matrix::diag(&[1.0, 2.0]);
        let g = intersect(
            &MatrixGroup::special_orthogonal(2),
            &MatrixGroup::conjugated(MatrixGroup::special_orthogonal(2), &h).unwrap(),
        )
        .unwrap();
        let elems = g.elements().unwrap();
        assert_eq!(elems.len(), 2);
        assert!(elems
            .iter()
            .any(|e| e.approx_eq(&rot2(std::f64::consts::PI), 1e-9)));
    }

    #[test]
    fn o3_orthotropic_branch_has_eight_elements() {
        let h = Matrix::diag(&[1.0, 2.0, 3.0]);
        let g = intersect(
            &MatrixGroup::orthogonal(3),
            &MatrixGroup::conjugated(MatrixGroup::orthogonal(3), &h).unwrap(),
        )
        .unwrap();
        assert_eq!(g.elements().unwrap().len(), 8);
    }

    #[test]
    fn intersect_idempotent_per_kind() {
        let a = Matrix::diag(&[2.0, 1.0, 1.0]);
        let groups = vec![
            MatrixGroup::trivial(3),
            MatrixGroup::finite(3, vec![Matrix::identity(3), Matrix::identity(3).scale(-1.0)])
                .unwrap(),
            MatrixGroup::special_orthogonal(3),
            MatrixGroup::orthogonal(3),
            MatrixGroup::axis_rotations([0.0, 0.0, 1.0]).unwrap(),
            MatrixGroup::conjugated(MatrixGroup::special_orthogonal(3), &a).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in &groups {
            let gg = intersect(g, g).unwrap();
            for _ in 0..200 {
                let q = random_rotation(&mut rng, 3);
                assert_eq!(
                    gg.contains(&q).unwrap(),
                    g.contains(&q).unwrap(),
                    "kind {:?}",
                    g.kind()
                );
            }
        }
    }

    #[test]
    fn intersection_membership_agrees_with_pairwise_membership() {
        // contains(a ∩ b, m) == contains(a, m) && contains(b, m)
        let h = Matrix::from_rows(3, &[1.2, 0.1, 0.0, 0.0, 0.9, 0.2, 0.1, 0.0, 1.5]);
        let a = MatrixGroup::special_orthogonal(3);
        let b = MatrixGroup::conjugated(MatrixGroup::special_orthogonal(3), &h).unwrap();
        let ab = intersect(&a, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut probes: Vec<Matrix> = (0..2000).map(|_| random_rotation(&mut rng, 3)).collect();
        // include the claimed members themselves
        probes.extend(ab.elements().unwrap_or_default());
        for m in &probes {
            let lhs = ab.contains(m).unwrap();
            let rhs = a.contains(m).unwrap() && b.contains(m).unwrap();
            assert_eq!(lhs, rhs, "probe {m:?}");
        }
    }

    #[test]
    fn classify_examples_from_text() {
        let iso = classify_normalizer(&Matrix::identity(3).scale(3.0), DEFAULT_EIG_TOL).unwrap();
        assert_eq!(iso, SymmetryClass::Isotropic);
        let ti = classify_normalizer(&Matrix::diag(&[1.0, 1.0, 2.0]), DEFAULT_EIG_TOL).unwrap();
        match ti {
            SymmetryClass::TransverselyIsotropic { axis } => {
                assert!(axis[2].abs() > 1.0 - 1e-9)
            }
            c => panic!("expected transversely isotropic, got {c:?}"),
        }
        let ortho =
            classify_normalizer(&Matrix::diag(&[1.0, 2.0, 3.0]), DEFAULT_EIG_TOL).unwrap();
        assert!(matches!(ortho, SymmetryClass::Orthotropic { .. }));
    }

    #[test]
    fn classification_invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let mut h = Matrix::zeros(3);
            for i in 0..3 {
                for j in 0..3 {
                    h.set(i, j, rng.gen_range(-1.0..1.0f64));
                }
            }
            if h.det().abs() < 0.1 {
                continue;
            }
            let base = classify_normalizer(&h, DEFAULT_EIG_TOL).unwrap();
            // h -> Q h leaves C = hᵀh unchanged
            let q = random_rotation(&mut rng, 3);
            let rotated = classify_normalizer(&q.mul(&h), DEFAULT_EIG_TOL).unwrap();
            assert_eq!(base.label(), rotated.label());
            // scaling preserves the label
            let scaled = classify_normalizer(&h.scale(2.5), DEFAULT_EIG_TOL).unwrap();
            assert_eq!(base.label(), scaled.label());
        }
    }

    #[test]
    fn orthotropic_elements_commute_with_c() {
        let h = Matrix::from_rows(3, &[1.0, 0.3, 0.0, 0.0, 2.0, 0.1, 0.2, 0.0, 3.0]);
        let c = h.mul(&h.transpose());
        let g = intersect(
            &MatrixGroup::special_orthogonal(3),
            &MatrixGroup::conjugated(MatrixGroup::special_orthogonal(3), &h).unwrap(),
        )
        .unwrap();
        for q in g.elements().unwrap() {
            assert!(q.is_orthogonal(1e-8));
            assert!((q.det() - 1.0).abs() < 1e-8);
            let comm = c.mul(&q).sub(&q.mul(&c)).frobenius_norm();
            assert!(comm < 1e-8 * c.frobenius_norm(), "commutator {comm}");
        }
    }

    #[test]
    fn product_factor_finite_and_continuous() {
        let so2 = MatrixGroup::special_orthogonal(2);
        let a = Matrix::diag(&[2.0, 0.5]);
        let conj = MatrixGroup::conjugated(MatrixGroup::special_orthogonal(2), &a).unwrap();
        // pick m = g2 g1 explicitly and recover a factorization
        let g2 = a.mul(&rot2(0.4)).mul(&a.inverse().unwrap());
        let g1 = rot2(1.1);
        let m = g2.mul(&g1);
        let (f2, f1) = product_factor(&m, &conj, &so2).unwrap().expect("member");
        assert!(conj.contains(&f2).unwrap());
        assert!(so2.contains(&f1).unwrap());
        assert!(f2.mul(&f1).approx_eq(&m, 1e-8));
        // a matrix with the wrong singular values is not in the product
        let outside = Matrix::diag(&[3.0, 3.0]);
        assert!(product_factor(&outside, &conj, &so2).unwrap().is_none());
    }

    #[test]
    fn product_factor_randomized_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = Matrix::from_rows(3, &[1.5, 0.2, 0.0, 0.0, 0.8, 0.1, 0.0, 0.3, 1.1]);
        let g2 = MatrixGroup::conjugated(MatrixGroup::special_orthogonal(3), &h).unwrap();
        let g1 = MatrixGroup::special_orthogonal(3);
        for _ in 0..100 {
            let r2 = random_rotation(&mut rng, 3);
            let r1 = random_rotation(&mut rng, 3);
            let m = h.mul(&r2).mul(&h.inverse().unwrap()).mul(&r1);
            let (f2, f1) = product_factor(&m, &g2, &g1).unwrap().expect("member");
            assert!(g2.contains(&f2).unwrap() && g1.contains(&f1).unwrap());
            assert!(f2.mul(&f1).approx_eq(&m, 1e-7));
        }
    }
}
