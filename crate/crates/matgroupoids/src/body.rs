//! The discretized body model and its material groupoid.
//!
//! A symbolic point is an archetype symmetry group seen through a transplant
//! P(X): its response is ψ_arch(F·P(X)). Material isomorphisms between two
//! such points form the coset P(Y)P(X)⁻¹·G_X over the source vertex group
//! G_X = P(X)·G_arch·P(X)⁻¹, which is what `CosetArrowSet` stores — one
//! representative plus the source group, never an enumeration.

use crate::groupoid::ObjectId;
use crate::groups::{self, GroupError, MatrixGroup};
use crate::linalg::Matrix;
use crate::solver::ConstitutiveModel;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BodyError {
    #[error("body mixes symbolic and numeric points")]
    MixedModes,
    #[error("numeric bodies go through the isomorphism solver first")]
    NumericMode,
    #[error("unknown point {0:?}")]
    PointNotFound(ObjectId),
    #[error("duplicate grid position {0:?}")]
    DuplicatePosition((i64, i64)),
    #[error("operation requires a uniform body")]
    NotUniform,
    #[error("arrow sets violate composability closure between {0:?} and {1:?}")]
    ClosureViolation(ObjectId, ObjectId),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Per-point constitutive data.
#[derive(Clone, Debug)]
pub enum PointData {
    Symbolic {
        group: MatrixGroup,
        /// Transplant P(X) from the archetype to the point.
        transplant: Matrix,
    },
    Numeric { model: ConstitutiveModel },
}

#[derive(Clone, Debug)]
pub struct MaterialPoint {
    pub id: ObjectId,
    pub grid_pos: (i64, i64),
    pub data: PointData,
}

/// A finite grid of material points; adjacency is implied by unit steps in
/// grid position.
#[derive(Clone, Debug)]
pub struct BodyGrid {
    pub dim: usize,
    pub points: Vec<MaterialPoint>,
}

impl BodyGrid {
    /// Build an nx x ny plate; point ids follow row-major order.
    pub fn plate(
        dim: usize,
        nx: i64,
        ny: i64,
        mut f: impl FnMut(i64, i64) -> PointData,
    ) -> Result<BodyGrid, BodyError> {
        let mut points = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                points.push(MaterialPoint {
                    id: ObjectId(points.len()),
                    grid_pos: (i, j),
                    data: f(i, j),
                });
            }
        }
        let body = BodyGrid { dim, points };
        body.validate()?;
        Ok(body)
    }

    pub fn validate(&self) -> Result<(), BodyError> {
        let mut seen = BTreeMap::new();
        for p in &self.points {
            if seen.insert(p.grid_pos, p.id).is_some() {
                return Err(BodyError::DuplicatePosition(p.grid_pos));
            }
        }
        Ok(())
    }

    pub fn point(&self, id: ObjectId) -> Result<&MaterialPoint, BodyError> {
        self.points.get(id.0).ok_or(BodyError::PointNotFound(id))
    }

    /// Unit-square plaquettes (SW, SE, NE, NW), counter-clockwise.
    pub fn plaquettes(&self) -> Vec<[ObjectId; 4]> {
        let by_pos: BTreeMap<(i64, i64), ObjectId> =
            self.points.iter().map(|p| (p.grid_pos, p.id)).collect();
        let mut out = Vec::new();
        for p in &self.points {
            let (i, j) = p.grid_pos;
            let corners = [
                Some(p.id),
                by_pos.get(&(i + 1, j)).copied(),
                by_pos.get(&(i + 1, j + 1)).copied(),
                by_pos.get(&(i, j + 1)).copied(),
            ];
            if let [Some(a), Some(b), Some(c), Some(d)] = corners {
                out.push([a, b, c, d]);
            }
        }
        out
    }

    fn position(&self, id: ObjectId) -> Result<Vec<f64>, BodyError> {
        let (i, j) = self.point(id)?.grid_pos;
        let mut v = vec![i as f64, j as f64];
        if self.dim == 3 {
            v.push(0.0);
        }
        Ok(v)
    }
}

/// The coset {P₁₂·g : g in G₁} of material isomorphisms from `source` to
/// `target`. An empty arrow set is represented by absence in the groupoid
/// map, never by a degenerate value.
#[derive(Clone, Debug)]
pub struct CosetArrowSet {
    pub source: ObjectId,
    pub target: ObjectId,
    pub representative: Matrix,
    pub source_group: MatrixGroup,
}

impl CosetArrowSet {
    pub fn contains(&self, m: &Matrix) -> Result<bool, GroupError> {
        let shifted = self.representative.inverse()?.mul(m);
        self.source_group.contains(&shifted)
    }

    /// Set equality of two cosets over the same source group.
    pub fn same_coset(&self, other: &CosetArrowSet) -> Result<bool, GroupError> {
        if !self.source_group.same_group(&other.source_group) {
            return Ok(false);
        }
        other.contains(&self.representative)
    }

    /// Composition (Y→Z) ∘ (X→Y): representatives multiply, the source group
    /// stays that of X, because G_Y = W₁·G_X·W₁⁻¹ absorbs into the coset.
    pub fn compose(&self, first: &CosetArrowSet) -> Result<CosetArrowSet, GroupError> {
        Ok(CosetArrowSet {
            source: first.source,
            target: self.target,
            representative: self.representative.mul(&first.representative),
            source_group: first.source_group.clone(),
        })
    }

    /// The inverse coset (Y→X): representative P₁₂⁻¹ over the target vertex
    /// group G_Y = P₁₂·G_X·P₁₂⁻¹.
    pub fn inverse(&self) -> Result<CosetArrowSet, GroupError> {
        Ok(CosetArrowSet {
            source: self.target,
            target: self.source,
            representative: self.representative.inverse()?,
            source_group: self.source_group.conjugate(&self.representative)?,
        })
    }

    /// The set {W·g·m : g in G} = (W·m)·(m⁻¹·G·m) as a coset.
    pub fn right_translated(&self, m: &Matrix) -> Result<CosetArrowSet, GroupError> {
        Ok(CosetArrowSet {
            source: self.source,
            target: self.target,
            representative: self.representative.mul(m),
            source_group: self.source_group.conjugate(&m.inverse()?)?,
        })
    }

    /// Intersection with another coset between the same endpoints:
    /// P₁G₁ ∩ P₂G₂ is nonempty iff P₂⁻¹P₁ lies in G₂·G₁, in which case it
    /// equals W·(G₁ ∩ G₂) for any common element W.
    pub fn intersect(
        &self,
        other: &CosetArrowSet,
    ) -> Result<Option<CosetArrowSet>, GroupError> {
        let shift = other.representative.inverse()?.mul(&self.representative);
        let factor = groups::product_factor(&shift, &other.source_group, &self.source_group)?;
        let (_, f1) = match factor {
            Some(pair) => pair,
            None => return Ok(None),
        };
        let common = self.representative.mul(&f1.inverse()?);
        debug_assert!(self.contains(&common).unwrap_or(false));
        debug_assert!(other.contains(&common).unwrap_or(false));
        let group = groups::intersect(&self.source_group, &other.source_group)?;
        Ok(Some(CosetArrowSet {
            source: self.source,
            target: self.target,
            representative: common,
            source_group: group,
        }))
    }

    /// Explicit elements, when the source group is finite.
    pub fn materialize(&self) -> Option<Vec<Matrix>> {
        Some(
            self.source_group
                .elements()?
                .iter()
                .map(|g| self.representative.mul(g))
                .collect(),
        )
    }
}

/// The material groupoid of a discretized body: one optional coset arrow set
/// per ordered pair of points, plus vertex groups.
#[derive(Clone, Debug)]
pub struct MaterialGroupoid {
    pub body: BodyGrid,
    arrows: BTreeMap<(ObjectId, ObjectId), CosetArrowSet>,
    vertex: BTreeMap<ObjectId, MatrixGroup>,
}

impl MaterialGroupoid {
    /// Assemble and enforce composability closure: wherever arrows(X,Y) and
    /// arrows(Y,Z) exist, arrows(X,Z) must exist and equal their composition.
    pub fn new(
        body: BodyGrid,
        arrows: BTreeMap<(ObjectId, ObjectId), CosetArrowSet>,
        vertex: BTreeMap<ObjectId, MatrixGroup>,
    ) -> Result<MaterialGroupoid, BodyError> {
        let mg = MaterialGroupoid {
            body,
            arrows,
            vertex,
        };
        mg.check_closure()?;
        Ok(mg)
    }

    fn check_closure(&self) -> Result<(), BodyError> {
        for p in &self.body.points {
            let g = self
                .vertex
                .get(&p.id)
                .ok_or(BodyError::PointNotFound(p.id))?;
            match self.arrows.get(&(p.id, p.id)) {
                Some(set) if set.source_group.same_group(g) => {}
                _ => return Err(BodyError::ClosureViolation(p.id, p.id)),
            }
        }
        let keys: Vec<(ObjectId, ObjectId)> = self.arrows.keys().copied().collect();
        for &(x, y) in &keys {
            for &(y2, z) in &keys {
                if y != y2 {
                    continue;
                }
                let composed = self.arrows[&(y, z)].compose(&self.arrows[&(x, y)])?;
                match self.arrows.get(&(x, z)) {
                    Some(set) if set.same_coset(&composed)? => {}
                    _ => return Err(BodyError::ClosureViolation(x, z)),
                }
            }
            // inverses must be present too
            let inv = self.arrows[&(x, y)].inverse()?;
            match self.arrows.get(&(y, x)) {
                Some(set) if set.same_coset(&inv)? => {}
                _ => return Err(BodyError::ClosureViolation(y, x)),
            }
        }
        Ok(())
    }

    pub fn arrows(&self, x: ObjectId, y: ObjectId) -> Option<&CosetArrowSet> {
        self.arrows.get(&(x, y))
    }

    pub fn arrow_map(&self) -> &BTreeMap<(ObjectId, ObjectId), CosetArrowSet> {
        &self.arrows
    }

    pub fn vertex(&self, x: ObjectId) -> Option<&MatrixGroup> {
        self.vertex.get(&x)
    }
}

/// Build the material groupoid of an all-symbolic body: vertex groups are
/// the archetype groups conjugated by P(X); arrows exist between points
/// sharing an archetype group, with representative P(Y)·P(X)⁻¹.
pub fn build_material_groupoid(body: &BodyGrid) -> Result<MaterialGroupoid, BodyError> {
    let mut any_symbolic = false;
    let mut any_numeric = false;
    for p in &body.points {
        match p.data {
            PointData::Symbolic { .. } => any_symbolic = true,
            PointData::Numeric { .. } => any_numeric = true,
        }
    }
    if any_numeric {
        return Err(if any_symbolic {
            BodyError::MixedModes
        } else {
            BodyError::NumericMode
        });
    }
    let sym = |id: ObjectId| -> Result<(&MatrixGroup, &Matrix), BodyError> {
        match &body.point(id)?.data {
            PointData::Symbolic { group, transplant } => Ok((group, transplant)),
            PointData::Numeric { .. } => Err(BodyError::MixedModes),
        }
    };
    let mut vertex = BTreeMap::new();
    for p in &body.points {
        let (group, transplant) = sym(p.id)?;
        vertex.insert(p.id, group.conjugate(transplant)?);
    }
    let mut arrows = BTreeMap::new();
    for px in &body.points {
        let (gx, tx) = sym(px.id)?;
        for py in &body.points {
            let (gy, ty) = sym(py.id)?;
            if !gx.same_group(gy) {
                continue;
            }
            arrows.insert(
                (px.id, py.id),
                CosetArrowSet {
                    source: px.id,
                    target: py.id,
                    representative: ty.mul(&tx.inverse().map_err(GroupError::Linalg)?),
                    source_group: vertex[&px.id].clone(),
                },
            );
        }
    }
    MaterialGroupoid::new(body.clone(), arrows, vertex)
}

// ---- uniformity ----------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum UniformityVerdict {
    Uniform,
    NonUniform { components: Vec<Vec<ObjectId>> },
}

/// Uniform iff the material groupoid is transitive. Otherwise returns the
/// transitivity components, each sorted, ordered by smallest member.
pub fn is_uniform(mg: &MaterialGroupoid) -> UniformityVerdict {
    let n = mg.body.points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(x, y) in mg.arrows.keys() {
        let (rx, ry) = (root(&mut parent, x.0), root(&mut parent, y.0));
        if rx != ry {
            parent[rx] = ry;
        }
    }
    let mut blocks: BTreeMap<usize, Vec<ObjectId>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        blocks.entry(r).or_default().push(ObjectId(i));
    }
    if blocks.len() == 1 {
        UniformityVerdict::Uniform
    } else {
        let mut components: Vec<Vec<ObjectId>> = blocks.into_values().collect();
        for c in &mut components {
            c.sort();
        }
        components.sort_by_key(|c| c[0]);
        UniformityVerdict::NonUniform { components }
    }
}

// ---- discrete homogeneity --------------------------------------------------------

#[derive(Clone, Debug)]
pub enum HomogeneityVerdict {
    /// A gauge selection g(X) was found in which the transplant field is a
    /// discrete gradient; the map records the chosen symmetry elements.
    Homogeneous { selection: BTreeMap<ObjectId, Matrix> },
    Inhomogeneous,
    Inconclusive,
}

/// Relative tolerance on the plaquette closure defect.
const PLAQUETTE_TOL: f64 = 1e-9;

/// Discrete homogeneity: choose one symmetry element g(X) per point so that
/// F(X) = (W(X)·g(X))⁻¹ — with W(X) a representative arrow from the base
/// point — closes on every grid plaquette under the trapezoid rule:
/// Σ_edges ((F(X)+F(Y))/2)·Δpos = 0. The rule is exact for constant and
/// affine fields F, i.e. exactly when the gauged transplant field is the
/// gradient of a (discrete) configuration.
///
/// Finite vertex groups are searched exhaustively with plaquette-completion
/// pruning; continuous groups are probed with two witness gauges (identity
/// and the constant-transplant gauge) and otherwise report `Inconclusive`.
pub fn is_discretely_homogeneous(
    mg: &MaterialGroupoid,
) -> Result<HomogeneityVerdict, BodyError> {
    if is_uniform(mg) != UniformityVerdict::Uniform {
        return Err(BodyError::NotUniform);
    }
    let points: Vec<ObjectId> = mg.body.points.iter().map(|p| p.id).collect();
    let base = points[0];
    // representative transplant from the base point to each point
    let mut w = BTreeMap::new();
    for &x in &points {
        let set = mg.arrows(base, x).ok_or(BodyError::NotUniform)?;
        w.insert(x, set.representative);
    }
    let gauge_group = mg
        .vertex(base)
        .ok_or(BodyError::PointNotFound(base))?
        .clone();
    // the coset element is W(X)·g with g in the base vertex group; the
    // gauged inverse transplant is F(X) = (W(X)·g(X))⁻¹
    let plaquettes = mg.body.plaquettes();
    let positions: BTreeMap<ObjectId, Vec<f64>> = points
        .iter()
        .map(|&x| Ok((x, mg.body.position(x)?)))
        .collect::<Result<_, BodyError>>()?;

    let defect = |f: &BTreeMap<ObjectId, Matrix>, plq: &[ObjectId; 4]| -> f64 {
        let mut acc = vec![0.0; mg.body.dim];
        for k in 0..4 {
            let (a, b) = (plq[k], plq[(k + 1) % 4]);
            let mid = f[&a].add(&f[&b]).scale(0.5);
            let dx: Vec<f64> = positions[&b]
                .iter()
                .zip(&positions[&a])
                .map(|(pb, pa)| pb - pa)
                .collect();
            let step = mid.matvec(&dx);
            for (s, v) in acc.iter_mut().zip(&step) {
                *s += v;
            }
        }
        acc.iter().map(|v| v * v).sum::<f64>().sqrt()
    };
    let field_scale = w
        .values()
        .map(|m| m.inverse().map(|i| i.frobenius_norm()).unwrap_or(1.0))
        .fold(1.0f64, f64::max);
    let tol = PLAQUETTE_TOL * field_scale;

    let try_gauge = |g: &dyn Fn(ObjectId) -> Option<Matrix>| -> Option<BTreeMap<ObjectId, Matrix>> {
        let mut selection = BTreeMap::new();
        let mut f = BTreeMap::new();
        for &x in &points {
            let gx = g(x)?;
            selection.insert(x, gx);
            f.insert(x, w[&x].mul(&gx).inverse().ok()?);
        }
        if plaquettes.iter().all(|p| defect(&f, p) < tol) {
            Some(selection)
        } else {
            None
        }
    };

    // witness gauges, valid for any vertex group
    if let Some(selection) = try_gauge(&|_| Some(Matrix::identity(mg.body.dim))) {
        return Ok(HomogeneityVerdict::Homogeneous { selection });
    }
    // constant-transplant gauge: g(X) = W(X)⁻¹ whenever that is a symmetry
    if let Some(selection) = try_gauge(&|x| {
        let cand = w[&x].inverse().ok()?;
        match gauge_group.contains(&cand) {
            Ok(true) => Some(cand),
            _ => None,
        }
    }) {
        return Ok(HomogeneityVerdict::Homogeneous { selection });
    }

    let elements = match gauge_group.elements() {
        Some(e) => e,
        None => return Ok(HomogeneityVerdict::Inconclusive),
    };
    // exhaustive backtracking over g(X) in row-major order; a plaquette is
    // checked as soon as its last corner is assigned
    let index: BTreeMap<ObjectId, usize> =
        points.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let plaquettes_by_last: BTreeMap<usize, Vec<&[ObjectId; 4]>> = {
        let mut m: BTreeMap<usize, Vec<&[ObjectId; 4]>> = BTreeMap::new();
        for p in &plaquettes {
            let last = p.iter().map(|x| index[x]).max().unwrap();
            m.entry(last).or_default().push(p);
        }
        m
    };
    struct Search<'a> {
        points: &'a [ObjectId],
        elements: &'a [Matrix],
        w: &'a BTreeMap<ObjectId, Matrix>,
        plaquettes_by_last: &'a BTreeMap<usize, Vec<&'a [ObjectId; 4]>>,
        defect: &'a dyn Fn(&BTreeMap<ObjectId, Matrix>, &[ObjectId; 4]) -> f64,
        tol: f64,
    }
    impl Search<'_> {
        fn go(
            &self,
            k: usize,
            f: &mut BTreeMap<ObjectId, Matrix>,
            sel: &mut BTreeMap<ObjectId, Matrix>,
        ) -> bool {
            if k == self.points.len() {
                return true;
            }
            let x = self.points[k];
            // gauge freedom: the base point's selection is fixed to the
            // first element (a global right factor rescales all defects)
            let choices: &[Matrix] = if k == 0 {
                &self.elements[..1]
            } else {
                self.elements
            };
            for g in choices {
                let q = self.w[&x].mul(g);
                let inv = match q.inverse() {
                    Ok(i) => i,
                    Err(_) => continue,
                };
                f.insert(x, inv);
                sel.insert(x, *g);
                let ok = self
                    .plaquettes_by_last
                    .get(&k)
                    .map_or(true, |ps| ps.iter().all(|p| (self.defect)(f, p) < self.tol));
                if ok && self.go(k + 1, f, sel) {
                    return true;
                }
                f.remove(&x);
                sel.remove(&x);
            }
            false
        }
    }
    let search = Search {
        points: &points,
        elements: &elements,
        w: &w,
        plaquettes_by_last: &plaquettes_by_last,
        defect: &defect,
        tol,
    };
    let mut f = BTreeMap::new();
    let mut sel = BTreeMap::new();
    if search.go(0, &mut f, &mut sel) {
        Ok(HomogeneityVerdict::Homogeneous { selection: sel })
    } else {
        Ok(HomogeneityVerdict::Inhomogeneous)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_rotation, rot2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    fn symbolic(group: MatrixGroup, transplant: Matrix) -> PointData {
        PointData::Symbolic { group, transplant }
    }

    #[test]
    fn isotropic_plate_is_transitive_with_so2_arrows() {
        let body = BodyGrid::plate(2, 3, 3, |_, _| {
            symbolic(MatrixGroup::special_orthogonal(2), Matrix::identity(2))
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        assert_eq!(is_uniform(&mg), UniformityVerdict::Uniform);
        let set = mg.arrows(ObjectId(0), ObjectId(5)).unwrap();
        assert!(set.contains(&rot2(0.3)).unwrap());
        assert!(!set.contains(&Matrix::diag(&[2.0, 1.0])).unwrap());
    }

    #[test]
    fn rotation_field_gives_pure_rotation_arrows() {
        // trivial archetype group: each arrow set is the single rotation
        // R(theta(Y) - theta(X))
        let theta = |i: i64, j: i64| deg(10.0) * i as f64 + deg(5.0) * j as f64;
        let body = BodyGrid::plate(2, 4, 3, |i, j| {
            symbolic(MatrixGroup::trivial(2), rot2(theta(i, j)))
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        assert_eq!(is_uniform(&mg), UniformityVerdict::Uniform);
        let x = ObjectId(0);
        let y = ObjectId(6); // grid (2, 1)
        let set = mg.arrows(x, y).unwrap();
        let expected = rot2(theta(2, 1) - theta(0, 0));
        assert!(set.representative.approx_eq(&expected, 1e-12));
        assert_eq!(set.materialize().unwrap().len(), 1);
    }

    #[test]
    fn two_point_body_single_arrow() {
        let body = BodyGrid::plate(2, 2, 1, |i, _| {
            let p = if i == 0 {
                Matrix::identity(2)
            } else {
                Matrix::diag(&[2.0, 1.0])
            };
            symbolic(MatrixGroup::trivial(2), p)
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        let set = mg.arrows(ObjectId(0), ObjectId(1)).unwrap();
        assert!(set.representative.approx_eq(&Matrix::diag(&[2.0, 1.0]), 1e-12));
    }

    #[test]
    fn arrow_sets_compose_consistently() {
        // finite vertex groups: enumerate; continuous: random member probes
        let half_turn = MatrixGroup::finite(
            2,
            vec![Matrix::identity(2), rot2(std::f64::consts::PI)],
        )
        .unwrap();
        let body = BodyGrid::plate(2, 3, 1, |i, _| {
            symbolic(half_turn.clone(), rot2(deg(15.0) * i as f64))
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        let (x, y, z) = (ObjectId(0), ObjectId(1), ObjectId(2));
        let composed = mg.arrows(y, z).unwrap().compose(mg.arrows(x, y).unwrap()).unwrap();
        assert!(composed.same_coset(mg.arrows(x, z).unwrap()).unwrap());
        let lhs: Vec<Matrix> = composed.materialize().unwrap();
        let rhs: Vec<Matrix> = mg.arrows(x, z).unwrap().materialize().unwrap();
        assert_eq!(lhs.len(), rhs.len());
        for m in &lhs {
            assert!(rhs.iter().any(|r| r.approx_eq(m, 1e-9)));
        }

        // continuous case: products of members land in the composite set
        let body = BodyGrid::plate(2, 3, 1, |i, _| {
            symbolic(
                MatrixGroup::special_orthogonal(2),
                Matrix::identity(2).scale(1.0 + 0.1 * i as f64),
            )
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let a = mg
                .arrows(x, y)
                .unwrap()
                .representative
                .mul(&random_rotation(&mut rng, 2));
            let b = mg
                .arrows(y, z)
                .unwrap()
                .representative
                .mul(&random_rotation(&mut rng, 2));
            assert!(mg.arrows(x, z).unwrap().contains(&b.mul(&a)).unwrap());
        }
    }

    #[test]
    fn vertex_groups_are_conjugate_along_arrows() {
        let body = BodyGrid::plate(2, 2, 2, |i, j| {
            symbolic(
                MatrixGroup::special_orthogonal(2),
                rot2(deg(20.0) * i as f64).mul(&Matrix::diag(&[1.0 + 0.5 * j as f64, 1.0])),
            )
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for px in &mg.body.points {
            for py in &mg.body.points {
                let set = mg.arrows(px.id, py.id).unwrap();
                let conj = mg
                    .vertex(px.id)
                    .unwrap()
                    .conjugate(&set.representative)
                    .unwrap();
                let target = mg.vertex(py.id).unwrap();
                for _ in 0..50 {
                    let probe = random_rotation(&mut rng, 2);
                    assert_eq!(
                        conj.contains(&probe).unwrap(),
                        target.contains(&probe).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn representatives_invariant_under_archetype_change() {
        // P(X) -> P(X)·K changes nothing: representatives P(Y)P(X)⁻¹ are
        // exactly equal and the uniformity verdict is unchanged
        let k = Matrix::from_rows(2, &[1.3, 0.2, 0.0, 0.8]);
        let p = |i: i64, j: i64| rot2(deg(7.0) * (i + 2 * j) as f64);
        let body1 = BodyGrid::plate(2, 3, 3, |i, j| {
            symbolic(MatrixGroup::trivial(2), p(i, j))
        })
        .unwrap();
        let body2 = BodyGrid::plate(2, 3, 3, |i, j| {
            symbolic(MatrixGroup::trivial(2), p(i, j).mul(&k))
        })
        .unwrap();
        let mg1 = build_material_groupoid(&body1).unwrap();
        let mg2 = build_material_groupoid(&body2).unwrap();
        for (key, set1) in mg1.arrow_map() {
            let set2 = &mg2.arrow_map()[key];
            assert!(set1.representative.approx_eq(&set2.representative, 1e-13));
        }
        assert_eq!(is_uniform(&mg1), is_uniform(&mg2));
    }

    #[test]
    fn constant_field_is_homogeneous() {
        let body = BodyGrid::plate(2, 4, 4, |_, _| {
            symbolic(MatrixGroup::trivial(2), Matrix::from_rows(2, &[1.1, 0.2, 0.0, 0.9]))
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        assert!(matches!(
            is_discretely_homogeneous(&mg).unwrap(),
            HomogeneityVerdict::Homogeneous { .. }
        ));
    }

    #[test]
    fn nonlinear_rotation_field_is_inhomogeneous() {
        let theta = |i: i64, j: i64| deg(90.0) * ((i * j) % 4) as f64;
        let body = BodyGrid::plate(2, 3, 3, |i, j| {
            symbolic(MatrixGroup::trivial(2), rot2(theta(i, j)))
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        assert!(matches!(
            is_discretely_homogeneous(&mg).unwrap(),
            HomogeneityVerdict::Inhomogeneous
        ));
    }

    #[test]
    fn quarter_turn_group_absorbs_the_same_field() {
        // same rotation field, but the vertex group contains R(k·pi/2):
        // the gauge g(X) = R(-theta(X)) makes the transplant constant
        let c4 = MatrixGroup::finite(
            2,
            (0..4).map(|k| rot2(deg(90.0) * k as f64)).collect(),
        )
        .unwrap();
        let theta = |i: i64, j: i64| deg(90.0) * ((i * j) % 4) as f64;
        let body = BodyGrid::plate(2, 3, 3, |i, j| symbolic(c4.clone(), rot2(theta(i, j)))).unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        match is_discretely_homogeneous(&mg).unwrap() {
            HomogeneityVerdict::Homogeneous { selection } => {
                assert_eq!(selection.len(), 9);
            }
            v => panic!("expected homogeneous, got {v:?}"),
        }
    }

    #[test]
    fn continuous_group_constant_field_homogeneous_via_witness() {
        let body = BodyGrid::plate(2, 3, 3, |_, _| {
            symbolic(MatrixGroup::special_orthogonal(2), Matrix::identity(2).scale(1.05))
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        assert!(matches!(
            is_discretely_homogeneous(&mg).unwrap(),
            HomogeneityVerdict::Homogeneous { .. }
        ));
    }

    #[test]
    fn continuous_group_rotation_field_gauged_constant() {
        // rotation-valued transplants inside an SO(2) archetype can always
        // be gauged to the identity: the constant-transplant witness fires
        let body = BodyGrid::plate(2, 3, 3, |i, j| {
            symbolic(MatrixGroup::special_orthogonal(2), rot2(deg(11.0) * (i + j * j) as f64))
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        assert!(matches!(
            is_discretely_homogeneous(&mg).unwrap(),
            HomogeneityVerdict::Homogeneous { .. }
        ));
    }

    #[test]
    fn continuous_group_without_witness_is_inconclusive() {
        // stretch-valued transplants in an SO(2) archetype: neither witness
        // gauge closes the plaquettes and the group is not enumerable
        let body = BodyGrid::plate(2, 3, 3, |i, _| {
            symbolic(
                MatrixGroup::special_orthogonal(2),
                Matrix::from_rows(2, &[1.0, -0.3 * (i * i) as f64, 0.0, 1.0]),
            )
        })
        .unwrap();
        let mg = build_material_groupoid(&body).unwrap();
        assert!(matches!(
            is_discretely_homogeneous(&mg).unwrap(),
            HomogeneityVerdict::Inconclusive
        ));
    }

    #[test]
    fn coset_intersection_matches_membership() {
        // two cosets over SO(2) and a conjugated SO(2): their intersection
        // must contain exactly the matrices contained in both
        let h = Matrix::diag(&[2.0, 1.0]);
        let a = CosetArrowSet {
            source: ObjectId(0),
            target: ObjectId(1),
            representative: rot2(0.2),
            source_group: MatrixGroup::special_orthogonal(2),
        };
        let b = CosetArrowSet {
            source: ObjectId(0),
            target: ObjectId(1),
            representative: Matrix::identity(2),
            source_group: MatrixGroup::conjugated(MatrixGroup::special_orthogonal(2), &h)
                .unwrap(),
        };
        let inter = a.intersect(&b).unwrap().expect("nonempty");
        assert!(a.contains(&inter.representative).unwrap());
        assert!(b.contains(&inter.representative).unwrap());
        let elems = inter.materialize().expect("finite intersection group");
        assert_eq!(elems.len(), 2);
        for m in &elems {
            assert!(a.contains(m).unwrap() && b.contains(m).unwrap());
        }
        // disjoint cosets: shift one by a matrix outside the product
        let c = CosetArrowSet {
            representative: Matrix::diag(&[5.0, 5.0]),
            ..a.clone()
        };
        assert!(c.intersect(&b).unwrap().is_none());
    }

    #[test]
    fn mixed_mode_bodies_are_rejected() {
        let body = BodyGrid::plate(2, 2, 1, |i, _| {
            if i == 0 {
                symbolic(MatrixGroup::trivial(2), Matrix::identity(2))
            } else {
                PointData::Numeric {
                    model: ConstitutiveModel::NeoHookean {
                        dim: 2,
                        mu: 1.0,
                        lambda: 1.0,
                    },
                }
            }
        })
        .unwrap();
        assert!(matches!(
            build_material_groupoid(&body),
            Err(BodyError::MixedModes)
        ));
    }
}
