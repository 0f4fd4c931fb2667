//! Finite groupoid algebra: arrows over a finite object set, composition,
//! identities, inverses, vertex groups and transitivity analysis.
//!
//! The composition convention follows maps: `uv` means "first v, then u",
//! so `uv` is defined exactly when the target of `v` equals the source of
//! `u`.

use crate::linalg::{Matrix, PAYLOAD_TOL};
use std::collections::BTreeMap;
use thiserror::Error;

/// A point of the base set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub usize);

/// Index of an arrow within its groupoid.
pub type ArrowId = usize;

#[derive(Clone, Debug)]
pub struct Arrow {
    pub id: ArrowId,
    pub source: ObjectId,
    pub target: ObjectId,
    /// Optional matrix payload, for matrix groupoids.
    pub payload: Option<Matrix>,
    /// Human-readable tag for fixtures ("(x,g)" of an action groupoid etc.).
    pub label: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum GroupoidError {
    #[error("arrows are not composable: target {0:?} != source {1:?}")]
    NotComposable(ObjectId, ObjectId),
    #[error("arrow {0} does not belong to this groupoid")]
    UnknownArrow(ArrowId),
    #[error("object {0:?} does not belong to this groupoid")]
    UnknownObject(ObjectId),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("inconsistent groupoid data: {0}")]
    Inconsistent(String),
}

/// A groupoid with explicitly tabulated arrows.
#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    objects: Vec<ObjectId>,
    arrows: Vec<Arrow>,
    compose: BTreeMap<(ArrowId, ArrowId), ArrowId>,
    inverse: Vec<ArrowId>,
    identity: BTreeMap<ObjectId, ArrowId>,
}

impl FiniteGroupoid {
    /// Build from raw arrows. The composition table is derived: for matrix
    /// payloads by matching products against existing arrows (deduplicated
    /// within tolerance), otherwise from an explicit table.
    pub fn from_tables(
        objects: Vec<ObjectId>,
        arrows: Vec<Arrow>,
        compose: BTreeMap<(ArrowId, ArrowId), ArrowId>,
        inverse: Vec<ArrowId>,
        identity: BTreeMap<ObjectId, ArrowId>,
    ) -> Result<Self, GroupoidError> {
        let g = FiniteGroupoid {
            objects,
            arrows,
            compose,
            inverse,
            identity,
        };
        g.check_axioms()?;
        Ok(g)
    }

    /// Build a matrix groupoid from payload-carrying arrows. Every arrow must
    /// carry a payload; the arrow set must be closed under composition and
    /// inverse, and contain an identity-payload loop at each object.
    pub fn from_matrix_arrows(
        objects: Vec<ObjectId>,
        raw: Vec<(ObjectId, ObjectId, Matrix)>,
    ) -> Result<Self, GroupoidError> {
        // dedup by endpoints + payload
        let mut arrows: Vec<Arrow> = Vec::new();
        for (src, dst, m) in raw {
            let dup = arrows.iter().any(|a| {
                a.source == src && a.target == dst && a.payload.as_ref().unwrap().approx_eq(&m, PAYLOAD_TOL)
            });
            if !dup {
                arrows.push(Arrow {
                    id: arrows.len(),
                    source: src,
                    target: dst,
                    payload: Some(m),
                    label: String::new(),
                });
            }
        }
        let find = |src: ObjectId, dst: ObjectId, m: &Matrix, arrows: &[Arrow]| -> Option<ArrowId> {
            arrows
                .iter()
                .find(|a| {
                    a.source == src
                        && a.target == dst
                        && a.payload.as_ref().unwrap().approx_eq(m, PAYLOAD_TOL)
                })
                .map(|a| a.id)
        };
        let mut identity = BTreeMap::new();
        for &x in &objects {
            let dim = arrows
                .iter()
                .find(|a| a.source == x || a.target == x)
                .map(|a| a.payload.as_ref().unwrap().dim())
                .ok_or_else(|| GroupoidError::Inconsistent(format!("no arrows at {x:?}")))?;
            let id = find(x, x, &Matrix::identity(dim), &arrows).ok_or_else(|| {
                GroupoidError::Inconsistent(format!("missing identity arrow at {x:?}"))
            })?;
            identity.insert(x, id);
        }
        let mut inverse = vec![0; arrows.len()];
        for a in &arrows {
            let inv = a
                .payload
                .as_ref()
                .unwrap()
                .inverse()
                .map_err(|e| GroupoidError::Inconsistent(format!("singular payload: {e}")))?;
            inverse[a.id] = find(a.target, a.source, &inv, &arrows).ok_or_else(|| {
                GroupoidError::Inconsistent(format!("arrow set not closed under inverse ({})", a.id))
            })?;
        }
        let mut compose = BTreeMap::new();
        for u in &arrows {
            for v in &arrows {
                if v.target == u.source {
                    let prod = u.payload.as_ref().unwrap().mul(v.payload.as_ref().unwrap());
                    let w = find(v.source, u.target, &prod, &arrows).ok_or_else(|| {
                        GroupoidError::Inconsistent(format!(
                            "arrow set not closed under composition ({}, {})",
                            u.id, v.id
                        ))
                    })?;
                    compose.insert((u.id, v.id), w);
                }
            }
        }
        Self::from_tables(objects, arrows, compose, inverse, identity)
    }

    pub fn objects(&self) -> &[ObjectId] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: ArrowId) -> Result<&Arrow, GroupoidError> {
        self.arrows.get(id).ok_or(GroupoidError::UnknownArrow(id))
    }

    pub fn identity_arrow(&self, x: ObjectId) -> Result<&Arrow, GroupoidError> {
        let id = self
            .identity
            .get(&x)
            .ok_or(GroupoidError::UnknownObject(x))?;
        self.arrow(*id)
    }

    pub fn inverse_arrow(&self, z: &Arrow) -> Result<&Arrow, GroupoidError> {
        self.check_member(z)?;
        self.arrow(self.inverse[z.id])
    }

    fn check_member(&self, z: &Arrow) -> Result<(), GroupoidError> {
        match self.arrows.get(z.id) {
            Some(a) if a.source == z.source && a.target == z.target => Ok(()),
            _ => Err(GroupoidError::UnknownArrow(z.id)),
        }
    }

    /// `uv`: first `v`, then `u`. Defined iff target(v) = source(u).
    pub fn compose(&self, u: &Arrow, v: &Arrow) -> Result<&Arrow, GroupoidError> {
        self.check_member(u)?;
        self.check_member(v)?;
        if v.target != u.source {
            return Err(GroupoidError::NotComposable(v.target, u.source));
        }
        let w = self
            .compose
            .get(&(u.id, v.id))
            .ok_or(GroupoidError::NotComposable(v.target, u.source))?;
        self.arrow(*w)
    }

    /// The vertex group G_x = { z : source(z) = target(z) = x }.
    pub fn vertex_group(&self, x: ObjectId) -> Result<Vec<&Arrow>, GroupoidError> {
        if !self.objects.contains(&x) {
            return Err(GroupoidError::UnknownObject(x));
        }
        Ok(self
            .arrows
            .iter()
            .filter(|a| a.source == x && a.target == x)
            .collect())
    }

    /// The conjugation bijection h -> z h z⁻¹ from G_source(z) onto
    /// G_target(z).
    pub fn conjugate_vertex_groups(
        &self,
        z: &Arrow,
    ) -> Result<BTreeMap<ArrowId, ArrowId>, GroupoidError> {
        self.check_member(z)?;
        let z_inv = self.inverse_arrow(z)?.clone();
        let mut map = BTreeMap::new();
        for h in self.vertex_group(z.source)? {
            let hz = self.compose(h, &z_inv)?.clone();
            let zhz = self.compose(z, &hz)?;
            map.insert(h.id, zhz.id);
        }
        Ok(map)
    }

    /// Partition of the objects into transitivity components. Blocks are
    /// returned in ascending order of their smallest member.
    pub fn transitivity_components(&self) -> Vec<Vec<ObjectId>> {
        let mut uf = UnionFind::new(self.objects.len());
        let index: BTreeMap<ObjectId, usize> = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i))
            .collect();
        for a in &self.arrows {
            uf.union(index[&a.source], index[&a.target]);
        }
        let mut blocks: BTreeMap<usize, Vec<ObjectId>> = BTreeMap::new();
        for &x in &self.objects {
            blocks.entry(uf.find(index[&x])).or_default().push(x);
        }
        let mut out: Vec<Vec<ObjectId>> = blocks.into_values().collect();
        for b in &mut out {
            b.sort();
        }
        out.sort_by_key(|b| b[0]);
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.transitivity_components().len() <= 1
    }

    /// Exhaustive verification of the groupoid axioms: source/target
    /// consistency of the tables, unit and inverse laws, and associativity
    /// over all composable triples.
    pub fn check_axioms(&self) -> Result<(), GroupoidError> {
        let fail = |msg: String| Err(GroupoidError::Inconsistent(msg));
        if self.inverse.len() != self.arrows.len() {
            return fail("inverse table size mismatch".into());
        }
        for &x in &self.objects {
            let e = self.identity_arrow(x)?;
            if e.source != x || e.target != x {
                return fail(format!("identity at {x:?} is not a loop"));
            }
            if let Some(p) = &e.payload {
                if !p.approx_eq(&Matrix::identity(p.dim()), PAYLOAD_TOL) {
                    return fail(format!("identity payload at {x:?} is not I"));
                }
            }
        }
        for z in &self.arrows {
            if !self.objects.contains(&z.source) || !self.objects.contains(&z.target) {
                return fail(format!("arrow {} has foreign endpoints", z.id));
            }
            let ex = self.identity_arrow(z.source)?.clone();
            let ey = self.identity_arrow(z.target)?.clone();
            // unit laws z ε(α(z)) = ε(β(z)) z = z
            if self.compose(z, &ex)?.id != z.id || self.compose(&ey, z)?.id != z.id {
                return fail(format!("unit law fails for arrow {}", z.id));
            }
            // inverse laws
            let zi = self.inverse_arrow(z)?.clone();
            if self.compose(z, &zi)?.id != ey.id || self.compose(&zi, z)?.id != ex.id {
                return fail(format!("inverse law fails for arrow {}", z.id));
            }
        }
        for ((u, v), w) in &self.compose {
            let (u, v, w) = (self.arrow(*u)?, self.arrow(*v)?, self.arrow(*w)?);
            if v.target != u.source {
                return fail("compose table entry for non-composable pair".into());
            }
            if w.source != v.source || w.target != u.target {
                return fail("compose table breaks source/target consistency".into());
            }
            if let (Some(pu), Some(pv), Some(pw)) = (&u.payload, &v.payload, &w.payload) {
                if !pu.mul(pv).approx_eq(pw, PAYLOAD_TOL) {
                    return fail(format!("payload product mismatch for ({}, {})", u.id, v.id));
                }
            }
        }
        // associativity over all composable triples
        for u in &self.arrows {
            for v in &self.arrows {
                if v.target != u.source {
                    continue;
                }
                for w in &self.arrows {
                    if w.target != v.source {
                        continue;
                    }
                    let uv = self.compose(u, v)?;
                    let vw = self.compose(v, w)?;
                    if self.compose(uv, w)?.id != self.compose(u, vw)?.id {
                        return fail(format!(
                            "associativity fails on ({}, {}, {})",
                            u.id, v.id, w.id
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
        }
        self.parent[i]
    }

    pub fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.parent[ri.max(rj)] = ri.min(rj);
        }
    }
}

// ---- constructors ----------------------------------------------------------

/// The pair groupoid on n objects: one arrow per ordered pair.
pub fn make_pair_groupoid(n: usize) -> FiniteGroupoid {
    assert!(n >= 1);
    let objects: Vec<ObjectId> = (0..n).map(ObjectId).collect();
    let mut arrows = Vec::new();
    let mut index = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            let id = arrows.len();
            index.insert((x, y), id);
            arrows.push(Arrow {
                id,
                source: ObjectId(x),
                target: ObjectId(y),
                payload: None,
                label: format!("({x},{y})"),
            });
        }
    }
    let mut compose = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                // v: x -> y, u: y -> z, uv: x -> z
                compose.insert((index[&(y, z)], index[&(x, y)]), index[&(x, z)]);
            }
        }
    }
    let inverse = arrows
        .iter()
        .map(|a| index[&(a.target.0, a.source.0)])
        .collect();
    let identity = (0..n).map(|x| (ObjectId(x), index[&(x, x)])).collect();
    FiniteGroupoid::from_tables(objects, arrows, compose, inverse, identity)
        .expect("pair groupoid axioms")
}

/// Action groupoid of a finite group acting on a finite set of points.
/// Arrows are the pairs (x, g): x -> g·x. The action table maps
/// (group label, point) -> point; `unit` names the group identity.
pub fn make_action_groupoid(
    group_elements: &[&str],
    unit: &str,
    multiply: &dyn Fn(&str, &str) -> String,
    points: &[&str],
    act: &dyn Fn(&str, &str) -> String,
) -> Result<FiniteGroupoid, GroupoidError> {
    let gidx = |g: &str| -> Result<usize, GroupoidError> {
        group_elements
            .iter()
            .position(|&e| e == g)
            .ok_or_else(|| GroupoidError::InvalidAction(format!("unknown element {g}")))
    };
    let pidx = |p: &str| -> Result<usize, GroupoidError> {
        points
            .iter()
            .position(|&e| e == p)
            .ok_or_else(|| GroupoidError::InvalidAction(format!("unknown point {p}")))
    };
    gidx(unit)?;
    // action axioms: e·x = x and g(h·x) = (gh)·x
    for &x in points {
        if act(unit, x) != x {
            return Err(GroupoidError::InvalidAction(format!(
                "identity does not fix point {x}"
            )));
        }
        for &g in group_elements {
            pidx(&act(g, x))?;
            for &h in group_elements {
                let lhs = act(g, &act(h, x));
                let rhs = act(&multiply(g, h), x);
                if lhs != rhs {
                    return Err(GroupoidError::InvalidAction(format!(
                        "g(hx) != (gh)x for g={g}, h={h}, x={x}"
                    )));
                }
            }
        }
    }
    let objects: Vec<ObjectId> = (0..points.len()).map(ObjectId).collect();
    let mut arrows = Vec::new();
    let mut index = BTreeMap::new();
    for (xi, &x) in points.iter().enumerate() {
        for &g in group_elements {
            let y = pidx(&act(g, x))?;
            let id = arrows.len();
            index.insert((xi, gidx(g)?), id);
            arrows.push(Arrow {
                id,
                source: ObjectId(xi),
                target: ObjectId(y),
                payload: None,
                label: format!("({x},{g})"),
            });
        }
    }
    let mut compose = BTreeMap::new();
    for (xi, &x) in points.iter().enumerate() {
        for &g in group_elements {
            let yi = pidx(&act(g, x))?;
            for &h in group_elements {
                // u = (gx, h), v = (x, g)  ->  uv = (x, hg)
                let u = index[&(yi, gidx(h)?)];
                let v = index[&(xi, gidx(g)?)];
                let hg = multiply(h, g);
                compose.insert((u, v), index[&(xi, gidx(&hg)?)]);
            }
        }
    }
    let mut inverse = vec![0; arrows.len()];
    for ((xi, gi), &aid) in &index {
        let g = group_elements[*gi];
        let ginv = group_elements
            .iter()
            .find(|&&h| multiply(g, h) == unit && multiply(h, g) == unit)
            .ok_or_else(|| GroupoidError::InvalidAction(format!("no inverse for {g}")))?;
        let yi = pidx(&act(g, points[*xi]))?;
        inverse[aid] = index[&(yi, gidx(ginv)?)];
    }
    let identity = (0..points.len())
        .map(|xi| Ok((ObjectId(xi), index[&(xi, gidx(unit)?)])))
        .collect::<Result<_, GroupoidError>>()?;
    FiniteGroupoid::from_tables(objects, arrows, compose, inverse, identity)
}

/// Group-as-groupoid over a singleton, from an explicit multiplication table.
pub fn make_group_groupoid(
    elements: &[&str],
    unit: &str,
    multiply: &dyn Fn(&str, &str) -> String,
) -> Result<FiniteGroupoid, GroupoidError> {
    make_action_groupoid(elements, unit, multiply, &["*"], &|_, _| "*".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use crate::linalg::rot2;

    fn c2_mul(a: &str, b: &str) -> String {
        if a == b {
            "e".to_string()
        } else {
            "r".to_string()
        }
    }

    #[test]
    fn pair_groupoid_basics() {
        let g1 = make_pair_groupoid(1);
        assert_eq!(g1.arrows().len(), 1);
        let g2 = make_pair_groupoid(2);
        assert_eq!(g2.arrows().len(), 4);
        for &x in g2.objects() {
            assert_eq!(g2.vertex_group(x).unwrap().len(), 1);
        }
        let g3 = make_pair_groupoid(3);
        assert_eq!(g3.arrows().len(), 9);
        assert!(g3.is_transitive());
        // u = (1,2), v = (0,1) -> uv = (0,2), matching relation transitivity
        let u = g3.arrows().iter().find(|a| a.label == "(1,2)").unwrap();
        let v = g3.arrows().iter().find(|a| a.label == "(0,1)").unwrap();
        assert_eq!(g3.compose(u, v).unwrap().label, "(0,2)");
        // exhaustive: uv exists iff endpoints chain, and equals the chained pair
        for u in g3.arrows() {
            for v in g3.arrows() {
                match g3.compose(u, v) {
                    Ok(w) => {
                        assert_eq!(v.target, u.source);
                        assert_eq!((w.source, w.target), (v.source, u.target));
                    }
                    Err(_) => assert_ne!(v.target, u.source),
                }
            }
        }
    }

    #[test]
    fn identity_absorbed_and_inverse_composes_to_unit() {
        let g = make_pair_groupoid(3);
        let v = g.arrows().iter().find(|a| a.label == "(0,1)").unwrap();
        let ey = g.identity_arrow(ObjectId(1)).unwrap();
        assert_eq!(g.compose(ey, v).unwrap().id, v.id);
        let vinv = g.inverse_arrow(v).unwrap();
        assert_eq!(
            g.compose(vinv, v).unwrap().id,
            g.identity_arrow(ObjectId(0)).unwrap().id
        );
    }

    #[test]
    fn matrix_groupoid_inverse_payload() {
        // two-object groupoid with rotation payloads
        let i = Matrix::identity(2);
        let r = rot2(0.7);
        let g = FiniteGroupoid::from_matrix_arrows(
            vec![ObjectId(0), ObjectId(1)],
            vec![
                (ObjectId(0), ObjectId(0), i),
                (ObjectId(1), ObjectId(1), i),
                (ObjectId(0), ObjectId(1), r),
                (ObjectId(1), ObjectId(0), r.inverse().unwrap()),
            ],
        )
        .unwrap();
        let v = g
            .arrows()
            .iter()
            .find(|a| a.source == ObjectId(0) && a.target == ObjectId(1))
            .unwrap();
        let vinv = g.inverse_arrow(v).unwrap();
        let e = g.compose(vinv, v).unwrap();
        assert!(e
            .payload
            .as_ref()
            .unwrap()
            .approx_eq(&Matrix::identity(2), 1e-12));
    }

    #[test]
    fn action_groupoid_c2_swap() {
        let g = make_action_groupoid(
            &["e", "r"],
            "e",
            &c2_mul,
            &["a", "b"],
            &|g, x| {
                if g == "e" {
                    x.to_string()
                } else if x == "a" {
                    "b".to_string()
                } else {
                    "a".to_string()
                }
            },
        )
        .unwrap();
        assert_eq!(g.arrows().len(), 4);
        assert!(g.is_transitive());
        // vertex at a contains only (a,e)
        let va = g.vertex_group(ObjectId(0)).unwrap();
        assert_eq!(va.len(), 1);
        assert_eq!(va[0].label, "(a,e)");
        // inverse of (x,g) is (gx, g⁻¹)
        let xa_r = g.arrows().iter().find(|a| a.label == "(a,r)").unwrap();
        assert_eq!(g.inverse_arrow(xa_r).unwrap().label, "(b,r)");
    }

    #[test]
    fn action_groupoid_c2_trivial_action() {
        let g = make_action_groupoid(&["e", "r"], "e", &c2_mul, &["a", "b"], &|_, x| {
            x.to_string()
        })
        .unwrap();
        assert_eq!(g.transitivity_components().len(), 2);
        for &x in g.objects() {
            assert_eq!(g.vertex_group(x).unwrap().len(), 2);
        }
    }

    #[test]
    fn trivial_group_action_is_totally_intransitive() {
        let g = make_action_groupoid(
            &["e"],
            "e",
            &|_, _| "e".to_string(),
            &["a", "b", "c"],
            &|_, x| x.to_string(),
        )
        .unwrap();
        assert_eq!(g.arrows().len(), 3);
        assert_eq!(g.transitivity_components().len(), 3);
    }

    #[test]
    fn invalid_action_rejected() {
        // "action" where identity moves points
        let err = make_action_groupoid(&["e", "r"], "e", &c2_mul, &["a", "b"], &|_, x| {
            if x == "a" {
                "b".to_string()
            } else {
                "a".to_string()
            }
        });
        assert!(matches!(err, Err(GroupoidError::InvalidAction(_))));
    }

    #[test]
    fn group_over_singleton_vertex_group_is_everything() {
        let g = make_group_groupoid(&["e", "r"], "e", &c2_mul).unwrap();
        assert_eq!(g.vertex_group(ObjectId(0)).unwrap().len(), 2);
    }

    #[test]
    fn conjugation_is_group_isomorphism() {
        // C2 acting trivially: nontrivial vertex groups at both points,
        // conjugation along identities maps them onto themselves
        let g = make_action_groupoid(&["e", "r"], "e", &c2_mul, &["a", "b"], &|_, x| {
            x.to_string()
        })
        .unwrap();
        for z in g.arrows() {
            let map = g.conjugate_vertex_groups(z).unwrap();
            let image: BTreeSet<ArrowId> = map.values().copied().collect();
            let target_group: BTreeSet<ArrowId> = g
                .vertex_group(z.target)
                .unwrap()
                .iter()
                .map(|a| a.id)
                .collect();
            assert_eq!(image, target_group);
        }
    }

    #[test]
    fn components_match_graph_traversal_oracle() {
        // laminate-style groupoid: 3x3 grid, arrows only within columns
        let n = 9;
        let objects: Vec<ObjectId> = (0..n).map(ObjectId).collect();
        let col = |i: usize| i % 3;
        let mut arrows = Vec::new();
        let mut index = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                if col(x) == col(y) {
                    let id = arrows.len();
                    index.insert((x, y), id);
                    arrows.push(Arrow {
                        id,
                        source: ObjectId(x),
                        target: ObjectId(y),
                        payload: None,
                        label: format!("({x},{y})"),
                    });
                }
            }
        }
        let mut compose = BTreeMap::new();
        for (&(x, y), &v) in &index {
            for (&(y2, z), &u) in &index {
                if y2 == y {
                    compose.insert((u, v), index[&(x, z)]);
                }
            }
        }
        let inverse = arrows.iter().map(|a| index[&(a.target.0, a.source.0)]).collect();
        let identity = (0..n).map(|x| (ObjectId(x), index[&(x, x)])).collect();
        let g = FiniteGroupoid::from_tables(objects, arrows, compose, inverse, identity).unwrap();

        let comps = g.transitivity_components();
        assert_eq!(comps.len(), 3);

        // oracle: BFS on the undirected arrow graph
        let mut seen = vec![false; n];
        let mut oracle = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut block = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                block.push(ObjectId(x));
                for a in g.arrows() {
                    for (p, q) in [(a.source.0, a.target.0), (a.target.0, a.source.0)] {
                        if p == x && !seen[q] {
                            seen[q] = true;
                            stack.push(q);
                        }
                    }
                }
            }
            block.sort();
            oracle.push(block);
        }
        oracle.sort_by_key(|b| b[0]);
        assert_eq!(comps, oracle);
    }
}
