//! The material double groupoid of a binary composite: commuting squares,
//! corner filling, local triviality, and the core groupoid whose
//! transitivity decides uniformity of the composite.

use matgroupoids::body::{build_material_groupoid, is_uniform, UniformityVerdict};
use matgroupoids::double::{core_material_groupoid, DoubleGroupoid, SideRef, SquarePredicate};
use matgroupoids::fixtures::composite_fixture;
use matgroupoids::groupoid::ObjectId;

fn main() {
    let fx = composite_fixture("locally_trivial").expect("bundled fixture");
    let a = build_material_groupoid(&fx.body_a).expect("constituent A");
    let b = build_material_groupoid(&fx.body_b).expect("constituent B");

    let dg = DoubleGroupoid::new(
        SideRef::Material(&a),
        SideRef::Material(&b),
        SquarePredicate::Commuting,
    )
    .expect("both sides share the plate's points");

    // fill a commuting square over the corner (s, ŝ): given the bottom and
    // right edges, find a compatible top and left
    let (x, y) = (ObjectId(0), ObjectId(1));
    let s = dg
        .h
        .representative(x, y)
        .expect("enumerable side")
        .expect("A is uniform");
    let shat = dg
        .v
        .representative(x, y)
        .expect("enumerable side")
        .expect("B is uniform");
    match dg.fill_corner(&s, &shat).expect("descriptor family decides") {
        Some(square) => println!(
            "corner ({:?} -> {:?}) fills: top payload =\n{:?}",
            x,
            y,
            square.t.payload
        ),
        None => println!("corner ({x:?} -> {y:?}) does not fill"),
    }

    let (lt_h, lt_v) = dg.is_locally_trivial().expect("descriptor family decides");
    println!("locally trivial: horizontal = {lt_h}, vertical = {lt_v}");

    // the core groupoid: pairwise intersection of the two arrow families;
    // its transitivity is exactly uniformity of the composite
    let core = core_material_groupoid(&a, &b).expect("same grid");
    match is_uniform(&core) {
        UniformityVerdict::Uniform => println!("core is transitive: composite is uniform"),
        UniformityVerdict::NonUniform { components } => println!(
            "core is intransitive: {} transitivity components",
            components.len()
        ),
    }
    println!(
        "composite vertex group at the origin: {:?}",
        core.vertex(ObjectId(0)).unwrap().kind()
    );
}
