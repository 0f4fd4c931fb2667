//! Finite groupoids from scratch: the pair groupoid, a group seen as a
//! one-object groupoid, and an action groupoid, with axiom checks and
//! transitivity components.

use matgroupoids::groupoid::{
    make_action_groupoid, make_group_groupoid, make_pair_groupoid, ObjectId,
};

fn c4_mul(a: &str, b: &str) -> String {
    let val = |s: &str| match s {
        "e" => 0,
        "r" => 1,
        "r2" => 2,
        _ => 3,
    };
    ["e", "r", "r2", "r3"][(val(a) + val(b)) % 4].to_string()
}

fn main() {
    // the pair groupoid on n objects: exactly one arrow between each pair
    let pair = make_pair_groupoid(4);
    pair.check_axioms().expect("pair groupoid satisfies the axioms");
    println!(
        "pair groupoid on 4 objects: {} arrows, transitive = {}",
        pair.arrows().len(),
        pair.is_transitive()
    );

    // a group is a groupoid with a single object
    let c4 = make_group_groupoid(&["e", "r", "r2", "r3"], "e", &c4_mul)
        .expect("C4 is a valid group");
    c4.check_axioms().expect("group groupoid satisfies the axioms");
    println!(
        "C4 as a groupoid: {} objects, vertex group order {}",
        c4.objects().len(),
        c4.vertex_group(ObjectId(0)).unwrap().len()
    );

    // C4 acting on the corners of a square by cyclic shift
    let corners = ["a", "b", "c", "d"];
    let act = |g: &str, x: &str| -> String {
        let shift = match g {
            "e" => 0,
            "r" => 1,
            "r2" => 2,
            _ => 3,
        };
        let i = corners.iter().position(|&c| c == x).unwrap();
        corners[(i + shift) % 4].to_string()
    };
    let action = make_action_groupoid(&["e", "r", "r2", "r3"], "e", &c4_mul, &corners, &act)
        .expect("cyclic shift is a valid action");
    action.check_axioms().expect("action groupoid satisfies the axioms");
    println!(
        "C4 acting on a square: {} arrows, orbits = {:?}",
        action.arrows().len(),
        action.transitivity_components()
    );
}
