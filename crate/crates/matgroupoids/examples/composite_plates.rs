//! Full composite analysis of the bundled plate fixtures: build both
//! material groupoids, intersect them, and report uniformity, homogeneity,
//! local triviality, stress-free existence and the pointwise symmetry class.

use matgroupoids::body::build_material_groupoid;
use matgroupoids::classifier::analyze_composite;
use matgroupoids::fixtures::composite_fixtures;

fn main() {
    for fx in composite_fixtures() {
        let a = build_material_groupoid(&fx.body_a).expect("constituent A");
        let b = build_material_groupoid(&fx.body_b).expect("constituent B");
        let report = analyze_composite(&a, &b).expect("composite analysis");
        let class = report
            .pointwise_class
            .values()
            .next()
            .map(|c| c.label())
            .unwrap_or("-");
        println!("{}", fx.name);
        println!("  {}", fx.description);
        println!(
            "  uniform = {}, components = {}, stress-free = {}, class at origin = {}",
            report.uniform,
            report.components.len(),
            report.stress_free.label(),
            class
        );
        if let Some((h, v)) = report.locally_trivial {
            println!("  locally trivial: horizontal = {h}, vertical = {v}");
        }
        for w in &report.warnings {
            println!("  warning: {w}");
        }
    }
}
