//! The body description file format: emit a bundled fixture as JSON, parse
//! it back byte-identically, and render the three-panel composite diagram
//! as SVG.

use matgroupoids::body::build_material_groupoid;
use matgroupoids::classifier::analyze_composite;
use matgroupoids::fixtures::composite_fixture;
use matgroupoids::report::{emit_body, parse_body, render_composite_svg};

fn main() {
    let fx = composite_fixture("isotropy_loss").expect("bundled fixture");

    let json = emit_body(&fx.body_a).expect("serializable body");
    println!("constituent A as a body file ({} bytes):", json.len());
    for line in json.lines().take(16) {
        println!("  {line}");
    }
    println!("  ...");

    // the format round-trips byte-for-byte
    let parsed = parse_body(&json).expect("valid body file");
    assert_eq!(emit_body(&parsed).unwrap(), json);
    println!("round trip: byte-identical");

    let a = build_material_groupoid(&fx.body_a).expect("constituent A");
    let b = build_material_groupoid(&fx.body_b).expect("constituent B");
    let report = analyze_composite(&a, &b).expect("composite analysis");
    let svg = render_composite_svg(&fx.body_a, &fx.body_b, &report);
    let path = std::env::temp_dir().join("isotropy_loss.svg");
    std::fs::write(&path, &svg).expect("writable temp dir");
    println!("wrote {} ({} bytes of SVG)", path.display(), svg.len());
}
