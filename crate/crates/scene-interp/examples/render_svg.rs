//! Rendering scenes and interpretations as SVG.
//!
//! Two drawings of the same rock-art panel: the raw detections, and the
//! top-ranked reading with composites overlaid as dashed boxes.
//!
//! Run with `cargo run --example render_svg`.

use scene_interp::domain::DomainModel;
use scene_interp::engine::DEFAULT_MAX_NODES;
use scene_interp::pipeline::interpret_scene;
use scene_interp::render::{render_interpretation_svg, render_scene_svg};
use scene_interp::report::ReportDoc;
use scene_interp::rules::parse_rules;
use scene_interp::scene::InputScene;

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/rockart/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture")
}

fn main() {
    let scene = InputScene::parse_facts(&fixture("bego.scene")).expect("scene");
    let scene_svg = render_scene_svg(&scene);

    let domain = DomainModel::parse(&fixture("domain.pl")).expect("domain");
    let pack = parse_rules(&fixture("rules.rules")).expect("rules");
    let report = interpret_scene(&scene, &domain, &pack, DEFAULT_MAX_NODES).expect("pipeline");

    // the report document is the JSON the CLI emits; its entries carry
    // everything the renderer needs
    let doc = ReportDoc::from_report(&report);
    let top = &doc.interpretations[0];
    let reading_svg = render_interpretation_svg(top);

    let dir = std::env::temp_dir();
    let scene_path = dir.join("bego_scene.svg");
    let reading_path = dir.join("bego_top_reading.svg");
    std::fs::write(&scene_path, &scene_svg).expect("write svg");
    std::fs::write(&reading_path, &reading_svg).expect("write svg");

    println!("scene drawing:   {}", scene_path.display());
    println!("  {} solid boxes", scene_svg.matches("<rect").count());
    println!("top reading:     {}", reading_path.display());
    println!(
        "  {} boxes, {} dashed composites",
        reading_svg.matches("<rect").count(),
        reading_svg.matches("stroke-dasharray").count()
    );
    println!("reading text:    {}", top.text);
}
