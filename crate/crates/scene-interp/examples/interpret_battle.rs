//! The full pipeline on a small battle scene.
//!
//! Four humans each stand next to a weapon; adjacent warrior pairs are
//! close enough to fight. The pipeline grows the scene graph to its
//! fixpoint, enumerates every exact cover of the four images, ranks the
//! covers by weight, and filters out readings that a stronger reading
//! already explains.
//!
//! Run with `cargo run --example interpret_battle`.

use scene_interp::domain::DomainModel;
use scene_interp::engine::DEFAULT_MAX_NODES;
use scene_interp::pipeline::interpret_scene;
use scene_interp::rules::parse_rules;
use scene_interp::scene::InputScene;

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/battle/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture")
}

fn main() {
    let domain = DomainModel::parse(&fixture("domain.pl")).expect("domain");
    let pack = parse_rules(&fixture("rules.rules")).expect("rules");
    let scene = InputScene::parse_facts(&fixture("scene2.scene")).expect("scene");

    let report = interpret_scene(&scene, &domain, &pack, DEFAULT_MAX_NODES).expect("pipeline");

    println!(
        "scene graph: {} nodes ({} basic, {} composite)",
        report.graph.nodes.len(),
        report.graph.basic_count,
        report.graph.nodes.len() - report.graph.basic_count
    );
    for node in report.graph.composites() {
        println!(
            "  node {:>2}: {} over images {:?}",
            node.id, node.interpretation, node.cover
        );
    }
    println!();

    println!(
        "all: {}, filtered: {}",
        report.all.len(),
        report.filtered_count()
    );
    for interp in &report.all {
        let mark = if interp.filtered { " *" } else { "" };
        println!(
            "{:>2}. (weight {:>2}) {}{}",
            interp.rank,
            interp.weight,
            report.rendering_of(interp),
            mark
        );
    }
    println!();
    println!("* = survives the derivability filter");
}
