//! Interpreting a prehistoric rock-art panel.
//!
//! The scene is a wall from the Mount Bego region: a reticulum and a
//! dagger overlap at the top, three corniforms sit below. The rule pack
//! encodes archaeological scene types (a storm god, groups of
//! corniforms, bull gods, ritual scenes) and the pipeline proposes
//! ranked readings of the whole panel.
//!
//! Run with `cargo run --example interpret_rock_art`.

use scene_interp::domain::DomainModel;
use scene_interp::engine::DEFAULT_MAX_NODES;
use scene_interp::pipeline::interpret_scene;
use scene_interp::rules::parse_rules;
use scene_interp::scene::InputScene;

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/rockart/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture")
}

fn main() {
    let domain = DomainModel::parse(&fixture("domain.pl")).expect("domain");
    let pack = parse_rules(&fixture("rules.rules")).expect("rules");
    let scene = InputScene::parse_facts(&fixture("bego.scene")).expect("scene");

    for image in &scene.images {
        println!(
            "image {}: {:?} {}",
            image.id, image.bb, image.classifications[0].class_name
        );
    }
    println!();

    let report = interpret_scene(&scene, &domain, &pack, DEFAULT_MAX_NODES).expect("pipeline");

    println!("composites found:");
    for node in report.graph.composites() {
        println!(
            "  node {:>2}: {:<22} images {:?} confidence {:.2}",
            node.id, node.interpretation, node.cover, node.confidence
        );
    }
    println!();

    println!("filtered readings, strongest first:");
    for interp in report.filtered() {
        println!(
            "  rank {:>2} (weight {:>2}) {}",
            interp.rank,
            interp.weight,
            report.rendering_of(interp)
        );
    }
    println!();

    let top = &report.all[0];
    println!("preferred reading: {}", report.rendering_of(top));
}
