//! From classifier output to basic scenes.
//!
//! Each detected box carries one or more classifications; each
//! classification maps to one or more interpretations in the domain.
//! Every (box, interpretation) pair becomes a basic scene and the
//! classifier confidence is split evenly across the interpretations of
//! its class.
//!
//! Run with `cargo run --example basic_scenes`.

use scene_interp::domain::DomainModel;
use scene_interp::scene::{serialize_basic_scenes, InputScene};

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/battle/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture")
}

fn main() {
    let domain = DomainModel::parse(&fixture("domain_multi.pl")).expect("domain");
    let scene = InputScene::parse_facts(&fixture("scene_multi.scene")).expect("scene");

    for image in &scene.images {
        let classes: Vec<&str> = image
            .classifications
            .iter()
            .map(|c| c.class_name.as_str())
            .collect();
        println!("image {}: {:?} {:?}", image.id, image.bb, classes);
    }
    println!();

    let basics = serialize_basic_scenes(&scene, &domain).expect("valid scene");
    println!("{} basic scenes:", basics.len());
    for basic in &basics {
        println!(
            "  image {} as {:<8} confidence {:.4}",
            basic.image_id, basic.interpretation, basic.confidence
        );
    }
}
