//! Loading a domain model: classification and interpretation taxonomies
//! plus the mapping that links them.
//!
//! Run with `cargo run --example domain_hierarchy`.

use scene_interp::domain::DomainModel;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/rockart/domain.pl");
    let text = std::fs::read_to_string(path).expect("domain fixture");
    let domain = DomainModel::parse(&text).expect("well-formed domain");

    println!(
        "{} subclass facts, {} interpretation facts",
        domain.subclass_facts().len(),
        domain.interpretation_facts().len()
    );
    for warning in &domain.warnings {
        println!("warning: {warning}");
    }
    println!();

    // subclass queries are reflexive and transitive
    let pairs = [
        ("Corniform_Class", "Up_Corn_Class"),
        ("Classification", "Up_Corn_Class"),
        ("Up_Corn_Class", "Up_Corn_Class"),
        ("Weapon_Class", "Up_Corn_Class"),
    ];
    for (ancestor, descendant) in pairs {
        println!(
            "{descendant} is a {ancestor}: {}",
            domain.is_subclass_of(ancestor, descendant)
        );
    }
    println!();

    // one classification can admit several interpretations; ambiguity
    // is resolved later, when readings compete on weight
    for class in ["Corniform_Class", "Human_Class", "Dagger_Class"] {
        println!("{class} -> {:?}", domain.interpretations_of(class));
    }
}
