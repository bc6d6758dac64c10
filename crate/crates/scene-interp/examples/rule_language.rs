//! Parsing and validating a rule pack.
//!
//! A rule names the composite it produces, binds either a fixed list of
//! variables or a group, and lists constraints: interpretation checks,
//! classification checks (`kindOf`), spatial properties, and `or`
//! blocks.
//!
//! Run with `cargo run --example rule_language`.

use scene_interp::domain::DomainModel;
use scene_interp::rules::{parse_rules, validate_rules, Binder, Constraint, GroupMode};

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/rockart/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture")
}

fn main() {
    let pack = parse_rules(&fixture("rules.rules")).expect("well-formed rules");
    println!("{} rules:", pack.rules.len());
    for rule in &pack.rules {
        let binder = match &rule.binder {
            Binder::Vars(vars) => format!("[{}]", vars.join(", ")),
            Binder::Group {
                var,
                member_interpretation,
                mode,
            } => {
                let mode = match mode {
                    GroupMode::Maximal => "maximal",
                    GroupMode::Subsets => "subsets",
                };
                format!("group({var}: '{member_interpretation}', {mode})")
            }
        };
        println!(
            "  line {:>2}: {} {} with {} constraints",
            rule.line,
            rule.name,
            binder,
            rule.constraints.len()
        );
    }
    println!();

    // a peek inside the first rule's constraint list
    let first = &pack.rules[1];
    println!("constraints of {}:", first.name);
    for constraint in &first.constraints {
        match constraint {
            Constraint::Interp {
                interpretation,
                var,
                ..
            } => {
                println!("  {interpretation}({var})")
            }
            Constraint::KindOf { var, class, .. } => println!("  kindOf({var}, '{class}')"),
            Constraint::Property(p) => {
                let args: Vec<String> = p.args.iter().map(|a| a.to_string()).collect();
                println!("  {}({})", p.prop.name(), args.join(", "))
            }
            Constraint::Any(branches) => println!("  or-block with {} branches", branches.len()),
        }
    }
    println!();

    // cross-check rule references against the domain model
    let domain = DomainModel::parse(&fixture("domain.pl")).expect("domain");
    let diagnostics = validate_rules(&pack, &domain);
    if diagnostics.is_empty() {
        println!("pack validates cleanly against the domain");
    }
    for d in diagnostics {
        println!("warning: {d}");
    }

    // parse errors carry line and column
    let broken = "rule('X', [A]) { Human(A) ";
    match parse_rules(broken) {
        Ok(_) => unreachable!(),
        Err(e) => println!("broken pack: {e}"),
    }
}
