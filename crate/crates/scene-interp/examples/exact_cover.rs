//! Exact cover with Algorithm X.
//!
//! Finds every set of rows that covers each universe element exactly
//! once. The interpretation pipeline uses this with one column per
//! detected box and one row per scene-graph node; here the instance is
//! Knuth's classic six-row example.
//!
//! Run with `cargo run --example exact_cover`.

use scene_interp::cover::{brute_force_oracle, solve_all, CoverInstance, CoverRow};

fn main() {
    // universe {0, .., 6}
    let rows = vec![
        CoverRow::new("A", [2, 4, 5]),
        CoverRow::new("B", [0, 3, 6]),
        CoverRow::new("C", [1, 2, 5]),
        CoverRow::new("D", [0, 3]),
        CoverRow::new("E", [1, 6]),
        CoverRow::new("F", [3, 4, 6]),
    ];
    let instance = CoverInstance::new(7, rows).expect("well-formed instance");

    for row in instance.rows() {
        println!("row {}: {:?}", row.key, row.elements);
    }
    println!();

    let solutions = solve_all(&instance);
    println!("{} exact cover(s):", solutions.len());
    for solution in &solutions {
        println!("  {:?}", solution.keys);
    }

    // the brute-force oracle enumerates all 2^rows subsets; it exists to
    // cross-check the search and agrees with it on every instance
    let oracle = brute_force_oracle(&instance).expect("small instance");
    assert_eq!(solutions, oracle);
    println!("oracle agrees");
    println!();

    // overlapping rows are skipped, uncoverable columns prune the branch
    let rows = vec![
        CoverRow::new("left", [0, 1]),
        CoverRow::new("mid", [1, 2]),
        CoverRow::new("right", [2, 3]),
    ];
    let instance = CoverInstance::new(4, rows).expect("well-formed instance");
    let solutions = solve_all(&instance);
    println!("second instance: {} solution(s)", solutions.len());
    for solution in &solutions {
        println!("  {:?}", solution.keys);
    }
}
