//! Qualitative spatial relations between axis-aligned boxes.
//!
//! Run with `cargo run --example geometry_relations`.

use scene_interp::geometry::{
    group, BoundingBox, DiagonalPos, HorizontalPos, NearMode, VerticalPos,
};

fn main() {
    // y grows downward, as in image coordinates
    let human = BoundingBox::new(0.0, 0.0, 10.0, 20.0);
    let sword = BoundingBox::new(11.0, 0.0, 10.0, 20.0);
    let halo = BoundingBox::new(2.0, -8.0, 6.0, 6.0);
    let bird = BoundingBox::new(30.0, -15.0, 8.0, 8.0);

    println!("human = {human:?}");
    println!("sword = {sword:?}");
    println!();

    // directional relations need the orthogonal extents to meet
    println!(
        "human left of sword:  {}",
        human.horizontal(&sword, Some(HorizontalPos::Left))
    );
    println!(
        "sword left of human:  {}",
        sword.horizontal(&human, Some(HorizontalPos::Left))
    );
    println!(
        "halo above human:     {}",
        halo.vertical(&human, Some(VerticalPos::Up))
    );
    println!(
        "bird NE of human:     {}",
        bird.diagonal(&human, Some(DiagonalPos::Ne))
    );
    // a diagonal relation requires both extents to be disjoint
    println!(
        "sword NE of human:    {}",
        sword.diagonal(&human, Some(DiagonalPos::Ne))
    );
    println!();

    // topology
    let frame = BoundingBox::new(-2.0, -2.0, 16.0, 26.0);
    println!("frame contains human: {}", frame.contains(&human));
    println!("frame overlaps sword: {}", frame.overlaps(&sword));
    println!("human, sword disjoint: {}", human.disjoint(&sword));
    println!();

    // metric relations: absolute pixel distance or a threshold relative
    // to the diagonal of the merged box
    println!("distance human-sword: {}", human.distance(&sword));
    println!(
        "absNear 2.0:          {}",
        human.abs_near(&sword, 2.0).unwrap()
    );
    println!(
        "absNear 0.5:          {}",
        human.abs_near(&sword, 0.5).unwrap()
    );
    println!(
        "relNear 0.5:          {}",
        human.rel_near(&sword, 0.5).unwrap()
    );
    println!();

    // grouping: every box connected to every other through near pairs
    let herd = [
        BoundingBox::new(0.0, 0.0, 10.0, 10.0),
        BoundingBox::new(12.0, 0.0, 10.0, 10.0),
        BoundingBox::new(24.0, 0.0, 10.0, 10.0),
    ];
    println!(
        "herd groups at 3px:   {}",
        group(&herd, 3.0, NearMode::Absolute).unwrap()
    );
    println!(
        "herd groups at 1px:   {}",
        group(&herd, 1.0, NearMode::Absolute).unwrap()
    );
}
