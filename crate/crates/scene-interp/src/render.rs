//! SVG rendering of scenes and interpretations.
//!
//! Two figure styles: the raw scene (solid boxes labeled with their
//! classifications) and an interpretation overlay (solid boxes for basic
//! scenes labeled `Interpretation-id`, dashed hull boxes for composites).
//! Output is deterministic: identical inputs give identical bytes.

use std::fmt::Write;

use crate::report::ReportInterpretation;
use crate::scene::{Bb, InputScene};

const MARGIN: f64 = 18.0;

/// Draws every detection box with its classification labels.
pub fn render_scene_svg(scene: &InputScene) -> String {
    let boxes: Vec<Bb> = scene.images.iter().map(|img| img.bb).collect();
    let mut svg = svg_open(&boxes);
    for img in &scene.images {
        let classes: Vec<&str> = img
            .classifications
            .iter()
            .map(|c| c.class_name.as_str())
            .collect();
        push_rect(&mut svg, &img.bb, false);
        push_label(&mut svg, &img.bb, &classes.join("/"));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Draws one interpretation: solid boxes for basic scenes, dashed hulls
/// for every composite in the entry's node closure.
pub fn render_interpretation_svg(entry: &ReportInterpretation) -> String {
    let boxes: Vec<Bb> = entry.nodes.iter().map(|n| n.bb).collect();
    let mut svg = svg_open(&boxes);
    for node in &entry.nodes {
        let composite = !node.children.is_empty();
        push_rect(&mut svg, &node.bb, composite);
        let label = if composite {
            node.interpretation.clone()
        } else {
            format!("{}-{}", node.interpretation, node.cover[0])
        };
        push_label(&mut svg, &node.bb, &label);
    }
    svg.push_str("</svg>\n");
    svg
}

fn svg_open(boxes: &[Bb]) -> String {
    let min_x = boxes.iter().map(|b| b.x).fold(0.0, f64::min) - MARGIN;
    let min_y = boxes.iter().map(|b| b.y).fold(0.0, f64::min) - MARGIN;
    let max_x = boxes.iter().map(|b| b.x + b.w).fold(0.0, f64::max) + MARGIN;
    let max_y = boxes.iter().map(|b| b.y + b.h).fold(0.0, f64::max) + MARGIN;
    let (w, h) = (max_x - min_x, max_y - min_y);
    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{min_x} {min_y} {w} {h}\" \
         width=\"{w}\" height=\"{h}\">"
    )
    .unwrap();
    svg.push_str("  <style>text { font: 12px monospace; fill: #24292f; }</style>\n");
    svg
}

fn push_rect(svg: &mut String, bb: &Bb, dashed: bool) {
    let style = if dashed {
        " stroke=\"#bc4c00\" stroke-dasharray=\"6 4\""
    } else {
        " stroke=\"#0969da\""
    };
    writeln!(
        svg,
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke-width=\"2\"{style}/>",
        bb.x, bb.y, bb.w, bb.h
    )
    .unwrap();
}

fn push_label(svg: &mut String, bb: &Bb, text: &str) {
    writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\">{}</text>",
        bb.x,
        bb.y - 4.0,
        escape(text)
    )
    .unwrap();
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainModel;
    use crate::engine::DEFAULT_MAX_NODES;
    use crate::pipeline::interpret_scene;
    use crate::report::ReportDoc;
    use crate::rules::parse_rules;
    use crate::scene::InputScene;

    fn bego_doc() -> ReportDoc {
        let dom = DomainModel::parse(include_str!("../fixtures/rockart/domain.pl")).unwrap();
        let scn = InputScene::parse_facts(include_str!("../fixtures/rockart/bego.scene")).unwrap();
        let pack = parse_rules(include_str!("../fixtures/rockart/rules.rules")).unwrap();
        let report = interpret_scene(&scn, &dom, &pack, DEFAULT_MAX_NODES).unwrap();
        ReportDoc::from_report(&report)
    }

    #[test]
    fn top_reading_shows_five_solid_two_dashed() {
        let doc = bego_doc();
        let svg = render_interpretation_svg(&doc.interpretations[0]);
        let solid = svg.matches("stroke=\"#0969da\"").count();
        let dashed = svg.matches("stroke-dasharray").count();
        assert_eq!(solid, 5);
        assert_eq!(dashed, 2);
        assert!(svg.contains(">Reticulum-0<"));
        assert!(svg.contains(">Dagger-1<"));
        assert!(svg.contains(">Corniform-4<"));
        assert!(svg.contains(">Storm_God<"));
        assert!(svg.contains(">Group_Of_Corniforms<"));
    }

    #[test]
    fn scene_only_render_labels_classifications() {
        let scn = InputScene::parse_facts(include_str!("../fixtures/rockart/bego.scene")).unwrap();
        let svg = render_scene_svg(&scn);
        assert_eq!(svg.matches("<rect").count(), 5);
        assert_eq!(svg.matches("stroke-dasharray").count(), 0);
        assert!(svg.contains(">Reticulum_Class<"));
        // Ambiguous detections list every classification.
        let multi = InputScene::parse_facts(
            "image(0, bb(0, 0, 5, 5), [class('A_Class', 1.0), class('B_Class', 0.5)]).\n",
        )
        .unwrap();
        let svg = render_scene_svg(&multi);
        assert!(svg.contains(">A_Class/B_Class<"));
    }

    #[test]
    fn output_is_deterministic() {
        let doc = bego_doc();
        let a = render_interpretation_svg(&doc.interpretations[0]);
        let b = render_interpretation_svg(&doc.interpretations[0]);
        assert_eq!(a, b);
        assert!(a.ends_with("</svg>\n"));
    }

    #[test]
    fn labels_are_xml_escaped() {
        let scn =
            InputScene::parse_facts("image(0, bb(0, 0, 5, 5), [class('A&B<C_Class', 1.0)]).\n")
                .unwrap();
        let svg = render_scene_svg(&scn);
        assert!(svg.contains(">A&amp;B&lt;C_Class<"));
    }
}
