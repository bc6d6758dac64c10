//! From scene graph to ranked interpretations.
//!
//! Every node of the graph accounts for a subset of the input detections
//! (its cover). An interpretation of the whole scene is a selection of
//! nodes whose covers partition the full detection set, i.e. an exact
//! cover. This module enumerates all of them, ranks them by how much they
//! aggregate, filters the ones derivable from others by expanding a
//! composite into its children, and renders them as nested terms.

use std::collections::{BTreeSet, HashSet};

use crate::cover::{self, CoverError, CoverInstance, CoverRow};
use crate::domain::DomainModel;
use crate::engine::{self, EngineError, NodeId, SceneGraph};
use crate::rules::RuleSet;
use crate::scene::{self, InputScene, SceneError};

/// Errors from any stage of the interpretation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("scene serialization failed: {0}")]
    Scene(#[from] SceneError),
    #[error("rule application failed: {0}")]
    Engine(#[from] EngineError),
    #[error("cover enumeration failed: {0}")]
    Cover(#[from] CoverError),
    #[error("node {0} is not part of the interpretation")]
    ExpandMissing(NodeId),
    #[error("node {0} is a basic scene and cannot be expanded")]
    ExpandBasic(NodeId),
}

/// One exact cover of the detections, with its ranking data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    /// Participating node ids, ascending.
    pub nodes: Vec<NodeId>,
    /// Sum of squared cover sizes; higher means more aggregation.
    pub weight: u64,
    /// 1-based position in the full ranking.
    pub rank: usize,
    /// True if no other interpretation derives this one by expansion.
    pub filtered: bool,
}

/// The complete outcome of interpreting one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpretationReport {
    pub graph: SceneGraph,
    /// Every interpretation in rank order (weight descending, ties by
    /// ascending node-id sequence).
    pub all: Vec<Interpretation>,
    /// Nested-term strings, parallel to `all`.
    pub renderings: Vec<String>,
}

impl InterpretationReport {
    /// The interpretations that survive derivability filtering, rank order.
    pub fn filtered(&self) -> impl Iterator<Item = &Interpretation> {
        self.all.iter().filter(|i| i.filtered)
    }

    pub fn filtered_count(&self) -> usize {
        self.filtered().count()
    }

    pub fn rendering_of(&self, interpretation: &Interpretation) -> &str {
        &self.renderings[interpretation.rank - 1]
    }
}

/// Poses the graph as an exact-cover instance: columns are the detection
/// ids (densely re-indexed, ascending), one row per node keyed by its id.
///
/// Basic scenes of one detection under different readings become distinct
/// rows covering the same column, which is what makes them mutually
/// exclusive in any solution.
pub fn build_cover_instance(graph: &SceneGraph) -> Result<CoverInstance<NodeId>, CoverError> {
    let column_of = |img| graph.image_ids.binary_search(&img).expect("known image id");
    let rows: Vec<CoverRow<NodeId>> = graph
        .nodes
        .iter()
        .map(|n| CoverRow::new(n.id, n.cover.iter().map(|&img| column_of(img))))
        .collect();
    CoverInstance::new(graph.image_ids.len(), rows)
}

/// All exact covers as ascending node-id lists, lexicographically sorted.
pub fn enumerate_interpretations(graph: &SceneGraph) -> Result<Vec<Vec<NodeId>>, CoverError> {
    let instance = build_cover_instance(graph)?;
    Ok(cover::solve_all(&instance)
        .into_iter()
        .map(|s| s.keys)
        .collect())
}

/// Ranking key: the sum of squared cover sizes.
pub fn interpretation_weight(graph: &SceneGraph, nodes: &[NodeId]) -> u64 {
    nodes
        .iter()
        .map(|&id| {
            let size = graph.nodes[id].cover.len() as u64;
            size * size
        })
        .sum()
}

/// Replaces one composite of an interpretation by its direct children.
/// The result is again an exact cover because children partition the
/// parent's cover.
pub fn expand_once(
    graph: &SceneGraph,
    nodes: &[NodeId],
    target: NodeId,
) -> Result<Vec<NodeId>, PipelineError> {
    let pos = nodes
        .iter()
        .position(|&id| id == target)
        .ok_or(PipelineError::ExpandMissing(target))?;
    let node = &graph.nodes[target];
    if node.is_basic() {
        return Err(PipelineError::ExpandBasic(target));
    }
    let mut out: Vec<NodeId> = Vec::with_capacity(nodes.len() - 1 + node.children.len());
    out.extend_from_slice(&nodes[..pos]);
    out.extend_from_slice(&nodes[pos + 1..]);
    out.extend_from_slice(&node.children);
    out.sort_unstable();
    Ok(out)
}

/// Every interpretation properly derivable from `start` by repeatedly
/// expanding composites.
pub fn expansion_closure(graph: &SceneGraph, start: &[NodeId]) -> BTreeSet<Vec<NodeId>> {
    let mut closure: BTreeSet<Vec<NodeId>> = BTreeSet::new();
    let mut stack = direct_expansions(graph, start);
    while let Some(s) = stack.pop() {
        if closure.contains(&s) {
            continue;
        }
        stack.extend(direct_expansions(graph, &s));
        closure.insert(s);
    }
    closure
}

fn direct_expansions(graph: &SceneGraph, nodes: &[NodeId]) -> Vec<Vec<NodeId>> {
    nodes
        .iter()
        .filter(|&&id| !graph.nodes[id].is_basic())
        .map(|&id| expand_once(graph, nodes, id).expect("composite member"))
        .collect()
}

/// Marks the maximal interpretations: `kept[i]` is false exactly when
/// `all[i]` is derivable from some other interpretation by expansion.
/// Work is shared across starting points, so each node set is expanded
/// at most once.
pub fn filter_derivable(graph: &SceneGraph, all: &[Vec<NodeId>]) -> Vec<bool> {
    let mut derived: HashSet<Vec<NodeId>> = HashSet::new();
    for start in all {
        let mut stack = direct_expansions(graph, start);
        while let Some(s) = stack.pop() {
            if derived.contains(&s) {
                continue;
            }
            stack.extend(direct_expansions(graph, &s));
            derived.insert(s);
        }
    }
    all.iter().map(|nodes| !derived.contains(nodes)).collect()
}

/// Renders an interpretation as a bracketed list of nested terms: basic
/// nodes as `Interp-<detectionId>`, composites as `Interp(child, ...)`.
/// Siblings are ordered by their first covered detection.
pub fn render_interpretation(graph: &SceneGraph, nodes: &[NodeId]) -> String {
    let parts: Vec<String> = order_by_cover(graph, nodes)
        .iter()
        .map(|&id| render_node(graph, id))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn render_node(graph: &SceneGraph, id: NodeId) -> String {
    let node = &graph.nodes[id];
    match node.children.len() {
        0 => format!(
            "{}-{}",
            node.interpretation,
            node.cover.iter().next().expect("non-empty cover")
        ),
        _ => {
            let kids: Vec<String> = order_by_cover(graph, &node.children)
                .iter()
                .map(|&c| render_node(graph, c))
                .collect();
            format!("{}({})", node.interpretation, kids.join(", "))
        }
    }
}

fn order_by_cover(graph: &SceneGraph, nodes: &[NodeId]) -> Vec<NodeId> {
    let mut out = nodes.to_vec();
    out.sort_by_key(|&id| (*graph.nodes[id].cover.iter().next().unwrap(), id));
    out
}

/// Runs the full pipeline: basic scenes, fixpoint rule application, exact
/// cover enumeration, ranking, filtering, rendering.
pub fn interpret_scene(
    input: &InputScene,
    domain: &DomainModel,
    rules: &RuleSet,
    max_nodes: usize,
) -> Result<InterpretationReport, PipelineError> {
    let basics = scene::serialize_basic_scenes(input, domain)?;
    let mut graph = engine::init_graph(&basics);
    engine::apply_rules_to_fixpoint(&mut graph, rules, domain, max_nodes)?;

    let sets = enumerate_interpretations(&graph)?;
    let kept = filter_derivable(&graph, &sets);
    let weights: Vec<u64> = sets
        .iter()
        .map(|s| interpretation_weight(&graph, s))
        .collect();

    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by(|&a, &b| {
        weights[b]
            .cmp(&weights[a])
            .then_with(|| sets[a].cmp(&sets[b]))
    });

    let all: Vec<Interpretation> = order
        .iter()
        .enumerate()
        .map(|(i, &j)| Interpretation {
            nodes: sets[j].clone(),
            weight: weights[j],
            rank: i + 1,
            filtered: kept[j],
        })
        .collect();
    let renderings = all
        .iter()
        .map(|i| render_interpretation(&graph, &i.nodes))
        .collect();
    Ok(InterpretationReport {
        graph,
        all,
        renderings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain;
    use crate::rules;

    const BATTLE_DOMAIN: &str = include_str!("../fixtures/battle/domain.pl");
    const BATTLE_RULES: &str = include_str!("../fixtures/battle/rules.rules");
    const SCENE_1: &str = include_str!("../fixtures/battle/scene1.scene");
    const SCENE_2: &str = include_str!("../fixtures/battle/scene2.scene");
    const SCENE_3: &str = include_str!("../fixtures/battle/scene3.scene");

    fn battle_report(scene_text: &str) -> InterpretationReport {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let scn = InputScene::parse_facts(scene_text).unwrap();
        let pack = rules::parse_rules(BATTLE_RULES).unwrap();
        interpret_scene(&scn, &dom, &pack, engine::DEFAULT_MAX_NODES).unwrap()
    }

    #[test]
    fn cover_instance_has_one_row_per_node() {
        let report = battle_report(SCENE_1);
        let instance = build_cover_instance(&report.graph).unwrap();
        assert_eq!(instance.universe(), 2);
        let rows: Vec<(NodeId, Vec<usize>)> = instance
            .rows()
            .iter()
            .map(|r| (r.key, r.elements.iter().copied().collect()))
            .collect();
        assert_eq!(
            rows,
            [
                (0, vec![0]),
                (1, vec![1]),
                (2, vec![1]),
                (3, vec![0, 1]),
                (4, vec![0, 1]),
            ]
        );
    }

    #[test]
    fn ambiguous_weapon_scene_counts() {
        let report = battle_report(SCENE_1);
        assert_eq!(report.all.len(), 4);
        assert_eq!(report.filtered_count(), 2);
        let filtered: Vec<&str> = report.filtered().map(|i| report.rendering_of(i)).collect();
        assert_eq!(
            filtered,
            ["[Warrior(Human-0, Sword-1)]", "[Warrior(Human-0, Axe-1)]"]
        );
    }

    #[test]
    fn ranking_is_weight_then_node_sequence() {
        let report = battle_report(SCENE_1);
        let summary: Vec<(usize, u64, Vec<NodeId>, bool)> = report
            .all
            .iter()
            .map(|i| (i.rank, i.weight, i.nodes.clone(), i.filtered))
            .collect();
        assert_eq!(
            summary,
            [
                (1, 4, vec![3], true),
                (2, 4, vec![4], true),
                (3, 2, vec![0, 1], false),
                (4, 2, vec![0, 2], false),
            ]
        );
    }

    #[test]
    fn worked_weights_are_eight_and_four() {
        let report = battle_report(SCENE_3);
        // I1 = the two warriors, I2 = the four basic scenes.
        let warriors = vec![4, 5];
        let basics = vec![0, 1, 2, 3];
        assert_eq!(interpretation_weight(&report.graph, &warriors), 8);
        assert_eq!(interpretation_weight(&report.graph, &basics), 4);
    }

    #[test]
    fn two_warrior_scene_full_ranking() {
        let report = battle_report(SCENE_3);
        let summary: Vec<(u64, Vec<NodeId>, bool)> = report
            .all
            .iter()
            .map(|i| (i.weight, i.nodes.clone(), i.filtered))
            .collect();
        assert_eq!(
            summary,
            [
                (16, vec![6], true),
                (8, vec![4, 5], false),
                (6, vec![0, 1, 5], false),
                (6, vec![2, 3, 4], false),
                (4, vec![0, 1, 2, 3], false),
            ]
        );
        assert_eq!(
            report.renderings[0],
            "[Battle(Warrior(Human-0, Sword-1), Warrior(Sword-2, Human-3))]"
        );
    }

    #[test]
    fn expansion_steps_and_errors() {
        let report = battle_report(SCENE_3);
        let g = &report.graph;
        assert_eq!(expand_once(g, &[6], 6).unwrap(), vec![4, 5]);
        assert_eq!(expand_once(g, &[4, 5], 4).unwrap(), vec![0, 1, 5]);
        assert!(matches!(
            expand_once(g, &[4, 5], 6),
            Err(PipelineError::ExpandMissing(6))
        ));
        assert!(matches!(
            expand_once(g, &[0, 1, 5], 0),
            Err(PipelineError::ExpandBasic(0))
        ));
    }

    #[test]
    fn closure_reaches_every_derived_cover() {
        let report = battle_report(SCENE_3);
        let closure = expansion_closure(&report.graph, &[6]);
        let expected: BTreeSet<Vec<NodeId>> =
            [vec![4, 5], vec![0, 1, 5], vec![2, 3, 4], vec![0, 1, 2, 3]]
                .into_iter()
                .collect();
        assert_eq!(closure, expected);
    }

    #[test]
    fn four_warrior_scene_matches_published_counts() {
        let report = battle_report(SCENE_2);
        assert_eq!(report.all.len(), 29);
        assert_eq!(report.filtered_count(), 2);
        let filtered: Vec<Vec<NodeId>> = report.filtered().map(|i| i.nodes.clone()).collect();
        assert_eq!(filtered, [vec![12, 14], vec![8, 11, 13]]);
        assert_eq!(report.all[0].nodes, vec![12, 14]);
        assert_eq!(report.all[0].weight, 32);
    }

    const ROCKART_DOMAIN: &str = include_str!("../fixtures/rockart/domain.pl");
    const ROCKART_RULES: &str = include_str!("../fixtures/rockart/rules.rules");

    fn rockart_report(scene_text: &str) -> InterpretationReport {
        let dom = domain::DomainModel::parse(ROCKART_DOMAIN).unwrap();
        let scn = InputScene::parse_facts(scene_text).unwrap();
        let pack = rules::parse_rules(ROCKART_RULES).unwrap();
        interpret_scene(&scn, &dom, &pack, crate::engine::DEFAULT_MAX_NODES).unwrap()
    }

    #[test]
    fn bego_wall_full_enumeration() {
        let report = rockart_report(include_str!("../fixtures/rockart/bego.scene"));
        assert_eq!(report.all.len(), 14);
        assert_eq!(report.filtered_count(), 6);
        // The published reading: the storm god above a pastoral group.
        assert_eq!(
            report.renderings[0],
            "[Storm_God(Reticulum-0, Dagger-1), \
             Group_Of_Corniforms(Corniform-2, Corniform-3, Corniform-4)]"
        );
        assert_eq!(report.all[0].weight, 13);
        assert!(report.all[0].filtered);
        // The bull-god alternative is filtered too, at weight 9.
        let alt = "[Storm_God(Reticulum-0, Dagger-1), \
                   Bull_God(Corniform-2, Corniform-3), Corniform-4]";
        let pos = report
            .renderings
            .iter()
            .position(|r| r == alt)
            .expect("alternative reading present");
        assert_eq!(report.all[pos].weight, 9);
        assert!(report.all[pos].filtered);
    }

    #[test]
    fn nested_composite_renders_recursively() {
        let report = rockart_report(include_str!("../fixtures/rockart/ritual_sacrifice.scene"));
        assert_eq!(
            report.renderings[0],
            "[Ritual_Sacrifice(Halberd-0, Group_Of_Corniforms(Corniform-1, Corniform-2))]"
        );
    }

    #[test]
    fn scenario_fixtures_produce_published_readings() {
        let cases = [
            (
                include_str!("../fixtures/rockart/rain_summon_vertical.scene"),
                "[Rain_Summon(Human-0, Halberd-1)]",
            ),
            (
                include_str!("../fixtures/rockart/rain_summon_diagonal.scene"),
                "[Rain_Summon(Human-0, Axe-1)]",
            ),
            (
                include_str!("../fixtures/rockart/queens_fight.scene"),
                "[Queens_Fight(Corniform-0, Corniform-1)]",
            ),
            (
                include_str!("../fixtures/rockart/agricultural_rite.scene"),
                "[Agricultural_Rite(Priest-0, Priest-1, Repository-2, Water-3)]",
            ),
        ];
        for (scene_text, expected) in cases {
            let report = rockart_report(scene_text);
            assert!(
                report
                    .filtered()
                    .any(|i| report.rendering_of(i) == expected),
                "missing reading {expected}"
            );
        }
    }

    #[test]
    fn failing_scenarios_never_form_the_aggregate() {
        let cases = [
            (
                include_str!("../fixtures/rockart/ritual_sacrifice_fail.scene"),
                "Ritual_Sacrifice",
            ),
            (
                include_str!("../fixtures/rockart/bull_god_birth_fail.scene"),
                "HG_Giving_Birth_BG",
            ),
            (
                include_str!("../fixtures/rockart/storm_god_fail.scene"),
                "Storm_God",
            ),
            (
                include_str!("../fixtures/rockart/agricultural_rite_fail.scene"),
                "Agricultural_Rite",
            ),
        ];
        for (scene_text, aggregate) in cases {
            let report = rockart_report(scene_text);
            assert!(
                report
                    .graph
                    .nodes
                    .iter()
                    .all(|n| n.interpretation != aggregate),
                "{aggregate} should not form"
            );
            assert!(
                report.renderings.iter().all(|r| !r.contains(aggregate)),
                "{aggregate} should not be rendered"
            );
        }
    }

    #[test]
    fn sacrifice_fail_still_finds_the_group() {
        // The failed reading still reports the pastoral group on its own.
        let report = rockart_report(include_str!(
            "../fixtures/rockart/ritual_sacrifice_fail.scene"
        ));
        assert_eq!(
            report.renderings[0],
            "[Halberd-0, Group_Of_Corniforms(Corniform-1, Corniform-2)]"
        );
    }

    #[test]
    fn all_basic_interpretation_renders_flat() {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let scn =
            InputScene::parse_facts("image(7, bb(0, 0, 5, 5), [class('Human_Class', 1.0)]).\n")
                .unwrap();
        let pack = rules::parse_rules(BATTLE_RULES).unwrap();
        let report = interpret_scene(&scn, &dom, &pack, 100).unwrap();
        assert_eq!(report.all.len(), 1);
        assert_eq!(report.all[0].weight, 1);
        assert!(report.all[0].filtered);
        assert_eq!(report.renderings, ["[Human-7]"]);
    }
}
