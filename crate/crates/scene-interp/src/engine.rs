//! Scene graph construction by fixpoint rule application.
//!
//! The graph starts from basic scenes (one node per classification reading)
//! and grows composite nodes bottom-up: every rule is matched against the
//! current graph, each new match becomes a node, and the process repeats
//! until an iteration adds nothing. Matching within an iteration only sees
//! the nodes that existed when the iteration began, so node ids do not
//! depend on the order in which matches are discovered mid-iteration.
//!
//! Determinism: rules are tried in file order and the matches of one rule
//! are sorted lexicographically by their sorted child-id lists before ids
//! are assigned. Running the engine twice on the same input produces
//! identical graphs.

use std::collections::{BTreeSet, HashSet};

use crate::domain::DomainModel;
use crate::geometry::{
    self, BoundingBox, DiagonalPos, GeometryError, HorizontalPos, NearMode, VerticalPos,
};
use crate::rules::{Arg, Binder, Constraint, GroupMode, Prop, PropertyCall, Rule, RuleSet};
use crate::scene::{BasicScene, ImageId};

/// Default ceiling on the number of nodes a run may create.
pub const DEFAULT_MAX_NODES: usize = 10_000;

/// Ceiling on group members when a rule enumerates subsets.
const MAX_SUBSET_MEMBERS: usize = 20;

/// Node index within a [`SceneGraph`].
pub type NodeId = usize;

/// Errors raised while growing a scene graph.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    /// The node budget was exhausted; names the rule whose match tipped it.
    #[error("node limit of {limit} exceeded while applying rule '{rule}'")]
    NodeLimit { rule: String, limit: usize },
    /// A group property was evaluated inside a plain variable-list rule.
    #[error("rule '{rule}': property '{property}' needs a group variable, but the rule binds plain variables")]
    GroupPropertyInScalarRule { rule: String, property: String },
    /// Too many candidate members for subset enumeration.
    #[error("rule '{rule}': {count} candidate members for subset enumeration exceeds the limit of {limit}")]
    TooManyGroupMembers {
        rule: String,
        count: usize,
        limit: usize,
    },
    /// A threshold failed geometric validation at evaluation time.
    #[error("rule '{rule}': {source}")]
    Threshold {
        rule: String,
        #[source]
        source: GeometryError,
    },
    /// A structural invariant failed after the fixpoint was reached.
    #[error("scene graph invariant violated: {0}")]
    Invariant(String),
}

/// One node of the scene graph: a basic scene or a rule-derived composite.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneNode {
    pub id: NodeId,
    /// Interpretation name, e.g. `"Human"` or `"Battle"`.
    pub interpretation: String,
    /// Hull of all covered detections.
    pub bb: BoundingBox,
    /// Originating classification; `Some` exactly for basic nodes.
    pub class_name: Option<String>,
    pub confidence: f64,
    /// Ids of the detections this node accounts for.
    pub cover: BTreeSet<ImageId>,
    /// Direct children, ascending; empty exactly for basic nodes.
    pub children: Vec<NodeId>,
}

impl SceneNode {
    pub fn is_basic(&self) -> bool {
        self.children.is_empty()
    }
}

/// The full scene graph plus bookkeeping about its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    pub nodes: Vec<SceneNode>,
    /// Distinct detection ids, ascending.
    pub image_ids: Vec<ImageId>,
    /// Number of leading basic nodes.
    pub basic_count: usize,
}

impl SceneGraph {
    pub fn node(&self, id: NodeId) -> &SceneNode {
        &self.nodes[id]
    }

    /// Nodes derived by rules, i.e. everything past the basic prefix.
    pub fn composites(&self) -> &[SceneNode] {
        &self.nodes[self.basic_count..]
    }
}

/// Builds the initial graph: one node per basic scene, in input order.
pub fn init_graph(basics: &[BasicScene]) -> SceneGraph {
    let nodes: Vec<SceneNode> = basics
        .iter()
        .enumerate()
        .map(|(id, b)| SceneNode {
            id,
            interpretation: b.interpretation.clone(),
            bb: b.bb,
            class_name: Some(b.class_name.clone()),
            confidence: b.confidence,
            cover: BTreeSet::from([b.image_id]),
            children: Vec::new(),
        })
        .collect();
    let image_ids: BTreeSet<ImageId> = basics.iter().map(|b| b.image_id).collect();
    SceneGraph {
        basic_count: nodes.len(),
        nodes,
        image_ids: image_ids.into_iter().collect(),
    }
}

/// Matches one rule against the whole graph. Each match is the sorted list
/// of child ids for a prospective composite; the result is deduplicated and
/// sorted lexicographically.
pub fn match_rule(
    graph: &SceneGraph,
    rule: &Rule,
    domain: &DomainModel,
) -> Result<Vec<Vec<NodeId>>, EngineError> {
    match_rule_limited(graph, rule, domain, graph.nodes.len())
}

/// As [`match_rule`], but only nodes with id below `limit` participate.
fn match_rule_limited(
    graph: &SceneGraph,
    rule: &Rule,
    domain: &DomainModel,
    limit: usize,
) -> Result<Vec<Vec<NodeId>>, EngineError> {
    let mut matches = match &rule.binder {
        Binder::Vars(vars) => {
            reject_group_props(rule)?;
            match_var_list(graph, rule, vars, domain, limit)?
        }
        Binder::Group {
            var,
            member_interpretation,
            mode,
        } => match_group(graph, rule, var, member_interpretation, *mode, limit)?,
    };
    matches.sort();
    matches.dedup();
    Ok(matches)
}

/// Plain variable-list rules must not use group-only properties.
fn reject_group_props(rule: &Rule) -> Result<(), EngineError> {
    fn scan(rule: &Rule, c: &Constraint) -> Result<(), EngineError> {
        match c {
            Constraint::Property(p) => {
                let group_only =
                    p.prop.is_group_prop() || (p.prop == Prop::Vertical && p.args.len() == 1);
                if group_only {
                    return Err(EngineError::GroupPropertyInScalarRule {
                        rule: rule.name.clone(),
                        property: p.prop.name().to_string(),
                    });
                }
                Ok(())
            }
            Constraint::Any(branches) => branches.iter().try_for_each(|b| scan(rule, b)),
            _ => Ok(()),
        }
    }
    rule.constraints.iter().try_for_each(|c| scan(rule, c))
}

/// Backtracking search over node assignments for `rule('N', [X, Y, ...])`.
///
/// Variables are bound in declaration order to nodes in ascending id order.
/// A constraint is checked as soon as its last variable is bound; bound
/// nodes must be pairwise distinct with pairwise disjoint covers.
fn match_var_list(
    graph: &SceneGraph,
    rule: &Rule,
    vars: &[String],
    domain: &DomainModel,
    limit: usize,
) -> Result<Vec<Vec<NodeId>>, EngineError> {
    let var_index = |name: &str| vars.iter().position(|v| v == name).expect("declared var");

    // For each constraint, the binder index after which it becomes checkable.
    let ready_at: Vec<usize> = rule
        .constraints
        .iter()
        .map(|c| {
            constraint_vars(c)
                .iter()
                .map(|v| var_index(v))
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut binding: Vec<NodeId> = Vec::with_capacity(vars.len());
    let mut used_images: BTreeSet<ImageId> = BTreeSet::new();
    let mut out = Vec::new();
    search_assignments(
        graph,
        rule,
        vars,
        domain,
        limit,
        &ready_at,
        &mut binding,
        &mut used_images,
        &mut out,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search_assignments(
    graph: &SceneGraph,
    rule: &Rule,
    vars: &[String],
    domain: &DomainModel,
    limit: usize,
    ready_at: &[usize],
    binding: &mut Vec<NodeId>,
    used_images: &mut BTreeSet<ImageId>,
    out: &mut Vec<Vec<NodeId>>,
) -> Result<(), EngineError> {
    if binding.len() == vars.len() {
        let mut children: Vec<NodeId> = binding.clone();
        children.sort_unstable();
        out.push(children);
        return Ok(());
    }
    let depth = binding.len();
    'candidates: for id in 0..limit {
        if binding.contains(&id) {
            continue;
        }
        let node = &graph.nodes[id];
        if !node.cover.is_disjoint(used_images) {
            continue;
        }
        binding.push(id);
        for (ci, c) in rule.constraints.iter().enumerate() {
            if ready_at[ci] == depth {
                let holds = eval_constraint(graph, rule, c, vars, binding, domain)?;
                if !holds {
                    binding.pop();
                    continue 'candidates;
                }
            }
        }
        let added: Vec<ImageId> = node.cover.iter().copied().collect();
        used_images.extend(added.iter().copied());
        search_assignments(
            graph,
            rule,
            vars,
            domain,
            limit,
            ready_at,
            binding,
            used_images,
            out,
        )?;
        for img in &added {
            used_images.remove(img);
        }
        binding.pop();
    }
    Ok(())
}

/// All variable names mentioned anywhere in a constraint.
fn constraint_vars(c: &Constraint) -> Vec<&str> {
    fn collect<'a>(c: &'a Constraint, acc: &mut Vec<&'a str>) {
        match c {
            Constraint::Interp { var, .. } | Constraint::KindOf { var, .. } => acc.push(var),
            Constraint::Property(p) => {
                for a in &p.args {
                    if let Arg::Var(v) = a {
                        acc.push(v);
                    }
                }
            }
            Constraint::Any(branches) => branches.iter().for_each(|b| collect(b, acc)),
        }
    }
    let mut acc = Vec::new();
    collect(c, &mut acc);
    acc
}

/// Matches a group rule: either maximal proximity components or all subsets.
fn match_group(
    graph: &SceneGraph,
    rule: &Rule,
    var: &str,
    member_interpretation: &str,
    mode: GroupMode,
    limit: usize,
) -> Result<Vec<Vec<NodeId>>, EngineError> {
    let members: Vec<NodeId> = (0..limit)
        .filter(|&id| graph.nodes[id].interpretation == member_interpretation)
        .collect();
    if members.len() < 2 {
        return Ok(Vec::new());
    }

    let candidates: Vec<Vec<NodeId>> = match mode {
        GroupMode::Maximal => {
            let (threshold, near_mode) = group_predicate(rule, var)
                .expect("parser guarantees a group predicate in maximal mode");
            proximity_components(graph, &members, threshold, near_mode)
                .into_iter()
                .filter(|c| c.len() >= 2)
                .collect()
        }
        GroupMode::Subsets => {
            if members.len() > MAX_SUBSET_MEMBERS {
                return Err(EngineError::TooManyGroupMembers {
                    rule: rule.name.clone(),
                    count: members.len(),
                    limit: MAX_SUBSET_MEMBERS,
                });
            }
            let mut subsets = Vec::new();
            for mask in 1u32..(1 << members.len()) {
                if mask.count_ones() >= 2 {
                    subsets.push(
                        members
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask & (1 << i) != 0)
                            .map(|(_, &id)| id)
                            .collect(),
                    );
                }
            }
            subsets
        }
    };

    let mut out = Vec::new();
    for group in candidates {
        if !covers_disjoint(graph, &group) {
            continue;
        }
        let mut all_hold = true;
        for c in &rule.constraints {
            if !eval_group_constraint(graph, rule, c, &group)? {
                all_hold = false;
                break;
            }
        }
        if all_hold {
            out.push(group);
        }
    }
    Ok(out)
}

/// First `absGroup`/`relGroup` call on the group variable, as (threshold, mode).
fn group_predicate(rule: &Rule, var: &str) -> Option<(f64, NearMode)> {
    fn scan(c: &Constraint, var: &str) -> Option<(f64, NearMode)> {
        match c {
            Constraint::Property(p) => {
                let mode = match p.prop {
                    Prop::AbsGroup => NearMode::Absolute,
                    Prop::RelGroup => NearMode::Relative,
                    _ => return None,
                };
                match (&p.args[0], &p.args[1]) {
                    (Arg::Var(v), Arg::Number(t)) if v == var => Some((*t, mode)),
                    _ => None,
                }
            }
            Constraint::Any(branches) => branches.iter().find_map(|b| scan(b, var)),
            _ => None,
        }
    }
    rule.constraints.iter().find_map(|c| scan(c, var))
}

/// Connected components of the proximity graph over `members`, each sorted
/// ascending; the component list is ordered by smallest member.
fn proximity_components(
    graph: &SceneGraph,
    members: &[NodeId],
    threshold: f64,
    mode: NearMode,
) -> Vec<Vec<NodeId>> {
    let mut component_of: Vec<Option<usize>> = vec![None; members.len()];
    let mut components: Vec<Vec<NodeId>> = Vec::new();
    for start in 0..members.len() {
        if component_of[start].is_some() {
            continue;
        }
        let cid = components.len();
        let mut queue = vec![start];
        component_of[start] = Some(cid);
        let mut comp = Vec::new();
        while let Some(i) = queue.pop() {
            comp.push(members[i]);
            for j in 0..members.len() {
                if component_of[j].is_none() {
                    let a = &graph.nodes[members[i]].bb;
                    let b = &graph.nodes[members[j]].bb;
                    // Thresholds were validated when the group formed.
                    if geometry::near(a, b, threshold, mode).unwrap_or(false) {
                        component_of[j] = Some(cid);
                        queue.push(j);
                    }
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

fn covers_disjoint(graph: &SceneGraph, ids: &[NodeId]) -> bool {
    let mut seen: BTreeSet<ImageId> = BTreeSet::new();
    for &id in ids {
        for img in &graph.nodes[id].cover {
            if !seen.insert(*img) {
                return false;
            }
        }
    }
    true
}

/// Evaluates one constraint under a (complete enough) variable binding.
fn eval_constraint(
    graph: &SceneGraph,
    rule: &Rule,
    c: &Constraint,
    vars: &[String],
    binding: &[NodeId],
    domain: &DomainModel,
) -> Result<bool, EngineError> {
    let resolve = |name: &str| -> &SceneNode {
        let i = vars.iter().position(|v| v == name).expect("declared var");
        &graph.nodes[binding[i]]
    };
    match c {
        Constraint::Interp {
            interpretation,
            var,
            ..
        } => Ok(resolve(var).interpretation == *interpretation),
        Constraint::KindOf { var, class, .. } => {
            let node = resolve(var);
            Ok(match &node.class_name {
                Some(cn) => domain.is_subclass_of(class, cn),
                None => false,
            })
        }
        Constraint::Property(p) => eval_property(rule, p, |v| resolve(v).bb),
        Constraint::Any(branches) => {
            for b in branches {
                if eval_constraint(graph, rule, b, vars, binding, domain)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Evaluates one constraint of a group rule, where the single variable is
/// bound to the member list.
fn eval_group_constraint(
    graph: &SceneGraph,
    rule: &Rule,
    c: &Constraint,
    group: &[NodeId],
) -> Result<bool, EngineError> {
    let bbs: Vec<BoundingBox> = group.iter().map(|&id| graph.nodes[id].bb).collect();
    match c {
        Constraint::Property(p) => match p.prop {
            Prop::AbsGroup | Prop::RelGroup => {
                let mode = if p.prop == Prop::AbsGroup {
                    NearMode::Absolute
                } else {
                    NearMode::Relative
                };
                let threshold = match &p.args[1] {
                    Arg::Number(t) => *t,
                    _ => unreachable!("parser enforces a numeric threshold"),
                };
                geometry::group(&bbs, threshold, mode).map_err(|source| EngineError::Threshold {
                    rule: rule.name.clone(),
                    source,
                })
            }
            Prop::Vertical if p.args.len() == 1 => Ok(chained_vertical(graph, group)),
            _ => unreachable!("parser restricts group-rule constraints"),
        },
        Constraint::Any(branches) => {
            for b in branches {
                if eval_group_constraint(graph, rule, b, group)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        _ => unreachable!("parser restricts group-rule constraints"),
    }
}

/// Chained vertical test: sort members by center y (ties by id) and require
/// every consecutive pair to be vertically related.
fn chained_vertical(graph: &SceneGraph, group: &[NodeId]) -> bool {
    let mut ordered: Vec<NodeId> = group.to_vec();
    ordered.sort_by(|&a, &b| {
        let ya = graph.nodes[a].bb.center().1;
        let yb = graph.nodes[b].bb.center().1;
        ya.partial_cmp(&yb).unwrap().then(a.cmp(&b))
    });
    ordered
        .windows(2)
        .all(|w| graph.nodes[w[0]].bb.vertical(&graph.nodes[w[1]].bb, None))
}

/// Evaluates a scalar property call given a var-to-box resolver.
fn eval_property(
    rule: &Rule,
    p: &PropertyCall,
    resolve: impl Fn(&str) -> BoundingBox,
) -> Result<bool, EngineError> {
    let bb = |i: usize| -> BoundingBox {
        match &p.args[i] {
            Arg::Var(v) => resolve(v),
            _ => unreachable!("parser enforces variable arguments"),
        }
    };
    let num = |i: usize| -> f64 {
        match &p.args[i] {
            Arg::Number(n) => *n,
            _ => unreachable!("parser enforces numeric arguments"),
        }
    };
    let sym = |i: usize| -> &str {
        match &p.args[i] {
            Arg::Symbol(s) => s,
            _ => unreachable!("parser enforces position arguments"),
        }
    };
    let threshold_err = |source: GeometryError| EngineError::Threshold {
        rule: rule.name.clone(),
        source,
    };
    Ok(match p.prop {
        Prop::Horizontal => {
            let pos = (p.args.len() == 3).then(|| match sym(2) {
                "left" => HorizontalPos::Left,
                _ => HorizontalPos::Right,
            });
            bb(0).horizontal(&bb(1), pos)
        }
        Prop::Vertical => {
            let pos = (p.args.len() == 3).then(|| match sym(2) {
                "up" => VerticalPos::Up,
                _ => VerticalPos::Down,
            });
            bb(0).vertical(&bb(1), pos)
        }
        Prop::Diagonal => {
            let pos = (p.args.len() == 3).then(|| match sym(2) {
                "ne" => DiagonalPos::Ne,
                "nw" => DiagonalPos::Nw,
                "se" => DiagonalPos::Se,
                _ => DiagonalPos::Sw,
            });
            bb(0).diagonal(&bb(1), pos)
        }
        Prop::Disjoint => bb(0).disjoint(&bb(1)),
        Prop::Overlap => bb(0).overlaps(&bb(1)),
        Prop::Contains => bb(0).contains(&bb(1)),
        Prop::AbsNear => {
            if p.args.len() == 2 {
                // Bare near: the boxes are in contact.
                bb(0).distance(&bb(1)) == 0.0
            } else {
                bb(0).abs_near(&bb(1), num(2)).map_err(threshold_err)?
            }
        }
        Prop::RelNear => bb(0).rel_near(&bb(1), num(2)).map_err(threshold_err)?,
        Prop::AbsGroup | Prop::RelGroup => {
            unreachable!("group properties are rejected before evaluation")
        }
    })
}

/// Applies all rules until no iteration adds a node, then validates the
/// resulting graph. Node count is capped at `max_nodes`.
pub fn apply_rules_to_fixpoint(
    graph: &mut SceneGraph,
    rules: &RuleSet,
    domain: &DomainModel,
    max_nodes: usize,
) -> Result<(), EngineError> {
    let mut existing: HashSet<(String, Vec<NodeId>)> = graph
        .nodes
        .iter()
        .filter(|n| !n.is_basic())
        .map(|n| (n.interpretation.clone(), n.children.clone()))
        .collect();

    loop {
        let snapshot = graph.nodes.len();
        let mut added = false;
        for rule in &rules.rules {
            for children in match_rule_limited(graph, rule, domain, snapshot)? {
                let key = (rule.name.clone(), children.clone());
                if existing.contains(&key) {
                    continue;
                }
                if graph.nodes.len() >= max_nodes {
                    return Err(EngineError::NodeLimit {
                        rule: rule.name.clone(),
                        limit: max_nodes,
                    });
                }
                graph.nodes.push(make_composite(
                    graph.nodes.len(),
                    &rule.name,
                    &children,
                    &graph.nodes,
                ));
                existing.insert(key);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    validate_graph(graph)
}

fn make_composite(
    id: NodeId,
    interpretation: &str,
    children: &[NodeId],
    nodes: &[SceneNode],
) -> SceneNode {
    let bb = children
        .iter()
        .map(|&c| nodes[c].bb)
        .reduce(|a, b| a.merge(&b))
        .expect("a composite has at least one child");
    let cover: BTreeSet<ImageId> = children
        .iter()
        .flat_map(|&c| nodes[c].cover.iter().copied())
        .collect();
    let confidence =
        children.iter().map(|&c| nodes[c].confidence).sum::<f64>() / children.len() as f64;
    SceneNode {
        id,
        interpretation: interpretation.to_string(),
        bb,
        class_name: None,
        confidence,
        cover,
        children: children.to_vec(),
    }
}

/// Checks the structural invariants every finished graph must satisfy.
pub fn validate_graph(graph: &SceneGraph) -> Result<(), EngineError> {
    let fail = |msg: String| Err(EngineError::Invariant(msg));
    for (i, node) in graph.nodes.iter().enumerate() {
        if node.id != i {
            return fail(format!("node at index {i} carries id {}", node.id));
        }
        let basic = i < graph.basic_count;
        if node.is_basic() != basic {
            return fail(format!("node {i}: basic prefix and children disagree"));
        }
        if node.class_name.is_some() != basic {
            return fail(format!("node {i}: class name present iff basic violated"));
        }
        if basic {
            if node.cover.len() != 1 {
                return fail(format!("basic node {i} covers {} images", node.cover.len()));
            }
            continue;
        }
        if node.children.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!("node {i}: children not strictly ascending"));
        }
        if node.children.iter().any(|&c| c >= i) {
            return fail(format!("node {i}: child id not below node id"));
        }
        let expected_cover: BTreeSet<ImageId> = node
            .children
            .iter()
            .flat_map(|&c| graph.nodes[c].cover.iter().copied())
            .collect();
        let child_cover_sizes: usize = node
            .children
            .iter()
            .map(|&c| graph.nodes[c].cover.len())
            .sum();
        if expected_cover != node.cover || child_cover_sizes != node.cover.len() {
            return fail(format!("node {i}: cover is not the disjoint child union"));
        }
        let expected_bb = node
            .children
            .iter()
            .map(|&c| graph.nodes[c].bb)
            .reduce(|a, b| a.merge(&b))
            .unwrap();
        if expected_bb != node.bb {
            return fail(format!("node {i}: box is not the child hull"));
        }
        let expected_conf = node
            .children
            .iter()
            .map(|&c| graph.nodes[c].confidence)
            .sum::<f64>()
            / node.children.len() as f64;
        if (expected_conf - node.confidence).abs() > 1e-12 {
            return fail(format!("node {i}: confidence is not the child mean"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain;
    use crate::rules;
    use crate::scene;

    const BATTLE_DOMAIN: &str = include_str!("../fixtures/battle/domain.pl");
    const BATTLE_MULTI_DOMAIN: &str = include_str!("../fixtures/battle/domain_multi.pl");
    const BATTLE_RULES: &str = include_str!("../fixtures/battle/rules.rules");
    const SCENE_1: &str = include_str!("../fixtures/battle/scene1.scene");
    const SCENE_2: &str = include_str!("../fixtures/battle/scene2.scene");
    const SCENE_3: &str = include_str!("../fixtures/battle/scene3.scene");
    const SCENE_MULTI: &str = include_str!("../fixtures/battle/scene_multi.scene");

    fn battle_graph(scene_text: &str) -> SceneGraph {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let scn = scene::InputScene::parse_facts(scene_text).unwrap();
        let basics = scene::serialize_basic_scenes(&scn, &dom).unwrap();
        let mut graph = init_graph(&basics);
        let pack = rules::parse_rules(BATTLE_RULES).unwrap();
        apply_rules_to_fixpoint(&mut graph, &pack, &dom, DEFAULT_MAX_NODES).unwrap();
        graph
    }

    #[test]
    fn basic_nodes_mirror_basic_scenes() {
        let dom = domain::DomainModel::parse(BATTLE_MULTI_DOMAIN).unwrap();
        let scn = scene::InputScene::parse_facts(SCENE_MULTI).unwrap();
        let basics = scene::serialize_basic_scenes(&scn, &dom).unwrap();
        let graph = init_graph(&basics);
        assert_eq!(graph.nodes.len(), 7);
        assert_eq!(graph.basic_count, 7);
        assert_eq!(graph.image_ids, vec![0, 1, 2]);
        let names: Vec<&str> = graph
            .nodes
            .iter()
            .map(|n| n.interpretation.as_str())
            .collect();
        assert_eq!(
            names,
            ["Human", "God", "Wizard", "Sword", "Dagger", "Axe", "God_Axe"]
        );
        for node in &graph.nodes {
            assert!(node.is_basic());
            assert_eq!(node.cover.len(), 1);
            assert!(node.class_name.is_some());
        }
        validate_graph(&graph).unwrap();
    }

    #[test]
    fn ambiguous_weapon_yields_two_warriors() {
        let graph = battle_graph(SCENE_1);
        // Basics: Human, Sword, Axe. Composites: Warrior(0,1), Warrior(0,2).
        assert_eq!(graph.basic_count, 3);
        let warriors: Vec<&SceneNode> = graph
            .composites()
            .iter()
            .filter(|n| n.interpretation == "Warrior")
            .collect();
        assert_eq!(warriors.len(), 2);
        assert_eq!(warriors[0].children, vec![0, 1]);
        assert_eq!(warriors[1].children, vec![0, 2]);
        // Both warriors share image 0, so no Battle can form.
        assert!(graph
            .composites()
            .iter()
            .all(|n| n.interpretation != "Battle"));
    }

    #[test]
    fn four_warriors_three_battles_no_war() {
        let graph = battle_graph(SCENE_2);
        assert_eq!(graph.basic_count, 8);
        let by_name = |name: &str| -> Vec<&SceneNode> {
            graph
                .composites()
                .iter()
                .filter(|n| n.interpretation == name)
                .collect()
        };
        let warriors = by_name("Warrior");
        assert_eq!(warriors.len(), 4);
        assert_eq!(
            warriors
                .iter()
                .map(|n| n.children.clone())
                .collect::<Vec<_>>(),
            [vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]
        );
        // Warrior ids are 8..12; adjacent pairs fight, distant ones do not.
        let battles = by_name("Battle");
        assert_eq!(
            battles
                .iter()
                .map(|n| n.children.clone())
                .collect::<Vec<_>>(),
            [vec![8, 9], vec![9, 10], vec![10, 11]]
        );
        // The battles' proximity component exists but their covers overlap,
        // so the group rule produces no War.
        assert!(by_name("War").is_empty());
        validate_graph(&graph).unwrap();
    }

    #[test]
    fn composite_fields_follow_children() {
        let graph = battle_graph(SCENE_2);
        let warrior = &graph.nodes[8];
        assert_eq!(warrior.interpretation, "Warrior");
        assert_eq!(warrior.bb, BoundingBox::new(0.0, 0.0, 21.0, 20.0));
        assert_eq!(warrior.cover.iter().copied().collect::<Vec<_>>(), [0, 1]);
        assert_eq!(warrior.confidence, 1.0);
        assert!(warrior.class_name.is_none());
        let battle = &graph.nodes[12];
        assert_eq!(battle.children, vec![8, 9]);
        assert_eq!(
            battle.cover.iter().copied().collect::<Vec<_>>(),
            [0, 1, 2, 3]
        );
    }

    #[test]
    fn crossed_pairings_stay_out() {
        let graph = battle_graph(SCENE_3);
        let names: Vec<(String, Vec<NodeId>)> = graph
            .composites()
            .iter()
            .map(|n| (n.interpretation.clone(), n.children.clone()))
            .collect();
        assert_eq!(
            names,
            [
                ("Warrior".to_string(), vec![0, 1]),
                ("Warrior".to_string(), vec![2, 3]),
                ("Battle".to_string(), vec![4, 5]),
            ]
        );
    }

    #[test]
    fn fixpoint_is_deterministic_and_idempotent() {
        let a = battle_graph(SCENE_2);
        let b = battle_graph(SCENE_2);
        assert_eq!(a, b);

        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let pack = rules::parse_rules(BATTLE_RULES).unwrap();
        let mut again = a.clone();
        apply_rules_to_fixpoint(&mut again, &pack, &dom, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn match_order_is_lexicographic_in_child_ids() {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let scn = scene::InputScene::parse_facts(SCENE_2).unwrap();
        let basics = scene::serialize_basic_scenes(&scn, &dom).unwrap();
        let graph = init_graph(&basics);
        let pack = rules::parse_rules(BATTLE_RULES).unwrap();
        let warriors = match_rule(&graph, &pack.rules[0], &dom).unwrap();
        assert_eq!(warriors, [vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]);
    }

    #[test]
    fn symmetric_matches_collapse() {
        // Battle(X, Y) matches both (W1, W2) and (W2, W1); the unordered
        // child set keeps only one node.
        let graph = battle_graph(SCENE_3);
        let battles: Vec<&SceneNode> = graph
            .composites()
            .iter()
            .filter(|n| n.interpretation == "Battle")
            .collect();
        assert_eq!(battles.len(), 1);
    }

    #[test]
    fn node_limit_names_the_rule() {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let scn = scene::InputScene::parse_facts(SCENE_2).unwrap();
        let basics = scene::serialize_basic_scenes(&scn, &dom).unwrap();
        let mut graph = init_graph(&basics);
        let pack = rules::parse_rules(BATTLE_RULES).unwrap();
        let err = apply_rules_to_fixpoint(&mut graph, &pack, &dom, 9).unwrap_err();
        assert_eq!(
            err,
            EngineError::NodeLimit {
                rule: "Warrior".to_string(),
                limit: 9
            }
        );
        assert!(err.to_string().contains("'Warrior'"));
    }

    #[test]
    fn group_property_in_scalar_rule_is_an_error() {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let scn = scene::InputScene::parse_facts(SCENE_1).unwrap();
        let basics = scene::serialize_basic_scenes(&scn, &dom).unwrap();
        let mut graph = init_graph(&basics);
        let text = "rule('Bad', [X, Y]) { Human(X); Human(Y); absGroup(X, 5.0); }";
        let pack = rules::parse_rules(text).unwrap();
        let err = apply_rules_to_fixpoint(&mut graph, &pack, &dom, 100).unwrap_err();
        assert_eq!(
            err,
            EngineError::GroupPropertyInScalarRule {
                rule: "Bad".to_string(),
                property: "absGroup".to_string()
            }
        );
    }

    #[test]
    fn maximal_group_takes_whole_component() {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let text = "\
image(0, bb(0, 0, 10, 10), [class('Human_Class', 1.0)]).
image(1, bb(12, 0, 10, 10), [class('Human_Class', 1.0)]).
image(2, bb(24, 0, 10, 10), [class('Human_Class', 1.0)]).
image(3, bb(200, 0, 10, 10), [class('Human_Class', 1.0)]).
";
        let scn = scene::InputScene::parse_facts(text).unwrap();
        let basics = scene::serialize_basic_scenes(&scn, &dom).unwrap();
        let mut graph = init_graph(&basics);
        let pack =
            rules::parse_rules("rule('Crowd', group(Xs: 'Human', maximal)) { absGroup(Xs, 3.0); }")
                .unwrap();
        apply_rules_to_fixpoint(&mut graph, &pack, &dom, 100).unwrap();
        // One component {0, 1, 2}; node 3 is isolated and singletons are no
        // groups. Subsets of the component are not emitted in maximal mode.
        let crowds: Vec<&SceneNode> = graph
            .composites()
            .iter()
            .filter(|n| n.interpretation == "Crowd")
            .collect();
        assert_eq!(crowds.len(), 1);
        assert_eq!(crowds[0].children, vec![0, 1, 2]);
    }

    #[test]
    fn subsets_group_enumerates_chains() {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        // Three vertically stacked humans with x-overlap.
        let text = "\
image(0, bb(0, 0, 10, 10), [class('Human_Class', 1.0)]).
image(1, bb(2, 20, 10, 10), [class('Human_Class', 1.0)]).
image(2, bb(4, 40, 10, 10), [class('Human_Class', 1.0)]).
";
        let scn = scene::InputScene::parse_facts(text).unwrap();
        let basics = scene::serialize_basic_scenes(&scn, &dom).unwrap();
        let mut graph = init_graph(&basics);
        let pack =
            rules::parse_rules("rule('Stack', group(Xs: 'Human', subsets)) { vertical(Xs); }")
                .unwrap();
        apply_rules_to_fixpoint(&mut graph, &pack, &dom, 100).unwrap();
        let stacks: Vec<Vec<NodeId>> = graph
            .composites()
            .iter()
            .filter(|n| n.interpretation == "Stack")
            .map(|n| n.children.clone())
            .collect();
        assert_eq!(stacks, [vec![0, 1], vec![0, 1, 2], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn kind_of_is_false_for_composites() {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let scn = scene::InputScene::parse_facts(SCENE_3).unwrap();
        let basics = scene::serialize_basic_scenes(&scn, &dom).unwrap();
        let mut graph = init_graph(&basics);
        let pack = rules::parse_rules(BATTLE_RULES).unwrap();
        apply_rules_to_fixpoint(&mut graph, &pack, &dom, 100).unwrap();
        // A rule asking for kindOf on anything matches only basics: warriors
        // (composites) never satisfy kindOf even though swords do.
        let probe = rules::parse_rules(
            "rule('Probe', [X, Y]) { kindOf(X, 'Classification'); kindOf(Y, 'Classification'); disjoint(X, Y); }",
        )
        .unwrap();
        let matches = match_rule(&graph, &probe.rules[0], &dom).unwrap();
        assert!(matches
            .iter()
            .all(|m| m.iter().all(|&id| id < graph.basic_count)));
        assert!(!matches.is_empty());
    }

    #[test]
    fn validate_graph_rejects_tampering() {
        let mut graph = battle_graph(SCENE_3);
        graph.nodes[4].confidence += 0.25;
        let err = validate_graph(&graph).unwrap_err();
        assert!(err.to_string().contains("confidence"));

        let mut graph = battle_graph(SCENE_3);
        graph.nodes[4].cover.insert(99);
        assert!(validate_graph(&graph).is_err());

        let mut graph = battle_graph(SCENE_3);
        graph.nodes[4].bb = BoundingBox::new(0.0, 0.0, 1.0, 1.0);
        assert!(validate_graph(&graph).is_err());
    }

    #[test]
    fn subset_enumeration_is_bounded() {
        let dom = domain::DomainModel::parse(BATTLE_DOMAIN).unwrap();
        let text: String = (0..21)
            .map(|i| {
                format!(
                    "image({i}, bb({}, 0, 5, 5), [class('Human_Class', 1.0)]).\n",
                    i * 100
                )
            })
            .collect();
        let scn = scene::InputScene::parse_facts(&text).unwrap();
        let basics = scene::serialize_basic_scenes(&scn, &dom).unwrap();
        let mut graph = init_graph(&basics);
        let pack =
            rules::parse_rules("rule('Stack', group(Xs: 'Human', subsets)) { vertical(Xs); }")
                .unwrap();
        let err = apply_rules_to_fixpoint(&mut graph, &pack, &dom, 10_000).unwrap_err();
        assert!(matches!(
            err,
            EngineError::TooManyGroupMembers { count: 21, .. }
        ));
    }
}
