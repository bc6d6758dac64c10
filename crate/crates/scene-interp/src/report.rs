//! Machine-readable report format.
//!
//! The structured output of an interpretation run: every exact cover with
//! its rank, weight, filter flag, rendered text, and the node records
//! needed to reconstruct boxes and nesting without the original inputs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::engine::NodeId;
use crate::pipeline::InterpretationReport;
use crate::scene::{Bb, ImageId};

/// Report parsing failure (malformed JSON or schema mismatch).
#[derive(Debug, thiserror::Error)]
#[error("report: {0}")]
pub struct ReportError(String);

/// Top-level report document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReportDoc {
    pub all_count: usize,
    pub filtered_count: usize,
    /// Every interpretation in rank order.
    pub interpretations: Vec<ReportInterpretation>,
}

/// One ranked interpretation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReportInterpretation {
    pub rank: usize,
    pub weight: u64,
    pub filtered: bool,
    /// Nested-term rendering, e.g. `[Warrior(Human-0, Sword-1)]`.
    pub text: String,
    /// The top-level nodes and all their descendants, ascending node id,
    /// so the entry is self-contained.
    pub nodes: Vec<ReportNode>,
    /// Ids of the top-level nodes within `nodes`.
    pub top: Vec<NodeId>,
}

/// One scene-graph node as it appears in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReportNode {
    pub node_id: NodeId,
    pub interpretation: String,
    pub cover: Vec<ImageId>,
    pub confidence: f64,
    pub bb: Bb,
    /// Direct children; empty for basic scenes.
    pub children: Vec<NodeId>,
}

impl ReportDoc {
    /// Builds the document from a pipeline report.
    pub fn from_report(report: &InterpretationReport) -> ReportDoc {
        let interpretations = report
            .all
            .iter()
            .map(|interp| {
                let mut ids: BTreeSet<NodeId> = BTreeSet::new();
                let mut stack: Vec<NodeId> = interp.nodes.clone();
                while let Some(id) = stack.pop() {
                    if ids.insert(id) {
                        stack.extend(&report.graph.nodes[id].children);
                    }
                }
                let nodes = ids
                    .into_iter()
                    .map(|id| {
                        let n = &report.graph.nodes[id];
                        ReportNode {
                            node_id: n.id,
                            interpretation: n.interpretation.clone(),
                            cover: n.cover.iter().copied().collect(),
                            confidence: n.confidence,
                            bb: Bb {
                                x: n.bb.x,
                                y: n.bb.y,
                                w: n.bb.w,
                                h: n.bb.h,
                            },
                            children: n.children.clone(),
                        }
                    })
                    .collect();
                ReportInterpretation {
                    rank: interp.rank,
                    weight: interp.weight,
                    filtered: interp.filtered,
                    text: report.renderings[interp.rank - 1].clone(),
                    nodes,
                    top: interp.nodes.clone(),
                }
            })
            .collect();
        ReportDoc {
            all_count: report.all.len(),
            filtered_count: report.filtered_count(),
            interpretations,
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<ReportDoc, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError(e.to_string()))
    }
}
