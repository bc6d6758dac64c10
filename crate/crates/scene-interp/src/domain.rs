//! Domain knowledge: a classification hierarchy plus the mapping from
//! classifications to the scene interpretations they may denote.
//!
//! Both come from a fact file:
//!
//! ```text
//! subclass_of('Weapon_Class', 'Sword_Class').
//! interpretation('Sword_Class', 'Sword').
//! ```
//!
//! `subclass_of('P','C')` declares `C` a direct subclass of `P`; the
//! resulting graph must be acyclic. `interpretation('Class','Interp')`
//! may repeat per classification, and declaration order is preserved.

use std::collections::{HashMap, HashSet};

use crate::facts::{strip_comment, Cursor};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("domain file, {0}")]
    Syntax(crate::facts::FactError),
    #[error("subclass hierarchy contains a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
}

/// Parsed domain model. `warnings` lists ignored duplicate facts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DomainModel {
    subclass_edges: Vec<(String, String)>,
    interpretation_facts: Vec<(String, String)>,
    children: HashMap<String, Vec<String>>,
    interpretations: HashMap<String, Vec<String>>,
    pub warnings: Vec<String>,
}

impl DomainModel {
    pub fn parse(text: &str) -> Result<DomainModel, DomainError> {
        let mut model = DomainModel::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = strip_comment(raw_line);
            let mut cur = Cursor::new(line, idx + 1);
            if cur.at_end() {
                continue;
            }
            match cur.ident() {
                Some("subclass_of") => {
                    let (parent, child) = parse_pair(&mut cur).map_err(DomainError::Syntax)?;
                    model.add_subclass(parent, child, idx + 1);
                }
                Some("interpretation") => {
                    let (class, interp) = parse_pair(&mut cur).map_err(DomainError::Syntax)?;
                    model.add_interpretation(class, interp, idx + 1);
                }
                Some(other) => {
                    return Err(DomainError::Syntax(
                        cur.error(format!("unknown fact '{other}'")),
                    ));
                }
                None => {
                    return Err(DomainError::Syntax(cur.error("expected a fact")));
                }
            }
        }
        model.check_acyclic()?;
        Ok(model)
    }

    fn add_subclass(&mut self, parent: String, child: String, line: usize) {
        if self
            .subclass_edges
            .iter()
            .any(|(p, c)| *p == parent && *c == child)
        {
            self.warnings.push(format!(
                "line {line}: duplicate subclass_of('{parent}', '{child}') ignored"
            ));
            return;
        }
        self.children
            .entry(parent.clone())
            .or_default()
            .push(child.clone());
        self.subclass_edges.push((parent, child));
    }

    fn add_interpretation(&mut self, class: String, interp: String, line: usize) {
        if self
            .interpretation_facts
            .iter()
            .any(|(c, i)| *c == class && *i == interp)
        {
            self.warnings.push(format!(
                "line {line}: duplicate interpretation('{class}', '{interp}') ignored"
            ));
            return;
        }
        self.interpretations
            .entry(class.clone())
            .or_default()
            .push(interp.clone());
        self.interpretation_facts.push((class, interp));
    }

    fn check_acyclic(&self) -> Result<(), DomainError> {
        // iterative DFS with an explicit path for cycle reporting
        let mut state: HashMap<&str, u8> = HashMap::new(); // 1 = on path, 2 = done
        for start in self.children.keys() {
            if state.contains_key(start.as_str()) {
                continue;
            }
            let mut path: Vec<&str> = Vec::new();
            let mut stack: Vec<(&str, usize)> = vec![(start.as_str(), 0)];
            while let Some((node, next_child)) = stack.pop() {
                if next_child == 0 {
                    state.insert(node, 1);
                    path.push(node);
                }
                let kids = self.children.get(node).map(Vec::as_slice).unwrap_or(&[]);
                if next_child < kids.len() {
                    stack.push((node, next_child + 1));
                    let kid = kids[next_child].as_str();
                    match state.get(kid) {
                        Some(1) => {
                            let from = path.iter().position(|n| *n == kid).unwrap_or(0);
                            let mut cycle: Vec<String> =
                                path[from..].iter().map(|s| s.to_string()).collect();
                            cycle.push(kid.to_string());
                            return Err(DomainError::Cycle(cycle));
                        }
                        Some(_) => {}
                        None => stack.push((kid, 0)),
                    }
                } else {
                    state.insert(node, 2);
                    path.pop();
                }
            }
        }
        Ok(())
    }

    /// Reflexive-transitive subclass test. Unknown names relate only to
    /// themselves.
    pub fn is_subclass_of(&self, ancestor: &str, descendant: &str) -> bool {
        if ancestor == descendant {
            return true;
        }
        let mut seen: HashSet<&str> = HashSet::new();
        let mut stack = vec![ancestor];
        while let Some(node) = stack.pop() {
            for kid in self.children.get(node).map(Vec::as_slice).unwrap_or(&[]) {
                if kid == descendant {
                    return true;
                }
                if seen.insert(kid) {
                    stack.push(kid);
                }
            }
        }
        false
    }

    /// Interpretations declared for `class`, in file order.
    pub fn interpretations_of(&self, class: &str) -> &[String] {
        self.interpretations
            .get(class)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// True when `name` occurs anywhere in the hierarchy or as a
    /// classification with interpretation facts.
    pub fn knows_class(&self, name: &str) -> bool {
        self.subclass_edges
            .iter()
            .any(|(p, c)| p == name || c == name)
            || self.interpretations.contains_key(name)
    }

    /// Every interpretation name some classification can map to.
    pub fn declared_interpretations(&self) -> HashSet<&str> {
        self.interpretation_facts
            .iter()
            .map(|(_, i)| i.as_str())
            .collect()
    }

    pub fn subclass_facts(&self) -> &[(String, String)] {
        &self.subclass_edges
    }

    pub fn interpretation_facts(&self) -> &[(String, String)] {
        &self.interpretation_facts
    }

    /// Debug dump in the input fact syntax; parses back to an equal model.
    pub fn to_fact_string(&self) -> String {
        let mut out = String::new();
        for (p, c) in &self.subclass_edges {
            out.push_str(&format!("subclass_of('{p}', '{c}').\n"));
        }
        for (c, i) in &self.interpretation_facts {
            out.push_str(&format!("interpretation('{c}', '{i}').\n"));
        }
        out
    }
}

fn parse_pair(cur: &mut Cursor) -> Result<(String, String), crate::facts::FactError> {
    cur.expect('(')?;
    let first = cur.quoted()?;
    cur.expect(',')?;
    let second = cur.quoted()?;
    cur.expect(')')?;
    cur.finish_fact()?;
    Ok((first, second))
}
