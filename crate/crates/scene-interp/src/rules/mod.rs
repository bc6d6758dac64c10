//! The rule language: how composite scenes are described.
//!
//! A rule names the interpretation it produces, binds either a list of
//! scene variables or a group variable, and lists constraints separated
//! by `;`:
//!
//! ```text
//! rule('Warrior', [X, Y]) {
//!     Human(X);
//!     kindOf(Y, 'Weapon_Class');
//!     horizontal(X, Y);
//!     near(X, Y, 3.0);
//! }
//!
//! rule('Group_Of_Corniforms', group(X: 'Corniform', maximal)) {
//!     relGroup(X, 0.5);
//! }
//! ```
//!
//! Constraints are interpretation checks (`Human(X)`), classification
//! checks against the hierarchy (`kindOf(Y, 'Weapon_Class')`), spatial
//! properties, or a parenthesized disjunction of those
//! (`(contains(X, Y) or overlap(X, Y))`). `near` is an alias for
//! `absNear`; proximity properties without a threshold test for contact
//! (gap zero). A group variable may only appear in `absGroup`/`relGroup`
//! and in the chained form `vertical(Xs)`, which sorts the members by
//! center y and requires each consecutive pair to be vertically related.

mod lexer;
mod parser;

use std::collections::HashSet;
use std::fmt;

use crate::domain::DomainModel;

/// Parse failure with 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("rule file, line {line}, column {col}: {msg}")]
pub struct RuleError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl RuleError {
    pub(crate) fn at(line: usize, col: usize, msg: impl Into<String>) -> Self {
        RuleError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

/// Spatial property names usable in constraints. `near` parses as
/// [`Prop::AbsNear`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prop {
    Horizontal,
    Vertical,
    Diagonal,
    Disjoint,
    Overlap,
    Contains,
    AbsNear,
    RelNear,
    AbsGroup,
    RelGroup,
}

impl Prop {
    pub(crate) fn from_name(name: &str) -> Option<Prop> {
        Some(match name {
            "horizontal" => Prop::Horizontal,
            "vertical" => Prop::Vertical,
            "diagonal" => Prop::Diagonal,
            "disjoint" => Prop::Disjoint,
            "overlap" => Prop::Overlap,
            "contains" => Prop::Contains,
            "absNear" | "near" => Prop::AbsNear,
            "relNear" => Prop::RelNear,
            "absGroup" => Prop::AbsGroup,
            "relGroup" => Prop::RelGroup,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Prop::Horizontal => "horizontal",
            Prop::Vertical => "vertical",
            Prop::Diagonal => "diagonal",
            Prop::Disjoint => "disjoint",
            Prop::Overlap => "overlap",
            Prop::Contains => "contains",
            Prop::AbsNear => "absNear",
            Prop::RelNear => "relNear",
            Prop::AbsGroup => "absGroup",
            Prop::RelGroup => "relGroup",
        }
    }

    /// True for the properties that take a group variable.
    pub fn is_group_prop(&self) -> bool {
        matches!(self, Prop::AbsGroup | Prop::RelGroup)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Arg {
    Var(String),
    Number(f64),
    /// Position literal such as `'up'` or `'ne'`.
    Symbol(String),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Var(v) => write!(f, "{v}"),
            Arg::Number(n) => write!(f, "{n}"),
            Arg::Symbol(s) => write!(f, "'{s}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCall {
    pub prop: Prop,
    pub args: Vec<Arg>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `Human(X)`: the bound scene's interpretation equals the name.
    Interp {
        interpretation: String,
        var: String,
        line: usize,
    },
    /// `kindOf(X, 'Weapon_Class')`: the bound scene is basic and its
    /// classification is the named class or a subclass of it.
    KindOf {
        var: String,
        class: String,
        line: usize,
    },
    Property(PropertyCall),
    /// `(a or b or ...)`: at least two atomic branches.
    Any(Vec<Constraint>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupMode {
    /// Bind the connected components of the proximity graph.
    Maximal,
    /// Bind every subset of size two or more.
    Subsets,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Binder {
    /// `[X, Y, ...]`: one scene per variable, all distinct.
    Vars(Vec<String>),
    /// `group(X: 'Interp', mode)`: `X` binds a set of scenes whose
    /// interpretation is `member_interpretation`.
    Group {
        var: String,
        member_interpretation: String,
        mode: GroupMode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub name: String,
    pub binder: Binder,
    pub constraints: Vec<Constraint>,
    pub line: usize,
}

/// Parsed rule file. Rules keep file order; `warnings` lists non-fatal
/// findings (currently: variables declared but never used).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub warnings: Vec<String>,
}

pub fn parse_rules(text: &str) -> Result<RuleSet, RuleError> {
    parser::parse(lexer::lex(text)?)
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Interp {
                interpretation,
                var,
                ..
            } => write!(f, "{interpretation}({var})"),
            Constraint::KindOf { var, class, .. } => write!(f, "kindOf({var}, '{class}')"),
            Constraint::Property(p) => {
                let args: Vec<String> = p.args.iter().map(|a| a.to_string()).collect();
                write!(f, "{}({})", p.prop.name(), args.join(", "))
            }
            Constraint::Any(branches) => {
                let parts: Vec<String> = branches.iter().map(|b| b.to_string()).collect();
                write!(f, "({})", parts.join(" or "))
            }
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.binder {
            Binder::Vars(vars) => {
                writeln!(f, "rule('{}', [{}]) {{", self.name, vars.join(", "))?;
            }
            Binder::Group {
                var,
                member_interpretation,
                mode,
            } => {
                let mode = match mode {
                    GroupMode::Maximal => "maximal",
                    GroupMode::Subsets => "subsets",
                };
                writeln!(
                    f,
                    "rule('{}', group({var}: '{member_interpretation}', {mode})) {{",
                    self.name
                )?;
            }
        }
        for c in &self.constraints {
            writeln!(f, "    {c};")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for RuleSet {
    /// Pretty print; reparsing the output yields an equal rule set.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, rule) in self.rules.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

impl Rule {
    /// Every interpretation name the rule refers to, with lines.
    fn referenced_interpretations(&self) -> Vec<(&str, usize)> {
        let mut out = Vec::new();
        if let Binder::Group {
            member_interpretation,
            ..
        } = &self.binder
        {
            out.push((member_interpretation.as_str(), self.line));
        }
        fn walk<'a>(c: &'a Constraint, out: &mut Vec<(&'a str, usize)>) {
            match c {
                Constraint::Interp {
                    interpretation,
                    line,
                    ..
                } => {
                    out.push((interpretation.as_str(), *line));
                }
                Constraint::Any(branches) => branches.iter().for_each(|b| walk(b, out)),
                _ => {}
            }
        }
        for c in &self.constraints {
            walk(c, &mut out);
        }
        out
    }

    fn referenced_classes(&self) -> Vec<(&str, usize)> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Constraint, out: &mut Vec<(&'a str, usize)>) {
            match c {
                Constraint::KindOf { class, line, .. } => out.push((class.as_str(), *line)),
                Constraint::Any(branches) => branches.iter().for_each(|b| walk(b, out)),
                _ => {}
            }
        }
        for c in &self.constraints {
            walk(c, &mut out);
        }
        out
    }
}

/// Static checks of a rule set against a domain model. Diagnostics, not
/// failures: an empty result means clean.
///
/// Flags interpretation names that nothing can produce (no
/// interpretation fact and no rule head) and `kindOf` class names the
/// domain has never heard of.
pub fn validate_rules(rules: &RuleSet, domain: &DomainModel) -> Vec<String> {
    let mut produced: HashSet<&str> = domain.declared_interpretations();
    for rule in &rules.rules {
        produced.insert(rule.name.as_str());
    }
    let mut diagnostics = Vec::new();
    for rule in &rules.rules {
        for (name, line) in rule.referenced_interpretations() {
            if !produced.contains(name) {
                diagnostics.push(format!(
                    "line {line}: interpretation '{name}' is not produced by any interpretation fact or rule head"
                ));
            }
        }
        for (class, line) in rule.referenced_classes() {
            if !domain.knows_class(class) {
                diagnostics.push(format!(
                    "line {line}: class '{class}' does not occur in the domain model"
                ));
            }
        }
    }
    diagnostics
}

#[cfg(test)]
mod tests {
    use super::*;

    const WARRIOR: &str = "rule('Warrior', [X, Y]) { Human(X); Sword(Y); horizontal(X, Y); }";

    #[test]
    fn parses_a_simple_rule() {
        let rs = parse_rules(WARRIOR).unwrap();
        assert_eq!(rs.rules.len(), 1);
        let rule = &rs.rules[0];
        assert_eq!(rule.name, "Warrior");
        assert_eq!(rule.binder, Binder::Vars(vec!["X".into(), "Y".into()]));
        assert_eq!(rule.constraints.len(), 3);
        assert!(matches!(
            &rule.constraints[0],
            Constraint::Interp { interpretation, var, .. }
                if interpretation == "Human" && var == "X"
        ));
        assert!(rs.warnings.is_empty());
    }

    #[test]
    fn parses_disjunction_of_three() {
        let rs = parse_rules(
            "rule('HG_Giving_Birth_BG', [X, Y]) {\n\
             High_Goddess(X); Bull_God(Y);\n\
             (vertical(X, Y) or near(X, Y) or overlap(X, Y))\n\
             }",
        )
        .unwrap();
        let rule = &rs.rules[0];
        assert_eq!(rule.constraints.len(), 3);
        match &rule.constraints[2] {
            Constraint::Any(branches) => {
                assert_eq!(branches.len(), 3);
                assert!(matches!(&branches[1],
                    Constraint::Property(p) if p.prop == Prop::AbsNear && p.args.len() == 2));
            }
            other => panic!("expected disjunction, got {other:?}"),
        }
    }

    #[test]
    fn group_binder_modes() {
        let rs = parse_rules(
            "rule('Herd', group(Xs: 'Corniform')) { relGroup(Xs, 0.5); }\n\
             rule('Pair', group(Ys: 'Corniform', subsets)) { vertical(Ys); }\n",
        )
        .unwrap();
        assert_eq!(
            rs.rules[0].binder,
            Binder::Group {
                var: "Xs".into(),
                member_interpretation: "Corniform".into(),
                mode: GroupMode::Maximal,
            }
        );
        assert!(matches!(
            &rs.rules[1].binder,
            Binder::Group {
                mode: GroupMode::Subsets,
                ..
            }
        ));
    }

    #[test]
    fn kind_of_and_thresholds() {
        let rs = parse_rules(
            "rule('Warrior', [X, Y]) {\n\
               Human(X); kindOf(Y, 'Weapon_Class');\n\
               horizontal(X, Y); near(X, Y, 3.0);\n\
             }",
        )
        .unwrap();
        let rule = &rs.rules[0];
        assert!(matches!(&rule.constraints[1],
            Constraint::KindOf { var, class, .. } if var == "Y" && class == "Weapon_Class"));
        match &rule.constraints[3] {
            Constraint::Property(p) => {
                assert_eq!(p.prop, Prop::AbsNear);
                assert_eq!(p.args[2], Arg::Number(3.0));
            }
            other => panic!("expected property, got {other:?}"),
        }
    }

    #[test]
    fn positions_may_be_quoted_or_bare() {
        let rs = parse_rules(
            "rule('A', [X, Y]) { T(X); T(Y); vertical(X, Y, 'up'); }\n\
             rule('B', [X, Y]) { T(X); T(Y); vertical(X, Y, up); }\n",
        )
        .unwrap();
        for rule in &rs.rules {
            match &rule.constraints[2] {
                Constraint::Property(p) => assert_eq!(p.args[2], Arg::Symbol("up".into())),
                other => panic!("expected property, got {other:?}"),
            }
        }
    }

    #[test]
    fn trailing_semicolon_is_optional() {
        assert!(parse_rules("rule('A', [X]) { T(X) }").is_ok());
        assert!(parse_rules("rule('A', [X]) { T(X); }").is_ok());
    }

    fn err_msg(text: &str) -> String {
        parse_rules(text).unwrap_err().to_string()
    }

    #[test]
    fn rejects_malformed_rules() {
        assert!(err_msg("rule('A', [X]) { blorp(X); }").contains("unknown property"));
        assert!(err_msg("rule('A', [X]) { disjoint(X); }").contains("expects"));
        assert!(err_msg("rule('A', [X]) { T(X); T(Y); }").contains("not declared"));
        assert!(
            err_msg("rule('A', [X, Y]) { T(X); vertical(X, Y, 'sideways'); }").contains("position")
        );
        assert!(err_msg("rule('A', [X, Y]) { T(X); relNear(X, Y, 1.5); }").contains("[0, 1]"));
        assert!(err_msg("rule('A', [X]) { T(X); (T(X)); }").contains("or"));
        assert!(err_msg("rule('A', []) { T(X); }").contains("at least one variable"));
        assert!(err_msg("rule('A', [X, X]) { T(X); }").contains("duplicate variable"));
        assert!(
            err_msg("rule('A', [X]) { T(X); }\nrule('A', [X]) { T(X); }")
                .contains("duplicate rule")
        );
        assert!(err_msg("rule('G', group(Xs: 'T')) { vertical(Xs); }").contains("maximal"));
        assert!(err_msg("rule('G', group(Xs: 'T', subsets)) { T(Xs); }").contains("group variable"));
        assert!(
            err_msg("rule('G', group(Xs: 'T', subsets)) { relGroup(Xs); }").contains("threshold")
        );
    }

    #[test]
    fn unused_variable_warns() {
        let rs = parse_rules("rule('A', [X, Y]) { T(X); }").unwrap();
        assert_eq!(rs.warnings.len(), 1);
        assert!(rs.warnings[0].contains('Y'));
    }

    #[test]
    fn pretty_print_reparses_to_same_set() {
        let text = "\
            rule('Warrior', [X, Y]) {\n\
              Human(X); kindOf(Y, 'Weapon_Class'); horizontal(X, Y); near(X, Y, 3.0);\n\
            }\n\
            rule('Herd', group(Xs: 'Corniform')) { relGroup(Xs, 0.5); vertical(Xs); }\n\
            rule('Rite', [X, Y]) { Dagger(X); (Corniform(Y) or Herd(Y)); overlap(X, Y); }\n";
        let once = parse_rules(text).unwrap();
        let twice = parse_rules(&once.to_string()).unwrap();
        assert_eq!(once.to_string(), twice.to_string());
    }

    #[test]
    fn validation_diagnostics() {
        let domain = DomainModel::parse(
            "subclass_of('Weapon_Class', 'Sword_Class').\n\
             interpretation('Human_Class', 'Human').\n\
             interpretation('Sword_Class', 'Sword').\n",
        )
        .unwrap();
        let clean = parse_rules(
            "rule('Warrior', [X, Y]) { Human(X); kindOf(Y, 'Weapon_Class'); near(X, Y, 3.0); }\n\
             rule('Battle', [X, Y]) { Warrior(X); Warrior(Y); near(X, Y, 6.0); }\n",
        )
        .unwrap();
        assert!(validate_rules(&clean, &domain).is_empty());

        let dodgy = parse_rules(
            "rule('Battle', [X, Y]) { Wizard(X); kindOf(Y, 'Shield_Class'); near(X, Y, 6.0); }",
        )
        .unwrap();
        let diags = validate_rules(&dodgy, &domain);
        assert_eq!(diags.len(), 2);
        assert!(diags[0].contains("'Wizard'"));
        assert!(diags[1].contains("'Shield_Class'"));
    }
}
