//! Recursive-descent parser over the token stream, including the static
//! checks that need no domain model: arity and argument kinds per
//! property, declared variables, group-variable placement, threshold
//! ranges, duplicate rules.

use super::lexer::{Tok, Token};
use super::{Arg, Binder, Constraint, GroupMode, Prop, PropertyCall, Rule, RuleError, RuleSet};

pub(crate) fn parse(tokens: Vec<Token>) -> Result<RuleSet, RuleError> {
    let mut p = Parser { toks: tokens, i: 0 };
    let mut set = RuleSet::default();
    while !p.done() {
        let rule = p.rule()?;
        if let Some(prev) = set.rules.iter().find(|r| r.to_string() == rule.to_string()) {
            return Err(RuleError::at(
                rule.line,
                1,
                format!(
                    "duplicate rule '{}' (first declared on line {})",
                    rule.name, prev.line
                ),
            ));
        }
        warn_unused_vars(&rule, &mut set.warnings);
        set.rules.push(rule);
    }
    Ok(set)
}

fn warn_unused_vars(rule: &Rule, warnings: &mut Vec<String>) {
    let declared: Vec<&String> = match &rule.binder {
        Binder::Vars(vars) => vars.iter().collect(),
        Binder::Group { var, .. } => vec![var],
    };
    let mut used: Vec<&str> = Vec::new();
    fn collect<'a>(c: &'a Constraint, used: &mut Vec<&'a str>) {
        match c {
            Constraint::Interp { var, .. } | Constraint::KindOf { var, .. } => used.push(var),
            Constraint::Property(p) => {
                for arg in &p.args {
                    if let Arg::Var(v) = arg {
                        used.push(v);
                    }
                }
            }
            Constraint::Any(branches) => branches.iter().for_each(|b| collect(b, used)),
        }
    }
    for c in &rule.constraints {
        collect(c, &mut used);
    }
    for var in declared {
        if !used.contains(&var.as_str()) {
            warnings.push(format!(
                "rule '{}' (line {}): variable '{var}' is declared but never used",
                rule.name, rule.line
            ));
        }
    }
}

/// Binder context for checking constraint arguments.
struct Declared {
    vars: Vec<String>,
    group_var: Option<String>,
}

impl Declared {
    fn knows(&self, var: &str) -> bool {
        self.vars.iter().any(|v| v == var) || self.group_var.as_deref() == Some(var)
    }

    fn is_group(&self, var: &str) -> bool {
        self.group_var.as_deref() == Some(var)
    }
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn done(&self) -> bool {
        self.i >= self.toks.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.i)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.i).cloned();
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.col),
            None => self
                .toks
                .last()
                .map(|t| (t.line, t.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn fail(&self, msg: impl Into<String>) -> RuleError {
        let (line, col) = self.here();
        RuleError::at(line, col, msg)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, RuleError> {
        match self.peek() {
            Some(t) if t.tok == want => Ok(self.bump().unwrap()),
            Some(t) => Err(self.fail(format!("expected {what}, found {}", t.tok))),
            None => Err(self.fail(format!("expected {what}, found end of input"))),
        }
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek().map(|t| &t.tok == want).unwrap_or(false) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn quoted(&mut self, what: &str) -> Result<String, RuleError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Quoted(s)) => {
                self.i += 1;
                Ok(s)
            }
            Some(other) => Err(self.fail(format!("expected {what}, found {other}"))),
            None => Err(self.fail(format!("expected {what}, found end of input"))),
        }
    }

    fn upper(&mut self, what: &str) -> Result<String, RuleError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Upper(s)) => {
                self.i += 1;
                Ok(s)
            }
            Some(other) => Err(self.fail(format!("expected {what}, found {other}"))),
            None => Err(self.fail(format!("expected {what}, found end of input"))),
        }
    }

    fn rule(&mut self) -> Result<Rule, RuleError> {
        let (line, _) = self.here();
        match self.bump().map(|t| t.tok) {
            Some(Tok::Lower(kw)) if kw == "rule" => {}
            Some(other) => return Err(self.fail(format!("expected 'rule', found {other}"))),
            None => return Err(self.fail("expected 'rule'")),
        }
        self.expect(Tok::LParen, "'('")?;
        let name = self.quoted("the quoted rule name")?;
        self.expect(Tok::Comma, "','")?;
        let binder = self.binder()?;
        self.expect(Tok::RParen, "')'")?;
        self.expect(Tok::LBrace, "'{'")?;

        let declared = match &binder {
            Binder::Vars(vars) => Declared {
                vars: vars.clone(),
                group_var: None,
            },
            Binder::Group { var, .. } => Declared {
                vars: vec![],
                group_var: Some(var.clone()),
            },
        };
        let mut constraints = Vec::new();
        loop {
            if constraints.is_empty() && self.peek().map(|t| t.tok == Tok::RBrace).unwrap_or(false)
            {
                return Err(self.fail("expected a constraint"));
            }
            constraints.push(self.constraint(&declared)?);
            let had_semi = self.eat(&Tok::Semi);
            if self.eat(&Tok::RBrace) {
                break;
            }
            if !had_semi {
                return Err(self.fail("expected ';' or '}'"));
            }
            if self.eat(&Tok::RBrace) {
                break;
            }
        }

        let rule = Rule {
            name,
            binder,
            constraints,
            line,
        };
        if let Binder::Group {
            var,
            mode: GroupMode::Maximal,
            ..
        } = &rule.binder
        {
            let has_graph_predicate = rule.constraints.iter().any(|c| match c {
                Constraint::Property(p) => {
                    p.prop.is_group_prop() && p.args.first() == Some(&Arg::Var(var.clone()))
                }
                _ => false,
            });
            if !has_graph_predicate {
                return Err(RuleError::at(
                    rule.line,
                    1,
                    format!(
                        "maximal group rule '{}' needs an absGroup or relGroup constraint on '{var}' to define the proximity graph",
                        rule.name
                    ),
                ));
            }
        }
        Ok(rule)
    }

    fn binder(&mut self) -> Result<Binder, RuleError> {
        if self.eat(&Tok::LBracket) {
            let mut vars = Vec::new();
            if self.eat(&Tok::RBracket) {
                return Err(self.fail("a rule binds at least one variable"));
            }
            loop {
                let (line, col) = self.here();
                let var = self.upper("a variable")?;
                if vars.contains(&var) {
                    return Err(RuleError::at(
                        line,
                        col,
                        format!("duplicate variable '{var}'"),
                    ));
                }
                vars.push(var);
                if self.eat(&Tok::RBracket) {
                    break;
                }
                self.expect(Tok::Comma, "',' or ']'")?;
            }
            return Ok(Binder::Vars(vars));
        }
        match self.bump().map(|t| t.tok) {
            Some(Tok::Lower(kw)) if kw == "group" => {}
            Some(other) => {
                return Err(self.fail(format!(
                    "expected a variable list or group(...), found {other}"
                )))
            }
            None => return Err(self.fail("expected a variable list or group(...)")),
        }
        self.expect(Tok::LParen, "'('")?;
        let var = self.upper("the group variable")?;
        self.expect(Tok::Colon, "':'")?;
        let member = self.quoted("the member interpretation")?;
        let mode = if self.eat(&Tok::Comma) {
            match self.bump().map(|t| t.tok) {
                Some(Tok::Lower(m)) if m == "maximal" => GroupMode::Maximal,
                Some(Tok::Lower(m)) if m == "subsets" => GroupMode::Subsets,
                Some(other) => {
                    return Err(self.fail(format!(
                        "expected group mode 'maximal' or 'subsets', found {other}"
                    )))
                }
                None => return Err(self.fail("expected group mode 'maximal' or 'subsets'")),
            }
        } else {
            GroupMode::Maximal
        };
        self.expect(Tok::RParen, "')'")?;
        Ok(Binder::Group {
            var,
            member_interpretation: member,
            mode,
        })
    }

    fn constraint(&mut self, declared: &Declared) -> Result<Constraint, RuleError> {
        if self.eat(&Tok::LParen) {
            let mut branches = vec![self.atom(declared)?];
            if !self
                .peek()
                .map(|t| matches!(&t.tok, Tok::Lower(k) if k == "or"))
                .unwrap_or(false)
            {
                return Err(
                    self.fail("a parenthesized constraint must be a disjunction: expected 'or'")
                );
            }
            while self.eat(&Tok::Lower("or".into())) {
                branches.push(self.atom(declared)?);
            }
            self.expect(Tok::RParen, "')' closing the disjunction")?;
            return Ok(Constraint::Any(branches));
        }
        self.atom(declared)
    }

    fn atom(&mut self, declared: &Declared) -> Result<Constraint, RuleError> {
        let (line, col) = self.here();
        match self.bump().map(|t| t.tok) {
            Some(Tok::Upper(interpretation)) => {
                self.expect(Tok::LParen, "'('")?;
                let (vline, vcol) = self.here();
                let var = self.upper("a variable")?;
                self.expect(
                    Tok::RParen,
                    "')' (an interpretation check takes one variable)",
                )?;
                self.check_scalar_var(&var, declared, vline, vcol)?;
                Ok(Constraint::Interp {
                    interpretation,
                    var,
                    line,
                })
            }
            Some(Tok::Lower(name)) if name == "kindOf" => {
                self.expect(Tok::LParen, "'('")?;
                let (vline, vcol) = self.here();
                let var = self.upper("a variable")?;
                self.expect(Tok::Comma, "','")?;
                let class = self.quoted("the quoted class name")?;
                self.expect(Tok::RParen, "')'")?;
                self.check_scalar_var(&var, declared, vline, vcol)?;
                Ok(Constraint::KindOf { var, class, line })
            }
            Some(Tok::Lower(name)) => {
                let prop = Prop::from_name(&name).ok_or_else(|| {
                    RuleError::at(line, col, format!("unknown property '{name}'"))
                })?;
                self.expect(Tok::LParen, "'('")?;
                let mut args = Vec::new();
                loop {
                    let arg = match self.bump().map(|t| t.tok) {
                        Some(Tok::Upper(v)) => Arg::Var(v),
                        Some(Tok::Number(n)) => Arg::Number(n),
                        Some(Tok::Quoted(s)) => Arg::Symbol(s),
                        Some(Tok::Lower(s)) => Arg::Symbol(s),
                        Some(other) => {
                            return Err(self.fail(format!("expected an argument, found {other}")))
                        }
                        None => return Err(self.fail("expected an argument")),
                    };
                    args.push(arg);
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(Tok::Comma, "',' or ')'")?;
                }
                let call = PropertyCall { prop, args, line };
                check_property(&call, declared, line, col)?;
                Ok(Constraint::Property(call))
            }
            Some(other) => Err(RuleError::at(
                line,
                col,
                format!("expected a constraint, found {other}"),
            )),
            None => Err(RuleError::at(line, col, "expected a constraint")),
        }
    }

    fn check_scalar_var(
        &self,
        var: &str,
        declared: &Declared,
        line: usize,
        col: usize,
    ) -> Result<(), RuleError> {
        if declared.is_group(var) {
            return Err(RuleError::at(
                line,
                col,
                format!("group variable '{var}' may only be used in absGroup, relGroup, or chained vertical"),
            ));
        }
        if !declared.knows(var) {
            return Err(RuleError::at(
                line,
                col,
                format!("variable '{var}' is not declared in the rule binder"),
            ));
        }
        Ok(())
    }
}

fn check_property(
    call: &PropertyCall,
    declared: &Declared,
    line: usize,
    col: usize,
) -> Result<(), RuleError> {
    let fail = |msg: String| Err(RuleError::at(line, col, msg));
    let name = call.prop.name();

    for arg in &call.args {
        if let Arg::Var(v) = arg {
            if !declared.knows(v) {
                return fail(format!("variable '{v}' is not declared in the rule binder"));
            }
        }
    }
    // a group variable may only stand where a member set is expected
    for (idx, arg) in call.args.iter().enumerate() {
        if let Arg::Var(v) = arg {
            if declared.is_group(v) {
                let allowed = (call.prop.is_group_prop() && idx == 0)
                    || (call.prop == Prop::Vertical && call.args.len() == 1);
                if !allowed {
                    return fail(format!(
                        "group variable '{v}' may only be used in absGroup, relGroup, or chained vertical"
                    ));
                }
            }
        }
    }

    let var_at = |idx: usize| matches!(call.args.get(idx), Some(Arg::Var(_)));
    let two_vars = || var_at(0) && var_at(1);
    let position = |idx: usize, allowed: &[&str]| -> Result<(), RuleError> {
        match &call.args[idx] {
            Arg::Symbol(s) if allowed.contains(&s.as_str()) => Ok(()),
            Arg::Symbol(s) => fail(format!(
                "unknown position '{s}' for {name} (expected one of {})",
                allowed.join(", ")
            )),
            _ => fail(format!(
                "{name} expects a position symbol as its third argument"
            )),
        }
    };
    let threshold = |idx: usize, relative: bool| -> Result<(), RuleError> {
        match &call.args[idx] {
            Arg::Number(n) if relative && (0.0..=1.0).contains(n) => Ok(()),
            Arg::Number(n) if relative => {
                fail(format!("{name} threshold must be within [0, 1], got {n}"))
            }
            Arg::Number(n) if *n >= 0.0 && n.is_finite() => Ok(()),
            Arg::Number(n) => fail(format!("{name} threshold must be >= 0, got {n}")),
            _ => fail(format!("{name} expects a numeric threshold")),
        }
    };

    match call.prop {
        Prop::Horizontal => match call.args.len() {
            2 if two_vars() => Ok(()),
            3 if two_vars() => position(2, &["left", "right"]),
            _ => fail(format!("{name} expects (X, Y) or (X, Y, 'left'|'right')")),
        },
        Prop::Vertical => match call.args.len() {
            1 if var_at(0) => Ok(()),
            2 if two_vars() => Ok(()),
            3 if two_vars() => position(2, &["up", "down"]),
            _ => fail(format!(
                "{name} expects (Xs), (X, Y) or (X, Y, 'up'|'down')"
            )),
        },
        Prop::Diagonal => match call.args.len() {
            2 if two_vars() => Ok(()),
            3 if two_vars() => position(2, &["ne", "nw", "se", "sw"]),
            _ => fail(format!(
                "{name} expects (X, Y) or (X, Y, 'ne'|'nw'|'se'|'sw')"
            )),
        },
        Prop::Disjoint | Prop::Overlap | Prop::Contains => {
            if call.args.len() == 2 && two_vars() {
                Ok(())
            } else {
                fail(format!("{name} expects (X, Y)"))
            }
        }
        Prop::AbsNear | Prop::RelNear => match call.args.len() {
            2 if two_vars() => Ok(()),
            3 if two_vars() => threshold(2, call.prop == Prop::RelNear),
            _ => fail(format!("{name} expects (X, Y) or (X, Y, threshold)")),
        },
        Prop::AbsGroup | Prop::RelGroup => {
            if call.args.len() == 2 && var_at(0) {
                threshold(1, call.prop == Prop::RelGroup)
            } else {
                fail(format!("{name} expects a threshold: {name}(Xs, T)"))
            }
        }
    }
}
