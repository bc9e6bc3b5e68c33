//! Canonical printer for scenario ASTs.
//!
//! Rendering always emits the Unicode operator forms, one clause per line,
//! with `AND` continuation lines and a period closing the scenario.
//! Parsing a rendered scenario yields the original AST.

use super::ast::{Condition, Expr, ScenarioAst, VarDecl};
use super::token::{Op, Token, TokenKind};

/// Prints a scenario in canonical form, including its `@scenario` header.
pub fn render_scenario(ast: &ScenarioAst) -> String {
    let mut lines: Vec<String> = Vec::new();
    if !ast.scenario_id.is_empty() {
        lines.push(format!("@scenario {}", ast.scenario_id));
    }

    for (i, clause) in ast.preconditions.iter().enumerate() {
        let lead = if i == 0 { "IF" } else { "AND" };
        lines.push(format!("{lead} {};", clause.text));
    }

    let mut intermediates = ast.intermediate_effects.iter().peekable();
    let mut when_pending = true;
    for binding in &ast.bindings {
        let lead = if when_pending { "WHEN" } else { "AND" };
        when_pending = false;
        lines.push(format!("{lead} {};", render_binding(binding)));
    }
    for (index, condition) in ast.trigger_conditions.iter().enumerate() {
        let lead = if when_pending { "WHEN" } else { "AND" };
        when_pending = false;
        lines.push(format!("{lead} {};", render_condition(condition)));
        while intermediates
            .peek()
            .is_some_and(|(after, _)| *after == index)
        {
            let (_, effect) = intermediates.next().unwrap();
            lines.push(format!("THEN {};", effect.text));
            when_pending = true;
        }
    }

    for (i, consequence) in ast.consequences.iter().enumerate() {
        let lead = if i == 0 { "THEN" } else { "AND" };
        let end = if i + 1 == ast.consequences.len() {
            "."
        } else {
            ";"
        };
        lines.push(format!("{lead} {}{end}", consequence.text));
    }

    lines.join("\n") + "\n"
}

fn render_binding(decl: &VarDecl) -> String {
    let mut out = format!("There Exists {}", decl.name);
    if !decl.attrs.is_empty() {
        let slots: Vec<String> = decl
            .attrs
            .iter()
            .map(|a| format!("{} {}", a.slot, a.var))
            .collect();
        out.push_str(&format!(" <{}>", slots.join(", ")));
    }
    out
}

fn render_condition(condition: &Condition) -> String {
    match condition {
        Condition::Pred(pred) => pred.text.clone(),
        Condition::All(items) => {
            if let Some(chain) = render_chain(items) {
                chain
            } else {
                join_items(items, "AND")
            }
        }
        Condition::Any(items) => join_items(items, "OR"),
    }
}

fn join_items(items: &[Condition], connective: &str) -> String {
    items
        .iter()
        .map(render_condition)
        .collect::<Vec<_>>()
        .join(&format!(", {connective} "))
}

/// Re-sugars a conjunction of comparisons with shared middle operands back
/// into an operator chain such as `{A ∩ B} ⊇ {A ∩ C} ≠ ∅`.
fn render_chain(items: &[Condition]) -> Option<String> {
    let mut parts: Vec<(Op, &Expr, &Expr)> = Vec::with_capacity(items.len());
    for item in items {
        let Condition::Pred(pred) = item else {
            return None;
        };
        let op = comparison_op(&pred.name)?;
        let [lhs, rhs] = pred.args.as_slice() else {
            return None;
        };
        parts.push((op, lhs, rhs));
    }
    if parts.len() < 2 {
        return None;
    }
    for pair in parts.windows(2) {
        if pair[0].2 != pair[1].1 {
            return None;
        }
    }
    let mut out = render_expr(parts[0].1);
    for (op, _, rhs) in &parts {
        out.push_str(&format!(" {} {}", op.as_str(), render_expr(rhs)));
    }
    Some(out)
}

fn comparison_op(name: &str) -> Option<Op> {
    Some(match name {
        "superset" => Op::Superset,
        "subset" => Op::Subset,
        "far_exceeds" => Op::FarExceeds,
        "eq" => Op::Eq,
        "ne" => Op::Ne,
        "gt" => Op::Gt,
        "lt" => Op::Lt,
        _ => return None,
    })
}

pub(super) fn render_comparison(op: Op, lhs: &Expr, rhs: &Expr) -> String {
    format!("{} {} {}", render_expr(lhs), op.as_str(), render_expr(rhs))
}

/// Prints an expression. Intersections are brace-wrapped so they read as
/// set values inside comparisons; differences bind tightly enough alone.
pub fn render_expr(expr: &Expr) -> String {
    match expr {
        Expr::Var(name) => name.clone(),
        Expr::Num(n) => n.to_string(),
        Expr::Empty => Op::Empty.as_str().to_string(),
        Expr::Quoted(text) => format!("\"{text}\""),
        Expr::Intersect(a, b) => format!(
            "{{{} {} {}}}",
            render_expr(a),
            Op::Intersect.as_str(),
            render_expr(b)
        ),
        Expr::Minus(a, b) => format!("{} - {}", render_expr(a), render_expr(b)),
        Expr::Call { name, args } => {
            let rendered: Vec<String> = args.iter().map(render_expr).collect();
            format!("{}({})", name, rendered.join(", "))
        }
    }
}

/// Replays raw tokens with canonical spacing; used for clause and
/// consequence texts captured during parsing.
pub(super) fn render_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, token) in tokens.iter().enumerate() {
        if i > 0 && space_before(&token.kind) && space_after(&tokens[i - 1].kind) {
            out.push(' ');
        }
        match &token.kind {
            TokenKind::Keyword(k) => out.push_str(k.as_str()),
            TokenKind::Ident(name) => out.push_str(name),
            TokenKind::Text(text) => out.push_str(text),
            TokenKind::Quoted(text) => {
                out.push('"');
                out.push_str(text);
                out.push('"');
            }
            TokenKind::Number(n) => out.push_str(&n.to_string()),
            TokenKind::Operator(op) => out.push_str(op.as_str()),
            TokenKind::TupleOpen => out.push('<'),
            TokenKind::TupleClose => out.push('>'),
            TokenKind::SetOpen => out.push('{'),
            TokenKind::SetClose => out.push('}'),
            TokenKind::ParenOpen => out.push('('),
            TokenKind::ParenClose => out.push(')'),
            TokenKind::Comma => out.push(','),
            TokenKind::Semicolon => out.push(';'),
            TokenKind::Period => out.push('.'),
        }
    }
    out
}

fn space_before(kind: &TokenKind) -> bool {
    !matches!(
        kind,
        TokenKind::TupleClose
            | TokenKind::SetClose
            | TokenKind::ParenClose
            | TokenKind::ParenOpen
            | TokenKind::Comma
            | TokenKind::Semicolon
            | TokenKind::Period
    )
}

fn space_after(kind: &TokenKind) -> bool {
    !matches!(
        kind,
        TokenKind::TupleOpen | TokenKind::SetOpen | TokenKind::ParenOpen
    )
}
