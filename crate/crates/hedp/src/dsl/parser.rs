//! Recursive-descent parser for scenario token streams.
//!
//! A file splits into scenario blocks at lines ending with a period. Inside
//! a block, clauses split at semicolons. Each clause is classified by its
//! leading keyword; clause bodies are parsed into declarations, condition
//! trees, or consequence templates.

use super::ast::{
    AttrSlot, Clause, Condition, Consequence, Expr, PredicateCall, ScenarioAst, VarDecl,
};
use super::render::{render_comparison, render_tokens};
use super::token::{Keyword, Op, Position, Token, TokenKind};
use super::{tokenize, DslError};

/// Metadata carried by `@` directive lines in front of a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScenarioMeta {
    pub id: String,
    pub name: Option<String>,
    pub level: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedScenario {
    pub meta: ScenarioMeta,
    pub ast: ScenarioAst,
}

/// Parses a whole `.eps` file into its scenarios.
pub fn parse_file(source: &str) -> Result<Vec<ParsedScenario>, DslError> {
    let blocks = split_blocks(source)?;
    let mut out = Vec::with_capacity(blocks.len());
    for (index, block) in blocks.into_iter().enumerate() {
        out.push(parse_block(block, index)?);
    }
    Ok(out)
}

/// Parses source holding exactly one scenario (directives optional).
pub fn parse_scenario(source: &str) -> Result<ScenarioAst, DslError> {
    let mut blocks = split_blocks(source)?;
    match blocks.len() {
        1 => Ok(parse_block(blocks.remove(0), 0)?.ast),
        n => Err(DslError::Syntax {
            position: Position { line: 1, col: 1 },
            expected: "exactly one scenario".into(),
            found: format!("{n} scenarios"),
        }),
    }
}

struct Block {
    directives: Vec<(usize, String)>,
    /// Clause text padded with blank lines so token positions match the
    /// original file.
    padded_source: String,
    start_line: usize,
}

fn split_blocks(source: &str) -> Result<Vec<Block>, DslError> {
    let mut blocks = Vec::new();
    let mut directives: Vec<(usize, String)> = Vec::new();
    let mut clause_lines: Vec<(usize, &str)> = Vec::new();

    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('@') {
            if !clause_lines.is_empty() {
                return Err(DslError::Syntax {
                    position: Position {
                        line: line_no,
                        col: 1,
                    },
                    expected: "clause text or scenario terminator".into(),
                    found: "directive inside a scenario".into(),
                });
            }
            directives.push((line_no, rest.trim().to_string()));
            continue;
        }
        clause_lines.push((line_no, line));
        if trimmed.ends_with('.') {
            blocks.push(make_block(
                std::mem::take(&mut directives),
                std::mem::take(&mut clause_lines),
            ));
        }
    }

    if !clause_lines.is_empty() {
        let (line, _) = clause_lines[clause_lines.len() - 1];
        return Err(DslError::Syntax {
            position: Position { line, col: 1 },
            expected: "a period ending the scenario".into(),
            found: "end of file".into(),
        });
    }
    if !directives.is_empty() {
        let (line, _) = directives[directives.len() - 1];
        return Err(DslError::Syntax {
            position: Position { line, col: 1 },
            expected: "scenario clauses after directives".into(),
            found: "end of file".into(),
        });
    }
    Ok(blocks)
}

fn make_block(directives: Vec<(usize, String)>, clause_lines: Vec<(usize, &str)>) -> Block {
    let start_line = clause_lines.first().map_or(1, |(n, _)| *n);
    let mut padded = "\n".repeat(start_line - 1);
    let mut expected = start_line;
    for (line_no, line) in &clause_lines {
        while expected < *line_no {
            padded.push('\n');
            expected += 1;
        }
        padded.push_str(line);
        padded.push('\n');
        expected += 1;
    }
    Block {
        directives,
        padded_source: padded,
        start_line,
    }
}

fn parse_block(block: Block, index: usize) -> Result<ParsedScenario, DslError> {
    let mut meta = ScenarioMeta {
        id: format!("scenario-{}", index + 1),
        ..ScenarioMeta::default()
    };
    for (line_no, directive) in &block.directives {
        let (key, value) = directive
            .split_once(char::is_whitespace)
            .map(|(k, v)| (k, v.trim()))
            .unwrap_or((directive.as_str(), ""));
        let position = Position {
            line: *line_no,
            col: 1,
        };
        if value.is_empty() {
            return Err(DslError::Syntax {
                position,
                expected: "a directive value".into(),
                found: format!("bare `@{key}`"),
            });
        }
        match key {
            "scenario" => meta.id = value.to_string(),
            "name" => meta.name = Some(value.to_string()),
            "level" => meta.level = Some(value.to_string()),
            other => {
                return Err(DslError::Syntax {
                    position,
                    expected: "@scenario, @name or @level".into(),
                    found: format!("@{other}"),
                })
            }
        }
    }

    let tokens = tokenize(&block.padded_source)?;
    let ast = ScenarioParser::new(&meta.id, block.start_line).parse(tokens)?;
    Ok(ParsedScenario { meta, ast })
}

struct RawClause {
    lead: Option<Keyword>,
    tokens: Vec<Token>,
    position: Position,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preconditions,
    Trigger,
}

struct ScenarioParser {
    id: String,
    preconditions: Vec<Clause>,
    bindings: Vec<VarDecl>,
    conditions: Vec<Condition>,
    intermediate_effects: Vec<(usize, Consequence)>,
    pending_then: Vec<Consequence>,
    section: Section,
    last_position: Position,
}

impl ScenarioParser {
    fn new(id: &str, start_line: usize) -> Self {
        Self {
            id: id.to_string(),
            preconditions: Vec::new(),
            bindings: Vec::new(),
            conditions: Vec::new(),
            intermediate_effects: Vec::new(),
            pending_then: Vec::new(),
            section: Section::Preconditions,
            last_position: Position {
                line: start_line,
                col: 1,
            },
        }
    }

    fn parse(mut self, tokens: Vec<Token>) -> Result<ScenarioAst, DslError> {
        let clauses = self.split_clauses(tokens)?;
        for clause in clauses {
            self.last_position = clause.position;
            match clause.lead {
                Some(Keyword::If) => self.take_precondition(clause)?,
                Some(Keyword::When) => {
                    self.enter_trigger();
                    self.take_trigger_clause(clause)?;
                }
                Some(Keyword::Then) => self.take_consequence(clause)?,
                Some(Keyword::And) | Some(Keyword::Or) => self.take_continuation(clause)?,
                None => {
                    if self.section == Section::Trigger && self.pending_then.is_empty() {
                        self.take_trigger_clause(clause)?;
                    } else {
                        return Err(DslError::Syntax {
                            position: clause.position,
                            expected: "IF, WHEN or THEN".into(),
                            found: clause_head(&clause),
                        });
                    }
                }
            }
        }

        if self.pending_then.is_empty() {
            return Err(DslError::MissingThen(self.id));
        }
        if self.section != Section::Trigger {
            return Err(DslError::Syntax {
                position: self.last_position,
                expected: "at least one WHEN clause".into(),
                found: "scenario without trigger conditions".into(),
            });
        }

        let ast = ScenarioAst {
            scenario_id: self.id,
            preconditions: self.preconditions,
            bindings: self.bindings,
            trigger_conditions: self.conditions,
            intermediate_effects: self.intermediate_effects,
            consequences: self.pending_then,
        };
        check_bound_variables(&ast)?;
        Ok(ast)
    }

    fn split_clauses(&self, tokens: Vec<Token>) -> Result<Vec<RawClause>, DslError> {
        let mut clauses = Vec::new();
        let mut current: Vec<Token> = Vec::new();
        let mut ended = false;
        for token in tokens {
            if ended {
                return Err(DslError::Syntax {
                    position: token.position,
                    expected: "end of scenario".into(),
                    found: "content after the terminating period".into(),
                });
            }
            match token.kind {
                TokenKind::Semicolon => {
                    clauses.push(self.finish_clause(&mut current, token.position)?);
                }
                TokenKind::Period => {
                    clauses.push(self.finish_clause(&mut current, token.position)?);
                    ended = true;
                }
                _ => current.push(token),
            }
        }
        if !current.is_empty() {
            let position = current[0].position;
            return Err(DslError::Syntax {
                position,
                expected: "a period ending the scenario".into(),
                found: "unterminated clause".into(),
            });
        }
        Ok(clauses)
    }

    fn finish_clause(
        &self,
        tokens: &mut Vec<Token>,
        terminator: Position,
    ) -> Result<RawClause, DslError> {
        let mut tokens = std::mem::take(tokens);
        if tokens.is_empty() {
            return Err(DslError::Syntax {
                position: terminator,
                expected: "a clause".into(),
                found: "empty clause".into(),
            });
        }
        let position = tokens[0].position;
        let lead = match tokens.first().map(|t| &t.kind) {
            Some(TokenKind::Keyword(k)) => {
                let k = *k;
                tokens.remove(0);
                Some(k)
            }
            _ => None,
        };
        if tokens.is_empty() {
            return Err(DslError::Syntax {
                position,
                expected: "clause body".into(),
                found: "bare keyword".into(),
            });
        }
        Ok(RawClause {
            lead,
            tokens,
            position,
        })
    }

    fn enter_trigger(&mut self) {
        if self.section == Section::Trigger && !self.pending_then.is_empty() {
            let after = self.conditions.len().saturating_sub(1);
            for effect in self.pending_then.drain(..) {
                self.intermediate_effects.push((after, effect));
            }
        }
        self.section = Section::Trigger;
    }

    fn take_continuation(&mut self, clause: RawClause) -> Result<(), DslError> {
        match self.section {
            Section::Preconditions if self.pending_then.is_empty() => {
                if clause.lead == Some(Keyword::Or) {
                    return Err(DslError::Syntax {
                        position: clause.position,
                        expected: "AND continuation of preconditions".into(),
                        found: "OR".into(),
                    });
                }
                self.take_precondition(clause)
            }
            _ if !self.pending_then.is_empty() => self.take_consequence(clause),
            _ => self.take_trigger_clause(clause),
        }
    }

    fn take_precondition(&mut self, clause: RawClause) -> Result<(), DslError> {
        if !self.pending_then.is_empty() {
            self.enter_trigger();
        }
        let decls = parse_declarations(&clause.tokens)?;
        self.preconditions.push(Clause {
            text: render_tokens(&clause.tokens),
            decls,
        });
        Ok(())
    }

    fn take_trigger_clause(&mut self, clause: RawClause) -> Result<(), DslError> {
        self.enter_trigger();
        let items = split_items(&clause.tokens);
        let mut conds: Vec<Condition> = Vec::new();
        let mut connective: Option<Keyword> = None;
        for item in items {
            if let Some(decl) = try_existential(&item)? {
                if item.connective == Some(Keyword::Or) {
                    return Err(DslError::Syntax {
                        position: item.position,
                        expected: "AND before a There Exists binding".into(),
                        found: "OR".into(),
                    });
                }
                self.bindings.push(decl);
                continue;
            }
            if let Some(kw) = item.connective {
                match connective {
                    None => connective = Some(kw),
                    Some(prev) if prev == kw => {}
                    Some(_) => {
                        return Err(DslError::Syntax {
                            position: item.position,
                            expected: "a single connective per clause".into(),
                            found: "mixed AND/OR".into(),
                        })
                    }
                }
            }
            conds.push(parse_condition_item(&item)?);
        }
        match conds.len() {
            0 => {}
            1 => self.conditions.push(conds.remove(0)),
            _ => self.conditions.push(match connective {
                Some(Keyword::Or) => Condition::Any(conds),
                _ => Condition::All(conds),
            }),
        }
        Ok(())
    }

    fn take_consequence(&mut self, clause: RawClause) -> Result<(), DslError> {
        if self.section != Section::Trigger {
            return Err(DslError::Syntax {
                position: clause.position,
                expected: "a WHEN clause before THEN".into(),
                found: "THEN".into(),
            });
        }
        let refs = clause
            .tokens
            .iter()
            .filter_map(|t| match &t.kind {
                TokenKind::Ident(name) => Some(name.clone()),
                _ => None,
            })
            .collect();
        self.pending_then.push(Consequence {
            text: render_tokens(&clause.tokens),
            refs,
        });
        Ok(())
    }
}

fn clause_head(clause: &RawClause) -> String {
    match clause.tokens.first().map(|t| &t.kind) {
        Some(TokenKind::Text(t)) => format!("`{}`", t.split(' ').next().unwrap_or("")),
        Some(TokenKind::Ident(i)) => format!("`{i}`"),
        _ => "unexpected clause".into(),
    }
}

struct ClauseItem {
    connective: Option<Keyword>,
    tokens: Vec<Token>,
    position: Position,
}

/// Splits a clause body at top-level commas, peeling an `AND`/`OR` keyword
/// off the front of each item. The clause's own lead keyword is a joiner
/// between clauses and never counts as an item connective.
fn split_items(tokens: &[Token]) -> Vec<ClauseItem> {
    let mut items = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut depth = 0usize;

    let flush = |current: &mut Vec<Token>, items: &mut Vec<ClauseItem>| {
        if current.is_empty() {
            return;
        }
        let mut toks = std::mem::take(current);
        let position = toks[0].position;
        let connective = match toks.first().map(|t| &t.kind) {
            Some(TokenKind::Keyword(k @ (Keyword::And | Keyword::Or))) => {
                let k = *k;
                toks.remove(0);
                Some(k)
            }
            _ => None,
        };
        if toks.is_empty() {
            return;
        }
        items.push(ClauseItem {
            connective,
            tokens: toks,
            position,
        });
    };

    for token in tokens {
        match token.kind {
            TokenKind::TupleOpen | TokenKind::SetOpen | TokenKind::ParenOpen => depth += 1,
            TokenKind::TupleClose | TokenKind::SetClose | TokenKind::ParenClose => {
                depth = depth.saturating_sub(1)
            }
            TokenKind::Comma if depth == 0 => {
                flush(&mut current, &mut items);
                continue;
            }
            _ => {}
        }
        current.push(token.clone());
    }
    flush(&mut current, &mut items);
    items
}

/// Recognizes `There Exists <entity> <tuple>?` and returns its declaration.
fn try_existential(item: &ClauseItem) -> Result<Option<VarDecl>, DslError> {
    match item.tokens.first().map(|t| &t.kind) {
        Some(TokenKind::Text(t)) if t == "There Exists" => {}
        _ => return Ok(None),
    }
    let name = match item.tokens.get(1).map(|t| &t.kind) {
        Some(TokenKind::Ident(name)) => name.clone(),
        _ => {
            return Err(DslError::Syntax {
                position: item.position,
                expected: "an entity after There Exists".into(),
                found: clause_fragment(&item.tokens[1..]),
            })
        }
    };
    let attrs = match item.tokens.get(2).map(|t| &t.kind) {
        None => Vec::new(),
        Some(TokenKind::TupleOpen) => parse_attr_tuple(&item.tokens[2..], item.position)?,
        _ => {
            return Err(DslError::Syntax {
                position: item.position,
                expected: "an attribute tuple or end of binding".into(),
                found: clause_fragment(&item.tokens[2..]),
            })
        }
    };
    Ok(Some(VarDecl {
        name,
        attrs,
        children: Vec::new(),
    }))
}

/// Parses the declarations of an `IF` clause: entities with attribute
/// tuples, composite declarations (`Task A = {Task A.1, Task A.2}`), and
/// bare entity mentions.
fn parse_declarations(tokens: &[Token]) -> Result<Vec<VarDecl>, DslError> {
    let mut decls = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let TokenKind::Ident(name) = &tokens[i].kind else {
            i += 1;
            continue;
        };
        let name = name.clone();
        match tokens.get(i + 1).map(|t| &t.kind) {
            Some(TokenKind::TupleOpen) => {
                let end = matching_close(tokens, i + 1, TokenKind::TupleClose);
                let end = end.ok_or(DslError::UnterminatedTuple(tokens[i + 1].position))?;
                let attrs = parse_attr_tuple(&tokens[i + 1..=end], tokens[i + 1].position)?;
                decls.push(VarDecl {
                    name,
                    attrs,
                    children: Vec::new(),
                });
                i = end + 1;
            }
            Some(TokenKind::Operator(Op::Eq)) => {
                let (children, next) = parse_composite(tokens, i + 2)?;
                decls.push(VarDecl {
                    name,
                    attrs: Vec::new(),
                    children,
                });
                i = next;
            }
            _ => {
                decls.push(VarDecl {
                    name,
                    attrs: Vec::new(),
                    children: Vec::new(),
                });
                i += 1;
            }
        }
    }
    Ok(decls)
}

fn matching_close(tokens: &[Token], open: usize, close: TokenKind) -> Option<usize> {
    tokens[open + 1..]
        .iter()
        .position(|t| t.kind == close)
        .map(|off| open + 1 + off)
}

/// Parses `<Slot Var, Slot Var, …>` given tokens starting at `TupleOpen`
/// and ending at the matching `TupleClose`.
fn parse_attr_tuple(tokens: &[Token], position: Position) -> Result<Vec<AttrSlot>, DslError> {
    let close = tokens
        .iter()
        .position(|t| t.kind == TokenKind::TupleClose)
        .ok_or(DslError::UnterminatedTuple(position))?;
    let inner = &tokens[1..close];
    let mut attrs = Vec::new();
    for slot in inner.split(|t| t.kind == TokenKind::Comma) {
        match slot {
            [Token {
                kind: TokenKind::Text(phrase),
                ..
            }, Token {
                kind: TokenKind::Ident(var),
                ..
            }] => attrs.push(AttrSlot {
                slot: phrase.clone(),
                var: var.clone(),
            }),
            other => {
                return Err(DslError::Syntax {
                    position: other.first().map_or(position, |t| t.position),
                    expected: "`Slot-phrase Variable` inside the tuple".into(),
                    found: clause_fragment(other),
                })
            }
        }
    }
    Ok(attrs)
}

fn parse_composite(tokens: &[Token], start: usize) -> Result<(Vec<String>, usize), DslError> {
    let position = tokens.get(start).map_or(tokens[0].position, |t| t.position);
    if tokens.get(start).map(|t| &t.kind) != Some(&TokenKind::SetOpen) {
        return Err(DslError::Syntax {
            position,
            expected: "`{` after `=` in a composite declaration".into(),
            found: clause_fragment(&tokens[start..]),
        });
    }
    let close = matching_close(tokens, start, TokenKind::SetClose).ok_or(DslError::Syntax {
        position,
        expected: "`}` closing the composite declaration".into(),
        found: "end of clause".into(),
    })?;
    let mut children = Vec::new();
    for part in tokens[start + 1..close].split(|t| t.kind == TokenKind::Comma) {
        match part {
            [Token {
                kind: TokenKind::Ident(name),
                ..
            }] => children.push(name.clone()),
            other => {
                return Err(DslError::Syntax {
                    position: other.first().map_or(position, |t| t.position),
                    expected: "an entity name".into(),
                    found: clause_fragment(other),
                })
            }
        }
    }
    Ok((children, close + 1))
}

/// Parses one comma-delimited item of a trigger clause: either a bracketed
/// or free-text phrase condition, or a comparison chain over expressions.
fn parse_condition_item(item: &ClauseItem) -> Result<Condition, DslError> {
    let tokens = &item.tokens;
    if tokens.first().map(|t| &t.kind) == Some(&TokenKind::TupleOpen)
        && tokens.last().map(|t| &t.kind) == Some(&TokenKind::TupleClose)
    {
        return parse_phrase(&tokens[1..tokens.len() - 1], item.position);
    }
    let has_comparison = {
        let mut depth = 0usize;
        tokens.iter().any(|t| match &t.kind {
            TokenKind::TupleOpen | TokenKind::SetOpen | TokenKind::ParenOpen => {
                depth += 1;
                false
            }
            TokenKind::TupleClose | TokenKind::SetClose | TokenKind::ParenClose => {
                depth = depth.saturating_sub(1);
                false
            }
            TokenKind::Operator(op) => depth == 0 && op.is_comparison(),
            _ => false,
        })
    };
    if has_comparison {
        parse_comparison_chain(tokens, item.position)
    } else {
        parse_phrase(tokens, item.position)
    }
}

/// A free-text condition such as `Task A.1 is the main subtask` becomes a
/// predicate call: the prose words (lowercased, underscore-joined) name the
/// predicate, the identifiers and literals are its arguments in order.
fn parse_phrase(tokens: &[Token], position: Position) -> Result<Condition, DslError> {
    let mut name_words: Vec<String> = Vec::new();
    let mut args = Vec::new();
    for token in tokens {
        match &token.kind {
            TokenKind::Text(text) => {
                for word in text.split(' ') {
                    let cleaned: String = word
                        .chars()
                        .filter(|c| c.is_ascii_alphanumeric())
                        .flat_map(|c| c.to_lowercase())
                        .collect();
                    if !cleaned.is_empty() {
                        name_words.push(cleaned);
                    }
                }
            }
            TokenKind::Ident(name) => args.push(Expr::Var(name.clone())),
            TokenKind::Quoted(text) => args.push(Expr::Quoted(text.clone())),
            TokenKind::Number(n) => args.push(Expr::Num(*n)),
            _ => {
                return Err(DslError::Syntax {
                    position: token.position,
                    expected: "prose, identifiers or literals in a condition phrase".into(),
                    found: clause_fragment(std::slice::from_ref(token)),
                })
            }
        }
    }
    if name_words.is_empty() {
        return Err(DslError::Syntax {
            position,
            expected: "a condition phrase".into(),
            found: clause_fragment(tokens),
        });
    }
    Ok(Condition::Pred(PredicateCall {
        name: name_words.join("_"),
        args,
        text: render_tokens(tokens),
    }))
}

/// Parses `a ⊇ b ≠ ∅`-style chains. A chain of n comparisons becomes a
/// conjunction of n predicates sharing their middle operands.
fn parse_comparison_chain(tokens: &[Token], position: Position) -> Result<Condition, DslError> {
    let mut cursor = ExprCursor {
        tokens,
        index: 0,
        position,
    };
    let first = cursor.parse_set_expr()?;
    let mut preds = Vec::new();
    let mut lhs = first;
    while cursor.index < tokens.len() {
        let op = match &tokens[cursor.index].kind {
            TokenKind::Operator(op) if op.is_comparison() => *op,
            _ => {
                return Err(DslError::Syntax {
                    position: tokens[cursor.index].position,
                    expected: "a comparison operator".into(),
                    found: clause_fragment(&tokens[cursor.index..]),
                })
            }
        };
        cursor.index += 1;
        let rhs = cursor.parse_set_expr()?;
        preds.push(Condition::Pred(comparison(op, lhs.clone(), rhs.clone())));
        lhs = rhs;
    }
    if preds.is_empty() {
        return Err(DslError::Syntax {
            position,
            expected: "a comparison".into(),
            found: clause_fragment(tokens),
        });
    }
    Ok(if preds.len() == 1 {
        preds.remove(0)
    } else {
        Condition::All(preds)
    })
}

pub(super) fn comparison(op: Op, lhs: Expr, rhs: Expr) -> PredicateCall {
    let name = match op {
        Op::Superset => "superset",
        Op::Subset => "subset",
        Op::FarExceeds => "far_exceeds",
        Op::Eq => "eq",
        Op::Ne => "ne",
        Op::Gt => "gt",
        Op::Lt => "lt",
        Op::Intersect | Op::Minus | Op::Empty => unreachable!("not a comparison"),
    };
    let text = render_comparison(op, &lhs, &rhs);
    PredicateCall {
        name: name.into(),
        args: vec![lhs, rhs],
        text,
    }
}

struct ExprCursor<'a> {
    tokens: &'a [Token],
    index: usize,
    position: Position,
}

impl ExprCursor<'_> {
    fn parse_set_expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.parse_primary()?;
        loop {
            match self.peek() {
                Some(TokenKind::Operator(Op::Intersect)) => {
                    self.index += 1;
                    let rhs = self.parse_primary()?;
                    lhs = Expr::Intersect(Box::new(lhs), Box::new(rhs));
                }
                Some(TokenKind::Operator(Op::Minus)) => {
                    self.index += 1;
                    let rhs = self.parse_primary()?;
                    lhs = Expr::Minus(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_primary(&mut self) -> Result<Expr, DslError> {
        let token = self
            .tokens
            .get(self.index)
            .ok_or_else(|| DslError::Syntax {
                position: self.position,
                expected: "an expression".into(),
                found: "end of condition".into(),
            })?;
        let position = token.position;
        match &token.kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.index += 1;
                if self.peek() == Some(&TokenKind::ParenOpen) {
                    self.index += 1;
                    let mut args = Vec::new();
                    loop {
                        if self.peek() == Some(&TokenKind::ParenClose) {
                            self.index += 1;
                            break;
                        }
                        args.push(self.parse_set_expr()?);
                        match self.peek() {
                            Some(TokenKind::Comma) => self.index += 1,
                            Some(TokenKind::ParenClose) => {}
                            _ => {
                                return Err(DslError::Syntax {
                                    position,
                                    expected: "`,` or `)` in a call".into(),
                                    found: "end of condition".into(),
                                })
                            }
                        }
                    }
                    Ok(Expr::Call { name, args })
                } else {
                    Ok(Expr::Var(name))
                }
            }
            TokenKind::Number(n) => {
                self.index += 1;
                Ok(Expr::Num(*n))
            }
            TokenKind::Quoted(text) => {
                self.index += 1;
                Ok(Expr::Quoted(text.clone()))
            }
            TokenKind::Operator(Op::Empty) => {
                self.index += 1;
                Ok(Expr::Empty)
            }
            TokenKind::SetOpen => {
                self.index += 1;
                let inner = self.parse_set_expr()?;
                if self.peek() != Some(&TokenKind::SetClose) {
                    return Err(DslError::Syntax {
                        position,
                        expected: "`}` closing the set expression".into(),
                        found: "end of condition".into(),
                    });
                }
                self.index += 1;
                Ok(inner)
            }
            other => Err(DslError::Syntax {
                position,
                expected: "an identifier, literal, `∅` or `{`".into(),
                found: format!("{other:?}"),
            }),
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.index).map(|t| &t.kind)
    }
}

fn clause_fragment(tokens: &[Token]) -> String {
    if tokens.is_empty() {
        "nothing".into()
    } else {
        format!("`{}`", render_tokens(&tokens[..tokens.len().min(6)]))
    }
}

/// Every identifier used in trigger conditions must be declared by an `IF`
/// clause, a `There Exists` binding, an attribute slot, or a composite
/// child. In consequences, structured identifiers are held to the same
/// rule; bare single letters demote to template text.
fn check_bound_variables(ast: &ScenarioAst) -> Result<(), DslError> {
    let mut declared: Vec<&str> = Vec::new();
    for decl in ast.free_variables() {
        declared.push(&decl.name);
        for attr in &decl.attrs {
            declared.push(&attr.var);
        }
        for child in &decl.children {
            declared.push(child);
        }
    }

    let check = |name: &str, structured_only: bool| -> Result<(), DslError> {
        let structured = name.contains(' ') || name.contains('_') || name.len() > 2;
        if structured_only && !structured {
            return Ok(());
        }
        if declared.contains(&name) {
            Ok(())
        } else {
            Err(DslError::UnboundVariable(name.to_string()))
        }
    };

    for condition in &ast.trigger_conditions {
        visit_vars(condition, &mut |name| check(name, false))?;
    }
    for (_, effect) in &ast.intermediate_effects {
        for name in &effect.refs {
            check(name, true)?;
        }
    }
    for consequence in &ast.consequences {
        for name in &consequence.refs {
            check(name, true)?;
        }
    }
    Ok(())
}

fn visit_vars(
    condition: &Condition,
    f: &mut impl FnMut(&str) -> Result<(), DslError>,
) -> Result<(), DslError> {
    match condition {
        Condition::All(items) | Condition::Any(items) => {
            for item in items {
                visit_vars(item, f)?;
            }
        }
        Condition::Pred(pred) => {
            for arg in &pred.args {
                visit_expr_vars(arg, f)?;
            }
        }
    }
    Ok(())
}

fn visit_expr_vars(
    expr: &Expr,
    f: &mut impl FnMut(&str) -> Result<(), DslError>,
) -> Result<(), DslError> {
    match expr {
        Expr::Var(name) => f(name)?,
        Expr::Intersect(a, b) | Expr::Minus(a, b) => {
            visit_expr_vars(a, f)?;
            visit_expr_vars(b, f)?;
        }
        Expr::Call { args, .. } => {
            for arg in args {
                visit_expr_vars(arg, f)?;
            }
        }
        Expr::Num(_) | Expr::Empty | Expr::Quoted(_) => {}
    }
    Ok(())
}
