//! Tokenizer for scenario text.
//!
//! Most of the input is free prose; the lexer's job is to pick out the
//! structured islands: keywords, operators, attribute tuples, and the
//! identifier shapes used by scenarios (`Rule X`, `Task A.1`, `FeX`, `FuA`,
//! `Saliency_i`, single capital letters). Consecutive prose words collapse
//! into one `Text` token. Every byte sequence either tokenizes fully or
//! fails with a single positioned error; the lexer never panics.

use super::token::{Keyword, Op, Position, Token, TokenKind};
use super::DslError;

/// `<` opens a tuple when it is directly followed by a letter
/// (`Rule A <Feature FeA>`, `WHEN <Task A.1 is the main subtask>`);
/// a spaced `<` is the less-than operator (`n < N`).
pub fn tokenize(source: &str) -> Result<Vec<Token>, DslError> {
    let mut lx = Lexer {
        tokens: Vec::new(),
        text_run: Vec::new(),
        text_pos: Position { line: 0, col: 0 },
        tuple_open: None,
    };

    for (line_idx, line) in source.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        lx.lex_line(line_idx + 1, line)?;
        lx.flush_text();
    }
    lx.flush_text();

    if let Some(pos) = lx.tuple_open {
        return Err(DslError::UnterminatedTuple(pos));
    }
    Ok(lx.tokens)
}

struct Lexer {
    tokens: Vec<Token>,
    text_run: Vec<String>,
    text_pos: Position,
    tuple_open: Option<Position>,
}

impl Lexer {
    fn lex_line(&mut self, line_no: usize, line: &str) -> Result<(), DslError> {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let pos = Position {
                line: line_no,
                col: i + 1,
            };
            match c {
                ',' => self.push(TokenKind::Comma, pos),
                ';' => self.push(TokenKind::Semicolon, pos),
                '.' => self.push(TokenKind::Period, pos),
                '{' => self.push(TokenKind::SetOpen, pos),
                '}' => self.push(TokenKind::SetClose, pos),
                '(' => self.push(TokenKind::ParenOpen, pos),
                ')' => self.push(TokenKind::ParenClose, pos),
                '∩' => self.push(TokenKind::Operator(Op::Intersect), pos),
                '⊂' => self.push(TokenKind::Operator(Op::Subset), pos),
                '⊇' => self.push(TokenKind::Operator(Op::Superset), pos),
                '∅' => self.push(TokenKind::Operator(Op::Empty), pos),
                '≠' => self.push(TokenKind::Operator(Op::Ne), pos),
                '≫' => self.push(TokenKind::Operator(Op::FarExceeds), pos),
                '=' => self.push(TokenKind::Operator(Op::Eq), pos),
                '-' => self.push(TokenKind::Operator(Op::Minus), pos),
                '!' => {
                    if chars.get(i + 1) == Some(&'=') {
                        self.push(TokenKind::Operator(Op::Ne), pos);
                        i += 1;
                    } else {
                        return Err(DslError::UnknownSymbol(pos));
                    }
                }
                '>' => {
                    if self.tuple_open.is_some() {
                        self.tuple_open = None;
                        self.push(TokenKind::TupleClose, pos);
                    } else if chars.get(i + 1) == Some(&'>') {
                        self.push(TokenKind::Operator(Op::FarExceeds), pos);
                        i += 1;
                    } else {
                        self.push(TokenKind::Operator(Op::Gt), pos);
                    }
                }
                '<' => {
                    let next_alpha = chars.get(i + 1).is_some_and(|n| n.is_alphabetic());
                    if self.tuple_open.is_none() && next_alpha {
                        self.tuple_open = Some(pos);
                        self.push(TokenKind::TupleOpen, pos);
                    } else {
                        self.push(TokenKind::Operator(Op::Lt), pos);
                    }
                }
                '"' | '\u{201c}' => {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j] != '"' && chars[j] != '\u{201d}' {
                        j += 1;
                    }
                    if j == chars.len() {
                        return Err(DslError::UnknownSymbol(pos));
                    }
                    let content: String = chars[i + 1..j].iter().collect();
                    self.push(TokenKind::Quoted(content), pos);
                    i = j;
                }
                '0'..='9' => {
                    let mut j = i;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    let digits: String = chars[i..j].iter().collect();
                    let value = digits
                        .parse::<i64>()
                        .map_err(|_| DslError::UnknownSymbol(pos))?;
                    self.push(TokenKind::Number(value), pos);
                    i = j - 1;
                }
                c if c.is_alphabetic() => {
                    i = self.lex_word(&chars, i, pos);
                    continue;
                }
                _ => return Err(DslError::UnknownSymbol(pos)),
            }
            i += 1;
        }
        Ok(())
    }

    /// Lexes one word starting at `i`, classifying it as keyword, operator
    /// alias, identifier, or prose. Returns the index after the word.
    fn lex_word(&mut self, chars: &[char], i: usize, pos: Position) -> usize {
        let (word, mut next) = read_word(chars, i);

        match word.as_str() {
            "IF" => self.push(TokenKind::Keyword(Keyword::If), pos),
            "WHEN" => self.push(TokenKind::Keyword(Keyword::When), pos),
            "THEN" => self.push(TokenKind::Keyword(Keyword::Then), pos),
            "AND" => self.push(TokenKind::Keyword(Keyword::And), pos),
            "OR" => self.push(TokenKind::Keyword(Keyword::Or), pos),
            "INTERSECT" => self.push(TokenKind::Operator(Op::Intersect), pos),
            "SUBSET" => self.push(TokenKind::Operator(Op::Subset), pos),
            "SUPERSET" => self.push(TokenKind::Operator(Op::Superset), pos),
            "EMPTY" => self.push(TokenKind::Operator(Op::Empty), pos),
            "Rule" | "Task" => {
                if let Some((name, after)) = self.peek_entity_name(chars, next, &word) {
                    self.push(TokenKind::Ident(format!("{word} {name}")), pos);
                    next = after;
                } else {
                    self.text_word(word, pos);
                }
            }
            _ => {
                if is_identifier_word(&word, chars, next, self.tokens.last()) {
                    self.push(TokenKind::Ident(word), pos);
                } else {
                    self.text_word(word, pos);
                }
            }
        }
        next
    }

    /// After `Rule`/`Task`, tries to read the entity name that follows:
    /// a capital letter, optionally tilde-marked (`X~`) for rules or
    /// dot-numbered (`A.1`) for tasks.
    fn peek_entity_name(
        &self,
        chars: &[char],
        mut i: usize,
        kind: &str,
    ) -> Option<(String, usize)> {
        while i < chars.len() && chars[i] == ' ' {
            i += 1;
        }
        if i >= chars.len() || !chars[i].is_alphabetic() {
            return None;
        }
        let (name, after) = read_word(chars, i);
        let mut cs = name.chars();
        let head_upper = cs.next().is_some_and(|c| c.is_ascii_uppercase());
        let tail: String = cs.collect();
        let ok = head_upper
            && match kind {
                "Rule" => tail.is_empty() || tail == "~",
                _ => tail.is_empty() || tail.chars().all(|c| c == '.' || c.is_ascii_alphanumeric()),
            };
        if ok {
            Some((name, after))
        } else {
            None
        }
    }

    fn push(&mut self, kind: TokenKind, pos: Position) {
        self.flush_text();
        self.tokens.push(Token {
            kind,
            position: pos,
        });
    }

    fn text_word(&mut self, word: String, pos: Position) {
        if self.text_run.is_empty() {
            self.text_pos = pos;
        }
        self.text_run.push(word);
    }

    fn flush_text(&mut self) {
        if self.text_run.is_empty() {
            return;
        }
        let text = self.text_run.join(" ");
        self.text_run.clear();
        self.tokens.push(Token {
            kind: TokenKind::Text(text),
            position: self.text_pos,
        });
    }
}

/// Reads a word: a letter followed by letters, digits, `'`, `~`, `_` or `-`,
/// with dotted continuations (`A.1`) merged when a dot is directly followed
/// by an alphanumeric character. A combining tilde normalizes to `~`.
fn read_word(chars: &[char], start: usize) -> (String, usize) {
    let mut word = String::new();
    let mut i = start;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() || c == '\'' || c == '~' || c == '_' || c == '-' {
            word.push(c);
            i += 1;
        } else if c == '\u{0303}' {
            word.push('~');
            i += 1;
        } else if c == '.' && chars.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric()) {
            word.push('.');
            i += 1;
        } else {
            break;
        }
    }
    (word, i)
}

/// Identifier shapes, in a sea of prose:
/// feature/frequency attributes (`FeX`, `FeT_i`, `FuA`), subscripted scores
/// (`Saliency_i`), single capitals (`X`, `N`), and single lowercase letters
/// only when adjacent to an operator (the `n` of `n < N`).
fn is_identifier_word(word: &str, chars: &[char], after: usize, prev: Option<&Token>) -> bool {
    let mut cs = word.chars();
    let first = cs.next().unwrap_or(' ');
    let rest: String = cs.collect();

    if word.len() >= 3 && word.starts_with("Fe") {
        let third = word.chars().nth(2).unwrap_or(' ');
        if third.is_ascii_uppercase() || third == '~' {
            return true;
        }
    }
    if word.len() >= 3 && word.starts_with("Fu") {
        let third = word.chars().nth(2).unwrap_or(' ');
        if third.is_ascii_uppercase() {
            return true;
        }
    }
    if word.len() > 2
        && first.is_ascii_alphabetic()
        && word.contains('_')
        && word.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        return true;
    }
    if word.len() == 1 || (word.len() == 2 && rest == "~") {
        if first.is_ascii_uppercase() {
            return true;
        }
        if first.is_ascii_lowercase() {
            let next_op = next_nonspace(chars, after)
                .is_some_and(|c| matches!(c, '<' | '>' | '=' | '≠' | '≫' | '∩' | '⊂' | '⊇'));
            let prev_op = matches!(
                prev,
                Some(Token {
                    kind: TokenKind::Operator(_),
                    ..
                })
            );
            return next_op || prev_op;
        }
    }
    false
}

fn next_nonspace(chars: &[char], mut i: usize) -> Option<char> {
    while i < chars.len() {
        if !chars[i].is_whitespace() {
            return Some(chars[i]);
        }
        i += 1;
    }
    None
}
