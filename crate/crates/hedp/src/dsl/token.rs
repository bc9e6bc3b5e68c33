use serde::{Deserialize, Serialize};

/// Line/column pair, both 1-based, pointing into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Keyword {
    If,
    When,
    Then,
    And,
    Or,
}

impl Keyword {
    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::If => "IF",
            Keyword::When => "WHEN",
            Keyword::Then => "THEN",
            Keyword::And => "AND",
            Keyword::Or => "OR",
        }
    }
}

/// Relational and set operators, stored in canonical (Unicode) form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    /// `∩`, alias `INTERSECT`
    Intersect,
    /// `-` between set expressions
    Minus,
    /// `⊂`, alias `SUBSET`
    Subset,
    /// `⊇`, alias `SUPERSET`
    Superset,
    /// `∅`, alias `EMPTY`
    Empty,
    /// `≫`, alias `>>`
    FarExceeds,
    /// `≠`, alias `!=`
    Ne,
    Eq,
    Gt,
    Lt,
}

impl Op {
    pub fn as_str(self) -> &'static str {
        match self {
            Op::Intersect => "∩",
            Op::Minus => "-",
            Op::Subset => "⊂",
            Op::Superset => "⊇",
            Op::Empty => "∅",
            Op::FarExceeds => "≫",
            Op::Ne => "≠",
            Op::Eq => "=",
            Op::Gt => ">",
            Op::Lt => "<",
        }
    }

    /// True for the operators that compare two expressions.
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            Op::Subset | Op::Superset | Op::FarExceeds | Op::Ne | Op::Eq | Op::Gt | Op::Lt
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenKind {
    Keyword(Keyword),
    /// Canonical identifier text, e.g. `Rule X`, `Task A.1`, `FeX`, `Saliency_i`.
    Ident(String),
    /// A run of free prose, single-space normalized.
    Text(String),
    /// A double-quoted literal (quotes stripped).
    Quoted(String),
    Number(i64),
    Operator(Op),
    /// `<` opening an attribute tuple or a bracketed condition.
    TupleOpen,
    TupleClose,
    /// `{` / `}` around set expressions and composite declarations.
    SetOpen,
    SetClose,
    ParenOpen,
    ParenClose,
    Comma,
    Semicolon,
    Period,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub position: Position,
}
