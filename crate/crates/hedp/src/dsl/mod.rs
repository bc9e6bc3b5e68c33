//! Parser and canonical printer for error-prone scenario files (`.eps`).
//!
//! A scenario file is UTF-8 text holding one or more scenarios. Each
//! scenario is a sequence of clauses: `IF` clauses state preconditions and
//! declare variables, `WHEN` clauses give the trigger conditions (optionally
//! binding variables with a `There Exists` phrase), and the final `THEN`
//! group names the predicted consequence. A comma conjoins conditions inside
//! a clause, a semicolon separates clauses, and a period ends the scenario.
//! Lines starting with `#` are comments; lines starting with `@` carry
//! scenario metadata (`@scenario`, `@name`, `@level`).
//!
//! Unicode operators have ASCII aliases accepted on input: `INTERSECT` for
//! `∩`, `SUBSET` for `⊂`, `SUPERSET` for `⊇`, `EMPTY` for `∅`, `>>` for `≫`
//! and `!=` for `≠`. The canonical printer always emits the Unicode forms,
//! one clause per line, so parse → render → parse is the identity on
//! syntax trees.

mod ast;
mod lexer;
mod parser;
mod render;
mod token;

pub use ast::{
    AttrSlot, Clause, Condition, Consequence, Expr, PredicateCall, ScenarioAst, VarDecl,
};
pub use lexer::tokenize;
pub use parser::{parse_file, parse_scenario, ParsedScenario, ScenarioMeta};
pub use render::render_scenario;
pub use token::{Keyword, Op, Position, Token, TokenKind};

use thiserror::Error;

/// Errors raised while tokenizing or parsing scenario text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{0}: symbol has no valid tokenization")]
    UnknownSymbol(Position),
    #[error("{0}: `<` opens an attribute tuple that is never closed")]
    UnterminatedTuple(Position),
    #[error("{position}: expected {expected}, found {found}")]
    Syntax {
        position: Position,
        expected: String,
        found: String,
    },
    #[error("scenario `{0}` has no terminal THEN clause")]
    MissingThen(String),
    #[error("variable `{0}` is used but never declared in an IF clause or There Exists binding")]
    UnboundVariable(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALOG: &str = include_str!("../../fixtures/catalog.eps");

    #[test]
    fn catalog_parses_into_seven_scenarios() {
        let scenarios = parse_file(CATALOG).unwrap();
        let ids: Vec<&str> = scenarios.iter().map(|s| s.meta.id.as_str()).collect();
        assert_eq!(
            ids,
            [
                "strong_but_wrong",
                "encoding_deficiency",
                "lack_of_knowledge",
                "exponential_difficulty",
                "selectivity",
                "biased_review",
                "post_completion",
            ]
        );
        for scenario in &scenarios {
            assert!(scenario.meta.name.is_some());
            assert!(scenario.meta.level.is_some());
            assert!(!scenario.ast.consequences.is_empty());
            assert!(!scenario.ast.trigger_conditions.is_empty());
        }
    }

    #[test]
    fn render_then_parse_is_identity_on_catalog() {
        for scenario in parse_file(CATALOG).unwrap() {
            let rendered = render_scenario(&scenario.ast);
            let reparsed = parse_scenario(&rendered)
                .unwrap_or_else(|e| panic!("{}: {e}\n{rendered}", scenario.meta.id));
            assert_eq!(reparsed, scenario.ast, "{rendered}");
        }
    }

    #[test]
    fn ascii_aliases_parse_to_the_same_ast() {
        let unicode = "IF Current task requires Rule X <Feature set FeX>;\n\
                       WHEN There Exists Rule X~ <Feature set FeX~>;\n\
                       AND FeX - FeX~ ≠ ∅;\n\
                       THEN Rule X~ is applied.";
        let ascii = "IF Current task requires Rule X <Feature set FeX>;\n\
                     WHEN There Exists Rule X~ <Feature set FeX~>;\n\
                     AND FeX - FeX~ != EMPTY;\n\
                     THEN Rule X~ is applied.";
        assert_eq!(
            parse_scenario(unicode).unwrap(),
            parse_scenario(ascii).unwrap()
        );
    }

    #[test]
    fn strong_but_wrong_trigger_structure() {
        let scenarios = parse_file(CATALOG).unwrap();
        let ast = &scenarios[0].ast;
        assert_eq!(ast.bindings.len(), 1);
        assert_eq!(ast.bindings[0].name, "Rule A");
        assert_eq!(ast.trigger_conditions.len(), 2);
        match &ast.trigger_conditions[0] {
            Condition::All(parts) => assert_eq!(parts.len(), 2),
            other => panic!("expected a comparison chain, got {other:?}"),
        }
        match &ast.trigger_conditions[1] {
            Condition::Any(parts) => assert_eq!(parts.len(), 3),
            other => panic!("expected a disjunction, got {other:?}"),
        }
    }

    #[test]
    fn selectivity_records_an_intermediate_effect() {
        let scenarios = parse_file(CATALOG).unwrap();
        let ast = &scenarios[4].ast;
        assert_eq!(ast.intermediate_effects.len(), 1);
        assert_eq!(ast.intermediate_effects[0].0, 0);
        assert_eq!(ast.trigger_conditions.len(), 2);
        assert_eq!(ast.consequences.len(), 1);
    }

    #[test]
    fn unbound_trigger_variable_is_rejected() {
        let source = "IF Current task requires Rule X;\n\
                      WHEN FeQ ≠ ∅;\n\
                      THEN Rule X is applied.";
        assert_eq!(
            parse_scenario(source),
            Err(DslError::UnboundVariable("FeQ".into()))
        );
    }

    #[test]
    fn missing_then_is_rejected() {
        let source = "@scenario incomplete\nIF Current task requires Rule X;\n\
                      WHEN Rule X does not exist.";
        assert_eq!(
            parse_scenario(source),
            Err(DslError::MissingThen("incomplete".into()))
        );
    }

    #[test]
    fn positions_point_into_the_original_file() {
        let source = "# comment\n@scenario p\nIF Current task requires Rule X;\n\
                      WHEN Rule X ? is broken;\nTHEN nothing.";
        match tokenize("# comment\n\n\nWHEN Rule X ? is broken;") {
            Err(DslError::UnknownSymbol(pos)) => {
                assert_eq!((pos.line, pos.col), (4, 13));
            }
            other => panic!("expected an unknown-symbol error, got {other:?}"),
        }
        assert!(parse_scenario(source).is_err());
    }
}
