//! The temporal logic: linear-time connectives over exact action atoms plus
//! two modalities reflecting the compositional structure of actions —
//! `cap` (the stream captures a stream satisfying the body) and `cmp` (the
//! stream is composable with a stream satisfying the body).
//!
//! Formulas evaluate against eventually periodic streams two ways: a direct
//! evaluator for the modality-free fragment, used as an independent oracle,
//! and compilation to Buchi automata for the full logic.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::buchi::{self, Ba, BuchiError, Limits};
use crate::cas::{ActionId, Cas, CasError};
use crate::lasso::Lasso;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Atom(ActionId),
    And(Box<Formula>, Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Not(Box<Formula>),
    /// Holds of streams that capture, letter by letter, a stream satisfying
    /// the body.
    Captures(Box<Formula>),
    /// Holds of streams that are composable, letter by letter, with a stream
    /// satisfying the body.
    Composable(Box<Formula>),
}

impl Formula {
    pub fn top() -> Formula {
        Formula::Top
    }

    pub fn atom(a: ActionId) -> Formula {
        Formula::Atom(a)
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn until(l: Formula, r: Formula) -> Formula {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn next_n(f: Formula, n: usize) -> Formula {
        (0..n).fold(f, |acc, _| Formula::next(acc))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn captures(f: Formula) -> Formula {
        Formula::Captures(Box::new(f))
    }

    pub fn composable(f: Formula) -> Formula {
        Formula::Composable(Box::new(f))
    }

    // sugar, normalized at construction
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(l), Formula::not(r)))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::or(Formula::not(l), r)
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::until(Formula::Top, f)
    }

    pub fn always(f: Formula) -> Formula {
        Formula::not(Formula::eventually(Formula::not(f)))
    }

    /// True when the formula avoids the capture and composability modalities.
    pub fn is_modality_free(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) => true,
            Formula::And(l, r) | Formula::Until(l, r) => {
                l.is_modality_free() && r.is_modality_free()
            }
            Formula::Next(f) | Formula::Not(f) => f.is_modality_free(),
            Formula::Captures(_) | Formula::Composable(_) => false,
        }
    }

    pub fn display<'a>(&'a self, cas: &'a Cas) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, cas }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    cas: &'a Cas,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(formula: &Formula, cas: &Cas, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match formula {
                Formula::Top => write!(f, "T"),
                Formula::Atom(a) => write!(f, "{}", cas.name(*a)),
                Formula::And(l, r) => {
                    write!(f, "(")?;
                    go(l, cas, f)?;
                    write!(f, " & ")?;
                    go(r, cas, f)?;
                    write!(f, ")")
                }
                Formula::Until(l, r) => {
                    write!(f, "(")?;
                    go(l, cas, f)?;
                    write!(f, " U ")?;
                    go(r, cas, f)?;
                    write!(f, ")")
                }
                Formula::Next(x) => {
                    write!(f, "X ")?;
                    go(x, cas, f)
                }
                Formula::Not(x) => {
                    write!(f, "! ")?;
                    go(x, cas, f)
                }
                Formula::Captures(x) => {
                    write!(f, "cap ")?;
                    go(x, cas, f)
                }
                Formula::Composable(x) => {
                    write!(f, "cmp ")?;
                    go(x, cas, f)
                }
            }
        }
        go(self.formula, self.cas, f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown action `{name}` at offset {offset}")]
    UnknownAtom { name: String, offset: usize },
    #[error("the direct evaluator does not support `{0}`; compile to an automaton instead")]
    UnsupportedConnective(&'static str),
    #[error(transparent)]
    Buchi(#[from] BuchiError),
    #[error(transparent)]
    Action(#[from] CasError),
}

// ---------------------------------------------------------------------------
// Concrete syntax
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Box_,
    Diamond,
}

struct Lexer {
    tokens: Vec<(Token, usize)>,
    end: usize,
}

fn lex(text: &str) -> Result<Lexer, LogicError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' => {
                tokens.push((Token::Bang, i));
                i += 1;
            }
            '&' => {
                tokens.push((Token::Amp, i));
                i += 1;
            }
            '|' => {
                tokens.push((Token::Pipe, i));
                i += 1;
            }
            '(' => {
                tokens.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                tokens.push((Token::RParen, i));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((Token::Arrow, i));
                    i += 2;
                } else {
                    return Err(LogicError::Syntax {
                        offset: i,
                        message: "expected `->`".into(),
                    });
                }
            }
            '[' => {
                if bytes.get(i + 1) == Some(&b']') {
                    tokens.push((Token::Box_, i));
                    i += 2;
                } else {
                    return Err(LogicError::Syntax {
                        offset: i,
                        message: "expected `[]`".into(),
                    });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((Token::Diamond, i));
                    i += 2;
                } else {
                    return Err(LogicError::Syntax {
                        offset: i,
                        message: "expected `<>`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push((Token::Ident(text[start..i].to_string()), start));
            }
            other => {
                return Err(LogicError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(Lexer { tokens, end: text.len() })
}

struct Parser<'a> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    end: usize,
    cas: &'a Cas,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |&(_, o)| o)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(LogicError::Syntax {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    // until (loosest, right-associative)
    fn parse_until(&mut self) -> Result<Formula, LogicError> {
        let left = self.parse_implies()?;
        if self.peek() == Some(&Token::Ident("U".to_string())) {
            self.pos += 1;
            let right = self.parse_until()?;
            Ok(Formula::until(left, right))
        } else {
            Ok(left)
        }
    }

    // implication (right-associative)
    fn parse_implies(&mut self) -> Result<Formula, LogicError> {
        let left = self.parse_or()?;
        if self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            let right = self.parse_implies()?;
            Ok(Formula::implies(left, right))
        } else {
            Ok(left)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, LogicError> {
        let mut acc = self.parse_and()?;
        while self.peek() == Some(&Token::Pipe) {
            self.pos += 1;
            let rhs = self.parse_and()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_and(&mut self) -> Result<Formula, LogicError> {
        let mut acc = self.parse_unary()?;
        while self.peek() == Some(&Token::Amp) {
            self.pos += 1;
            let rhs = self.parse_unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_unary(&mut self) -> Result<Formula, LogicError> {
        let offset = self.offset();
        match self.peek() {
            Some(Token::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.parse_unary()?))
            }
            Some(Token::Box_) => {
                self.pos += 1;
                Ok(Formula::always(self.parse_unary()?))
            }
            Some(Token::Diamond) => {
                self.pos += 1;
                Ok(Formula::eventually(self.parse_unary()?))
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "X" => {
                    self.pos += 1;
                    Ok(Formula::next(self.parse_unary()?))
                }
                "cap" => {
                    self.pos += 1;
                    Ok(Formula::captures(self.parse_unary()?))
                }
                "cmp" => {
                    self.pos += 1;
                    Ok(Formula::composable(self.parse_unary()?))
                }
                "T" => {
                    self.pos += 1;
                    Ok(Formula::Top)
                }
                "U" => Err(LogicError::Syntax {
                    offset,
                    message: "`U` needs a left operand".into(),
                }),
                _ => {
                    let Some(Token::Ident(name)) = self.bump() else { unreachable!() };
                    match self.cas.action(&name) {
                        Ok(a) => Ok(Formula::atom(a)),
                        Err(_) => Err(LogicError::UnknownAtom { name, offset }),
                    }
                }
            },
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.parse_until()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(LogicError::Syntax {
                offset,
                message: "expected a formula".into(),
            }),
        }
    }
}

/// Parses the concrete syntax against an action system.
///
/// Atoms are action names; `T` is truth; the unary prefix operators are
/// `!`, `X`, `[]`, `<>`, `cap` and `cmp`; the binary operators, loosest
/// first, are `U`, `->`, `|`, `&`, with `U` and `->` right-associative.
/// Unary operators bind tighter than all binary ones.
pub fn parse(text: &str, cas: &Cas) -> Result<Formula, LogicError> {
    let lexer = lex(text)?;
    let mut parser = Parser { tokens: &lexer.tokens, pos: 0, end: lexer.end, cas };
    let formula = parser.parse_until()?;
    if parser.pos != parser.tokens.len() {
        return Err(LogicError::Syntax {
            offset: parser.offset(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(formula)
}

// ---------------------------------------------------------------------------
// Direct evaluation on eventually periodic streams (modality-free fragment)
// ---------------------------------------------------------------------------

/// Evaluates the modality-free fragment directly on the stream, position by
/// position with memoization. The capture and composability modalities
/// quantify existentially over streams and are out of reach here by design:
/// this evaluator is the independent oracle for the automata pipeline, not a
/// second implementation of it.
pub fn satisfies_direct(
    word: &Lasso<ActionId>,
    formula: &Formula,
    cas: &Cas,
) -> Result<bool, LogicError> {
    for pos in 0..word.period_end() {
        if word.at(pos).index() >= cas.action_count() {
            return Err(CasError::UnknownAction(format!("{}", word.at(pos))).into());
        }
    }
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    // subformulas indexed by address for memoization
    fn collect<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) -> usize {
        let this = out.len();
        out.push(f);
        match f {
            Formula::Top | Formula::Atom(_) => {}
            Formula::And(l, r) | Formula::Until(l, r) => {
                collect(l, out);
                collect(r, out);
            }
            Formula::Next(x) | Formula::Not(x) | Formula::Captures(x) | Formula::Composable(x) => {
                collect(x, out);
            }
        }
        this
    }
    let mut nodes = Vec::new();
    collect(formula, &mut nodes);
    let index_of = |f: &Formula| -> usize {
        nodes
            .iter()
            .position(|&n| std::ptr::eq(n, f))
            .expect("subformula was collected")
    };

    fn eval(
        f: &Formula,
        pos: usize,
        word: &Lasso<ActionId>,
        memo: &mut HashMap<(usize, usize), bool>,
        index_of: &dyn Fn(&Formula) -> usize,
    ) -> Result<bool, LogicError> {
        let key = (index_of(f), pos);
        if let Some(&v) = memo.get(&key) {
            return Ok(v);
        }
        let value = match f {
            Formula::Top => true,
            Formula::Atom(a) => word.at(pos) == a,
            Formula::And(l, r) => {
                eval(l, pos, word, memo, index_of)? && eval(r, pos, word, memo, index_of)?
            }
            Formula::Next(x) => eval(x, word.next_pos(pos), word, memo, index_of)?,
            Formula::Not(x) => !eval(x, pos, word, memo, index_of)?,
            Formula::Until(l, r) => {
                // walk the position orbit; it revisits after at most one full
                // unrolling, at which point the until cannot be satisfied
                let mut cur = pos;
                let mut result = false;
                for _ in 0..=word.period_end() {
                    if eval(r, cur, word, memo, index_of)? {
                        result = true;
                        break;
                    }
                    if !eval(l, cur, word, memo, index_of)? {
                        break;
                    }
                    cur = word.next_pos(cur);
                }
                result
            }
            Formula::Captures(_) => return Err(LogicError::UnsupportedConnective("cap")),
            Formula::Composable(_) => return Err(LogicError::UnsupportedConnective("cmp")),
        };
        memo.insert(key, value);
        Ok(value)
    }
    eval(formula, 0, word, &mut memo, &index_of)
}

// ---------------------------------------------------------------------------
// Compilation to Buchi automata
// ---------------------------------------------------------------------------

/// Per-stage state counts recorded while compiling, for blow-up diagnosis.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct StageStat {
    pub stage: String,
    pub states: usize,
}

#[derive(Debug, Clone)]
pub struct CompileOutcome {
    pub automaton: Ba,
    pub stages: Vec<StageStat>,
}

impl CompileOutcome {
    pub fn max_states(&self) -> usize {
        self.stages.iter().map(|s| s.states).max().unwrap_or(0)
    }
}

struct Compiler<'a> {
    cas: &'a Cas,
    letters: Arc<Vec<String>>,
    limits: Limits,
    stages: Vec<StageStat>,
}

impl<'a> Compiler<'a> {
    fn record(&mut self, stage: &str, ba: Ba) -> Ba {
        if std::env::var_os("SCA_TRACE_COMPILE").is_some() {
            eprintln!("compile stage {stage}: {} states", ba.state_count());
        }
        self.stages.push(StageStat { stage: stage.to_string(), states: ba.state_count() });
        ba
    }

    fn compile(&mut self, f: &Formula) -> Result<Ba, LogicError> {
        let ba = match f {
            Formula::Top => {
                let ba = buchi::universal(Arc::clone(&self.letters));
                self.record("top", ba)
            }
            Formula::Atom(a) => {
                let ba = buchi::atom(Arc::clone(&self.letters), a.index());
                self.record("atom", ba)
            }
            Formula::And(l, r) => {
                let left = self.compile(l)?;
                let right = self.compile(r)?;
                let ba = buchi::reduce(&buchi::intersect(&left, &right, self.limits)?);
                self.record("intersect", ba)
            }
            Formula::Until(l, r) => {
                let left = self.compile(l)?;
                let right = self.compile(r)?;
                let aba = buchi::until(&left, &right)?;
                let ba = buchi::reduce(&buchi::dealternate(&aba, self.limits)?);
                self.record("until", ba)
            }
            Formula::Next(x) => {
                let inner = self.compile(x)?;
                let ba = buchi::next(&inner);
                self.record("next", ba)
            }
            Formula::Not(x) => self.compile_negated(x)?,
            Formula::Captures(x) => {
                let inner = self.compile(x)?;
                let ba = buchi::reduce(&buchi::capture_lift(&inner, self.cas)?);
                self.record("capture-lift", ba)
            }
            Formula::Composable(x) => {
                let inner = self.compile(x)?;
                let ba = buchi::reduce(&buchi::composable_lift(&inner, self.cas)?);
                self.record("composable-lift", ba)
            }
        };
        Ok(ba)
    }

    /// Compiles the negation of `f`, pushing the negation through the
    /// boolean and next structure so that the expensive rank-based
    /// complementation is reserved for until, the modalities and atoms.
    fn compile_negated(&mut self, f: &Formula) -> Result<Ba, LogicError> {
        let ba = match f {
            Formula::Not(x) => return self.compile(x),
            Formula::Top => {
                let ba = buchi::empty(Arc::clone(&self.letters));
                self.record("bottom", ba)
            }
            Formula::And(l, r) => {
                let left = self.compile_negated(l)?;
                let right = self.compile_negated(r)?;
                let ba = buchi::reduce(&buchi::union(&left, &right)?);
                self.record("union", ba)
            }
            Formula::Next(x) => {
                let inner = self.compile_negated(x)?;
                let ba = buchi::next(&inner);
                self.record("next", ba)
            }
            _ => {
                let inner = self.compile(f)?;
                let ba = buchi::complement(&inner, self.limits)?;
                self.record("complement", ba)
            }
        };
        Ok(ba)
    }
}

/// Compiles a formula to a Buchi automaton over the action alphabet, so
/// that the automaton accepts exactly the streams satisfying the formula.
pub fn compile(formula: &Formula, cas: &Cas, limits: Limits) -> Result<CompileOutcome, LogicError> {
    let letters = Arc::new(cas.action_names().to_vec());
    let mut compiler = Compiler { cas, letters, limits, stages: Vec::new() };
    let automaton = compiler.compile(formula)?;
    Ok(CompileOutcome { automaton, stages: compiler.stages })
}

/// Satisfaction of the full logic on an eventually periodic stream, decided
/// through the automata pipeline.
pub fn satisfies(
    word: &Lasso<ActionId>,
    formula: &Formula,
    cas: &Cas,
    limits: Limits,
) -> Result<bool, LogicError> {
    let outcome = compile(formula, cas, limits)?;
    Ok(buchi::member(&outcome.automaton, word)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn drone_cas() -> Cas {
        fixtures::drone_cas()
    }

    fn act(cas: &Cas, name: &str) -> ActionId {
        cas.action(name).unwrap()
    }

    fn named_lasso(cas: &Cas, prefix: &[&str], cycle: &[&str]) -> Lasso<ActionId> {
        Lasso::from_names(cas, prefix, cycle).unwrap()
    }

    #[test]
    fn parses_the_no_wasted_moves_shape() {
        let cas = drone_cas();
        let text = "cap [] (move -> X (! move U snapshot))";
        let parsed = parse(text, &cas).unwrap();
        let mv = Formula::atom(act(&cas, "move"));
        let snap = Formula::atom(act(&cas, "snapshot"));
        let expected = Formula::captures(Formula::always(Formula::implies(
            mv.clone(),
            Formula::next(Formula::until(Formula::not(mv), snap)),
        )));
        assert_eq!(parsed, expected);
    }

    #[test]
    fn unary_operators_bind_tighter_than_binary() {
        let cas = Cas::build(&["p".into(), "q".into()], &[], false).unwrap();
        let parsed = parse("cap p U ! q", &cas).unwrap();
        let expected = Formula::until(
            Formula::captures(Formula::atom(act(&cas, "p"))),
            Formula::not(Formula::atom(act(&cas, "q"))),
        );
        assert_eq!(parsed, expected);
    }

    #[test]
    fn syntax_and_atom_errors_carry_positions() {
        let cas = Cas::build(&["a".into()], &[], false).unwrap();
        match parse("a & ", &cas) {
            Err(LogicError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse("a & zz", &cas) {
            Err(LogicError::UnknownAtom { name, offset }) => {
                assert_eq!(name, "zz");
                assert_eq!(offset, 4);
            }
            other => panic!("expected unknown atom, got {other:?}"),
        }
        assert!(parse("", &cas).is_err());
        assert!(parse("(a", &cas).is_err());
        assert!(parse("a b", &cas).is_err());
    }

    #[test]
    fn precedence_chain() {
        // `&` over `|` over `->` over `U`
        let cas =
            Cas::build(&["a".into(), "b".into(), "c".into(), "d".into()], &[], false).unwrap();
        let a = || Formula::atom(act(&cas, "a"));
        let b = || Formula::atom(act(&cas, "b"));
        let c = || Formula::atom(act(&cas, "c"));
        let d = || Formula::atom(act(&cas, "d"));
        let parsed = parse("a & b | c -> d U a", &cas).unwrap();
        let expected = Formula::until(
            Formula::implies(Formula::or(Formula::and(a(), b()), c()), d()),
            a(),
        );
        assert_eq!(parsed, expected);
    }

    #[test]
    fn direct_evaluation_examples() {
        let cas = drone_cas();
        let w = named_lasso(&cas, &[], &["move"]);
        assert!(satisfies_direct(&w, &Formula::Top, &cas).unwrap());

        let w = named_lasso(&cas, &["move", "snapshot"], &["charge"]);
        let f = Formula::and(
            Formula::atom(act(&cas, "move")),
            Formula::next(Formula::atom(act(&cas, "snapshot"))),
        );
        assert!(satisfies_direct(&w, &f, &cas).unwrap());
        assert!(!satisfies_direct(&w.shift(1), &f, &cas).unwrap());

        // two adjacent composed moves violate the alternation shape stated
        // over exact composed atoms
        let violating = named_lasso(
            &cas,
            &[],
            &["move2", "move2", "charge", "charge", "charge", "charge"],
        );
        let shape = parse("[] (move2 -> X (! move2 U snapshot1))", &cas).unwrap();
        assert!(!satisfies_direct(&violating, &shape, &cas).unwrap());
        let fine = named_lasso(&cas, &[], &["move2", "snapshot1", "charge"]);
        assert!(satisfies_direct(&fine, &shape, &cas).unwrap());
    }

    #[test]
    fn direct_evaluation_rejects_modalities() {
        let cas = drone_cas();
        let w = named_lasso(&cas, &[], &["move"]);
        let f = Formula::captures(Formula::Top);
        assert_eq!(
            satisfies_direct(&w, &f, &cas),
            Err(LogicError::UnsupportedConnective("cap"))
        );
    }

    #[test]
    fn compiled_capture_example() {
        let cas = drone_cas();
        let f = Formula::captures(Formula::atom(act(&cas, "move")));
        let w = named_lasso(&cas, &[], &["move2"]);
        assert!(satisfies(&w, &f, &cas, Limits::default()).unwrap());
        let w = named_lasso(&cas, &[], &["charge"]);
        assert!(!satisfies(&w, &f, &cas, Limits::default()).unwrap());
    }

    #[test]
    fn vacuous_interface_formula_holds_everywhere() {
        // nothing satisfies ! T, so "composable with no counterexample" is
        // universally true
        let cas = drone_cas();
        let f = Formula::not(Formula::composable(Formula::not(Formula::Top)));
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let names: Vec<&str> = cas.action_names().iter().map(|s| s.as_str()).collect();
        for _ in 0..20 {
            let cycle: Vec<&str> = (0..rng.gen_range(1..4))
                .map(|_| names[rng.gen_range(0..names.len())])
                .collect();
            let w = named_lasso(&cas, &[], &cycle);
            assert!(satisfies(&w, &f, &cas, Limits::default()).unwrap());
        }
    }

    pub(crate) fn random_modality_free(
        rng: &mut ChaCha8Rng,
        cas: &Cas,
        depth: usize,
    ) -> Formula {
        let leaf = depth == 0 || rng.gen_bool(0.25);
        if leaf {
            if rng.gen_bool(0.15) {
                Formula::Top
            } else {
                let a = rng.gen_range(0..cas.action_count() as u32);
                Formula::atom(ActionId(a))
            }
        } else {
            match rng.gen_range(0..4) {
                0 => Formula::and(
                    random_modality_free(rng, cas, depth - 1),
                    random_modality_free(rng, cas, depth - 1),
                ),
                1 => Formula::until(
                    random_modality_free(rng, cas, depth - 1),
                    random_modality_free(rng, cas, depth - 1),
                ),
                2 => Formula::next(random_modality_free(rng, cas, depth - 1)),
                _ => Formula::not(random_modality_free(rng, cas, depth - 1)),
            }
        }
    }

    pub(crate) fn random_drone_lasso(rng: &mut ChaCha8Rng, cas: &Cas) -> Lasso<ActionId> {
        let n = cas.action_count() as u32;
        let p = rng.gen_range(0..=4);
        let c = rng.gen_range(1..=4);
        Lasso::new(
            (0..p).map(|_| ActionId(rng.gen_range(0..n))).collect(),
            (0..c).map(|_| ActionId(rng.gen_range(0..n))).collect(),
        )
    }

    #[test]
    fn compiled_pipeline_agrees_with_direct_evaluation() {
        let cas = drone_cas();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..120 {
            let f = random_modality_free(&mut rng, &cas, 3);
            let w = random_drone_lasso(&mut rng, &cas);
            let direct = satisfies_direct(&w, &f, &cas).unwrap();
            let compiled = satisfies(&w, &f, &cas, Limits::default()).unwrap();
            assert_eq!(direct, compiled, "disagreement on {} against {w}", f.display(&cas));
        }
    }

    #[test]
    fn eventually_means_some_shift_satisfies() {
        let cas = drone_cas();
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..60 {
            let f = random_modality_free(&mut rng, &cas, 2);
            let w = random_drone_lasso(&mut rng, &cas);
            let lhs = satisfies_direct(&w, &Formula::eventually(f.clone()), &cas).unwrap();
            let rhs = (0..w.period_end())
                .any(|n| satisfies_direct(&w.shift(n), &f, &cas).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn capture_is_monotone_along_the_preorder() {
        let cas = drone_cas();
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..40 {
            let f = random_modality_free(&mut rng, &cas, 2);
            let w = random_drone_lasso(&mut rng, &cas);
            if !satisfies_direct(&w, &f, &cas).unwrap() {
                continue;
            }
            // lift each letter to something that captures it
            let lifted = w.map(|a| {
                let ups: Vec<ActionId> = cas.captured_by(*a).collect();
                ups[rng.gen_range(0..ups.len())]
            });
            assert!(
                satisfies(&lifted, &Formula::captures(f.clone()), &cas, Limits::default())
                    .unwrap(),
                "{} lifted from {w} to {lifted}",
                f.display(&cas)
            );
        }
    }

    #[test]
    fn satisfaction_is_total() {
        let cas = drone_cas();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..30 {
            let mut f = random_modality_free(&mut rng, &cas, 2);
            if rng.gen_bool(0.3) {
                f = Formula::captures(f);
            }
            let w = random_drone_lasso(&mut rng, &cas);
            let yes = satisfies(&w, &f, &cas, Limits::default()).unwrap();
            let no = satisfies(&w, &Formula::not(f), &cas, Limits::default()).unwrap();
            assert!(yes ^ no);
        }
    }

    #[test]
    fn capacity_errors_surface_from_compilation() {
        let cas = drone_cas();
        let f = parse("! (move U charge)", &cas).unwrap();
        let err = compile(&f, &cas, Limits { max_states: 3 }).unwrap_err();
        assert!(matches!(err, LogicError::Buchi(BuchiError::Capacity { .. })));
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let cas = drone_cas();
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        for _ in 0..50 {
            let f = random_modality_free(&mut rng, &cas, 3);
            let text = f.display(&cas).to_string();
            let back = parse(&text, &cas).unwrap();
            assert_eq!(back, f, "pretty-printed `{text}`");
        }
    }
}
