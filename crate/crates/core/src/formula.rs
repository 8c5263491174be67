//! Formulas of the contingency language: atoms, `top`, negation, conjunction
//! and the non-contingency operator `D`, plus `B` (box) for cross-checks.
//!
//! Concrete syntax (loosest binding last):
//!
//! | token          | meaning            |
//! |----------------|--------------------|
//! | `~` `D` `N` `B`| prefix operators   |
//! | `&`            | conjunction        |
//! | `\|`           | disjunction        |
//! | `->`           | implication (right-assoc) |
//! | `<->`          | biconditional      |
//!
//! `top` and `bot` are constants. `N φ` is sugar for `~D φ`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Top,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Delta(Box<Formula>),
    Box(Box<Formula>),
    // Sugar. Removed by `expand_sugar`.
    Bot,
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Nabla(Box<Formula>),
}

/// Atoms and modal depth of a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metrics {
    pub vars: BTreeSet<String>,
    pub modal_depth: usize,
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Self {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn delta(f: Formula) -> Self {
        Formula::Delta(Box::new(f))
    }

    pub fn nabla(f: Formula) -> Self {
        Formula::Nabla(Box::new(f))
    }

    pub fn boxed(f: Formula) -> Self {
        Formula::Box(Box::new(f))
    }

    /// Conjunction of all items; `top` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Disjunction of all items; `bot` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bot)
    }

    pub fn is_core(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Top => true,
            Formula::Not(f) | Formula::Delta(f) | Formula::Box(f) => f.is_core(),
            Formula::And(l, r) => l.is_core() && r.is_core(),
            Formula::Bot
            | Formula::Or(..)
            | Formula::Imp(..)
            | Formula::Iff(..)
            | Formula::Nabla(_) => false,
        }
    }

    /// Rewrites sugar into the core connectives `~`, `&`, `D`, `B`, `top`.
    pub fn expand_sugar(&self) -> Formula {
        match self {
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::not(Formula::Top),
            Formula::Not(f) => Formula::not(f.expand_sugar()),
            Formula::And(l, r) => Formula::and(l.expand_sugar(), r.expand_sugar()),
            Formula::Delta(f) => Formula::delta(f.expand_sugar()),
            Formula::Box(f) => Formula::boxed(f.expand_sugar()),
            Formula::Nabla(f) => Formula::not(Formula::delta(f.expand_sugar())),
            Formula::Or(l, r) => Formula::not(Formula::and(
                Formula::not(l.expand_sugar()),
                Formula::not(r.expand_sugar()),
            )),
            Formula::Imp(l, r) => core_imp(l.expand_sugar(), r.expand_sugar()),
            Formula::Iff(l, r) => {
                let (l, r) = (l.expand_sugar(), r.expand_sugar());
                Formula::and(core_imp(l.clone(), r.clone()), core_imp(r, l))
            }
        }
    }

    pub fn metrics(&self) -> Metrics {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        Metrics {
            vars,
            modal_depth: self.modal_depth(),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        vars
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Top | Formula::Bot => {}
            Formula::Not(f) | Formula::Delta(f) | Formula::Box(f) | Formula::Nabla(f) => {
                f.collect_vars(out)
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::Delta(f) | Formula::Box(f) | Formula::Nabla(f) => 1 + f.modal_depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
                l.modal_depth().max(r.modal_depth())
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 1,
            Formula::Not(f) | Formula::Delta(f) | Formula::Box(f) | Formula::Nabla(f) => {
                1 + f.size()
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Imp(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            _ => 5,
        }
    }
}

fn core_imp(l: Formula, r: Formula) -> Formula {
    Formula::not(Formula::and(l, Formula::not(r)))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Top => write!(f, "top"),
            Formula::Bot => write!(f, "bot"),
            Formula::Not(g) => write_prefix(f, "~", g),
            Formula::Delta(g) => write_prefix(f, "D ", g),
            Formula::Nabla(g) => write_prefix(f, "N ", g),
            Formula::Box(g) => write_prefix(f, "B ", g),
            Formula::And(l, r) => write_infix(f, self.precedence(), l, "&", r, Assoc::Left),
            Formula::Or(l, r) => write_infix(f, self.precedence(), l, "|", r, Assoc::Left),
            Formula::Imp(l, r) => write_infix(f, self.precedence(), l, "->", r, Assoc::Right),
            Formula::Iff(l, r) => write_infix(f, self.precedence(), l, "<->", r, Assoc::Left),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Assoc {
    Left,
    Right,
}

fn write_prefix(f: &mut fmt::Formatter<'_>, op: &str, operand: &Formula) -> fmt::Result {
    if operand.precedence() < 5 {
        write!(f, "{op}({operand})")
    } else {
        write!(f, "{op}{operand}")
    }
}

fn write_infix(
    f: &mut fmt::Formatter<'_>,
    prec: u8,
    l: &Formula,
    op: &str,
    r: &Formula,
    assoc: Assoc,
) -> fmt::Result {
    let paren_left = l.precedence() < prec || (assoc == Assoc::Right && l.precedence() == prec);
    let paren_right = r.precedence() < prec || (assoc == Assoc::Left && r.precedence() == prec);
    if paren_left {
        write!(f, "({l})")?;
    } else {
        write!(f, "{l}")?;
    }
    write!(f, " {op} ")?;
    if paren_right {
        write!(f, "({r})")
    } else {
        write!(f, "{r}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected one of {}", expected.join(", "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Top,
    Bot,
    Not,
    Delta,
    Nabla,
    Box,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(text: &'a str) -> Result<Vec<(usize, Token)>, ParseError> {
        let mut lexer = Lexer { text, pos: 0 };
        let mut tokens = Vec::new();
        loop {
            let (offset, token) = lexer.next_token()?;
            let end = token == Token::End;
            tokens.push((offset, token));
            if end {
                return Ok(tokens);
            }
        }
    }

    fn next_token(&mut self) -> Result<(usize, Token), ParseError> {
        let rest = &self.text[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
        let start = self.pos;
        let Some(c) = trimmed.chars().next() else {
            return Ok((start, Token::End));
        };
        let fixed: &[(&str, Token)] = &[
            ("<->", Token::Iff),
            ("->", Token::Imp),
            ("~", Token::Not),
            ("&", Token::And),
            ("|", Token::Or),
            ("(", Token::LParen),
            (")", Token::RParen),
            ("¬", Token::Not),
            ("∧", Token::And),
            ("∨", Token::Or),
            ("↔", Token::Iff),
            ("→", Token::Imp),
            ("Δ", Token::Delta),
            ("∇", Token::Nabla),
            ("□", Token::Box),
            ("⊤", Token::Top),
            ("⊥", Token::Bot),
        ];
        for (text, token) in fixed {
            if trimmed.starts_with(text) {
                self.pos += text.len();
                return Ok((start, token.clone()));
            }
        }
        let token = match c {
            'D' => Token::Delta,
            'N' => Token::Nabla,
            'B' => Token::Box,
            c if c.is_ascii_lowercase() => {
                let len = trimmed
                    .find(|ch: char| !ch.is_ascii_alphanumeric())
                    .unwrap_or(trimmed.len());
                let word = &trimmed[..len];
                self.pos += len;
                return Ok((
                    start,
                    match word {
                        "top" => Token::Top,
                        "bot" => Token::Bot,
                        _ => Token::Ident(word.to_string()),
                    },
                ));
            }
            _ => {
                return Err(ParseError {
                    offset: start,
                    expected: operand_start(),
                })
            }
        };
        self.pos += c.len_utf8();
        Ok((start, token))
    }
}

fn operand_start() -> Vec<String> {
    ["atom", "top", "bot", "~", "D", "N", "B", "("]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].1.clone();
        if token != Token::End {
            self.pos += 1;
        }
        token
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.imp()?;
        while *self.peek() == Token::Iff {
            self.bump();
            let right = self.imp()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if *self.peek() == Token::Imp {
            self.bump();
            let right = self.imp()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.and()?;
        while *self.peek() == Token::Or {
            self.bump();
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Token::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Token::Delta => {
                self.bump();
                Ok(Formula::delta(self.unary()?))
            }
            Token::Nabla => {
                self.bump();
                Ok(Formula::nabla(self.unary()?))
            }
            Token::Box => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Token::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Token::Bot => {
                self.bump();
                Ok(Formula::Bot)
            }
            Token::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Token::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error(&[")", "&", "|", "->", "<->"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(ParseError {
                offset: self.offset(),
                expected: operand_start(),
            }),
        }
    }
}

/// Parses the concrete syntax described in the module docs.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = Lexer::tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.iff()?;
    if *parser.peek() != Token::End {
        return Err(parser.error(&["end of input", "&", "|", "->", "<->"]));
    }
    Ok(formula)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Identifier grammar for atoms: a lowercase letter followed by ASCII
/// alphanumerics, excluding the reserved words `top` and `bot`.
pub fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric())
        && name != "top"
        && name != "bot"
}
