//! Grammar, parsing and printing for formulas, atomic rules and sequents.
//!
//! This is the single source of truth for the textual formats used by the
//! other modules and the CLI:
//!
//! * formulas: `bot`, identifiers, `~A`, `A /\ B`, `A \/ B`, `A -> B`, with
//!   precedence `~` > `/\` > `\/` > `->`, `->` right-associative and the
//!   binary lattice connectives left-associative; `~A` elaborates to
//!   `A -> bot` at parse time and never reaches downstream modules;
//! * atomic rules: an isolated atom is a level-0 rule (axiom); compound
//!   rules are written `(premise, ..., premise => atom)` where a premise is
//!   an atom or `[rule; ...; rule] atom` for premises that discharge rules;
//! * sequents: `A, B |- C` (derivability queries) and `A, B |= C`
//!   (consequence queries); the premise side may be empty.

use crate::error::Error;
use crate::rules::{AtomicRule, RulePremise};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const BOT_NAME: &str = "bot";

/// A propositional atom. `bot` is the reserved absurdity atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom(String);

impl Atom {
    /// Builds an atom, validating the identifier shape
    /// `[a-zA-Z][a-zA-Z0-9_]*`.
    pub fn new(name: &str) -> Result<Atom> {
        let mut chars = name.chars();
        let ok = match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {
                chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            }
            _ => false,
        };
        if ok {
            Ok(Atom(name.to_string()))
        } else {
            Err(Error::syntax(1, format!("invalid atom name `{name}`")))
        }
    }

    pub fn bot() -> Atom {
        Atom(BOT_NAME.to_string())
    }

    pub fn is_bot(&self) -> bool {
        self.0 == BOT_NAME
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Atom({})", self.0)
    }
}

/// Propositional formulas over atoms with `bot`, conjunction, disjunction
/// and implication. Negation is parse-time sugar for `A -> bot`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(Atom),
    Conj(Box<Formula>, Box<Formula>),
    Disj(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn bot() -> Formula {
        Formula::Atom(Atom::bot())
    }

    pub fn conj(l: Formula, r: Formula) -> Formula {
        Formula::Conj(Box::new(l), Box::new(r))
    }

    pub fn disj(l: Formula, r: Formula) -> Formula {
        Formula::Disj(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::imp(f, Formula::bot())
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn is_disjunction_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Disj(_, _) => false,
            Formula::Conj(l, r) | Formula::Imp(l, r) => {
                l.is_disjunction_free() && r.is_disjunction_free()
            }
        }
    }

    /// All atoms occurring in the formula, without duplicates, in first
    /// occurrence order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            Formula::Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Formula::Conj(l, r) | Formula::Disj(l, r) | Formula::Imp(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Number of connective nodes plus leaves; used as a size measure.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Conj(l, r) | Formula::Disj(l, r) | Formula::Imp(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Conj(l, r) | Formula::Disj(l, r) | Formula::Imp(l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({})", print_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Formula> {
        parse_formula(s)
    }
}

/// Which relation a textual sequent names.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum TurnstileKind {
    /// `|-` — derivability.
    Proves,
    /// `|=` — semantic consequence.
    Models,
}

/// A parsed sequent query. Premises are deduplicated and kept in canonical
/// (sorted) order; the premise side is a finite set.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SequentQuery {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub turnstile: TurnstileKind,
}

impl fmt::Display for SequentQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = match self.turnstile {
            TurnstileKind::Proves => "|-",
            TurnstileKind::Models => "|=",
        };
        let premises: Vec<String> = self.premises.iter().map(print_formula).collect();
        if premises.is_empty() {
            write!(f, "{} {}", sep, self.conclusion)
        } else {
            write!(f, "{} {} {}", premises.join(", "), sep, self.conclusion)
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Tilde,
    And,
    Or,
    Arrow,
    FatArrow,
    Turnstile,
    Models,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Tilde => "`~`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::Arrow => "`->`",
            Tok::FatArrow => "`=>`",
            Tok::Turnstile => "`|-`",
            Tok::Models => "`|=`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '~' => {
                toks.push((Tok::Tilde, col));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, col));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, col));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, col));
                i += 1;
            }
            ';' => {
                toks.push((Tok::Semi, col));
                i += 1;
            }
            '/' => {
                if chars.get(i + 1) == Some(&'\\') {
                    toks.push((Tok::And, col));
                    i += 2;
                } else {
                    return Err(Error::syntax(col, "expected `/\\`"));
                }
            }
            '\\' => {
                if chars.get(i + 1) == Some(&'/') {
                    toks.push((Tok::Or, col));
                    i += 2;
                } else {
                    return Err(Error::syntax(col, "expected `\\/`"));
                }
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push((Tok::Arrow, col));
                    i += 2;
                } else {
                    return Err(Error::syntax(col, "expected `->`"));
                }
            }
            '=' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push((Tok::FatArrow, col));
                    i += 2;
                } else {
                    return Err(Error::syntax(col, "expected `=>`"));
                }
            }
            '|' => match chars.get(i + 1) {
                Some('-') => {
                    toks.push((Tok::Turnstile, col));
                    i += 2;
                }
                Some('=') => {
                    toks.push((Tok::Models, col));
                    i += 2;
                }
                _ => return Err(Error::syntax(col, "expected `|-` or `|=`")),
            },
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                toks.push((Tok::Ident(name), start + 1));
            }
            other => {
                return Err(Error::syntax(col, format!("unexpected character `{other}`")))
            }
        }
    }
    toks.push((Tok::Eof, chars.len() + 1));
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(Error::syntax(
                self.pos(),
                format!("expected {}, found {}", want, self.peek()),
            ))
        }
    }

    fn expect_eof(&mut self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(Error::syntax(
                self.pos(),
                format!("unexpected {}", self.peek()),
            ))
        }
    }

    // formula := imp; imp := or ('->' imp)?; or := and ('\/' and)*;
    // and := neg ('/\' neg)*; neg := '~' neg | primary
    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.or_level()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_level(&mut self) -> Result<Formula> {
        let mut lhs = self.and_level()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and_level()?;
            lhs = Formula::disj(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_level(&mut self) -> Result<Formula> {
        let mut lhs = self.neg_level()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.neg_level()?;
            lhs = Formula::conj(lhs, rhs);
        }
        Ok(lhs)
    }

    fn neg_level(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            let inner = self.neg_level()?;
            Ok(Formula::neg(inner))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(Atom(name)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            other => Err(Error::syntax(
                self.pos(),
                format!("expected a formula, found {other}"),
            )),
        }
    }

    /// An atom in rule-label position. A compound formula here is a
    /// `NonAtomic` error rather than a bare syntax error.
    fn rule_atom(&mut self) -> Result<Atom> {
        let pos = self.pos();
        let f = self.formula().map_err(|e| match e {
            Error::Syntax { msg, .. } => Error::syntax(pos, msg),
            e => e,
        })?;
        match f {
            Formula::Atom(a) => Ok(a),
            other => Err(Error::NonAtomic(print_formula(&other))),
        }
    }

    // rule := atom | '(' premise-list '=>' atom ')'
    fn rule(&mut self) -> Result<AtomicRule> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let mut premises = Vec::new();
                if *self.peek() != Tok::FatArrow {
                    loop {
                        premises.push(self.premise()?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::FatArrow)?;
                let conclusion = self.rule_atom()?;
                self.expect(Tok::RParen)?;
                Ok(AtomicRule::compound(premises, conclusion))
            }
            _ => {
                let a = self.rule_atom()?;
                Ok(AtomicRule::axiom(a))
            }
        }
    }

    // premise := atom | '[' rule (';' rule)* ']' atom
    fn premise(&mut self) -> Result<RulePremise> {
        if *self.peek() == Tok::LBracket {
            self.bump();
            let mut discharged = Vec::new();
            if *self.peek() != Tok::RBracket {
                loop {
                    discharged.push(self.rule()?);
                    if *self.peek() == Tok::Semi {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RBracket)?;
            let atom = self.rule_atom()?;
            Ok(RulePremise { discharged, atom })
        } else {
            let atom = self.rule_atom()?;
            Ok(RulePremise {
                discharged: Vec::new(),
                atom,
            })
        }
    }

    fn sequent(&mut self) -> Result<SequentQuery> {
        let mut premises = Vec::new();
        if !matches!(self.peek(), Tok::Turnstile | Tok::Models) {
            loop {
                premises.push(self.formula()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let turnstile = match self.bump() {
            Tok::Turnstile => TurnstileKind::Proves,
            Tok::Models => TurnstileKind::Models,
            other => {
                return Err(Error::syntax(
                    self.toks[self.at.saturating_sub(1)].1,
                    format!("expected `|-` or `|=`, found {other}"),
                ))
            }
        };
        let conclusion = self.formula()?;
        premises.sort();
        premises.dedup();
        Ok(SequentQuery {
            premises,
            conclusion,
            turnstile,
        })
    }
}

/// Parses a formula; the unique parse under the precedence
/// `~` > `/\` > `\/` > `->`.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses an atomic rule in the bracket syntax; an isolated atom is a
/// level-0 rule.
pub fn parse_rule(text: &str) -> Result<AtomicRule> {
    let mut p = Parser::new(text)?;
    let r = p.rule()?;
    p.expect_eof()?;
    Ok(r)
}

/// Parses `Γ |- A` or `Γ |= A`; the premise set is deduplicated.
pub fn parse_sequent(text: &str) -> Result<SequentQuery> {
    let mut p = Parser::new(text)?;
    let s = p.sequent()?;
    p.expect_eof()?;
    Ok(s)
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

const PREC_IMP: u8 = 1;
const PREC_DISJ: u8 = 2;
const PREC_CONJ: u8 = 3;
const PREC_NEG: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Atom(_) => PREC_ATOM,
        Formula::Imp(_, r) if r.as_atom().is_some_and(Atom::is_bot) => PREC_NEG,
        Formula::Imp(_, _) => PREC_IMP,
        Formula::Disj(_, _) => PREC_DISJ,
        Formula::Conj(_, _) => PREC_CONJ,
    }
}

fn print_at(f: &Formula, required: u8, out: &mut String) {
    let own = prec(f);
    if own < required {
        out.push('(');
        print_at(f, 0, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Atom(a) => out.push_str(a.name()),
        Formula::Imp(l, r) if r.as_atom().is_some_and(Atom::is_bot) => {
            out.push('~');
            print_at(l, PREC_NEG, out);
        }
        Formula::Imp(l, r) => {
            print_at(l, PREC_IMP + 1, out);
            out.push_str(" -> ");
            print_at(r, PREC_IMP, out);
        }
        Formula::Disj(l, r) => {
            print_at(l, PREC_DISJ, out);
            out.push_str(" \\/ ");
            print_at(r, PREC_DISJ + 1, out);
        }
        Formula::Conj(l, r) => {
            print_at(l, PREC_CONJ, out);
            out.push_str(" /\\ ");
            print_at(r, PREC_CONJ + 1, out);
        }
    }
}

/// Minimal-parenthesization printing; `parse_formula(print_formula(f))`
/// returns a tree structurally equal to `f`.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    print_at(f, 0, &mut out);
    out
}

/// Fully parenthesized printing, used by the precedence oracle tests.
pub fn print_formula_full(f: &Formula) -> String {
    match f {
        Formula::Atom(a) => a.name().to_string(),
        Formula::Conj(l, r) => {
            format!("({} /\\ {})", print_formula_full(l), print_formula_full(r))
        }
        Formula::Disj(l, r) => {
            format!("({} \\/ {})", print_formula_full(l), print_formula_full(r))
        }
        Formula::Imp(l, r) => {
            format!("({} -> {})", print_formula_full(l), print_formula_full(r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn parses_with_precedence() {
        let f = p("p -> (q \\/ r)");
        assert_eq!(
            f,
            Formula::imp(
                p("p"),
                Formula::disj(p("q"), p("r"))
            )
        );
        // same tree without the explicit parens
        assert_eq!(f, p("p -> q \\/ r"));
        // ~ binds tightest, -> is right-associative
        assert_eq!(p("~p /\\ q"), Formula::conj(p("~p"), p("q")));
        assert_eq!(p("p -> q -> r"), Formula::imp(p("p"), p("q -> r")));
        assert_eq!(p("p /\\ q \\/ r"), Formula::disj(p("p /\\ q"), p("r")));
        assert_eq!(p("p /\\ q /\\ r"), Formula::conj(p("p /\\ q"), p("r")));
    }

    #[test]
    fn negation_is_sugar() {
        assert_eq!(p("~p"), Formula::imp(p("p"), Formula::bot()));
        assert_eq!(p("~~p"), Formula::neg(Formula::neg(p("p"))));
    }

    #[test]
    fn truncated_input_reports_position() {
        match parse_formula("p /\\") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn printing_inverts_sugar_and_minimizes_parens() {
        assert_eq!(print_formula(&p("~p")), "~p");
        assert_eq!(print_formula(&Formula::imp(p("p"), Formula::bot())), "~p");
        assert_eq!(
            print_formula(&Formula::disj(Formula::conj(p("p"), p("q")), p("r"))),
            "p /\\ q \\/ r"
        );
        assert_eq!(
            print_formula(&Formula::imp(p("p"), Formula::imp(p("q"), p("r")))),
            "p -> q -> r"
        );
        assert_eq!(print_formula(&p("(p -> q) -> r")), "(p -> q) -> r");
        assert_eq!(print_formula(&p("p /\\ (q \\/ r)")), "p /\\ (q \\/ r)");
        assert_eq!(print_formula(&p("~(p /\\ q)")), "~(p /\\ q)");
    }

    #[test]
    fn rule_parsing_levels() {
        assert_eq!(parse_rule("q").unwrap().level(), 0);
        assert_eq!(parse_rule("(p, q => r)").unwrap().level(), 1);
        assert_eq!(parse_rule("(a, [b] d, [c] d => d)").unwrap().level(), 2);
        assert_eq!(parse_rule("([(p, w => t)] z => y)").unwrap().level(), 3);
        assert_eq!(parse_rule("( => s)").unwrap().level(), 1);
    }

    #[test]
    fn rule_rejects_non_atomic_labels() {
        match parse_rule("(p /\\ q => r)") {
            Err(Error::NonAtomic(s)) => assert_eq!(s, "p /\\ q"),
            other => panic!("expected NonAtomic, got {other:?}"),
        }
    }

    #[test]
    fn sequent_parsing() {
        let s = parse_sequent("q, p, p |- r").unwrap();
        assert_eq!(s.premises, vec![p("p"), p("q")]);
        assert_eq!(s.conclusion, p("r"));
        assert_eq!(s.turnstile, TurnstileKind::Proves);
        let s = parse_sequent("|= p -> p").unwrap();
        assert!(s.premises.is_empty());
        assert_eq!(s.turnstile, TurnstileKind::Models);
    }

    #[test]
    fn round_trips() {
        for text in [
            "p",
            "bot",
            "~p",
            "~~p \\/ r",
            "p /\\ q \\/ r -> ~s",
            "(p -> q) -> (r \\/ s) /\\ t",
            "~(p -> q /\\ r)",
        ] {
            let t = p(text);
            assert_eq!(p(&print_formula(&t)), t, "round trip failed on {text}");
        }
    }
}
