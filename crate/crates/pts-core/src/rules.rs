//! Atomic rules with levels, bases, rule schemes, and finite universes of
//! candidate rules over which extension quantifiers are evaluated.
//!
//! A base always contains the atomic-explosion family `(bot => a)` for every
//! atom `a` of its alphabet. Those rules are implicit: they are never stored,
//! never counted towards the level of a base, and explicit copies found in
//! input files are dropped.

use crate::error::Error;
use crate::syntax::{parse_rule, Atom};
use crate::Result;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;

/// One premise of a compound rule: a premise atom together with the set of
/// rules the premise discharges.
#[derive(Clone, Debug)]
pub struct RulePremise {
    pub discharged: Vec<AtomicRule>,
    pub atom: Atom,
}

/// A higher-level atomic rule. A bare atom is a rule of level 0 (an axiom).
#[derive(Clone, Debug)]
pub enum AtomicRule {
    Axiom(Atom),
    Compound {
        premises: Vec<RulePremise>,
        conclusion: Atom,
    },
}

/// Canonical shape used for identity: premises are order-insensitive and
/// discharge sets are genuine sets.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum CanonRule {
    Axiom(Atom),
    Compound(Vec<(BTreeSet<CanonRule>, Atom)>, Atom),
}

impl AtomicRule {
    pub fn axiom(a: Atom) -> AtomicRule {
        AtomicRule::Axiom(a)
    }

    pub fn compound(premises: Vec<RulePremise>, conclusion: Atom) -> AtomicRule {
        AtomicRule::Compound {
            premises,
            conclusion,
        }
    }

    pub fn conclusion(&self) -> &Atom {
        match self {
            AtomicRule::Axiom(a) => a,
            AtomicRule::Compound { conclusion, .. } => conclusion,
        }
    }

    pub fn premises(&self) -> &[RulePremise] {
        match self {
            AtomicRule::Axiom(_) => &[],
            AtomicRule::Compound { premises, .. } => premises,
        }
    }

    pub fn is_axiom(&self) -> bool {
        matches!(self, AtomicRule::Axiom(_))
    }

    /// The atomic-explosion shape `(bot => a)`.
    pub fn is_atexp(&self) -> bool {
        match self {
            AtomicRule::Compound {
                premises,
                conclusion: _,
            } => {
                premises.len() == 1
                    && premises[0].discharged.is_empty()
                    && premises[0].atom.is_bot()
            }
            _ => false,
        }
    }

    /// The level of the rule: 0 for bare atoms; 1 for premise-only rules;
    /// when some premise discharges rules, two more than the maximal level
    /// among all discharged rules.
    pub fn level(&self) -> usize {
        match self {
            AtomicRule::Axiom(_) => 0,
            AtomicRule::Compound { premises, .. } => {
                let discharged_max = premises
                    .iter()
                    .flat_map(|p| p.discharged.iter())
                    .map(AtomicRule::level)
                    .max();
                match discharged_max {
                    None => 1,
                    Some(k) => k + 2,
                }
            }
        }
    }

    /// All atoms mentioned anywhere in the rule, `bot` included.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            AtomicRule::Axiom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            AtomicRule::Compound {
                premises,
                conclusion,
            } => {
                for p in premises {
                    for r in &p.discharged {
                        r.collect_atoms(out);
                    }
                    if !out.contains(&p.atom) {
                        out.push(p.atom.clone());
                    }
                }
                if !out.contains(conclusion) {
                    out.push(conclusion.clone());
                }
            }
        }
    }

    /// Replaces every occurrence of `from` by `to`, in labels and in
    /// discharged subrules.
    pub fn substitute_atom(&self, from: &Atom, to: &Atom) -> AtomicRule {
        let subst = |a: &Atom| if a == from { to.clone() } else { a.clone() };
        match self {
            AtomicRule::Axiom(a) => AtomicRule::Axiom(subst(a)),
            AtomicRule::Compound {
                premises,
                conclusion,
            } => AtomicRule::Compound {
                premises: premises
                    .iter()
                    .map(|p| RulePremise {
                        discharged: p
                            .discharged
                            .iter()
                            .map(|r| r.substitute_atom(from, to))
                            .collect(),
                        atom: subst(&p.atom),
                    })
                    .collect(),
                conclusion: subst(conclusion),
            },
        }
    }

    fn canon(&self) -> CanonRule {
        match self {
            AtomicRule::Axiom(a) => CanonRule::Axiom(a.clone()),
            AtomicRule::Compound {
                premises,
                conclusion,
            } => {
                let mut ps: Vec<(BTreeSet<CanonRule>, Atom)> = premises
                    .iter()
                    .map(|p| {
                        (
                            p.discharged.iter().map(AtomicRule::canon).collect(),
                            p.atom.clone(),
                        )
                    })
                    .collect();
                ps.sort();
                CanonRule::Compound(ps, conclusion.clone())
            }
        }
    }
}

// Rules are inference figures: identity is insensitive to premise order and
// to duplicates inside discharge sets.
impl PartialEq for AtomicRule {
    fn eq(&self, other: &Self) -> bool {
        self.canon() == other.canon()
    }
}
impl Eq for AtomicRule {}
impl PartialOrd for AtomicRule {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for AtomicRule {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canon().cmp(&other.canon())
    }
}
impl std::hash::Hash for AtomicRule {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canon().hash(state);
    }
}

impl fmt::Display for AtomicRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomicRule::Axiom(a) => write!(f, "{a}"),
            AtomicRule::Compound {
                premises,
                conclusion,
            } => {
                write!(f, "(")?;
                for (i, p) in premises.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    if !p.discharged.is_empty() {
                        write!(f, "[")?;
                        for (j, r) in p.discharged.iter().enumerate() {
                            if j > 0 {
                                write!(f, "; ")?;
                            }
                            write!(f, "{r}")?;
                        }
                        write!(f, "] ")?;
                    }
                    write!(f, "{}", p.atom)?;
                }
                if premises.is_empty() {
                    write!(f, " => {conclusion})")
                } else {
                    write!(f, " => {conclusion})")
                }
            }
        }
    }
}

impl Serialize for AtomicRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AtomicRule {
    fn deserialize<D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<AtomicRule, D::Error> {
        let text = String::deserialize(d)?;
        parse_rule(&text).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for AtomicRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<AtomicRule> {
        parse_rule(s)
    }
}

/// A rule template with placeholder atoms that range over an alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleScheme {
    pub template: AtomicRule,
    pub placeholders: Vec<Atom>,
}

impl RuleScheme {
    pub fn new(template: AtomicRule, placeholders: Vec<Atom>) -> Result<RuleScheme> {
        for p in &placeholders {
            if p.is_bot() {
                return Err(Error::ReservedName(p.name().to_string()));
            }
        }
        Ok(RuleScheme {
            template,
            placeholders,
        })
    }

    /// Instantiates each placeholder over `alphabet` plus `bot`, yielding a
    /// finite deduplicated rule set.
    pub fn instantiate(&self, alphabet: &[Atom]) -> Vec<AtomicRule> {
        let mut range: Vec<Atom> = alphabet.to_vec();
        if !range.contains(&Atom::bot()) {
            range.push(Atom::bot());
        }
        let mut out: Vec<AtomicRule> = vec![self.template.clone()];
        for ph in &self.placeholders {
            let mut next = Vec::new();
            for rule in &out {
                for value in &range {
                    next.push(rule.substitute_atom(ph, value));
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        out
    }
}

/// An atomic base: a finite rule set over an alphabet, with the
/// atomic-explosion family implicit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Base {
    rules: Vec<AtomicRule>,
    alphabet: Vec<Atom>,
}

impl Base {
    /// Builds a base from rules and extra alphabet atoms. The alphabet is
    /// the set of atoms occurring in the rules plus the declared extras;
    /// `bot` is ambient and never listed. Explicit atomic-explosion rules
    /// are dropped.
    pub fn new(rules: impl IntoIterator<Item = AtomicRule>, extra_alphabet: &[Atom]) -> Base {
        let mut kept: Vec<AtomicRule> = rules
            .into_iter()
            .filter(|r| !r.is_atexp())
            .collect();
        kept.sort();
        kept.dedup();
        let mut alphabet: Vec<Atom> = Vec::new();
        for r in &kept {
            for a in r.atoms() {
                if !a.is_bot() && !alphabet.contains(&a) {
                    alphabet.push(a);
                }
            }
        }
        for a in extra_alphabet {
            if !a.is_bot() && !alphabet.contains(a) {
                alphabet.push(a.clone());
            }
        }
        alphabet.sort();
        Base {
            rules: kept,
            alphabet,
        }
    }

    /// The empty base over an alphabet: atomic explosion only.
    pub fn empty(alphabet: &[Atom]) -> Base {
        Base::new(Vec::new(), alphabet)
    }

    /// Like [`Base::new`] but rejects rules above a declared level bound.
    pub fn with_level_bound(
        rules: impl IntoIterator<Item = AtomicRule>,
        extra_alphabet: &[Atom],
        bound: usize,
    ) -> Result<Base> {
        let base = Base::new(rules, extra_alphabet);
        for r in &base.rules {
            if r.level() > bound {
                return Err(Error::LevelBound {
                    bound,
                    level: r.level(),
                    rule: r.to_string(),
                });
            }
        }
        Ok(base)
    }

    /// Rules of the base, atomic explosion excluded.
    pub fn rules(&self) -> &[AtomicRule] {
        &self.rules
    }

    pub fn alphabet(&self) -> &[Atom] {
        &self.alphabet
    }

    /// The alphabet together with `bot`; the range of "every atom"
    /// quantifiers.
    pub fn atoms_with_bot(&self) -> Vec<Atom> {
        let mut out = self.alphabet.clone();
        out.push(Atom::bot());
        out
    }

    pub fn contains(&self, rule: &AtomicRule) -> bool {
        rule.is_atexp() || self.rules.binary_search(rule).is_ok()
    }

    /// Maximal level among non-explosion rules; 0 for the empty base.
    pub fn level(&self) -> usize {
        self.rules.iter().map(AtomicRule::level).max().unwrap_or(0)
    }

    /// The base extended with further rules (alphabet grows accordingly).
    pub fn extend(&self, more: impl IntoIterator<Item = AtomicRule>) -> Base {
        let mut rules = self.rules.clone();
        rules.extend(more);
        Base::new(rules, &self.alphabet)
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.rules.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}")
    }
}

/// A finite ambient set of candidate rules; "for every extension" ranges
/// over subsets of the candidates that include a given base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    alphabet: Vec<Atom>,
    candidates: Vec<AtomicRule>,
    level_bound: usize,
}

/// A base inside a universe, encoded as a bit mask over the candidate list.
pub type BaseMask = u64;

pub const MAX_CANDIDATES: usize = 63;

impl Universe {
    pub fn new(
        alphabet: Vec<Atom>,
        candidates: Vec<AtomicRule>,
        level_bound: usize,
    ) -> Result<Universe> {
        let mut alphabet: Vec<Atom> = alphabet.into_iter().filter(|a| !a.is_bot()).collect();
        let mut candidates: Vec<AtomicRule> =
            candidates.into_iter().filter(|r| !r.is_atexp()).collect();
        candidates.sort();
        candidates.dedup();
        if candidates.len() > MAX_CANDIDATES {
            return Err(Error::UniverseMismatch(format!(
                "at most {MAX_CANDIDATES} candidate rules are supported, got {}",
                candidates.len()
            )));
        }
        for r in &candidates {
            if r.level() > level_bound {
                return Err(Error::LevelBound {
                    bound: level_bound,
                    level: r.level(),
                    rule: r.to_string(),
                });
            }
            for a in r.atoms() {
                if !a.is_bot() && !alphabet.contains(&a) {
                    return Err(Error::UniverseMismatch(format!(
                        "candidate `{r}` mentions `{a}` outside the alphabet"
                    )));
                }
            }
        }
        alphabet.sort();
        alphabet.dedup();
        Ok(Universe {
            alphabet,
            candidates,
            level_bound,
        })
    }

    /// Builds the universe from parts, inferring the alphabet from the
    /// candidate rules and the level bound from their maximal level.
    pub fn infer(candidates: Vec<AtomicRule>, extra_alphabet: &[Atom]) -> Result<Universe> {
        let mut alphabet: Vec<Atom> = extra_alphabet.to_vec();
        for r in &candidates {
            for a in r.atoms() {
                if !a.is_bot() && !alphabet.contains(&a) {
                    alphabet.push(a);
                }
            }
        }
        let bound = candidates.iter().map(AtomicRule::level).max().unwrap_or(0);
        Universe::new(alphabet, candidates, bound)
    }

    pub fn alphabet(&self) -> &[Atom] {
        &self.alphabet
    }

    /// Alphabet plus `bot`: the range of atom quantifiers.
    pub fn atoms_with_bot(&self) -> Vec<Atom> {
        let mut out = self.alphabet.clone();
        out.push(Atom::bot());
        out
    }

    pub fn candidates(&self) -> &[AtomicRule] {
        &self.candidates
    }

    pub fn level_bound(&self) -> usize {
        self.level_bound
    }

    pub fn candidate_index(&self, rule: &AtomicRule) -> Option<usize> {
        self.candidates.binary_search(rule).ok()
    }

    /// The full mask: every candidate present.
    pub fn full_mask(&self) -> BaseMask {
        if self.candidates.is_empty() {
            0
        } else {
            (1u64 << self.candidates.len()) - 1
        }
    }

    /// Encodes a base as a candidate mask.
    pub fn base_mask(&self, base: &Base) -> Result<BaseMask> {
        for a in base.alphabet() {
            if !self.alphabet.contains(a) {
                return Err(Error::UniverseMismatch(format!(
                    "base atom `{a}` is not in the universe alphabet"
                )));
            }
        }
        let mut mask = 0u64;
        for r in base.rules() {
            match self.candidate_index(r) {
                Some(i) => mask |= 1 << i,
                None => {
                    return Err(Error::UniverseMismatch(format!(
                        "base rule `{r}` is not a universe candidate"
                    )))
                }
            }
        }
        Ok(mask)
    }

    /// Decodes a mask into a standalone base over the universe alphabet.
    pub fn base_from_mask(&self, mask: BaseMask) -> Base {
        let rules: Vec<AtomicRule> = self
            .candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, r)| r.clone())
            .collect();
        Base::new(rules, &self.alphabet)
    }

    /// Every base `c` with `b ⊆ c` within the universe, subsets before
    /// supersets (ascending rule count, then ascending mask).
    pub fn extensions(&self, mask: BaseMask) -> Vec<BaseMask> {
        let free = self.full_mask() & !mask;
        let mut out = Vec::new();
        // enumerate submasks of `free`, including 0 and free itself
        let mut sub = 0u64;
        loop {
            out.push(mask | sub);
            if sub == free {
                break;
            }
            sub = (sub.wrapping_sub(free)) & free;
        }
        out.sort_by_key(|m| (m.count_ones(), *m));
        out
    }

    /// All bases of the universe (extensions of the empty base).
    pub fn all_bases(&self) -> Vec<BaseMask> {
        self.extensions(0)
    }
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

#[derive(Default)]
struct FileBody {
    level: Option<usize>,
    extra_alphabet: Vec<Atom>,
    rules: Vec<AtomicRule>,
    schemes: Vec<RuleScheme>,
    saw_candidates_marker: bool,
}

fn parse_file_body(text: &str, path: &str) -> Result<FileBody> {
    let mut body = FileBody::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        let err_at = |e: Error| e.in_file(path, lineno + 1);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@level") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| err_at(Error::syntax(1, "expected a number after @level")))?;
            body.level = Some(n);
        } else if let Some(rest) = line.strip_prefix("@alphabet") {
            for w in rest.split_whitespace() {
                body.extra_alphabet.push(Atom::new(w).map_err(err_at)?);
            }
        } else if line == "@candidates" {
            body.saw_candidates_marker = true;
        } else if let Some(rest) = line.strip_prefix("@scheme") {
            let (rule_text, ph_text) = rest.rsplit_once(" over ").ok_or_else(|| {
                err_at(Error::syntax(1, "expected `@scheme RULE over PLACEHOLDERS`"))
            })?;
            let template = parse_rule(rule_text.trim()).map_err(err_at)?;
            let mut placeholders = Vec::new();
            for w in ph_text.split_whitespace() {
                placeholders.push(Atom::new(w).map_err(err_at)?);
            }
            if placeholders.is_empty() {
                return Err(err_at(Error::syntax(1, "a scheme needs placeholders")));
            }
            body.schemes
                .push(RuleScheme::new(template, placeholders).map_err(err_at)?);
        } else if line.starts_with('@') {
            return Err(err_at(Error::syntax(1, format!("unknown pragma `{line}`"))));
        } else {
            body.rules.push(parse_rule(line).map_err(err_at)?);
        }
    }
    Ok(body)
}

fn expand(body: &FileBody) -> (Vec<AtomicRule>, Vec<Atom>) {
    // The alphabet over which schemes instantiate: explicit rule atoms,
    // scheme template atoms minus placeholders, and declared extras.
    let mut alphabet: Vec<Atom> = Vec::new();
    let mut push = |a: Atom| {
        if !a.is_bot() && !alphabet.contains(&a) {
            alphabet.push(a);
        }
    };
    for r in &body.rules {
        for a in r.atoms() {
            push(a);
        }
    }
    for s in &body.schemes {
        for a in s.template.atoms() {
            if !s.placeholders.contains(&a) {
                push(a);
            }
        }
    }
    for a in &body.extra_alphabet {
        push(a.clone());
    }
    let mut rules = body.rules.clone();
    for s in &body.schemes {
        rules.extend(s.instantiate(&alphabet));
    }
    (rules, alphabet)
}

/// Parses a base file: one rule per line, `#` comments, blank lines,
/// optional `@level n`, `@alphabet ...` extras and `@scheme RULE over X`
/// lines, which instantiate over the file's alphabet plus `bot`.
pub fn parse_base_file(text: &str, path: &str) -> Result<Base> {
    let body = parse_file_body(text, path)?;
    let (rules, alphabet) = expand(&body);
    match body.level {
        Some(bound) => Base::with_level_bound(rules, &alphabet, bound),
        None => Ok(Base::new(rules, &alphabet)),
    }
}

/// Parses a universe file: like a base file, with candidate rules listed
/// after a `@candidates` marker.
pub fn parse_universe_file(text: &str, path: &str) -> Result<Universe> {
    let body = parse_file_body(text, path)?;
    if !body.saw_candidates_marker {
        return Err(Error::syntax(1, "universe file needs a `@candidates` section")
            .in_file(path, 1));
    }
    let (rules, alphabet) = expand(&body);
    let bound = body
        .level
        .unwrap_or_else(|| rules.iter().map(AtomicRule::level).max().unwrap_or(0));
    Universe::new(alphabet, rules, bound)
}

pub fn load_base(path: &str) -> Result<Base> {
    let text = std::fs::read_to_string(path)?;
    parse_base_file(&text, path)
}

pub fn load_universe(path: &str) -> Result<Universe> {
    let text = std::fs::read_to_string(path)?;
    parse_universe_file(&text, path)
}

/// Parses a file holding one rule per line (comments and blanks allowed)
/// into a plain rule set; used for `--assume` files.
pub fn parse_rule_set(text: &str, path: &str) -> Result<Vec<AtomicRule>> {
    let body = parse_file_body(text, path)?;
    let (mut rules, _) = expand(&body);
    rules.sort();
    rules.dedup();
    Ok(rules)
}

pub fn load_rule_set(path: &str) -> Result<Vec<AtomicRule>> {
    let text = std::fs::read_to_string(path)?;
    parse_rule_set(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_rule;

    fn atom(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    fn rule(s: &str) -> AtomicRule {
        parse_rule(s).unwrap()
    }

    #[test]
    fn levels_of_worked_base() {
        assert_eq!(rule("p").level(), 0);
        assert_eq!(rule("(p => q)").level(), 1);
        assert_eq!(rule("([s] t, r => w)").level(), 2);
        assert_eq!(rule("([(p, w => t)] z => y)").level(), 3);
        assert_eq!(rule("(a, [b] d, [c] d => d)").level(), 2);
    }

    #[test]
    fn mixed_empty_and_nonempty_discharge_sets() {
        // level is driven by the non-empty discharge sets
        assert_eq!(rule("(a, [b] d => d)").level(), 2);
        assert_eq!(rule("(a, [(p => q)] d => d)").level(), 3);
    }

    #[test]
    fn rule_identity_ignores_premise_order() {
        assert_eq!(rule("(p, q => r)"), rule("(q, p => r)"));
        assert_ne!(rule("(p, q => r)"), rule("(p => r)"));
        assert_eq!(rule("([a; b] c => d)"), rule("([b; a] c => d)"));
    }

    #[test]
    fn empty_base_has_level_zero() {
        let b = Base::empty(&[atom("p"), atom("q")]);
        assert_eq!(b.level(), 0);
        assert!(b.rules().is_empty());
        assert_eq!(b.alphabet().len(), 2);
        let b1 = Base::new(vec![rule("(p => q)")], &[]);
        assert_eq!(b1.level(), 1);
    }

    #[test]
    fn atexp_is_implicit_and_level_exempt() {
        let b = Base::new(vec![rule("(bot => p)")], &[atom("p")]);
        assert!(b.rules().is_empty());
        assert_eq!(b.level(), 0);
        assert!(b.contains(&rule("(bot => p)")));
    }

    #[test]
    fn scheme_instances_share_a_level() {
        let s = RuleScheme::new(rule("(a, [b] D, [c] D => D)"), vec![atom("D")]).unwrap();
        let instances = s.instantiate(&[atom("a"), atom("b"), atom("c")]);
        assert_eq!(instances.len(), 4); // a, b, c and bot
        assert!(instances.iter().all(|r| r.level() == 2));
    }

    #[test]
    fn scheme_placeholder_cannot_be_bot() {
        let err = RuleScheme::new(rule("(bot => bot)"), vec![Atom::bot()]).unwrap_err();
        assert!(matches!(err, Error::ReservedName(_)));
    }

    #[test]
    fn extension_enumeration_counts() {
        let u = Universe::infer(vec![rule("p"), rule("(p => q)")], &[]).unwrap();
        assert_eq!(u.all_bases().len(), 4);
        let b = Base::new(vec![rule("p")], &[atom("q")]);
        let mask = u.base_mask(&b).unwrap();
        assert_eq!(u.extensions(mask).len(), 2);
        assert_eq!(u.extensions(u.full_mask()), vec![u.full_mask()]);
        // subsets come before supersets
        let all = u.all_bases();
        for w in all.windows(2) {
            assert!(w[0].count_ones() <= w[1].count_ones());
        }
    }

    #[test]
    fn universe_rejects_foreign_bases() {
        let u = Universe::infer(vec![rule("p")], &[]).unwrap();
        let b = Base::new(vec![rule("(p => q)")], &[]);
        assert!(matches!(
            u.base_mask(&b),
            Err(Error::UniverseMismatch(_))
        ));
    }

    #[test]
    fn base_file_round_trip() {
        let text = "# comment\n@level 2\n@alphabet extra\n(p => q)\np\n";
        let b = parse_base_file(text, "test.base").unwrap();
        assert_eq!(b.rules().len(), 2);
        assert!(b.alphabet().contains(&atom("extra")));
        assert_eq!(b.level(), 1);
    }

    #[test]
    fn level_pragma_is_enforced() {
        let text = "@level 1\n([s] t, r => w)\n";
        assert!(matches!(
            parse_base_file(text, "test.base"),
            Err(Error::LevelBound { .. })
        ));
    }

    #[test]
    fn universe_file_with_scheme() {
        let text = "@level 2\n@alphabet a b c\n@candidates\na\nb\nc\n@scheme (a, [b] D, [c] D => D) over D\n";
        let u = parse_universe_file(text, "r.univ").unwrap();
        assert_eq!(u.candidates().len(), 7);
        assert_eq!(u.level_bound(), 2);
        assert_eq!(u.alphabet().len(), 3);
    }
}
