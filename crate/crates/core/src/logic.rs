//! The epistemic language and its two satisfaction relations.
//!
//! Core formulas are built from atoms, negation, conjunction and the
//! knowledge operator; `true` and `false` are primitive in the evaluator.
//! Everything else — disjunction, implication, `alive`, `dead`, `alive{B}` —
//! is surface syntax that desugars at parse time:
//!
//! ```text
//! p | q      ~(~p & ~q)
//! p -> q     ~p | q
//! dead a     K a false
//! alive a    ~dead a
//! alive{B}   conjunction of alive over B
//! ```
//!
//! Concrete syntax, tightest first: `~`/`K` bind strongest, then `&`, `|`,
//! and right-associative `->`. Atoms are written `name@agent`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::complex::{
    check_simplicial_model_morphism, ModelMorphismViolation, SimplicialMap, SimplicialModel,
};
use crate::frame::PartialEpistemicModel;
use crate::vocab::{AgentId, Atom, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Know(AgentId, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)] // constructor named after the connective
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn know(a: AgentId, f: Formula) -> Self {
        Formula::Know(a, Box::new(f))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(l), Formula::not(r)))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::or(Formula::not(l), r)
    }

    /// `dead a`: the agent knows a contradiction.
    pub fn dead(a: AgentId) -> Self {
        Formula::know(a, Formula::False)
    }

    pub fn alive(a: AgentId) -> Self {
        Formula::not(Formula::dead(a))
    }

    /// `alive{B}`: every agent in `B` is alive; `true` for the empty set.
    pub fn alive_all(agents: impl IntoIterator<Item = AgentId>) -> Self {
        let mut iter = agents.into_iter();
        match iter.next() {
            None => Formula::True,
            Some(first) => iter.fold(Formula::alive(first), |acc, a| {
                Formula::and(acc, Formula::alive(a))
            }),
        }
    }

    /// Matches the desugared shape of a disjunction.
    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::And(l, r) = inner.as_ref() {
                if let (Formula::Not(a), Formula::Not(b)) = (l.as_ref(), r.as_ref()) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Matches the desugared shape of an implication.
    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        let (l, r) = self.as_or()?;
        if let Formula::Not(premise) = l {
            Some((premise, r))
        } else {
            None
        }
    }

    pub fn as_dead(&self) -> Option<AgentId> {
        if let Formula::Know(a, body) = self {
            if matches!(body.as_ref(), Formula::False) {
                return Some(*a);
            }
        }
        None
    }

    pub fn as_alive(&self) -> Option<AgentId> {
        if let Formula::Not(inner) = self {
            return inner.as_dead();
        }
        None
    }

    /// Depth of the syntax tree, leaves counting one.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Know(_, f) => 1 + f.depth(),
            Formula::And(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn atoms(&self) -> BTreeSet<&Atom> {
        match self {
            Formula::True | Formula::False => BTreeSet::new(),
            Formula::Atom(a) => [a].into_iter().collect(),
            Formula::Not(f) | Formula::Know(_, f) => f.atoms(),
            Formula::And(l, r) => {
                let mut set = l.atoms();
                set.extend(r.atoms());
                set
            }
        }
    }

    /// Renders the formula in the concrete syntax; parsing the result yields
    /// the same tree.
    pub fn render(&self, vocab: &Vocabulary) -> String {
        fn tight(f: &Formula, vocab: &Vocabulary) -> String {
            match f {
                Formula::And(..) => format!("({})", walk(f, vocab)),
                _ => walk(f, vocab),
            }
        }
        fn walk(f: &Formula, vocab: &Vocabulary) -> String {
            match f {
                Formula::True => "true".into(),
                Formula::False => "false".into(),
                Formula::Atom(a) => vocab.atom_text(a),
                Formula::Not(g) => format!("~{}", tight(g, vocab)),
                Formula::Know(a, g) => {
                    format!("K {} {}", vocab.agent_name(*a), tight(g, vocab))
                }
                Formula::And(l, r) => {
                    // `&` chains fold to the left, so a left child that is
                    // itself a conjunction needs no parentheses.
                    let left = match l.as_ref() {
                        Formula::And(..) => walk(l, vocab),
                        _ => tight(l, vocab),
                    };
                    format!("{} & {}", left, tight(r, vocab))
                }
            }
        }
        walk(self, vocab)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { offset, message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    At,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '@' => {
                toks.push((i, Tok::At));
                i += 1;
            }
            '~' => {
                toks.push((i, Tok::Tilde));
                i += 1;
            }
            '&' => {
                toks.push((i, Tok::Amp));
                i += 1;
            }
            '|' => {
                toks.push((i, Tok::Pipe));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '{' => {
                toks.push((i, Tok::LBrace));
                i += 1;
            }
            '}' => {
                toks.push((i, Tok::RBrace));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::Arrow));
                    i += 2;
                } else {
                    return err(i, "expected `->`");
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => return err(i, format!("unexpected character `{other}`")),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vocab: &'a Vocabulary,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            err(self.offset(), format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(usize, String), ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Ident(s)) => Ok((at, s)),
            _ => err(at, format!("expected {what}")),
        }
    }

    fn agent(&mut self) -> Result<AgentId, ParseError> {
        let (at, name) = self.ident("an agent name")?;
        match self.vocab.agent(&name) {
            Some(a) => Ok(a),
            None => err(at, format!("unknown agent `{name}`")),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(s)) if s == "K" => {
                self.pos += 1;
                let a = self.agent()?;
                Ok(Formula::know(a, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::LParen) => {
                let f = self.implication()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(s)) => match s.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                "dead" => Ok(Formula::dead(self.agent()?)),
                "alive" => {
                    if self.peek() == Some(&Tok::LBrace) {
                        self.pos += 1;
                        let mut agents = vec![self.agent()?];
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            agents.push(self.agent()?);
                        }
                        self.expect(Tok::RBrace, "`}`")?;
                        Ok(Formula::alive_all(agents))
                    } else {
                        Ok(Formula::alive(self.agent()?))
                    }
                }
                _ => {
                    self.expect(Tok::At, "`@` after an atom name")?;
                    let (agent_at, agent) = self.ident("an agent name")?;
                    match self.vocab.agent(&agent) {
                        Some(owner) => Ok(Formula::atom(Atom::new(s, owner))),
                        None => err(agent_at, format!("unknown agent `{agent}`")),
                    }
                }
            },
            _ => err(at, "expected a formula"),
        }
    }
}

/// Parses the concrete syntax against a vocabulary. Agent names must be
/// declared; atom names are free, an atom absent from every label is simply
/// false everywhere.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), vocab };
    let f = p.implication()?;
    if p.pos != p.toks.len() {
        return err(p.offset(), "unexpected trailing input");
    }
    Ok(f)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown world index {0}")]
    UnknownWorld(usize),
    #[error("unknown facet index {0}")]
    UnknownFacet(usize),
}

/// Truth of every subformula is computed once per world, bottom-up, which is
/// the memoisation the desk-scale models need.
pub fn denotation_kripke(m: &PartialEpistemicModel, f: &Formula) -> Vec<bool> {
    let n = m.world_count();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(p) => (0..n).map(|w| m.labels(w).contains(p)).collect(),
        Formula::Not(g) => denotation_kripke(m, g).into_iter().map(|b| !b).collect(),
        Formula::And(l, r) => {
            let lv = denotation_kripke(m, l);
            let rv = denotation_kripke(m, r);
            lv.into_iter().zip(rv).map(|(a, b)| a && b).collect()
        }
        Formula::Know(a, g) => {
            let gv = denotation_kripke(m, g);
            (0..n)
                .map(|w| (0..n).all(|v| !m.related(*a, w, v) || gv[v]))
                .collect()
        }
    }
}

pub fn eval_kripke(
    m: &PartialEpistemicModel,
    world: usize,
    f: &Formula,
) -> Result<bool, EvalError> {
    if world >= m.world_count() {
        return Err(EvalError::UnknownWorld(world));
    }
    Ok(denotation_kripke(m, f)[world])
}

/// Satisfaction on a simplicial model, computed directly on the facets:
/// `K_a φ` holds at a facet when φ holds at every facet sharing its
/// `a`-coloured vertex. This is deliberately independent of the facet-frame
/// translation, which the agreement tests compare it against.
pub fn denotation_simplicial(s: &SimplicialModel, f: &Formula) -> Vec<bool> {
    let c = s.complex();
    let n = c.facet_count();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(p) => (0..n).map(|x| s.label(x).contains(p)).collect(),
        Formula::Not(g) => denotation_simplicial(s, g).into_iter().map(|b| !b).collect(),
        Formula::And(l, r) => {
            let lv = denotation_simplicial(s, l);
            let rv = denotation_simplicial(s, r);
            lv.into_iter().zip(rv).map(|(a, b)| a && b).collect()
        }
        Formula::Know(a, g) => {
            let gv = denotation_simplicial(s, g);
            (0..n)
                .map(|x| (0..n).all(|y| !c.share_colour(x, y, *a) || gv[y]))
                .collect()
        }
    }
}

pub fn eval_simplicial(
    s: &SimplicialModel,
    facet: usize,
    f: &Formula,
) -> Result<bool, EvalError> {
    if facet >= s.complex().facet_count() {
        return Err(EvalError::UnknownFacet(facet));
    }
    Ok(denotation_simplicial(s, f)[facet])
}

/// Per-point truth values plus the validity-on-the-model flag.
#[derive(Debug, Clone)]
pub struct EvalAll {
    pub values: Vec<bool>,
    pub all_true: bool,
}

pub fn eval_all_kripke(m: &PartialEpistemicModel, f: &Formula) -> EvalAll {
    let values = denotation_kripke(m, f);
    let all_true = values.iter().all(|&b| b);
    EvalAll { values, all_true }
}

pub fn eval_all_simplicial(s: &SimplicialModel, f: &Formula) -> EvalAll {
    let values = denotation_simplicial(s, f);
    let all_true = values.iter().all(|&b| b);
    EvalAll { values, all_true }
}

/// A subterm outside the guarded positive fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnguardedSubterm(pub Formula);

impl fmt::Display for UnguardedSubterm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "subterm outside the guarded positive fragment: {:?}", self.0)
    }
}

/// Recognises a conjunction tree whose leaves are all `alive` operators,
/// returning the guarded agent set.
fn alive_conjunction(f: &Formula) -> Option<BTreeSet<AgentId>> {
    if let Some(a) = f.as_alive() {
        return Some([a].into_iter().collect());
    }
    if let Formula::And(l, r) = f {
        let mut set = alive_conjunction(l)?;
        set.extend(alive_conjunction(r)?);
        return Some(set);
    }
    None
}

/// A propositional formula over the atoms of the agents in `owners`.
fn propositional_over(f: &Formula, owners: &BTreeSet<AgentId>) -> Result<(), UnguardedSubterm> {
    match f {
        Formula::Atom(a) if owners.contains(&a.owner) => Ok(()),
        Formula::Not(g) => propositional_over(g, owners),
        Formula::And(l, r) => {
            propositional_over(l, owners)?;
            propositional_over(r, owners)
        }
        other => Err(UnguardedSubterm(other.clone())),
    }
}

/// Membership in the guarded positive fragment:
///
/// ```text
/// φ ::= alive{B} -> ψ | φ & φ | φ | φ | K a φ
/// ```
///
/// with ψ propositional over the atoms owned by `B`. Desugared shapes are
/// matched back, and where a term could be read both as an implication and
/// as a disjunction, either reading may justify it.
pub fn is_guarded_positive(f: &Formula) -> Result<(), UnguardedSubterm> {
    if let Some((guard, psi)) = f.as_implies() {
        if let Some(owners) = alive_conjunction(guard) {
            if propositional_over(psi, &owners).is_ok() {
                return Ok(());
            }
        }
    }
    if let Some((l, r)) = f.as_or() {
        if is_guarded_positive(l).is_ok() && is_guarded_positive(r).is_ok() {
            return Ok(());
        }
    }
    match f {
        Formula::And(l, r) => {
            is_guarded_positive(l)?;
            is_guarded_positive(r)
        }
        Formula::Know(_, body) => is_guarded_positive(body),
        other => Err(UnguardedSubterm(other.clone())),
    }
}

/// Result of checking the knowledge-gain property on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainVerdict {
    /// The formula does not hold at the target, so there is nothing to gain.
    Vacuous,
    /// The formula holds at the target and, as the theorem demands, at the
    /// source as well.
    Confirmed,
    /// The formula holds at the target but not at the source. This cannot
    /// happen for a guarded positive formula along a valid pointed morphism;
    /// seeing it means a bug somewhere.
    Violation,
}

#[derive(Debug, Error)]
pub enum GainError {
    #[error("{0}")]
    NotGuarded(UnguardedSubterm),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(ModelMorphismViolation),
    #[error("morphism is not pointed: image of facet {src} is not contained in facet {dst}")]
    NotPointed { src: usize, dst: usize },
    #[error("unknown facet index {0}")]
    UnknownFacet(usize),
}

/// Checks that a guarded positive formula true at the target of a pointed
/// morphism is also true at the source.
pub fn check_knowledge_gain(
    f: &SimplicialMap,
    src: &SimplicialModel,
    src_facet: usize,
    dst: &SimplicialModel,
    dst_facet: usize,
    phi: &Formula,
) -> Result<GainVerdict, GainError> {
    is_guarded_positive(phi).map_err(GainError::NotGuarded)?;
    if src_facet >= src.complex().facet_count() {
        return Err(GainError::UnknownFacet(src_facet));
    }
    if dst_facet >= dst.complex().facet_count() {
        return Err(GainError::UnknownFacet(dst_facet));
    }
    check_simplicial_model_morphism(f, src, dst).map_err(GainError::InvalidMorphism)?;
    let image = f
        .image(&src.complex().facets()[src_facet].vertices)
        .expect("morphism is total");
    if !image.is_subset(&dst.complex().facets()[dst_facet].vertices) {
        return Err(GainError::NotPointed { src: src_facet, dst: dst_facet });
    }
    if !eval_simplicial(dst, dst_facet, phi).expect("facet checked") {
        return Ok(GainVerdict::Vacuous);
    }
    if eval_simplicial(src, src_facet, phi).expect("facet checked") {
        Ok(GainVerdict::Confirmed)
    } else {
        Ok(GainVerdict::Violation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Facet, Vertex};
    use crate::testutil::{abc, ex_morphism_map, ex_morphism_pair, ex_proper_frame};

    fn vocab() -> Vocabulary {
        let mut v = abc();
        v.declare_atom("p", AgentId(0)).unwrap();
        v.declare_atom("q", AgentId(1)).unwrap();
        v
    }

    #[test]
    fn parses_knowledge_and_precedence() {
        let v = vocab();
        let f = parse_formula("K a (p@a & q@b)", &v).unwrap();
        assert_eq!(
            f,
            Formula::know(
                AgentId(0),
                Formula::and(
                    Formula::atom(Atom::new("p", AgentId(0))),
                    Formula::atom(Atom::new("q", AgentId(1)))
                )
            )
        );
        let g = parse_formula("~p@a & q@b", &v).unwrap();
        assert_eq!(
            g,
            Formula::and(
                Formula::not(Formula::atom(Atom::new("p", AgentId(0)))),
                Formula::atom(Atom::new("q", AgentId(1)))
            )
        );
    }

    #[test]
    fn alive_desugars_to_negated_knowledge_of_false() {
        let v = vocab();
        let f = parse_formula("alive a", &v).unwrap();
        assert_eq!(f, Formula::not(Formula::know(AgentId(0), Formula::False)));
        assert_eq!(f.as_alive(), Some(AgentId(0)));
        let d = parse_formula("dead c", &v).unwrap();
        assert_eq!(d, Formula::know(AgentId(2), Formula::False));
        let ab = parse_formula("alive{a,b}", &v).unwrap();
        assert_eq!(ab, Formula::alive_all([AgentId(0), AgentId(1)]));
    }

    #[test]
    fn arrow_is_right_associative() {
        let v = vocab();
        let f = parse_formula("p@a -> q@b -> p@a", &v).unwrap();
        let p = Formula::atom(Atom::new("p", AgentId(0)));
        let q = Formula::atom(Atom::new("q", AgentId(1)));
        assert_eq!(f, Formula::implies(p.clone(), Formula::implies(q, p)));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let v = vocab();
        let e = parse_formula("p@a &", &v).unwrap_err();
        assert_eq!(e.offset, 5);
        let e = parse_formula("K zz p@a", &v).unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(e.message.contains("unknown agent"));
        let e = parse_formula("p@zz", &v).unwrap_err();
        assert!(e.message.contains("unknown agent"));
    }

    #[test]
    fn render_then_parse_is_identity() {
        let v = vocab();
        for text in [
            "K a (p@a & q@b)",
            "~p@a & q@b",
            "p@a | q@b",
            "p@a -> q@b -> p@a",
            "alive{a,b} -> (p@a & ~q@b)",
            "true & (false | dead c)",
            "K a ~K b (p@a & (q@b & p@a))",
        ] {
            let f = parse_formula(text, &v).unwrap();
            let printed = f.render(&v);
            let again = parse_formula(&printed, &v).unwrap();
            assert_eq!(f, again, "not a fixpoint: {text} -> {printed}");
        }
    }

    #[test]
    fn dead_agents_know_everything() {
        let m = ex_proper_frame();
        // c is dead in world 0.
        let strange = Formula::know(AgentId(2), Formula::False);
        assert!(eval_kripke(&m, 0, &strange).unwrap());
        assert!(eval_kripke(&m, 0, &Formula::know(AgentId(2), Formula::Atom(Atom::new("p", AgentId(0))))).unwrap());
    }

    #[test]
    fn alive_operator_reads_loops_and_colours() {
        let m = ex_proper_frame();
        for w in 0..m.world_count() {
            for a in m.vocab().agent_ids() {
                assert_eq!(
                    eval_kripke(&m, w, &Formula::alive(a)).unwrap(),
                    m.related(a, w, w)
                );
            }
        }
        let (_, two) = ex_morphism_pair();
        let s = SimplicialModel::unlabelled(two);
        for x in 0..s.complex().facet_count() {
            for a in s.vocab().agent_ids() {
                assert_eq!(
                    eval_simplicial(&s, x, &Formula::alive(a)).unwrap(),
                    s.complex().facet_colours(x).contains(&a)
                );
            }
        }
    }

    #[test]
    fn disjunction_and_truth_desugarings_agree_semantically() {
        let m = ex_proper_frame();
        let p = Formula::Atom(Atom::new("p", AgentId(0)));
        let or = Formula::or(p.clone(), Formula::not(p.clone()));
        for w in 0..m.world_count() {
            assert_eq!(
                eval_kripke(&m, w, &or).unwrap(),
                eval_kripke(&m, w, &Formula::True).unwrap()
            );
        }
    }

    #[test]
    fn eval_all_reports_validity() {
        let m = ex_proper_frame();
        assert!(eval_all_kripke(&m, &Formula::True).all_true);
        // NE holds on this proper frame.
        let ne = Formula::or(
            Formula::or(Formula::alive(AgentId(0)), Formula::alive(AgentId(1))),
            Formula::alive(AgentId(2)),
        );
        assert!(eval_all_kripke(&m, &ne).all_true);
        // b is dead in world 1.
        let alive_b = Formula::alive(AgentId(1));
        let summary = eval_all_kripke(&m, &alive_b);
        assert!(!summary.all_true);
        assert_eq!(summary.values, vec![true, false]);
    }

    #[test]
    fn guarded_fragment_examples() {
        let v = vocab();
        let yes = parse_formula("(alive a & alive b) -> (p@a & ~q@b)", &v).unwrap();
        assert!(is_guarded_positive(&yes).is_ok());
        let wrong_owner = parse_formula("(alive a) -> q@b", &v).unwrap();
        assert!(is_guarded_positive(&wrong_owner).is_err());
        let negated = parse_formula("~K a p@a", &v).unwrap();
        assert!(is_guarded_positive(&negated).is_err());
        let nested = parse_formula("K a (alive{a,b} -> p@a) & (alive b -> ~q@b)", &v).unwrap();
        assert!(is_guarded_positive(&nested).is_ok());
        let disjunction = parse_formula("(alive a -> p@a) | (alive b -> q@b)", &v).unwrap();
        assert!(is_guarded_positive(&disjunction).is_ok());
        let bare_atom = parse_formula("p@a", &v).unwrap();
        assert!(is_guarded_positive(&bare_atom).is_err());
    }

    #[test]
    fn knowledge_gain_on_identity_never_violates() {
        let (_, two) = ex_morphism_pair();
        let s = SimplicialModel::unlabelled(two);
        let id = SimplicialMap::identity(s.complex());
        let v = s.vocab().clone();
        let phi = parse_formula("alive a -> ~p@a", &v).unwrap();
        for x in 0..s.complex().facet_count() {
            let verdict = check_knowledge_gain(&id, &s, x, &s, x, &phi).unwrap();
            assert_ne!(verdict, GainVerdict::Violation);
        }
    }

    #[test]
    fn knowledge_gain_on_edge_inclusion() {
        // Ex-style instance: the edge maps into a labelled pair of triangles.
        let mut v = abc();
        v.declare_atom("p", AgentId(0)).unwrap();
        let p = Atom::new("p", AgentId(0));
        let (edge, two) = ex_morphism_pair();
        let src = SimplicialModel::from_parts(
            v.clone(),
            edge.vertices().to_vec(),
            vec![(Facet::new([0, 1]), [p.clone()].into_iter().collect())],
        );
        let dst = SimplicialModel::from_parts(
            v.clone(),
            two.vertices().to_vec(),
            vec![
                (Facet::new([0, 1, 2]), [p.clone()].into_iter().collect()),
                (Facet::new([1, 2, 3]), [p.clone()].into_iter().collect()),
            ],
        );
        let g = ex_morphism_map();
        let phi = parse_formula("K a (alive{a,b} -> p@a)", &v).unwrap();
        let verdict = check_knowledge_gain(&g, &src, 0, &dst, 0, &phi).unwrap();
        assert_eq!(verdict, GainVerdict::Confirmed);
    }

    #[test]
    fn unguarded_monotonicity_fails_on_a_concrete_pair() {
        // Positive but unguarded: K a p@c gains truth along the morphism
        // that maps an ab-edge into a triangle where c's atom holds.
        let mut v = abc();
        v.declare_atom("p", AgentId(2)).unwrap();
        let p = Atom::new("p", AgentId(2));
        let src = SimplicialModel::from_parts(
            v.clone(),
            vec![Vertex::new(0, AgentId(0)), Vertex::new(1, AgentId(1))],
            vec![(Facet::new([0, 1]), BTreeSet::new())],
        );
        let dst = SimplicialModel::from_parts(
            v.clone(),
            vec![
                Vertex::new(0, AgentId(0)),
                Vertex::new(1, AgentId(1)),
                Vertex::new(2, AgentId(2)),
            ],
            vec![(Facet::new([0, 1, 2]), [p.clone()].into_iter().collect())],
        );
        let f = SimplicialMap::new([(0, 0), (1, 1)]);
        assert!(check_simplicial_model_morphism(&f, &src, &dst).is_ok());
        let phi = Formula::know(AgentId(0), Formula::Atom(p));
        assert!(is_guarded_positive(&phi).is_err());
        assert!(eval_simplicial(&dst, 0, &phi).unwrap());
        assert!(!eval_simplicial(&src, 0, &phi).unwrap());
    }
}
