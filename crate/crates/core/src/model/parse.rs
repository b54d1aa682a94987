//! Line-oriented text format for timed automata.
//!
//! ```text
//! # comment
//! clocks x y;
//! state q0 init;
//! state q1 accepting inv: x<=3;
//! trans q0 -> q1 [x>=5 && y<2] {y};
//! ```

use std::fmt::Write as _;

use crate::automaton::{AtomicGuard, AutomatonBuilder, ClockId, Relation, TimedAutomaton};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOLS: [&str; 15] = ["->", "&&", "<=", ">=", "==", "<", ">", ";", ":", "[", "]", "{", "}", ",", "-"];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let bytes = line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let (line_no, column) = (ln + 1, i + 1);
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let tok = if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(line[start..i].to_string())
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = line[start..i].parse().map_err(|_| ParseError {
                    line: line_no,
                    column,
                    message: "number too large".into(),
                })?;
                Tok::Num(n)
            } else if let Some(s) = SYMBOLS.iter().find(|s| line[i..].starts_with(**s)) {
                i += s.len();
                Tok::Sym(s)
            } else {
                return Err(ParseError { line: line_no, column, message: format!("unexpected character `{c}`") });
            };
            out.push(Token { tok, line: line_no, column });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    b: AutomatonBuilder,
    has_initial: bool,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.column),
            None => (1, 1),
        };
        Err(ParseError { line, column, message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let kw = self.ident("`clocks`, `state` or `trans`")?;
        match kw.as_str() {
            "clocks" => self.clocks(),
            "state" => self.state(),
            "trans" => self.trans(),
            _ => {
                self.pos -= 1;
                self.err(format!("unknown statement `{kw}`"))
            }
        }
    }

    fn clocks(&mut self) -> Result<(), ParseError> {
        loop {
            if self.eat_sym(";") {
                return Ok(());
            }
            self.eat_sym(",");
            let name = self.ident("clock name")?;
            if self.b.clock_id(&name).is_some() {
                self.pos -= 1;
                return self.err(format!("clock `{name}` declared twice"));
            }
            self.b.clock(name);
        }
    }

    fn state(&mut self) -> Result<(), ParseError> {
        let name = self.ident("state name")?;
        if self.b.state_id(&name).is_some() {
            self.pos -= 1;
            return self.err(format!("state `{name}` declared twice"));
        }
        let q = self.b.state(name);
        loop {
            if self.eat_sym(";") {
                return Ok(());
            }
            match self.ident("`init`, `accepting` or `inv`")?.as_str() {
                "init" => {
                    if self.has_initial {
                        self.pos -= 1;
                        return self.err("second initial state");
                    }
                    self.has_initial = true;
                    self.b.initial(q);
                }
                "accepting" => {
                    self.b.accepting(q);
                }
                "inv" => {
                    self.expect_sym(":")?;
                    let atoms = self.guard(&[";", "init", "accepting"])?;
                    if let Some((pos, _)) = atoms.iter().find(|(_, a)| !a.rel.is_upper()) {
                        self.pos = *pos;
                        return self.err("invariants may only contain upper bounds `x < c` or `x <= c`");
                    }
                    self.b.invariant(q, atoms.into_iter().map(|(_, a)| a).collect());
                }
                other => {
                    self.pos -= 1;
                    return self.err(format!("unknown state attribute `{other}`"));
                }
            }
        }
    }

    fn trans(&mut self) -> Result<(), ParseError> {
        let src = self.state_ref()?;
        self.expect_sym("->")?;
        let tgt = self.state_ref()?;
        let mut atoms = Vec::new();
        if self.eat_sym("[") {
            atoms = self.guard(&["]"])?.into_iter().map(|(_, a)| a).collect();
            self.expect_sym("]")?;
        }
        let mut resets = Vec::new();
        let has_resets = self.eat_sym("{");
        while has_resets && !self.eat_sym("}") {
            self.eat_sym(",");
            if self.eat_sym("}") {
                break;
            }
            resets.push(self.clock_ref()?);
        }
        self.expect_sym(";")?;
        self.b.transition(src, atoms, resets, tgt);
        Ok(())
    }

    fn state_ref(&mut self) -> Result<crate::automaton::StateId, ParseError> {
        let name = self.ident("state name")?;
        self.b.state_id(&name).map(Ok).unwrap_or_else(|| {
            self.pos -= 1;
            self.err(format!("unknown state `{name}`"))
        })
    }

    fn clock_ref(&mut self) -> Result<ClockId, ParseError> {
        let name = self.ident("clock name")?;
        self.b.clock_id(&name).map(Ok).unwrap_or_else(|| {
            self.pos -= 1;
            self.err(format!("unknown clock `{name}`"))
        })
    }

    /// Conjunction of atoms with their token positions, possibly empty when
    /// the next token is a terminator.
    fn guard(&mut self, terminators: &[&str]) -> Result<Vec<(usize, AtomicGuard)>, ParseError> {
        let at_end = |p: &Parser| match p.peek() {
            Some(Tok::Sym(s)) => terminators.contains(s),
            Some(Tok::Ident(s)) => terminators.contains(&s.as_str()),
            _ => false,
        };
        let mut atoms = Vec::new();
        if at_end(self) {
            return Ok(atoms);
        }
        loop {
            atoms.push((self.pos, self.atom()?));
            if !self.eat_sym("&&") {
                return Ok(atoms);
            }
        }
    }

    fn atom(&mut self) -> Result<AtomicGuard, ParseError> {
        let clock = self.clock_ref()?;
        let rel = match self.peek() {
            Some(Tok::Sym("<")) => Relation::Lt,
            Some(Tok::Sym("<=")) => Relation::Le,
            Some(Tok::Sym("==")) => Relation::Eq,
            Some(Tok::Sym(">=")) => Relation::Ge,
            Some(Tok::Sym(">")) => Relation::Gt,
            Some(Tok::Sym("-")) => return self.err("diagonal constraints `x - y ~ c` are not supported"),
            _ => return self.err("expected a relation `<`, `<=`, `==`, `>=` or `>`"),
        };
        self.pos += 1;
        match self.peek() {
            Some(Tok::Num(n)) if *n <= u32::MAX as u64 => {
                let c = *n as u32;
                self.pos += 1;
                Ok(AtomicGuard::new(clock, rel, c))
            }
            Some(Tok::Sym("-")) => self.err("constants must be non-negative"),
            _ => self.err("expected a non-negative integer constant"),
        }
    }
}

/// Parses the text format.
pub fn parse(text: &str) -> Result<TimedAutomaton, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, b: AutomatonBuilder::new(), has_initial: false };
    while p.pos < p.toks.len() {
        p.statement()?;
    }
    let end = p.toks.last().map(|t| (t.line, t.column)).unwrap_or((1, 1));
    p.b.build().map_err(|e| ParseError { line: end.0, column: end.1, message: e.to_string() })
}

/// Atoms joined by `&&`, with clock names.
pub fn format_guard(ta: &TimedAutomaton, atoms: &[AtomicGuard]) -> String {
    atoms
        .iter()
        .map(|a| format!("{}{}{}", ta.clock_name(a.clock), a.rel.symbol(), a.constant))
        .collect::<Vec<_>>()
        .join(" && ")
}

/// `src -> tgt [guard] {resets}` for transition `i`.
pub fn format_transition(ta: &TimedAutomaton, i: usize) -> String {
    let t = ta.transition(i);
    let resets: Vec<&str> = t.resets.iter().map(|r| ta.clock_name(*r)).collect();
    format!(
        "{} -> {} [{}] {{{}}}",
        ta.state_name(t.source),
        ta.state_name(t.target),
        format_guard(ta, &t.guard.atoms),
        resets.join(", ")
    )
}

/// Canonical text form; `parse(&serialize(ta)) == ta`.
pub fn serialize(ta: &TimedAutomaton) -> String {
    let mut out = String::new();
    let guard = |atoms: &[AtomicGuard]| format_guard(ta, atoms);
    let _ = writeln!(out, "clocks{};", ta.clock_names().iter().map(|c| format!(" {c}")).collect::<String>());
    for q in ta.states() {
        let _ = write!(out, "state {}", ta.state_name(q));
        if q == ta.initial() {
            out.push_str(" init");
        }
        if ta.is_accepting(q) {
            out.push_str(" accepting");
        }
        let inv = ta.invariant(q);
        if !inv.is_true() {
            let _ = write!(out, " inv: {}", guard(&inv.atoms));
        }
        out.push_str(";\n");
    }
    for i in 0..ta.transitions().len() {
        let _ = writeln!(out, "trans {};", format_transition(ta, i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two clocks
clocks x y;
state q0 init;
state q1 inv: x<=3;
state q2 accepting;
trans q0 -> q1 [x>=5 && y<2] {y};
trans q1 -> q2;
trans q2 -> q0 [y==1] {x, y};
";

    #[test]
    fn parses_sample() {
        let ta = parse(SAMPLE).unwrap();
        assert_eq!(ta.clock_count(), 2);
        assert_eq!(ta.state_count(), 3);
        assert_eq!(ta.transitions().len(), 3);
        assert!(ta.transition(1).guard.is_true());
        assert!(ta.is_accepting(crate::automaton::StateId(2)));
        assert_eq!(ta.transition(2).resets.len(), 2);
        assert_eq!(ta.invariant(crate::automaton::StateId(1)).atoms.len(), 1);
    }

    #[test]
    fn round_trip() {
        let ta = parse(SAMPLE).unwrap();
        let text = serialize(&ta);
        assert_eq!(parse(&text).unwrap(), ta);
        assert_eq!(serialize(&parse(&text).unwrap()), text);
    }

    #[test]
    fn diagonal_rejected_with_position() {
        let e = parse("clocks x y;\nstate a init;\nstate b;\ntrans a -> b [x-y<2] {};\n").unwrap_err();
        assert_eq!((e.line, e.column), (4, 16));
        assert!(e.message.contains("diagonal"));
    }

    #[test]
    fn lower_invariant_rejected() {
        let e = parse("clocks x;\nstate a init inv: x>=1;\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("upper"));
    }

    #[test]
    fn errors() {
        assert!(parse("clocks x;\nstate a;\n").unwrap_err().message.contains("initial"));
        assert!(parse("clocks x;\nstate a init;\ntrans a -> b [] {};").unwrap_err().message.contains("unknown state"));
        assert!(parse("clocks x;\nstate a init;\ntrans a -> a [z<1] {};").unwrap_err().message.contains("unknown clock"));
        assert!(parse("clocks x;\nstate a init;\ntrans a -> a [x<1] {}").unwrap_err().message.contains("`;`"));
        assert!(parse("clocks x;\nstate a init;\ntrans a -> a [x<1] {}; $").unwrap_err().message.contains("unexpected"));
        assert!(parse("clocks x x;").unwrap_err().message.contains("twice"));
        assert!(parse("clocks x;\nstate a init;\nstate b init;").unwrap_err().message.contains("second"));
    }

    #[test]
    fn empty_clock_list() {
        let ta = parse("clocks;\nstate a init accepting;\n").unwrap();
        assert_eq!(ta.clock_count(), 0);
        assert_eq!(parse(&serialize(&ta)).unwrap(), ta);
    }

    proptest::proptest! {
        #[test]
        fn random_models_round_trip(seed in 0u64..1 << 32, states in 1u32..8, clocks in 0u32..6, transitions in 0u32..16, max_const in 0u32..20) {
            let p = crate::model::RandomParams { states, clocks, transitions, max_const, ..Default::default() };
            let ta = crate::model::random_ta(seed, &p);
            let text = serialize(&ta);
            proptest::prop_assert_eq!(parse(&text).unwrap(), ta);
        }
    }
}
