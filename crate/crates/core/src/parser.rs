//! Text formats: `.hex` programs, `.ssf` family files and `.hb` contexts.
//!
//! ```text
//! rule := head? (":-" body)? "."     head := atom (("v" | "|") atom)*
//! lit  := ["not"] (atom | ext)        ext  := "&" name "[" params? "]" "(" consts? ")"
//! ```

use std::collections::BTreeSet;

use crate::error::{HexError, Result};
use crate::family::{Sigma, SupportFamily, SupportSet};
use crate::program::{Atom, AtomSet, BodyLiteral, ExternalAtom, InputParam, Program, Rule};

/// Prefix reserved for generated atoms.
pub const AUX_PREFIX: &str = "aux__";

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept `aux__` predicates, e.g. when reading generated programs back.
    pub allow_aux: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(String),
    Str(String),
    If,
    Dot,
    Comma,
    Colon,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Amp,
    Bar,
    Minus,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| HexError::Parse { line, column: col, message };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '.' => Some(Tok::Dot),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            '-' => Some(Tok::Minus),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        if c == ':' {
            if chars.get(i + 1) == Some(&'-') {
                out.push(Token { tok: Tok::If, line: l0, col: c0 });
                i += 2;
                col += 2;
            } else {
                out.push(Token { tok: Tok::Colon, line: l0, col: c0 });
                i += 1;
                col += 1;
            }
            continue;
        }
        if c == '"' {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\n' {
                    return Err(err(l0, c0, "unterminated string".into()));
                }
                i += 1;
            }
            if i >= chars.len() {
                return Err(err(l0, c0, "unterminated string".into()));
            }
            i += 1;
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Str(s), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Int(chars[start..i].iter().collect()), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            let s: String = chars[start..i].iter().collect();
            let tok = if c.is_uppercase() || c == '_' { Tok::Var(s) } else { Tok::Ident(s) };
            out.push(Token { tok, line: l0, col: c0 });
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character '{c}'")));
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    opts: ParseOptions,
}

impl Parser {
    fn new(text: &str, opts: ParseOptions) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0, opts })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.here();
        Err(HexError::Parse { line: t.line, column: t.col, message: message.into() })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) | Tok::Var(s) | Tok::Int(s) | Tok::Str(s) => format!("'{s}'"),
            Tok::If => "':-'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrack => "'['".into(),
            Tok::RBrack => "']'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {}, found {}", Self::describe(&want), Self::describe(self.peek())))
        }
    }

    fn is_keyword(s: &str) -> bool {
        s == "not" || s == "v"
    }

    fn constant(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Int(s) | Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Var(s) => self.fail(format!("variable '{s}' in ground program")),
            t => self.fail(format!("expected constant, found {}", Self::describe(&t))),
        }
    }

    fn constants_until(&mut self, close: Tok) -> Result<Vec<String>> {
        let mut out = Vec::new();
        if *self.peek() == close {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.constant()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if *t == close => {
                    self.bump();
                    return Ok(out);
                }
                t => {
                    return self.fail(format!(
                        "expected ',' or {}, found {}",
                        Self::describe(&close),
                        Self::describe(t)
                    ))
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let name = match self.peek().clone() {
            Tok::Ident(s) => s,
            Tok::Var(s) => return self.fail(format!("variable '{s}' in ground program")),
            t => return self.fail(format!("expected atom, found {}", Self::describe(&t))),
        };
        if Self::is_keyword(&name) {
            return self.fail(format!("'{name}' is reserved and cannot name a predicate"));
        }
        if name.contains('\'') {
            return self.fail(format!("predicate '{name}' may not contain a quote"));
        }
        if !self.opts.allow_aux && name.starts_with(AUX_PREFIX) {
            return self.fail(format!("predicate '{name}' uses the reserved prefix {AUX_PREFIX}"));
        }
        self.bump();
        let args = if *self.peek() == Tok::LParen {
            self.bump();
            self.constants_until(Tok::RParen)?
        } else {
            Vec::new()
        };
        Ok(Atom { predicate: name, args })
    }

    fn external(&mut self) -> Result<ExternalAtom> {
        self.expect(Tok::Amp)?;
        let name = match self.bump() {
            Tok::Ident(s) | Tok::Var(s) => s,
            t => {
                self.pos -= 1;
                return self.fail(format!("expected external predicate name, found {}", Self::describe(&t)));
            }
        };
        self.expect(Tok::LBrack)?;
        let mut inputs = Vec::new();
        if *self.peek() == Tok::RBrack {
            self.bump();
        } else {
            loop {
                let p = match self.peek().clone() {
                    Tok::Ident(s) => {
                        if !self.opts.allow_aux && s.starts_with(AUX_PREFIX) {
                            return self.fail(format!("predicate '{s}' uses the reserved prefix {AUX_PREFIX}"));
                        }
                        InputParam::Predicate(s)
                    }
                    Tok::Int(s) | Tok::Str(s) => InputParam::Constant(s),
                    Tok::Var(s) => return self.fail(format!("variable '{s}' in ground program")),
                    t => return self.fail(format!("expected input parameter, found {}", Self::describe(&t))),
                };
                self.bump();
                inputs.push(p);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RBrack => {
                        self.bump();
                        break;
                    }
                    t => return self.fail(format!("expected ',' or ']', found {}", Self::describe(t))),
                }
            }
        }
        let outputs = if *self.peek() == Tok::LParen {
            self.bump();
            self.constants_until(Tok::RParen)?
        } else {
            Vec::new()
        };
        Ok(ExternalAtom { name, inputs, outputs })
    }

    fn literal(&mut self) -> Result<BodyLiteral> {
        let negated = matches!(self.peek(), Tok::Ident(s) if s == "not")
            && matches!(self.peek_at(1), Tok::Ident(_) | Tok::Amp | Tok::Var(_));
        if negated {
            self.bump();
        }
        if *self.peek() == Tok::Amp {
            Ok(BodyLiteral::ext(self.external()?, negated))
        } else {
            let a = self.atom()?;
            Ok(if negated { BodyLiteral::neg(a) } else { BodyLiteral::pos(a) })
        }
    }

    fn rule(&mut self) -> Result<Rule> {
        let mut head = Vec::new();
        if !matches!(self.peek(), Tok::If | Tok::Dot) {
            head.push(self.atom()?);
            loop {
                match self.peek() {
                    Tok::Bar => {
                        self.bump();
                    }
                    Tok::Ident(s) if s == "v" => {
                        self.bump();
                    }
                    _ => break,
                }
                head.push(self.atom()?);
            }
        }
        let mut body = Vec::new();
        if *self.peek() == Tok::If {
            self.bump();
            if *self.peek() != Tok::Dot {
                loop {
                    body.push(self.literal()?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
        } else if head.is_empty() {
            return self.fail(format!("expected rule, found {}", Self::describe(self.peek())));
        }
        self.expect(Tok::Dot)?;
        Ok(Rule::new(head, body))
    }

    fn program(&mut self) -> Result<Program> {
        let mut rules = BTreeSet::new();
        while *self.peek() != Tok::Eof {
            rules.insert(self.rule()?);
        }
        Ok(Program { rules })
    }

    fn atom_list(&mut self) -> Result<AtomSet> {
        let mut out = AtomSet::new();
        if !matches!(self.peek(), Tok::Ident(_)) {
            return Ok(out);
        }
        loop {
            out.insert(self.atom()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn support_set(&mut self) -> Result<SupportSet> {
        let line = self.here().line;
        self.expect(Tok::LBrace)?;
        let (mut pos, mut neg) = (AtomSet::new(), AtomSet::new());
        while *self.peek() != Tok::RBrace {
            let negative = *self.peek() == Tok::Minus;
            if negative {
                self.bump();
            }
            let a = self.atom()?;
            if negative {
                neg.insert(a);
            } else {
                pos.insert(a);
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
        self.bump();
        if let Some(a) = pos.intersection(&neg).next() {
            return Err(HexError::InconsistentSupportSet { line, atom: a.to_string() });
        }
        Ok(SupportSet { pos, neg })
    }

    fn family(&mut self) -> Result<SupportFamily> {
        match self.peek() {
            Tok::Ident(s) if s == "family" => {
                self.bump();
            }
            t => return self.fail(format!("expected 'family', found {}", Self::describe(t))),
        }
        let external = self.external()?;
        let sigma = match self.peek() {
            Tok::Var(s) if s == "T" => Sigma::T,
            Tok::Var(s) if s == "F" => Sigma::F,
            t => return self.fail(format!("expected T or F, found {}", Self::describe(t))),
        };
        self.bump();
        let declared = match self.peek() {
            Tok::Ident(s) if s == "over" => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let d = self.atom_list()?;
                self.expect(Tok::RBrace)?;
                Some(d)
            }
            _ => None,
        };
        self.expect(Tok::LBrace)?;
        let mut sets = BTreeSet::new();
        while *self.peek() != Tok::RBrace {
            sets.insert(self.support_set()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
        self.bump();
        let mentioned: AtomSet = sets.iter().flat_map(|s: &SupportSet| s.atoms().cloned()).collect();
        let domain = match declared {
            Some(d) => {
                if let Some(a) = mentioned.difference(&d).next() {
                    return self.fail(format!("atom {a} is outside the declared domain"));
                }
                d
            }
            None => mentioned,
        };
        Ok(SupportFamily { external, sigma, domain, sets })
    }
}

pub fn parse_program(text: &str) -> Result<Program> {
    parse_program_with(text, ParseOptions::default())
}

pub fn parse_program_with(text: &str, opts: ParseOptions) -> Result<Program> {
    Parser::new(text, opts)?.program()
}

/// Canonical text: one rule per line in sorted order.
pub fn print_program(p: &Program) -> String {
    p.to_string()
}

/// Parses `family &g[..](..) T|F [over {..}] { {a, -b} ... }` blocks.
/// Without `over`, the domain is the set of atoms the members mention.
pub fn parse_family_file(text: &str) -> Result<Vec<SupportFamily>> {
    let mut p = Parser::new(text, ParseOptions { allow_aux: true })?;
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        out.push(p.family()?);
    }
    Ok(out)
}

pub fn print_family(f: &SupportFamily) -> String {
    let dom: Vec<String> = f.domain.iter().map(|a| a.to_string()).collect();
    let sets: Vec<String> = f.sets.iter().map(|s| s.to_string()).collect();
    format!("family {} {} over {{{}}} {{ {} }}\n", f.external, f.sigma, dom.join(", "), sets.join(" "))
}

/// Parses a context file with lines `H: a, b` and `B: b`; a missing line means
/// the empty set.
pub fn parse_hb(text: &str) -> Result<(AtomSet, AtomSet)> {
    let mut p = Parser::new(text, ParseOptions::default())?;
    let (mut h, mut b) = (None, None);
    while *p.peek() != Tok::Eof {
        let which = match p.peek().clone() {
            Tok::Var(s) if s == "H" || s == "B" => s,
            t => return p.fail(format!("expected 'H:' or 'B:', found {}", Parser::describe(&t))),
        };
        p.bump();
        p.expect(Tok::Colon)?;
        let atoms = p.atom_list()?;
        let slot = if which == "H" { &mut h } else { &mut b };
        if slot.is_some() {
            return p.fail(format!("duplicate {which} line"));
        }
        *slot = Some(atoms);
    }
    Ok((h.unwrap_or_default(), b.unwrap_or_default()))
}

pub fn print_hb(h: &AtomSet, b: &AtomSet) -> String {
    let j = |s: &AtomSet| s.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
    format!("H: {}\nB: {}\n", j(h), j(b))
}

/// Comma-separated atom list, as used by `--universe`.
pub fn parse_atom_list(text: &str) -> Result<AtomSet> {
    let mut p = Parser::new(text, ParseOptions::default())?;
    let atoms = p.atom_list()?;
    if *p.peek() != Tok::Eof {
        return p.fail(format!("unexpected {}", Parser::describe(p.peek())));
    }
    Ok(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_id_program() {
        let p = parse_program("p :- &id[p]().").unwrap();
        let e = ExternalAtom::with_preds("id", &["p"], &[]);
        assert_eq!(p, Program::new([Rule::new([Atom::prop("p")], [BodyLiteral::ext(e, false)])]));
        assert_eq!(print_program(&p), "p :- &id[p]().\n");
    }

    #[test]
    fn empty_text_is_empty_program() {
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("% only a comment\n").unwrap().is_empty());
        assert_eq!(print_program(&Program::default()), "");
    }

    #[test]
    fn disjunctive_head_with_negated_external() {
        let p = parse_program("a v b :- not &neg[a]().").unwrap();
        let r = p.rules.iter().next().unwrap();
        assert_eq!(r.head.len(), 2);
        assert!(r.body()[0].negated);
        assert_eq!(parse_program(&print_program(&p)).unwrap(), p);
        assert_eq!(parse_program("a | b :- not &neg[a]().").unwrap(), p);
    }

    #[test]
    fn errors_carry_line_and_column() {
        let err = parse_program("a.\nb :- .c").unwrap_err();
        match err {
            HexError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e:?}"),
        }
        let err = parse_program("p(X).").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn aux_prefix_reserved_unless_allowed() {
        assert!(parse_program("aux__xe_1 :- a.").is_err());
        assert!(parse_program_with("aux__xe_1 :- a.", ParseOptions { allow_aux: true }).is_ok());
    }

    #[test]
    fn zero_arity_parens_are_optional() {
        assert_eq!(parse_program("p() :- q.").unwrap(), parse_program("p :- q.").unwrap());
    }

    #[test]
    fn constants_and_predicates_in_inputs() {
        let p = parse_program("h :- &countGeq[p,2](), &diff[p,q](a).").unwrap();
        let exts = p.externals();
        let cg = exts.iter().find(|e| e.name == "countGeq").unwrap();
        assert_eq!(cg.inputs, vec![InputParam::Predicate("p".into()), InputParam::Constant("2".into())]);
    }

    #[test]
    fn family_blocks() {
        let fams = parse_family_file("family &aOrNotB[a,b]() T { {a} {-b} }").unwrap();
        assert_eq!(fams.len(), 1);
        let f = &fams[0];
        assert_eq!(f.sigma, Sigma::T);
        let want: BTreeSet<SupportSet> = [
            SupportSet { pos: [Atom::prop("a")].into(), neg: AtomSet::new() },
            SupportSet { pos: AtomSet::new(), neg: [Atom::prop("b")].into() },
        ]
        .into();
        assert_eq!(f.sets, want);

        let empty = parse_family_file("family &g[]() T { }").unwrap();
        assert!(empty[0].sets.is_empty());

        let d = parse_family_file("family &diff[p,q](a) T { {p(a), -q(a)} }").unwrap();
        assert_eq!(d[0].sets.len(), 1);
        assert_eq!(d[0].sets.iter().next().unwrap().len(), 2);
    }

    #[test]
    fn family_roundtrip_and_inconsistency() {
        let f = &parse_family_file("family &aOrNotB[a,b]() F over {a, b} { {b, -a} }").unwrap()[0];
        assert_eq!(&parse_family_file(&print_family(f)).unwrap()[0], f);
        let err = parse_family_file("family &g[a]() T { {a, -a} }").unwrap_err();
        assert!(err.to_string().contains("inconsistent support set"));
    }

    #[test]
    fn hb_file() {
        let (h, b) = parse_hb("H: a, b\nB: b\n").unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(b, [Atom::prop("b")].into());
        let (h, b) = parse_hb("H:\nB:\n").unwrap();
        assert!(h.is_empty() && b.is_empty());
        assert_eq!(parse_hb(&print_hb(&h, &b)).unwrap(), (h, b));
    }

    #[test]
    fn constraint_and_fact_printing() {
        let p = parse_program(":- a, not b. c.").unwrap();
        assert_eq!(print_program(&p), ":- a, not b.\nc.\n");
    }
}
