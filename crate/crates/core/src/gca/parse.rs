//! Text formats: presentations, polynomial and form expressions.
//!
//! ```text
//! field Q;
//! gen x : 0 weight 1;
//! gen xi : -1 weight 2;
//! D xi = x^2;
//! ```

use std::sync::Arc;

use num::{BigInt, One, ToPrimitive, Zero};

use super::cdga::SemifreeCdga;
use super::poly::Poly;
use super::ring::{Generator, Ring};
use crate::error::{Error, Result};
use crate::Q;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = chars[s..i].iter().collect();
            col += i - s;
            out.push(Token { tok: Tok::Int(lit.parse().expect("digits")), line: start.0, col: start.1 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'' || chars[i] == '.') {
                i += 1;
            }
            let id: String = chars[s..i].iter().collect();
            col += i - s;
            out.push(Token { tok: Tok::Ident(id), line: start.0, col: start.1 });
            continue;
        }
        if "+-*^/():;{}=,.[]".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line, col });
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::parse(line, col, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

/// Resolves identifiers in an expression to generator indices. The flag is
/// true for `d(NAME)` occurrences.
pub type Resolver<'a> = dyn Fn(&str, bool) -> Option<usize> + 'a;

pub struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    end: (usize, usize),
}

impl<'t> Parser<'t> {
    pub fn new(toks: &'t [Token], text: &str) -> Self {
        let lines = text.lines().count().max(1);
        let last = text.lines().last().map(|l| l.chars().count()).unwrap_or(0);
        Parser { toks, pos: 0, end: (lines, last + 1) }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn loc(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.loc();
        Error::parse(l, c, msg)
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        self.pos += 1;
        t
    }

    pub fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.is_kw(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{kw}`")))
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    pub fn int(&mut self) -> Result<i64> {
        let neg = self.eat_sym('-');
        match self.peek() {
            Some(Tok::Int(n)) => {
                let v = n.to_i64().ok_or_else(|| self.err("integer out of range"))?;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.err("expected an integer")),
        }
    }

    /// Everything up to (not including) the next `;` at nesting depth 0.
    pub fn until_semicolon(&mut self) -> Result<&'t [Token]> {
        let start = self.pos;
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            match t {
                Tok::Sym('(') => depth += 1,
                Tok::Sym(')') => depth -= 1,
                Tok::Sym(';') if depth == 0 => {
                    let s = &self.toks[start..self.pos];
                    self.pos += 1;
                    return Ok(s);
                }
                _ => {}
            }
            self.pos += 1;
        }
        Err(self.err("missing `;`"))
    }

    /// Polynomial or form expression.
    pub fn expr(&mut self, ring: &Arc<Ring>, resolve: &Resolver<'_>, forms: bool) -> Result<Poly> {
        let mut acc = if self.eat_sym('-') {
            -self.product(ring, resolve, forms)?
        } else {
            self.eat_sym('+');
            self.product(ring, resolve, forms)?
        };
        loop {
            if self.eat_sym('+') {
                acc = &acc + &self.product(ring, resolve, forms)?;
            } else if self.eat_sym('-') {
                acc = &acc - &self.product(ring, resolve, forms)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self, ring: &Arc<Ring>, resolve: &Resolver<'_>, forms: bool) -> Result<Poly> {
        let mut acc = self.power(ring, resolve, forms)?;
        loop {
            if self.eat_sym('*') {
                acc = &acc * &self.power(ring, resolve, forms)?;
            } else if forms && self.is_sym('^') {
                self.pos += 1;
                acc = &acc * &self.power(ring, resolve, forms)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self, ring: &Arc<Ring>, resolve: &Resolver<'_>, forms: bool) -> Result<Poly> {
        if self.eat_sym('-') {
            return Ok(-self.power(ring, resolve, forms)?);
        }
        let base = self.atom(ring, resolve, forms)?;
        if self.is_sym('^') && matches!(self.peek_at(1), Some(Tok::Int(_))) {
            self.pos += 1;
            let e = self.int()?;
            if !(0..=64).contains(&e) {
                return Err(self.err("exponent out of range"));
            }
            return Ok(base.pow(e as u32));
        }
        if self.is_sym('^') && !forms {
            return Err(self.err("expected an integer exponent"));
        }
        Ok(base)
    }

    fn atom(&mut self, ring: &Arc<Ring>, resolve: &Resolver<'_>, forms: bool) -> Result<Poly> {
        let (line, col) = self.loc();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let mut c = Q::from_integer(n);
                if self.is_sym('/') {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(m)) if !m.is_zero() => {
                            self.pos += 1;
                            c /= Q::from_integer(m);
                        }
                        _ => return Err(self.err("expected a nonzero denominator")),
                    }
                }
                Ok(Poly::constant(ring, c))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr(ring, resolve, forms)?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if forms && name == "d" && self.is_sym('(') {
                    self.pos += 1;
                    let inner = self.ident()?;
                    self.expect_sym(')')?;
                    let i = resolve(&inner, true)
                        .ok_or_else(|| Error::parse(line, col, format!("unknown generator `{inner}` in d({inner})")))?;
                    return Ok(Poly::var(ring, i));
                }
                let i = resolve(&name, false)
                    .ok_or_else(|| Error::parse(line, col, format!("unknown generator `{name}`")))?;
                Ok(Poly::var(ring, i))
            }
            _ => Err(self.err("expected an expression")),
        }
    }
}

/// Parse a whole-string expression over `ring` with plain name lookup.
pub fn parse_poly(ring: &Arc<Ring>, text: &str) -> Result<Poly> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text);
    let r = ring.clone();
    let v = p.expr(ring, &move |n, _| r.find(n), false)?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Parse an expression with a custom resolver (form context enables `d(NAME)` and wedge `^`).
pub fn parse_expr(ring: &Arc<Ring>, text: &str, resolve: &Resolver<'_>, forms: bool) -> Result<Poly> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text);
    let v = p.expr(ring, resolve, forms)?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Parse a presentation in the `field Q; gen ...; D ...;` grammar.
pub fn parse_presentation(text: &str) -> Result<SemifreeCdga> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text);
    let pres = presentation_body(&mut p, text, |p| p.at_end())?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(pres)
}

/// Parse presentation statements until `stop` holds (used for embedded presentations).
pub fn presentation_body(
    p: &mut Parser<'_>,
    text: &str,
    stop: impl Fn(&Parser<'_>) -> bool,
) -> Result<SemifreeCdga> {
    p.expect_kw("field")?;
    let field = p.ident()?;
    if field != "Q" {
        return Err(p.err(format!("unsupported field `{field}`; only Q is available")));
    }
    p.expect_sym(';')?;
    let mut gens: Vec<Generator> = Vec::new();
    let mut diffs: Vec<(usize, usize, String, &[Token])> = Vec::new();
    while !stop(p) {
        let (line, col) = p.loc();
        if p.is_kw("gen") {
            p.pos += 1;
            let name = p.ident()?;
            p.expect_sym(':')?;
            let (dl, dc) = p.loc();
            let deg = p.int()?;
            if deg > 0 {
                return Err(Error::parse(dl, dc, format!("generator `{name}` has positive degree {deg}")));
            }
            let mut g = Generator::new(name.clone(), deg as i32);
            if p.is_kw("weight") {
                p.pos += 1;
                let (wl, wc) = p.loc();
                let w = p.int()?;
                if w < 0 {
                    return Err(Error::parse(wl, wc, "weights must be nonnegative"));
                }
                g = g.with_weight(w);
            }
            p.expect_sym(';')?;
            if gens.iter().any(|h| h.name == name) {
                return Err(Error::parse(line, col, format!("duplicate generator `{name}`")));
            }
            gens.push(g);
        } else if p.is_kw("D") {
            p.pos += 1;
            let name = p.ident()?;
            p.expect_sym('=')?;
            let body = p.until_semicolon()?;
            diffs.push((line, col, name, body));
        } else {
            return Err(p.err("expected `gen` or `D`"));
        }
    }
    if gens.is_empty() {
        // the ground field: a presentation with no generators
        let ring = Ring::new(Vec::new())?;
        if let Some((l, c, n, _)) = diffs.first() {
            return Err(Error::parse(*l, *c, format!("D of unknown generator `{n}`")));
        }
        return SemifreeCdga::from_parts(ring, Vec::new());
    }
    let ring = Ring::new(gens)?;
    let mut out = vec![Poly::zero(&ring); ring.len()];
    let mut seen = vec![false; ring.len()];
    for (line, col, name, body) in diffs {
        let i = ring.find(&name).ok_or_else(|| Error::parse(line, col, format!("D of unknown generator `{name}`")))?;
        if seen[i] {
            return Err(Error::parse(line, col, format!("D {name} given twice")));
        }
        seen[i] = true;
        let mut sub = Parser::new(body, text);
        if body.is_empty() {
            return Err(Error::parse(line, col, "empty expression"));
        }
        let r = ring.clone();
        let v = sub.expr(&ring, &move |n, _| r.find(n), false)?;
        if !sub.at_end() {
            return Err(sub.err("trailing input in expression"));
        }
        if let Some(j) = v.terms().keys().filter_map(|m| m.max_gen()).max() {
            if j >= i {
                return Err(Error::parse(
                    line,
                    col,
                    format!("forward reference: D {name} uses `{}`, which is not attached before `{name}`", ring.gen(j).name),
                ));
            }
        }
        out[i] = v;
    }
    SemifreeCdga::from_parts(ring, out)
}

/// Parse a rational literal such as `-3/4`.
pub fn parse_rational(text: &str) -> Result<Q> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text);
    let neg = p.eat_sym('-');
    let mut c = match p.bump() {
        Some(Tok::Int(n)) => Q::from_integer(n.clone()),
        _ => return Err(Error::parse(1, 1, "expected a rational number")),
    };
    if p.eat_sym('/') {
        match p.bump() {
            Some(Tok::Int(m)) if !m.is_zero() => c /= Q::from_integer(m.clone()),
            _ => return Err(Error::parse(1, 1, "expected a nonzero denominator")),
        }
    }
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(if neg { -c } else { c })
}

pub fn one() -> Q {
    Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CRIT: &str = "field Q;\ngen x : 0;\ngen y : -1;\nD y = x^2;\n";

    #[test]
    fn parses_critical_locus() {
        let a = parse_presentation(CRIT).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.diff_of(1).to_string(), "x^2");
        assert_eq!(a.to_text(), CRIT);
    }

    #[test]
    fn forward_reference() {
        let e = parse_presentation("field Q; gen x : 0; gen y : -1; D y = y*x;").unwrap_err();
        assert!(e.to_string().contains("forward reference"), "{e}");
    }

    #[test]
    fn positive_degree() {
        let e = parse_presentation("field Q;\ngen x : 1;").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, col: 9, .. }), "{e:?}");
    }

    #[test]
    fn rational_literals() {
        let a = parse_presentation(CRIT).unwrap();
        let p = parse_poly(a.ring(), "1/3*x^3 - 2/4").unwrap();
        assert_eq!(p.to_string(), "1/3*x^3 - 1/2");
        assert_eq!(parse_poly(a.ring(), &p.to_string()).unwrap(), p);
    }

    #[test]
    fn parentheses_and_signs() {
        let a = parse_presentation(CRIT).unwrap();
        let p = parse_poly(a.ring(), "-(x + 1)^2 + -x").unwrap();
        assert_eq!(p.to_string(), "-x^2 - 3*x - 1");
    }
}
