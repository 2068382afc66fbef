//! Concrete formula syntax. ASCII grammar: `tt`, `ff`, identifiers for
//! variables; `!f`; `f & f`; `f | f`; `<a>c f`, `<a>nc f`, `[a]c f`,
//! `[a]nc f`; plain `<a> f`, `[a] f`; `<co> f`, `[co] f` for the trace
//! modalities; `mu Z. f`, `nu Z. f`; parentheses. Prefix operators bind
//! tighter than `&`, which binds tighter than `|`; fixpoint bodies extend as
//! far right as possible.

use crate::error::{Error, Result};
use crate::tsi::Label;

use super::{plain_view, Formula, PlainView};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lt,
    Gt,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Amp,
    Pipe,
    Bang,
    Dot,
}

struct Lexer {
    toks: Vec<(usize, usize, Tok)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(usize, usize, Tok)>> {
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let lnum = lno + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            match c {
                ' ' | '\t' | '\r' => {
                    i += 1;
                }
                '#' => break,
                '<' => {
                    out.push((lnum, col, Tok::Lt));
                    i += 1;
                }
                '>' => {
                    out.push((lnum, col, Tok::Gt));
                    i += 1;
                }
                '[' => {
                    out.push((lnum, col, Tok::LBrack));
                    i += 1;
                }
                ']' => {
                    out.push((lnum, col, Tok::RBrack));
                    i += 1;
                }
                '(' => {
                    out.push((lnum, col, Tok::LParen));
                    i += 1;
                }
                ')' => {
                    out.push((lnum, col, Tok::RParen));
                    i += 1;
                }
                '&' => {
                    out.push((lnum, col, Tok::Amp));
                    i += 1;
                }
                '|' => {
                    out.push((lnum, col, Tok::Pipe));
                    i += 1;
                }
                '!' => {
                    out.push((lnum, col, Tok::Bang));
                    i += 1;
                }
                '.' => {
                    out.push((lnum, col, Tok::Dot));
                    i += 1;
                }
                c if c.is_alphanumeric() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    out.push((lnum, start + 1, Tok::Ident(word)));
                }
                other => {
                    return Err(Error::parse(lnum, col, format!("unexpected character {other:?}")));
                }
            }
        }
    }
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, _, t)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|&(l, c, _)| (l, c))
            .unwrap_or((1, 1))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, _, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let (l, c) = self.here();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::parse(l, c, format!("expected {what}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        let (l, c) = self.here();
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(Error::parse(l, c, format!("expected {what}"))),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut lx = Lexer { toks: lex(text)?, pos: 0 };
    let f = parse_or(&mut lx)?;
    if lx.peek().is_some() {
        let (l, c) = lx.here();
        return Err(Error::parse(l, c, "trailing input after formula"));
    }
    f.check_polarity().map_err(|m| Error::parse(0, 0, m))?;
    Ok(f.distinct_binders())
}

fn parse_or(lx: &mut Lexer) -> Result<Formula> {
    let mut f = parse_and(lx)?;
    while lx.peek() == Some(&Tok::Pipe) {
        lx.next();
        let rhs = parse_and(lx)?;
        f = Formula::or(f, rhs);
    }
    Ok(f)
}

fn parse_and(lx: &mut Lexer) -> Result<Formula> {
    let mut f = parse_prefix(lx)?;
    while lx.peek() == Some(&Tok::Amp) {
        lx.next();
        let rhs = parse_prefix(lx)?;
        f = Formula::and(f, rhs);
    }
    Ok(f)
}

fn parse_prefix(lx: &mut Lexer) -> Result<Formula> {
    match lx.peek() {
        Some(Tok::Bang) => {
            lx.next();
            Ok(Formula::neg(parse_prefix(lx)?))
        }
        Some(Tok::Lt) => {
            lx.next();
            let name = lx.ident("modality label")?;
            lx.expect(Tok::Gt, ">")?;
            if name == "co" {
                return Ok(Formula::dia_co(parse_prefix(lx)?));
            }
            let marker = parse_marker(lx);
            let body = parse_prefix(lx)?;
            Ok(match marker {
                Some(Marker::Causal) => Formula::DiaC(Label(name), Box::new(body)),
                Some(Marker::NonCausal) => Formula::DiaNc(Label(name), Box::new(body)),
                None => Formula::or(
                    Formula::DiaC(Label(name.clone()), Box::new(body.clone())),
                    Formula::DiaNc(Label(name), Box::new(body)),
                ),
            })
        }
        Some(Tok::LBrack) => {
            lx.next();
            let name = lx.ident("modality label")?;
            lx.expect(Tok::RBrack, "]")?;
            if name == "co" {
                return Ok(Formula::box_co(parse_prefix(lx)?));
            }
            let marker = parse_marker(lx);
            let body = parse_prefix(lx)?;
            Ok(match marker {
                Some(Marker::Causal) => Formula::BoxC(Label(name), Box::new(body)),
                Some(Marker::NonCausal) => Formula::BoxNc(Label(name), Box::new(body)),
                None => Formula::and(
                    Formula::BoxC(Label(name.clone()), Box::new(body.clone())),
                    Formula::BoxNc(Label(name), Box::new(body)),
                ),
            })
        }
        Some(Tok::Ident(w)) if w == "mu" || w == "nu" => {
            let is_mu = w == "mu";
            lx.next();
            let var = lx.ident("fixpoint variable")?;
            lx.expect(Tok::Dot, ".")?;
            let body = parse_or(lx)?;
            Ok(if is_mu { Formula::Mu(var, Box::new(body)) } else { Formula::Nu(var, Box::new(body)) })
        }
        _ => parse_atom(lx),
    }
}

enum Marker {
    Causal,
    NonCausal,
}

/// A `c`/`nc` marker immediately after a modality. Variables named `c` or
/// `nc` in operand position must be parenthesised.
fn parse_marker(lx: &mut Lexer) -> Option<Marker> {
    match lx.peek() {
        Some(Tok::Ident(w)) if w == "c" => {
            lx.next();
            Some(Marker::Causal)
        }
        Some(Tok::Ident(w)) if w == "nc" => {
            lx.next();
            Some(Marker::NonCausal)
        }
        _ => None,
    }
}

fn parse_atom(lx: &mut Lexer) -> Result<Formula> {
    let (l, c) = lx.here();
    match lx.next() {
        Some(Tok::Ident(w)) if w == "tt" => Ok(Formula::Tt),
        Some(Tok::Ident(w)) if w == "ff" => Ok(Formula::Ff),
        Some(Tok::Ident(w)) => Ok(Formula::Var(w)),
        Some(Tok::LParen) => {
            let f = parse_or(lx)?;
            lx.expect(Tok::RParen, ")")?;
            Ok(f)
        }
        _ => Err(Error::parse(l, c, "expected a formula")),
    }
}

// ---------------------------------------------------------------------------

fn prec(f: &Formula) -> u8 {
    if plain_view(f).is_some() {
        return 3;
    }
    match f {
        Formula::Mu(..) | Formula::Nu(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Neg(..)
        | Formula::DiaC(..)
        | Formula::DiaNc(..)
        | Formula::BoxC(..)
        | Formula::BoxNc(..)
        | Formula::DiaCo(..)
        | Formula::BoxCo(..) => 3,
        Formula::Tt | Formula::Ff | Formula::Var(_) => 4,
    }
}

fn print_at(f: &Formula, min: u8, out: &mut String) {
    let p = prec(f);
    if p < min {
        out.push('(');
        print_inner(f, out);
        out.push(')');
    } else {
        print_inner(f, out);
    }
}

fn print_inner(f: &Formula, out: &mut String) {
    if let Some(view) = plain_view(f) {
        match view {
            PlainView::Dia(l, body) => {
                out.push('<');
                out.push_str(l.as_str());
                out.push_str("> ");
                print_at(body, 3, out);
            }
            PlainView::Box(l, body) => {
                out.push('[');
                out.push_str(l.as_str());
                out.push_str("] ");
                print_at(body, 3, out);
            }
        }
        return;
    }
    match f {
        Formula::Tt => out.push_str("tt"),
        Formula::Ff => out.push_str("ff"),
        Formula::Var(z) => out.push_str(z),
        Formula::Neg(a) => {
            out.push('!');
            print_at(a, 3, out);
        }
        Formula::And(a, b) => {
            print_at(a, 2, out);
            out.push_str(" & ");
            print_at(b, 3, out);
        }
        Formula::Or(a, b) => {
            print_at(a, 1, out);
            out.push_str(" | ");
            print_at(b, 2, out);
        }
        Formula::DiaC(l, a) => {
            out.push('<');
            out.push_str(l.as_str());
            out.push_str(">c ");
            print_at(a, 3, out);
        }
        Formula::DiaNc(l, a) => {
            out.push('<');
            out.push_str(l.as_str());
            out.push_str(">nc ");
            print_at(a, 3, out);
        }
        Formula::BoxC(l, a) => {
            out.push('[');
            out.push_str(l.as_str());
            out.push_str("]c ");
            print_at(a, 3, out);
        }
        Formula::BoxNc(l, a) => {
            out.push('[');
            out.push_str(l.as_str());
            out.push_str("]nc ");
            print_at(a, 3, out);
        }
        Formula::DiaCo(a) => {
            out.push_str("<co> ");
            print_at(a, 3, out);
        }
        Formula::BoxCo(a) => {
            out.push_str("[co] ");
            print_at(a, 3, out);
        }
        Formula::Mu(z, a) => {
            out.push_str("mu ");
            out.push_str(z);
            out.push_str(". ");
            print_at(a, 0, out);
        }
        Formula::Nu(z, a) => {
            out.push_str("nu ");
            out.push_str(z);
            out.push_str(". ");
            print_at(a, 0, out);
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    print_at(f, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_z_z_prints_and_reparses() {
        let f = parse_formula("mu Z. Z").unwrap();
        assert_eq!(f, Formula::mu("Z", Formula::Var("Z".into())));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("<a> tt & <b> tt | ff").unwrap();
        // (<a>tt & <b>tt) | ff
        match f {
            Formula::Or(lhs, rhs) => {
                assert_eq!(*rhs, Formula::Ff);
                assert!(matches!(*lhs, Formula::And(..)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_position_reported() {
        match parse_formula("<a> &") {
            Err(Error::Parse { line: 1, col, .. }) => assert_eq!(col, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_character() {
        assert!(matches!(parse_formula("tt $ ff"), Err(Error::Parse { .. })));
    }

    #[test]
    fn fixpoint_body_extends_right() {
        let f = parse_formula("mu Z. <a> Z | tt").unwrap();
        assert!(matches!(f, Formula::Mu(..)));
    }
}
