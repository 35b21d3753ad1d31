//! Recursive-descent parser for the textual formula syntax.
//!
//! Precedence from loosest to tightest: `<->`, `->`, `|`, `&`, `U`, then
//! the prefix operators `!`, `X`, `G`, `F`. `->` and `U` associate to the
//! right, the others to the left.

use super::formula::{Alphabet, Formula};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    True,
    False,
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    Until,
    Always,
    Eventually,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            b'!' => {
                out.push((start, Tok::Not));
                i += 1;
            }
            b'&' => {
                out.push((start, Tok::And));
                i += if bytes.get(i + 1) == Some(&b'&') { 2 } else { 1 };
            }
            b'|' => {
                out.push((start, Tok::Or));
                i += if bytes.get(i + 1) == Some(&b'|') { 2 } else { 1 };
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((start, Tok::Implies));
                i += 2;
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                out.push((start, Tok::Iff));
                i += 3;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "U" => Tok::Until,
                    "G" => Tok::Always,
                    "F" => Tok::Eventually,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((start, tok));
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    position: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { position: self.offset(), message: message.into() }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            lhs = Formula::iff(lhs, self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            Ok(Formula::implies(lhs, self.implies()?))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while self.eat(&Tok::And) {
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            Ok(Formula::until(lhs, self.until()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let ctor: fn(Formula) -> Formula = match self.peek() {
            Some(Tok::Not) => Formula::not,
            Some(Tok::Next) => Formula::next,
            Some(Tok::Always) => Formula::always,
            Some(Tok::Eventually) => Formula::eventually,
            _ => return self.primary(),
        };
        self.pos += 1;
        Ok(ctor(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(name)) => {
                if !self.alphabet.contains(&name) {
                    return Err(ParseError::UnknownAtom { name, position: offset });
                }
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(tok) => Err(self.error(format!("unexpected token {tok:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parse `text` into a formula whose atoms must all belong to `alphabet`.
pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), alphabet };
    let f = p.iff()?;
    if p.pos != p.toks.len() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

/// Parse without an alphabet check; the alphabet is taken to be the atoms
/// that appear in the text.
pub fn parse_formula_open(text: &str) -> Result<(Formula, Alphabet), ParseError> {
    let names = lex(text)?.into_iter().filter_map(|(_, t)| match t {
        Tok::Ident(n) => Some(n),
        _ => None,
    });
    let alphabet = Alphabet::new(names);
    let f = parse_formula(text, &alphabet)?;
    Ok((f, alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ap(names: &[&str]) -> Alphabet {
        Alphabet::new(names.iter().copied())
    }

    #[test]
    fn heating_formula() {
        let f = parse_formula("G((!b0 | !b1) & ((t30) -> (fan_on)))", &ap(&["b0", "b1", "t30", "fan_on"]))
            .unwrap();
        let expected = Formula::always(Formula::and(
            Formula::or(Formula::not(Formula::atom("b0")), Formula::not(Formula::atom("b1"))),
            Formula::implies(Formula::atom("t30"), Formula::atom("fan_on")),
        ));
        assert_eq!(f, expected);
    }

    #[test]
    fn constants_and_until() {
        assert_eq!(parse_formula("true", &ap(&[])).unwrap(), Formula::True);
        let f = parse_formula("p U (q & X r)", &ap(&["p", "q", "r"])).unwrap();
        assert_eq!(
            f,
            Formula::until(
                Formula::atom("p"),
                Formula::and(Formula::atom("q"), Formula::next(Formula::atom("r")))
            )
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let a = ap(&["a", "b", "c"]);
        let f = parse_formula("a | b & c -> a <-> b", &a).unwrap();
        let expected = Formula::iff(
            Formula::implies(
                Formula::or(Formula::atom("a"), Formula::and(Formula::atom("b"), Formula::atom("c"))),
                Formula::atom("a"),
            ),
            Formula::atom("b"),
        );
        assert_eq!(f, expected);
        let f = parse_formula("a U b U c", &a).unwrap();
        assert_eq!(
            f,
            Formula::until(Formula::atom("a"), Formula::until(Formula::atom("b"), Formula::atom("c")))
        );
        let f = parse_formula("a -> b -> c", &a).unwrap();
        assert_eq!(
            f,
            Formula::implies(Formula::atom("a"), Formula::implies(Formula::atom("b"), Formula::atom("c")))
        );
        let f = parse_formula("!a U b", &a).unwrap();
        assert_eq!(f, Formula::until(Formula::not(Formula::atom("a")), Formula::atom("b")));
    }

    #[test]
    fn keywords_only_as_whole_words() {
        let f = parse_formula("G Gp", &ap(&["Gp"])).unwrap();
        assert_eq!(f, Formula::always(Formula::atom("Gp")));
    }

    #[test]
    fn unknown_atom_is_named() {
        let err = parse_formula("p & zz", &ap(&["p"])).unwrap_err();
        assert_eq!(err, ParseError::UnknownAtom { name: "zz".into(), position: 4 });
    }

    #[test]
    fn syntax_errors_carry_position() {
        let a = ap(&["p", "q"]);
        match parse_formula("p & (q", &a).unwrap_err() {
            ParseError::Syntax { position, .. } => assert_eq!(position, 6),
            e => panic!("unexpected {e:?}"),
        }
        match parse_formula("p # q", &a).unwrap_err() {
            ParseError::Syntax { position, .. } => assert_eq!(position, 2),
            e => panic!("unexpected {e:?}"),
        }
        assert!(parse_formula("p q", &a).is_err());
        assert!(parse_formula("", &a).is_err());
    }

    #[test]
    fn open_parse_collects_atoms() {
        let (f, alphabet) = parse_formula_open("G(a -> F b)").unwrap();
        assert_eq!(alphabet.names(), vec!["a".to_string(), "b".to_string()]);
        assert_eq!(f.atoms().len(), 2);
    }
}
