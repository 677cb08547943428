//! Plain-text polynomial format: `3/4*l11^2*l21 - 1/2`.
//!
//! Terms print in descending grevlex order of the ring's variable list, so
//! printing is canonical and `parse(print(f)) == f`.

use std::fmt::Display;
use std::str::FromStr;

use num_traits::Signed;

use super::monomial::{Monomial, MonomialOrder};
use super::polynomial::{Field, Polynomial};
use super::PolyError;

pub fn format_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

pub fn to_text<C>(p: &Polynomial<C>, names: &[String]) -> String
where
    C: Field + Display + Signed,
{
    assert_eq!(names.len(), p.nvars(), "one name per variable");
    if p.is_zero() {
        return "0".to_string();
    }
    let ord = MonomialOrder::grevlex(p.nvars());
    let mut out = String::new();
    for (idx, (m, c)) in p.sorted_terms(&ord).into_iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&format_monomial(m, names));
        } else {
            out.push_str(&format!("{}*{}", mag, format_monomial(m, names)));
        }
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && f(self.src[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }
}

pub fn parse<C>(text: &str, names: &[String]) -> Result<Polynomial<C>, PolyError>
where
    C: Field + FromStr,
{
    let n = names.len();
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let mut out = Polynomial::zero(n);
    let mut first = true;
    loop {
        let mut negative = false;
        match p.peek() {
            None if first => return Err(p.err("empty polynomial")),
            None => break,
            Some(b'+') => {
                p.pos += 1;
            }
            Some(b'-') => {
                negative = true;
                p.pos += 1;
            }
            Some(_) if first => {}
            Some(_) => return Err(p.err("expected '+' or '-'")),
        }
        first = false;
        let mut coeff = C::one();
        let mut exps = vec![0u32; n];
        loop {
            match p.peek() {
                Some(ch) if ch.is_ascii_digit() => {
                    let num = p.take_while(|b| b.is_ascii_digit());
                    let mut lit = num.to_string();
                    if p.src.get(p.pos) == Some(&b'/') {
                        p.pos += 1;
                        let den = p.take_while(|b| b.is_ascii_digit());
                        if den.is_empty() {
                            return Err(p.err("missing denominator"));
                        }
                        lit = format!("{num}/{den}");
                    }
                    let c = C::from_str(&lit).map_err(|_| p.err(format!("bad number '{lit}'")))?;
                    coeff = coeff * c;
                }
                Some(ch) if ch.is_ascii_alphabetic() || ch == b'_' => {
                    let ident = p.take_while(|b| b.is_ascii_alphanumeric() || b == b'_');
                    let var = names
                        .iter()
                        .position(|v| v == ident)
                        .ok_or_else(|| p.err(format!("unknown variable '{ident}'")))?;
                    let mut e = 1u32;
                    if p.peek() == Some(b'^') {
                        p.pos += 1;
                        p.skip_ws();
                        let digits = p.take_while(|b| b.is_ascii_digit());
                        e = digits.parse().map_err(|_| p.err("bad exponent"))?;
                    }
                    exps[var] += e;
                }
                _ => return Err(p.err("expected number or variable")),
            }
            if p.peek() == Some(b'*') {
                p.pos += 1;
            } else {
                break;
            }
        }
        if negative {
            coeff = -coeff;
        }
        out.add_term(Monomial::new(exps), coeff);
    }
    Ok(out)
}

/// `x1, …, xn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn reference_string_round_trips() {
        let vars = names(&["l11", "l21"]);
        let s = "3/4*l11^2*l21 - 1/2";
        let p: Polynomial<Rational> = parse(s, &vars).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(to_text(&p, &vars), s);
    }

    #[test]
    fn collects_like_terms_and_signs() {
        let vars = names(&["x", "y"]);
        let p: Polynomial<Rational> = parse("x*y - 2*y*x + 3 - 3 - x", &vars).unwrap();
        assert_eq!(to_text(&p, &vars), "-x*y - x");
        let z: Polynomial<Rational> = parse("x - x", &vars).unwrap();
        assert_eq!(to_text(&z, &vars), "0");
    }

    #[test]
    fn rejects_garbage() {
        let vars = names(&["x"]);
        assert!(parse::<Rational>("x +", &vars).is_err());
        assert!(parse::<Rational>("q", &vars).is_err());
        assert!(parse::<Rational>("", &vars).is_err());
        assert!(parse::<Rational>("x x", &vars).is_err());
    }
}
