//! Text front end for quadratic equations.
//!
//! ```text
//! equation := expr "=" expr
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*        "/" only by a nonzero constant
//! unary    := ("+" | "-") unary | power
//! power    := atom ("^" integer)?              exponent 1 or 2
//! atom     := integer | variable | "(" expr ")"
//! variable := [a-z][a-z0-9_]*
//! ```
//!
//! Juxtaposition (`2x`, `x y`, `2(x+1)`) is rejected. After moving everything
//! to the left, the total degree must be at most 2.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{Int, Matrix, Rat, Vector};
use crate::qform::{LinearForm, QuadraticEquation, QuadraticForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnknownToken(char),
    #[error("expected {expected}, found {found}")]
    Expected { expected: &'static str, found: String },
    #[error("implicit multiplication is not allowed; write '*'")]
    ImplicitMultiplication,
    #[error("unsupported degree: only quadratic equations are accepted")]
    UnsupportedDegree,
    #[error("unsupported exponent {0}; use 1 or 2")]
    UnsupportedExponent(String),
    #[error("division is only allowed by a nonzero constant")]
    BadDivision,
    #[error("constant equation: no variables")]
    ConstantEquation,
    #[error("variable {0:?} is not in the declared variable list")]
    UnknownVariable(String),
    #[error("invalid variable list: {0}")]
    BadVariableList(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedEquation {
    pub equation: QuadraticEquation,
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(Int),
    Var(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number {n}"),
            Tok::Var(v) => write!(f, "variable {v}"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Eq => f.write_str("'='"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, column };
        if ch == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if ch.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            Tok::Num(digits.parse().expect("ascii digits"))
        } else if ch.is_ascii_lowercase() {
            while i < chars.len() && (chars[i].is_ascii_lowercase() || chars[i].is_ascii_digit() || chars[i] == '_') {
                i += 1;
            }
            Tok::Var(chars[start..i].iter().collect())
        } else {
            i += 1;
            match ch {
                '+' => Tok::Plus,
                '-' | '−' => Tok::Minus,
                '*' | '·' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '=' => Tok::Eq,
                other => {
                    return Err(ParseError {
                        line,
                        column,
                        kind: ParseErrorKind::UnknownToken(other),
                    })
                }
            }
        };
        column += i - start;
        out.push((tok, pos));
    }
    out.push((Tok::End, Pos { line, column }));
    Ok(out)
}

/// Monomials keyed by sorted variable indices; the empty key is the constant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Poly(BTreeMap<Vec<usize>, Rat>);

impl Poly {
    fn constant(q: Rat) -> Poly {
        let mut p = Poly::default();
        p.add_term(Vec::new(), q);
        p
    }

    fn var(i: usize) -> Poly {
        let mut p = Poly::default();
        p.add_term(vec![i], Rat::one());
        p
    }

    fn add_term(&mut self, key: Vec<usize>, q: Rat) {
        let slot = self.0.entry(key.clone()).or_insert_with(Rat::zero);
        *slot += q;
        if slot.is_zero() {
            self.0.remove(&key);
        }
    }

    fn add(mut self, other: &Poly, sign: &Rat) -> Poly {
        for (k, q) in &other.0 {
            self.add_term(k.clone(), q * sign);
        }
        self
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (k1, q1) in &self.0 {
            for (k2, q2) in &other.0 {
                let mut key: Vec<usize> = k1.iter().chain(k2).copied().collect();
                key.sort_unstable();
                out.add_term(key, q1 * q2);
            }
        }
        out
    }

    fn as_constant(&self) -> Option<Rat> {
        match self.0.len() {
            0 => Some(Rat::zero()),
            1 => self.0.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn degree(&self) -> usize {
        self.0.keys().map(Vec::len).max().unwrap_or(0)
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    vars: Vec<String>,
    fixed_vars: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn err_at(pos: Pos, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: pos.line,
            column: pos.column,
            kind,
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        Self::err_at(self.pos(), kind)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Expected {
                expected,
                found: self.peek().to_string(),
            }))
        }
    }

    fn var_index(&mut self, name: &str, pos: Pos) -> Result<usize, ParseError> {
        if let Some(i) = self.vars.iter().position(|v| v == name) {
            return Ok(i);
        }
        if self.fixed_vars {
            return Err(Self::err_at(pos, ParseErrorKind::UnknownVariable(name.to_string())));
        }
        self.vars.push(name.to_string());
        Ok(self.vars.len() - 1)
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            let sign = match self.peek() {
                Tok::Plus => Rat::one(),
                Tok::Minus => -Rat::one(),
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = self.term()?;
            acc = acc.add(&rhs, &sign);
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs);
                }
                Tok::Slash => {
                    let pos = self.pos();
                    self.bump();
                    let rhs = self.unary()?;
                    match rhs.as_constant() {
                        Some(q) if !q.is_zero() => {
                            acc = acc.mul(&Poly::constant(Rat::one() / q));
                        }
                        _ => return Err(Self::err_at(pos, ParseErrorKind::BadDivision)),
                    }
                }
                Tok::Num(_) | Tok::Var(_) | Tok::LParen => return Err(self.err(ParseErrorKind::ImplicitMultiplication)),
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Poly::default().add(&self.unary()?, &-Rat::one()))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) if n == Int::one() => Ok(base),
            Tok::Num(n) if n == Int::from(2) => Ok(base.mul(&base)),
            Tok::Num(n) if n > Int::from(2) => Err(Self::err_at(pos, ParseErrorKind::UnsupportedDegree)),
            Tok::Num(n) => Err(Self::err_at(pos, ParseErrorKind::UnsupportedExponent(n.to_string()))),
            other => Err(Self::err_at(
                pos,
                ParseErrorKind::Expected {
                    expected: "an integer exponent",
                    found: other.to_string(),
                },
            )),
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(Poly::constant(Rat::from_integer(n))),
            Tok::Var(name) => Ok(Poly::var(self.var_index(&name, pos)?)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            other => Err(Self::err_at(
                pos,
                ParseErrorKind::Expected {
                    expected: "a number, variable or '('",
                    found: other.to_string(),
                },
            )),
        }
    }
}

fn valid_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn check_var_list(vars: &[String]) -> Result<(), ParseError> {
    let bad = |msg: String| ParseError {
        line: 1,
        column: 1,
        kind: ParseErrorKind::BadVariableList(msg),
    };
    for (i, v) in vars.iter().enumerate() {
        if !valid_var_name(v) {
            return Err(bad(format!("{v:?} is not a variable name")));
        }
        if vars[..i].contains(v) {
            return Err(bad(format!("{v:?} listed twice")));
        }
    }
    Ok(())
}

fn parse_poly(text: &str, vars: Option<&[String]>, want_eq: bool) -> Result<(Poly, Vec<String>), ParseError> {
    if let Some(vs) = vars {
        check_var_list(vs)?;
    }
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        vars: vars.map(<[String]>::to_vec).unwrap_or_default(),
        fixed_vars: vars.is_some(),
    };
    let start = p.pos();
    let lhs = p.expr()?;
    let poly = if want_eq {
        p.expect(Tok::Eq, "'='")?;
        let rhs = p.expr()?;
        lhs.add(&rhs, &-Rat::one())
    } else {
        lhs
    };
    p.expect(Tok::End, "end of input")?;
    if poly.degree() > 2 {
        return Err(Parser::err_at(start, ParseErrorKind::UnsupportedDegree));
    }
    if p.vars.is_empty() {
        return Err(Parser::err_at(start, ParseErrorKind::ConstantEquation));
    }
    Ok((poly, p.vars))
}

fn to_equation(poly: &Poly, d: usize) -> QuadraticEquation {
    let mut a = Matrix::zeros(d, d);
    let mut b = Vector::zeros(d);
    let mut c = Rat::zero();
    let half = Rat::new(Int::one(), Int::from(2));
    for (key, q) in &poly.0 {
        match key.as_slice() {
            [] => c = -q.clone(),
            [i] => b[*i] = q.clone(),
            [i, j] if i == j => a[(*i, *i)] = q.clone(),
            [i, j] => {
                a[(*i, *j)] = q * &half;
                a[(*j, *i)] = q * &half;
            }
            _ => unreachable!("degree checked"),
        }
    }
    QuadraticEquation::new(
        QuadraticForm::new(a).expect("symmetric by construction"),
        LinearForm::new(b),
        c,
    )
    .expect("dimensions agree")
}

/// Parses `lhs = rhs` into `Q(x) + L(x) = c`. With `vars`, the variable order
/// is fixed to that list and any other name is an error.
pub fn parse_equation(text: &str, vars: Option<&[String]>) -> Result<ParsedEquation, ParseError> {
    let (poly, vars) = parse_poly(text, vars, true)?;
    Ok(ParsedEquation {
        equation: to_equation(&poly, vars.len()),
        vars,
    })
}

/// Parses a polynomial without `=`, read as `expr = 0`.
pub fn parse_polynomial(text: &str, vars: Option<&[String]>) -> Result<ParsedEquation, ParseError> {
    let (poly, vars) = parse_poly(text, vars, false)?;
    Ok(ParsedEquation {
        equation: to_equation(&poly, vars.len()),
        vars,
    })
}

fn push_term(out: &mut String, coeff: &Rat, monomial: &str) {
    let first = out.is_empty();
    if coeff.is_negative() {
        out.push_str(if first { "-" } else { " - " });
    } else if !first {
        out.push_str(" + ");
    }
    let mag = coeff.abs();
    if monomial.is_empty() {
        out.push_str(&mag.to_string());
    } else {
        if !mag.is_one() {
            out.push_str(&mag.to_string());
            out.push('*');
        }
        out.push_str(monomial);
    }
}

/// Text that parses back to the same equation with the same variable order
/// (variables with all-zero coefficients aside).
pub fn format_equation(eq: &QuadraticEquation, vars: &[String]) -> String {
    let a = eq.form.matrix();
    let d = eq.dim();
    let mut out = String::new();
    for i in 0..d {
        for j in i..d {
            let coeff = if i == j {
                a[(i, i)].clone()
            } else {
                &a[(i, j)] + &a[(j, i)]
            };
            if coeff.is_zero() {
                continue;
            }
            let mono = if i == j {
                format!("{}^2", vars[i])
            } else {
                format!("{}*{}", vars[i], vars[j])
            };
            push_term(&mut out, &coeff, &mono);
        }
    }
    for (coeff, var) in eq.linear.coeffs().iter().zip(vars) {
        if !coeff.is_zero() {
            push_term(&mut out, coeff, var);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out.push_str(" = ");
    out.push_str(&eq.constant.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn parse(text: &str) -> ParsedEquation {
        parse_equation(text, None).unwrap()
    }

    fn kind(text: &str) -> ParseErrorKind {
        parse_equation(text, None).unwrap_err().kind
    }

    #[test]
    fn circle_example() {
        let p = parse("x^2 + y^2 - 3*x - y = 0");
        assert_eq!(p.vars, vec!["x", "y"]);
        assert_eq!(p.equation.form.matrix(), &Matrix::identity(2));
        assert_eq!(p.equation.linear.coeffs(), &Vector::from_ints(&[-3, -1]));
        assert_eq!(p.equation.constant, rat_int(0));
    }

    #[test]
    fn degenerate_example() {
        let p = parse("-11*x^2 + y^2 - 3*z^2 + 2*x*y - 12*x*z + x + z = -1");
        assert_eq!(
            p.equation.form.matrix(),
            &Matrix::from_int_rows(&[&[-11, 1, -6], &[1, 1, 0], &[-6, 0, -3]])
        );
        assert_eq!(p.equation.linear.coeffs(), &Vector::from_ints(&[1, 0, 1]));
        assert_eq!(p.equation.constant, rat_int(-1));
    }

    #[test]
    fn rationals_parentheses_and_both_sides() {
        let p = parse("(x + 1)^2 / 4 = 3/2*y*x - 2/3");
        let a = p.equation.form.matrix();
        assert_eq!(a[(0, 0)], rat(1, 4));
        assert_eq!(a[(0, 1)], rat(-3, 4));
        assert_eq!(p.equation.linear.coeffs()[0], rat(1, 2));
        assert_eq!(p.equation.constant, rat(-2, 3) - rat(1, 4));
    }

    #[test]
    fn errors() {
        assert_eq!(kind("x^3 = 1"), ParseErrorKind::UnsupportedDegree);
        assert_eq!(kind("x*x*y = 1"), ParseErrorKind::UnsupportedDegree);
        assert_eq!(kind("2x = 1"), ParseErrorKind::ImplicitMultiplication);
        assert_eq!(kind("1/x = 1"), ParseErrorKind::BadDivision);
        assert_eq!(kind("x/0 = 1"), ParseErrorKind::BadDivision);
        assert_eq!(kind("1 = 2"), ParseErrorKind::ConstantEquation);
        assert_eq!(kind("x^0 = 1"), ParseErrorKind::UnsupportedExponent("0".into()));
        let e = parse_equation("x^2 +\n  y $ 2 = 0", None).unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (2, 5, ParseErrorKind::UnknownToken('$')));
    }

    #[test]
    fn cancelled_cubic_is_accepted() {
        let p = parse("x*x*x - x^2*x + y^2 = 1");
        assert_eq!(p.equation.form.matrix()[(1, 1)], rat_int(1));
    }

    #[test]
    fn variable_override() {
        let vars = vec!["y".to_string(), "x".to_string(), "z".to_string()];
        let p = parse_equation("x^2 - y = 0", Some(&vars)).unwrap();
        assert_eq!(p.vars, vars);
        assert_eq!(p.equation.linear.coeffs(), &Vector::from_ints(&[-1, 0, 0]));
        assert_eq!(p.equation.form.matrix()[(1, 1)], rat_int(1));
        let only_x = vec!["x".to_string()];
        assert!(matches!(
            parse_equation("x^2 - y = 0", Some(&only_x)).unwrap_err().kind,
            ParseErrorKind::UnknownVariable(_)
        ));
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "x^2 + y^2 - 3*x - y = 0",
            "-11*x^2 + 2*x*y - 12*x*z + y^2 - 3*z^2 + x + z = -1",
            "1/2*a^2 - 3/4*a*b + b = 7/5",
        ] {
            let p = parse(text);
            let printed = format_equation(&p.equation, &p.vars);
            let again = parse_equation(&printed, Some(&p.vars)).unwrap();
            assert_eq!(again, p);
        }
    }
}
