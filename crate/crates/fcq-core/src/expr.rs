//! A small expression language for the `compute` front end.
//!
//! Grammar (integer exponents, usual precedence):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' exponent)?
//! atom   := integer | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Symbols are algebra-specific: `x, d, h` in the Weyl algebra
//! (`d*x - x*d`), `x, y, q` in the quantum torus, `e(n), w, h` in the
//! Coulomb basis (`e(1)*e(-1)`), `f(n), x, y, q` in the `K`-theoretic
//! torus, and declared generators plus `st_in(…)`, `P(s, …)`,
//! `as_hbar(…)` in cohomology rings.

use crate::cohomops::CohomRing;
use crate::coulomb::{coulomb_mul, CoulombElement};
use crate::poly::Poly;
use crate::qtorus::{k_basis, qtorus_mul, QTorusElement};
use crate::weyl::{weyl_mul, WeylElement};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Sym(String),
    Call(String, Vec<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            ',' => {
                out.push(Token::Comma);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Int(s.parse().map_err(|_| {
                    Error::Parse(format!("integer literal {s} out of range"))
                })?));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: &Token) -> Result<()> {
        match self.next() {
            Some(ref got) if got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {t:?}, got {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while matches!(self.peek(), Some(Token::Star)) {
            self.next();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.next();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.next();
            let k = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64> {
        let neg = if matches!(self.peek(), Some(Token::Minus)) {
            self.next();
            true
        } else {
            false
        };
        match self.next() {
            Some(Token::Int(k)) => Ok(if neg { -k } else { k }),
            Some(Token::LParen) => {
                let inner_neg = if matches!(self.peek(), Some(Token::Minus)) {
                    self.next();
                    true
                } else {
                    false
                };
                let k = match self.next() {
                    Some(Token::Int(k)) => k,
                    got => return Err(Error::Parse(format!("expected integer exponent, got {got:?}"))),
                };
                self.expect(&Token::RParen)?;
                let k = if inner_neg { -k } else { k };
                Ok(if neg { -k } else { k })
            }
            got => Err(Error::Parse(format!("expected integer exponent, got {got:?}"))),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Int(k)) => Ok(Expr::Int(k)),
            Some(Token::Ident(name)) => {
                if matches!(self.peek(), Some(Token::LParen)) {
                    self.next();
                    let mut args = vec![self.expr()?];
                    while matches!(self.peek(), Some(Token::Comma)) {
                        self.next();
                        args.push(self.expr()?);
                    }
                    self.expect(&Token::RParen)?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Sym(name))
                }
            }
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(&Token::RParen)?;
                Ok(e)
            }
            got => Err(Error::Parse(format!("unexpected token {got:?}"))),
        }
    }
}

pub fn parse(input: &str) -> Result<Expr> {
    let tokens = tokenize(input)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!(
            "trailing tokens after expression: {:?}",
            &p.tokens[p.pos..]
        )));
    }
    Ok(e)
}

fn expr_as_int(e: &Expr) -> Result<i64> {
    match e {
        Expr::Int(k) => Ok(*k),
        Expr::Neg(inner) => Ok(-expr_as_int(inner)?),
        _ => Err(Error::Parse("expected an integer argument".into())),
    }
}

// ---- Weyl evaluation ----

pub fn eval_weyl(e: &Expr, modulus: Option<u64>) -> Result<WeylElement> {
    match e {
        Expr::Int(k) => Ok(WeylElement::one(modulus).scale_int(*k)),
        Expr::Sym(s) => match s.as_str() {
            "x" => Ok(WeylElement::x_pow(modulus, 1)),
            "d" => Ok(WeylElement::d_pow(modulus, 1)),
            "h" | "hbar" => Ok(WeylElement::hbar(modulus)),
            other => Err(Error::UnknownSymbol(other.to_string())),
        },
        Expr::Call(name, _) => Err(Error::UnknownSymbol(format!("{name}(…)"))),
        Expr::Neg(inner) => Ok(eval_weyl(inner, modulus)?.neg()),
        Expr::Add(l, r) => Ok(eval_weyl(l, modulus)?.add(&eval_weyl(r, modulus)?)),
        Expr::Sub(l, r) => Ok(eval_weyl(l, modulus)?.sub(&eval_weyl(r, modulus)?)),
        Expr::Mul(l, r) => Ok(weyl_mul(&eval_weyl(l, modulus)?, &eval_weyl(r, modulus)?)),
        Expr::Pow(base, k) => {
            if *k < 0 {
                // negative powers only for x itself
                match base.as_ref() {
                    Expr::Sym(s) if s == "x" => Ok(WeylElement::x_pow(modulus, *k)),
                    _ => Err(Error::Eval(format!(
                        "negative exponent {k} on a non-invertible element"
                    ))),
                }
            } else {
                let b = eval_weyl(base, modulus)?;
                let mut acc = WeylElement::one(modulus);
                for _ in 0..*k {
                    acc = weyl_mul(&acc, &b);
                }
                Ok(acc)
            }
        }
    }
}

// ---- quantum torus evaluation ----

pub fn eval_qtorus(e: &Expr, r: u32) -> Result<QTorusElement> {
    match e {
        Expr::Int(k) => Ok(QTorusElement::one().scale(&Poly::constant(&["q"], None, *k))),
        Expr::Sym(s) => match s.as_str() {
            "x" => Ok(QTorusElement::x_pow(1)),
            "y" => Ok(QTorusElement::y_pow(1)),
            "q" => Ok(QTorusElement::q_pow(1)),
            other => Err(Error::UnknownSymbol(other.to_string())),
        },
        Expr::Call(name, args) => match name.as_str() {
            "f" if args.len() == 1 => Ok(k_basis(r, expr_as_int(&args[0])?)),
            _ => Err(Error::UnknownSymbol(format!("{name}(…)"))),
        },
        Expr::Neg(inner) => {
            Ok(QTorusElement::zero().sub(&eval_qtorus(inner, r)?))
        }
        Expr::Add(l, r_) => Ok(eval_qtorus(l, r)?.add(&eval_qtorus(r_, r)?)),
        Expr::Sub(l, r_) => Ok(eval_qtorus(l, r)?.sub(&eval_qtorus(r_, r)?)),
        Expr::Mul(l, r_) => Ok(qtorus_mul(&eval_qtorus(l, r)?, &eval_qtorus(r_, r)?)),
        Expr::Pow(base, k) => match base.as_ref() {
            Expr::Sym(s) if *k < 0 => match s.as_str() {
                "x" => Ok(QTorusElement::x_pow(*k)),
                "y" => Ok(QTorusElement::y_pow(*k)),
                "q" => Ok(QTorusElement::q_pow(*k)),
                other => Err(Error::UnknownSymbol(other.to_string())),
            },
            _ if *k >= 0 => {
                let b = eval_qtorus(base, r)?;
                let mut acc = QTorusElement::one();
                for _ in 0..*k {
                    acc = qtorus_mul(&acc, &b);
                }
                Ok(acc)
            }
            _ => Err(Error::Eval(format!(
                "negative exponent {k} on a non-invertible element"
            ))),
        },
    }
}

// ---- Coulomb evaluation ----

pub fn eval_coulomb(e: &Expr, r: u32, p: u64) -> Result<CoulombElement> {
    match e {
        Expr::Int(k) => Ok(CoulombElement::one(r, p).scale(*k)),
        Expr::Sym(s) => match s.as_str() {
            "w" => Ok(CoulombElement::w_element(r, p)),
            "h" | "hbar" => Ok(CoulombElement::hbar(r, p)),
            "x" => Err(Error::Eval(
                "x itself is not in the Coulomb algebra; use e(n)".into(),
            )),
            other => Err(Error::UnknownSymbol(other.to_string())),
        },
        Expr::Call(name, args) => match name.as_str() {
            "e" if args.len() == 1 => Ok(CoulombElement::basis(r, p, expr_as_int(&args[0])?)),
            _ => Err(Error::UnknownSymbol(format!("{name}(…)"))),
        },
        Expr::Neg(inner) => Ok(CoulombElement::zero(r, p).sub(&eval_coulomb(inner, r, p)?)),
        Expr::Add(l, r_) => Ok(eval_coulomb(l, r, p)?.add(&eval_coulomb(r_, r, p)?)),
        Expr::Sub(l, r_) => Ok(eval_coulomb(l, r, p)?.sub(&eval_coulomb(r_, r, p)?)),
        Expr::Mul(l, r_) => Ok(coulomb_mul(
            &eval_coulomb(l, r, p)?,
            &eval_coulomb(r_, r, p)?,
        )),
        Expr::Pow(base, k) => {
            if *k < 0 {
                return Err(Error::Eval(
                    "negative exponents are not defined in the Coulomb basis; use e(-n)".into(),
                ));
            }
            let b = eval_coulomb(base, r, p)?;
            Ok(b.pow(*k as u32))
        }
    }
}

// ---- cohomology-ring evaluation ----

/// Result of a cohomology expression: either a plain ring element or an
/// element of the `(a, ħ)`-extension (after `st_in` / `as_hbar`).
pub fn eval_cohom(e: &Expr, ring: &CohomRing) -> Result<Poly> {
    let p = ring.p();
    let gens = ring.generators();
    match e {
        Expr::Int(k) => Ok(Poly::constant(&gens, Some(p), *k)),
        Expr::Sym(s) => {
            if gens.contains(&s.as_str()) {
                Ok(ring.gen(s))
            } else {
                Err(Error::UnknownSymbol(s.clone()))
            }
        }
        Expr::Call(name, args) => match name.as_str() {
            "st_in" if args.len() == 1 => ring.st_in(&eval_cohom(&args[0], ring)?),
            "P" if args.len() == 2 => {
                let s = expr_as_int(&args[0])?;
                if s < 0 {
                    return Err(Error::Eval("P needs a non-negative index".into()));
                }
                ring.steenrod_p(s as u32, &eval_cohom(&args[1], ring)?)
            }
            "as_hbar" if args.len() == 1 => {
                crate::cohomops::as_hbar(&eval_cohom(&args[0], ring)?, p)
            }
            _ => Err(Error::UnknownSymbol(format!("{name}(…)"))),
        },
        Expr::Neg(inner) => Ok(eval_cohom(inner, ring)?.neg()),
        Expr::Add(l, r) => {
            let (a, b) = (eval_cohom(l, ring)?, eval_cohom(r, ring)?);
            let (a, b) = align_vars(a, b)?;
            Ok(a.add(&b))
        }
        Expr::Sub(l, r) => {
            let (a, b) = (eval_cohom(l, ring)?, eval_cohom(r, ring)?);
            let (a, b) = align_vars(a, b)?;
            Ok(a.sub(&b))
        }
        Expr::Mul(l, r) => {
            let (a, b) = (eval_cohom(l, ring)?, eval_cohom(r, ring)?);
            let (a, b) = align_vars(a, b)?;
            Ok(a.mul(&b))
        }
        Expr::Pow(base, k) => {
            if *k < 0 {
                return Err(Error::Eval("negative exponents in a polynomial ring".into()));
            }
            Ok(eval_cohom(base, ring)?.pow(*k as u64))
        }
    }
}

/// Put two results over a common variable set (plain elements embed into
/// the `(a, ħ)`-extension when mixed).
fn align_vars(a: Poly, b: Poly) -> Result<(Poly, Poly)> {
    if a.vars() == b.vars() {
        return Ok((a, b));
    }
    let (short, long) = if a.vars().len() < b.vars().len() {
        (&a, &b)
    } else {
        (&b, &a)
    };
    if !short.vars().iter().all(|v| long.vars().contains(v)) {
        return Err(Error::VariableMismatch(
            a.vars().to_vec(),
            b.vars().to_vec(),
        ));
    }
    let vars: Vec<&str> = long.vars().iter().map(|s| s.as_str()).collect();
    let embedded = short.embed(&vars);
    if a.vars().len() < b.vars().len() {
        Ok((embedded, b))
    } else {
        Ok((a, embedded))
    }
}
