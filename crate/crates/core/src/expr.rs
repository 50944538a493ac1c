//! Small arithmetic expression language with symbolic differentiation.
//!
//! Grammar: `+ - * / ^` with `sin`, `cos`, `exp`, `sqrt`, numeric literals,
//! named variables, and parentheses. Exponents must be constant so that
//! differentiation stays inside the grammar. Expressions are parsed into a
//! shared tree, differentiated and simplified symbolically, and compiled to
//! a stack program for fast repeated evaluation.

use crate::error::{GeomError, Result};
use std::fmt;
use std::rc::Rc;

/// Expression tree node. Shared subtrees keep derivatives compact.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Rc<Expr>, Rc<Expr>),
    Sub(Rc<Expr>, Rc<Expr>),
    Mul(Rc<Expr>, Rc<Expr>),
    Div(Rc<Expr>, Rc<Expr>),
    Neg(Rc<Expr>),
    /// Power with constant exponent.
    Pow(Rc<Expr>, f64),
    Sin(Rc<Expr>),
    Cos(Rc<Expr>),
    Exp(Rc<Expr>),
    Sqrt(Rc<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Rc<Expr> {
        Rc::new(Expr::Const(c))
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }
}

fn add(a: Rc<Expr>, b: Rc<Expr>) -> Rc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::constant(x + y),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => Rc::new(Expr::Add(a, b)),
    }
}

fn sub(a: Rc<Expr>, b: Rc<Expr>) -> Rc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::constant(x - y),
        (_, Some(0.0)) => a,
        (Some(0.0), _) => neg(b),
        _ => Rc::new(Expr::Sub(a, b)),
    }
}

fn mul(a: Rc<Expr>, b: Rc<Expr>) -> Rc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::constant(x * y),
        (Some(0.0), _) | (_, Some(0.0)) => Expr::constant(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        (Some(-1.0), _) => neg(b),
        (_, Some(-1.0)) => neg(a),
        _ => Rc::new(Expr::Mul(a, b)),
    }
}

fn div(a: Rc<Expr>, b: Rc<Expr>) -> Rc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != 0.0 => Expr::constant(x / y),
        (Some(0.0), _) => Expr::constant(0.0),
        (_, Some(1.0)) => a,
        _ => Rc::new(Expr::Div(a, b)),
    }
}

fn neg(a: Rc<Expr>) -> Rc<Expr> {
    match &*a {
        Expr::Const(c) => Expr::constant(-c),
        Expr::Neg(inner) => inner.clone(),
        _ => Rc::new(Expr::Neg(a)),
    }
}

fn pow(a: Rc<Expr>, e: f64) -> Rc<Expr> {
    if e == 0.0 {
        return Expr::constant(1.0);
    }
    if e == 1.0 {
        return a;
    }
    if let Some(x) = a.as_const() {
        return Expr::constant(x.powf(e));
    }
    Rc::new(Expr::Pow(a, e))
}

/// Symbolic derivative with respect to variable index `var`.
pub fn diff(e: &Rc<Expr>, var: usize) -> Rc<Expr> {
    match &**e {
        Expr::Const(_) => Expr::constant(0.0),
        Expr::Var(v) => Expr::constant(if *v == var { 1.0 } else { 0.0 }),
        Expr::Add(a, b) => add(diff(a, var), diff(b, var)),
        Expr::Sub(a, b) => sub(diff(a, var), diff(b, var)),
        Expr::Mul(a, b) => add(mul(diff(a, var), b.clone()), mul(a.clone(), diff(b, var))),
        Expr::Div(a, b) => {
            // (a/b)' = a'/b - a b'/b^2
            let da = diff(a, var);
            let db = diff(b, var);
            sub(
                div(da, b.clone()),
                div(mul(a.clone(), db), pow(b.clone(), 2.0)),
            )
        }
        Expr::Neg(a) => neg(diff(a, var)),
        Expr::Pow(a, exp) => {
            // (a^c)' = c a^(c-1) a'
            let da = diff(a, var);
            mul(mul(Expr::constant(*exp), pow(a.clone(), exp - 1.0)), da)
        }
        Expr::Sin(a) => mul(Rc::new(Expr::Cos(a.clone())), diff(a, var)),
        Expr::Cos(a) => neg(mul(Rc::new(Expr::Sin(a.clone())), diff(a, var))),
        Expr::Exp(a) => mul(e.clone(), diff(a, var)),
        Expr::Sqrt(a) => div(
            diff(a, var),
            mul(Expr::constant(2.0), Rc::new(Expr::Sqrt(a.clone()))),
        ),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "x{v}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Pow(a, e) => write!(f, "({a}^{e})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' | '−' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
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
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == '.'
                        || bytes[i] == 'e'
                        || bytes[i] == 'E'
                        || ((bytes[i] == '+' || bytes[i] == '-')
                            && i > start
                            && (bytes[i - 1] == 'e' || bytes[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| GeomError::Expr(format!("bad numeric literal '{text}'")))?;
                out.push(Token::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_')
                {
                    i += 1;
                }
                out.push(Token::Ident(bytes[start..i].iter().collect()));
            }
            other => {
                return Err(GeomError::Expr(format!(
                    "unexpected character '{other}' at offset {i}"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.bump() {
            Some(found) if found == t => Ok(()),
            found => Err(GeomError::Expr(format!("expected {t:?}, found {found:?}"))),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Rc<Expr>> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = add(lhs, rhs);
                }
                Some(Token::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = sub(lhs, rhs);
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<Rc<Expr>> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = mul(lhs, rhs);
                }
                Some(Token::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = div(lhs, rhs);
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Rc<Expr>> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            return Ok(neg(self.unary()?));
        }
        self.power()
    }

    // power := atom ('^' unary)?   (right associative, constant exponent)
    fn power(&mut self) -> Result<Rc<Expr>> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            let exp = self.unary()?;
            let Some(c) = exp.as_const() else {
                return Err(GeomError::Expr(
                    "exponent must be a constant expression".into(),
                ));
            };
            return Ok(pow(base, c));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Rc<Expr>> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::constant(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                if matches!(self.peek(), Some(Token::LParen)) {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    let e = match name.as_str() {
                        "sin" => Rc::new(Expr::Sin(arg)),
                        "cos" => Rc::new(Expr::Cos(arg)),
                        "exp" => Rc::new(Expr::Exp(arg)),
                        "sqrt" => Rc::new(Expr::Sqrt(arg)),
                        other => {
                            return Err(GeomError::Expr(format!("unknown function '{other}'")))
                        }
                    };
                    // Fold constant arguments immediately.
                    if let Some(c) = match &*e {
                        Expr::Sin(a) => a.as_const().map(f64::sin),
                        Expr::Cos(a) => a.as_const().map(f64::cos),
                        Expr::Exp(a) => a.as_const().map(f64::exp),
                        Expr::Sqrt(a) => a.as_const().map(f64::sqrt),
                        _ => None,
                    } {
                        return Ok(Expr::constant(c));
                    }
                    Ok(e)
                } else if name == "pi" {
                    Ok(Expr::constant(std::f64::consts::PI))
                } else {
                    match self.vars.iter().position(|v| *v == name) {
                        Some(idx) => Ok(Rc::new(Expr::Var(idx))),
                        None => Err(GeomError::Expr(format!("unknown variable '{name}'"))),
                    }
                }
            }
            other => Err(GeomError::Expr(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse `src` against the ordered variable list `vars`.
pub fn parse(src: &str, vars: &[&str]) -> Result<Rc<Expr>> {
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        vars,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(GeomError::Expr(format!(
            "trailing tokens after expression: {:?}",
            &p.tokens[p.pos..]
        )));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Compilation to a stack program
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Op {
    PushConst(f64),
    PushVar(usize),
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    PowI(i32),
    PowF(f64),
    Sin,
    Cos,
    Exp,
    Sqrt,
}

/// An expression flattened to postfix form for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Program {
    ops: Vec<Op>,
    max_stack: usize,
}

fn flatten(e: &Expr, ops: &mut Vec<Op>) {
    match e {
        Expr::Const(c) => ops.push(Op::PushConst(*c)),
        Expr::Var(v) => ops.push(Op::PushVar(*v)),
        Expr::Add(a, b) => {
            flatten(a, ops);
            flatten(b, ops);
            ops.push(Op::Add);
        }
        Expr::Sub(a, b) => {
            flatten(a, ops);
            flatten(b, ops);
            ops.push(Op::Sub);
        }
        Expr::Mul(a, b) => {
            flatten(a, ops);
            flatten(b, ops);
            ops.push(Op::Mul);
        }
        Expr::Div(a, b) => {
            flatten(a, ops);
            flatten(b, ops);
            ops.push(Op::Div);
        }
        Expr::Neg(a) => {
            flatten(a, ops);
            ops.push(Op::Neg);
        }
        Expr::Pow(a, c) => {
            flatten(a, ops);
            if c.fract() == 0.0 && c.abs() <= 16.0 {
                ops.push(Op::PowI(*c as i32));
            } else {
                ops.push(Op::PowF(*c));
            }
        }
        Expr::Sin(a) => {
            flatten(a, ops);
            ops.push(Op::Sin);
        }
        Expr::Cos(a) => {
            flatten(a, ops);
            ops.push(Op::Cos);
        }
        Expr::Exp(a) => {
            flatten(a, ops);
            ops.push(Op::Exp);
        }
        Expr::Sqrt(a) => {
            flatten(a, ops);
            ops.push(Op::Sqrt);
        }
    }
}

impl Program {
    pub fn compile(e: &Rc<Expr>) -> Program {
        let mut ops = Vec::new();
        flatten(e, &mut ops);
        let mut depth = 0usize;
        let mut max_stack = 0usize;
        for op in &ops {
            match op {
                Op::PushConst(_) | Op::PushVar(_) => depth += 1,
                Op::Add | Op::Sub | Op::Mul | Op::Div => depth -= 1,
                _ => {}
            }
            max_stack = max_stack.max(depth);
        }
        Program { ops, max_stack }
    }

    pub fn eval(&self, vars: &[f64]) -> f64 {
        if self.max_stack <= 64 {
            let mut stack = [0.0f64; 64];
            self.eval_on(&mut stack, vars)
        } else {
            let mut stack = vec![0.0f64; self.max_stack];
            self.eval_on(&mut stack, vars)
        }
    }

    fn eval_on(&self, stack: &mut [f64], vars: &[f64]) -> f64 {
        let mut sp = 0usize;
        for op in &self.ops {
            match op {
                Op::PushConst(c) => {
                    stack[sp] = *c;
                    sp += 1;
                }
                Op::PushVar(v) => {
                    stack[sp] = vars[*v];
                    sp += 1;
                }
                Op::Add => {
                    sp -= 1;
                    stack[sp - 1] += stack[sp];
                }
                Op::Sub => {
                    sp -= 1;
                    stack[sp - 1] -= stack[sp];
                }
                Op::Mul => {
                    sp -= 1;
                    stack[sp - 1] *= stack[sp];
                }
                Op::Div => {
                    sp -= 1;
                    stack[sp - 1] /= stack[sp];
                }
                Op::Neg => stack[sp - 1] = -stack[sp - 1],
                Op::PowI(n) => stack[sp - 1] = stack[sp - 1].powi(*n),
                Op::PowF(c) => stack[sp - 1] = stack[sp - 1].powf(*c),
                Op::Sin => stack[sp - 1] = stack[sp - 1].sin(),
                Op::Cos => stack[sp - 1] = stack[sp - 1].cos(),
                Op::Exp => stack[sp - 1] = stack[sp - 1].exp(),
                Op::Sqrt => stack[sp - 1] = stack[sp - 1].sqrt(),
            }
        }
        stack[0]
    }
}
