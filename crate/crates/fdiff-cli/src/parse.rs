//! The functor-expression language: lexer, precedence-climbing parser,
//! canonical printing, and realization into computable functors.
//!
//! Grammar (whitespace-insensitive; errors carry byte offsets):
//!
//! ```text
//! expr    := factor (('+' | '*' | 'o') factor)*    precedence o > * > +
//! factor  := atom | 'delta' '(' expr ')' | 'delta^' int '(' expr ')' | '(' expr ')'
//! atom    := 'X' | 'X^' int | 'X^[' int ']' | 'X^' int '/' group
//!          | 'C{' int '}' | int
//!          | lattice '^[X]' | lattice '^X'
//!          | 'F' | 'P' | 'beta' | 'zeta(' int ')'
//!          | 'analytic(' string ')' | 'newton(' string ')'
//! group   := 'S' int | '<' perm (',' perm)* '>'      perm := '[' int,* ']'
//! lattice := latom ('x' latom)*                       latom := 'chain' int | int '_*'
//! ```
//!
//! A bare integer abbreviates `C{int}`; `^` binds tighter than `/`.

use std::fmt;

use fdiff_core::classes::{
    realize_class, ClassSpec, DirichletSpec, Lattice, PolySpec, QuotPowerSpec,
};
use fdiff_core::classes::lattice::n_star;
use fdiff_core::delta::symbolic::symbolic_delta;
use fdiff_core::delta::{delta, iterated_delta};
use fdiff_core::functor::{compose, product, sum, CheckParams, Endofunctor};
use fdiff_core::group::PermGroup;
use fdiff_core::newton::newton_sum;
use fdiff_core::FinSet;

#[derive(Debug)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GroupExpr {
    Sym(u32),
    Gens(Vec<Vec<u32>>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LatticeExpr {
    Chain(u32),
    Star(u64),
    Prod(Vec<LatticeExpr>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FunctorExpr {
    Id,
    Power(u32),
    Divided(u32),
    Quot(u32, GroupExpr),
    Const(u32),
    LatNorm(LatticeExpr),
    LatFull(LatticeExpr),
    FilterM,
    PowersetM,
    Ultra,
    Zeta(u32),
    AnalyticFile(String),
    NewtonFile(String),
    Sum(Vec<FunctorExpr>),
    Prod(Vec<FunctorExpr>),
    Compose(Box<FunctorExpr>, Box<FunctorExpr>),
    Delta(Box<FunctorExpr>),
    DeltaN(Box<FunctorExpr>, u32),
}

// ---------- lexer ----------

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Plus,
    Times,
    Pow,
    Slash,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    LAngle,
    RAngle,
    Comma,
    UnderStar,
    Int(u64),
    Ident(String),
    Str(String),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(input: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let offset = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push(Token { tok: Tok::Plus, offset }),
            '*' => out.push(Token { tok: Tok::Times, offset }),
            '^' => out.push(Token { tok: Tok::Pow, offset }),
            '/' => out.push(Token { tok: Tok::Slash, offset }),
            '(' => out.push(Token { tok: Tok::LParen, offset }),
            ')' => out.push(Token { tok: Tok::RParen, offset }),
            '[' => out.push(Token { tok: Tok::LBrack, offset }),
            ']' => out.push(Token { tok: Tok::RBrack, offset }),
            '{' => out.push(Token { tok: Tok::LBrace, offset }),
            '}' => out.push(Token { tok: Tok::RBrace, offset }),
            '<' => out.push(Token { tok: Tok::LAngle, offset }),
            '>' => out.push(Token { tok: Tok::RAngle, offset }),
            ',' => out.push(Token { tok: Tok::Comma, offset }),
            '_' => {
                if bytes.get(i + 1) == Some(&b'*') {
                    out.push(Token { tok: Tok::UnderStar, offset });
                    i += 2;
                    continue;
                }
                return Err(ParseError { offset, message: "expected `_*`".into() });
            }
            '"' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j] != b'"' {
                    j += 1;
                }
                if j == bytes.len() {
                    return Err(ParseError { offset, message: "unterminated string".into() });
                }
                out.push(Token {
                    tok: Tok::Str(input[i + 1..j].to_string()),
                    offset,
                });
                i = j + 1;
                continue;
            }
            '0'..='9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let value: u64 = input[i..j].parse().map_err(|_| ParseError {
                    offset,
                    message: "integer too large".into(),
                })?;
                out.push(Token { tok: Tok::Int(value), offset });
                i = j;
                continue;
            }
            'a'..='z' | 'A'..='Z' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j] as char).is_ascii_alphabetic() {
                    j += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(input[i..j].to_string()),
                    offset,
                });
                i = j;
                continue;
            }
            other => {
                return Err(ParseError {
                    offset,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

// ---------- parser ----------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

pub fn parse(input: &str) -> Result<FunctorExpr, ParseError> {
    let tokens = lex(input)?;
    let mut p = Parser { tokens, pos: 0, end: input.len() };
    let expr = p.parse_bin(1)?;
    if p.pos < p.tokens.len() {
        return Err(ParseError {
            offset: p.tokens[p.pos].offset,
            message: "trailing input".into(),
        });
    }
    Ok(expr)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.tokens.get(self.pos + 1).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn err(&self, message: String) -> ParseError {
        ParseError { offset: self.offset(), message }
    }

    fn expect_int(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn parse_bin(&mut self, min_prec: u8) -> Result<FunctorExpr, ParseError> {
        let mut lhs = self.parse_factor()?;
        loop {
            let prec = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Times) => 2,
                Some(Tok::Ident(id)) if id == "o" => 3,
                _ => break,
            };
            if prec < min_prec {
                break;
            }
            let op = self.bump().unwrap();
            let rhs = self.parse_bin(prec + 1)?;
            lhs = match op {
                Tok::Plus => match lhs {
                    FunctorExpr::Sum(mut parts) => {
                        parts.push(rhs);
                        FunctorExpr::Sum(parts)
                    }
                    other => FunctorExpr::Sum(vec![other, rhs]),
                },
                Tok::Times => match lhs {
                    FunctorExpr::Prod(mut parts) => {
                        parts.push(rhs);
                        FunctorExpr::Prod(parts)
                    }
                    other => FunctorExpr::Prod(vec![other, rhs]),
                },
                _ => FunctorExpr::Compose(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<FunctorExpr, ParseError> {
        match self.peek() {
            Some(Tok::Ident(id)) if id == "delta" => {
                self.pos += 1;
                let n = if self.peek() == Some(&Tok::Pow) {
                    self.pos += 1;
                    Some(self.expect_int("iteration count after `delta^`")?)
                } else {
                    None
                };
                self.expect(Tok::LParen, "`(` after delta")?;
                let inner = self.parse_bin(1)?;
                self.expect(Tok::RParen, "`)` closing delta")?;
                Ok(match n {
                    None => FunctorExpr::Delta(Box::new(inner)),
                    Some(k) => FunctorExpr::DeltaN(Box::new(inner), k as u32),
                })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.parse_bin(1)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> Result<FunctorExpr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(id)) => match id.as_str() {
                "X" => {
                    self.pos += 1;
                    if self.peek() != Some(&Tok::Pow) {
                        return Ok(FunctorExpr::Id);
                    }
                    self.pos += 1;
                    if self.peek() == Some(&Tok::LBrack) {
                        self.pos += 1;
                        let n = self.expect_int("divided power index")?;
                        self.expect(Tok::RBrack, "`]`")?;
                        return Ok(FunctorExpr::Divided(n as u32));
                    }
                    let n = self.expect_int("power")?;
                    if self.peek() == Some(&Tok::Slash) {
                        self.pos += 1;
                        let group = self.parse_group(n as u32)?;
                        return Ok(FunctorExpr::Quot(n as u32, group));
                    }
                    Ok(FunctorExpr::Power(n as u32))
                }
                "C" => {
                    self.pos += 1;
                    self.expect(Tok::LBrace, "`{` after C")?;
                    let n = self.expect_int("constant cardinality")?;
                    self.expect(Tok::RBrace, "`}`")?;
                    Ok(FunctorExpr::Const(n as u32))
                }
                "F" => {
                    self.pos += 1;
                    Ok(FunctorExpr::FilterM)
                }
                "P" => {
                    self.pos += 1;
                    Ok(FunctorExpr::PowersetM)
                }
                "beta" => {
                    self.pos += 1;
                    Ok(FunctorExpr::Ultra)
                }
                "zeta" => {
                    self.pos += 1;
                    self.expect(Tok::LParen, "`(` after zeta")?;
                    let n = self.expect_int("zeta truncation degree")?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(FunctorExpr::Zeta(n as u32))
                }
                "analytic" | "newton" => {
                    self.pos += 1;
                    self.expect(Tok::LParen, "`(`")?;
                    let path = match self.bump() {
                        Some(Tok::Str(s)) => s,
                        _ => return Err(self.err("expected a quoted file path".into())),
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(if id == "analytic" {
                        FunctorExpr::AnalyticFile(path)
                    } else {
                        FunctorExpr::NewtonFile(path)
                    })
                }
                "chain" => self.parse_lattice_exponential(),
                other => Err(self.err(format!("unknown identifier `{other}`"))),
            },
            Some(Tok::Int(_)) => {
                // lattice literal `n_*` or constant sugar
                if self.peek2() == Some(&Tok::UnderStar) {
                    self.parse_lattice_exponential()
                } else {
                    let n = self.expect_int("integer")?;
                    Ok(FunctorExpr::Const(n as u32))
                }
            }
            _ => Err(self.err("expected an expression".into())),
        }
    }

    fn parse_lattice_exponential(&mut self) -> Result<FunctorExpr, ParseError> {
        let lattice = self.parse_lattice()?;
        self.expect(Tok::Pow, "`^` after a lattice")?;
        if self.peek() == Some(&Tok::LBrack) {
            self.pos += 1;
            match self.bump() {
                Some(Tok::Ident(x)) if x == "X" => {}
                _ => return Err(self.err("expected `X` in `^[X]`".into())),
            }
            self.expect(Tok::RBrack, "`]`")?;
            Ok(FunctorExpr::LatNorm(lattice))
        } else {
            match self.bump() {
                Some(Tok::Ident(x)) if x == "X" => Ok(FunctorExpr::LatFull(lattice)),
                _ => Err(self.err("expected `X` or `[X]` after `^`".into())),
            }
        }
    }

    fn parse_lattice(&mut self) -> Result<LatticeExpr, ParseError> {
        let mut parts = vec![self.parse_lattice_atom()?];
        while matches!(self.peek(), Some(Tok::Ident(id)) if id == "x") {
            self.pos += 1;
            parts.push(self.parse_lattice_atom()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            LatticeExpr::Prod(parts)
        })
    }

    fn parse_lattice_atom(&mut self) -> Result<LatticeExpr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(id)) if id == "chain" => {
                self.pos += 1;
                let n = self.expect_int("chain length")?;
                Ok(LatticeExpr::Chain(n as u32))
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                self.expect(Tok::UnderStar, "`_*` after the integer")?;
                if n == 0 {
                    return Err(self.err("`0_*` is not a lattice".into()));
                }
                Ok(LatticeExpr::Star(n))
            }
            _ => Err(self.err("expected a lattice literal".into())),
        }
    }

    fn parse_group(&mut self, degree: u32) -> Result<GroupExpr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(id)) if id == "S" => {
                self.pos += 1;
                let n = self.expect_int("symmetric group degree")?;
                if n as u32 != degree {
                    return Err(self.err(format!(
                        "group degree {n} does not match exponent {degree}"
                    )));
                }
                Ok(GroupExpr::Sym(n as u32))
            }
            Some(Tok::LAngle) => {
                self.pos += 1;
                let mut perms = Vec::new();
                loop {
                    self.expect(Tok::LBrack, "`[` opening a permutation")?;
                    let mut perm = Vec::new();
                    loop {
                        perm.push(self.expect_int("permutation entry")? as u32);
                        if self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RBrack, "`]` closing a permutation")?;
                    if perm.len() != degree as usize {
                        return Err(self.err(format!(
                            "malformed permutation: {} entries for degree {degree}",
                            perm.len()
                        )));
                    }
                    perms.push(perm);
                    if self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RAngle, "`>` closing the generator list")?;
                Ok(GroupExpr::Gens(perms))
            }
            _ => Err(self.err("expected a group (`S n` or `<[..],..>`))".into())),
        }
    }
}

// ---------- printing ----------

fn prec(e: &FunctorExpr) -> u8 {
    match e {
        FunctorExpr::Sum(_) => 1,
        FunctorExpr::Prod(_) => 2,
        FunctorExpr::Compose(_, _) => 3,
        _ => 9,
    }
}

fn fmt_child(e: &FunctorExpr, parent: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(e) < parent {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for LatticeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeExpr::Chain(n) => write!(f, "chain{n}"),
            LatticeExpr::Star(n) => write!(f, "{n}_*"),
            LatticeExpr::Prod(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorExpr::Id => write!(f, "X"),
            FunctorExpr::Power(n) => write!(f, "X^{n}"),
            FunctorExpr::Divided(n) => write!(f, "X^[{n}]"),
            FunctorExpr::Quot(n, GroupExpr::Sym(k)) => write!(f, "X^{n}/S{k}"),
            FunctorExpr::Quot(n, GroupExpr::Gens(gens)) => {
                write!(f, "X^{n}/<")?;
                for (i, g) in gens.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "[")?;
                    for (j, v) in g.iter().enumerate() {
                        if j > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{v}")?;
                    }
                    write!(f, "]")?;
                }
                write!(f, ">")
            }
            FunctorExpr::Const(n) => write!(f, "C{{{n}}}"),
            FunctorExpr::LatNorm(l) => write!(f, "{l}^[X]"),
            FunctorExpr::LatFull(l) => write!(f, "{l}^X"),
            FunctorExpr::FilterM => write!(f, "F"),
            FunctorExpr::PowersetM => write!(f, "P"),
            FunctorExpr::Ultra => write!(f, "beta"),
            FunctorExpr::Zeta(n) => write!(f, "zeta({n})"),
            FunctorExpr::AnalyticFile(p) => write!(f, "analytic(\"{p}\")"),
            FunctorExpr::NewtonFile(p) => write!(f, "newton(\"{p}\")"),
            FunctorExpr::Sum(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    fmt_child(p, 2, f)?;
                }
                Ok(())
            }
            FunctorExpr::Prod(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    fmt_child(p, 3, f)?;
                }
                Ok(())
            }
            FunctorExpr::Compose(a, b) => {
                fmt_child(a, 3, f)?;
                write!(f, " o ")?;
                fmt_child(b, 4, f)
            }
            FunctorExpr::Delta(e) => write!(f, "delta({e})"),
            FunctorExpr::DeltaN(e, n) => write!(f, "delta^{n}({e})"),
        }
    }
}

// ---------- realization ----------

pub struct Realized {
    pub functor: Endofunctor,
    pub class: Option<ClassSpec>,
}

pub fn realize_lattice(l: &LatticeExpr) -> anyhow::Result<Lattice> {
    Ok(match l {
        LatticeExpr::Chain(n) => Lattice::chain(*n as usize)?,
        LatticeExpr::Star(n) => n_star(*n)?,
        LatticeExpr::Prod(parts) => {
            let factors: Vec<Lattice> =
                parts.iter().map(realize_lattice).collect::<anyhow::Result<_>>()?;
            Lattice::product(format!("{l}"), &factors)?
        }
    })
}

/// Realizes an expression as a functor, tracking a class spec whenever the
/// expression stays within one closed-form class. Differences are taken
/// operationally, with tautness verified at every boundary.
pub fn realize(expr: &FunctorExpr, params: &CheckParams) -> anyhow::Result<Realized> {
    Ok(match expr {
        FunctorExpr::Id => from_class(ClassSpec::Poly(PolySpec::new(vec![1]))),
        FunctorExpr::Power(n) => from_class(ClassSpec::Poly(PolySpec::new(vec![*n as usize]))),
        FunctorExpr::Const(n) => from_class(ClassSpec::Poly(PolySpec::constant(*n as usize))),
        FunctorExpr::Divided(n) => {
            from_class(ClassSpec::QuotPower(QuotPowerSpec::divided_power(*n as usize)))
        }
        FunctorExpr::Quot(n, g) => {
            let group = match g {
                GroupExpr::Sym(k) => PermGroup::symmetric(*k as usize)?,
                GroupExpr::Gens(gens) => PermGroup::from_generators(
                    *n as usize,
                    gens.iter()
                        .map(|p| p.iter().map(|&v| v as usize).collect())
                        .collect(),
                )?,
            };
            from_class(ClassSpec::QuotPower(QuotPowerSpec::new(vec![(
                *n as usize,
                group,
            )])?))
        }
        FunctorExpr::LatNorm(l) => {
            from_class(ClassSpec::NormalizedExponential(realize_lattice(l)?))
        }
        FunctorExpr::LatFull(l) => from_class(ClassSpec::FullExponential(realize_lattice(l)?)),
        FunctorExpr::FilterM => from_class(ClassSpec::FilterMonad),
        FunctorExpr::PowersetM => from_class(ClassSpec::Powerset),
        FunctorExpr::Ultra => from_class(ClassSpec::Ultrafilter),
        FunctorExpr::Zeta(n) => from_class(ClassSpec::Dirichlet(DirichletSpec {
            terms: (1..=*n as u64)
                .map(|k| Ok((FinSet::atoms(1), n_star(k)?)))
                .collect::<fdiff_core::Result<_>>()?,
        })),
        FunctorExpr::AnalyticFile(path) => {
            let spec = crate::species_io::load_species(std::path::Path::new(path))?;
            from_class(ClassSpec::Species(spec))
        }
        FunctorExpr::NewtonFile(path) => {
            let soft = crate::species_io::load_soft_species(std::path::Path::new(path))?;
            Realized { functor: newton_sum(&soft), class: None }
        }
        FunctorExpr::Sum(parts) => {
            let realized: Vec<Realized> = parts
                .iter()
                .map(|p| realize(p, params))
                .collect::<anyhow::Result<_>>()?;
            if let Some(class) = combine_sum(&realized) {
                from_class(class)
            } else {
                Realized {
                    functor: sum(realized.into_iter().map(|r| r.functor).collect()),
                    class: None,
                }
            }
        }
        FunctorExpr::Prod(parts) => {
            let realized: Vec<Realized> = parts
                .iter()
                .map(|p| realize(p, params))
                .collect::<anyhow::Result<_>>()?;
            if let Some(class) = combine_prod(&realized) {
                from_class(class)
            } else {
                Realized {
                    functor: product(realized.into_iter().map(|r| r.functor).collect()),
                    class: None,
                }
            }
        }
        FunctorExpr::Compose(outer, inner) => {
            let o = realize(outer, params)?;
            let i = realize(inner, params)?;
            Realized { functor: compose(&o.functor, &i.functor), class: None }
        }
        FunctorExpr::Delta(inner) => {
            let r = realize(inner, params)?;
            r.functor.require_taut().map_err(anyhow::Error::from)?;
            let class = match &r.class {
                Some(c) => Some(symbolic_delta(c)?.spec),
                None => None,
            };
            Realized { functor: delta(&r.functor)?, class }
        }
        FunctorExpr::DeltaN(inner, n) => {
            let r = realize(inner, params)?;
            r.functor.require_taut().map_err(anyhow::Error::from)?;
            let mut class = r.class.clone();
            for _ in 0..*n {
                class = match &class {
                    Some(c) => Some(symbolic_delta(c)?.spec),
                    None => None,
                };
            }
            Realized {
                functor: iterated_delta(&r.functor, *n as usize, params)?,
                class,
            }
        }
    })
}

fn from_class(class: ClassSpec) -> Realized {
    Realized { functor: realize_class(&class), class: Some(class) }
}

fn combine_sum(parts: &[Realized]) -> Option<ClassSpec> {
    let mut poly: Vec<usize> = Vec::new();
    if parts.iter().all(|r| matches!(r.class, Some(ClassSpec::Poly(_)))) {
        for r in parts {
            if let Some(ClassSpec::Poly(p)) = &r.class {
                poly.extend(&p.exponents);
            }
        }
        return Some(ClassSpec::Poly(PolySpec::new(poly)));
    }
    if parts
        .iter()
        .all(|r| matches!(r.class, Some(ClassSpec::QuotPower(_))))
    {
        let mut terms = Vec::new();
        for r in parts {
            if let Some(ClassSpec::QuotPower(q)) = &r.class {
                terms.extend(q.terms.clone());
            }
        }
        return Some(ClassSpec::QuotPower(QuotPowerSpec::new(terms).ok()?));
    }
    if parts
        .iter()
        .all(|r| matches!(r.class, Some(ClassSpec::Dirichlet(_))))
    {
        let mut terms = Vec::new();
        for r in parts {
            if let Some(ClassSpec::Dirichlet(d)) = &r.class {
                terms.extend(d.terms.clone());
            }
        }
        return Some(ClassSpec::Dirichlet(DirichletSpec { terms }));
    }
    None
}

fn combine_prod(parts: &[Realized]) -> Option<ClassSpec> {
    // products of polynomials distribute to polynomials
    if parts.iter().all(|r| matches!(r.class, Some(ClassSpec::Poly(_)))) {
        let mut acc: Vec<usize> = vec![0];
        for r in parts {
            if let Some(ClassSpec::Poly(p)) = &r.class {
                let mut next = Vec::new();
                for &a in &acc {
                    for &e in &p.exponents {
                        next.push(a + e);
                    }
                }
                acc = next;
            }
        }
        return Some(ClassSpec::Poly(PolySpec::new(acc)));
    }
    None
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_examples_parse() {
        assert_eq!(
            parse("delta(X^2 o X^2)").unwrap(),
            FunctorExpr::Delta(Box::new(FunctorExpr::Compose(
                Box::new(FunctorExpr::Power(2)),
                Box::new(FunctorExpr::Power(2))
            )))
        );
        assert_eq!(
            parse("X^4/S4 + C{3}*X").unwrap(),
            FunctorExpr::Sum(vec![
                FunctorExpr::Quot(4, GroupExpr::Sym(4)),
                FunctorExpr::Prod(vec![FunctorExpr::Const(3), FunctorExpr::Id]),
            ])
        );
        assert_eq!(
            parse("chain3^[X]").unwrap(),
            FunctorExpr::LatNorm(LatticeExpr::Chain(3))
        );
        assert_eq!(
            parse("6_*^[X]").unwrap(),
            FunctorExpr::LatNorm(LatticeExpr::Star(6))
        );
        assert_eq!(
            parse("2_* x 3_*^[X]").unwrap(),
            FunctorExpr::LatNorm(LatticeExpr::Prod(vec![
                LatticeExpr::Star(2),
                LatticeExpr::Star(3)
            ]))
        );
        assert_eq!(parse("2X", ).map(|_| ()).is_err(), true);
        assert_eq!(
            parse("X^3/<[1,0,2],[0,2,1]>").unwrap(),
            FunctorExpr::Quot(
                3,
                GroupExpr::Gens(vec![vec![1, 0, 2], vec![0, 2, 1]])
            )
        );
    }

    #[test]
    fn precedence_is_respected() {
        // o > * > +
        let e = parse("X + X^2 * X o X^2").unwrap();
        assert_eq!(
            e,
            FunctorExpr::Sum(vec![
                FunctorExpr::Id,
                FunctorExpr::Prod(vec![
                    FunctorExpr::Power(2),
                    FunctorExpr::Compose(
                        Box::new(FunctorExpr::Id),
                        Box::new(FunctorExpr::Power(2))
                    ),
                ]),
            ])
        );
    }

    #[test]
    fn errors_carry_byte_offsets() {
        let err = parse("X^2 + $").unwrap_err();
        assert_eq!(err.offset, 6);
        let err = parse("X^[2").unwrap_err();
        assert_eq!(err.offset, 4);
        let err = parse("X^3/<[1,0]>").unwrap_err();
        assert!(err.message.contains("malformed permutation"));
    }

    #[test]
    fn bare_int_is_constant_sugar() {
        assert_eq!(
            parse("2*X + 3").unwrap(),
            parse("C{2}*X + C{3}").unwrap()
        );
    }

    fn leaf_strategy() -> impl Strategy<Value = FunctorExpr> {
        prop_oneof![
            Just(FunctorExpr::Id),
            (0u32..4).prop_map(FunctorExpr::Power),
            (1u32..4).prop_map(FunctorExpr::Divided),
            (0u32..4).prop_map(FunctorExpr::Const),
            Just(FunctorExpr::FilterM),
            Just(FunctorExpr::PowersetM),
            Just(FunctorExpr::Ultra),
            (1u32..4).prop_map(FunctorExpr::Zeta),
            (1u32..4).prop_map(|n| FunctorExpr::LatNorm(LatticeExpr::Chain(n))),
            (1u64..7).prop_map(|n| FunctorExpr::LatNorm(LatticeExpr::Star(n))),
        ]
    }

    /// The parser always flattens n-ary sums and products, so canonical
    /// ASTs never nest a sum directly in a sum (or product in product).
    fn splice_sum(parts: Vec<FunctorExpr>) -> FunctorExpr {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                FunctorExpr::Sum(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        FunctorExpr::Sum(flat)
    }

    fn splice_prod(parts: Vec<FunctorExpr>) -> FunctorExpr {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                FunctorExpr::Prod(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        FunctorExpr::Prod(flat)
    }

    fn expr_strategy() -> impl Strategy<Value = FunctorExpr> {
        leaf_strategy().prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..4).prop_map(splice_sum),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(splice_prod),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| FunctorExpr::Compose(
                    Box::new(a),
                    Box::new(b)
                )),
                inner.clone().prop_map(|e| FunctorExpr::Delta(Box::new(e))),
                (inner, 1u32..3)
                    .prop_map(|(e, n)| FunctorExpr::DeltaN(Box::new(e), n)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in expr_strategy()) {
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e, "printed as {}", printed);
            // parse . print . parse is a fixed point
            let printed_again = reparsed.to_string();
            prop_assert_eq!(printed, printed_again);
        }
    }
}
