//! Text syntax for Boolean constraints.
//!
//! Grammar (lowest precedence first):
//!
//! ```text
//! iff     := implies ("<->" implies)*          left-associative
//! implies := or ("->" implies)?                right-associative
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | atom
//! atom    := ident | "(" iff ")"
//!          | "count" "(" cmp "," int ";" lits ")"
//!          | "exactly1" "(" lits ")"
//! cmp     := ">=" | "<=" | "="
//! lits    := lit ("," lit)*    lit := "!"? ident
//! ident   := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! `!x` parses to a negated literal directly (not `Not(Lit(x))`), so printing
//! and re-parsing an expression reproduces the same tree.

use std::fmt::Write as _;

use crate::boolexpr::{BoolExpr, CountCmp, Literal, VarId};
use crate::error::{Error, Result};

/// Resolves identifiers to variable ids while parsing. A registry interns
/// unseen names; a model rejects them.
pub trait ResolveVar {
    fn resolve(&mut self, name: &str) -> Result<VarId>;
}

impl ResolveVar for crate::boolexpr::VarRegistry {
    fn resolve(&mut self, name: &str) -> Result<VarId> {
        self.intern(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u32),
    Not,     // !
    And,     // &
    Or,      // |
    Implies, // ->
    Iff,     // <->
    LParen,
    RParen,
    Comma,
    Semi,
    Ge, // >=
    Le, // <=
    Eq, // =
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            col: self.pos + 1,
            msg: msg.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let start = self.pos;
            let c = self.src[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                    continue;
                }
                b'!' => {
                    self.pos += 1;
                    out.push((start, Tok::Not));
                }
                b'&' => {
                    self.pos += 1;
                    out.push((start, Tok::And));
                }
                b'|' => {
                    self.pos += 1;
                    out.push((start, Tok::Or));
                }
                b'(' => {
                    self.pos += 1;
                    out.push((start, Tok::LParen));
                }
                b')' => {
                    self.pos += 1;
                    out.push((start, Tok::RParen));
                }
                b',' => {
                    self.pos += 1;
                    out.push((start, Tok::Comma));
                }
                b';' => {
                    self.pos += 1;
                    out.push((start, Tok::Semi));
                }
                b'=' => {
                    self.pos += 1;
                    out.push((start, Tok::Eq));
                }
                b'-' => {
                    if self.src.get(self.pos + 1) == Some(&b'>') {
                        self.pos += 2;
                        out.push((start, Tok::Implies));
                    } else {
                        return Err(self.error("expected '>' after '-'"));
                    }
                }
                b'<' => match self.src.get(self.pos + 1) {
                    Some(b'-') if self.src.get(self.pos + 2) == Some(&b'>') => {
                        self.pos += 3;
                        out.push((start, Tok::Iff));
                    }
                    Some(b'=') => {
                        self.pos += 2;
                        out.push((start, Tok::Le));
                    }
                    _ => return Err(self.error("expected '<->' or '<='")),
                },
                b'>' => {
                    if self.src.get(self.pos + 1) == Some(&b'=') {
                        self.pos += 2;
                        out.push((start, Tok::Ge));
                    } else {
                        return Err(self.error("expected '=' after '>'"));
                    }
                }
                b'0'..=b'9' => {
                    let mut end = self.pos;
                    while end < self.src.len() && self.src[end].is_ascii_digit() {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                    let n: u32 = text
                        .parse()
                        .map_err(|_| self.error(format!("integer '{text}' out of range")))?;
                    self.pos = end;
                    out.push((start, Tok::Int(n)));
                }
                b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                    let mut end = self.pos;
                    while end < self.src.len()
                        && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                    {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end])
                        .unwrap()
                        .to_string();
                    self.pos = end;
                    out.push((start, Tok::Ident(text)));
                }
                other => {
                    return Err(self.error(format!("unexpected character '{}'", other as char)))
                }
            }
        }
        Ok(out)
    }
}

struct Parser<'a, R: ResolveVar> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    src_len: usize,
    resolver: &'a mut R,
}

impl<R: ResolveVar> Parser<'_, R> {
    fn error_at(&self, msg: impl Into<String>) -> Error {
        let col = self
            .toks
            .get(self.pos)
            .map(|(p, _)| p + 1)
            .unwrap_or(self.src_len + 1);
        Error::Parse {
            col,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn expect(&mut self, want: &Tok, desc: &str) -> Result<()> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_at(format!("expected {desc}"))),
        }
    }

    fn parse_iff(&mut self) -> Result<BoolExpr> {
        let mut lhs = self.parse_implies()?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.parse_implies()?;
            lhs = BoolExpr::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_implies(&mut self) -> Result<BoolExpr> {
        let lhs = self.parse_or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.parse_implies()?;
            return Ok(BoolExpr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> Result<BoolExpr> {
        let mut children = vec![self.parse_and()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            children.push(self.parse_and()?);
        }
        Ok(if children.len() == 1 {
            children.pop().unwrap()
        } else {
            BoolExpr::Or(children)
        })
    }

    fn parse_and(&mut self) -> Result<BoolExpr> {
        let mut children = vec![self.parse_unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            children.push(self.parse_unary()?);
        }
        Ok(if children.len() == 1 {
            children.pop().unwrap()
        } else {
            BoolExpr::And(children)
        })
    }

    fn parse_unary(&mut self) -> Result<BoolExpr> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            let inner = self.parse_unary()?;
            // Fold negation of a bare literal into the literal itself so that
            // print → parse round-trips to an identical tree.
            return Ok(match inner {
                BoolExpr::Lit(l) => BoolExpr::Lit(l.complement()),
                other => BoolExpr::Not(Box::new(other)),
            });
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<BoolExpr> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.parse_iff()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) if name == "count" => {
                self.pos += 1;
                self.parse_count()
            }
            Some(Tok::Ident(name)) if name == "exactly1" => {
                self.pos += 1;
                self.expect(&Tok::LParen, "'(' after exactly1")?;
                let lits = self.parse_lits()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(BoolExpr::exactly_one(lits))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(BoolExpr::var(self.resolver.resolve(&name)?))
            }
            _ => Err(self.error_at("expected variable, '!', '(', count(...), or exactly1(...)")),
        }
    }

    fn parse_count(&mut self) -> Result<BoolExpr> {
        self.expect(&Tok::LParen, "'(' after count")?;
        let cmp = match self.peek() {
            Some(Tok::Ge) => CountCmp::AtLeast,
            Some(Tok::Le) => CountCmp::AtMost,
            Some(Tok::Eq) => CountCmp::Exactly,
            _ => return Err(self.error_at("expected '>=', '<=', or '=' in count")),
        };
        self.pos += 1;
        self.expect(&Tok::Comma, "','")?;
        let k = match self.peek() {
            Some(Tok::Int(n)) => *n,
            _ => return Err(self.error_at("expected integer bound in count")),
        };
        self.pos += 1;
        self.expect(&Tok::Semi, "';'")?;
        let lits = self.parse_lits()?;
        self.expect(&Tok::RParen, "')'")?;
        Ok(BoolExpr::count(lits, cmp, k))
    }

    fn parse_lits(&mut self) -> Result<Vec<Literal>> {
        let mut lits = vec![self.parse_lit()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            lits.push(self.parse_lit()?);
        }
        Ok(lits)
    }

    fn parse_lit(&mut self) -> Result<Literal> {
        let negated = if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let var = self.resolver.resolve(&name)?;
                Ok(Literal { var, negated })
            }
            _ => Err(self.error_at("expected variable name")),
        }
    }
}

/// Parse one expression; identifiers are resolved through `resolver`.
pub fn parse_expr(src: &str, resolver: &mut impl ResolveVar) -> Result<BoolExpr> {
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        src_len: src.len(),
        resolver,
    };
    let e = p.parse_iff()?;
    if p.pos != p.toks.len() {
        return Err(p.error_at("unexpected trailing input"));
    }
    Ok(e)
}

/// One line of a constraint file.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintLine {
    Hard(BoolExpr),
    /// Violating the expression costs `penalty` (> 0, finite) in the objective.
    Soft {
        penalty: f64,
        expr: BoolExpr,
    },
}

/// Parse a constraint file: one expression per line, `#` comments, blank
/// lines ignored. A line of the form `soft <penalty> : <expr>` declares a
/// penalized constraint. Errors carry 1-based line numbers.
pub fn parse_constraint_file(
    src: &str,
    resolver: &mut impl ResolveVar,
) -> Result<Vec<ConstraintLine>> {
    let mut out = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let at_line = |e: Error| match e {
            Error::Parse { col, msg } => Error::ParseLine {
                line: line_no,
                msg: format!("column {col}: {msg}"),
            },
            other => Error::ParseLine {
                line: line_no,
                msg: other.to_string(),
            },
        };
        if let Some(rest) = line.strip_prefix("soft") {
            // Require a delimiter so a variable named `softmax` still parses.
            if rest.starts_with(|c: char| c.is_whitespace()) {
                let (penalty_text, expr_text) =
                    rest.split_once(':').ok_or_else(|| Error::ParseLine {
                        line: line_no,
                        msg: "soft line needs the form: soft <penalty> : <expr>".into(),
                    })?;
                let penalty: f64 = penalty_text.trim().parse().map_err(|_| Error::ParseLine {
                    line: line_no,
                    msg: format!("invalid penalty '{}'", penalty_text.trim()),
                })?;
                if !penalty.is_finite() || penalty <= 0.0 {
                    return Err(Error::ParseLine {
                        line: line_no,
                        msg: format!("penalty must be positive and finite, got {penalty}"),
                    });
                }
                let expr = parse_expr(expr_text, resolver).map_err(at_line)?;
                out.push(ConstraintLine::Soft { penalty, expr });
                continue;
            }
        }
        let expr = parse_expr(line, resolver).map_err(at_line)?;
        out.push(ConstraintLine::Hard(expr));
    }
    Ok(out)
}

/// Render an expression in the grammar above, parenthesizing only where
/// precedence demands. `name_of` supplies display names for variable ids.
pub fn print_expr(expr: &BoolExpr, name_of: &dyn Fn(VarId) -> String) -> String {
    let mut s = String::new();
    write_prec(expr, 0, name_of, &mut s);
    s
}

/// Precedence levels: Iff 1, Implies 2, Or 3, And 4, unary 5.
fn prec(expr: &BoolExpr) -> u8 {
    match expr {
        BoolExpr::Iff(..) => 1,
        BoolExpr::Implies(..) => 2,
        BoolExpr::Or(..) => 3,
        BoolExpr::And(..) => 4,
        BoolExpr::Not(..) | BoolExpr::Lit(..) | BoolExpr::Count { .. } => 5,
    }
}

fn write_prec(expr: &BoolExpr, min: u8, name_of: &dyn Fn(VarId) -> String, out: &mut String) {
    let p = prec(expr);
    let wrap = p < min;
    if wrap {
        out.push('(');
    }
    match expr {
        BoolExpr::Lit(l) => {
            if l.negated {
                out.push('!');
            }
            out.push_str(&name_of(l.var));
        }
        BoolExpr::Not(e) => {
            out.push('!');
            write_prec(e, 5, name_of, out);
        }
        BoolExpr::And(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                write_prec(x, 5, name_of, out);
            }
        }
        BoolExpr::Or(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                write_prec(x, 4, name_of, out);
            }
        }
        BoolExpr::Implies(a, b) => {
            // Right-associative: the left side needs strictly higher level.
            write_prec(a, 3, name_of, out);
            out.push_str(" -> ");
            write_prec(b, 2, name_of, out);
        }
        BoolExpr::Iff(a, b) => {
            write_prec(a, 2, name_of, out);
            out.push_str(" <-> ");
            write_prec(b, 2, name_of, out);
        }
        BoolExpr::Count { lits, cmp, k } => {
            let op = match cmp {
                CountCmp::AtLeast => ">=",
                CountCmp::AtMost => "<=",
                CountCmp::Exactly => "=",
            };
            if *cmp == CountCmp::Exactly && *k == 1 {
                out.push_str("exactly1(");
            } else {
                let _ = write!(out, "count({op}, {k}; ");
            }
            for (i, l) in lits.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                if l.negated {
                    out.push('!');
                }
                out.push_str(&name_of(l.var));
            }
            out.push(')');
        }
    }
    if wrap {
        out.push(')');
    }
}
