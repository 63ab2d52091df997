//! S-expression syntax for terms, formulas and proofs.
//!
//! ```text
//! term    := 0 | <digits> | var | (s t) | (+ t t) | (* t t) | (code HEX)
//! formula := (= t t) | (<= t t) | (< t t) | (not f) | (and f f ...)
//!          | (or f f ...) | (-> f f) | (forall v f) | (exists v f)
//!          | (ble v t f) | (blt v t f) | (exle v t f) | (exlt v t f)
//!          | (pred name t ...)
//! ```
//!
//! `ble`/`blt` are `forall v <= t` / `forall v < t`, `exle`/`exlt` the
//! existential forms. Decimal literals abbreviate numerals. `<` is a
//! read-only convenience: the printer emits `(<= (s a) b)`. Right-nested `and`
//! and `or` chains print as one n-ary list, which reads back to the same
//! tree.

use thiserror::Error;

use super::{BoundKind, Formula, Term};
use crate::encoding::Str;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("bad form `{form}`: {msg}")]
    Form { form: String, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

impl SExpr {
    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a) => Some(a),
            SExpr::List(_) => None,
        }
    }

    fn brief(&self) -> String {
        let mut s = String::new();
        write_sexpr(self, &mut s);
        if s.len() > 60 {
            let cut = (0..=60).rev().find(|i| s.is_char_boundary(*i)).unwrap_or(0);
            s.truncate(cut);
            s.push_str("...");
        }
        s
    }
}

pub fn write_sexpr(e: &SExpr, out: &mut String) {
    match e {
        SExpr::Atom(a) => out.push_str(a),
        SExpr::List(items) => {
            out.push('(');
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_sexpr(it, out);
            }
            out.push(')');
        }
    }
}

/// Reads all top-level expressions. `;` starts a comment to end of line.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<Vec<SExpr>> = vec![Vec::new()];
    let mut opens: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'(' => {
                stack.push(Vec::new());
                opens.push(i);
                i += 1;
            }
            b')' => {
                if opens.pop().is_none() {
                    return Err(ParseError::Syntax { pos: i, msg: "unbalanced `)`".into() });
                }
                let list = stack.pop().unwrap();
                stack.last_mut().unwrap().push(SExpr::List(list));
                i += 1;
            }
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !matches!(bytes[i], b'(' | b')' | b';') {
                    i += 1;
                }
                stack.last_mut().unwrap().push(SExpr::Atom(text[start..i].to_string()));
            }
        }
    }
    if let Some(pos) = opens.pop() {
        return Err(ParseError::Syntax { pos, msg: "unclosed `(`".into() });
    }
    Ok(stack.pop().unwrap())
}

pub fn parse_one(text: &str) -> Result<SExpr, ParseError> {
    let mut all = parse_all(text)?;
    if all.len() != 1 {
        return Err(ParseError::Syntax { pos: 0, msg: format!("expected one expression, found {}", all.len()) });
    }
    Ok(all.pop().unwrap())
}

fn form_err(e: &SExpr, msg: &str) -> ParseError {
    ParseError::Form { form: e.brief(), msg: msg.to_string() }
}

pub fn is_var_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Predicate names may also contain `-`.
pub fn is_pred_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_alphabetic()) && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn var_of(e: &SExpr) -> Result<String, ParseError> {
    match e.atom() {
        Some(a) if is_var_name(a) => Ok(a.to_string()),
        _ => Err(form_err(e, "expected a variable name")),
    }
}

pub fn term_from_sexpr(e: &SExpr) -> Result<Term, ParseError> {
    match e {
        SExpr::Atom(a) => {
            if a.bytes().all(|b| b.is_ascii_digit()) {
                let n: num_bigint::BigUint = a.parse().map_err(|_| form_err(e, "bad numeral"))?;
                Ok(Term::lit(&n))
            } else if is_var_name(a) {
                Ok(Term::Var(a.clone()))
            } else {
                Err(form_err(e, "expected a term"))
            }
        }
        SExpr::List(items) => {
            let head = items.first().and_then(SExpr::atom).ok_or_else(|| form_err(e, "expected a term"))?;
            let args = &items[1..];
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(form_err(e, &format!("`{head}` takes {n} argument(s)")))
                }
            };
            match head {
                "s" => {
                    arity(1)?;
                    Ok(Term::succ(term_from_sexpr(&args[0])?))
                }
                "+" | "*" => {
                    arity(2)?;
                    let a = term_from_sexpr(&args[0])?;
                    let b = term_from_sexpr(&args[1])?;
                    Ok(if head == "+" { Term::plus(a, b) } else { Term::times(a, b) })
                }
                "code" => {
                    arity(1)?;
                    let hex = args[0].atom().ok_or_else(|| form_err(e, "expected hex"))?;
                    let s = if hex == "-" { Ok(Str::empty()) } else { Str::from_hex(hex) };
                    Ok(Term::Code(s.map_err(|err| form_err(e, &err.to_string()))?))
                }
                _ => Err(form_err(e, "unknown term constructor")),
            }
        }
    }
}

fn nary(items: &[SExpr], e: &SExpr, join: fn(Formula, Formula) -> Formula) -> Result<Formula, ParseError> {
    if items.len() < 2 {
        return Err(form_err(e, "needs at least two operands"));
    }
    let mut parts = items.iter().map(formula_from_sexpr).collect::<Result<Vec<_>, _>>()?;
    let mut acc = parts.pop().unwrap();
    while let Some(f) = parts.pop() {
        acc = join(f, acc);
    }
    Ok(acc)
}

pub fn formula_from_sexpr(e: &SExpr) -> Result<Formula, ParseError> {
    let SExpr::List(items) = e else { return Err(form_err(e, "expected a formula")) };
    let head = items.first().and_then(SExpr::atom).ok_or_else(|| form_err(e, "expected a formula"))?;
    let args = &items[1..];
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(form_err(e, &format!("`{head}` takes {n} argument(s)")))
        }
    };
    match head {
        "=" | "<=" | "<" => {
            arity(2)?;
            let a = term_from_sexpr(&args[0])?;
            let b = term_from_sexpr(&args[1])?;
            Ok(match head {
                "=" => Formula::eq(a, b),
                "<=" => Formula::le(a, b),
                _ => Formula::lt(a, b),
            })
        }
        "not" => {
            arity(1)?;
            Ok(Formula::not(formula_from_sexpr(&args[0])?))
        }
        "and" => nary(args, e, Formula::and),
        "or" => nary(args, e, Formula::or),
        "->" => {
            arity(2)?;
            Ok(Formula::implies(formula_from_sexpr(&args[0])?, formula_from_sexpr(&args[1])?))
        }
        "forall" | "exists" => {
            arity(2)?;
            let v = var_of(&args[0])?;
            let body = formula_from_sexpr(&args[1])?;
            Ok(if head == "forall" { Formula::forall(&v, body) } else { Formula::exists(&v, body) })
        }
        "pred" => {
            let name = args
                .first()
                .and_then(SExpr::atom)
                .filter(|a| is_pred_name(a))
                .ok_or_else(|| form_err(e, "expected a predicate name"))?;
            let terms = args[1..].iter().map(term_from_sexpr).collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::Pred(name.to_string(), terms))
        }
        kw => match BoundKind::from_keyword(kw) {
            Some(kind) => {
                arity(3)?;
                let v = var_of(&args[0])?;
                let bound = term_from_sexpr(&args[1])?;
                if bound.has_var(&v) {
                    return Err(form_err(e, "bound mentions the bound variable"));
                }
                Ok(Formula::bounded(kind, &v, bound, formula_from_sexpr(&args[2])?))
            }
            None => Err(form_err(e, "unknown formula constructor")),
        },
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    formula_from_sexpr(&parse_one(text)?)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    term_from_sexpr(&parse_one(text)?)
}

pub fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Zero => out.push('0'),
        Term::Num(n) => out.push_str(&n.to_string()),
        Term::Var(v) => out.push_str(v),
        Term::Succ(a) => {
            out.push_str("(s ");
            write_term(a, out);
            out.push(')');
        }
        Term::Plus(a, b) | Term::Times(a, b) => {
            out.push_str(if matches!(t, Term::Plus(..)) { "(+ " } else { "(* " });
            write_term(a, out);
            out.push(' ');
            write_term(b, out);
            out.push(')');
        }
        Term::Code(s) => {
            out.push_str("(code ");
            if s.is_empty() {
                out.push('-');
            } else {
                out.push_str(&s.to_hex());
            }
            out.push(')');
        }
    }
}

pub fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Eq(a, b) | Formula::Le(a, b) => {
            out.push_str(if matches!(f, Formula::Eq(..)) { "(= " } else { "(<= " });
            write_term(a, out);
            out.push(' ');
            write_term(b, out);
            out.push(')');
        }
        Formula::Not(a) => {
            out.push_str("(not ");
            write_formula(a, out);
            out.push(')');
        }
        Formula::And(..) | Formula::Or(..) => {
            let is_and = matches!(f, Formula::And(..));
            out.push_str(if is_and { "(and" } else { "(or" });
            let mut cur = f;
            loop {
                match (cur, is_and) {
                    (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
                        out.push(' ');
                        write_formula(a, out);
                        cur = b;
                    }
                    _ => {
                        out.push(' ');
                        write_formula(cur, out);
                        break;
                    }
                }
            }
            out.push(')');
        }
        Formula::Implies(a, b) => {
            out.push_str("(-> ");
            write_formula(a, out);
            out.push(' ');
            write_formula(b, out);
            out.push(')');
        }
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            out.push_str(if matches!(f, Formula::Forall(..)) { "(forall " } else { "(exists " });
            out.push_str(v);
            out.push(' ');
            write_formula(a, out);
            out.push(')');
        }
        Formula::Bounded { kind, var, bound, body } => {
            out.push('(');
            out.push_str(kind.keyword());
            out.push(' ');
            out.push_str(var);
            out.push(' ');
            write_term(bound, out);
            out.push(' ');
            write_formula(body, out);
            out.push(')');
        }
        Formula::Pred(name, args) => {
            out.push_str("(pred ");
            out.push_str(name);
            for a in args {
                out.push(' ');
                write_term(a, out);
            }
            out.push(')');
        }
    }
}

pub fn term_to_string(t: &Term) -> String {
    let mut s = String::new();
    write_term(t, &mut s);
    s
}

pub fn formula_to_string(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, &mut s);
    s
}
