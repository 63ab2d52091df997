//! Prefix binary codec for formulas, used as the body of formula and
//! sentence codes.
//!
//! Formula nodes carry a 4-bit tag, term nodes a 3-bit tag. Names are
//! length-prefixed ASCII bytes; code abbreviations store two bits per
//! symbol and decimal literals their big-endian bytes.

use crate::encoding::{push_length, BitReader, EncodingError, Str, Sym};

use super::{BoundKind, Formula, Term};

const MAX_DEPTH: usize = 2000;

fn push_tag(out: &mut Vec<bool>, tag: u8, width: u32) {
    out.extend((0..width).rev().map(|i| (tag >> i) & 1 == 1));
}

fn read_tag(r: &mut BitReader<'_>, width: usize) -> Result<u8, EncodingError> {
    Ok(r.bits(width)?.iter().fold(0u8, |acc, b| (acc << 1) | *b as u8))
}

fn push_name(out: &mut Vec<bool>, name: &str) {
    push_length(out, name.len());
    for b in name.bytes() {
        push_tag(out, b, 8);
    }
}

fn read_name(r: &mut BitReader<'_>) -> Result<String, EncodingError> {
    read_checked_name(r, super::sexpr::is_var_name)
}

fn read_checked_name(r: &mut BitReader<'_>, valid: fn(&str) -> bool) -> Result<String, EncodingError> {
    let n = r.length()?;
    let bytes = (0..n).map(|_| read_tag(r, 8)).collect::<Result<Vec<u8>, _>>()?;
    let s = String::from_utf8(bytes).map_err(|_| EncodingError::MalformedCode("name not utf-8".into()))?;
    if !valid(&s) {
        return Err(EncodingError::MalformedCode(format!("bad name `{s}`")));
    }
    Ok(s)
}

fn write_term(t: &Term, out: &mut Vec<bool>) {
    match t {
        Term::Zero => push_tag(out, 0, 3),
        Term::Succ(a) => {
            push_tag(out, 1, 3);
            write_term(a, out);
        }
        Term::Plus(a, b) | Term::Times(a, b) => {
            push_tag(out, if matches!(t, Term::Plus(..)) { 2 } else { 3 }, 3);
            write_term(a, out);
            write_term(b, out);
        }
        Term::Var(v) => {
            push_tag(out, 4, 3);
            push_name(out, v);
        }
        Term::Code(s) => {
            push_tag(out, 5, 3);
            push_length(out, s.len());
            for sym in s.symbols() {
                push_tag(out, sym.index(), 2);
            }
        }
        Term::Num(n) => {
            push_tag(out, 6, 3);
            let bytes = n.to_bytes_be();
            push_length(out, bytes.len());
            for b in bytes {
                push_tag(out, b, 8);
            }
        }
    }
}

fn read_term(r: &mut BitReader<'_>, depth: usize) -> Result<Term, EncodingError> {
    if depth > MAX_DEPTH {
        return Err(EncodingError::MalformedCode("term nested too deeply".into()));
    }
    Ok(match read_tag(r, 3)? {
        0 => Term::Zero,
        1 => Term::succ(read_term(r, depth + 1)?),
        2 => Term::plus(read_term(r, depth + 1)?, read_term(r, depth + 1)?),
        3 => Term::times(read_term(r, depth + 1)?, read_term(r, depth + 1)?),
        4 => Term::Var(read_name(r)?),
        5 => {
            let n = r.length()?;
            let mut syms = Vec::with_capacity(n.min(4096));
            for _ in 0..n {
                let i = read_tag(r, 2)?;
                syms.push(Sym::from_index(i).ok_or_else(|| EncodingError::MalformedCode("bad symbol".into()))?);
            }
            let s = Str::new(syms.clone());
            if s.symbols() != syms.as_slice() {
                return Err(EncodingError::MalformedCode("untrimmed code literal".into()));
            }
            Term::Code(s)
        }
        6 => {
            let len = r.length()?;
            let bytes = (0..len).map(|_| read_tag(r, 8)).collect::<Result<Vec<u8>, _>>()?;
            if bytes.first().map_or(true, |b| *b == 0) {
                return Err(EncodingError::MalformedCode("non-canonical literal".into()));
            }
            Term::Num(num_bigint::BigUint::from_bytes_be(&bytes))
        }
        t => return Err(EncodingError::MalformedCode(format!("unknown term tag {t}"))),
    })
}

pub fn write_formula(f: &Formula, out: &mut Vec<bool>) {
    match f {
        Formula::Eq(a, b) | Formula::Le(a, b) => {
            push_tag(out, if matches!(f, Formula::Eq(..)) { 0 } else { 1 }, 4);
            write_term(a, out);
            write_term(b, out);
        }
        Formula::Not(a) => {
            push_tag(out, 2, 4);
            write_formula(a, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let tag = match f {
                Formula::And(..) => 3,
                Formula::Or(..) => 4,
                _ => 5,
            };
            push_tag(out, tag, 4);
            write_formula(a, out);
            write_formula(b, out);
        }
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            push_tag(out, if matches!(f, Formula::Forall(..)) { 6 } else { 7 }, 4);
            push_name(out, v);
            write_formula(a, out);
        }
        Formula::Bounded { kind, var, bound, body } => {
            let k = BoundKind::ALL.iter().position(|x| x == kind).unwrap() as u8;
            push_tag(out, 8 + k, 4);
            push_name(out, var);
            write_term(bound, out);
            write_formula(body, out);
        }
        Formula::Pred(name, args) => {
            push_tag(out, 12, 4);
            push_name(out, name);
            push_length(out, args.len());
            for a in args {
                write_term(a, out);
            }
        }
    }
}

pub(crate) fn read_formula(r: &mut BitReader<'_>) -> Result<Formula, EncodingError> {
    read_formula_at(r, 0)
}

fn read_formula_at(r: &mut BitReader<'_>, depth: usize) -> Result<Formula, EncodingError> {
    if depth > MAX_DEPTH {
        return Err(EncodingError::MalformedCode("formula nested too deeply".into()));
    }
    let d = depth + 1;
    Ok(match read_tag(r, 4)? {
        0 => Formula::eq(read_term(r, d)?, read_term(r, d)?),
        1 => Formula::le(read_term(r, d)?, read_term(r, d)?),
        2 => Formula::not(read_formula_at(r, d)?),
        3 => Formula::and(read_formula_at(r, d)?, read_formula_at(r, d)?),
        4 => Formula::or(read_formula_at(r, d)?, read_formula_at(r, d)?),
        5 => Formula::implies(read_formula_at(r, d)?, read_formula_at(r, d)?),
        6 => {
            let v = read_name(r)?;
            Formula::forall(&v, read_formula_at(r, d)?)
        }
        7 => {
            let v = read_name(r)?;
            Formula::exists(&v, read_formula_at(r, d)?)
        }
        t @ 8..=11 => {
            let v = read_name(r)?;
            let bound = read_term(r, d)?;
            if bound.has_var(&v) {
                return Err(EncodingError::MalformedCode("bound mentions the bound variable".into()));
            }
            Formula::bounded(BoundKind::ALL[(t - 8) as usize], &v, bound, read_formula_at(r, d)?)
        }
        12 => {
            let name = read_checked_name(r, super::sexpr::is_pred_name)?;
            let n = r.length()?;
            let args = (0..n).map(|_| read_term(r, d)).collect::<Result<Vec<_>, _>>()?;
            Formula::Pred(name, args)
        }
        t => return Err(EncodingError::MalformedCode(format!("unknown formula tag {t}"))),
    })
}
