//! Configuration codes.
//!
//! A configuration is coded in mixed radix, least significant digit first:
//!
//! | digit            | radix      | value                                  |
//! |------------------|------------|----------------------------------------|
//! | state            | 16         | state index, valid below `|Q|`         |
//! | head (3 tapes)   | `3^15`     | `3^(h + W) - 1`, valid for `|h| <= W`  |
//! | tape (3 tapes)   | `3^15`     | base-3 cells at `-W..=W`, low first    |
//!
//! Cells are `0 -> 0`, `1 -> 1`, `b -> 2`, so an all-blank tape is
//! `3^15 - 1`. Storing `3^p - 1` for a head lets formulas read the cell
//! under it by division. Nothing outside the window `-W..=W` is
//! representable. A computation code is `k + 16 * sum_i cfg_i * M^i` with
//! `k` the number of configurations and `M` the configuration bound.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::encoding::Sym;
use crate::turing::{Machine, Tape, TotalState};

/// Half-width of the tape window.
pub const W: i64 = 7;
/// Cells per tape window.
pub const CELLS: u32 = 15;
pub const STATE_RADIX: u64 = 16;
/// Most configurations in a computation code.
pub const KMAX: usize = 8;
pub const K_RADIX: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("machine has {0} states; configuration codes allow at most 16")]
    TooManyStates(usize),
    #[error("head or non-blank cell outside the window -{W}..={W}")]
    OutOfWindow,
    #[error("malformed configuration code: {0}")]
    MalformedCode(String),
}

/// `3^15`, the radix of head and tape digits.
pub fn window_radix() -> BigUint {
    BigUint::from(3u32).pow(CELLS)
}

/// All configuration codes are below this.
pub fn config_bound() -> BigUint {
    BigUint::from(STATE_RADIX) * window_radix().pow(6)
}

pub fn cell_digit(s: Sym) -> u32 {
    match s {
        Sym::Zero => 0,
        Sym::One => 1,
        Sym::Blank => 2,
    }
}

pub fn digit_cell(d: u32) -> Sym {
    match d {
        0 => Sym::Zero,
        1 => Sym::One,
        _ => Sym::Blank,
    }
}

/// Code of a tape window.
pub fn tape_code(t: &Tape) -> Result<BigUint, ConfigError> {
    if t.keys().any(|p| p.abs() > W) {
        return Err(ConfigError::OutOfWindow);
    }
    let mut acc = BigUint::zero();
    for p in (-W..=W).rev() {
        let s = t.get(&p).copied().unwrap_or(Sym::Blank);
        acc = acc * 3u32 + cell_digit(s);
    }
    Ok(acc)
}

pub fn head_code(h: i64) -> Result<BigUint, ConfigError> {
    if h.abs() > W {
        return Err(ConfigError::OutOfWindow);
    }
    Ok(BigUint::from(3u32).pow((h + W) as u32) - 1u32)
}

pub fn config_encode(m: &Machine, s: &TotalState) -> Result<BigUint, ConfigError> {
    if m.states.len() > STATE_RADIX as usize {
        return Err(ConfigError::TooManyStates(m.states.len()));
    }
    let r = window_radix();
    let mut digits = vec![];
    for h in s.heads {
        digits.push(head_code(h)?);
    }
    for t in &s.tapes {
        digits.push(tape_code(t)?);
    }
    let mut acc = BigUint::zero();
    for d in digits.iter().rev() {
        acc = acc * &r + d;
    }
    Ok(acc * STATE_RADIX + s.state)
}

fn malformed(msg: impl Into<String>) -> ConfigError {
    ConfigError::MalformedCode(msg.into())
}

pub fn config_decode(m: &Machine, code: &BigUint) -> Result<TotalState, ConfigError> {
    let (rest, q) = code.div_rem(&BigUint::from(STATE_RADIX));
    let q = q.to_usize().unwrap();
    if q >= m.states.len() {
        return Err(malformed(format!("state digit {q}")));
    }
    let r = window_radix();
    let mut rest = rest;
    let mut digits = Vec::new();
    for _ in 0..6 {
        let (next, d) = rest.div_rem(&r);
        digits.push(d);
        rest = next;
    }
    if !rest.is_zero() {
        return Err(malformed("code exceeds the configuration bound"));
    }
    let mut heads = [0i64; 3];
    for (t, d) in digits[..3].iter().enumerate() {
        let p = d + 1u32;
        heads[t] = (0..CELLS as i64)
            .find(|e| BigUint::from(3u32).pow(*e as u32) == p)
            .ok_or_else(|| malformed(format!("head digit {d} is not 3^p - 1")))?
            - W;
    }
    let mut tapes: [Tape; 3] = Default::default();
    for (t, d) in digits[3..].iter().enumerate() {
        let mut v = d.clone();
        for p in -W..=W {
            let (next, c) = v.div_rem(&BigUint::from(3u32));
            let sym = digit_cell(c.to_u32().unwrap());
            if sym != Sym::Blank {
                tapes[t].insert(p, sym);
            }
            v = next;
        }
    }
    Ok(TotalState { tapes, heads, state: q })
}

/// Code of a sequence of configurations.
pub fn computation_encode(m: &Machine, seq: &[TotalState]) -> Result<BigUint, ConfigError> {
    if seq.is_empty() || seq.len() > KMAX {
        return Err(malformed(format!("sequence length {} outside 1..={KMAX}", seq.len())));
    }
    let bound = config_bound();
    let mut acc = BigUint::zero();
    for s in seq.iter().rev() {
        acc = acc * &bound + config_encode(m, s)?;
    }
    Ok(acc * K_RADIX + seq.len())
}

/// Inverse of [`computation_encode`].
pub fn computation_decode(m: &Machine, code: &BigUint) -> Result<Vec<TotalState>, ConfigError> {
    let (mut rest, k) = code.div_rem(&BigUint::from(K_RADIX));
    let k = k.to_usize().unwrap();
    if k == 0 || k > KMAX {
        return Err(malformed(format!("length digit {k}")));
    }
    let bound = config_bound();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let (next, d) = if i + 1 == k { (BigUint::zero(), rest.clone()) } else { rest.div_rem(&bound) };
        if d >= bound {
            return Err(malformed("configuration exceeds the bound"));
        }
        out.push(config_decode(m, &d)?);
        rest = next;
    }
    Ok(out)
}

/// `3^e`.
pub fn pow3(e: u32) -> BigUint {
    BigUint::from(3u32).pow(e)
}
