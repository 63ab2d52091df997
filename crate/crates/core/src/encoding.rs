//! Typed, injective encodings of domain values into the string universe.
//!
//! The alphabet is `{0, 1, b}`. Every typed code starts with a four-symbol
//! tag header followed by a body over `{0, 1}`. Composite values (pairs,
//! lists, polynomials) frame their components with a self-delimiting length
//! prefix, so every projection is computable on strings alone.
//!
//! Byte layout of the hex rendering used in traces: symbols are packed four
//! per byte, most significant pair first, with `0 -> 00`, `1 -> 01`,
//! `b -> 10`. A partially filled final byte is padded with `11`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::enumerators::Poly;
use crate::logic::proof::Proof;
use crate::logic::{codec, Formula};
use crate::stabilization::Sign;
use crate::turing::Machine;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("malformed code: {0}")]
    MalformedCode(String),
}

fn malformed(msg: impl Into<String>) -> EncodingError {
    EncodingError::MalformedCode(msg.into())
}

/// A tape symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Zero,
    One,
    Blank,
}

impl Sym {
    pub fn to_char(self) -> char {
        match self {
            Sym::Zero => '0',
            Sym::One => '1',
            Sym::Blank => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Sym> {
        match c {
            '0' => Some(Sym::Zero),
            '1' => Some(Sym::One),
            'b' => Some(Sym::Blank),
            _ => None,
        }
    }

    /// Two-bit index used by the formula codec: blank is 0.
    pub fn index(self) -> u8 {
        match self {
            Sym::Blank => 0,
            Sym::Zero => 1,
            Sym::One => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Sym> {
        match i {
            0 => Some(Sym::Blank),
            1 => Some(Sym::Zero),
            2 => Some(Sym::One),
            _ => None,
        }
    }

    fn bit(b: bool) -> Sym {
        if b {
            Sym::One
        } else {
            Sym::Zero
        }
    }
}

/// A finite string over `{0, 1, b}` in canonical trimmed form: it never
/// begins or ends with a blank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Str(Vec<Sym>);

impl Str {
    pub fn empty() -> Str {
        Str(Vec::new())
    }

    /// Builds a string, trimming blanks at both ends.
    pub fn new(mut syms: Vec<Sym>) -> Str {
        while syms.last() == Some(&Sym::Blank) {
            syms.pop();
        }
        let lead = syms.iter().take_while(|s| **s == Sym::Blank).count();
        syms.drain(..lead);
        Str(syms)
    }

    pub fn parse(text: &str) -> Option<Str> {
        text.chars()
            .map(Sym::from_char)
            .collect::<Option<Vec<_>>>()
            .map(Str::new)
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Hex dump, four symbols per byte.
    pub fn to_hex(&self) -> String {
        let mut bytes = Vec::with_capacity(self.0.len() / 4 + 1);
        for chunk in self.0.chunks(4) {
            let mut byte = 0u8;
            for i in 0..4 {
                let bits = match chunk.get(i) {
                    Some(Sym::Zero) => 0b00,
                    Some(Sym::One) => 0b01,
                    Some(Sym::Blank) => 0b10,
                    None => 0b11,
                };
                byte = (byte << 2) | bits;
            }
            bytes.push(byte);
        }
        hex::encode(bytes)
    }

    pub fn from_hex(text: &str) -> Result<Str, EncodingError> {
        let bytes = hex::decode(text.trim()).map_err(|e| malformed(format!("bad hex: {e}")))?;
        let mut syms = Vec::with_capacity(bytes.len() * 4);
        let mut ended = false;
        for byte in bytes {
            if ended {
                return Err(malformed("data after padding"));
            }
            for i in (0..4).rev() {
                let sym = match (byte >> (2 * i)) & 0b11 {
                    0b00 => Sym::Zero,
                    0b01 => Sym::One,
                    0b10 => Sym::Blank,
                    _ => {
                        ended = true;
                        continue;
                    }
                };
                if ended {
                    return Err(malformed("symbol after padding"));
                }
                syms.push(sym);
            }
        }
        let s = Str(syms);
        if Str::new(s.0.clone()) != s {
            return Err(malformed("untrimmed string"));
        }
        Ok(s)
    }

    /// The bijection `Strings -> N`: bijective base 3 with digits
    /// `0 -> 1`, `1 -> 2`, `b -> 3`, most significant symbol first.
    ///
    /// Only trimmed strings are in the image of [`Str`], so this is injective
    /// on `Str`; [`Str::from_number`] inverts it on numbers whose digits
    /// describe a trimmed string.
    pub fn to_number(&self) -> BigUint {
        let digits: Vec<u8> = self.0.iter().map(|s| digit3(*s) as u8 - 1).collect();
        let shifted = radix3_be(&digits, &mut HashMap::new());
        shifted + (BigUint::from(3u32).pow(self.0.len() as u32) - 1u32) / 2u32
    }

    pub fn from_number(n: &BigUint) -> Option<Str> {
        // Strings of length L take the numbers (3^L - 1)/2 ..= (3^(L+1) - 3)/2,
        // and within one length the digits are plain base 3 shifted by one.
        let m = n * 2u32 + 1u32;
        let three = BigUint::from(3u32);
        let mut len = (m.bits().saturating_sub(1) as f64 / 3f64.log2()) as u32;
        while three.pow(len) > m {
            len -= 1;
        }
        while three.pow(len + 1) <= m {
            len += 1;
        }
        let rest = n - (three.pow(len) - 1u32) / 2u32;
        let digits = if rest.is_zero() { Vec::new() } else { rest.to_radix_be(3) };
        let mut syms = vec![Sym::Zero; len as usize - digits.len()];
        syms.extend(digits.iter().map(|d| match d {
            0 => Sym::Zero,
            1 => Sym::One,
            _ => Sym::Blank,
        }));
        let s = Str(syms);
        (Str::new(s.0.clone()) == s).then_some(s)
    }

    fn push_bits(&mut self, bits: &[bool]) {
        self.0.extend(bits.iter().map(|b| Sym::bit(*b)));
    }
}

/// Base-3 digits to a number, splitting in halves so that long inputs use
/// the fast big multiplications. `pows` caches `3^len` per split length.
fn radix3_be(digits: &[u8], pows: &mut HashMap<usize, BigUint>) -> BigUint {
    if digits.len() <= 4096 {
        return BigUint::from_radix_be(digits, 3).unwrap_or_default();
    }
    let lo_len = 1usize << (usize::BITS - 1 - (digits.len() - 1).leading_zeros());
    let (hi, lo) = digits.split_at(digits.len() - lo_len);
    let scale = pows.entry(lo_len).or_insert_with(|| BigUint::from(3u32).pow(lo_len as u32)).clone();
    radix3_be(hi, pows) * scale + radix3_be(lo, pows)
}

fn digit3(s: Sym) -> u64 {
    match s {
        Sym::Zero => 1,
        Sym::One => 2,
        Sym::Blank => 3,
    }
}

impl fmt::Display for Str {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Str {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Str({self})")
    }
}

/// Type tags. `Str` is the tag for a universal string carried inside a
/// composite value; at top level every string is a member of the universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeTag {
    Nat,
    Int,
    Pair,
    List,
    Sign,
    Poly,
    Formula,
    Sentence,
    Machine,
    Proof,
    Str,
}

impl TypeTag {
    pub const ALL: [TypeTag; 11] = [
        TypeTag::Nat,
        TypeTag::Int,
        TypeTag::Pair,
        TypeTag::List,
        TypeTag::Sign,
        TypeTag::Poly,
        TypeTag::Formula,
        TypeTag::Sentence,
        TypeTag::Machine,
        TypeTag::Proof,
        TypeTag::Str,
    ];

    fn header(self) -> u8 {
        match self {
            TypeTag::Nat => 1,
            TypeTag::Int => 2,
            TypeTag::Pair => 3,
            TypeTag::List => 4,
            TypeTag::Sign => 5,
            TypeTag::Poly => 6,
            TypeTag::Formula => 7,
            TypeTag::Sentence => 8,
            TypeTag::Machine => 9,
            TypeTag::Proof => 10,
            TypeTag::Str => 11,
        }
    }

    fn from_header(h: u8) -> Option<TypeTag> {
        TypeTag::ALL.iter().copied().find(|t| t.header() == h)
    }
}

const HEADER_LEN: usize = 4;

/// A code together with its type tag. `payload` is the complete string in
/// the universe, header included.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedCode {
    pub tag: TypeTag,
    pub payload: Str,
}

/// Domain values that have a typed code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Nat(u64),
    Int(i64),
    Pair(Box<Value>, Box<Value>),
    List(Vec<Value>),
    Sign(Sign),
    Poly(Poly),
    Formula(Formula),
    Sentence(Formula),
    Machine(Machine),
    Proof(Proof),
    Str(Str),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn tag(&self) -> TypeTag {
        match self {
            Value::Nat(_) => TypeTag::Nat,
            Value::Int(_) => TypeTag::Int,
            Value::Pair(..) => TypeTag::Pair,
            Value::List(_) => TypeTag::List,
            Value::Sign(_) => TypeTag::Sign,
            Value::Poly(_) => TypeTag::Poly,
            Value::Formula(_) => TypeTag::Formula,
            Value::Sentence(_) => TypeTag::Sentence,
            Value::Machine(_) => TypeTag::Machine,
            Value::Proof(_) => TypeTag::Proof,
            Value::Str(_) => TypeTag::Str,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Pair(a, b) => write!(f, "<{a}, {b}>"),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Sign(s) => write!(f, "{s}"),
            Value::Poly(p) => write!(f, "{p}"),
            Value::Formula(x) | Value::Sentence(x) => write!(f, "{x}"),
            Value::Machine(m) => write!(f, "machine[{} states]", m.states.len()),
            Value::Proof(p) => write!(f, "proof[{} lines]", p.lines.len()),
            Value::Str(s) => write!(f, "\"{s}\""),
        }
    }
}

/// Binary representation of `n`, most significant bit first; `0` is `[false]`.
pub(crate) fn nat_bits(n: u64) -> Vec<bool> {
    if n == 0 {
        return vec![false];
    }
    let width = 64 - n.leading_zeros();
    (0..width).rev().map(|i| (n >> i) & 1 == 1).collect()
}

/// Self-delimiting length prefix: for `len`, let `k` be the bit width of
/// `len + 1`; emit `k - 1` ones, a zero, then the `k` bits of `len + 1`.
pub(crate) fn push_length(out: &mut Vec<bool>, len: usize) {
    let bits = nat_bits(len as u64 + 1);
    out.extend(std::iter::repeat(true).take(bits.len() - 1));
    out.push(false);
    out.extend(bits);
}

/// Cursor over a string of bits; blanks are rejected on read.
pub(crate) struct BitReader<'a> {
    syms: &'a [Sym],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub(crate) fn new(syms: &'a [Sym]) -> Self {
        BitReader { syms, pos: 0 }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos == self.syms.len()
    }

    pub(crate) fn bit(&mut self) -> Result<bool, EncodingError> {
        let s = self
            .syms
            .get(self.pos)
            .ok_or_else(|| malformed("unexpected end of code"))?;
        self.pos += 1;
        match s {
            Sym::Zero => Ok(false),
            Sym::One => Ok(true),
            Sym::Blank => Err(malformed("blank inside code")),
        }
    }

    pub(crate) fn bits(&mut self, n: usize) -> Result<Vec<bool>, EncodingError> {
        (0..n).map(|_| self.bit()).collect()
    }

    pub(crate) fn length(&mut self) -> Result<usize, EncodingError> {
        let mut ones = 0usize;
        while self.bit()? {
            ones += 1;
            if ones > 62 {
                return Err(malformed("length prefix too long"));
            }
        }
        let bits = self.bits(ones + 1)?;
        if !bits[0] {
            return Err(malformed("non-canonical length prefix"));
        }
        let v = bits.iter().fold(0u64, |acc, b| (acc << 1) | *b as u64);
        Ok((v - 1) as usize)
    }

    /// Reads a length-prefixed frame and returns its contents.
    pub(crate) fn frame(&mut self) -> Result<&'a [Sym], EncodingError> {
        let len = self.length()?;
        if self.pos + len > self.syms.len() {
            return Err(malformed("frame overruns code"));
        }
        let out = &self.syms[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }
}

fn push_frame(out: &mut Vec<bool>, code: &Str) -> Result<(), EncodingError> {
    push_length(out, code.len());
    for s in code.symbols() {
        match s {
            Sym::Zero => out.push(false),
            Sym::One => out.push(true),
            Sym::Blank => return Err(malformed("blank inside framed code")),
        }
    }
    Ok(())
}

fn with_header(tag: TypeTag, body: &[bool]) -> TypedCode {
    let h = tag.header();
    let mut bits: Vec<bool> = (0..HEADER_LEN).rev().map(|i| (h >> i) & 1 == 1).collect();
    bits.extend_from_slice(body);
    let mut payload = Str::empty();
    payload.push_bits(&bits);
    TypedCode { tag, payload }
}

fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
        .collect()
}

fn bits_to_bytes(r: &mut BitReader<'_>) -> Result<Vec<u8>, EncodingError> {
    let rest = r.syms.len() - r.pos;
    if rest % 8 != 0 {
        return Err(malformed("byte body not a multiple of 8 bits"));
    }
    (0..rest / 8)
        .map(|_| Ok(r.bits(8)?.iter().fold(0u8, |acc, b| (acc << 1) | *b as u8)))
        .collect()
}

fn int_body(v: i64, out: &mut Vec<bool>) {
    out.push(v < 0);
    out.extend(nat_bits(v.unsigned_abs()));
}

/// Encodes a value. Total on every supported value, except that strings
/// carried inside composites must be blank-free.
pub fn encode(value: &Value) -> TypedCode {
    try_encode(value).expect("value is encodable")
}

pub fn try_encode(value: &Value) -> Result<TypedCode, EncodingError> {
    let mut body = Vec::new();
    match value {
        Value::Nat(n) => body.extend(nat_bits(*n)),
        Value::Int(v) => int_body(*v, &mut body),
        Value::Sign(s) => body.push(*s == Sign::Plus),
        Value::Pair(a, b) => {
            push_frame(&mut body, &try_encode(a)?.payload)?;
            push_frame(&mut body, &try_encode(b)?.payload)?;
        }
        Value::List(items) => {
            push_length(&mut body, items.len());
            for item in items {
                push_frame(&mut body, &try_encode(item)?.payload)?;
            }
        }
        Value::Poly(p) => {
            push_length(&mut body, p.coeffs().len());
            for c in p.coeffs() {
                let mut cb = Vec::new();
                int_body(*c, &mut cb);
                push_length(&mut body, cb.len());
                body.extend(cb);
            }
        }
        Value::Sentence(f) if !f.is_closed() => return Err(malformed("sentence has free variables")),
        Value::Formula(f) | Value::Sentence(f) => codec::write_formula(f, &mut body),
        Value::Machine(m) => body.extend(bytes_to_bits(m.to_spec().as_bytes())),
        Value::Proof(p) => body.extend(bytes_to_bits(p.to_text().as_bytes())),
        Value::Str(s) => {
            for sym in s.symbols() {
                match sym {
                    Sym::Zero => body.push(false),
                    Sym::One => body.push(true),
                    Sym::Blank => return Err(malformed("blank in embedded string")),
                }
            }
        }
    }
    Ok(with_header(value.tag(), &body))
}

fn read_nat(bits: Vec<bool>) -> Result<u64, EncodingError> {
    if bits.is_empty() || (bits.len() > 1 && !bits[0]) || bits.len() > 64 {
        return Err(malformed("non-canonical natural"));
    }
    Ok(bits.iter().fold(0u64, |acc, b| (acc << 1) | *b as u64))
}

fn read_int(r: &mut BitReader<'_>, nbits: usize) -> Result<i64, EncodingError> {
    if nbits < 2 {
        return Err(malformed("integer too short"));
    }
    let neg = r.bit()?;
    let bits = r.bits(nbits - 1)?;
    let mag = read_nat(bits)?;
    if neg && mag == 0 {
        return Err(malformed("negative zero"));
    }
    if neg {
        if mag > i64::MAX as u64 + 1 {
            return Err(malformed("integer out of range"));
        }
        Ok((mag as i128).wrapping_neg() as i64)
    } else {
        i64::try_from(mag).map_err(|_| malformed("integer out of range"))
    }
}

fn split_header(s: &Str) -> Result<(TypeTag, &[Sym]), EncodingError> {
    let syms = s.symbols();
    if syms.len() < HEADER_LEN {
        return Err(malformed("missing type header"));
    }
    let mut r = BitReader::new(&syms[..HEADER_LEN]);
    let h = r.bits(HEADER_LEN)?.iter().fold(0u8, |acc, b| (acc << 1) | *b as u8);
    let tag = TypeTag::from_header(h).ok_or_else(|| malformed("unknown type header"))?;
    Ok((tag, &syms[HEADER_LEN..]))
}

/// Decodes any typed code, reading the tag from its header.
pub fn decode_str(s: &Str) -> Result<Value, EncodingError> {
    let (tag, body) = split_header(s)?;
    let mut r = BitReader::new(body);
    let value = match tag {
        TypeTag::Nat => {
            let bits = r.bits(body.len())?;
            Value::Nat(read_nat(bits)?)
        }
        TypeTag::Int => Value::Int(read_int(&mut r, body.len())?),
        TypeTag::Sign => {
            if body.len() != 1 {
                return Err(malformed("sign body must be one bit"));
            }
            Value::Sign(if r.bit()? { Sign::Plus } else { Sign::Minus })
        }
        TypeTag::Pair => {
            let a = decode_str(&Str(r.frame()?.to_vec()))?;
            let b = decode_str(&Str(r.frame()?.to_vec()))?;
            Value::pair(a, b)
        }
        TypeTag::List => {
            let n = r.length()?;
            let mut items = Vec::new();
            for _ in 0..n {
                items.push(decode_str(&Str(r.frame()?.to_vec()))?);
            }
            Value::List(items)
        }
        TypeTag::Poly => {
            let n = r.length()?;
            let mut coeffs = Vec::with_capacity(n.min(1024));
            for _ in 0..n {
                let len = r.length()?;
                coeffs.push(read_int(&mut r, len)?);
            }
            let p = Poly::new(coeffs.clone());
            if p.coeffs() != coeffs.as_slice() || p.is_zero() {
                return Err(malformed("non-canonical polynomial"));
            }
            Value::Poly(p)
        }
        TypeTag::Formula | TypeTag::Sentence => {
            let f = codec::read_formula(&mut r)?;
            if tag == TypeTag::Sentence && !f.is_closed() {
                return Err(malformed("sentence has free variables"));
            }
            if tag == TypeTag::Sentence {
                Value::Sentence(f)
            } else {
                Value::Formula(f)
            }
        }
        TypeTag::Machine => {
            let bytes = bits_to_bytes(&mut r)?;
            let text = String::from_utf8(bytes).map_err(|_| malformed("machine text not utf-8"))?;
            let m = Machine::parse(&text).map_err(|e| malformed(format!("machine: {e}")))?;
            if m.to_spec() != text {
                return Err(malformed("machine text not canonical"));
            }
            Value::Machine(m)
        }
        TypeTag::Proof => {
            let bytes = bits_to_bytes(&mut r)?;
            let text = String::from_utf8(bytes).map_err(|_| malformed("proof text not utf-8"))?;
            let p = Proof::parse(&text).map_err(|e| malformed(format!("proof: {e}")))?;
            if p.to_text() != text {
                return Err(malformed("proof text not canonical"));
            }
            Value::Proof(p)
        }
        TypeTag::Str => {
            let bits = r.bits(body.len())?;
            let mut s = Str::empty();
            s.push_bits(&bits);
            Value::Str(s)
        }
    };
    if !r.at_end() {
        return Err(malformed("trailing symbols after code"));
    }
    Ok(value)
}

/// Decodes `c`, which must carry the tag its header declares.
pub fn decode(c: &TypedCode) -> Result<Value, EncodingError> {
    let v = decode_str(&c.payload)?;
    if v.tag() != c.tag {
        return Err(malformed("tag mismatch"));
    }
    Ok(v)
}

pub fn is_member(tag: TypeTag, s: &Str) -> bool {
    matches!(decode_str(s), Ok(v) if v.tag() == tag)
}

/// Membership in the universal type: every string.
pub fn is_universal_member(_s: &Str) -> bool {
    true
}

/// First projection of a pair code, computed on the string.
pub fn pr1(c: &TypedCode) -> Result<TypedCode, EncodingError> {
    project(c, 0)
}

pub fn pr2(c: &TypedCode) -> Result<TypedCode, EncodingError> {
    project(c, 1)
}

fn project(c: &TypedCode, which: usize) -> Result<TypedCode, EncodingError> {
    let (tag, body) = split_header(&c.payload)?;
    if tag != TypeTag::Pair {
        return Err(malformed("not a pair code"));
    }
    let mut r = BitReader::new(body);
    let first = r.frame()?;
    let second = r.frame()?;
    if !r.at_end() {
        return Err(malformed("trailing symbols after pair"));
    }
    let s = Str(if which == 0 { first } else { second }.to_vec());
    let (ctag, _) = split_header(&s)?;
    Ok(TypedCode { tag: ctag, payload: s })
}

/// The successor morphism on natural-number codes: binary increment of the
/// body, without decoding.
pub fn nat_succ_code(c: &TypedCode) -> Result<TypedCode, EncodingError> {
    if !is_member(TypeTag::Nat, &c.payload) {
        return Err(malformed("not a natural-number code"));
    }
    let mut syms = c.payload.symbols().to_vec();
    let mut i = syms.len();
    loop {
        if i == HEADER_LEN {
            syms.insert(HEADER_LEN, Sym::One);
            break;
        }
        i -= 1;
        if syms[i] == Sym::One {
            syms[i] = Sym::Zero;
        } else {
            syms[i] = Sym::One;
            break;
        }
    }
    Ok(TypedCode { tag: TypeTag::Nat, payload: Str(syms) })
}

/// Negation on integer codes: flips the sign bit except at zero.
pub fn int_neg_code(c: &TypedCode) -> Result<TypedCode, EncodingError> {
    if !is_member(TypeTag::Int, &c.payload) {
        return Err(malformed("not an integer code"));
    }
    let mut syms = c.payload.symbols().to_vec();
    let is_zero = syms[HEADER_LEN + 1..] == [Sym::Zero];
    if !is_zero {
        syms[HEADER_LEN] = if syms[HEADER_LEN] == Sym::One { Sym::Zero } else { Sym::One };
    }
    Ok(TypedCode { tag: TypeTag::Int, payload: Str(syms) })
}
