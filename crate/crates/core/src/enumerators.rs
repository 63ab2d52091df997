//! Zig-zag streams: rootless univariate integer polynomials and
//! non-halting machine/input pairs, with their test oracles.
//!
//! Both streams are organized in rounds: round `r` asserts something about
//! each of the first `r + 1` items, so round `r` starts at stream index
//! `r (r + 1) / 2`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::encoding::{encode, Str, Value};
use crate::stabilization::{Assertion, AssertionStream, Sign, Traceable};
use crate::turing::{run, Machine, RunOutcome};

/// Dense univariate polynomial, constant term first, without trailing
/// zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly(Vec<i64>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial has every integer as a root")]
    ZeroPolynomial,
    #[error("bad polynomial text: {0}")]
    Parse(String),
}

impl Poly {
    pub fn new(mut coeffs: Vec<i64>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Enumeration size: degree plus largest absolute coefficient.
    pub fn size(&self) -> u64 {
        self.degree().map_or(0, |d| d as u64 + self.max_abs())
    }

    /// Parses `[a0, a1, ..., ak]`.
    pub fn parse(text: &str) -> Result<Poly, PolyError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| PolyError::Parse(format!("expected [a0, a1, ...], got `{t}`")))?;
        if inner.trim().is_empty() {
            return Ok(Poly(Vec::new()));
        }
        let coeffs = inner
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|e| PolyError::Parse(format!("`{}`: {e}", c.trim()))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Traceable for Poly {
    fn trace_code(&self) -> Str {
        encode(&Value::Poly(self.clone())).payload
    }
    fn human(&self) -> String {
        self.to_string()
    }
}

/// Horner evaluation in exact arithmetic.
pub fn eval_poly(p: &Poly, n: &BigInt) -> BigInt {
    p.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * n + BigInt::from(*c))
}

/// `0, 1, -1, 2, -2, ...`
pub fn int_enum(m: u64) -> i64 {
    if m % 2 == 1 {
        (m / 2 + 1) as i64
    } else {
        -((m / 2) as i64)
    }
}

/// Inverse of [`int_enum`].
pub fn int_rank(z: i64) -> u64 {
    if z > 0 {
        2 * z as u64 - 1
    } else {
        2 * z.unsigned_abs()
    }
}

fn rank_key(p: &[i64]) -> Vec<u64> {
    p.iter().map(|c| int_rank(*c)).collect()
}

/// All canonical polynomials of one enumeration size, in enumeration order.
fn size_class(s: u64) -> Vec<Poly> {
    let mut out = Vec::new();
    for d in 0..s {
        let m = (s - d) as i64;
        let len = d as usize + 1;
        let mut v = vec![-m; len];
        loop {
            if v[len - 1] != 0 && v.iter().any(|c| c.abs() == m) {
                out.push(Poly(v.clone()));
            }
            let mut i = 0;
            while i < len && v[i] == m {
                v[i] = -m;
                i += 1;
            }
            if i == len {
                break;
            }
            v[i] += 1;
        }
    }
    out.sort_by_cached_key(|p| rank_key(&p.0));
    out
}

struct PolyTable {
    classes: Vec<Vec<Poly>>,
    /// `offsets[s]` is the index of the first polynomial of size `s + 1`.
    offsets: Vec<u64>,
    positions: Vec<HashMap<Poly, u64>>,
}

impl PolyTable {
    fn ensure_size(&mut self, s: u64) {
        while (self.classes.len() as u64) < s {
            let next = self.classes.len() as u64 + 1;
            let class = size_class(next);
            let start = self.offsets.last().copied().unwrap_or(0)
                + self.classes.last().map_or(0, |c| c.len() as u64);
            self.offsets.push(start);
            self.positions.push(class.iter().enumerate().map(|(i, p)| (p.clone(), i as u64)).collect());
            self.classes.push(class);
        }
    }

    fn total(&self) -> u64 {
        self.offsets.last().copied().unwrap_or(0) + self.classes.last().map_or(0, |c| c.len() as u64)
    }
}

fn table() -> &'static Mutex<PolyTable> {
    static TABLE: OnceLock<Mutex<PolyTable>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(PolyTable { classes: Vec::new(), offsets: Vec::new(), positions: Vec::new() }))
}

/// The `m`-th nonzero polynomial, ordered by size and then
/// lexicographically by the [`int_rank`]s of the coefficients (constant
/// term first).
pub fn poly_enum(m: u64) -> Poly {
    let mut t = table().lock().unwrap();
    let mut s = 1;
    loop {
        t.ensure_size(s);
        if m < t.total() {
            break;
        }
        s += 1;
    }
    let class = t.offsets.partition_point(|o| *o <= m) - 1;
    t.classes[class][(m - t.offsets[class]) as usize].clone()
}

/// Inverse of [`poly_enum`].
pub fn poly_index(p: &Poly) -> Result<u64, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let s = p.size();
    let mut t = table().lock().unwrap();
    t.ensure_size(s);
    let i = (s - 1) as usize;
    Ok(t.offsets[i] + t.positions[i][p])
}

/// `1 + max |a_i| / |a_lead|`, rounded down: every integer root has
/// absolute value at most this.
pub fn cauchy_bound(p: &Poly) -> Result<u64, PolyError> {
    let lead = p.0.last().ok_or(PolyError::ZeroPolynomial)?.unsigned_abs();
    let rest = p.0[..p.0.len() - 1].iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    Ok(1 + rest / lead)
}

/// Scans every integer within the Cauchy bound.
pub fn rootless_oracle(p: &Poly) -> Result<bool, PolyError> {
    let c = cauchy_bound(p)? as i64;
    Ok((-c..=c).all(|z| !eval_poly(p, &BigInt::from(z)).is_zero()))
}

/// Least [`int_rank`] of an integer root, found among the divisors of the
/// lowest nonzero coefficient.
pub fn first_root_rank(p: &Poly) -> Result<Option<u64>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if p.0[0] == 0 {
        return Ok(Some(0));
    }
    let a = p.0[0].unsigned_abs();
    let mut best: Option<u64> = None;
    let mut d = 1u64;
    while d * d <= a {
        if a % d == 0 {
            for q in [d, a / d] {
                for z in [q as i64, -(q as i64)] {
                    if eval_poly(p, &BigInt::from(z)).is_zero() {
                        let r = int_rank(z);
                        best = Some(best.map_or(r, |b| b.min(r)));
                    }
                }
            }
        }
        d += 1;
    }
    Ok(best)
}

pub fn round_start(r: u64) -> u64 {
    r * (r + 1) / 2
}

/// Index of the last assertion of round `r`.
pub fn round_end(r: u64) -> u64 {
    round_start(r + 1) - 1
}

/// `(round, position)` of stream index `n`.
pub fn round_of(n: u64) -> (u64, u64) {
    let mut r = (((8 * n as u128 + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    while round_start(r + 1) <= n {
        r += 1;
    }
    while round_start(r) > n {
        r -= 1;
    }
    (r, n - round_start(r))
}

/// Last occurrence of item position `pos` (appearing at position `pos` of
/// every round `>= pos`) at or before stream index `n`, as `(index, round)`.
fn last_slot(pos: u64, n: u64) -> Option<(u64, u64)> {
    let (r, p) = round_of(n);
    if pos <= p {
        Some((round_start(r) + pos, r))
    } else if r >= 1 && pos <= r - 1 {
        Some((round_start(r - 1) + pos, r - 1))
    } else {
        None
    }
}

/// Round `n` asserts `(p, +)` for each of `poly_enum(0..=n)` unless one of
/// `int_enum(0..=n)` is a root of `p`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiophStream;

pub fn dioph_stream() -> DiophStream {
    DiophStream
}

impl DiophStream {
    /// The round from which `p` is present and every integer within its
    /// Cauchy bound has been tried.
    pub fn sufficient_round(p: &Poly) -> Result<u64, PolyError> {
        Ok(poly_index(p)?.max(2 * cauchy_bound(p)?))
    }

    fn sign_in_round(p: &Poly, r: u64) -> Sign {
        let root = first_root_rank(p).expect("stream polynomials are nonzero");
        Sign::from_bool(root.map_or(true, |k| k > r))
    }
}

impl AssertionStream for DiophStream {
    type Item = Poly;

    fn at(&self, n: u64) -> Assertion<Poly> {
        let (r, pos) = round_of(n);
        let p = poly_enum(pos);
        let sign = DiophStream::sign_in_round(&p, r);
        Assertion { item: p, sign }
    }

    fn last_occurrence(&self, b: &Poly, n: u64) -> Option<(u64, Sign)> {
        let pos = poly_index(b).ok()?;
        let (idx, r) = last_slot(pos, n)?;
        Some((idx, DiophStream::sign_in_round(b, r)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MachineInputPair {
    pub label: String,
    pub machine: Arc<Machine>,
    pub argument: u64,
}

impl MachineInputPair {
    pub fn new(label: &str, machine: Machine, argument: u64) -> Self {
        MachineInputPair { label: label.to_string(), machine: Arc::new(machine), argument }
    }

    /// The input tape: the natural-number code of the argument.
    pub fn input(&self) -> Str {
        encode(&Value::Nat(self.argument)).payload
    }
}

impl Traceable for MachineInputPair {
    fn trace_code(&self) -> Str {
        let v = Value::pair(Value::Machine((*self.machine).clone()), Value::Nat(self.argument));
        encode(&v).payload
    }
    fn human(&self) -> String {
        format!("{}({})", self.label, self.argument)
    }
}

/// Round `n` asserts `(pair, +)` for each of `corpus(0..=n)` that has not
/// halted within `n` steps. `corpus(i)` cycles through the given list.
pub struct HaltingStream {
    corpus: Vec<MachineInputPair>,
    /// Per corpus entry: steps simulated so far and the halting step if
    /// found.
    progress: Mutex<Vec<(u64, Option<u64>)>>,
}

pub fn halting_stream(corpus: Vec<MachineInputPair>) -> HaltingStream {
    assert!(!corpus.is_empty(), "corpus must be nonempty");
    let progress = Mutex::new(vec![(0, None); corpus.len()]);
    HaltingStream { corpus, progress }
}

impl HaltingStream {
    pub fn corpus(&self) -> &[MachineInputPair] {
        &self.corpus
    }

    fn entry(&self, i: u64) -> usize {
        (i % self.corpus.len() as u64) as usize
    }

    /// Whether entry `j` halts within `steps` steps.
    pub fn halted_within(&self, j: usize, steps: u64) -> bool {
        let known = self.progress.lock().unwrap()[j];
        if let Some(h) = known.1 {
            return h <= steps;
        }
        if steps <= known.0 {
            return false;
        }
        let pair = &self.corpus[j];
        let budget = steps.max(2 * known.0);
        let halt = match run(&pair.machine, &pair.input(), budget) {
            RunOutcome::OutOfBudget(_) => None,
            o => o.halted_within(),
        };
        self.progress.lock().unwrap()[j] = (budget, halt);
        halt.is_some_and(|h| h <= steps)
    }
}

impl AssertionStream for HaltingStream {
    type Item = MachineInputPair;

    fn at(&self, n: u64) -> Assertion<MachineInputPair> {
        let (r, pos) = round_of(n);
        let j = self.entry(pos);
        Assertion { item: self.corpus[j].clone(), sign: Sign::from_bool(!self.halted_within(j, r)) }
    }

    fn last_occurrence(&self, b: &MachineInputPair, n: u64) -> Option<(u64, Sign)> {
        let len = self.corpus.len() as u64;
        let (r, p) = round_of(n);
        // Latest corpus position <= limit holding `b`.
        let latest = |limit: u64| {
            self.corpus
                .iter()
                .enumerate()
                .filter(|(_, c)| *c == b)
                .filter_map(|(j, _)| {
                    let j = j as u64;
                    (j <= limit).then(|| j + (limit - j) / len * len)
                })
                .max()
        };
        let (idx, round, j) = match latest(p) {
            Some(pos) => (round_start(r) + pos, r, pos),
            None if r >= 1 => {
                let pos = latest(r - 1)?;
                (round_start(r - 1) + pos, r - 1, pos)
            }
            None => return None,
        };
        Some((idx, Sign::from_bool(!self.halted_within(self.entry(j), round))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines;
    use crate::stabilization::is_n_stable;
    use proptest::prelude::*;

    #[test]
    fn horner() {
        let p = Poly::new(vec![1, -5, 0, 2]);
        assert_eq!(eval_poly(&p, &BigInt::from(-2)), BigInt::from(-5));
        assert_eq!(eval_poly(&Poly::new(vec![1, 0, 1]), &BigInt::from(0)), BigInt::from(1));
        assert_eq!(eval_poly(&Poly::new(vec![-3, 1]), &BigInt::from(3)), BigInt::from(0));
    }

    #[test]
    fn integer_enumeration() {
        assert_eq!(int_enum(0), 0);
        assert_eq!(int_enum(5), 3);
        let mut seen = std::collections::HashSet::new();
        for m in 0..=10_000 {
            assert!(seen.insert(int_enum(m)));
            assert_eq!(int_rank(int_enum(m)), m);
        }
    }

    #[test]
    fn polynomial_enumeration_starts_with_one() {
        assert_eq!(poly_enum(0), Poly::new(vec![1]));
        assert_eq!(poly_enum(1), Poly::new(vec![-1]));
    }

    #[test]
    fn polynomial_enumeration_is_injective() {
        let mut seen = std::collections::HashSet::new();
        for m in 0..=10_000 {
            let p = poly_enum(m);
            assert!(!p.is_zero());
            assert_eq!(poly_index(&p).unwrap(), m);
            assert!(seen.insert(p));
        }
    }

    #[test]
    fn small_polynomials_come_first() {
        // Every polynomial of degree <= 2 with coefficients in [-2, 2] has size
        // at most 4; all of them precede the first polynomial of size 5.
        let mut count = 0u64;
        let mut max_index = 0;
        for a in -2..=2 {
            for b in -2..=2 {
                for c in -2..=2 {
                    let p = Poly::new(vec![a, b, c]);
                    if p.is_zero() {
                        continue;
                    }
                    count += 1;
                    max_index = max_index.max(poly_index(&p).unwrap());
                }
            }
        }
        assert_eq!(count, 124);
        let first_size_5 = (0..).find(|m| poly_enum(*m).size() == 5).unwrap();
        assert!(max_index < first_size_5);
    }

    #[test]
    fn oracle_examples() {
        assert!(rootless_oracle(&Poly::new(vec![1, 0, 1])).unwrap());
        assert!(!rootless_oracle(&Poly::new(vec![-3, 1])).unwrap());
        assert!(rootless_oracle(&Poly::new(vec![1, -5, 6])).unwrap());
        assert_eq!(rootless_oracle(&Poly::new(vec![0])), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn rounds() {
        for n in 0..5000 {
            let (r, p) = round_of(n);
            assert!(p <= r);
            assert_eq!(round_start(r) + p, n);
        }
        assert_eq!(round_end(0), 0);
        assert_eq!(round_end(2), 5);
    }

    #[test]
    fn dioph_examples() {
        let m = dioph_stream();
        let sq = Poly::new(vec![1, 0, 1]);
        let shifted = Poly::new(vec![-3, 1]);
        let si = poly_index(&sq).unwrap();
        for r in si..si + 30 {
            assert!(is_n_stable(&m, &sq, round_end(r)));
        }
        let xi = poly_index(&shifted).unwrap();
        for r in xi.max(5)..xi.max(5) + 20 {
            assert_eq!(m.last_occurrence(&shifted, round_end(r)).unwrap().1, Sign::Minus);
        }
    }

    #[test]
    fn halting_examples() {
        let corpus = vec![
            MachineInputPair::new("halt", machines::immediate_halt(), 0),
            MachineInputPair::new("right", machines::move_right_forever(), 0),
            MachineInputPair::new("chain37", machines::chain(37), 0),
        ];
        let s = halting_stream(corpus.clone());
        let halt_at = |b: &MachineInputPair, r: u64| s.last_occurrence(b, round_end(r)).unwrap().1;
        assert_eq!(halt_at(&corpus[0], 0), Sign::Plus);
        assert!((1..60).all(|r| halt_at(&corpus[0], r) == Sign::Minus));
        assert!((1..60).all(|r| halt_at(&corpus[1], r) == Sign::Plus));
        assert!((2..37).all(|r| halt_at(&corpus[2], r) == Sign::Plus));
        assert!((37..60).all(|r| halt_at(&corpus[2], r) == Sign::Minus));
    }

    fn scan<S: AssertionStream>(s: &S, b: &S::Item, n: u64) -> Option<(u64, Sign)> {
        (0..=n).rev().find_map(|i| {
            let a = s.at(i);
            (a.item == *b).then_some((i, a.sign))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dioph_fast_path_matches_scan(pos in 0u64..40, n in 0u64..900) {
            let m = dioph_stream();
            let p = poly_enum(pos);
            prop_assert_eq!(m.last_occurrence(&p, n), scan(&m, &p, n));
        }

        #[test]
        fn halting_fast_path_matches_scan(j in 0usize..4, n in 0u64..400) {
            let corpus = vec![
                MachineInputPair::new("halt", machines::immediate_halt(), 0),
                MachineInputPair::new("c3", machines::chain(3), 0),
                MachineInputPair::new("right", machines::move_right_forever(), 0),
                MachineInputPair::new("c9", machines::chain(9), 1),
            ];
            let s = halting_stream(corpus.clone());
            prop_assert_eq!(s.last_occurrence(&corpus[j], n), scan(&s, &corpus[j], n));
        }

        #[test]
        fn divisor_roots_match_cauchy_scan(c in proptest::collection::vec(-6i64..=6, 1..5)) {
            let p = Poly::new(c);
            prop_assume!(!p.is_zero());
            let bound = cauchy_bound(&p).unwrap() as i64;
            let scan_rank = (-bound..=bound)
                .filter(|z| eval_poly(&p, &BigInt::from(*z)).is_zero())
                .map(int_rank)
                .min();
            prop_assert_eq!(first_root_rank(&p).unwrap(), scan_rank);
        }
    }
}
