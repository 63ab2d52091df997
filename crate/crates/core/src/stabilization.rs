//! Assertion streams with retraction and their horizon-bounded
//! stabilization.
//!
//! Stability is a limit notion; everything here is relative to an explicit
//! horizon `H`, and every reported result carries it.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::encoding::Str;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_bool(plus: bool) -> Sign {
        if plus {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assertion<B> {
    pub item: B,
    pub sign: Sign,
}

impl<B> Assertion<B> {
    pub fn plus(item: B) -> Self {
        Assertion { item, sign: Sign::Plus }
    }

    pub fn minus(item: B) -> Self {
        Assertion { item, sign: Sign::Minus }
    }
}

/// A total map `N -> B x {+,-}`.
///
/// Implementations must be deterministic: the same index always yields the
/// same assertion.
pub trait AssertionStream {
    type Item: Clone + Eq + Hash + fmt::Debug;

    fn at(&self, n: u64) -> Assertion<Self::Item>;

    /// Index and sign of the last assertion about `b` at an index `<= n`.
    ///
    /// The default scans backwards; round-structured streams override it with
    /// a direct computation.
    fn last_occurrence(&self, b: &Self::Item, n: u64) -> Option<(u64, Sign)> {
        (0..=n).rev().find_map(|i| {
            let a = self.at(i);
            (a.item == *b).then_some((i, a.sign))
        })
    }

    fn prefix(&self, len: u64) -> Vec<Assertion<Self::Item>> {
        (0..len).map(|i| self.at(i)).collect()
    }
}

impl<S: AssertionStream + ?Sized> AssertionStream for &S {
    type Item = S::Item;
    fn at(&self, n: u64) -> Assertion<S::Item> {
        (**self).at(n)
    }
    fn last_occurrence(&self, b: &S::Item, n: u64) -> Option<(u64, Sign)> {
        (**self).last_occurrence(b, n)
    }
}

impl<S: AssertionStream + ?Sized> AssertionStream for Box<S> {
    type Item = S::Item;
    fn at(&self, n: u64) -> Assertion<S::Item> {
        (**self).at(n)
    }
    fn last_occurrence(&self, b: &S::Item, n: u64) -> Option<(u64, Sign)> {
        (**self).last_occurrence(b, n)
    }
}

impl<S: AssertionStream + ?Sized> AssertionStream for Arc<S> {
    type Item = S::Item;
    fn at(&self, n: u64) -> Assertion<S::Item> {
        (**self).at(n)
    }
    fn last_occurrence(&self, b: &S::Item, n: u64) -> Option<(u64, Sign)> {
        (**self).last_occurrence(b, n)
    }
}

/// A stream given by a finite list followed by a cycle repeated forever.
#[derive(Debug, Clone)]
pub struct ListStream<B> {
    head: Vec<Assertion<B>>,
    cycle: Vec<Assertion<B>>,
}

impl<B: Clone + Eq + Hash + fmt::Debug> ListStream<B> {
    /// `cycle` must be nonempty.
    pub fn new(head: Vec<Assertion<B>>, cycle: Vec<Assertion<B>>) -> Self {
        assert!(!cycle.is_empty(), "a total stream needs a nonempty cycle");
        ListStream { head, cycle }
    }

    /// The list, then its final entry forever.
    pub fn then_repeat_last(items: Vec<Assertion<B>>) -> Self {
        let last = items.last().cloned().expect("nonempty list");
        ListStream::new(items, vec![last])
    }

    pub fn constant(a: Assertion<B>) -> Self {
        ListStream::new(Vec::new(), vec![a])
    }
}

impl<B: Clone + Eq + Hash + fmt::Debug> AssertionStream for ListStream<B> {
    type Item = B;

    fn at(&self, n: u64) -> Assertion<B> {
        let n = n as usize;
        if n < self.head.len() {
            self.head[n].clone()
        } else {
            self.cycle[(n - self.head.len()) % self.cycle.len()].clone()
        }
    }

    fn last_occurrence(&self, b: &B, n: u64) -> Option<(u64, Sign)> {
        let h = self.head.len() as u64;
        if n >= h {
            // Only one pass over the cycle is needed.
            let c = self.cycle.len() as u64;
            let lo = n.saturating_sub(c - 1).max(h);
            for i in (lo..=n).rev() {
                let a = self.at(i);
                if a.item == *b {
                    return Some((i, a.sign));
                }
            }
            if h == 0 {
                return None;
            }
            return (0..h).rev().find_map(|i| {
                let a = self.at(i);
                (a.item == *b).then_some((i, a.sign))
            });
        }
        (0..=n).rev().find_map(|i| {
            let a = self.at(i);
            (a.item == *b).then_some((i, a.sign))
        })
    }
}

/// A stream backed by a function.
pub struct FnStream<B, F> {
    f: F,
    _item: std::marker::PhantomData<fn() -> B>,
}

impl<B, F: Fn(u64) -> Assertion<B>> FnStream<B, F> {
    pub fn new(f: F) -> Self {
        FnStream { f, _item: std::marker::PhantomData }
    }
}

impl<B: Clone + Eq + Hash + fmt::Debug, F: Fn(u64) -> Assertion<B>> AssertionStream for FnStream<B, F> {
    type Item = B;
    fn at(&self, n: u64) -> Assertion<B> {
        (self.f)(n)
    }
}

/// `b` is `(m, n)`-stable: asserted at some index `<= n` and not retracted
/// after that assertion up to `n`. Equivalently, the last assertion about
/// `b` up to `n` is positive.
pub fn is_n_stable<S: AssertionStream + ?Sized>(m: &S, b: &S::Item, n: u64) -> bool {
    matches!(m.last_occurrence(b, n), Some((_, Sign::Plus)))
}

/// A total map `B x N -> {+,-}`.
pub trait DecisionMap {
    type Item;
    fn at(&self, b: &Self::Item, n: u64) -> Sign;
}

/// The decision map `D_M(b, n) = +` iff `b` is `(M, n)`-stable.
pub struct StreamDecision<S> {
    stream: S,
}

impl<S> StreamDecision<S> {
    pub fn stream(&self) -> &S {
        &self.stream
    }
}

impl<S: AssertionStream> DecisionMap for StreamDecision<S> {
    type Item = S::Item;
    fn at(&self, b: &S::Item, n: u64) -> Sign {
        Sign::from_bool(is_n_stable(&self.stream, b, n))
    }
}

pub fn decision_map<S: AssertionStream>(m: S) -> StreamDecision<S> {
    StreamDecision { stream: m }
}

/// A decision map backed by a function.
pub struct FnDecision<B, F> {
    f: F,
    _item: std::marker::PhantomData<fn(&B)>,
}

impl<B, F: Fn(&B, u64) -> Sign> FnDecision<B, F> {
    pub fn new(f: F) -> Self {
        FnDecision { f, _item: std::marker::PhantomData }
    }
}

impl<B, F: Fn(&B, u64) -> Sign> DecisionMap for FnDecision<B, F> {
    type Item = B;
    fn at(&self, b: &B, n: u64) -> Sign {
        (self.f)(b, n)
    }
}

/// `d(b, n) = +` for every `n` in `[from, horizon]`.
pub fn is_decided_at<D: DecisionMap + ?Sized>(d: &D, b: &D::Item, from: u64, horizon: u64) -> bool {
    assert!(from <= horizon, "window start past horizon");
    (from..=horizon).all(|n| d.at(b, n).is_plus())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy<B> {
    pub item: B,
    pub first: bool,
    pub second: bool,
}

/// Compares the status of each sample element at the horizon: an element
/// counts as decided by a map when the map gives `+` at `horizon`.
/// Discrepancies are evidence, not proof, that the maps stabilize
/// differently.
pub fn discrepancy_report<B: Clone, D1, D2>(d1: &D1, d2: &D2, sample: &[B], horizon: u64) -> Vec<Discrepancy<B>>
where
    D1: DecisionMap<Item = B> + ?Sized,
    D2: DecisionMap<Item = B> + ?Sized,
{
    sample
        .iter()
        .filter_map(|b| {
            let first = d1.at(b, horizon).is_plus();
            let second = d2.at(b, horizon).is_plus();
            (first != second).then(|| Discrepancy { item: b.clone(), first, second })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizonReport<B> {
    pub horizon: u64,
    /// Stable elements with the index of their unrevoked assertion, in
    /// increasing order of that index.
    pub stable: Vec<(B, u64)>,
    /// Elements seen but not stable, with the index of their last
    /// retraction, in order of first appearance.
    pub revoked: Vec<(B, u64)>,
}

impl<B> HorizonReport<B> {
    pub fn stable_list(&self) -> Vec<&B> {
        self.stable.iter().map(|(b, _)| b).collect()
    }
}

pub fn stable_at_horizon<S: AssertionStream + ?Sized>(m: &S, horizon: u64) -> HorizonReport<S::Item> {
    struct Track {
        first_seen: u64,
        last_sign: Sign,
        unrevoked_plus: Option<u64>,
        last_minus: Option<u64>,
    }
    let mut seen: HashMap<S::Item, Track> = HashMap::new();
    let mut order = Vec::new();
    for n in 0..=horizon {
        let a = m.at(n);
        let t = seen.entry(a.item.clone()).or_insert_with(|| {
            order.push(a.item.clone());
            Track { first_seen: n, last_sign: a.sign, unrevoked_plus: None, last_minus: None }
        });
        t.last_sign = a.sign;
        match a.sign {
            Sign::Plus => {
                if t.unrevoked_plus.is_none() {
                    t.unrevoked_plus = Some(n);
                }
            }
            Sign::Minus => {
                t.unrevoked_plus = None;
                t.last_minus = Some(n);
            }
        }
    }
    let mut stable = Vec::new();
    let mut revoked = Vec::new();
    for b in order {
        let t = &seen[&b];
        match (t.last_sign, t.unrevoked_plus, t.last_minus) {
            (Sign::Plus, Some(i), _) => stable.push((b, i)),
            (_, _, Some(j)) => revoked.push((b, j)),
            _ => unreachable!("element {:?} seen at {} without a sign", b, t.first_seen),
        }
    }
    stable.sort_by_key(|(_, i)| *i);
    HorizonReport { horizon, stable, revoked }
}

/// Items that can appear in traces: a typed code and a readable rendering.
pub trait Traceable {
    fn trace_code(&self) -> Str;
    fn human(&self) -> String;
}

impl Traceable for Str {
    fn trace_code(&self) -> Str {
        self.clone()
    }
    fn human(&self) -> String {
        match crate::encoding::decode_str(self) {
            Ok(v) => v.to_string(),
            Err(_) => self.to_string(),
        }
    }
}

/// `n TAB sign TAB hex TAB human`.
pub fn trace_line<B: Traceable>(n: u64, a: &Assertion<B>) -> String {
    format!("{}\t{}\t{}\t{}", n, a.sign, a.item.trace_code().to_hex(), a.item.human())
}

pub fn write_trace<S>(m: &S, horizon: u64, out: &mut impl std::io::Write) -> std::io::Result<()>
where
    S: AssertionStream + ?Sized,
    S::Item: Traceable,
{
    for n in 0..=horizon {
        writeln!(out, "{}", trace_line(n, &m.at(n)))?;
    }
    Ok(())
}

/// Parses trace lines back into assertions over raw codes.
pub fn parse_trace(text: &str) -> Result<Vec<Assertion<Str>>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        if fields.len() < 3 {
            return Err(format!("line {}: expected `n<TAB>sign<TAB>hex`", i + 1));
        }
        let n: u64 = fields[0].parse().map_err(|_| format!("line {}: bad index", i + 1))?;
        if n != out.len() as u64 {
            return Err(format!("line {}: expected index {}", i + 1, out.len()));
        }
        let sign = match fields[1] {
            "+" => Sign::Plus,
            "-" => Sign::Minus,
            s => return Err(format!("line {}: bad sign `{s}`", i + 1)),
        };
        let item = Str::from_hex(fields[2]).map_err(|e| format!("line {}: {e}", i + 1))?;
        out.push(Assertion { item, sign });
    }
    Ok(out)
}

pub fn write_report<B: Traceable>(r: &HorizonReport<B>, out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "# horizon={} stable={} revoked={}", r.horizon, r.stable.len(), r.revoked.len())?;
    for (b, i) in &r.stable {
        writeln!(out, "stable\t{}\t{}\t{}", i, b.trace_code().to_hex(), b.human())?;
    }
    for (b, j) in &r.revoked {
        writeln!(out, "revoked\t{}\t{}\t{}", j, b.trace_code().to_hex(), b.human())?;
    }
    Ok(())
}
