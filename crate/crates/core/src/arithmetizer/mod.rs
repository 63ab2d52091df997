//! Compiler from machines to first-order arithmetic.

pub mod config;
pub mod decision;
pub mod formulas;

use num_bigint::BigUint;

use crate::encoding::Str;
use crate::logic::eval::Predicates;
use crate::logic::Formula;
use crate::turing::Machine;

pub use decision::{build_z, dt_check, dt_sentence, goedel_sentence, s_of, z_decide, GoedelSentence};
pub use formulas::{comp_formula, step_formula, ArithError};

/// A machine together with its `Step` and `Comp` formulas.
#[derive(Debug, Clone)]
pub struct ArithmetizedMachine {
    pub machine: Machine,
    pub step_formula: Formula,
    pub comp_formula: Formula,
}

pub fn arithmetize(m: &Machine) -> Result<ArithmetizedMachine, ArithError> {
    Ok(ArithmetizedMachine { machine: m.clone(), step_formula: step_formula(m)?, comp_formula: comp_formula(m)? })
}

/// Interprets the two defined predicates used by exported sentences:
///
/// - `(pred dt t)`: `t` numbers the code of a decision machine in normal
///   form (see [`decision::dt_report`]);
/// - `(pred decides-plus t n)`: additionally, that machine outputs `1` on
///   the pair `(t, n)` within its fuel.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardPredicates;

impl Predicates for StandardPredicates {
    fn eval(&self, name: &str, args: &[BigUint]) -> Option<Result<bool, String>> {
        let code = |a: &BigUint| Str::from_number(a);
        match (name, args) {
            ("dt", [t]) => Some(Ok(code(t).is_some_and(|s| dt_check(&s)))),
            ("decides-plus", [t, n]) => {
                let Some(s) = code(t) else { return Some(Ok(false)) };
                let Ok(n) = u64::try_from(n) else {
                    return Some(Err("round index too large".into()));
                };
                Some(Ok(decision::decides_plus(&s, n)))
            }
            ("dt" | "decides-plus", _) => Some(Err(format!("wrong arity {}", args.len()))),
            _ => None,
        }
    }
}
