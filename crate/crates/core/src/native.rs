//! Registry of native steps a machine may `call`.
//!
//! A native step receives the machine's data payload and the trimmed input
//! and computation tapes, and returns the new computation tape, or `None`
//! to send the machine to its reject state.

use crate::encoding::Str;

pub const NATIVES: &[&str] = &["z-decide", "copy-input"];

pub fn is_registered(name: &str) -> bool {
    NATIVES.contains(&name)
}

pub fn run_native(name: &str, data: Option<&str>, input: &Str, comp: &Str) -> Option<Str> {
    let _ = comp;
    match name {
        "z-decide" => Some(crate::arithmetizer::decision::z_decide(data?, input)),
        "copy-input" => Some(input.clone()),
        _ => None,
    }
}
