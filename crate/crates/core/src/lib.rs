//! Stable computation: assertion streams with retraction, their
//! stabilization, and a compiler from machines to arithmetic sentences.

pub mod arithmetizer;
pub mod cli;
pub mod closure;
pub mod encoding;
pub mod enumerators;
pub mod logic;
pub mod machines;
pub mod native;
pub mod speculative;
pub mod stabilization;
pub mod turing;
