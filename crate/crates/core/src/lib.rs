//! Drift theorems for first-hitting times, with a simulator that checks
//! their preconditions empirically.
//!
//! * [`process`] defines the stochastic processes and stopping rules.
//! * [`bounds`] evaluates the closed-form hitting-time bounds.
//! * [`simulate`] runs seeded Monte Carlo trajectories.
//! * [`analyze`] checks drift conditions, martingale laws and solves finite
//!   chains exactly.
//! * [`cli`] is the experiment runner behind the `driftkit` binary.

pub mod analyze;
pub mod bounds;
pub mod process;
pub mod simulate;
pub mod cli;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/processes.md")]
    mod processes {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/checks.md")]
    mod checks {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/config.md")]
    mod config {}
    #[doc = include_str!("../../../book/src/reports.md")]
    mod reports {}
}
