#![no_std]
//! CCS and reversible CCS terms compiled into unravel Petri nets and their
//! reversible versions, with simulators and bounded-depth property checkers.

extern crate alloc;

pub mod bisim;
pub mod ccs;
pub mod encoder;
pub mod names;
pub mod petri;
pub mod rccs;
pub mod suites;
pub mod unravel;
