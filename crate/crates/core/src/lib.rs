//! Vision-based lane keeping for a small car-like robot, with a closed-loop
//! simulator and an ultrasonic parallel-parking pipeline.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod linalg;

pub mod cli;
pub mod control;
pub mod imagecore;
pub mod parking;
pub mod perception;
pub mod simulator;
