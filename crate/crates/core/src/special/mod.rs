//! Bessel functions of quarter-integer order and a bracketing root finder.

mod bessel;
mod roots;

pub use bessel::{
    bessel_j, bessel_j_pair, BesselOrder, GAMMA_QUARTER, GAMMA_THREE_QUARTERS, MAX_ARGUMENT,
};
pub use roots::{find_roots, find_roots_with_step, EquationTag, RootList, SCAN_START, SCAN_STEP};
