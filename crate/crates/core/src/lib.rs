//! Deciding permutation similarity of square matrices by symbolic squaring
//! of a permutation constraint matrix.

pub mod bpsay;
pub mod error;
pub mod findperm;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod pcm;
pub mod symbols;
pub mod symsqr;
pub mod wspm;

pub use bpsay::{check_psim, BpsayConfig, BpsayResult};
pub use error::{Error, Result};
pub use findperm::{find_permutation, FindPermConfig, FindPermResult};
pub use grid::SquareArray;
