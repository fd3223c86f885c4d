//! Random variates: hypergeometric draws and collision-free run lengths.

mod coll;
mod hypergeometric;

pub use coll::{
    run_length_ln_sf, run_length_pmf, run_length_sf, sample_run_length, CollLaw, CollParams,
};
pub(crate) use hypergeometric::hypergeometric_unchecked;
pub use hypergeometric::{
    hypergeometric, multivariate_hypergeometric, multivariate_hypergeometric_into,
};
