//! Test instances for `min ½‖Ax − b‖² + λ‖x‖₁` whose minimizer is known
//! exactly, plus reference solvers and a benchmark harness.
//!
//! The construction runs backwards: choose `A` and a sparse `x*`, find a dual
//! certificate `w ∈ rg Aᵀ` matching the signs of `x*`, solve `Aᵀy = w`, and
//! set `b = λy + Ax*`. The optimality conditions then hold at `x*` by design.
//!
//! * [`linalg`]: dense kernels (QR, range projector, operator norm, DCT)
//! * [`ensembles`]: seeded sensing matrices and sparse solutions
//! * [`certgen`]: certificates and instance assembly
//! * [`solvers`]: ISTA, FISTA, GPSR-BB and ADMM with a relative-error stop
//! * [`oracle`]: brute-force minimizer for tiny instances
//! * [`bench`]: experiment grids, CSV output and convergence plots
//! * [`cli`]: the `bpdn-testgen` command and the instance file format
//!
//! ```
//! use bpdn_testgen::certgen::{construct, verify_optimality, MethodChoice};
//! use bpdn_testgen::ensembles::{EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
//!
//! let ens = EnsembleSpec::new(EnsembleKind::PartialDct, 128, 64, 7);
//! let sol = SolutionSpec::new(5, MagnitudeLaw::Gaussian, 7);
//! let inst = construct(&ens, &sol, 0.1, MethodChoice::Auto).unwrap();
//! assert!(verify_optimality(&inst) < 1e-10);
//! ```

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod certgen;
pub mod cli;
pub mod ensembles;
pub mod linalg;
pub mod oracle;
pub mod solvers;
