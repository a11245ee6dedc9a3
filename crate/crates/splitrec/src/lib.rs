//! Random split trees, the records/cuttings processes on them, and the
//! weakly 1-stable limit law of the cut count.
//!
//! A split tree distributes `n` balls over a `b`-ary skeleton using one
//! random probability vector per vertex; binary search trees, m-ary search
//! trees, quadtrees and tries are all instances. Attaching i.i.d. labels to
//! the vertices and counting *records* (labels smallest on their root path)
//! gives the same law as the number of uniformly random *cuttings* needed to
//! destroy the tree. After centering with
//! `C_n = αn/(μ⁻¹ln n) + αn lnln n/(μ⁻¹ln²n) - ζn/(μ⁻¹ln²n)` and scaling by
//! `αn/(μ⁻²ln²n)`, the record count converges to (minus) a weakly 1-stable
//! law whose characteristic function, constants, renewal-theoretic
//! ingredients and samplers live in this crate.
//!
//! Modules:
//! - [`model`]: split-vector laws (BST, uniform spacings, permuted fixed
//!   probabilities, symmetric, custom).
//! - [`tree`]: the ball-insertion generator, summaries, validation and the
//!   text serialization.
//! - [`records`]: record counting, cutting simulation, exact expectation
//!   identities and brute-force oracles.
//! - [`constants`]: `μ`, `σ²`, `α`, `ς`, `ζ` by closed forms, quadrature or
//!   simulation.
//! - [`renewal`]: the renewal function `U(t) = Σ b^k P(Y_k ≤ t)` and
//!   `W(x) = ∫_0^x e^{-t}(U(t) - μ⁻¹e^t) dt`.
//! - [`stable`]: the limit law (characteristic function, inversion CDF/PDF,
//!   sampling, normalization).
//! - [`stats`]: KS tests, empirical characteristic functions, the depth-CLT
//!   diagnostic and the reproducible experiment runner.
//!
//! ```
//! use splitrec::rng;
//! use splitrec::tree::{generate_tree, SplitParams};
//! use splitrec::records::count_records_vertices;
//!
//! let params = SplitParams::bst();
//! let mut tree_rng = rng::stream(42, &[rng::tags::TREE]);
//! let tree = generate_tree(&params, 1000, &mut tree_rng).unwrap();
//! let mut label_rng = rng::stream(42, &[rng::tags::RECORDS_V]);
//! let records = count_records_vertices(&tree, &mut label_rng);
//! assert!(records >= 1 && records <= tree.node_count());
//! ```

pub mod cli;
pub mod constants;
pub mod error;
pub mod model;
pub mod quad;
pub mod records;
pub mod renewal;
pub mod rng;
pub mod stable;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
pub use model::{CustomModel, SplitFamily, SplitVectorModel};
pub use tree::{generate_tree, SplitParams, SplitTree, TreeSummary};
