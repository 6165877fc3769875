//! # synidx
//!
//! A compressed text index built around string synchronizing sets. From a
//! packed text over a small alphabet it answers, without storing the suffix
//! array:
//!
//! - `SA[i]` and `ISA[j]` lookups,
//! - pattern counting, locating, and suffix-array range queries,
//! - the full set of suffix tree operations (LCA, child, weighted ancestor,
//!   suffix/Weiner links, siblings, ...), on node handles that are plain
//!   `(lrank, rrank)` pairs.
//!
//! All query paths reduce to prefix rank/selection over a sequence of short
//! strings anchored at synchronizing positions, range counting/selection
//! over run lengths, and constant-size lookup tables; positions whose
//! neighborhood is highly periodic are handled by a dedicated run
//! decomposition. Texts that are too small or whose alphabet is too large
//! for the sampled machinery fall back to plain suffix-array storage behind
//! the same API.
//!
//! ## Quick start
//!
//! ```
//! use synidx::{Index, BuildConfig};
//!
//! let idx = Index::build(b"abaababababaababa", &BuildConfig::default()).unwrap();
//! assert_eq!(idx.sa(7).unwrap(), 1);
//! assert_eq!(idx.range(b"aba").unwrap(), (4, 11));
//! assert_eq!(idx.count(b"aba").unwrap(), 7);
//! let mut occ = idx.locate(b"aba").unwrap();
//! occ.sort_unstable();
//! assert_eq!(occ, vec![1, 4, 6, 8, 10, 13, 15]);
//! ```

pub mod bitvec;
pub mod cst;
mod error;
pub mod index;
pub mod oracle;
pub mod pm;
pub mod prefix_rs;
pub mod range_cs;
pub mod sa;
pub mod sais;
pub mod ser;
pub mod sync;
pub mod text;
pub mod trie;

pub use cst::NodeRepr;
pub use error::Error;
pub use index::Index;
pub use text::{BuildConfig, PackedText};
