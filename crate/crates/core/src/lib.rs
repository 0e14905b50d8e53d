//! Graph layout toolkit core: partitioning and vertex ordering for large
//! small-world graphs, layout-quality metrics, and a phase-synchronous
//! simulation of 1D-distributed graph analytics that accounts computation
//! and all-to-all communication exactly.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! multi-threaded execution live in the `graphlayout` companion crate.
//!
//! A typical pipeline:
//!
//! ```
//! use graphlayout_core::{generate, graph, partition, ordering, metrics};
//!
//! let g = generate::clique_pair(5);
//! let (g, _) = graph::preprocess(&g).unwrap();
//! let sym = graph::symmetrize(&g);
//! let cfg = partition::PartitionConfig::new(2).with_seed(7);
//! let out = partition::partition_lp(&sym, &cfg).unwrap();
//! let ord = ordering::order_per_part(&sym, &out.partition, ordering::Strategy::Dgl, 7);
//! let laid_out = ord.apply(&sym).unwrap();
//! assert_eq!(metrics::edge_cut(&sym, &out.partition).cut_arcs, 2);
//! assert!(metrics::colocation_ratio(&laid_out) > 0.0);
//! ```

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analytics;
pub mod error;
pub mod generate;
pub mod graph;
pub mod metrics;
pub mod ordering;
pub mod partition;
pub mod rng;

pub use error::{Error, Result};
pub use graph::Graph;
pub use ordering::Ordering;
pub use partition::Partition;
