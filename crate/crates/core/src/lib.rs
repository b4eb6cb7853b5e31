//! Rumor source identification on loopy networks.
//!
//! A snapshot of infected nodes is explained by the source set whose removal
//! leaves the fewest nonbacktracking walks, measured by the dominant
//! eigenvalue of the reduced nonbacktracking matrix `R` (MSI), or by a
//! first-order estimate of the eigenvalue drop computed from one eigenpair
//! of `B` (PMSI). Jordan-center and BFS rumor-center baselines, a
//! time-slotted SI simulator, the message-passing dynamics that motivate the
//! spectral criterion, and a Monte-Carlo benchmark harness are included.
//!
//! ```
//! use rumor_source::graph::Graph;
//! use rumor_source::identify::msi;
//! use rumor_source::spectral::PowerConfig;
//!
//! // Two triangles sharing node 2: removing 2 kills every cycle.
//! let bowtie = Graph::from_edge_list([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
//! let result = msi(&bowtie, 1, PowerConfig::default()).unwrap();
//! assert_eq!(result.chosen, vec![2]);
//! ```

pub mod bench;
pub mod error;
pub mod graph;
pub mod identify;
pub mod message;
pub mod netgen;
pub mod si;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{EdgeIndex, Graph, Side, SourceIndicator};
pub use identify::{IdentificationResult, Method};
pub use si::Snapshot;
pub use spectral::PowerConfig;
