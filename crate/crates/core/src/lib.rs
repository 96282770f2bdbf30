//! Hierarchical agglomerative clustering lab.
//!
//! * [`metric`]: distance sources, cluster averages and diameters, metricity checks.
//! * [`linkage`]: average/single/complete linkage engines, random hierarchies, cuts.
//! * [`criteria`]: separability and cohesion criteria for a clustering.
//! * [`instances`]: generators for the adversarial families, with their
//!   expected outcomes attached.
//! * [`oracle`]: exhaustive optima for small inputs and bound verification.
//! * [`bench`]: the dataset × norm × method × k experiment grid.

pub mod bench;
pub mod criteria;
pub mod error;
pub mod instances;
pub mod io;
pub mod linkage;
pub mod metric;
pub mod oracle;

pub use error::{Error, Result};
pub use linkage::{Clustering, Dendrogram, LinkageRule, TieBreak};
pub use metric::{DistanceSource, IndexSet, Norm};
