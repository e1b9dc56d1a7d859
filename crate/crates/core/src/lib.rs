//! Twin edge colorings of graphs over finite Abelian groups.

pub mod catalog;
pub mod combinatorics;
pub mod graph;
pub mod greedy;
pub mod group;
pub mod labeling;
pub mod oracle;
pub mod tree;

pub use graph::{Graph, GraphError, GraphFormat, RootedTree, TreeClass};
pub use group::{groups_of_order, AbelianGroup, GroupElement, GroupError};
pub use labeling::{verify_twin, EdgeLabeling, LabelingError, VerificationReport, Violation};
pub use oracle::{exists_coloring, SearchOptions, SearchOutcome};
pub use tree::{color_tree, tree_bound, TreeColoring, TreeError, TreeMethod};
pub use greedy::{color_graph_greedy, GreedyError};
