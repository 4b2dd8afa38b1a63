//! Instance families: the integrality-gap family, the Label-Cover hardness
//! reduction with its regret gadget, seeded random instances, and the
//! layered-graph view of an instance.

mod gap;
mod graph;
mod labelcover;
mod random;
mod regret;

pub use gap::{gen_gap, gen_gap_capped, DEFAULT_SCENARIO_CAP};
pub use graph::{export_layered_graph, LayeredGraph};
pub use labelcover::{
    label_cover_value, label_distinct, reduce_labelcover, scenario_bound, Edge, LabelCoverInstance,
    LabeledTool, Reduction, ReductionConfig,
};
pub use random::gen_random;
pub use regret::{augment_regret, default_dummy_cost};
