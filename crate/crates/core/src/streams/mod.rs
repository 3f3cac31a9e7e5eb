//! Stream generators, dataset ingestion and drift injection.

pub mod generators;
pub mod ingest;
pub mod inject;
pub mod table;

pub use generators::{generate, random_tree_concept, GeneratorConfig, GeneratorKind, RandomTreeConcept};
pub use ingest::{load_csv, ColumnRole, SchemaDescriptor};
pub use inject::{
    binarize, build_2x2, inject_label_noise, inject_real, permute, sample_window, tree_segment,
    Binarization, DriftScenario, Segmentation, SegmentTree, DEFAULT_SEGMENT_DEPTH,
};
pub use table::DatasetTable;
