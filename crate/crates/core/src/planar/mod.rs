//! Planar embeddings and balanced shortest-path separators.

pub mod embedding;
pub mod separator;

pub use embedding::{is_planar, planar_embedding, Embedding};
pub use separator::{find_3path_separator, verify_separator, PathSeparator};
