//! Cube, label and sample types, file ingestion, train/test sampling and the
//! synthetic block-structured fixture generator.

mod cube;
mod labels;
mod samples;
mod split;
mod synth;

pub use cube::{load_cube, read_header, write_cube, ByteOrder, CubeHeader, Dtype, HyperCube, Interleave};
pub use labels::{load_labels, parse_labels, write_labels, LabelGrid};
pub use samples::{SampleSet, Standardizer};
pub use split::{split, split_positions, SplitSpec};
pub use synth::make_synthetic;
