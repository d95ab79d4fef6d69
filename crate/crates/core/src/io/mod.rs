//! On-disk formats: `.rfc` frame stacks, `.n2n` checkpoints, PGM images,
//! and CSV tables.

pub mod checkpoint;
pub mod pgm;
pub mod rfc;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use pgm::{write_csv, write_pgm16};
pub use rfc::{read_frame, read_stack, write_frame, write_stack};
