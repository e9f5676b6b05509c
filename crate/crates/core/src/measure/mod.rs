//! Probability spaces, partitions and essentially bounded function models.

mod function;
mod partition;
mod space;

pub use function::{Base, EssentialRange, FunctionModel, RangeMode, Spike};
pub use partition::{Partition, Split};
pub use space::{Atom, BoxCell, Cell, Point, Space};
