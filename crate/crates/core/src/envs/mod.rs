//! Benchmark environments.

mod lightdark;
mod original;
mod tabular;

pub use lightdark::{ModifiedLightDark, ModifiedLightDarkParams};
pub use original::{OriginalLightDark, OriginalLightDarkParams};
pub use tabular::TabularPomdp;
