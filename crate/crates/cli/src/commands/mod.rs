mod bounds;
mod fit;
mod generate;
mod limit;
mod simulate;
mod smoothing;

pub use bounds::{cmd_bounds, BoundsReport};
pub use fit::{cmd_fit, FitArgs, FitCommandReport};
pub use generate::{cmd_generate, GenerateArgs, GenerateReport};
pub use limit::{cmd_limit, LimitReport};
pub use simulate::{cmd_simulate, SimulateReport};
pub use smoothing::{cmd_smoothing, SmoothingArgs, SmoothingReport};
