pub mod exact;
pub mod group;
pub mod chars;
pub mod fake;
pub mod minmat;
pub mod kz;

/// Bumped whenever a change can alter computed artifacts.
pub const ALGORITHM_VERSION: &str = "reflekt-alg-1";
