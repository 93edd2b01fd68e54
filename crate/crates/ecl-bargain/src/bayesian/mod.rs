//! Anonymous additively separable Bayesian games and their bargaining versions.

mod bargaining;
mod game;
mod prior;

pub use bargaining::{EclBayesianBargainingGame, UtilityView, POINT_TOL};
pub use game::{EclBayesianGame, JointStrategyDistribution, TypeMixture};
pub use prior::{subtype_reduction, SubtypePairPrior, TypePrior, MAX_FULL_JOINT_PLAYERS, MAX_FULL_JOINT_TYPES};
