pub mod bayesian;
pub mod catalog;
pub mod document;
pub mod error;
pub mod games;
pub mod geometry;
pub mod solutions;
pub mod stability;
pub mod sweep;
pub mod verify;
