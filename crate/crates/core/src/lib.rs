pub mod covariance;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod group;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod wiener;
