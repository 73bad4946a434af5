//! Finite-dimensional spectral checks: trace inequalities, projector
//! symmetries, the lattice Dirac operator and Lieb–Thirring sums.

pub mod chiral;
pub mod hermitian;
pub mod inequalities;
pub mod lattice;
pub mod lieb_thirring;
pub mod random;

pub use chiral::{chiral_projector_check, ChiralReport};
pub use hermitian::{negative_part_trace, HermitianOperator, Moment};
pub use inequalities::{bks_check, projection_trace_checks, BksReport, ProjectionReport};
pub use lattice::{dirac_square_identity, FourierMode, LatticeGauge};
pub use lieb_thirring::{lieb_thirring_ratio, DirichletGrid, LiebThirringReport};
