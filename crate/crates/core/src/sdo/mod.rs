//! Central paths of semidefinite programs: tracing, limits, convergence
//! orders, exact elimination of one coordinate, and the exponent rho.

mod central;
mod dd;
mod elim;
mod instance;
mod rho;
mod trace;
mod verify;

pub use central::{central_point, CentralPathSample, CentralPoint, PathTracer, DEFAULT_TOL};
pub use instance::SdoInstance;
pub use trace::{aitken_limit, finish_trace, fit_order, snap_exponent, trace_path, write_csv, LimitEstimate, OrderFit, TraceOptions, TraceResult, MIN_FIT_SAMPLES};
pub use elim::{eliminate_coordinate, path_residual, ElimOptions};
pub use rho::{compute_rho_sdo, coordinate_rho, rho_from_trace, unique_coordinates, RhoOptions};
pub use verify::{verify_reparametrization, CoordinateVerdict, ReparamPoint, VerifyOptions, VerifyReport, MIN_LEVELS};
