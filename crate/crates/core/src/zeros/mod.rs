//! Locating and certifying zeroes.

mod certify;
mod contour;
mod figure;
mod search;
mod target;
mod transport;

pub use certify::{
    certify_rouche, certify_rouche_f, certify_rouche_micro, certify_taylor_S, Frame, Method, RoucheOutcome,
    ZeroCertificate,
};
pub use contour::{winding_number, Contour, WindingMode, WindingOptions, WindingReport};
pub use figure::{figure_scan, partial_sum_roots, FigureScan};
pub use search::{
    is_conjugate_closed, newton_refine, sort_key, subdivide_search, zero_table, Candidate, Cell, Region,
    SearchResult, ZeroTable, DEDUP_TOL, DEFAULT_MIN_CELL, DEFAULT_TOL,
};
pub use target::{Fredholm, FunctionKind, Identity, MicroF, PartialSum, SFunction, Shifted, Target};
pub use transport::{
    approx_error, approx_error_with, attain, s_preimages, transport, MicroSummary, ParamsSummary, Route,
    TransportResult, TRANSPORT_RESIDUAL,
};
