//! Dense density-matrix simulation of the purification and connection
//! circuits, used to validate the graph-diagonal maps.

mod check;
mod dense;

pub use check::{
    random_density_matrix, random_graph_diagonal, run_oracle_check, AnalyticMaps, Case, OracleReport,
    Reference, GRID, ORACLE_TOL,
};
pub use dense::{
    dm_connect, dm_dejmps_step, dm_memory, dm_twirl, graph_basis, DenseState, DENSE_TOL, MIN_OUTCOME_PROB,
};
