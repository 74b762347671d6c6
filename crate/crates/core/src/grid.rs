//! The 30-month time grid shared by the growth engine, the ledger, and
//! the schedule optimizer. All event times and candidate rotation ages
//! live on multiples of 2.5 years.

/// One growth timestep, 30 months.
pub const STEP_YEARS: f64 = 2.5;

/// Tolerance for "is this time on the grid" checks. Grid times are
/// produced by multiplying step counts, so drift stays far below this.
const GRID_EPS: f64 = 1e-9;

/// Grid time for a step index.
pub fn step_time(index: usize) -> f64 {
    index as f64 * STEP_YEARS
}

/// Nearest step index for a time assumed to be on the grid.
pub fn step_index(time: f64) -> usize {
    (time / STEP_YEARS).round() as usize
}

pub fn is_on_grid(time: f64) -> bool {
    let steps = (time / STEP_YEARS).round();
    steps >= 0.0 && (time - steps * STEP_YEARS).abs() <= GRID_EPS
}

/// Snap a grid-adjacent time onto the exact grid representation.
pub fn snap(time: f64) -> f64 {
    step_time(step_index(time))
}

/// Smallest grid time >= `time`.
pub fn ceil_to_grid(time: f64) -> f64 {
    let steps = (time / STEP_YEARS - GRID_EPS).ceil().max(0.0);
    steps * STEP_YEARS
}
