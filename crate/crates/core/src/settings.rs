use crate::Scalar;

/// Numerical knobs shared by the bound engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings<T> {
    /// Points in each convexity evidence grid.
    pub grid: usize,
    /// Relative tolerance of convexity certificates.
    pub certify_tol: T,
    /// Oracle tolerance on finite intervals.
    pub quad_tol: T,
    /// Oracle tolerance on `[0, inf)`.
    pub half_line_tol: T,
    /// Tail-bound tolerance for series.
    pub series_tol: T,
    /// Half-line functions are certified on `[0, window]`.
    pub window: T,
}

impl<T: Scalar> Default for Settings<T> {
    fn default() -> Self {
        Settings {
            grid: crate::convexity::DEFAULT_GRID,
            certify_tol: T::lit(crate::convexity::DEFAULT_TOL),
            quad_tol: T::lit(crate::quadrature::DEFAULT_TOL),
            half_line_tol: T::lit(crate::quadrature::DEFAULT_HALF_LINE_TOL),
            series_tol: T::lit(1e-12),
            window: T::lit(16.0),
        }
    }
}
