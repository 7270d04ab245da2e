/// Relative slack absorbed before rounding up, so that ratios such as
/// `ln 4 / ln 2` that are integral in exact arithmetic do not round to the
/// next integer.
const CEIL_SLACK: f64 = 1e-9;

pub(crate) fn ceil_tol(x: f64) -> f64 {
    (x - CEIL_SLACK * x.abs().max(1.0)).ceil()
}

/// `⌈log₂ x⌉` for `x ≥ 1`.
pub(crate) fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}
