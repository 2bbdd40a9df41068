//! Reference data and profile measurements used by the acceptance target.

use fvc_core::SchemeKind;

/// Reference L1 density errors on `sod_sonic` at t = 0.2, Cr = 0.8, over
/// [`fvc_core::harness::TABLE_GRIDS`].
pub fn reference_l1(kind: SchemeKind) -> [f64; 6] {
    match kind {
        SchemeKind::Rusanov => [3.087960e-2, 2.148587e-2, 1.460357e-2, 9.644334e-3, 6.311645e-3, 4.121060e-3],
        SchemeKind::Roe => [1.549931e-2, 1.006690e-2, 6.607027e-3, 4.372793e-3, 2.898692e-3, 1.948443e-3],
        SchemeKind::Hll => [1.568316e-2, 1.007645e-2, 6.665433e-3, 4.387840e-3, 2.900562e-3, 1.949273e-3],
        SchemeKind::Fvc => [7.757252e-3, 4.421196e-3, 2.668536e-3, 1.550064e-3, 8.843113e-4, 5.363624e-4],
    }
}

/// Reference wall times in seconds at 1600 and 3200 cells. Hardware
/// specific; printed for reference only.
pub fn reference_seconds(kind: SchemeKind) -> [f64; 2] {
    match kind {
        SchemeKind::Rusanov => [80.82, 328.79],
        SchemeKind::Roe => [142.34, 541.69],
        SchemeKind::Hll => [71.55, 263.22],
        SchemeKind::Fvc => [57.36, 222.68],
    }
}

pub fn total_variation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Largest `|v[i+1] - v[i]|` over consecutive indices that both satisfy
/// `inside`.
pub fn max_jump_where(v: &[f64], inside: impl Fn(usize) -> bool) -> f64 {
    (0..v.len().saturating_sub(1))
        .filter(|&i| inside(i) && inside(i + 1))
        .map(|i| (v[i + 1] - v[i]).abs())
        .fold(0.0, f64::max)
}

/// Index `i` of the steepest jump `v[i+1] - v[i]` with `lo <= i < hi`; the
/// jump sits on the face between cells `i` and `i+1`.
pub fn steepest_jump(v: &[f64], lo: usize, hi: usize) -> usize {
    let hi = hi.min(v.len() - 1);
    (lo..hi)
        .max_by(|&a, &b| (v[a + 1] - v[a]).abs().total_cmp(&(v[b + 1] - v[b]).abs()))
        .expect("non-empty search window")
}
