//! Horizontal (SNR-axis) distances between performance curves.
//!
//! Curves are `(snr_db, value)` samples in increasing SNR. The SNR at which a
//! curve reaches a level is found by linear interpolation between the first
//! pair of neighbouring samples that brackets it; BER curves are interpolated
//! in `log10`.

/// How curve values are mapped before interpolating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Linear,
    Log10,
}

impl Axis {
    fn map(self, v: f64) -> f64 {
        match self {
            Axis::Linear => v,
            Axis::Log10 => v.log10(),
        }
    }
}

/// SNR at which the curve first crosses `level`, or `None` when no pair of
/// neighbouring samples brackets it.
pub fn snr_at_level(curve: &[(f64, f64)], level: f64, axis: Axis) -> Option<f64> {
    let target = axis.map(level);
    curve.windows(2).find_map(|w| {
        let (x0, y0) = (w[0].0, axis.map(w[0].1));
        let (x1, y1) = (w[1].0, axis.map(w[1].1));
        if !(y0.is_finite() && y1.is_finite()) {
            return None;
        }
        let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
        if target < lo || target > hi {
            return None;
        }
        if y1 == y0 {
            return Some(x0);
        }
        Some(x0 + (target - y0) / (y1 - y0) * (x1 - x0))
    })
}

/// `snr_test − snr_reference` at a common level; positive when the test
/// curve needs more SNR.
pub fn horizontal_loss_db(reference: &[(f64, f64)], test: &[(f64, f64)], level: f64, axis: Axis) -> Option<f64> {
    Some(snr_at_level(test, level, axis)? - snr_at_level(reference, level, axis)?)
}

/// Largest horizontal loss over the test samples whose SNR lies in
/// `[lo_db, hi_db]`, each measured against the reference at the same value.
/// `None` if any of those values falls outside the reference range.
pub fn max_horizontal_loss_db(
    reference: &[(f64, f64)],
    test: &[(f64, f64)],
    lo_db: f64,
    hi_db: f64,
    axis: Axis,
) -> Option<f64> {
    let mut worst = f64::NEG_INFINITY;
    for &(snr, v) in test.iter().filter(|(s, _)| (lo_db..=hi_db).contains(s)) {
        worst = worst.max(snr - snr_at_level(reference, v, axis)?);
    }
    worst.is_finite().then_some(worst)
}
