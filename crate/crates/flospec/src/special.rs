//! Bessel functions of the first kind.
//!
//! Orders and arguments used by the solvers are modest (n up to a few tens,
//! x in [0, 12]), so a single routine based on Miller's downward recurrence
//! with the even-order normalization sum covers everything to close to
//! machine precision. No polynomial fits, no asymptotics.

/// Compute `J_0(x) .. J_n_max(x)` for `x >= 0`.
///
/// Downward recurrence started well above both `n_max` and `x`, normalized
/// with `J_0 + 2*sum_k J_{2k} = 1`. Absolute accuracy is ~1e-15 on the
/// argument range used here.
pub fn bessel_j_array(x: f64, n_max: usize) -> Vec<f64> {
    assert!(x >= 0.0, "bessel_j_array: negative argument {x}");
    if x < 1e-14 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        if n_max >= 1 {
            out[1] = x / 2.0;
        }
        return out;
    }
    // Start order: past the turning point n ~ x plus a safety tail.
    let start = (n_max.max(x.ceil() as usize) + 1) * 2 + 40;
    let mut jp1 = 0.0_f64; // J~_{k+1}
    let mut j = 1e-300_f64; // J~_k (arbitrary scale)
    let mut out = vec![0.0; n_max + 1];
    let mut norm = 0.0_f64;
    for k in (0..=start).rev() {
        let jm1 = (2.0 * (k as f64 + 1.0) / x) * j - jp1;
        jp1 = j;
        j = jm1;
        // jm1 is now J~_k; accumulate normalization and outputs.
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k <= n_max {
            out[k] = j;
        }
        // Rescale to avoid overflow for long recurrences.
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp1 *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// `J_n(x)` for `x >= 0`.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_array(x, n)[n]
}

/// `J_0(x)`.
pub fn bessel_j0(x: f64) -> f64 {
    bessel_j(0, x)
}

/// `J_1(x)`.
pub fn bessel_j1(x: f64) -> f64 {
    bessel_j(1, x)
}
