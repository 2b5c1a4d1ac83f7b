//! Bessel functions of the first kind J_0..J_n at a single argument.

/// Returns J_k(x) for k = 0..=n using Miller's backward recurrence normalised
/// by J_0 + 2·Σ J_2k = 1.
pub fn bessel_j_sequence(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    // Start far enough above both n and x that the arbitrary seed has decayed.
    let top = n.max(ax as usize);
    let mut start = top + 30 + (12.0 * (top as f64).cbrt()) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut j_next = 0.0;
    let mut j_here = 1e-300;
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        // j_here holds J_k, compute J_{k-1}.
        let j_prev = 2.0 * k as f64 / ax * j_here - j_next;
        j_next = j_here;
        j_here = j_prev;
        let kk = k - 1;
        if kk <= n {
            out[kk] = j_here;
        }
        if kk % 2 == 0 && kk > 0 {
            sum += 2.0 * j_here;
        }
        if j_here.abs() > 1e250 {
            let s = 1e-250;
            j_here *= s;
            j_next *= s;
            sum *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    sum += j_here;
    let norm = 1.0 / sum;
    for (k, v) in out.iter_mut().enumerate() {
        *v *= norm;
        if x < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}
