use std::f64::consts::PI;

/// Offset of `(l, m)`, `0 <= m <= l`, in a triangular table.
#[inline]
pub(crate) fn lm_index(l: u32, m: u32) -> usize {
    let l = l as usize;
    l * (l + 1) / 2 + m as usize
}

pub(crate) fn table_len(lmax: u32) -> usize {
    let n = lmax as usize + 1;
    n * (n + 1) / 2
}

/// Fully normalized associated Legendre values `Pbar_l^m(x)` for `0 <= m <= l <= lmax`,
/// Condon–Shortley phase included, so that `Y_l^m = Pbar_l^m(cos theta) exp(i m phi)`.
///
/// `sin_theta` is passed separately so values near the poles keep full relative accuracy.
pub(crate) fn legendre_row(lmax: u32, x: f64, sin_theta: f64) -> Vec<f64> {
    let mut out = vec![0.0; table_len(lmax)];
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = f64::from(m);
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta;
        }
        out[lm_index(m, m)] = pmm;
        if m == lmax {
            break;
        }
        let mf = f64::from(m);
        let mut p_prev = pmm;
        let mut p = (2.0 * mf + 3.0).sqrt() * x * pmm;
        out[lm_index(m + 1, m)] = p;
        for l in m + 2..=lmax {
            let lf = f64::from(l);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            let next = a * (x * p - b * p_prev);
            p_prev = p;
            p = next;
            out[lm_index(l, m)] = p;
        }
    }
    out
}
