//! Dense symmetric eigenvalues: Householder reduction to tridiagonal form
//! followed by implicit-shift QL on the tridiagonal matrix.
//!
//! The reduction touches only the lower triangle. Each step's rank-2 update
//! of the trailing block is fused with the next step's matrix-vector product,
//! so the trailing block is streamed through memory once per column.

use crate::error::{Error, Result};

/// Reduces the symmetric matrix held in `a` (row-major, lower triangle read)
/// to tridiagonal form. Returns `(diagonal, subdiagonal)` where
/// `subdiagonal[i]` couples `i` and `i + 1` and the last entry is 0. The
/// contents of `a` are destroyed.
pub fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    match n {
        0 => return (d, e),
        1 => {
            d[0] = a[0];
            return (d, e);
        }
        _ => {}
    }

    // Update from the previous step, pending on indices >= k.
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut pending = false;
    let mut v_next = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n - 2 {
        if pending {
            for i in k..n {
                a[i * n + k] -= v[i] * w[k] + w[i] * v[k];
            }
        }
        d[k] = a[k * n + k];

        let lo = k + 1;
        let x0 = a[lo * n + k];
        let tail: f64 = (lo + 1..n).map(|i| a[i * n + k] * a[i * n + k]).sum();
        let reflect = tail > 0.0;
        let mut beta = 0.0;
        if reflect {
            let norm = (x0 * x0 + tail).sqrt();
            let alpha = if x0 > 0.0 { -norm } else { norm };
            e[k] = alpha;
            v_next[..lo].iter_mut().for_each(|x| *x = 0.0);
            for i in lo..n {
                v_next[i] = a[i * n + k];
            }
            v_next[lo] -= alpha;
            beta = 1.0 / (alpha * (alpha - x0));
        } else {
            e[k] = x0;
        }

        p[lo..n].iter_mut().for_each(|x| *x = 0.0);
        fused_pass(a, n, lo, pending, &v, &w, reflect, &v_next, &mut p);

        if reflect {
            for x in &mut p[lo..n] {
                *x *= beta;
            }
            let vp: f64 = (lo..n).map(|i| v_next[i] * p[i]).sum();
            let half = 0.5 * beta * vp;
            for i in lo..n {
                w[i] = p[i] - half * v_next[i];
            }
            std::mem::swap(&mut v, &mut v_next);
        }
        pending = reflect;
    }

    let last = n - 2;
    if pending {
        for i in last..n {
            for j in last..=i {
                a[i * n + j] -= v[i] * w[j] + w[i] * v[j];
            }
        }
    }
    d[last] = a[last * n + last];
    e[last] = a[(last + 1) * n + last];
    d[last + 1] = a[(last + 1) * n + last + 1];
    e[last + 1] = 0.0;
    (d, e)
}

/// Applies the pending rank-2 update to the trailing lower triangle (rows and
/// columns >= lo) and, if `multiply`, accumulates `p += A u` on the updated
/// values.
#[allow(clippy::too_many_arguments)]
fn fused_pass(
    a: &mut [f64],
    n: usize,
    lo: usize,
    update: bool,
    v: &[f64],
    w: &[f64],
    multiply: bool,
    u: &[f64],
    p: &mut [f64],
) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("avx2") && std::is_x86_feature_detected!("fma") {
            // SAFETY: the required CPU features were detected at runtime.
            unsafe { fused_pass_avx2(a, n, lo, update, v, w, multiply, u, p) };
            return;
        }
    }
    fused_pass_generic(a, n, lo, update, v, w, multiply, u, p);
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
#[allow(clippy::too_many_arguments)]
unsafe fn fused_pass_avx2(
    a: &mut [f64],
    n: usize,
    lo: usize,
    update: bool,
    v: &[f64],
    w: &[f64],
    multiply: bool,
    u: &[f64],
    p: &mut [f64],
) {
    fused_pass_generic(a, n, lo, update, v, w, multiply, u, p)
}

#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn fused_pass_generic(
    a: &mut [f64],
    n: usize,
    lo: usize,
    update: bool,
    v: &[f64],
    w: &[f64],
    multiply: bool,
    u: &[f64],
    p: &mut [f64],
) {
    for i in lo..n {
        let row = &mut a[i * n + lo..i * n + i];
        let (vi, wi, ui) = (v[i], w[i], u[i]);
        let len = row.len();
        let (vj, wj, uj) = (&v[lo..i], &w[lo..i], &u[lo..i]);
        let pj = &mut p[lo..i];
        match (update, multiply) {
            (true, true) => {
                let mut acc = [0.0f64; 4];
                let chunks = len / 4 * 4;
                for c in (0..chunks).step_by(4) {
                    for l in 0..4 {
                        let x = row[c + l] - vi * wj[c + l] - wi * vj[c + l];
                        row[c + l] = x;
                        acc[l] += x * uj[c + l];
                        pj[c + l] += x * ui;
                    }
                }
                let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
                for j in chunks..len {
                    let x = row[j] - vi * wj[j] - wi * vj[j];
                    row[j] = x;
                    s += x * uj[j];
                    pj[j] += x * ui;
                }
                let diag = &mut a[i * n + i];
                *diag -= 2.0 * vi * wi;
                p[i] += s + *diag * ui;
            }
            (true, false) => {
                for j in 0..len {
                    row[j] -= vi * wj[j] + wi * vj[j];
                }
                a[i * n + i] -= 2.0 * vi * wi;
            }
            (false, true) => {
                let mut acc = [0.0f64; 4];
                let chunks = len / 4 * 4;
                for c in (0..chunks).step_by(4) {
                    for l in 0..4 {
                        let x = row[c + l];
                        acc[l] += x * uj[c + l];
                        pj[c + l] += x * ui;
                    }
                }
                let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
                for j in chunks..len {
                    s += row[j] * uj[j];
                    pj[j] += row[j] * ui;
                }
                p[i] += s + a[i * n + i] * ui;
            }
            (false, false) => {}
        }
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix (implicit QL with
/// Wilkinson shifts). `e[i]` couples `d[i]` and `d[i+1]`. Unsorted on return.
pub fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    // Absolute deflation floor: a purely relative test never fires on
    // blocks of (near-)zero eigenvalues, e.g. bipartite adjacency kernels.
    let norm = (0..n).fold(0.0f64, |acc, i| acc.max(d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 }));
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::InvalidParams(format!(
                    "QL iteration did not converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues of a symmetric matrix given row-major, ascending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}
