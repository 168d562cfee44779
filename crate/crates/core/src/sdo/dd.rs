//! Dense double-double linear algebra for the small Newton systems.

use twofloat::TwoFloat;

pub type D = TwoFloat;

pub fn d(x: f64) -> D {
    D::from(x)
}

pub fn di(x: i64) -> D {
    D::from(x as f64)
}

pub fn to_f64(x: D) -> f64 {
    x.hi() + x.lo()
}

pub fn abs(x: D) -> D {
    if x < d(0.0) { -x } else { x }
}

pub fn norm_inf(v: &[D]) -> f64 {
    v.iter().map(|&x| to_f64(abs(x))).fold(0.0, f64::max)
}

/// Solve the `k x k` row-major system by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<D>, mut b: Vec<D>) -> Option<Vec<D>> {
    let k = b.len();
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| abs(a[i * k + c]).partial_cmp(&abs(a[j * k + c])).unwrap())?;
        if to_f64(abs(a[p * k + c])) < 1e-300 {
            return None;
        }
        if p != c {
            for j in 0..k {
                a.swap(p * k + j, c * k + j);
            }
            b.swap(p, c);
        }
        let piv = a[c * k + c];
        for i in c + 1..k {
            let f = a[i * k + c] / piv;
            if f == d(0.0) {
                continue;
            }
            for j in c..k {
                let t = a[c * k + j];
                a[i * k + j] -= f * t;
            }
            let t = b[c];
            b[i] -= f * t;
        }
    }
    let mut x = vec![d(0.0); k];
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in i + 1..k {
            s -= a[i * k + j] * x[j];
        }
        x[i] = s / a[i * k + i];
    }
    x.iter().all(|v| v.hi().is_finite() && v.lo().is_finite()).then_some(x)
}

/// Cholesky succeeds on the symmetric `n x n` matrix.
pub fn is_pd(m: &[D], n: usize) -> bool {
    let mut l = vec![d(0.0); n * n];
    for j in 0..n {
        let mut s = m[j * n + j];
        for k in 0..j {
            s -= l[j * n + k] * l[j * n + k];
        }
        if !(s > d(0.0)) {
            return false;
        }
        let r = s.sqrt();
        l[j * n + j] = r;
        for i in j + 1..n {
            let mut t = m[i * n + j];
            for k in 0..j {
                t -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = t / r;
        }
    }
    true
}

/// Row-major product of two `n x n` matrices.
pub fn matmul(a: &[D], b: &[D], n: usize) -> Vec<D> {
    let mut c = vec![d(0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == d(0.0) {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += x * b[k * n + j];
            }
        }
    }
    c
}
