use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// min <C, X> s.t. <A^i, X> = b_i, X psd, with its dual
/// max b^T y s.t. sum y_i A^i + S = C, S psd. Matrices are row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdoInstance {
    pub n: usize,
    pub m: usize,
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
}

fn unit(n: usize, entries: &[(usize, usize, i64)]) -> Vec<i64> {
    let mut e = vec![0; n * n];
    for &(i, j, v) in entries {
        e[i * n + j] += v;
        if i != j {
            e[j * n + i] += v;
        }
    }
    e
}

impl SdoInstance {
    pub fn new(n: usize, a: Vec<Vec<i64>>, b: Vec<i64>, c: Vec<i64>) -> Result<Self> {
        let inst = SdoInstance { n, m: a.len(), a, b, c };
        inst.validate()?;
        Ok(inst)
    }

    /// m = 1, A = I, b = n, C = I. The central path is X = I, y = 1 - mu, S = mu I.
    pub fn identity(n: usize) -> Self {
        let id = unit(n, &(0..n).map(|i| (i, i, 1)).collect::<Vec<_>>());
        SdoInstance { n, m: 1, a: vec![id.clone()], b: vec![n as i64], c: id }
    }

    /// Minimize 4 X12 - 4 X13 - 2 X23 over 3x3 correlation matrices. The
    /// optimum X12 = -1, X13 = 1, X23 = -1 is not strictly complementary.
    pub fn elliptope() -> Self {
        let a = (0..3).map(|i| unit(3, &[(i, i, 1)])).collect();
        let c = unit(3, &[(0, 1, 2), (0, 2, -2), (1, 2, -1)]);
        SdoInstance { n: 3, m: 3, a, b: vec![1, 1, 1], c }
    }

    /// Dual problem max -y_n over S = [[1, y1, ..., y_{n-1}], [y1, y2, 0..], ..., [y_{n-1}, .., y_n]] psd;
    /// y_2 decays like mu^(2^-(n-2)).
    pub fn kl02(n: usize) -> Self {
        assert!(n >= 3);
        let mut a = Vec::with_capacity(n);
        a.push(unit(n, &[(0, 1, -1)]));
        for i in 1..n - 1 {
            a.push(unit(n, &[(i, i, -1), (0, i + 1, -1)]));
        }
        a.push(unit(n, &[(n - 1, n - 1, -1)]));
        let mut b = vec![0; n];
        b[n - 1] = -1;
        SdoInstance { n, m: n, a, b, c: unit(n, &[(0, 0, 1)]) }
    }

    /// Instance by name: `identity_<n>`, `elliptope`, `kl02_<n>`.
    pub fn builtin(name: &str) -> Option<Self> {
        let name = name.strip_suffix(".sdo").unwrap_or(name);
        let name = name.rsplit('/').next().unwrap_or(name);
        if name == "elliptope" {
            return Some(Self::elliptope());
        }
        let (kind, n) = name.rsplit_once('_')?;
        let n: usize = n.parse().ok()?;
        match kind {
            "identity" if n >= 1 => Some(Self::identity(n)),
            "kl02" if n >= 3 => Some(Self::kl02(n)),
            _ => None,
        }
    }

    /// Coordinates: X row-major, then y, then S row-major.
    pub fn dim(&self) -> usize {
        self.m + 2 * self.n * self.n
    }

    pub fn coordinate_name(&self, k: usize) -> String {
        let nn = self.n * self.n;
        if k < nn {
            format!("X{}{}", k / self.n + 1, k % self.n + 1)
        } else if k < nn + self.m {
            format!("y{}", k - nn + 1)
        } else {
            let k = k - nn - self.m;
            format!("S{}{}", k / self.n + 1, k % self.n + 1)
        }
    }

    /// Inverse of [`coordinate_name`](Self::coordinate_name); plain indices are accepted too.
    pub fn coordinate_index(&self, name: &str) -> Option<usize> {
        if let Ok(k) = name.parse::<usize>() {
            return (k < self.dim()).then_some(k);
        }
        (0..self.dim()).find(|&k| self.coordinate_name(k).eq_ignore_ascii_case(name))
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if n == 0 || self.m == 0 {
            return bad("n and m must be positive".into());
        }
        if self.b.len() != self.m || self.c.len() != n * n || self.a.iter().any(|a| a.len() != n * n) {
            return bad("matrix or vector has the wrong size".into());
        }
        let sym = |a: &[i64]| (0..n).all(|i| (0..n).all(|j| a[i * n + j] == a[j * n + i]));
        if let Some(i) = self.a.iter().position(|a| !sym(a)) {
            return bad(format!("A^{} is not symmetric", i + 1));
        }
        if !sym(&self.c) {
            return bad("C is not symmetric".into());
        }
        if rank(&self.a) < self.m {
            return bad("the constraint matrices are linearly dependent".into());
        }
        Ok(())
    }
}

/// Rank over Q by fraction-free elimination in i128.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            let (f, g) = (m[i][c], m[r][c]);
            if f != 0 {
                for k in c..cols {
                    m[i][k] = m[i][k] * g - m[r][k] * f;
                }
                let d = m[i].iter().fold(0i128, |a, &x| num_integer::gcd(a, x));
                if d > 1 {
                    m[i].iter_mut().for_each(|x| *x /= d);
                }
            }
        }
        r += 1;
    }
    r
}

impl FromStr for SdoInstance {
    type Err = Error;

    /// Whitespace separated integers: n, m, the m matrices A^i, b, C. `#` starts a comment.
    fn from_str(s: &str) -> Result<Self> {
        let mut toks = s.lines().flat_map(|l| l.split('#').next().unwrap_or("").split_whitespace());
        let mut next = |what: &str| -> Result<i64> {
            let t = toks.next().ok_or_else(|| Error::InvalidInstance(format!("unexpected end of input reading {what}")))?;
            t.parse().map_err(|_| Error::InvalidInstance(format!("expected an integer for {what}, found '{t}'")))
        };
        let n = next("n")?;
        let m = next("m")?;
        if n <= 0 || m <= 0 || n > 64 || m > 4096 {
            return Err(Error::InvalidInstance(format!("unsupported sizes n = {n}, m = {m}")));
        }
        let (n, m) = (n as usize, m as usize);
        let mut a = Vec::with_capacity(m);
        for i in 0..m {
            a.push((0..n * n).map(|_| next(&format!("A^{}", i + 1))).collect::<Result<Vec<_>>>()?);
        }
        let b = (0..m).map(|_| next("b")).collect::<Result<Vec<_>>>()?;
        let c = (0..n * n).map(|_| next("C")).collect::<Result<Vec<_>>>()?;
        if toks.next().is_some() {
            return Err(Error::InvalidInstance("trailing data after C".into()));
        }
        SdoInstance::new(n, a, b, c)
    }
}

impl fmt::Display for SdoInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.m)?;
        let mat = |f: &mut fmt::Formatter<'_>, a: &[i64]| -> fmt::Result {
            for row in a.chunks(self.n) {
                let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                writeln!(f, "{}", r.join(" "))?;
            }
            Ok(())
        };
        for (i, a) in self.a.iter().enumerate() {
            writeln!(f, "# A^{}", i + 1)?;
            mat(f, a)?;
        }
        writeln!(f, "# b")?;
        writeln!(f, "{}", self.b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))?;
        writeln!(f, "# C")?;
        mat(f, &self.c)
    }
}
