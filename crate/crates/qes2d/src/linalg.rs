//! Dense and banded linear algebra kernels.
//!
//! Everything is hand-rolled over `Vec<f64>` storage because the matrices
//! this crate meets are either tiny (truncated recurrences, Newton steps,
//! Rayleigh-Ritz blocks) or large-but-banded (finite-difference grids). The
//! three eigenvalue engines deliberately overlap in coverage so independent
//! checks elsewhere never share a code path by accident:
//!
//! * symmetric tridiagonal QL and Sturm bisection for self-adjoint problems,
//! * a balanced Hessenberg QR for matrices that admit complex spectra,
//! * banded Cholesky plus inverse subspace iteration for 2D grids.

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Symmetric tridiagonal: QL with implicit shifts, Sturm bisection
// ---------------------------------------------------------------------------

/// All eigenvalues of a symmetric tridiagonal matrix, sorted ascending.
///
/// `diag` has length `n`, `off` length `n - 1`. Uses the QL algorithm with
/// implicit Wilkinson shifts; suitable up to a few thousand rows.
pub fn sym_tridiag_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::ParameterDomain(format!(
            "off-diagonal length {} does not match dimension {}",
            off.len(),
            n
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut sweeps = 0usize;
        loop {
            // locate the first negligible off-diagonal at or after l
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > 64 {
                return Err(Error::Convergence(
                    "tridiagonal QL failed to deflate after 64 sweeps".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut restarted = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // rotation annihilated early; drop the shift and retry
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    restarted = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
            }
            if restarted {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Number of eigenvalues strictly below `x`, by the Sturm sequence of the
/// shifted LDL^T factorization.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0usize;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        // guard exact zeros so the recurrence never divides by 0
        let denom = if q.abs() < 1e-300 {
            if q < 0.0 {
                -1e-300
            } else {
                1e-300
            }
        } else {
            q
        };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `count` smallest eigenvalues of a symmetric tridiagonal matrix by
/// Sturm bisection, sorted ascending.
///
/// Intended for large finite-difference matrices where only the bottom of
/// the spectrum matters; cost is `O(count * n * 100)`.
pub fn sym_tridiag_smallest(diag: &[f64], off: &[f64], count: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if off.len() + 1 != n {
        return Err(Error::ParameterDomain(format!(
            "off-diagonal length {} does not match dimension {}",
            off.len(),
            n
        )));
    }
    if count > n {
        return Err(Error::ParameterDomain(format!(
            "requested {count} eigenvalues from a {n}-dimensional matrix"
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if sturm_count(diag, off, mid) >= k + 1 {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
                break;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// General real eigenvalues: balance, Hessenberg reduction, Francis QR
// ---------------------------------------------------------------------------

/// Diagonal similarity scaling that roughly equalizes row and column norms.
/// Exact similarity, so the spectrum is untouched.
fn balance(a: &mut [Vec<f64>]) {
    let n = a.len();
    let radix: f64 = 2.0;
    let sqrdx = radix * radix;
    for _ in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut f = 1.0;
                let s = c + r;
                let mut cc = c;
                let mut g = r / radix;
                while cc < g {
                    f *= radix;
                    cc *= sqrdx;
                }
                g = r * radix;
                while cc > g {
                    f /= radix;
                    cc /= sqrdx;
                }
                if (cc + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= ginv;
                    }
                    for j in 0..n {
                        a[j][i] *= f;
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Reduce to upper Hessenberg form by stabilized elementary eliminations.
fn hessenberg_reduce(a: &mut [Vec<f64>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    for m in 1..n - 1 {
        let mut x = 0.0f64;
        let mut piv = m;
        for j in m..n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..n {
                let tmp = a[piv][j];
                a[piv][j] = a[m][j];
                a[m][j] = tmp;
            }
            for j in 0..n {
                let tmp = a[j][piv];
                a[j][piv] = a[j][m];
                a[j][m] = tmp;
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = 0.0;
                    for j in m..n {
                        a[i][j] = a[i][j] - y * a[m][j];
                    }
                    for j in 0..n {
                        a[j][m] += y * a[j][i];
                    }
                }
            }
        }
    }
    // eliminations leave garbage below the subdiagonal; clear it
    for i in 2..n {
        for j in 0..i - 1 {
            a[i][j] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Destroys `a`,
/// returns eigenvalues as `(re, im)` pairs in deflation order.
fn hqr_eigenvalues(a: &mut [Vec<f64>]) -> Result<Vec<(f64, f64)>> {
    let n = a.len();
    let mut wr = vec![0.0f64; n];
    let mut wi = vec![0.0f64; n];
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(wr.into_iter().zip(wi).collect());
    }
    let mut t = 0.0;
    let mut nn: isize = n as isize - 1;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            // search for a negligible subdiagonal entry
            let mut l = nn;
            while l >= 1 {
                let li = l as usize;
                let mut s = a[li - 1][li - 1].abs() + a[li][li].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[li][li - 1].abs() <= f64::EPSILON * s {
                    a[li][li - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let nni = nn as usize;
            let mut x = a[nni][nni];
            if l == nn {
                // one real eigenvalue deflates
                wr[nni] = x + t;
                wi[nni] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nni - 1][nni - 1];
            let mut w = a[nni][nni - 1] * a[nni - 1][nni];
            if l == nn - 1 {
                // a 2x2 block deflates, possibly as a complex pair
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                let xs = x + t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nni - 1] = xs + z;
                    wr[nni] = wr[nni - 1];
                    if z != 0.0 {
                        wr[nni] = xs - w / z;
                    }
                    wi[nni - 1] = 0.0;
                    wi[nni] = 0.0;
                } else {
                    wr[nni - 1] = xs + p;
                    wr[nni] = xs + p;
                    wi[nni] = z;
                    wi[nni - 1] = -z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(Error::Convergence(
                    "Hessenberg QR failed to deflate after 60 iterations".into(),
                ));
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift to break symmetry-induced cycles
                t += x;
                for i in 0..=nni {
                    a[i][i] -= x;
                }
                let s = a[nni][nni - 1].abs() + a[nni - 1][nni - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // pick the origin row m of the double shift
            let mut m = nn - 2;
            let mut p = 0.0;
            let mut q = 0.0;
            let mut r = 0.0;
            while m >= l {
                let mi = m as usize;
                let z = a[mi][mi];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[mi + 1][mi] + a[mi][mi + 1];
                q = a[mi + 1][mi + 1] - z - rr - ss;
                r = a[mi + 2][mi + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[mi][mi - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[mi - 1][mi - 1].abs() + z.abs() + a[mi + 1][mi + 1].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                let ii = i as usize;
                a[ii][ii - 2] = 0.0;
                if i != m + 2 {
                    a[ii][ii - 3] = 0.0;
                }
            }
            // chase the bulge down the diagonal
            for k in m..=nn - 1 {
                let ki = k as usize;
                if k != m {
                    p = a[ki][ki - 1];
                    q = a[ki + 1][ki - 1];
                    r = if k != nn - 1 { a[ki + 2][ki - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[ki][ki - 1] = -a[ki][ki - 1];
                        }
                    } else {
                        a[ki][ki - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in ki..=nni {
                        let mut pp = a[ki][j] + q * a[ki + 1][j];
                        if k != nn - 1 {
                            pp += r * a[ki + 2][j];
                            a[ki + 2][j] -= pp * z;
                        }
                        a[ki + 1][j] -= pp * y;
                        a[ki][j] -= pp * x;
                    }
                    let mmin = if nn < k + 3 { nni } else { ki + 3 };
                    for i in (l as usize)..=mmin {
                        let mut pp = x * a[i][ki] + y * a[i][ki + 1];
                        if k != nn - 1 {
                            pp += z * a[i][ki + 2];
                            a[i][ki + 2] -= pp * r;
                        }
                        a[i][ki + 1] -= pp * q;
                        a[i][ki] -= pp;
                    }
                }
            }
        }
    }
    Ok(wr.into_iter().zip(wi).collect())
}

/// Eigenvalues of a general real square matrix as `(re, im)` pairs.
///
/// Balances, reduces to Hessenberg form, then runs Francis double-shift QR.
/// The returned order is the QR deflation order, not sorted.
pub fn real_eigenvalues(a: &[Vec<f64>]) -> Result<Vec<(f64, f64)>> {
    let n = a.len();
    for row in a {
        if row.len() != n {
            return Err(Error::ParameterDomain(format!(
                "matrix is not square: {n} rows, a row of length {}",
                row.len()
            )));
        }
    }
    let mut m = a.to_vec();
    balance(&mut m);
    hessenberg_reduce(&mut m);
    hqr_eigenvalues(&mut m)
}

/// Roots of a real polynomial `c[0] + c[1] x + ... + c[d] x^d`, via the
/// eigenvalues of the balanced companion matrix.
///
/// High-order coefficients smaller than `1e-14` of the largest coefficient
/// are treated as zero, which silently lowers the degree; callers that care
/// about a vanishing leading coefficient must check it themselves. Roots are
/// sorted by real part, then imaginary part.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if coeffs.is_empty() {
        return Err(Error::ParameterDomain("empty coefficient list".into()));
    }
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Err(Error::ParameterDomain(
            "all polynomial coefficients are zero".into(),
        ));
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].abs() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut a = vec![vec![0.0; deg]; deg];
    for i in 1..deg {
        a[i][i - 1] = 1.0;
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[deg - 1] = -coeffs[i] / lead;
    }
    let mut roots = real_eigenvalues(&a)?;
    roots.sort_by(|u, v| u.0.total_cmp(&v.0).then(u.1.total_cmp(&v.1)));
    Ok(roots)
}

// ---------------------------------------------------------------------------
// Symmetric banded matrices: Cholesky and inverse subspace iteration
// ---------------------------------------------------------------------------

/// Symmetric banded matrix in lower-band storage.
///
/// `bands[k][j]` holds the entry at row `j + k`, column `j`; `bands[0]` is
/// the main diagonal. Only the lower triangle is stored.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub half_bandwidth: usize,
    bands: Vec<Vec<f64>>,
}

impl BandMatrix {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        let bands = (0..=half_bandwidth).map(|k| vec![0.0; n - k.min(n)]).collect();
        BandMatrix {
            n,
            half_bandwidth,
            bands,
        }
    }

    /// Add `v` at `(i, j)` and, implicitly, at `(j, i)`.
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        assert!(
            k <= self.half_bandwidth && hi < self.n,
            "entry ({i}, {j}) outside the stored band"
        );
        self.bands[k][lo] += v;
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > self.half_bandwidth || hi >= self.n {
            0.0
        } else {
            self.bands[k][lo]
        }
    }

    /// y = A x, exploiting symmetry of the stored band.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (yi, (xi, di)) in y.iter_mut().zip(x.iter().zip(self.bands[0].iter())) {
            *yi = di * xi;
        }
        for k in 1..=self.half_bandwidth {
            let band = &self.bands[k];
            for (j, &v) in band.iter().enumerate() {
                y[j + k] += v * x[j];
                y[j] += v * x[j + k];
            }
        }
    }

    /// Lower bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_lower_bound(&self) -> f64 {
        let mut radii = vec![0.0f64; self.n];
        for k in 1..=self.half_bandwidth {
            for (j, &v) in self.bands[k].iter().enumerate() {
                radii[j] += v.abs();
                radii[j + k] += v.abs();
            }
        }
        self.bands[0]
            .iter()
            .zip(radii.iter())
            .map(|(d, r)| d - r)
            .fold(f64::INFINITY, f64::min)
    }

    fn shift_diag(&mut self, sigma: f64) {
        for d in self.bands[0].iter_mut() {
            *d -= sigma;
        }
    }
}

/// Cholesky factor of a positive definite banded matrix, in the same
/// lower-band layout.
pub struct BandCholesky {
    n: usize,
    hb: usize,
    l: Vec<Vec<f64>>,
}

/// Factor `a = L L^T`. Fails with `NumericDegeneracy` if a pivot is not
/// strictly positive, i.e. the matrix is not positive definite.
pub fn band_cholesky(a: &BandMatrix) -> Result<BandCholesky> {
    let n = a.n;
    let hb = a.half_bandwidth;
    let mut l = a.bands.clone();
    let get = |l: &Vec<Vec<f64>>, i: usize, k: usize| l[i - k][k];
    for j in 0..n {
        let mut s = l[0][j];
        for k in j.saturating_sub(hb)..j {
            let v = get(&l, j, k);
            s -= v * v;
        }
        if s <= 0.0 {
            return Err(Error::NumericDegeneracy(format!(
                "banded Cholesky pivot {s:.3e} at column {j}; matrix is not positive definite"
            )));
        }
        let ljj = s.sqrt();
        l[0][j] = ljj;
        for i in j + 1..(j + hb + 1).min(n) {
            let mut s = l[i - j][j];
            for k in i.saturating_sub(hb)..j {
                s -= get(&l, i, k) * get(&l, j, k);
            }
            l[i - j][j] = s / ljj;
        }
    }
    Ok(BandCholesky { n, hb, l })
}

impl BandCholesky {
    /// Solve `L L^T x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        let hb = self.hb;
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(hb)..i {
                s -= self.l[i - k][k] * x[k];
            }
            x[i] = s / self.l[0][i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..(i + hb + 1).min(n) {
                s -= self.l[k - i][i] * x[k];
            }
            x[i] = s / self.l[0][i];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Modified Gram-Schmidt with a second pass, normalizing in place.
fn orthonormalize(x: &mut [Vec<f64>]) -> Result<()> {
    for i in 0..x.len() {
        for _ in 0..2 {
            for j in 0..i {
                let (head, tail) = x.split_at_mut(i);
                let d = dot(&head[j], &tail[0]);
                axpy(-d, &head[j], &mut tail[0]);
            }
        }
        let nrm = dot(&x[i], &x[i]).sqrt();
        if nrm < 1e-14 {
            return Err(Error::NumericDegeneracy(
                "orthonormalization collapsed a basis vector".into(),
            ));
        }
        let inv = 1.0 / nrm;
        for v in x[i].iter_mut() {
            *v *= inv;
        }
    }
    Ok(())
}

/// The `k` smallest eigenpairs of a symmetric banded matrix by inverse
/// subspace iteration with Rayleigh-Ritz extraction.
///
/// The matrix is shifted below its Gershgorin lower bound, factored once by
/// banded Cholesky, and a random block of `k + 6` vectors (seeded, so runs
/// are reproducible) is iterated until the Ritz values settle to `tol`
/// relative change. Returns values ascending with matching vectors.
pub fn banded_smallest_eigen(
    a: &BandMatrix,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.n;
    if k == 0 || k > n {
        return Err(Error::ParameterDomain(format!(
            "requested {k} eigenpairs from a {n}-dimensional matrix"
        )));
    }
    let m = (k + 6).min(n);
    let lower = a.gershgorin_lower_bound();
    let sigma = lower - 1e-3 * (1.0 + lower.abs());
    let mut shifted = a.clone();
    shifted.shift_diag(sigma);
    let chol = band_cholesky(&shifted)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize(&mut x)?;

    let mut prev = vec![f64::INFINITY; k];
    for _ in 0..max_iter {
        for col in x.iter_mut() {
            chol.solve_in_place(col);
        }
        orthonormalize(&mut x)?;
        // Rayleigh-Ritz projection onto the current block
        let ax: Vec<Vec<f64>> = x
            .iter()
            .map(|c| {
                let mut y = vec![0.0; n];
                a.mul_vec(c, &mut y);
                y
            })
            .collect();
        let mut s = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let v = dot(&x[i], &ax[j]);
                s[i][j] = v;
                s[j][i] = v;
            }
        }
        let (theta, vmat) = jacobi_symmetric_eigen(&s)?;
        let mut rotated = vec![vec![0.0; n]; m];
        for (j, out) in rotated.iter_mut().enumerate() {
            for i in 0..m {
                let w = vmat[i][j];
                if w != 0.0 {
                    axpy(w, &x[i], out);
                }
            }
        }
        x = rotated;
        let worst = (0..k)
            .map(|i| (theta[i] - prev[i]).abs() / theta[i].abs().max(1.0))
            .fold(0.0, f64::max);
        prev.copy_from_slice(&theta[..k]);
        if worst <= tol {
            x.truncate(k);
            return Ok((prev, x));
        }
    }
    Err(Error::Convergence(format!(
        "subspace iteration did not settle to {tol:.1e} within {max_iter} rounds"
    )))
}

// ---------------------------------------------------------------------------
// Small dense symmetric eigenproblems and linear solves
// ---------------------------------------------------------------------------

/// Eigenvalues and eigenvectors of a small dense symmetric matrix by cyclic
/// Jacobi rotations. Eigenvectors are returned as matrix columns:
/// `vectors[row][col]` pairs with `values[col]`. Values ascend.
pub fn jacobi_symmetric_eigen(a_in: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a_in.len();
    for row in a_in {
        if row.len() != n {
            return Err(Error::ParameterDomain("matrix is not square".into()));
        }
    }
    let mut a = a_in.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let diag_scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= 1e-15 * diag_scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[i][p];
                    let viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let mut vectors = vec![vec![0.0; n]; n];
    for (newcol, &oldcol) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row][newcol] = v[row][oldcol];
        }
    }
    Ok((values, vectors))
}

/// Solve a small dense linear system by LU with partial pivoting.
pub fn lu_solve(a_in: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = a_in.len();
    if b.len() != n {
        return Err(Error::ParameterDomain(format!(
            "right-hand side length {} does not match dimension {n}",
            b.len()
        )));
    }
    let mut a = a_in.to_vec();
    let mut x = b.to_vec();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-14 * scale {
            return Err(Error::NumericDegeneracy(format!(
                "singular system: pivot {:.3e} in column {col}",
                a[piv][col]
            )));
        }
        if piv != col {
            a.swap(piv, col);
            x.swap(piv, col);
        }
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tridiag_ql_known_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let vals = sym_tridiag_eigenvalues(&[2.0, 2.0], &[1.0]).unwrap();
        assert_relative_eq!(vals[0], 1.0, max_relative = 1e-13);
        assert_relative_eq!(vals[1], 3.0, max_relative = 1e-13);
    }

    #[test]
    fn tridiag_ql_matches_laplacian_formula() {
        // 1D Dirichlet Laplacian: eigenvalues 2 - 2 cos(k pi / (n+1))
        let n = 50;
        let vals = sym_tridiag_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert_relative_eq!(*v, exact, max_relative = 1e-11, epsilon = 1e-12);
        }
    }

    #[test]
    fn sturm_bisection_agrees_with_ql() {
        let n = 200;
        let diag: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + 2.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.5 + 0.3 * (i as f64 * 0.91).cos()).collect();
        let all = sym_tridiag_eigenvalues(&diag, &off).unwrap();
        let low = sym_tridiag_smallest(&diag, &off, 7).unwrap();
        for i in 0..7 {
            assert_relative_eq!(low[i], all[i], max_relative = 1e-11, epsilon = 1e-11);
        }
    }

    #[test]
    fn hessenberg_qr_real_and_complex() {
        // companion of (x-1)(x-2)(x-3)
        let roots = polynomial_roots(&[-6.0, 11.0, -6.0, 1.0]).unwrap();
        assert_eq!(roots.len(), 3);
        for (i, expect) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert_relative_eq!(roots[i].0, expect, max_relative = 1e-10);
            assert!(roots[i].1.abs() < 1e-10);
        }
        // x^2 + 1 has roots +-i
        let roots = polynomial_roots(&[1.0, 0.0, 1.0]).unwrap();
        assert!(roots[0].0.abs() < 1e-12 && roots[1].0.abs() < 1e-12);
        assert_relative_eq!(roots[0].1.abs(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(roots[0].1 + roots[1].1, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn real_eigenvalues_of_nonsymmetric_tridiagonal() {
        // tridiag(sub = -1, diag = 0, super = +1) is skew: pure imaginary spectrum
        let n = 5;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n - 1 {
            a[i][i + 1] = 1.0;
            a[i + 1][i] = -1.0;
        }
        let eigs = real_eigenvalues(&a).unwrap();
        for (re, _im) in &eigs {
            assert!(re.abs() < 1e-10);
        }
        // skew 5x5 has one zero eigenvalue and two conjugate pairs
        let mut ims: Vec<f64> = eigs.iter().map(|e| e.1).collect();
        ims.sort_by(|a, b| a.total_cmp(b));
        assert_relative_eq!(ims[0] + ims[4], 0.0, epsilon = 1e-12);
        assert_relative_eq!(ims[1] + ims[3], 0.0, epsilon = 1e-12);
        assert!(ims[2].abs() < 1e-10);
    }

    #[test]
    fn polynomial_roots_wide_coefficient_range() {
        // (x - 1e-3)(x - 1e3) = x^2 - 1000.001 x + 1; balancing keeps both roots
        let roots = polynomial_roots(&[1.0, -1000.001, 1.0]).unwrap();
        assert_relative_eq!(roots[0].0, 1e-3, max_relative = 1e-9);
        assert_relative_eq!(roots[1].0, 1e3, max_relative = 1e-9);
    }

    #[test]
    fn banded_cholesky_solves() {
        // pentadiagonal SPD matrix vs direct verification A x = b
        let n = 30;
        let mut a = BandMatrix::zeros(n, 2);
        for i in 0..n {
            a.add_at(i, i, 5.0);
            if i + 1 < n {
                a.add_at(i + 1, i, -1.5);
            }
            if i + 2 < n {
                a.add_at(i + 2, i, 0.5);
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.13).sin()).collect();
        let chol = band_cholesky(&a).unwrap();
        let mut x = b.clone();
        chol.solve_in_place(&mut x);
        let mut ax = vec![0.0; n];
        a.mul_vec(&x, &mut ax);
        for i in 0..n {
            assert_relative_eq!(ax[i], b[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn banded_cholesky_rejects_indefinite() {
        let mut a = BandMatrix::zeros(3, 1);
        a.add_at(0, 0, 1.0);
        a.add_at(1, 1, -2.0);
        a.add_at(2, 2, 1.0);
        assert!(band_cholesky(&a).is_err());
    }

    #[test]
    fn subspace_iteration_matches_laplacian() {
        let n = 400;
        let mut a = BandMatrix::zeros(n, 1);
        for i in 0..n {
            a.add_at(i, i, 2.0);
            if i + 1 < n {
                a.add_at(i + 1, i, -1.0);
            }
        }
        let (vals, vecs) = banded_smallest_eigen(&a, 4, 1e-12, 300, 7).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert_relative_eq!(*v, exact, max_relative = 1e-8, epsilon = 1e-10);
        }
        // residual check on the first vector
        let mut r = vec![0.0; n];
        a.mul_vec(&vecs[0], &mut r);
        for i in 0..n {
            r[i] -= vals[0] * vecs[0][i];
        }
        assert!(dot(&r, &r).sqrt() < 1e-7);
    }

    #[test]
    fn jacobi_small_symmetric() {
        let a = vec![
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, -0.5],
            vec![0.5, -0.5, 2.0],
        ];
        let (vals, vecs) = jacobi_symmetric_eigen(&a).unwrap();
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
        // verify A v = lambda v columnwise
        for col in 0..3 {
            for row in 0..3 {
                let av: f64 = (0..3).map(|j| a[row][j] * vecs[j][col]).sum();
                assert_relative_eq!(av, vals[col] * vecs[row][col], epsilon = 1e-10);
            }
        }
        // trace and determinant invariants
        assert_relative_eq!(vals.iter().sum::<f64>(), 9.0, max_relative = 1e-12);
    }

    #[test]
    fn lu_solves_and_detects_singularity() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = lu_solve(&a, &[5.0, 10.0]).unwrap();
        assert_relative_eq!(x[0], 1.0, max_relative = 1e-13);
        assert_relative_eq!(x[1], 3.0, max_relative = 1e-13);
        let sing = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(lu_solve(&sing, &[1.0, 2.0]).is_err());
    }
}
