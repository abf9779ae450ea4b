//! Eigenvalues of small dense real nonsymmetric matrices at arbitrary precision.
//!
//! Balance (Parlett–Reinsch, radix 2) → Hessenberg by stabilized elementary
//! similarity transforms → Francis double-shift QR. Eigenvectors for the
//! residual check come from complex inverse iteration on the original matrix.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::real::Real;

/// Default cap on QR sweeps over all deflations.
pub const MAX_QR_SWEEPS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Complex {
        Complex { re, im }
    }

    pub fn real(re: Real) -> Complex {
        let im = re.zero_like();
        Complex { re, im }
    }

    pub fn conj(&self) -> Complex {
        Complex::new(self.re.clone(), -&self.im)
    }

    /// |re| + |im|, cheap and good enough for pivoting and norms.
    pub fn l1(&self) -> Real {
        self.re.abs() + self.im.abs()
    }

    pub fn abs(&self) -> Real {
        (&self.re * &self.re + &self.im * &self.im).sqrt()
    }

    fn add(&self, o: &Complex) -> Complex {
        Complex::new(&self.re + &o.re, &self.im + &o.im)
    }

    fn sub(&self, o: &Complex) -> Complex {
        Complex::new(&self.re - &o.re, &self.im - &o.im)
    }

    fn mul(&self, o: &Complex) -> Complex {
        Complex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    fn mul_real(&self, k: &Real) -> Complex {
        Complex::new(&self.re * k, &self.im * k)
    }

    fn div(&self, o: &Complex) -> Complex {
        let den = &o.re * &o.re + &o.im * &o.im;
        Complex::new(
            (&self.re * &o.re + &self.im * &o.im) / &den,
            (&self.im * &o.re - &self.re * &o.im) / &den,
        )
    }
}

/// Descending real part, then descending imaginary part.
pub fn sort_eigenvalues(values: &mut [Complex]) {
    values.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
    });
}

fn check_square(a: &[Vec<Real>]) -> Result<usize> {
    let n = a.len();
    if n == 0 || a.iter().any(|row| row.len() != n) {
        return Err(Error::Domain("eigenvalues need a non-empty square matrix".into()));
    }
    if a.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    Ok(n)
}

/// ∞-norm (max absolute row sum).
pub fn inf_norm(a: &[Vec<Real>]) -> Real {
    a.iter()
        .map(|row| row.iter().map(Real::abs).sum::<Real>())
        .fold(a[0][0].zero_like(), |m, v| m.max(&v))
}

fn balance(a: &mut [Vec<Real>]) {
    let n = a.len();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = a[0][0].zero_like();
            let mut r = c.clone();
            for j in (0..n).filter(|&j| j != i) {
                c += a[j][i].abs();
                r += a[i][j].abs();
            }
            if c.is_zero() || r.is_zero() {
                continue;
            }
            let s = &c + &r;
            let mut k = 0i32;
            let mut g = r.mul_exp2(-1);
            while c < g {
                k += 1;
                c = c.mul_exp2(2);
            }
            g = r.mul_exp2(1);
            while c > g {
                k -= 1;
                c = c.mul_exp2(-2);
            }
            if ((c + &r).mul_exp2(-k)) < s * 0.95 {
                done = false;
                for v in a[i].iter_mut() {
                    *v = v.mul_exp2(-k);
                }
                for row in a.iter_mut() {
                    row[i] = row[i].mul_exp2(k);
                }
            }
        }
    }
}

fn to_hessenberg(a: &mut [Vec<Real>]) {
    let n = a.len();
    for m in 1..n.saturating_sub(1) {
        let mut x = a[0][0].zero_like();
        let mut piv = m;
        for j in m..n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1].clone();
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x.is_zero() {
            continue;
        }
        for i in m + 1..n {
            let y = a[i][m - 1].clone();
            if y.is_zero() {
                continue;
            }
            let y = y / &x;
            a[i][m - 1] = y.zero_like();
            for j in m..n {
                let t = &y * &a[m][j];
                a[i][j] -= &t;
            }
            for row in a.iter_mut() {
                let t = &y * &row[i];
                row[m] += &t;
            }
        }
    }
}

fn sign_of(mag: &Real, s: &Real) -> Real {
    if s.is_sign_negative() {
        -mag.abs()
    } else {
        mag.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; destroys `a`.
fn hqr(a: &mut [Vec<Real>], max_sweeps: usize) -> Result<Vec<Complex>> {
    let n = a.len() as isize;
    let zero = a[0][0].zero_like();
    let prec = zero.prec();
    let eps = Real::exp2i(prec, -(prec as i32));
    let mut wr: Vec<Option<Complex>> = vec![None; n as usize];
    let mut anorm = zero.clone();
    for i in 0..n as usize {
        for j in i.saturating_sub(1)..n as usize {
            anorm += a[i][j].abs();
        }
    }
    macro_rules! at {
        ($i:expr, $j:expr) => {
            a[($i) as usize][($j) as usize]
        };
    }
    let mut nn = n - 1;
    let mut t = zero.clone();
    let mut sweeps = 0usize;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = at!(l - 1, l - 1).abs() + at!(l, l).abs();
                if s.is_zero() {
                    s = anorm.clone();
                }
                if at!(l, l - 1).abs() <= &eps * &s {
                    at!(l, l - 1) = zero.clone();
                    break;
                }
                l -= 1;
            }
            let mut x = at!(nn, nn).clone();
            if l == nn {
                wr[nn as usize] = Some(Complex::real(&x + &t));
                nn -= 1;
            } else {
                let mut y = at!(nn - 1, nn - 1).clone();
                let mut w = &at!(nn, nn - 1) * &at!(nn - 1, nn);
                if l == nn - 1 {
                    let p = (&y - &x) * 0.5;
                    let q = &p * &p + &w;
                    let z = q.abs().sqrt();
                    x += &t;
                    if !q.is_sign_negative() {
                        let z = &p + sign_of(&z, &p);
                        let hi = &x + &z;
                        let lo = if z.is_zero() { hi.clone() } else { &x - &w / &z };
                        wr[(nn - 1) as usize] = Some(Complex::real(hi));
                        wr[nn as usize] = Some(Complex::real(lo));
                    } else {
                        let c = Complex::new(&x + &p, -z);
                        wr[(nn - 1) as usize] = Some(c.conj());
                        wr[nn as usize] = Some(c);
                    }
                    nn -= 2;
                } else {
                    if sweeps >= max_sweeps {
                        return Err(Error::Convergence(format!(
                            "no deflation after {max_sweeps} QR sweeps"
                        )));
                    }
                    if its > 0 && its % 10 == 0 {
                        // Exceptional shift.
                        t += &x;
                        for i in 0..=nn {
                            at!(i, i) -= &x;
                        }
                        let s = at!(nn, nn - 1).abs() + at!(nn - 1, nn - 2).abs();
                        x = &s * 0.75;
                        y = x.clone();
                        w = -0.4375 * &s * &s;
                    }
                    its += 1;
                    sweeps += 1;
                    let (mut p, mut q, mut r) = (zero.clone(), zero.clone(), zero.clone());
                    let mut m = nn - 2;
                    while m >= l {
                        let z = at!(m, m).clone();
                        let rr = &x - &z;
                        let ss = &y - &z;
                        p = (&rr * &ss - &w) / &at!(m + 1, m) + &at!(m, m + 1);
                        q = &at!(m + 1, m + 1) - &z - &rr - &ss;
                        r = at!(m + 2, m + 1).clone();
                        let s = p.abs() + q.abs() + r.abs();
                        p = p / &s;
                        q = q / &s;
                        r = r / &s;
                        if m == l {
                            break;
                        }
                        let u = at!(m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs() * (at!(m - 1, m - 1).abs() + z.abs() + at!(m + 1, m + 1).abs());
                        if u <= &eps * &v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        at!(i + 2, i) = zero.clone();
                        if i != m {
                            at!(i + 2, i - 1) = zero.clone();
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = at!(k, k - 1).clone();
                            q = at!(k + 1, k - 1).clone();
                            r = if k + 1 != nn { at!(k + 2, k - 1).clone() } else { zero.clone() };
                            x = p.abs() + q.abs() + r.abs();
                            if !x.is_zero() {
                                p = p / &x;
                                q = q / &x;
                                r = r / &x;
                            }
                        }
                        let s = sign_of(&(&p * &p + &q * &q + &r * &r).sqrt(), &p);
                        if !s.is_zero() {
                            if k == m {
                                if l != m {
                                    at!(k, k - 1) = -&at!(k, k - 1);
                                }
                            } else {
                                at!(k, k - 1) = -(&s * &x);
                            }
                            p += &s;
                            x = &p / &s;
                            y = &q / &s;
                            let z = &r / &s;
                            q = &q / &p;
                            r = &r / &p;
                            for j in k..=nn {
                                let mut pp = &at!(k, j) + &q * &at!(k + 1, j);
                                if k + 1 != nn {
                                    pp += &r * &at!(k + 2, j);
                                    let d = &pp * &z;
                                    at!(k + 2, j) -= &d;
                                }
                                let d = &pp * &y;
                                at!(k + 1, j) -= &d;
                                let d = &pp * &x;
                                at!(k, j) -= &d;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = &x * &at!(i, k) + &y * &at!(i, k + 1);
                                if k + 1 != nn {
                                    pp += &z * &at!(i, k + 2);
                                    let d = &pp * &r;
                                    at!(i, k + 2) -= &d;
                                }
                                let d = &pp * &q;
                                at!(i, k + 1) -= &d;
                                at!(i, k) -= &pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(wr.into_iter().map(|v| v.expect("every slot deflated")).collect())
}

/// Eigenvalues of `a`, sorted by descending real part then imaginary part.
pub fn eigenvalues(a: &[Vec<Real>], max_sweeps: usize) -> Result<Vec<Complex>> {
    let n = check_square(a)?;
    if n == 1 {
        return Ok(vec![Complex::real(a[0][0].clone())]);
    }
    let mut h = a.to_vec();
    balance(&mut h);
    to_hessenberg(&mut h);
    for (i, row) in h.iter_mut().enumerate() {
        for v in row.iter_mut().take(i.saturating_sub(1)) {
            *v = v.zero_like();
        }
    }
    let mut vals = hqr(&mut h, max_sweeps)?;
    sort_eigenvalues(&mut vals);
    Ok(vals)
}

/// Solves (A − μI)x = b by Gaussian elimination with partial pivoting; exact
/// zero pivots are replaced by `tiny` so the iteration survives an exact shift.
fn shifted_solve(a: &[Vec<Real>], mu: &Complex, b: &[Complex], tiny: &Real) -> Vec<Complex> {
    let n = a.len();
    let mut m: Vec<Vec<Complex>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| {
                    let c = Complex::real(v.clone());
                    if i == j {
                        c.sub(mu)
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].l1().partial_cmp(&m[j][col].l1()).unwrap_or(Ordering::Equal))
            .unwrap_or(col);
        m.swap(col, piv);
        rhs.swap(col, piv);
        if m[col][col].l1().is_zero() {
            m[col][col] = Complex::real(tiny.clone());
        }
        for i in col + 1..n {
            let f = m[i][col].div(&m[col][col]);
            if f.l1().is_zero() {
                continue;
            }
            for j in col..n {
                let d = f.mul(&m[col][j]);
                m[i][j] = m[i][j].sub(&d);
            }
            let d = f.mul(&rhs[col]);
            rhs[i] = rhs[i].sub(&d);
        }
    }
    let mut x = rhs.clone();
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for j in i + 1..n {
            acc = acc.sub(&m[i][j].mul(&x[j]));
        }
        x[i] = acc.div(&m[i][i]);
    }
    x
}

/// An approximate eigenvector for `lambda` by two steps of inverse iteration,
/// normalized to unit max-modulus.
pub fn eigenvector(a: &[Vec<Real>], lambda: &Complex) -> Vec<Complex> {
    let n = a.len();
    let prec = a[0][0].prec();
    let norm = inf_norm(a).max(&Real::one(prec));
    let shift = &norm * Real::exp2i(prec, -(3 * prec as i32) / 4);
    let mu = lambda.add(&Complex::real(shift));
    let tiny = &norm * Real::exp2i(prec, -(prec as i32));
    let mut v: Vec<Complex> = (0..n)
        .map(|i| Complex::real(Real::one(prec) + Real::ratio(prec, i as i64, 7)))
        .collect();
    for _ in 0..3 {
        v = shifted_solve(a, &mu, &v, &tiny);
        let scale = v.iter().map(Complex::l1).fold(Real::zero(prec), |m, x| m.max(&x));
        if scale.is_zero() || !scale.is_finite() {
            break;
        }
        v = v.iter().map(|c| c.mul_real(&(1.0 / &scale))).collect();
    }
    v
}

/// ‖(A − λI)v‖∞ / ‖v‖∞.
pub fn residual(a: &[Vec<Real>], lambda: &Complex, v: &[Complex]) -> Real {
    let prec = a[0][0].prec();
    let vnorm = v.iter().map(Complex::l1).fold(Real::zero(prec), |m, x| m.max(&x));
    let mut worst = Real::zero(prec);
    for (i, row) in a.iter().enumerate() {
        let mut acc = Complex::real(Real::zero(prec)).sub(&lambda.mul(&v[i]));
        for (aij, vj) in row.iter().zip(v) {
            acc = acc.add(&vj.mul_real(aij));
        }
        worst = worst.max(&acc.l1());
    }
    if vnorm.is_zero() {
        worst
    } else {
        worst / vnorm
    }
}
