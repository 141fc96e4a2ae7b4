use std::f64::consts::PI;

use crate::{Error, Result};

/// Associated Legendre function `P_l^m(x)` without the Condon–Shortley phase.
///
/// Evaluated by the upward recurrence in `l` for fixed `m`, seeded with the
/// closed form `P_m^m = (2m-1)!! (1-x^2)^{m/2}`.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> Result<f64> {
    if m > l {
        return Err(Error::Domain(format!("order m={m} exceeds degree l={l}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("argument x={x} outside [-1, 1]")));
    }
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * s;
    }
    if l == m {
        return Ok(pmm);
    }
    let mut prev = pmm;
    let mut cur = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * x * cur - (ll + m - 1) as f64 * prev) / (ll - m) as f64;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Table of `N_l^m P_l^m(x)` for all `0 <= m <= l <= L`.
///
/// The normalization is folded into the recurrence so no factorials are
/// formed; this stays well conditioned far beyond the degrees used here.
#[derive(Debug, Clone)]
pub struct NormalizedLegendre {
    degree: usize,
    values: Vec<f64>,
    // recurrence constants a_lm, b_lm in triangular layout
    a: Vec<f64>,
    b: Vec<f64>,
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl NormalizedLegendre {
    pub fn new(degree: usize) -> Self {
        let len = tri(degree, degree) + 1;
        let mut a = vec![0.0; len];
        let mut b = vec![0.0; len];
        for l in 2..=degree {
            for m in 0..l.saturating_sub(1) {
                let (lf, mf) = (l as f64, m as f64);
                a[tri(l, m)] = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lp = lf - 1.0;
                b[tri(l, m)] = ((lp * lp - mf * mf) / (4.0 * lp * lp - 1.0)).sqrt();
            }
        }
        Self {
            degree,
            values: vec![0.0; len],
            a,
            b,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Fills the table for `x = cos(theta)`; `sin_theta` must be `sqrt(1 - x^2) >= 0`.
    pub fn compute(&mut self, x: f64, sin_theta: f64) {
        let v = &mut self.values;
        v[0] = (0.25 / PI).sqrt();
        for m in 1..=self.degree {
            let mf = m as f64;
            v[tri(m, m)] = v[tri(m - 1, m - 1)] * sin_theta * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
        }
        for m in 0..self.degree {
            v[tri(m + 1, m)] = x * ((2 * m + 3) as f64).sqrt() * v[tri(m, m)];
        }
        for m in 0..self.degree.saturating_sub(1) {
            for l in (m + 2)..=self.degree {
                let k = tri(l, m);
                v[k] = self.a[k] * (x * v[tri(l - 1, m)] - self.b[k] * v[tri(l - 2, m)]);
            }
        }
    }

    #[inline]
    pub fn get(&self, l: usize, m: usize) -> f64 {
        self.values[tri(l, m)]
    }
}
