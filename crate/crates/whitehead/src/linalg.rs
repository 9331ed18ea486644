//! Dense matrices and univariate polynomials over a [`FieldTower`].

use crate::error::{invalid, Error, Result};
use crate::fields::{Elem, FieldTower};

pub type Matrix = Vec<Vec<Elem>>;

/// Univariate polynomial, constant term first, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(f: &FieldTower, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| f.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(f: &FieldTower, c: Elem) -> Self {
        Poly::new(f, vec![c])
    }

    /// `X - c`.
    pub fn linear(f: &FieldTower, c: &Elem) -> Self {
        Poly::new(f, vec![f.neg(c), f.one()])
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, f: &FieldTower, i: usize) -> Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn add(&self, f: &FieldTower, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(f, (0..n).map(|i| f.add(&self.coeff(f, i), &o.coeff(f, i))).collect())
    }

    pub fn sub(&self, f: &FieldTower, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(f, (0..n).map(|i| f.sub(&self.coeff(f, i), &o.coeff(f, i))).collect())
    }

    pub fn mul(&self, f: &FieldTower, o: &Poly) -> Poly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![f.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    pub fn scale(&self, f: &FieldTower, c: &Elem) -> Poly {
        Poly::new(f, self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    pub fn pow(&self, f: &FieldTower, e: u32) -> Poly {
        let mut r = Poly::constant(f, f.one());
        for _ in 0..e {
            r = r.mul(f, self);
        }
        r
    }

    pub fn eval(&self, f: &FieldTower, x: &Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn eq(&self, f: &FieldTower, o: &Poly) -> bool {
        self.sub(f, o).coeffs.is_empty()
    }

    pub fn is_monic(&self, f: &FieldTower) -> bool {
        self.coeffs.last().is_some_and(|c| f.is_one(c))
    }

    /// Exact monic `n`-th root of a monic polynomial that is a perfect `n`-th power.
    /// Errors when no such root exists.
    pub fn monic_root(&self, f: &FieldTower, n: u32) -> Result<Poly> {
        let deg = self
            .degree()
            .ok_or_else(|| Error::Invalid("root of the zero polynomial".into()))?;
        if !self.is_monic(f) || deg % n as usize != 0 {
            return invalid("polynomial is not a monic perfect power");
        }
        let ch = f.characteristic();
        let (mut g, mut k) = (self.clone(), n);
        while ch > 0 && k as u64 % ch == 0 {
            g = g.frobenius_root(f, ch)?;
            k /= ch as u32;
        }
        let root = if k == 1 { g.clone() } else { g.tame_root(f, k)? };
        if !root.pow(f, n).eq(f, self) {
            return invalid("polynomial is not a perfect power");
        }
        Ok(root)
    }

    /// Root of `g = h^p` in characteristic `p`: `h(X)^p = h^(p)(X^p)`.
    fn frobenius_root(&self, f: &FieldTower, p: u64) -> Result<Poly> {
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i as u64 % p != 0 {
                if !f.is_zero(c) {
                    return invalid("polynomial is not a p-th power");
                }
                continue;
            }
            let t = f.is_nth_power(c, p).or_else(|e| {
                if f.is_zero(c) {
                    Ok(crate::fields::PowerTest {
                        is_power: true,
                        witness: Some(f.zero()),
                        certificate: String::new(),
                    })
                } else {
                    Err(e)
                }
            })?;
            let w = match (t.is_power, t.witness) {
                (true, Some(w)) => w,
                (true, None) => {
                    return Err(Error::Unsupported("coefficient root not representable".into()))
                }
                _ => return invalid("coefficient is not a p-th power"),
            };
            out.push(w);
        }
        Ok(Poly::new(f, out))
    }

    /// Root for `k` invertible in the field, by coefficient recursion from the top.
    fn tame_root(&self, f: &FieldTower, k: u32) -> Result<Poly> {
        let deg = self.degree().unwrap();
        let m = deg / k as usize;
        // reversed coefficients: g(X) = X^deg * G(1/X); root H with H^k = G, H(0) = 1
        let gr: Vec<Elem> = (0..=deg).map(|i| self.coeff(f, deg - i)).collect();
        let kk = f.int(k as i64);
        let mut h = vec![f.one()];
        for j in 1..=m {
            // coefficient j of H^k with h_j unknown is k*h_j + (terms from lower h)
            let mut partial = h.clone();
            partial.push(f.zero());
            let pk = Poly::new(f, partial).pow(f, k);
            let rest = pk.coeff(f, j);
            let hj = f.div(&f.sub(&gr[j], &rest), &kk)?;
            h.push(hj);
        }
        let coeffs: Vec<Elem> = (0..=m).map(|i| h[m - i].clone()).collect();
        Ok(Poly::new(f, coeffs))
    }

    pub fn fmt(&self, f: &FieldTower, var: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if f.is_zero(c) {
                continue;
            }
            let cs = f.fmt_elem(c);
            let cs = if cs.contains([' ', '+']) { format!("({cs})") } else { cs };
            parts.push(match i {
                0 => cs,
                1 if cs == "1" => var.to_string(),
                1 => format!("{cs}*{var}"),
                _ if cs == "1" => format!("{var}^{i}"),
                _ => format!("{cs}*{var}^{i}"),
            });
        }
        parts.join(" + ")
    }
}

pub fn zeros(f: &FieldTower, r: usize, c: usize) -> Matrix {
    vec![vec![f.zero(); c]; r]
}

pub fn identity(f: &FieldTower, n: usize) -> Matrix {
    let mut m = zeros(f, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = f.one();
    }
    m
}

pub fn mat_mul(f: &FieldTower, a: &Matrix, b: &Matrix) -> Matrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = zeros(f, n, m);
    for i in 0..n {
        for l in 0..k {
            if f.is_zero(&a[i][l]) {
                continue;
            }
            for j in 0..m {
                if !f.is_zero(&b[l][j]) {
                    out[i][j] = f.add(&out[i][j], &f.mul(&a[i][l], &b[l][j]));
                }
            }
        }
    }
    out
}

pub fn mat_vec(f: &FieldTower, a: &Matrix, v: &[Elem]) -> Vec<Elem> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !f.is_zero(x) && !f.is_zero(y))
                .fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
        })
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn trace(f: &FieldTower, a: &Matrix) -> Elem {
    (0..a.len()).fold(f.zero(), |acc, i| f.add(&acc, &a[i][i]))
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(f: &FieldTower, a: &mut Matrix) -> Result<Vec<usize>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !f.is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(r, pr);
        let inv = f.inv(&a[r][c])?;
        for j in c..cols {
            a[r][j] = f.mul(&a[r][j], &inv);
        }
        for i in 0..rows {
            if i != r && !f.is_zero(&a[i][c]) {
                let factor = a[i][c].clone();
                for j in c..cols {
                    if !f.is_zero(&a[r][j]) {
                        let d = f.mul(&factor, &a[r][j]);
                        a[i][j] = f.sub(&a[i][j], &d);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

pub fn rank(f: &FieldTower, a: &Matrix) -> Result<usize> {
    let mut m = a.clone();
    Ok(rref(f, &mut m)?.len())
}

/// Basis of the right nullspace `{v : a v = 0}`.
pub fn nullspace(f: &FieldTower, a: &Matrix, cols: usize) -> Result<Vec<Vec<Elem>>> {
    let mut m = a.clone();
    let pivots = rref(f, &mut m)?;
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &fc in &free {
        let mut v = vec![f.zero(); cols];
        v[fc] = f.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(&m[r][fc]);
        }
        out.push(v);
    }
    Ok(out)
}

/// Solve `a x = b`; returns one solution if the system is consistent.
pub fn solve(f: &FieldTower, a: &Matrix, b: &[Elem]) -> Result<Option<Vec<Elem>>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(f, &mut aug)?;
    if pivots.contains(&cols) {
        return Ok(None);
    }
    let mut x = vec![f.zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][cols].clone();
    }
    Ok(Some(x))
}

pub fn inverse(f: &FieldTower, a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            r
        })
        .collect();
    let piv = rref(f, &mut aug)?;
    if piv.len() < n || piv[n - 1] != n - 1 {
        return invalid("singular matrix");
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Characteristic polynomial `det(X I - a)` via reduction to Hessenberg form.
pub fn char_poly(f: &FieldTower, a: &Matrix) -> Result<Poly> {
    let n = a.len();
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !f.is_zero(&h[i][m - 1])) else {
            continue;
        };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let inv = f.inv(&h[m][m - 1])?;
        for i in m + 1..n {
            if f.is_zero(&h[i][m - 1]) {
                continue;
            }
            let u = f.mul(&h[i][m - 1], &inv);
            for j in 0..n {
                let d = f.mul(&u, &h[m][j]);
                h[i][j] = f.sub(&h[i][j], &d);
            }
            for row in h.iter_mut() {
                let d = f.mul(&u, &row[i]);
                row[m] = f.add(&row[m], &d);
            }
        }
    }
    // recurrence on leading principal submatrices of the Hessenberg matrix
    let mut p: Vec<Poly> = vec![Poly::constant(f, f.one())];
    for m in 1..=n {
        let x_minus = Poly::new(f, vec![f.neg(&h[m - 1][m - 1]), f.one()]);
        let mut pm = x_minus.mul(f, &p[m - 1]);
        let mut t = f.one();
        for i in 1..m {
            t = f.mul(&t, &h[m - i][m - i - 1]);
            let c = f.mul(&t, &h[m - i - 1][m - 1]);
            pm = pm.sub(f, &p[m - i - 1].scale(f, &c));
        }
        p.push(pm);
    }
    Ok(p.pop().unwrap())
}

/// Diagonalise a symmetric bilinear form (characteristic ≠ 2). Returns the
/// nonzero diagonal entries; the number of zeros dropped is the radical dimension.
/// Bit size of a rational entry; other entries have height 0.
fn height(f: &FieldTower, x: &Elem) -> u64 {
    match f.as_rational(x) {
        Some(r) if matches!(f, FieldTower::Rationals) => r.numer().bits() + r.denom().bits(),
        _ => 0,
    }
}

pub fn diagonalize_symmetric(f: &FieldTower, g: &Matrix) -> Result<(Vec<Elem>, usize)> {
    if f.characteristic() == 2 {
        return invalid("symmetric diagonalisation requires characteristic ≠ 2");
    }
    let mut m = g.clone();
    let mut n = m.len();
    let mut diag = Vec::new();
    let mut radical = 0;
    while n > 0 {
        let piv = (0..n)
            .filter(|&i| !f.is_zero(&m[i][i]))
            .min_by_key(|&i| height(f, &m[i][i]));
        let piv = match piv {
            Some(i) => i,
            None => {
                let pair = (0..n).find_map(|i| {
                    (0..n).find(|&j| j != i && !f.is_zero(&m[i][j])).map(|j| (i, j))
                });
                match pair {
                    None => {
                        radical += n;
                        break;
                    }
                    Some((i, j)) => {
                        // e_i <- e_i + e_j
                        for k in 0..n {
                            let v = m[j][k].clone();
                            m[i][k] = f.add(&m[i][k], &v);
                        }
                        for row in m.iter_mut().take(n) {
                            let v = row[j].clone();
                            row[i] = f.add(&row[i], &v);
                        }
                        i
                    }
                }
            }
        };
        m.swap(piv, n - 1);
        for row in m.iter_mut() {
            row.swap(piv, n - 1);
        }
        let d = m[n - 1][n - 1].clone();
        let dinv = f.inv(&d)?;
        for i in 0..n - 1 {
            if f.is_zero(&m[i][n - 1]) {
                continue;
            }
            let c = f.mul(&m[i][n - 1], &dinv);
            for j in 0..n - 1 {
                let s = f.mul(&c, &m[n - 1][j]);
                m[i][j] = f.sub(&m[i][j], &s);
            }
        }
        diag.push(d);
        n -= 1;
        m.truncate(n);
        for row in m.iter_mut() {
            row.truncate(n);
        }
    }
    Ok((diag, radical))
}
