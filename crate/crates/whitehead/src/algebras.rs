//! Central simple algebras by structure constants: symbol algebras, p-algebras,
//! cyclic Kummer and Artin–Schreier presentations and their tensor products,
//! reduced characteristic polynomials, involutions and Pfaffian data.

use std::fmt;

use rand::Rng;

use crate::error::{invalid, unsupported, Error, Result};
use crate::fields::{Elem, FieldTower};
use crate::forms::{self, Isotropy, QuadraticForm};
use crate::linalg::{self, Matrix, Poly};

/// Element of an algebra as coordinates on its basis.
pub type AlgElem = Vec<Elem>;

const GEN_POOL: [&str; 8] = ["x", "y", "z", "w", "r", "s", "m", "n"];

/// Presentation tag of an algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Presentation {
    /// `x^n = a`, `y^n = b`, `xy = ζ yx`.
    Symbol { a: Elem, b: Elem, n: u64, zeta: Elem },
    /// `x^p - x = a`, `y^p = b`, `xy = y(x+1)`.
    PAlgebra { a: Elem, b: Elem, p: u64 },
    /// `(k(α)/k, σ, b)` with `α^n = a`, `σ(α) = ζα`, `yαy⁻¹ = σ(α)`, `y^n = b`.
    CyclicKummer { a: Elem, b: Elem, n: u64, zeta: Elem },
    /// `(k(℘⁻¹a)/k, σ, b)` with `σ(α) = α + 1`.
    CyclicArtinSchreier { a: Elem, b: Elem, p: u64 },
    Tensor(Box<Algebra>, Box<Algebra>),
    Opaque,
}

/// Associative unital algebra given by a sparse structure-constant table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    base: FieldTower,
    degree: usize,
    gens: Vec<String>,
    monos: Vec<Vec<u32>>,
    table: Vec<Vec<Vec<(usize, Elem)>>>,
    trace_vec: Vec<Elem>,
    tag: Presentation,
}

impl Algebra {
    fn from_table(
        base: &FieldTower,
        gens: Vec<String>,
        monos: Vec<Vec<u32>>,
        table: Vec<Vec<Vec<(usize, Elem)>>>,
        tag: Presentation,
    ) -> Result<Algebra> {
        let dim = monos.len();
        let degree = (dim as f64).sqrt().round() as usize;
        if degree * degree != dim {
            return invalid("algebra dimension is not a square");
        }
        let f = base;
        let trace_vec = (0..dim)
            .map(|j| {
                (0..dim).fold(f.zero(), |acc, i| {
                    table[j][i]
                        .iter()
                        .filter(|(k, _)| *k == i)
                        .fold(acc, |acc, (_, c)| f.add(&acc, c))
                })
            })
            .collect();
        let alg = Algebra { base: base.clone(), degree, gens, monos, table, trace_vec, tag };
        alg.check_associative()?;
        Ok(alg)
    }

    fn check_associative(&self) -> Result<()> {
        let d = self.dim();
        let f = &self.base;
        let unit = self.one();
        for i in 0..d {
            let e = self.basis(i);
            if !self.eq(&self.mul(&unit, &e), &e) || !self.eq(&self.mul(&e, &unit), &e) {
                return Err(Error::Invalid("basis element 0 is not the unit".into()));
            }
        }
        let gens = self.generator_indices();
        for &i in &gens {
            for j in 0..d {
                for k in 0..d {
                    let (a, b, c) = (self.basis(i), self.basis(j), self.basis(k));
                    let l = self.mul(&self.mul(&a, &b), &c);
                    let r = self.mul(&a, &self.mul(&b, &c));
                    if !l.iter().zip(&r).all(|(x, y)| f.eq(x, y)) {
                        return Err(Error::Invalid("structure constants are not associative".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Indices of the basis monomials that are single generators.
    fn generator_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.monos[i].iter().sum::<u32>() == 1)
            .collect()
    }

    pub fn base(&self) -> &FieldTower {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.monos.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn tag(&self) -> &Presentation {
        &self.tag
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|i| self.label(i)).collect()
    }

    pub fn label(&self, i: usize) -> String {
        let mut s = String::new();
        for (g, &e) in self.gens.iter().zip(&self.monos[i]) {
            match e {
                0 => {}
                1 => s.push_str(g),
                _ => s.push_str(&format!("{g}^{e}")),
            }
        }
        if s.is_empty() {
            "1".into()
        } else {
            s
        }
    }

    /// Index of the basis monomial equal to a generator.
    pub fn gen_index(&self, g: &str) -> Option<usize> {
        let k = self.gens.iter().position(|x| x == g)?;
        (0..self.dim()).find(|&i| {
            self.monos[i].iter().enumerate().all(|(j, &e)| e == u32::from(j == k))
        })
    }

    pub fn zero(&self) -> AlgElem {
        vec![self.base.zero(); self.dim()]
    }

    pub fn one(&self) -> AlgElem {
        self.basis(0)
    }

    pub fn basis(&self, i: usize) -> AlgElem {
        let mut v = self.zero();
        v[i] = self.base.one();
        v
    }

    pub fn scalar(&self, c: &Elem) -> AlgElem {
        let mut v = self.zero();
        v[0] = c.clone();
        v
    }

    pub fn add(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    pub fn sub(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &AlgElem) -> AlgElem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    pub fn scale(&self, c: &Elem, a: &AlgElem) -> AlgElem {
        a.iter().map(|x| self.base.mul(c, x)).collect()
    }

    pub fn eq(&self, a: &AlgElem, b: &AlgElem) -> bool {
        a.iter().zip(b).all(|(x, y)| self.base.eq(x, y))
    }

    pub fn is_zero(&self, a: &AlgElem) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }

    pub fn mul(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        let f = &self.base;
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if f.is_zero(y) {
                    continue;
                }
                let xy = f.mul(x, y);
                for (k, c) in &self.table[i][j] {
                    out[*k] = f.add(&out[*k], &f.mul(&xy, c));
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &AlgElem, e: u32) -> AlgElem {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Matrix of left multiplication `z ↦ a z`; column `j` is `a·e_j`.
    pub fn left_mult(&self, a: &AlgElem) -> Matrix {
        let d = self.dim();
        let cols: Vec<AlgElem> = (0..d).map(|j| self.mul(a, &self.basis(j))).collect();
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Trace of left multiplication.
    pub fn regular_trace(&self, a: &AlgElem) -> Elem {
        let f = &self.base;
        a.iter()
            .zip(&self.trace_vec)
            .fold(f.zero(), |acc, (x, t)| f.add(&acc, &f.mul(x, t)))
    }

    pub fn inverse(&self, a: &AlgElem) -> Result<AlgElem> {
        let l = self.left_mult(a);
        match linalg::solve(&self.base, &l, &self.one())? {
            Some(z) => Ok(z),
            None => invalid("element is not invertible"),
        }
    }

    /// Reduced characteristic polynomial `Prd`.
    pub fn reduced_char_poly(&self, a: &AlgElem) -> Result<Poly> {
        let f = &self.base;
        let n = self.degree;
        let ch = f.characteristic();
        if ch == 0 || ch > n as u64 {
            let inv_n = f.inv(&f.int(n as i64))?;
            let mut p = Vec::with_capacity(n + 1);
            let mut pw = self.one();
            p.push(f.int(n as i64));
            for _ in 1..=n {
                pw = self.mul(&pw, a);
                p.push(f.mul(&self.regular_trace(&pw), &inv_n));
            }
            let mut e = vec![f.one()];
            for k in 1..=n {
                let mut acc = f.zero();
                for i in 1..=k {
                    let t = f.mul(&e[k - i], &p[i]);
                    acc = if i % 2 == 1 { f.add(&acc, &t) } else { f.sub(&acc, &t) };
                }
                e.push(f.mul(&acc, &f.inv(&f.int(k as i64))?));
            }
            let mut coeffs = vec![f.zero(); n + 1];
            for (k, ek) in e.iter().enumerate() {
                coeffs[n - k] = if k % 2 == 0 { ek.clone() } else { f.neg(ek) };
            }
            return Ok(Poly::new(f, coeffs));
        }
        let cp = linalg::char_poly(f, &self.left_mult(a))?;
        cp.monic_root(f, n as u32)
    }

    pub fn reduced_norm(&self, a: &AlgElem) -> Result<Elem> {
        let p = self.reduced_char_poly(a)?;
        let c = p.coeff(&self.base, 0);
        Ok(if self.degree % 2 == 0 { c } else { self.base.neg(&c) })
    }

    pub fn reduced_trace(&self, a: &AlgElem) -> Result<Elem> {
        let f = &self.base;
        let n = self.degree as i64;
        if f.characteristic() == 0 || f.characteristic() > n as u64 {
            return f.div(&self.regular_trace(a), &f.int(n));
        }
        let p = self.reduced_char_poly(a)?;
        Ok(f.neg(&p.coeff(f, self.degree - 1)))
    }

    pub fn is_sl1(&self, a: &AlgElem) -> Result<bool> {
        Ok(self.base.is_one(&self.reduced_norm(a)?))
    }

    /// `x y x⁻¹ y⁻¹`.
    pub fn commutator(&self, x: &AlgElem, y: &AlgElem) -> Result<AlgElem> {
        let xi = self.inverse(x)?;
        let yi = self.inverse(y)?;
        Ok(self.mul(&self.mul(x, y), &self.mul(&xi, &yi)))
    }

    /// Random element with coordinates from the base field sampler.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgElem {
        (0..self.dim()).map(|_| self.base.sample(rng)).collect()
    }

    /// Random invertible element.
    pub fn sample_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgElem {
        loop {
            let x = self.sample(rng);
            if let Ok(n) = self.reduced_norm(&x) {
                if !self.base.is_zero(&n) {
                    return x;
                }
            }
        }
    }

    /// Random invertible element with at most three nonzero small integer coordinates.
    pub fn sample_small_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgElem {
        loop {
            let mut x = self.zero();
            for _ in 0..rng.gen_range(1..=3) {
                let i = rng.gen_range(0..self.dim());
                x[i] = self.base.int(rng.gen_range(-2i64..=2));
            }
            if let Ok(n) = self.reduced_norm(&x) {
                if !self.base.is_zero(&n) {
                    return x;
                }
            }
        }
    }

    /// Random commutator of two sparse small units; it has reduced norm 1.
    pub fn sl1_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<AlgElem> {
        let x = self.sample_small_unit(rng);
        let y = self.sample_small_unit(rng);
        self.commutator(&x, &y)
    }

    pub fn fmt_elem(&self, a: &AlgElem) -> String {
        let f = &self.base;
        let mut parts = Vec::new();
        for (i, c) in a.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let l = self.label(i);
            let cs = f.fmt_elem(c);
            let coef = if cs.contains(['+', ' ']) || cs[1..].contains('-') {
                format!("({cs})")
            } else {
                cs
            };
            parts.push(if l == "1" {
                coef
            } else if f.is_one(c) {
                l
            } else {
                format!("{coef}*{l}")
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Parse `c₁*m₁ + c₂*m₂ - …` with basis monomials `mᵢ` and field coefficients.
    pub fn parse_elem(
        &self,
        s: &str,
        bindings: &std::collections::HashMap<String, Elem>,
    ) -> Result<AlgElem> {
        let f = &self.base;
        let mut out = self.zero();
        for (sign, term) in split_top(s, &['+', '-'])? {
            let factors: Vec<String> = split_top(&term, &['*'])?.into_iter().map(|(_, t)| t).collect();
            let mut mono = 0usize;
            let mut coef = f.one();
            for fac in factors {
                let fac = fac.trim().to_string();
                if let Some(idx) = self.parse_monomial(&fac) {
                    if mono != 0 {
                        let prod = self.mul(&self.basis(mono), &self.basis(idx));
                        if prod.iter().filter(|c| !f.is_zero(c)).count() != 1 {
                            return Err(Error::Syntax(format!("monomial product in '{term}'")));
                        }
                        let k = prod.iter().position(|c| !f.is_zero(c)).unwrap();
                        coef = f.mul(&coef, &prod[k]);
                        mono = k;
                    } else {
                        mono = idx;
                    }
                } else {
                    coef = f.mul(&coef, &f.parse_elem(&fac, bindings)?);
                }
            }
            if sign {
                coef = f.neg(&coef);
            }
            out[mono] = f.add(&out[mono], &coef);
        }
        Ok(out)
    }

    fn parse_monomial(&self, s: &str) -> Option<usize> {
        let mut exps = vec![0u32; self.gens.len()];
        let cs: Vec<char> = s.chars().collect();
        let mut i = 0;
        if cs.is_empty() {
            return None;
        }
        while i < cs.len() {
            let g = self.gens.iter().position(|g| g.len() == 1 && g.starts_with(cs[i]))?;
            i += 1;
            let mut e = 1;
            if i < cs.len() && cs[i] == '^' {
                let start = i + 1;
                let mut j = start;
                while j < cs.len() && cs[j].is_ascii_digit() {
                    j += 1;
                }
                e = cs[start..j].iter().collect::<String>().parse().ok()?;
                i = j;
            }
            exps[g] += e;
        }
        self.monos.iter().position(|m| *m == exps)
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = &self.base;
        match &self.tag {
            Presentation::Symbol { a, b, n, .. } => {
                write!(out, "symbol({}; {}; {n})", f.fmt_elem(a), f.fmt_elem(b))
            }
            Presentation::PAlgebra { a, b, p } => {
                write!(out, "palg({}; {}; {p})", f.fmt_elem(a), f.fmt_elem(b))
            }
            Presentation::CyclicKummer { a, b, n, .. } => {
                write!(out, "cyclic_kummer({}; {}; {n})", f.fmt_elem(a), f.fmt_elem(b))
            }
            Presentation::CyclicArtinSchreier { a, b, p } => {
                write!(out, "cyclic_as({}; {}; {p})", f.fmt_elem(a), f.fmt_elem(b))
            }
            Presentation::Tensor(l, r) => write!(out, "{l} (*) {r}"),
            Presentation::Opaque => write!(out, "opaque(dim {})", self.dim()),
        }
    }
}

/// Split at top-level separators; for `+`/`-` the flag records a leading minus.
fn split_top(s: &str, seps: &[char]) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    let mut prev_op = true;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && seps.contains(&ch) {
            let is_sign = ch == '+' || ch == '-';
            if is_sign && prev_op && cur.trim().is_empty() {
                if ch == '-' {
                    neg = !neg;
                }
                continue;
            }
            if is_sign && cur.trim_end().ends_with('^') {
                cur.push(ch);
                continue;
            }
            out.push((neg, cur.trim().to_string()));
            cur.clear();
            neg = ch == '-';
            prev_op = true;
            continue;
        }
        if !ch.is_whitespace() {
            prev_op = false;
        }
        cur.push(ch);
    }
    if depth != 0 {
        return Err(Error::Syntax(format!("unbalanced parentheses in '{s}'")));
    }
    if cur.trim().is_empty() {
        return Err(Error::Syntax(format!("empty term in '{s}'")));
    }
    out.push((neg, cur.trim().to_string()));
    Ok(out)
}

/// Algebra from raw structure constants; basis element 0 must be the unit.
pub fn from_parts(
    base: &FieldTower,
    gens: Vec<String>,
    monos: Vec<Vec<u32>>,
    table: Vec<Vec<Vec<(usize, Elem)>>>,
) -> Result<Algebra> {
    Algebra::from_table(base, gens, monos, table, Presentation::Opaque)
}

fn two_gen_monos(n: usize) -> Vec<Vec<u32>> {
    let mut m = Vec::new();
    for i in 0..n {
        for j in 0..n {
            m.push(vec![i as u32, j as u32]);
        }
    }
    m
}

/// Symbol algebra `(a,b)_ζ`: `x^n = a`, `y^n = b`, `xy = ζ yx`.
pub fn symbol(base: &FieldTower, a: &Elem, b: &Elem, n: u64, zeta: Option<Elem>) -> Result<Algebra> {
    let f = base;
    if f.is_zero(a) || f.is_zero(b) {
        return invalid("symbol algebra entries must be nonzero");
    }
    if n < 2 {
        return invalid("symbol algebra degree must be at least 2");
    }
    let zeta = match zeta {
        Some(z) => {
            let root = f.pow(&z, n as i64)?;
            let prim = (1..n).filter(|d| n % d == 0).all(|d| !f.is_one(&f.pow(&z, d as i64).unwrap()));
            if !f.is_one(&root) || !prim {
                return invalid(format!("{} is not a primitive {n}-th root of unity", f.fmt_elem(&z)));
            }
            z
        }
        None => f.primitive_root_of_unity(n)?.found().ok_or_else(|| {
            Error::Invalid(format!("{f} has no primitive {n}-th root of unity"))
        })?,
    };
    let table = kummer_table(f, a, b, n as usize, &f.inv(&zeta)?)?;
    Algebra::from_table(
        f,
        vec!["x".into(), "y".into()],
        two_gen_monos(n as usize),
        table,
        Presentation::Symbol { a: a.clone(), b: b.clone(), n, zeta },
    )
}

/// `(x^i y^j)(x^k y^l) = c^{jk} a^{[i+k≥n]} b^{[j+l≥n]} x^{i+k} y^{j+l}` where `yx = c xy`.
fn kummer_table(f: &FieldTower, a: &Elem, b: &Elem, n: usize, c: &Elem) -> Result<Vec<Vec<Vec<(usize, Elem)>>>> {
    let d = n * n;
    let mut table = vec![vec![vec![]; d]; d];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut coef = f.pow(c, (j * k % n) as i64)?;
                    if i + k >= n {
                        coef = f.mul(&coef, a);
                    }
                    if j + l >= n {
                        coef = f.mul(&coef, b);
                    }
                    let idx = ((i + k) % n) * n + (j + l) % n;
                    table[i * n + j][k * n + l] = vec![(idx, coef)];
                }
            }
        }
    }
    Ok(table)
}

/// Cyclic algebra `(k(α)/k, σ, b)` with `α^n = a`, `σ(α) = ζα`: `yx = ζ xy`.
pub fn cyclic_kummer(base: &FieldTower, a: &Elem, b: &Elem, n: u64) -> Result<Algebra> {
    let f = base;
    let zeta = f
        .primitive_root_of_unity(n)?
        .found()
        .ok_or_else(|| Error::Invalid(format!("{f} has no primitive {n}-th root of unity")))?;
    let s = symbol(f, a, b, n, Some(f.inv(&zeta)?))?;
    Ok(Algebra { tag: Presentation::CyclicKummer { a: a.clone(), b: b.clone(), n, zeta }, ..s })
}

/// p-algebra `[a,b)`: `x^p - x = a`, `y^p = b`, `xy = y(x+1)`.
pub fn p_algebra(base: &FieldTower, a: &Elem, b: &Elem) -> Result<Algebra> {
    let f = base;
    let p = f.characteristic();
    if p == 0 {
        return invalid("p-algebras need positive characteristic");
    }
    if p > 13 {
        return unsupported("p-algebras of degree above 13");
    }
    if f.is_zero(b) {
        return invalid("p-algebra entry b must be nonzero");
    }
    let n = p as usize;
    let d = n * n;
    let mut table = vec![vec![vec![]; d]; d];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let shift = f.neg(&f.int(j as i64));
                    let mut poly = Poly::constant(f, f.one());
                    for _ in 0..i {
                        poly = poly.mul(f, &Poly::new(f, vec![f.zero(), f.one()]));
                    }
                    for _ in 0..k {
                        poly = poly.mul(f, &Poly::new(f, vec![shift.clone(), f.one()]));
                    }
                    let red = reduce_as(f, &poly, a, n);
                    let (yexp, ycoef) = if j + l >= n { (j + l - n, b.clone()) } else { (j + l, f.one()) };
                    let mut entry = Vec::new();
                    for (e, c) in red.iter().enumerate() {
                        if !f.is_zero(c) {
                            entry.push((e * n + yexp, f.mul(c, &ycoef)));
                        }
                    }
                    table[i * n + j][k * n + l] = entry;
                }
            }
        }
    }
    Algebra::from_table(
        f,
        vec!["x".into(), "y".into()],
        two_gen_monos(n),
        table,
        Presentation::PAlgebra { a: a.clone(), b: b.clone(), p },
    )
}

/// Coefficients of `g mod (X^p - X - a)`, length `p`.
fn reduce_as(f: &FieldTower, g: &Poly, a: &Elem, p: usize) -> Vec<Elem> {
    let deg = g.degree().unwrap_or(0);
    let mut c: Vec<Elem> = (0..=deg.max(p - 1)).map(|i| g.coeff(f, i)).collect();
    for e in (p..c.len()).rev() {
        let t = c[e].clone();
        if f.is_zero(&t) {
            continue;
        }
        c[e] = f.zero();
        c[e - p + 1] = f.add(&c[e - p + 1], &t);
        c[e - p] = f.add(&c[e - p], &f.mul(&t, a));
    }
    c.truncate(p);
    c
}

/// Cyclic algebra from an Artin–Schreier extension; same relations as [`p_algebra`].
pub fn cyclic_artin_schreier(base: &FieldTower, a: &Elem, b: &Elem) -> Result<Algebra> {
    let s = p_algebra(base, a, b)?;
    let p = base.characteristic();
    Ok(Algebra { tag: Presentation::CyclicArtinSchreier { a: a.clone(), b: b.clone(), p }, ..s })
}

/// `A ⊗ B` on the basis `eᵢ ⊗ f_j` (index `i·dim B + j`).
pub fn tensor(a: &Algebra, b: &Algebra) -> Result<Algebra> {
    if a.base != b.base {
        return invalid("tensor factors over different base fields");
    }
    let f = &a.base;
    let mut gens = a.gens.clone();
    for g in &b.gens {
        let name = if gens.contains(g) {
            GEN_POOL
                .iter()
                .find(|c| !gens.iter().any(|x| x == *c) && !b.gens.iter().any(|x| x == *c))
                .map(|c| c.to_string())
                .ok_or_else(|| Error::Unsupported("too many tensor factors".into()))?
        } else {
            g.clone()
        };
        gens.push(name);
    }
    let (da, db) = (a.dim(), b.dim());
    let mut monos = Vec::with_capacity(da * db);
    for i in 0..da {
        for j in 0..db {
            let mut m = a.monos[i].clone();
            m.extend(b.monos[j].iter().cloned());
            monos.push(m);
        }
    }
    let mut table = vec![vec![vec![]; da * db]; da * db];
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    let mut entry = Vec::new();
                    for (p, c) in &a.table[i][k] {
                        for (q, e) in &b.table[j][l] {
                            entry.push((p * db + q, f.mul(c, e)));
                        }
                    }
                    table[i * db + j][k * db + l] = entry;
                }
            }
        }
    }
    let degree = a.degree * b.degree;
    let trace_vec = (0..da * db)
        .map(|idx| f.mul(&a.trace_vec[idx / db], &b.trace_vec[idx % db]))
        .collect();
    Ok(Algebra {
        base: f.clone(),
        degree,
        gens,
        monos,
        table,
        trace_vec,
        tag: Presentation::Tensor(Box::new(a.clone()), Box::new(b.clone())),
    })
}

/// Parse `symbol(a; b; n)`, `palg(a; b; p)`, `cyclic_kummer(a; b; n)`, `cyclic_as(a; b; p)`
/// and tensor products `A (*) B`.
pub fn parse_algebra(
    f: &FieldTower,
    s: &str,
    bindings: &std::collections::HashMap<String, Elem>,
) -> Result<Algebra> {
    let parts: Vec<&str> = s.split("(*)").collect();
    let mut acc: Option<Algebra> = None;
    for part in parts {
        let part = part.trim();
        let open = part
            .find('(')
            .ok_or_else(|| Error::Syntax(format!("expected 'name(a; b; n)', found '{part}'")))?;
        let name = part[..open].trim();
        let inner = part[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Syntax(format!("missing ')' in '{part}'")))?;
        let args: Vec<&str> = inner.split(';').map(str::trim).collect();
        if args.len() != 3 {
            return Err(Error::Syntax(format!("'{name}' takes three arguments separated by ';'")));
        }
        let a = f.parse_elem(args[0], bindings)?;
        let b = f.parse_elem(args[1], bindings)?;
        let n: u64 = args[2]
            .parse()
            .map_err(|_| Error::Syntax(format!("degree '{}' is not a positive integer", args[2])))?;
        let alg = match name {
            "symbol" => symbol(f, &a, &b, n, None)?,
            "cyclic_kummer" => cyclic_kummer(f, &a, &b, n)?,
            "palg" | "cyclic_as" => {
                if n != f.characteristic() {
                    return invalid(format!("{name} degree {n} differs from the characteristic of {f}"));
                }
                if name == "palg" {
                    p_algebra(f, &a, &b)?
                } else {
                    cyclic_artin_schreier(f, &a, &b)?
                }
            }
            other => return Err(Error::Syntax(format!("unknown algebra constructor '{other}'"))),
        };
        acc = Some(match acc {
            None => alg,
            Some(prev) => tensor(&prev, &alg)?,
        });
    }
    acc.ok_or_else(|| Error::Syntax("empty algebra expression".into()))
}

// ---- involutions ------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvolutionKind {
    Orthogonal,
    Symplectic,
}

impl fmt::Display for InvolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvolutionKind::Orthogonal => write!(f, "orthogonal"),
            InvolutionKind::Symplectic => write!(f, "symplectic"),
        }
    }
}

/// Involution of the first kind as a linear map on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    /// Column `j` is `σ(e_j)`.
    pub matrix: Matrix,
    pub kind: InvolutionKind,
    pub symd: Vec<AlgElem>,
    pub label: String,
}

impl Involution {
    pub fn apply(&self, alg: &Algebra, a: &AlgElem) -> AlgElem {
        linalg::mat_vec(&alg.base, &self.matrix, a)
    }
}

/// `z ↦ Trd(z) - z` on a quaternion algebra.
fn canonical_matrix(q: &Algebra) -> Result<Matrix> {
    if q.degree != 2 {
        return invalid("canonical involution needs a quaternion algebra");
    }
    let f = &q.base;
    let d = q.dim();
    let mut m = linalg::zeros(f, d, d);
    for j in 0..d {
        let e = q.basis(j);
        let t = q.reduced_trace(&e)?;
        let img = q.sub(&q.scalar(&t), &e);
        for i in 0..d {
            m[i][j] = img[i].clone();
        }
    }
    Ok(m)
}

fn kron(f: &FieldTower, a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut m = linalg::zeros(f, ra * rb, ra * rb);
    for i in 0..ra {
        for j in 0..ra {
            if f.is_zero(&a[i][j]) {
                continue;
            }
            for k in 0..rb {
                for l in 0..rb {
                    m[i * rb + k][j * rb + l] = f.mul(&a[i][j], &b[k][l]);
                }
            }
        }
    }
    m
}

/// Validate `σ² = id` and `σ(e_i e_j) = σ(e_j) σ(e_i)`, then classify.
pub fn involution_from_matrix(alg: &Algebra, matrix: Matrix, label: &str) -> Result<Involution> {
    let f = &alg.base;
    let d = alg.dim();
    let sq = linalg::mat_mul(f, &matrix, &matrix);
    let id = linalg::identity(f, d);
    if !(0..d).all(|i| (0..d).all(|j| f.eq(&sq[i][j], &id[i][j]))) {
        return invalid("map does not square to the identity");
    }
    let sig = |v: &AlgElem| linalg::mat_vec(f, &matrix, v);
    let imgs: Vec<AlgElem> = (0..d).map(|j| sig(&alg.basis(j))).collect();
    for i in 0..d {
        for j in 0..d {
            let l = sig(&alg.mul(&alg.basis(i), &alg.basis(j)));
            let r = alg.mul(&imgs[j], &imgs[i]);
            if !alg.eq(&l, &r) {
                return invalid("map is not an anti-automorphism");
            }
        }
    }
    if !alg.eq(&imgs[0], &alg.one()) {
        return invalid("map does not fix the base field");
    }
    let mut sym = matrix.clone();
    for (i, row) in sym.iter_mut().enumerate() {
        row[i] = f.add(&row[i], &f.one());
    }
    let mut rows = linalg::transpose(&sym);
    let piv = linalg::rref(f, &mut rows)?;
    let symd: Vec<AlgElem> = rows.into_iter().take(piv.len()).collect();
    let n = alg.degree;
    let kind = if f.characteristic() == 2 {
        let m = linalg::transpose(&symd);
        if linalg::solve(f, &m, &alg.one())?.is_some() {
            InvolutionKind::Symplectic
        } else {
            InvolutionKind::Orthogonal
        }
    } else if symd.len() == n * (n + 1) / 2 {
        InvolutionKind::Orthogonal
    } else if symd.len() == n * (n - 1) / 2 {
        InvolutionKind::Symplectic
    } else {
        return invalid(format!("symmetric space of dimension {} fits no involution type", symd.len()));
    };
    Ok(Involution { matrix, kind, symd, label: label.to_string() })
}

fn quaternion_factors(a: &Algebra) -> Result<(&Algebra, &Algebra)> {
    match &a.tag {
        Presentation::Tensor(l, r) if l.degree == 2 && r.degree == 2 => Ok((l, r)),
        _ => invalid("expected a tensor product of two quaternion algebras"),
    }
}

/// Canonical involution of a quaternion algebra (symplectic).
pub fn canonical_involution(q: &Algebra) -> Result<Involution> {
    involution_from_matrix(q, canonical_matrix(q)?, "canonical")
}

/// `γ₁ ⊗ γ₂` on a biquaternion algebra (orthogonal).
pub fn product_of_canonical(a: &Algebra) -> Result<Involution> {
    let (q1, q2) = quaternion_factors(a)?;
    let m = kron(&a.base, &canonical_matrix(q1)?, &canonical_matrix(q2)?);
    involution_from_matrix(a, m, "gamma1 (x) gamma2")
}

/// `Int(s) ∘ γ` on a quaternion algebra for a pure quaternion unit `s`.
fn orthogonal_on_quaternion(q: &Algebra, s: &AlgElem) -> Result<Matrix> {
    let f = &q.base;
    let g = canonical_matrix(q)?;
    let gs = linalg::mat_vec(f, &g, s);
    if !q.eq(&gs, &q.neg(s)) {
        return invalid("s is not anti-symmetric for the canonical involution");
    }
    let si = q.inverse(s)?;
    let d = q.dim();
    let mut m = linalg::zeros(f, d, d);
    for j in 0..d {
        let gj = linalg::mat_vec(f, &g, &q.basis(j));
        let img = q.mul(&q.mul(s, &gj), &si);
        for i in 0..d {
            m[i][j] = img[i].clone();
        }
    }
    Ok(m)
}

/// `σ = γ₁ ⊗ (Int(s) ∘ γ₂)`; `choice` selects `s ∈ {x, y, xy}` of the second factor
/// (`0` is the default first generator).
pub fn make_symplectic_involution_with(a: &Algebra, choice: usize) -> Result<Involution> {
    let (q1, q2) = quaternion_factors(a)?;
    let s = match choice {
        0 => q2.basis(q2.gen_index(&q2.gens[0]).unwrap()),
        1 => q2.basis(q2.gen_index(&q2.gens[1]).unwrap()),
        2 => {
            let x = q2.basis(q2.gen_index(&q2.gens[0]).unwrap());
            let y = q2.basis(q2.gen_index(&q2.gens[1]).unwrap());
            q2.mul(&x, &y)
        }
        _ => return invalid("involution choice must be 0, 1 or 2"),
    };
    let m = kron(&a.base, &canonical_matrix(q1)?, &orthogonal_on_quaternion(q2, &s)?);
    let label = format!("gamma1 (x) Int({})gamma2", q2.fmt_elem(&s));
    let inv = involution_from_matrix(a, m, &label)?;
    if inv.kind != InvolutionKind::Symplectic {
        return Err(Error::Invalid("constructed involution is not symplectic".into()));
    }
    Ok(inv)
}

pub fn make_symplectic_involution(a: &Algebra) -> Result<Involution> {
    make_symplectic_involution_with(a, 0)
}

// ---- Pfaffian data -------------------------------------------------------------

/// `Prp = X² − Trp·X + Nrp` with `Prp² = Prd`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfaffianData {
    pub prp: Poly,
    pub trp: Elem,
    pub nrp: Elem,
}

pub fn is_in_symd(alg: &Algebra, sigma: &Involution, a: &AlgElem) -> Result<bool> {
    let m = linalg::transpose(&sigma.symd);
    if m.is_empty() {
        return Ok(alg.is_zero(a));
    }
    Ok(linalg::solve(&alg.base, &m, a)?.is_some())
}

pub fn pfaffian_data(alg: &Algebra, sigma: &Involution, a: &AlgElem) -> Result<PfaffianData> {
    if alg.degree != 4 {
        return invalid("Pfaffian data needs a degree-4 algebra");
    }
    if sigma.kind != InvolutionKind::Symplectic {
        return invalid("Pfaffian data needs a symplectic involution");
    }
    if !is_in_symd(alg, sigma, a)? {
        return invalid("element is not in Symd(A, sigma)");
    }
    let f = &alg.base;
    let prd = alg.reduced_char_poly(a)?;
    let prp = prd
        .monic_root(f, 2)
        .map_err(|_| Error::Invalid("reduced characteristic polynomial is not a square".into()))?;
    if !prp.pow(f, 2).eq(f, &prd) {
        return invalid("reduced characteristic polynomial is not a square");
    }
    let trp = f.neg(&prp.coeff(f, 1));
    let nrp = prp.coeff(f, 0);
    Ok(PfaffianData { prp, trp, nrp })
}

/// `Trp` on `Symd`, linear; `Trd / 2` outside characteristic 2.
pub fn pfaffian_trace(alg: &Algebra, sigma: &Involution, a: &AlgElem) -> Result<Elem> {
    let f = &alg.base;
    if f.characteristic() != 2 {
        return f.div(&alg.reduced_trace(a)?, &f.int(2));
    }
    Ok(pfaffian_data(alg, sigma, a)?.trp)
}

/// Restriction of `Nrp` to the trace-zero part of `Symd`, diagonalised.
pub fn pfaffian_norm_form(alg: &Algebra, sigma: &Involution) -> Result<QuadraticForm> {
    let f = &alg.base;
    if f.characteristic() == 2 {
        return unsupported("Pfaffian norm form in characteristic 2");
    }
    let traces = sigma
        .symd
        .iter()
        .map(|e| pfaffian_trace(alg, sigma, e))
        .collect::<Result<Vec<_>>>()?;
    let ns = linalg::nullspace(f, &vec![traces], sigma.symd.len())?;
    let basis: Vec<AlgElem> = ns
        .iter()
        .map(|c| {
            c.iter()
                .zip(&sigma.symd)
                .fold(alg.zero(), |acc, (ci, e)| alg.add(&acc, &alg.scale(ci, e)))
        })
        .collect();
    let nrp = |x: &AlgElem| -> Result<Elem> { Ok(pfaffian_data(alg, sigma, x)?.nrp) };
    let k = basis.len();
    let half = f.inv(&f.int(2))?;
    let diag_vals = basis.iter().map(&nrp).collect::<Result<Vec<_>>>()?;
    let mut g = linalg::zeros(f, k, k);
    for i in 0..k {
        g[i][i] = diag_vals[i].clone();
        for j in i + 1..k {
            let s = nrp(&alg.add(&basis[i], &basis[j]))?;
            let b = f.mul(&f.sub(&f.sub(&s, &diag_vals[i]), &diag_vals[j]), &half);
            g[i][j] = b.clone();
            g[j][i] = b;
        }
    }
    let (d, rad) = linalg::diagonalize_symmetric(f, &g)?;
    if rad != 0 {
        return invalid("Pfaffian norm form is degenerate");
    }
    QuadraticForm::diagonal(f, d)
}

/// Hyperbolicity of a symplectic involution on a biquaternion algebra,
/// decided by isotropy of the Pfaffian norm form on trace-zero symmetrized elements.
pub fn is_hyperbolic_involution(alg: &Algebra, sigma: &Involution) -> Result<Isotropy> {
    forms::isotropy(&pfaffian_norm_form(alg, sigma)?)
}

// ---- biquaternion division test --------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionTest {
    pub division: bool,
    pub albert: QuadraticForm,
    pub isotropy: Isotropy,
}

fn quaternion_entries(q: &Algebra) -> Result<(Elem, Elem)> {
    match &q.tag {
        Presentation::Symbol { a, b, n: 2, .. } | Presentation::CyclicKummer { a, b, n: 2, .. } => {
            Ok((a.clone(), b.clone()))
        }
        _ => unsupported("Albert form needs quaternion symbol factors"),
    }
}

/// Albert form `⟨a, b, −ab, −c, −d, cd⟩` of `(a,b) ⊗ (c,d)`.
pub fn albert_form(alg: &Algebra) -> Result<QuadraticForm> {
    let (q1, q2) = quaternion_factors(alg)?;
    let f = &alg.base;
    if f.characteristic() == 2 {
        return unsupported("Albert forms in characteristic 2");
    }
    let (a, b) = quaternion_entries(q1)?;
    let (c, d) = quaternion_entries(q2)?;
    QuadraticForm::diagonal(
        f,
        vec![
            a.clone(),
            b.clone(),
            f.neg(&f.mul(&a, &b)),
            f.neg(&c),
            f.neg(&d),
            f.mul(&c, &d),
        ],
    )
}

pub fn is_division_biquaternion(alg: &Algebra) -> Result<DivisionTest> {
    let albert = albert_form(alg)?;
    let iso = forms::isotropy(&albert)?;
    Ok(DivisionTest { division: !iso.isotropic, albert, isotropy: iso })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::parse_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldTower {
        FieldTower::Rationals
    }

    fn hamilton() -> Algebra {
        let f = q();
        symbol(&f, &f.int(-1), &f.int(-1), 2, None).unwrap()
    }

    fn el(a: &Algebra, s: &str) -> AlgElem {
        a.parse_elem(s, &a.base().standard_bindings()).unwrap()
    }

    fn poly(f: &FieldTower, c: &[i64]) -> Poly {
        Poly::new(f, c.iter().map(|&x| f.int(x)).collect())
    }

    /// Determinant by cofactor expansion, the independent oracle for `Nrd^deg`.
    fn det(f: &FieldTower, m: &Matrix) -> Elem {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = f.zero();
        for j in 0..n {
            if f.is_zero(&m[0][j]) {
                continue;
            }
            let minor: Matrix = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let t = f.mul(&m[0][j], &det(f, &minor));
            acc = if j % 2 == 0 { f.add(&acc, &t) } else { f.sub(&acc, &t) };
        }
        acc
    }

    #[test]
    fn hamilton_examples() {
        let h = hamilton();
        let f = q();
        assert_eq!(h.dim(), 4);
        assert!(h.reduced_char_poly(&el(&h, "1+x")).unwrap().eq(&f, &poly(&f, &[2, -2, 1])));
        assert!(h.reduced_char_poly(&el(&h, "x")).unwrap().eq(&f, &poly(&f, &[1, 0, 1])));
        assert!(h.is_sl1(&el(&h, "x")).unwrap());
        assert!(h.is_sl1(&h.one()).unwrap());
        let x = el(&h, "x");
        let y = el(&h, "y");
        assert!(h.eq(&h.mul(&x, &y), &h.neg(&h.mul(&y, &x))));
        assert!(h.eq(&h.mul(&x, &x), &h.scalar(&f.int(-1))));
    }

    #[test]
    fn symbol_relations_hold() {
        let f = parse_field("F(7)").unwrap();
        let a = symbol(&f, &f.int(3), &f.int(5), 3, None).unwrap();
        let Presentation::Symbol { zeta, .. } = a.tag().clone() else { panic!() };
        let x = el(&a, "x");
        let y = el(&a, "y");
        assert!(a.eq(&a.pow(&x, 3), &a.scalar(&f.int(3))));
        assert!(a.eq(&a.pow(&y, 3), &a.scalar(&f.int(5))));
        assert!(a.eq(&a.mul(&x, &y), &a.scale(&zeta, &a.mul(&y, &x))));
        let c = cyclic_kummer(&f, &f.int(3), &f.int(5), 3).unwrap();
        let Presentation::CyclicKummer { zeta, .. } = c.tag().clone() else { panic!() };
        let (x, y) = (el(&c, "x"), el(&c, "y"));
        assert!(c.eq(&c.mul(&y, &c.mul(&x, &c.inverse(&y).unwrap())), &c.scale(&zeta, &x)));
    }

    #[test]
    fn p_algebra_relations_hold() {
        for q in [2u64, 3, 4, 5] {
            let f = FieldTower::finite(q).unwrap();
            let a_ = f.generator_g().unwrap_or(f.one());
            let b_ = f.int(1);
            let a = p_algebra(&f, &a_, &b_).unwrap();
            let p = f.characteristic() as u32;
            let x = el(&a, "x");
            let y = el(&a, "y");
            let lhs = a.sub(&a.pow(&x, p), &x);
            assert!(a.eq(&lhs, &a.scalar(&a_)));
            assert!(a.eq(&a.pow(&y, p), &a.scalar(&b_)));
            let rhs = a.mul(&y, &a.add(&x, &a.one()));
            assert!(a.eq(&a.mul(&x, &y), &rhs));
        }
    }

    #[test]
    fn reduced_polynomial_is_a_root_of_left_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = q();
        let b = parse_algebra(&f, "symbol(-1; -1; 2) (*) symbol(2; 5; 2)", &f.standard_bindings()).unwrap();
        let f3 = parse_field("F(7)").unwrap();
        let c = symbol(&f3, &f3.int(3), &f3.int(2), 3, None).unwrap();
        let f2 = parse_field("F(4)").unwrap();
        let pa = p_algebra(&f2, &f2.generator_g().unwrap(), &f2.int(1)).unwrap();
        for alg in [&b, &c, &pa] {
            let g = alg.base();
            for _ in 0..5 {
                let x = alg.sample(&mut rng);
                let prd = alg.reduced_char_poly(&x).unwrap();
                let cp = linalg::char_poly(g, &alg.left_mult(&x)).unwrap();
                assert!(prd.pow(g, alg.degree() as u32).eq(g, &cp));
                let mut val = alg.zero();
                for k in (0..=alg.degree()).rev() {
                    val = alg.add(&alg.mul(&val, &x), &alg.scalar(&prd.coeff(g, k)));
                }
                assert!(alg.is_zero(&val));
            }
        }
        let one = b.reduced_char_poly(&b.one()).unwrap();
        assert!(one.eq(&f, &poly(&f, &[-1, 1]).pow(&f, 4)));
    }

    #[test]
    fn reduced_norm_matches_determinant_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = hamilton();
        let f = q();
        for _ in 0..20 {
            let x = h.sample(&mut rng);
            let n = h.reduced_norm(&x).unwrap();
            let d = det(&f, &h.left_mult(&x));
            assert!(f.eq(&f.mul(&n, &n), &d));
        }
    }

    #[test]
    fn norm_multiplicative_and_commutators_in_sl1() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = q();
        let b = parse_algebra(&f, "symbol(-1; -1; 2) (*) symbol(2; 5; 2)", &f.standard_bindings()).unwrap();
        for _ in 0..30 {
            let x = b.sample(&mut rng);
            let y = b.sample(&mut rng);
            let l = b.reduced_norm(&b.mul(&x, &y)).unwrap();
            let r = f.mul(&b.reduced_norm(&x).unwrap(), &b.reduced_norm(&y).unwrap());
            assert!(f.eq(&l, &r));
            let t = b.reduced_trace(&b.add(&x, &y)).unwrap();
            let s = f.add(&b.reduced_trace(&x).unwrap(), &b.reduced_trace(&y).unwrap());
            assert!(f.eq(&t, &s));
        }
        for _ in 0..10 {
            let c = b.sl1_sample(&mut rng).unwrap();
            assert!(b.is_sl1(&c).unwrap());
        }
    }

    #[test]
    fn involution_examples() {
        let f = q();
        let b = parse_algebra(&f, "symbol(-1; -1; 2) (*) symbol(-1; -1; 2)", &f.standard_bindings()).unwrap();
        assert_eq!(b.dim(), 16);
        for c in 0..3 {
            let s = make_symplectic_involution_with(&b, c).unwrap();
            assert_eq!(s.kind, InvolutionKind::Symplectic);
            assert_eq!(s.symd.len(), 6);
            for i in 0..16 {
                let e = b.basis(i);
                assert!(b.eq(&s.apply(&b, &s.apply(&b, &e)), &e));
            }
        }
        let o = product_of_canonical(&b).unwrap();
        assert_eq!(o.kind, InvolutionKind::Orthogonal);
        assert_eq!(o.symd.len(), 10);
        let h = hamilton();
        assert_eq!(canonical_involution(&h).unwrap().kind, InvolutionKind::Symplectic);
    }

    #[test]
    fn involution_type_char_two() {
        let f = parse_field("F(2)((t))").unwrap();
        let t = f.var("t").unwrap();
        let a = p_algebra(&f, &f.one(), &t).unwrap();
        assert_eq!(canonical_involution(&a).unwrap().kind, InvolutionKind::Symplectic);
    }

    #[test]
    fn pfaffian_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = q();
        let b = parse_algebra(&f, "symbol(-1; -1; 2) (*) symbol(2; 5; 2)", &f.standard_bindings()).unwrap();
        let s = make_symplectic_involution(&b).unwrap();
        let pd = pfaffian_data(&b, &s, &b.one()).unwrap();
        assert!(pd.prp.eq(&f, &poly(&f, &[1, -2, 1])));
        assert!(f.eq(&pd.trp, &f.int(2)));
        assert!(f.eq(&pd.nrp, &f.int(1)));
        let lam = f.int(7);
        let pd = pfaffian_data(&b, &s, &b.scalar(&lam)).unwrap();
        assert!(f.eq(&pd.nrp, &f.int(49)));
        for _ in 0..20 {
            let x = b.sample(&mut rng);
            let a = b.add(&x, &s.apply(&b, &x));
            let pd = pfaffian_data(&b, &s, &a).unwrap();
            let nrd = b.reduced_norm(&a).unwrap();
            assert!(f.eq(&f.mul(&pd.nrp, &pd.nrp), &nrd));
            assert!(f.eq(&f.mul(&f.int(2), &pd.trp), &b.reduced_trace(&a).unwrap()));
            let l = f.int(3);
            let scaled = pfaffian_data(&b, &s, &b.scale(&l, &a)).unwrap();
            assert!(f.eq(&scaled.nrp, &f.mul(&f.int(9), &pd.nrp)));
        }
        assert!(pfaffian_data(&b, &s, &el(&b, "x")).is_err());
    }

    #[test]
    fn division_examples() {
        let f = q();
        let b = parse_algebra(&f, "symbol(-1; -1; 2) (*) symbol(-1; -1; 2)", &f.standard_bindings()).unwrap();
        let d = is_division_biquaternion(&b).unwrap();
        assert!(!d.division);
        let w = d.isotropy.witness.unwrap();
        assert!(f.is_zero(&d.albert.eval(&w).unwrap()));
        let l = parse_field("Qp(7)((t1))((t2))").unwrap();
        let bind = l.standard_bindings();
        let p = parse_algebra(&l, "symbol(u; t1; 2) (*) symbol(p; t2; 2)", &bind).unwrap();
        assert_eq!(p.dim(), 16);
        assert!(is_division_biquaternion(&p).unwrap().division);
        let c = parse_algebra(&f, "symbol(3; 7; 2) (*) symbol(3; 7; 2)", &f.standard_bindings()).unwrap();
        assert!(!is_division_biquaternion(&c).unwrap().division);
    }

    #[test]
    fn hyperbolicity_of_involutions() {
        let f = q();
        let split = parse_algebra(&f, "symbol(1; 1; 2) (*) symbol(1; 1; 2)", &f.standard_bindings()).unwrap();
        let s = make_symplectic_involution(&split).unwrap();
        assert!(is_hyperbolic_involution(&split, &s).unwrap().isotropic);
        let l = parse_field("Qp(7)((t1))((t2))").unwrap();
        let p = parse_algebra(&l, "symbol(u; t1; 2) (*) symbol(p; t2; 2)", &l.standard_bindings()).unwrap();
        let s = make_symplectic_involution(&p).unwrap();
        assert!(!is_hyperbolic_involution(&p, &s).unwrap().isotropic);
    }

    #[test]
    fn element_parse_print_roundtrip() {
        let f = q();
        let b = parse_algebra(&f, "symbol(-1; -1; 2) (*) symbol(2; 5; 2)", &f.standard_bindings()).unwrap();
        assert_eq!(b.generators(), &["x", "y", "z", "w"]);
        let e = el(&b, "1 + 2*x - 3/4*yz + xyzw - (1/2)*w");
        let s = b.fmt_elem(&e);
        assert!(b.eq(&el(&b, &s), &e));
        let xz = el(&b, "x*z");
        assert!(b.eq(&xz, &el(&b, "xz")));
    }
}
