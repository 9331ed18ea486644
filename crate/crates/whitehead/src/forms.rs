//! Quadratic forms: local Hilbert symbols, isotropy over ℚ, 𝔽_q, ℚ_p and Laurent
//! towers, Witt classes, Iⁿ-level certificates, Pfister forms and the Arf invariant.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{invalid, unsupported, Error, Result};
use crate::fields::{Elem, FieldTower};
use crate::linalg;

pub const PFISTER_CONVENTION: &str =
    "<<a1,...,an>> = <1,-a1> x ... x <1,-an>; char 2: bilinear <<a1,...,a(n-1)>> x [1,an]";
pub const HASSE_NORMALIZATION: &str = "Hasse: prod_{i<j} (a_i,a_j)";

/// Nonsingular quadratic form. In characteristic ≠ 2 only `diag` is used; in
/// characteristic 2 `blocks` holds binary blocks `[a,b] = ax² + xy + by²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    base: FieldTower,
    diag: Vec<Elem>,
    blocks: Vec<(Elem, Elem)>,
}

/// Result of an isotropy test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isotropy {
    pub isotropic: bool,
    pub witness: Option<Vec<Elem>>,
    pub certificate: String,
}

/// A place of ℚ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Real,
    Prime(BigUint),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "R"),
            Place::Prime(p) => write!(f, "Q_{p}"),
        }
    }
}

impl QuadraticForm {
    pub fn diagonal(base: &FieldTower, entries: Vec<Elem>) -> Result<Self> {
        if base.characteristic() == 2 && !entries.is_empty() {
            return invalid("diagonal forms are singular in characteristic 2; use blocks");
        }
        if entries.iter().any(|e| base.is_zero(e)) {
            return invalid("zero diagonal entry (singular form)");
        }
        Ok(QuadraticForm { base: base.clone(), diag: entries, blocks: vec![] })
    }

    pub fn block_sum(base: &FieldTower, blocks: Vec<(Elem, Elem)>) -> Result<Self> {
        if base.characteristic() != 2 {
            return invalid("binary blocks [a,b] are a characteristic-2 presentation");
        }
        Ok(QuadraticForm { base: base.clone(), diag: vec![], blocks })
    }

    pub fn base(&self) -> &FieldTower {
        &self.base
    }

    pub fn entries(&self) -> &[Elem] {
        &self.diag
    }

    pub fn blocks(&self) -> &[(Elem, Elem)] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.diag.len() + 2 * self.blocks.len()
    }

    fn check_same(&self, o: &QuadraticForm) -> Result<()> {
        if self.base != o.base {
            return invalid(format!("tower mismatch: {} vs {}", self.base, o.base));
        }
        Ok(())
    }

    pub fn orth_sum(&self, o: &QuadraticForm) -> Result<QuadraticForm> {
        self.check_same(o)?;
        let mut r = self.clone();
        r.diag.extend(o.diag.iter().cloned());
        r.blocks.extend(o.blocks.iter().cloned());
        Ok(r)
    }

    /// `⟨λ⟩ ⊗ q`.
    pub fn scale(&self, lambda: &Elem) -> Result<QuadraticForm> {
        let f = &self.base;
        if f.is_zero(lambda) {
            return invalid("scaling by zero");
        }
        let diag = self.diag.iter().map(|a| f.mul(a, lambda)).collect();
        let mut blocks = Vec::new();
        for (a, b) in &self.blocks {
            blocks.push((f.mul(a, lambda), f.div(b, lambda)?));
        }
        Ok(QuadraticForm { base: f.clone(), diag, blocks })
    }

    pub fn neg(&self) -> QuadraticForm {
        if self.base.characteristic() == 2 {
            return self.clone();
        }
        self.scale(&self.base.int(-1)).expect("nonzero scalar")
    }

    /// `q(v)` for a vector in the presentation basis.
    pub fn eval(&self, v: &[Elem]) -> Result<Elem> {
        let f = &self.base;
        if v.len() != self.dim() {
            return invalid("vector length does not match the form dimension");
        }
        let mut acc = f.zero();
        for (a, x) in self.diag.iter().zip(v) {
            acc = f.add(&acc, &f.mul(a, &f.mul(x, x)));
        }
        let off = self.diag.len();
        for (i, (a, b)) in self.blocks.iter().enumerate() {
            let (x, y) = (&v[off + 2 * i], &v[off + 2 * i + 1]);
            let t = f.add(&f.add(&f.mul(a, &f.mul(x, x)), &f.mul(x, y)), &f.mul(b, &f.mul(y, y)));
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    pub fn fmt(&self) -> String {
        let f = &self.base;
        let mut parts = Vec::new();
        if !self.diag.is_empty() || self.blocks.is_empty() {
            let d: Vec<String> = self.diag.iter().map(|a| f.fmt_elem(a)).collect();
            parts.push(format!("<{}>", d.join(", ")));
        }
        for (a, b) in &self.blocks {
            parts.push(format!("[{}, {}]", f.fmt_elem(a), f.fmt_elem(b)));
        }
        parts.join(" + ")
    }

    /// Signature over ℚ (number of positive minus negative entries).
    pub fn signature(&self) -> Result<i64> {
        let mut s = 0;
        for a in &self.diag {
            let r = self
                .base
                .as_rational(a)
                .ok_or_else(|| Error::Unsupported("signature needs rational entries".into()))?;
            s += if r.is_positive() { 1 } else { -1 };
        }
        Ok(s)
    }

    /// Signed discriminant `(-1)^(n(n-1)/2) * det` (characteristic ≠ 2).
    pub fn signed_discriminant(&self) -> Elem {
        let f = &self.base;
        let n = self.diag.len();
        let det = self.diag.iter().fold(f.one(), |acc, a| f.mul(&acc, a));
        if (n * n.saturating_sub(1) / 2) % 2 == 1 {
            f.neg(&det)
        } else {
            det
        }
    }
}

/// `⟪a₁,…,a_n⟫`, see [`PFISTER_CONVENTION`].
pub fn pfister(base: &FieldTower, entries: &[Elem]) -> Result<QuadraticForm> {
    if entries.iter().any(|a| base.is_zero(a)) {
        return invalid("zero Pfister slot");
    }
    if base.characteristic() == 2 {
        let (last, rest) = entries
            .split_last()
            .ok_or_else(|| Error::Invalid("empty Pfister form in characteristic 2".into()))?;
        let mut coeffs = vec![base.one()];
        for a in rest {
            let extra: Vec<Elem> = coeffs.iter().map(|c| base.mul(c, a)).collect();
            coeffs.extend(extra);
        }
        let mut blocks = Vec::new();
        for c in coeffs {
            blocks.push((c.clone(), base.div(last, &c)?));
        }
        return QuadraticForm::block_sum(base, blocks);
    }
    let mut d = vec![base.one()];
    for a in entries {
        let na = base.neg(a);
        let extra: Vec<Elem> = d.iter().map(|c| base.mul(c, &na)).collect();
        d.extend(extra);
    }
    QuadraticForm::diagonal(base, d)
}

// ---- local arithmetic -----------------------------------------------------------

/// Square-class data at a prime: `p^v * u` with `u` a unit modulo `p` (odd `p`) or `8`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Loc {
    v: i64,
    u: BigInt,
}

struct Local {
    p: BigInt,
    m: BigInt,
    two: bool,
}

impl Local {
    fn new(p: &BigInt) -> Self {
        let two = *p == BigInt::from(2);
        Local {
            p: p.clone(),
            m: if two { BigInt::from(8) } else { p.clone() },
            two,
        }
    }

    fn of_rational(&self, r: &BigRational) -> Loc {
        let p = &self.p;
        let (vn, un) = split_big(r.numer(), p);
        let (vd, ud) = split_big(r.denom(), p);
        let di = arith::big_inv_mod(&ud, &self.m).expect("unit");
        Loc { v: vn - vd, u: (un * di).mod_floor(&self.m) }
    }

    fn mul(&self, a: &Loc, b: &Loc) -> Loc {
        Loc { v: a.v + b.v, u: (&a.u * &b.u).mod_floor(&self.m) }
    }

    fn neg(&self, a: &Loc) -> Loc {
        Loc { v: a.v, u: (-&a.u).mod_floor(&self.m) }
    }

    fn minus_one(&self) -> Loc {
        Loc { v: 0, u: &self.m - 1 }
    }

    fn legendre(&self, u: &BigInt) -> i32 {
        let e = (&self.p - 1u32) / 2u32;
        if u.modpow(&e, &self.p).is_one() {
            1
        } else {
            -1
        }
    }

    fn is_square(&self, a: &Loc) -> bool {
        if a.v.rem_euclid(2) != 0 {
            return false;
        }
        if self.two {
            a.u == BigInt::one()
        } else {
            self.legendre(&a.u) == 1
        }
    }

    fn hilbert(&self, a: &Loc, b: &Loc) -> i32 {
        let (al, be) = (a.v.rem_euclid(2), b.v.rem_euclid(2));
        if self.two {
            let eps = |u: &BigInt| ((u - 1u32) / 2u32).mod_floor(&BigInt::from(2)).to_i64().unwrap();
            let omega = |u: &BigInt| ((u * u - 1u32) / 8u32).mod_floor(&BigInt::from(2)).to_i64().unwrap();
            let e = eps(&a.u) * eps(&b.u) + al * omega(&b.u) + be * omega(&a.u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            let mut s = 1;
            let half = ((&self.p - 1u32) / 2u32).mod_floor(&BigInt::from(2));
            if al * be == 1 && half.is_one() {
                s = -s;
            }
            if be == 1 {
                s *= self.legendre(&a.u);
            }
            if al == 1 {
                s *= self.legendre(&b.u);
            }
            s
        }
    }

    fn hasse(&self, xs: &[Loc]) -> i32 {
        let mut e = 1;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                e *= self.hilbert(&xs[i], &xs[j]);
            }
        }
        e
    }

    fn det(&self, xs: &[Loc]) -> Loc {
        xs.iter().fold(Loc { v: 0, u: BigInt::one() }, |acc, x| self.mul(&acc, x))
    }

    /// Serre's isotropy criteria over ℚ_p by dimension.
    fn isotropic(&self, xs: &[Loc]) -> bool {
        let d = self.det(xs);
        let eps = self.hasse(xs);
        let m1 = self.minus_one();
        match xs.len() {
            0 | 1 => false,
            2 => self.is_square(&self.neg(&d)),
            3 => self.hilbert(&m1, &self.neg(&d)) == eps,
            4 => !self.is_square(&d) || eps == self.hilbert(&m1, &m1),
            _ => true,
        }
    }

    fn hyperbolic(&self, xs: &[Loc]) -> bool {
        if xs.len() % 2 == 1 {
            return false;
        }
        let m = xs.len() / 2;
        let d = self.det(xs);
        let target = if m % 2 == 1 { self.neg(&d) } else { d };
        if !self.is_square(&target) {
            return false;
        }
        let m1 = self.minus_one();
        let h = if (m * m.saturating_sub(1) / 2) % 2 == 1 { self.hilbert(&m1, &m1) } else { 1 };
        self.hasse(xs) == h
    }
}

fn split_big(n: &BigInt, p: &BigInt) -> (i64, BigInt) {
    let mut v = 0;
    let mut u = n.clone();
    while !u.is_zero() && (&u % p).is_zero() {
        u /= p;
        v += 1;
    }
    (v, u)
}

fn local_of_padic(f: &FieldTower, a: &Elem) -> Result<Loc> {
    let (p, _) = f
        .padic_ground()
        .ok_or_else(|| Error::Invalid(format!("{f} is not a p-adic descriptor")))?;
    let k = if p == 2 { 3 } else { 1 };
    let v = f.padic_valuation(a)?;
    let u = f.padic_unit_mod(a, k)?;
    Ok(Loc { v, u })
}

fn padic_locs(f: &FieldTower, xs: &[Elem]) -> Result<(Local, Vec<Loc>)> {
    let (p, _) = f.padic_ground().unwrap();
    let l = Local::new(&BigInt::from(p));
    let locs = xs.iter().map(|x| local_of_padic(f, x)).collect::<Result<Vec<_>>>()?;
    Ok((l, locs))
}

fn rationals_of(f: &FieldTower, xs: &[Elem]) -> Result<Vec<BigRational>> {
    xs.iter()
        .map(|x| {
            f.as_rational(x)
                .ok_or_else(|| Error::Unsupported("expected rational entries".into()))
        })
        .collect()
}

/// Hilbert symbol `(a,b)` at a place of ℚ, or at the place of a p-adic descriptor.
pub fn hilbert_symbol(f: &FieldTower, a: &Elem, b: &Elem, place: Option<&Place>) -> Result<i32> {
    if f.is_zero(a) || f.is_zero(b) {
        return invalid("Hilbert symbol of zero");
    }
    match (f.core(), place) {
        (FieldTower::PAdic { .. }, _) => {
            let (l, xs) = padic_locs(f, &[a.clone(), b.clone()])?;
            Ok(l.hilbert(&xs[0], &xs[1]))
        }
        (FieldTower::Rationals, Some(pl)) => {
            let r = rationals_of(f, &[a.clone(), b.clone()])?;
            Ok(rational_hilbert(&r[0], &r[1], pl))
        }
        (FieldTower::Rationals, None) => invalid("a place of Q is required"),
        _ => unsupported(format!("Hilbert symbols over {f}")),
    }
}

pub fn rational_hilbert(a: &BigRational, b: &BigRational, place: &Place) -> i32 {
    match place {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            let l = Local::new(&BigInt::from(p.clone()));
            l.hilbert(&l.of_rational(a), &l.of_rational(b))
        }
    }
}

/// Places of ℚ at which a rational diagonal form can fail to be locally hyperbolic
/// or isotropic: ℝ, 2, and the primes dividing some entry to an odd power.
pub fn relevant_places(entries: &[BigRational]) -> Result<Vec<Place>> {
    let mut primes = arith::odd_primes_of(entries).ok_or_else(|| {
        Error::Undecided("could not factor the form coefficients".into())
    })?;
    let two = BigUint::from(2u32);
    if !primes.contains(&two) {
        primes.insert(0, two);
    }
    let mut out = vec![Place::Real];
    out.extend(primes.into_iter().map(Place::Prime));
    Ok(out)
}

/// Local isotropy of a rational diagonal form at each relevant place.
pub fn hasse_minkowski_report(entries: &[BigRational]) -> Result<Vec<(Place, bool)>> {
    let mut out = Vec::new();
    for pl in relevant_places(entries)? {
        let iso = match &pl {
            Place::Real => {
                entries.iter().any(|a| a.is_positive()) && entries.iter().any(|a| a.is_negative())
            }
            Place::Prime(p) => {
                let l = Local::new(&BigInt::from(p.clone()));
                let xs: Vec<Loc> = entries.iter().map(|a| l.of_rational(a)).collect();
                l.isotropic(&xs)
            }
        };
        out.push((pl, iso));
    }
    Ok(out)
}

fn rational_hyperbolic(entries: &[BigRational]) -> Result<bool> {
    if entries.len() % 2 == 1 {
        return Ok(false);
    }
    let sig: i64 = entries.iter().map(|a| if a.is_positive() { 1 } else { -1 }).sum();
    if sig != 0 {
        return Ok(false);
    }
    for pl in relevant_places(entries)? {
        if let Place::Prime(p) = pl {
            let l = Local::new(&BigInt::from(p));
            let xs: Vec<Loc> = entries.iter().map(|a| l.of_rational(a)).collect();
            if !l.hyperbolic(&xs) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---- witness searches ---------------------------------------------------------

const SEARCH_BUDGET: u64 = 3_000_000;

/// Search for a nonzero integer vector with `Σ c_i x_i² = 0`, coordinates in `[0,B]`
/// for growing `B`, lexicographic order, last coordinate solved exactly.
fn integer_isotropic_vector(c: &[i128]) -> Option<Vec<i128>> {
    let n = c.len();
    if n < 2 {
        return None;
    }
    let mut budget = SEARCH_BUDGET;
    let mut b: i128 = 1;
    loop {
        let cells = (b + 1).checked_pow((n - 1) as u32)?;
        if cells as u64 > budget {
            return None;
        }
        budget -= cells as u64;
        let mut x = vec![0i128; n - 1];
        loop {
            let s: i128 = x.iter().zip(c).map(|(xi, ci)| ci * xi * xi).sum();
            let cn = c[n - 1];
            if x.iter().any(|&v| v != 0) && (-s) % cn == 0 {
                let q = -s / cn;
                if q >= 0 {
                    let r = (q as f64).sqrt() as i128;
                    if let Some(y) = (r.saturating_sub(1)..=r + 1).find(|y| *y >= 0 && y * y == q) {
                        let mut v = x.clone();
                        v.push(y);
                        return Some(v);
                    }
                }
            }
            if !odometer(&mut x, b) {
                break;
            }
        }
        b *= 2;
    }
}

/// Lexicographic successor in `[0,b]^n`; false after the last vector.
fn odometer(x: &mut [i128], b: i128) -> bool {
    for i in (0..x.len()).rev() {
        if x[i] < b {
            x[i] += 1;
            for xj in x.iter_mut().skip(i + 1) {
                *xj = 0;
            }
            return true;
        }
    }
    false
}

/// Explicit isotropic vector of a rational diagonal form, when a small one exists.
pub fn rational_witness(entries: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = entries.len();
    if n == 2 {
        let r = -(&entries[1] / &entries[0]);
        let x = BigRational::new(arith::exact_root(r.numer(), 2)?, arith::exact_root(r.denom(), 2)?);
        return Some(vec![x, BigRational::one()]);
    }
    let l = entries
        .iter()
        .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
    let ints: Vec<BigInt> = entries.iter().map(|a| (a * BigRational::from(l.clone())).to_integer()).collect();
    // dimension ≥ 5: an indefinite 5-dimensional subform is isotropic
    let idx: Vec<usize> = if n >= 5 {
        let pos = ints.iter().position(|a| a.is_positive())?;
        let neg = ints.iter().position(|a| a.is_negative())?;
        let mut v = vec![pos, neg];
        v.extend((0..n).filter(|i| *i != pos && *i != neg).take(3));
        v.sort();
        v
    } else {
        (0..n).collect()
    };
    let c: Vec<i128> = idx.iter().map(|&i| ints[i].to_i128()).collect::<Option<_>>()?;
    if c.iter().any(|x| x.abs() > 1i128 << 40) {
        return None;
    }
    let sol = integer_isotropic_vector(&c)?;
    let mut out = vec![BigRational::zero(); n];
    for (k, &i) in idx.iter().enumerate() {
        out[i] = BigRational::from(BigInt::from(sol[k]));
    }
    Some(out)
}

/// Lexicographically first isotropic vector over a finite field of odd order.
fn finite_witness(f: &FieldTower, entries: &[Elem]) -> Option<Vec<Elem>> {
    let FieldTower::Finite(ff) = f.core() else { return None };
    let q = ff.order();
    if q > 1 << 20 {
        return None;
    }
    let n = entries.len();
    let a: Vec<u64> = entries.iter().map(|e| if let Elem::F(x) = e { *x } else { 0 }).collect();
    let mut sqrt = vec![u64::MAX; q as usize];
    for y in (0..q).rev() {
        sqrt[ff.mul(y, y) as usize] = y;
    }
    let an_inv = ff.inv(a[n - 1])?;
    let mut x = vec![0u64; n - 1];
    let mut budget = SEARCH_BUDGET;
    loop {
        let s = x
            .iter()
            .zip(&a)
            .fold(0, |acc, (xi, ai)| ff.add(acc, ff.mul(*ai, ff.mul(*xi, *xi))));
        let target = ff.mul(ff.neg(s), an_inv);
        let y = sqrt[target as usize];
        if y != u64::MAX && (y != 0 || x.iter().any(|&v| v != 0)) {
            let mut v: Vec<Elem> = x.iter().map(|&v| Elem::F(v)).collect();
            v.push(Elem::F(y));
            return Some(v);
        }
        budget = budget.checked_sub(1)?;
        let mut i = n - 1;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if x[i] + 1 < q {
                x[i] += 1;
                for xj in x.iter_mut().skip(i + 1) {
                    *xj = 0;
                }
                break;
            }
        }
    }
}

// ---- isotropy -----------------------------------------------------------------

/// Components of a diagonal form over `k((t))` after square-class normalisation:
/// the entry `t^(2k+e) u s²` contributes `u` to residue form `e`.
struct SpringerSplit {
    residue: [Vec<Elem>; 2],
    /// for each entry: which residue form, its index there, `k` and `s`
    place: Vec<(usize, usize, i64, Option<Elem>)>,
}

fn springer_split(f: &FieldTower, entries: &[Elem], want_roots: bool) -> Result<SpringerSplit> {
    let mut residue: [Vec<Elem>; 2] = [vec![], vec![]];
    let mut place = Vec::new();
    for a in entries {
        let s = f.laurent_split(a)?;
        let e = s.valuation.rem_euclid(2) as usize;
        let k = (s.valuation - e as i64) / 2;
        let root = if want_roots {
            f.is_nth_power(&s.tail, 2).ok().and_then(|t| t.witness)
        } else {
            None
        };
        place.push((e, residue[e].len(), k, root));
        residue[e].push(s.unit);
    }
    Ok(SpringerSplit { residue, place })
}

/// Decide isotropy, with an explicit vector where the tower permits.
pub fn isotropy(q: &QuadraticForm) -> Result<Isotropy> {
    let f = q.base.clone();
    if q.dim() == 0 {
        return Ok(Isotropy { isotropic: false, witness: None, certificate: "zero form".into() });
    }
    if f.characteristic() == 2 {
        return isotropy_char2(q);
    }
    isotropy_diag(&f, &q.diag, true)
}

fn isotropy_diag(f: &FieldTower, entries: &[Elem], want_witness: bool) -> Result<Isotropy> {
    let n = entries.len();
    match f.core() {
        FieldTower::Rationals => {
            let r = rationals_of(f, entries)?;
            let report = hasse_minkowski_report(&r)?;
            if let Some((pl, _)) = report.iter().find(|(_, iso)| !iso) {
                return Ok(Isotropy {
                    isotropic: false,
                    witness: None,
                    certificate: format!("Hasse-Minkowski: anisotropic at {pl}"),
                });
            }
            let witness = if want_witness {
                rational_witness(&r).map(|v| v.into_iter().map(Elem::Q).collect())
            } else {
                None
            };
            let places: Vec<String> = report.iter().map(|(p, _)| p.to_string()).collect();
            Ok(Isotropy {
                isotropic: true,
                witness,
                certificate: format!("Hasse-Minkowski: isotropic at {}", places.join(", ")),
            })
        }
        FieldTower::Finite(_) => {
            let iso = match n {
                1 => false,
                2 => f.is_square(&f.neg(&f.mul(&entries[0], &entries[1])))?,
                _ => true,
            };
            let witness = if iso && want_witness { finite_witness(f, entries) } else { None };
            Ok(Isotropy {
                isotropic: iso,
                witness,
                certificate: if iso {
                    "finite field: dimension and discriminant".into()
                } else {
                    "exhaustive: no nonzero zero over the finite field".into()
                },
            })
        }
        FieldTower::PAdic { .. } => {
            let (l, xs) = padic_locs(f, entries)?;
            let iso = l.isotropic(&xs);
            Ok(Isotropy {
                isotropic: iso,
                witness: None,
                certificate: format!(
                    "Hilbert-symbol criterion (dim {n}, Hasse {}, disc class v={} u={})",
                    l.hasse(&xs),
                    l.det(&xs).v,
                    l.det(&xs).u
                ),
            })
        }
        FieldTower::Laurent { base, var, .. } => {
            let sp = springer_split(f, entries, want_witness)?;
            let mut certs = Vec::new();
            for e in 0..2 {
                if sp.residue[e].is_empty() {
                    certs.push(format!("residue {e}: empty"));
                    continue;
                }
                let sub = isotropy_diag(base, &sp.residue[e], want_witness)?;
                certs.push(format!("residue {e} over {base}: {}", sub.certificate));
                if sub.isotropic {
                    let witness = match (&sub.witness, want_witness) {
                        (Some(w), true) => lift_springer_witness(f, &sp, e, w)?,
                        _ => None,
                    };
                    return Ok(Isotropy {
                        isotropic: true,
                        witness,
                        certificate: format!("Springer over {var}: {}", certs.join("; ")),
                    });
                }
            }
            Ok(Isotropy {
                isotropic: false,
                witness: None,
                certificate: format!("Springer over {var}: {}", certs.join("; ")),
            })
        }
        _ => unsupported(format!("isotropy over {f}")),
    }
}

fn lift_springer_witness(
    f: &FieldTower,
    sp: &SpringerSplit,
    e: usize,
    w: &[Elem],
) -> Result<Option<Vec<Elem>>> {
    let mut out = Vec::new();
    for (pe, idx, k, root) in &sp.place {
        if *pe != e {
            out.push(f.zero());
            continue;
        }
        let Some(s) = root else { return Ok(None) };
        let y = f.embed(w[*idx].clone());
        let scale = f.mul(&f.monomial(f.laurent_base().unwrap().one(), -*k)?, &f.inv(s)?);
        out.push(f.mul(&y, &scale));
    }
    Ok(Some(out))
}

fn isotropy_char2(q: &QuadraticForm) -> Result<Isotropy> {
    let f = &q.base;
    let FieldTower::Finite(ff) = f.core() else {
        return unsupported(format!("characteristic-2 isotropy over {f}"));
    };
    let n = q.dim();
    let total = (ff.order() as f64).powi(n as i32);
    if total <= (1u64 << 20) as f64 {
        let qn = ff.order();
        let mut v = vec![0u64; n];
        loop {
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(Isotropy {
                        isotropic: false,
                        witness: None,
                        certificate: "exhaustive search over the finite field".into(),
                    });
                }
                i -= 1;
                if v[i] + 1 < qn {
                    v[i] += 1;
                    for x in v.iter_mut().skip(i + 1) {
                        *x = 0;
                    }
                    break;
                }
            }
            let ev: Vec<Elem> = v.iter().map(|&x| Elem::F(x)).collect();
            if f.is_zero(&q.eval(&ev)?) {
                return Ok(Isotropy {
                    isotropic: true,
                    witness: Some(ev),
                    certificate: "exhaustive search over the finite field".into(),
                });
            }
        }
    }
    if !q.diag.is_empty() {
        return unsupported("large singular characteristic-2 form");
    }
    let iso = q.blocks.len() >= 2 || arf_invariant(q)?.class == Some(0);
    Ok(Isotropy {
        isotropic: iso,
        witness: None,
        certificate: "finite field: block count and Arf invariant".into(),
    })
}

// ---- hyperbolicity and Iⁿ -------------------------------------------------------

/// True when the form is hyperbolic (its Witt class is zero).
pub fn is_hyperbolic(q: &QuadraticForm) -> Result<bool> {
    let f = &q.base;
    if q.dim() % 2 == 1 {
        return Ok(false);
    }
    if q.dim() == 0 {
        return Ok(true);
    }
    if f.characteristic() == 2 {
        if !q.diag.is_empty() {
            return unsupported("hyperbolicity of singular characteristic-2 forms");
        }
        return match arf_invariant(q)?.class {
            Some(c) => Ok(c == 0),
            None => unsupported(format!("Witt equality in characteristic 2 over {f}")),
        };
    }
    hyperbolic_diag(f, &q.diag)
}

fn hyperbolic_diag(f: &FieldTower, entries: &[Elem]) -> Result<bool> {
    if entries.len() % 2 == 1 {
        return Ok(false);
    }
    if entries.is_empty() {
        return Ok(true);
    }
    match f.core() {
        FieldTower::Rationals => rational_hyperbolic(&rationals_of(f, entries)?),
        FieldTower::Finite(_) => {
            let q = QuadraticForm { base: f.clone(), diag: entries.to_vec(), blocks: vec![] };
            f.is_square(&q.signed_discriminant())
        }
        FieldTower::PAdic { .. } => {
            let (l, xs) = padic_locs(f, entries)?;
            Ok(l.hyperbolic(&xs))
        }
        FieldTower::Laurent { base, .. } => {
            let sp = springer_split(f, entries, false)?;
            Ok(hyperbolic_diag(base, &sp.residue[0])? && hyperbolic_diag(base, &sp.residue[1])?)
        }
        _ => unsupported(format!("hyperbolicity over {f}")),
    }
}

/// Membership of the Witt class of a diagonal form in `Iⁿ`.
fn in_power(f: &FieldTower, entries: &[Elem], n: u32) -> Result<bool> {
    if n == 0 {
        return Ok(true);
    }
    if entries.len() % 2 == 1 {
        return Ok(false);
    }
    if n == 1 {
        return Ok(true);
    }
    if let FieldTower::Laurent { base, .. } = f.core() {
        let sp = springer_split(f, entries, false)?;
        let sum: Vec<Elem> = sp.residue[0].iter().chain(&sp.residue[1]).cloned().collect();
        return Ok(in_power(base, &sp.residue[1], n - 1)? && in_power(base, &sum, n)?);
    }
    let q = QuadraticForm { base: f.clone(), diag: entries.to_vec(), blocks: vec![] };
    if !f.is_square(&q.signed_discriminant())? {
        return Ok(false);
    }
    if n == 2 {
        return Ok(true);
    }
    match f.core() {
        FieldTower::Finite(_) | FieldTower::PAdic { .. } => hyperbolic_diag(f, entries),
        FieldTower::Rationals => {
            let r = rationals_of(f, entries)?;
            let sig = q.signature()?;
            if sig.rem_euclid(8) != 0 {
                return Ok(false);
            }
            for pl in relevant_places(&r)? {
                if let Place::Prime(p) = pl {
                    let l = Local::new(&BigInt::from(p));
                    let xs: Vec<Loc> = r.iter().map(|a| l.of_rational(a)).collect();
                    if !l.hyperbolic(&xs) {
                        return Ok(false);
                    }
                }
            }
            Ok(sig.rem_euclid(1i64 << n) == 0)
        }
        _ => unsupported(format!("I^{n} membership over {f}")),
    }
}

/// Certified position of a Witt class in the filtration `I⁰ ⊃ I¹ ⊃ …`, capped at 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCertificate {
    /// Largest `n ≤ 4` with the class in `Iⁿ`.
    pub level: u8,
    pub is_zero: Option<bool>,
    pub certified: bool,
    pub certificate: String,
}

impl LevelCertificate {
    pub fn describe(&self) -> String {
        if !self.certified {
            format!("level >={} unverified", self.level)
        } else if self.is_zero == Some(true) {
            "level 4 (class 0)".to_string()
        } else {
            format!("level {}", self.level)
        }
    }
}

/// Witt class represented by a form; equality is decided by hyperbolicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittClass {
    pub form: QuadraticForm,
}

pub fn witt_class(q: &QuadraticForm) -> WittClass {
    WittClass { form: q.clone() }
}

pub fn witt_add(a: &WittClass, b: &WittClass) -> Result<WittClass> {
    Ok(WittClass { form: a.form.orth_sum(&b.form)? })
}

/// `b ⊗ c` for a diagonal bilinear form `b = ⟨b₁,…⟩`.
pub fn bilinear_mult(b: &[Elem], c: &WittClass) -> Result<WittClass> {
    let f = &c.form.base;
    let mut acc = QuadraticForm { base: f.clone(), diag: vec![], blocks: vec![] };
    for x in b {
        acc = acc.orth_sum(&c.form.scale(x)?)?;
    }
    Ok(WittClass { form: acc })
}

impl WittClass {
    pub fn base(&self) -> &FieldTower {
        &self.form.base
    }

    pub fn neg(&self) -> WittClass {
        WittClass { form: self.form.neg() }
    }

    pub fn is_zero(&self) -> Result<bool> {
        is_hyperbolic(&self.form)
    }

    pub fn witt_eq(&self, o: &WittClass) -> Result<bool> {
        witt_add(self, &o.neg())?.is_zero()
    }

    /// Anisotropic representative of the class.
    pub fn anisotropic_kernel(&self) -> Result<QuadraticForm> {
        let f = &self.form.base;
        if f.characteristic() == 2 {
            let FieldTower::Finite(_) = f.core() else {
                return unsupported("characteristic-2 kernels beyond finite fields");
            };
            if !self.form.diag.is_empty() {
                return unsupported("singular characteristic-2 kernels");
            }
            if self.is_zero()? {
                return QuadraticForm::block_sum(f, vec![]);
            }
            let c = (1..)
                .map(Elem::F)
                .find(|c| arf_class_finite(f, c) == Some(1))
                .unwrap();
            return QuadraticForm::block_sum(f, vec![(f.one(), c)]);
        }
        let d = kernel_diag(f, &self.form.diag)?;
        QuadraticForm::diagonal(f, d)
    }

    /// Dimension, discriminant and local data of the representative.
    pub fn invariants(&self) -> Result<FormInvariants> {
        form_invariants(&self.form)
    }
}

fn square_class_reps(f: &FieldTower) -> Vec<Elem> {
    match f.core() {
        FieldTower::PAdic { p, .. } => {
            if *p == 2 {
                [1, 3, 5, 7, 2, 6, 10, 14].iter().map(|&x| f.int(x)).collect()
            } else {
                let u = (2..*p).find(|&u| arith::legendre(u, *p) == -1).unwrap() as i64;
                vec![f.int(1), f.int(u), f.int(*p as i64), f.int(u * *p as i64)]
            }
        }
        _ => vec![],
    }
}

fn kernel_diag(f: &FieldTower, entries: &[Elem]) -> Result<Vec<Elem>> {
    match f.core() {
        FieldTower::Finite(_) => {
            let n = entries.len();
            let q = QuadraticForm { base: f.clone(), diag: entries.to_vec(), blocks: vec![] };
            let det = entries.iter().fold(f.one(), |a, x| f.mul(&a, x));
            if n % 2 == 0 {
                let d = q.signed_discriminant();
                if f.is_square(&d)? {
                    Ok(vec![])
                } else {
                    Ok(vec![f.one(), f.neg(&d)])
                }
            } else {
                let d = if ((n - 1) / 2) % 2 == 1 { f.neg(&det) } else { det };
                Ok(vec![d])
            }
        }
        FieldTower::PAdic { .. } => {
            let reps = square_class_reps(f);
            let parity = entries.len() % 2;
            for d in (parity..=4.min(entries.len())).step_by(2) {
                let mut found = None;
                for_each_multiset(reps.len(), d, &mut |idx| {
                    if found.is_some() {
                        return;
                    }
                    let cand: Vec<Elem> = idx.iter().map(|&i| reps[i].clone()).collect();
                    let mut all = entries.to_vec();
                    all.extend(cand.iter().map(|c| f.neg(c)));
                    let aniso = d == 0 || !isotropy_diag(f, &cand, false).map(|i| i.isotropic).unwrap_or(true);
                    if aniso && hyperbolic_diag(f, &all).unwrap_or(false) {
                        found = Some(cand);
                    }
                });
                if let Some(c) = found {
                    return Ok(c);
                }
            }
            Err(Error::Precision("no anisotropic kernel found at this precision".into()))
        }
        FieldTower::Rationals => {
            let mut cur = entries.to_vec();
            loop {
                let iso = isotropy_diag(f, &cur, true)?;
                if !iso.isotropic {
                    return Ok(cur);
                }
                let w = iso.witness.ok_or_else(|| {
                    Error::Undecided("isotropic but no small witness for splitting".into())
                })?;
                cur = split_hyperbolic(f, &cur, &w)?;
            }
        }
        FieldTower::Laurent { base, .. } => {
            let sp = springer_split(f, entries, false)?;
            let k0 = kernel_diag(base, &sp.residue[0])?;
            let k1 = kernel_diag(base, &sp.residue[1])?;
            let t = f.monomial(base.one(), 1)?;
            let mut out: Vec<Elem> = k0.into_iter().map(|x| f.embed(x)).collect();
            out.extend(k1.into_iter().map(|x| f.mul(&f.embed(x), &t)));
            Ok(out)
        }
        _ => unsupported(format!("anisotropic kernels over {f}")),
    }
}

fn for_each_multiset(n: usize, k: usize, cb: &mut dyn FnMut(&[usize])) {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, cb: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            cb(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i, cur, cb);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut Vec::new(), cb);
}

/// Split a hyperbolic plane off a diagonal form along an isotropic vector.
pub fn split_hyperbolic(f: &FieldTower, entries: &[Elem], v: &[Elem]) -> Result<Vec<Elem>> {
    let n = entries.len();
    let b = |x: &[Elem], y: &[Elem]| -> Elem {
        (0..n).fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&entries[i], &f.mul(&x[i], &y[i]))))
    };
    let k = (0..n)
        .find(|&i| !f.is_zero(&v[i]))
        .ok_or_else(|| Error::Invalid("zero witness".into()))?;
    let unit = |i: usize| -> Vec<Elem> {
        (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect()
    };
    let ek = unit(k);
    let bvk = b(v, &ek);
    let c = f.div(&b(&ek, &ek), &f.scale_int(&bvk, 2))?;
    let w: Vec<Elem> = (0..n)
        .map(|i| f.div(&f.sub(&ek[i], &f.mul(&c, &v[i])), &bvk))
        .collect::<Result<_>>()?;
    let mut vecs = Vec::new();
    for j in (0..n).filter(|&j| j != k) {
        let ej = unit(j);
        let (bw, bv) = (b(&ej, &w), b(&ej, v));
        let pj: Vec<Elem> = (0..n)
            .map(|i| f.sub(&f.sub(&ej[i], &f.mul(&bw, &v[i])), &f.mul(&bv, &w[i])))
            .collect();
        vecs.push(pj);
    }
    let gram: linalg::Matrix = vecs
        .iter()
        .map(|x| vecs.iter().map(|y| b(x, y)).collect())
        .collect();
    let (d, _) = linalg::diagonalize_symmetric(f, &gram)?;
    Ok(d)
}

/// Certified `Iⁿ` level of a Witt class.
pub fn i_level(c: &WittClass) -> Result<LevelCertificate> {
    let f = c.base();
    if f.characteristic() == 2 {
        return match (f.core(), c.is_zero()) {
            (FieldTower::Finite(_), Ok(z)) => Ok(LevelCertificate {
                level: if z { 4 } else { 0 },
                is_zero: Some(z),
                certified: true,
                certificate: "finite field of characteristic 2: Arf invariant".into(),
            }),
            _ => Ok(LevelCertificate {
                level: 0,
                is_zero: None,
                certified: false,
                certificate: "characteristic-2 filtration outside finite fields".into(),
            }),
        };
    }
    let entries = &c.form.diag;
    let mut level = 0u8;
    for n in 1..=4u32 {
        if in_power(f, entries, n)? {
            level = n as u8;
        } else {
            break;
        }
    }
    let zero = hyperbolic_diag(f, entries)?;
    let certificate = match f.core() {
        FieldTower::Rationals => format!(
            "signature {} and Hasse data at all relevant places",
            c.form.signature()?
        ),
        FieldTower::PAdic { .. } => "I^3 of a p-adic field vanishes; Hasse invariant".into(),
        FieldTower::Finite(_) => "I^2 of a finite field vanishes; discriminant".into(),
        _ => "Springer residue recursion".into(),
    };
    Ok(LevelCertificate { level, is_zero: Some(zero), certified: true, certificate })
}

/// Dimension parity, signed discriminant and local data of a form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormInvariants {
    pub dim: usize,
    pub signed_discriminant: Option<String>,
    pub signature: Option<i64>,
    pub hasse: Vec<(String, i32)>,
    pub arf: Option<String>,
    pub normalization: &'static str,
}

pub fn form_invariants(q: &QuadraticForm) -> Result<FormInvariants> {
    let f = &q.base;
    let mut inv = FormInvariants {
        dim: q.dim(),
        signed_discriminant: None,
        signature: None,
        hasse: vec![],
        arf: None,
        normalization: HASSE_NORMALIZATION,
    };
    if f.characteristic() == 2 {
        if q.diag.is_empty() {
            let a = arf_invariant(q)?;
            inv.arf = Some(match a.class {
                Some(c) => c.to_string(),
                None => f.fmt_elem(&a.value),
            });
        }
        return Ok(inv);
    }
    inv.signed_discriminant = Some(f.fmt_elem(&q.signed_discriminant()));
    match f.core() {
        FieldTower::Rationals => {
            let r = rationals_of(f, &q.diag)?;
            inv.signature = Some(q.signature()?);
            for pl in relevant_places(&r)? {
                let mut e = 1;
                for i in 0..r.len() {
                    for j in i + 1..r.len() {
                        e *= rational_hilbert(&r[i], &r[j], &pl);
                    }
                }
                inv.hasse.push((pl.to_string(), e));
            }
        }
        FieldTower::PAdic { p, .. } => {
            let (l, xs) = padic_locs(f, &q.diag)?;
            inv.hasse.push((format!("Q_{p}"), l.hasse(&xs)));
        }
        _ => {}
    }
    Ok(inv)
}

// ---- characteristic 2 ---------------------------------------------------------

/// Arf invariant `Σ aᵢbᵢ mod ℘(k)`; `class` is the absolute trace over finite fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArfInvariant {
    pub value: Elem,
    pub class: Option<u8>,
}

fn arf_class_finite(f: &FieldTower, x: &Elem) -> Option<u8> {
    let FieldTower::Finite(ff) = f.core() else { return None };
    let Elem::F(mut y) = x.clone() else { return None };
    let mut tr = 0;
    for _ in 0..ff.degree() {
        tr = ff.add(tr, y);
        y = ff.mul(y, y);
    }
    Some(tr as u8)
}

pub fn arf_invariant(q: &QuadraticForm) -> Result<ArfInvariant> {
    let f = &q.base;
    if f.characteristic() != 2 {
        return invalid("Arf invariant requires characteristic 2");
    }
    if !q.diag.is_empty() {
        return invalid("Arf invariant of an odd-dimensional or singular form");
    }
    let value = q
        .blocks
        .iter()
        .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)));
    let class = arf_class_finite(f, &value);
    Ok(ArfInvariant { value, class })
}

/// Parse `diag(a1, …, an)` or `pfister(a1; …; an)` over a tower.
pub fn parse_form(
    f: &FieldTower,
    s: &str,
    bindings: &std::collections::HashMap<String, Elem>,
) -> Result<QuadraticForm> {
    let t = s.trim();
    let (head, rest) = t
        .split_once('(')
        .ok_or_else(|| Error::Syntax(format!("expected diag(...) or pfister(...), found '{s}'")))?;
    let inner = rest
        .strip_suffix(')')
        .ok_or_else(|| Error::Syntax(format!("missing ')' in '{s}'")))?;
    let sep = if inner.contains(';') { ';' } else { ',' };
    let entries = inner
        .split(sep)
        .filter(|x| !x.trim().is_empty())
        .map(|x| f.parse_elem(x, bindings))
        .collect::<Result<Vec<_>>>()?;
    match head.trim() {
        "diag" => QuadraticForm::diagonal(f, entries),
        "pfister" => pfister(f, &entries),
        h => Err(Error::Syntax(format!("unknown form constructor '{h}'"))),
    }
}

/// Rational diagonal form from integers.
pub fn rational_form(entries: &[i64]) -> Result<QuadraticForm> {
    let f = FieldTower::Rationals;
    QuadraticForm::diagonal(&f, entries.iter().map(|&a| f.int(a)).collect())
}
