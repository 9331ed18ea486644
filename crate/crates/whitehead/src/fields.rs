//! Exact field towers: ℚ, finite fields, symbolic p-adic descriptors, iterated
//! Laurent extensions and root-of-unity adjunctions, with element arithmetic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::{self, big, big_inv_mod, rat_int, rat_unit_mod, rat_val, split_val};
use crate::error::{invalid, unsupported, Error, Result};

pub const DEFAULT_PADIC_PRECISION: u32 = 8;
pub const DEFAULT_LAURENT_PRECISION: u32 = 16;

/// Finite field `F_q`, `q = p^e`, realised as `F_p[g]/(f)` for a fixed monic irreducible `f`.
/// Elements are encoded as integers `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteField {
    p: u64,
    e: u32,
    modulus: Vec<u64>,
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self> {
        let (p, e) = arith::prime_power(q)
            .ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            first_irreducible(p, e as usize)
        };
        Ok(FiniteField { p, e, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// Coefficients of the defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn digits(&self, mut x: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.e as usize);
        for _ in 0..self.e {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    pub fn encode(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            return (a + b) % self.p;
        }
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.e == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let s: Vec<u64> = self.digits(a).iter().map(|u| (self.p - u) % self.p).collect();
        self.encode(&s)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            return arith::mul_mod(a, b, self.p);
        }
        let prod = poly_mul(&self.digits(a), &self.digits(b), self.p);
        self.encode(&poly_rem(&prod, &self.modulus, self.p))
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.order() - 2))
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: u64) -> u64 {
        let n = self.order() - 1;
        let mut ord = n;
        for (r, _) in arith::factor_u64(n) {
            while ord % r == 0 && self.pow(a, ord / r) == 1 {
                ord /= r;
            }
        }
        ord
    }

    /// Smallest generator of the multiplicative group in encoding order.
    pub fn generator(&self) -> u64 {
        let n = self.order() - 1;
        (1..self.order())
            .find(|&g| self.element_order(g) == n)
            .expect("cyclic group")
    }
}

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + arith::mul_mod(x, y, p)) % p;
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = arith::inv_mod(m[dm], p).expect("monic modulus");
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let k = r.len() - 1 - dm;
        let c = arith::mul_mod(*r.last().unwrap(), lead_inv, p);
        for (i, &mi) in m.iter().enumerate() {
            r[k + i] = (r[k + i] + p - arith::mul_mod(c, mi, p)) % p;
        }
        r.pop();
        poly_trim(&mut r);
    }
    r.resize(dm.max(1), 0);
    r
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    poly_trim(&mut out);
    out
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let mut r = poly_rem(&x, &y, p);
        poly_trim(&mut r);
        x = y;
        y = r;
    }
    x
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut r = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = poly_rem(&poly_mul(&r, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    r
}

/// Rabin's irreducibility test for a monic polynomial of degree `e` over `F_p`.
fn is_irreducible(f: &[u64], p: u64, e: usize) -> bool {
    let x = vec![0, 1];
    let frob = |k: usize| -> Vec<u64> {
        let mut r = x.clone();
        for _ in 0..k {
            r = poly_powmod(&r, p, f, p);
        }
        r
    };
    let full = poly_sub(&frob(e), &x, p);
    if !(full.iter().all(|&c| c == 0)) {
        return false;
    }
    for (r, _) in arith::factor_u64(e as u64) {
        let g = poly_gcd(f, &poly_sub(&frob(e / r as usize), &x, p), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn first_irreducible(p: u64, e: usize) -> Vec<u64> {
    let count = p.pow(e as u32);
    for idx in 0..count {
        let mut f: Vec<u64> = Vec::with_capacity(e + 1);
        let mut k = idx;
        for _ in 0..e {
            f.push(k % p);
            k /= p;
        }
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p, e) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Element of a symbolic p-adic descriptor.
///
/// `Exact` holds a rational number embedded in ℚ_p; `Approx` is `p^val * unit` with the
/// unit known modulo `p^rel`; `Zero` is a value known to vanish modulo `p^abs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PAdic {
    Exact(BigRational),
    Approx { val: i64, unit: BigInt, rel: u32 },
    Zero { abs: i64 },
}

/// Finite Laurent expansion `sum c_k t^k`, sorted by exponent, with nonzero
/// coefficients. `prec = Some(n)` means the value is known modulo `t^n`;
/// `None` means the expansion is an exact Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent {
    pub terms: Vec<(i64, Elem)>,
    pub prec: Option<i64>,
}

/// Element payload. Elements do not carry their tower; every operation is a
/// method of the owning [`FieldTower`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    Q(BigRational),
    F(u64),
    P(PAdic),
    L(Laurent),
}

/// Inductively built field descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldTower {
    Rationals,
    Finite(FiniteField),
    PAdic { p: u64, prec: u32 },
    Laurent { base: Box<FieldTower>, var: String, prec: u32 },
    Root { base: Box<FieldTower>, m: u64 },
}

/// Outcome of an `n`-th power test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerTest {
    pub is_power: bool,
    pub witness: Option<Elem>,
    pub certificate: String,
}

/// Outcome of a root-of-unity lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootLookup {
    Found(Elem),
    Absent(String),
}

impl RootLookup {
    pub fn found(self) -> Option<Elem> {
        match self {
            RootLookup::Found(z) => Some(z),
            RootLookup::Absent(_) => None,
        }
    }
}

/// `x = t^valuation * unit * tail` with `unit` in the base and `tail = 1 + O(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSplit {
    pub valuation: i64,
    pub unit: Elem,
    pub tail: Elem,
}

fn p_pow(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

mod padic {
    use super::*;

    pub fn approx(x: &PAdic, p: u64, n: u32) -> PAdic {
        match x {
            PAdic::Exact(r) if r.is_zero() => PAdic::Zero { abs: i64::MAX / 4 },
            PAdic::Exact(r) => PAdic::Approx {
                val: rat_val(r, p),
                unit: rat_unit_mod(r, p, n),
                rel: n,
            },
            other => other.clone(),
        }
    }

    fn norm_unit(s: BigInt, base_val: i64, k: u32, p: u64) -> PAdic {
        let m = p_pow(p, k);
        let s = s.mod_floor(&m);
        if s.is_zero() {
            return PAdic::Zero { abs: base_val + k as i64 };
        }
        let (w, u) = split_val(&s, p);
        let rel = k - w as u32;
        PAdic::Approx {
            val: base_val + w,
            unit: u.mod_floor(&p_pow(p, rel)),
            rel,
        }
    }

    pub fn add(a: &PAdic, b: &PAdic, p: u64, n: u32) -> PAdic {
        match (a, b) {
            (PAdic::Exact(x), PAdic::Exact(y)) => return PAdic::Exact(x + y),
            (PAdic::Exact(x), other) | (other, PAdic::Exact(x)) if x.is_zero() => {
                return other.clone()
            }
            _ => {}
        }
        let (x, y) = (approx(a, p, n), approx(b, p, n));
        match (&x, &y) {
            (PAdic::Zero { abs: a1 }, PAdic::Zero { abs: a2 }) => PAdic::Zero { abs: *a1.min(a2) },
            (PAdic::Zero { abs }, PAdic::Approx { val, unit, rel })
            | (PAdic::Approx { val, unit, rel }, PAdic::Zero { abs }) => {
                if val >= abs {
                    PAdic::Zero { abs: *abs }
                } else {
                    let r = (*rel as i64).min(abs - val) as u32;
                    PAdic::Approx {
                        val: *val,
                        unit: unit.mod_floor(&p_pow(p, r)),
                        rel: r,
                    }
                }
            }
            (
                PAdic::Approx { val: v1, unit: u1, rel: r1 },
                PAdic::Approx { val: v2, unit: u2, rel: r2 },
            ) => {
                let v = *v1.min(v2);
                let abs = (v1 + *r1 as i64).min(v2 + *r2 as i64);
                let k = (abs - v) as u32;
                let s = u1 * p_pow(p, (v1 - v) as u32) + u2 * p_pow(p, (v2 - v) as u32);
                norm_unit(s, v, k, p)
            }
            _ => unreachable!(),
        }
    }

    pub fn neg(a: &PAdic, p: u64) -> PAdic {
        match a {
            PAdic::Exact(x) => PAdic::Exact(-x),
            PAdic::Approx { val, unit, rel } => PAdic::Approx {
                val: *val,
                unit: (-unit).mod_floor(&p_pow(p, *rel)),
                rel: *rel,
            },
            z => z.clone(),
        }
    }

    pub fn mul(a: &PAdic, b: &PAdic, p: u64, n: u32) -> PAdic {
        match (a, b) {
            (PAdic::Exact(x), PAdic::Exact(y)) => return PAdic::Exact(x * y),
            (PAdic::Exact(x), _) | (_, PAdic::Exact(x)) if x.is_zero() => {
                return PAdic::Exact(BigRational::zero())
            }
            _ => {}
        }
        match (approx(a, p, n), approx(b, p, n)) {
            (PAdic::Zero { abs: a1 }, PAdic::Zero { abs: a2 }) => PAdic::Zero { abs: a1 + a2 },
            (PAdic::Zero { abs }, PAdic::Approx { val, .. })
            | (PAdic::Approx { val, .. }, PAdic::Zero { abs }) => PAdic::Zero { abs: abs + val },
            (
                PAdic::Approx { val: v1, unit: u1, rel: r1 },
                PAdic::Approx { val: v2, unit: u2, rel: r2 },
            ) => {
                let r = r1.min(r2);
                PAdic::Approx {
                    val: v1 + v2,
                    unit: (u1 * u2).mod_floor(&p_pow(p, r)),
                    rel: r,
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn inv(a: &PAdic, p: u64) -> Result<PAdic> {
        match a {
            PAdic::Exact(x) if x.is_zero() => invalid("division by zero"),
            PAdic::Exact(x) => Ok(PAdic::Exact(x.recip())),
            PAdic::Approx { val, unit, rel } => Ok(PAdic::Approx {
                val: -val,
                unit: big_inv_mod(unit, &p_pow(p, *rel)).expect("unit"),
                rel: *rel,
            }),
            PAdic::Zero { abs } => Err(Error::Precision(format!(
                "inverting a value known only modulo p^{abs}"
            ))),
        }
    }

    pub fn is_zero(a: &PAdic) -> bool {
        match a {
            PAdic::Exact(x) => x.is_zero(),
            PAdic::Approx { .. } => false,
            PAdic::Zero { .. } => true,
        }
    }

    pub fn valuation(a: &PAdic, p: u64) -> Result<i64> {
        match a {
            PAdic::Exact(x) if x.is_zero() => invalid("valuation of zero"),
            PAdic::Exact(x) => Ok(rat_val(x, p)),
            PAdic::Approx { val, .. } => Ok(*val),
            PAdic::Zero { abs } => Err(Error::Precision(format!(
                "value vanishes modulo p^{abs}; valuation unknown"
            ))),
        }
    }

    /// Unit part modulo `p^k`, or a precision error.
    pub fn unit_mod(a: &PAdic, p: u64, k: u32) -> Result<BigInt> {
        match a {
            PAdic::Exact(x) if x.is_zero() => invalid("unit part of zero"),
            PAdic::Exact(x) => Ok(rat_unit_mod(x, p, k)),
            PAdic::Approx { unit, rel, .. } => {
                if *rel >= k {
                    Ok(unit.mod_floor(&p_pow(p, k)))
                } else {
                    Err(Error::Precision(format!(
                        "unit known modulo p^{rel}, p^{k} required"
                    )))
                }
            }
            PAdic::Zero { abs } => Err(Error::Precision(format!(
                "value vanishes modulo p^{abs}"
            ))),
        }
    }

    /// Relative precision of a nonzero element (`None` for exact rationals).
    pub fn rel(a: &PAdic) -> Option<u32> {
        match a {
            PAdic::Approx { rel, .. } => Some(*rel),
            _ => None,
        }
    }
}

impl fmt::Display for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTower::Rationals => write!(f, "Q"),
            FieldTower::Finite(ff) => write!(f, "F({})", ff.order()),
            FieldTower::PAdic { p, prec } => {
                if *prec == DEFAULT_PADIC_PRECISION {
                    write!(f, "Qp({p})")
                } else {
                    write!(f, "Qp({p},{prec})")
                }
            }
            FieldTower::Laurent { base, var, prec } => {
                if *prec == DEFAULT_LAURENT_PRECISION {
                    write!(f, "{base}(({var}))")
                } else {
                    write!(f, "{base}(({var},{prec}))")
                }
            }
            FieldTower::Root { base, m } => write!(f, "{base}[zeta_{m}]"),
        }
    }
}

fn parse_u64(s: &str, what: &str) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| Error::Syntax(format!("expected {what}, found '{s}'")))
}

fn valid_var(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(name, "g" | "zeta" | "p" | "u")
}

/// Parse a field descriptor such as `Qp(5)((t1))((t2))` or `F(7)[zeta_3]`.
pub fn parse_field(descriptor: &str) -> Result<FieldTower> {
    let s: String = descriptor.chars().filter(|c| !c.is_whitespace()).collect();
    let (mut tower, mut rest) = if let Some(r) = s.strip_prefix("Qp(") {
        let close = r
            .find(')')
            .ok_or_else(|| Error::Syntax("unclosed 'Qp('".into()))?;
        let inner = &r[..close];
        let mut parts = inner.split(',');
        let p = parse_u64(parts.next().unwrap_or(""), "a prime")?;
        let prec = match parts.next() {
            Some(x) => parse_u64(x, "a precision")? as u32,
            None => DEFAULT_PADIC_PRECISION,
        };
        if parts.next().is_some() {
            return Err(Error::Syntax(format!("too many arguments in 'Qp({inner})'")));
        }
        (FieldTower::padic_with_precision(p, prec)?, &r[close + 1..])
    } else if let Some(r) = s.strip_prefix("F(") {
        let close = r
            .find(')')
            .ok_or_else(|| Error::Syntax("unclosed 'F('".into()))?;
        let q = parse_u64(&r[..close], "a prime power")?;
        (FieldTower::finite(q)?, &r[close + 1..])
    } else if let Some(r) = s.strip_prefix('Q') {
        (FieldTower::Rationals, r)
    } else {
        return Err(Error::Syntax(format!(
            "expected 'Q', 'F(q)' or 'Qp(p)' at the start of '{descriptor}'"
        )));
    };
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("((") {
            let close = r
                .find("))")
                .ok_or_else(|| Error::Syntax("unclosed '(('".into()))?;
            let inner = &r[..close];
            let mut parts = inner.split(',');
            let var = parts.next().unwrap_or("").to_string();
            let prec = match parts.next() {
                Some(x) => parse_u64(x, "a precision")? as u32,
                None => DEFAULT_LAURENT_PRECISION,
            };
            tower = tower.laurent_with_precision(&var, prec)?;
            rest = &r[close + 2..];
        } else if let Some(r) = rest.strip_prefix("[zeta_") {
            let close = r
                .find(']')
                .ok_or_else(|| Error::Syntax("unclosed '[zeta_'".into()))?;
            let m = parse_u64(&r[..close], "a root order")?;
            tower = tower.adjoin_root(m)?;
            rest = &r[close + 1..];
        } else {
            return Err(Error::Syntax(format!("unexpected '{rest}' in field descriptor")));
        }
    }
    Ok(tower)
}

impl FieldTower {
    pub fn rationals() -> Self {
        FieldTower::Rationals
    }

    pub fn finite(q: u64) -> Result<Self> {
        Ok(FieldTower::Finite(FiniteField::new(q)?))
    }

    pub fn padic(p: u64) -> Result<Self> {
        Self::padic_with_precision(p, DEFAULT_PADIC_PRECISION)
    }

    pub fn padic_with_precision(p: u64, prec: u32) -> Result<Self> {
        if !arith::is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        if prec == 0 {
            return invalid("p-adic precision must be positive");
        }
        Ok(FieldTower::PAdic { p, prec })
    }

    pub fn laurent(self, var: &str) -> Result<Self> {
        self.laurent_with_precision(var, DEFAULT_LAURENT_PRECISION)
    }

    pub fn laurent_with_precision(self, var: &str, prec: u32) -> Result<Self> {
        if !valid_var(var) {
            return Err(Error::Syntax(format!("invalid variable name '{var}'")));
        }
        if self.laurent_vars().iter().any(|v| v == var) {
            return invalid(format!("variable '{var}' already used in {self}"));
        }
        if prec == 0 {
            return invalid("Laurent precision must be positive");
        }
        Ok(FieldTower::Laurent {
            base: Box::new(self),
            var: var.to_string(),
            prec,
        })
    }

    /// Adjoin a primitive `m`-th root of unity. Accepted only when the root already
    /// lives in the base, so the tower records a distinguished root.
    pub fn adjoin_root(self, m: u64) -> Result<Self> {
        if m == 0 {
            return invalid("root order must be positive");
        }
        match self.primitive_root_of_unity(m)? {
            RootLookup::Found(_) => Ok(FieldTower::Root { base: Box::new(self), m }),
            RootLookup::Absent(reason) => invalid(format!(
                "inconsistent root adjunction: no primitive {m}-th root of unity over {self} ({reason})"
            )),
        }
    }

    /// The tower with root-adjunction wrappers removed at the top level.
    pub fn core(&self) -> &FieldTower {
        match self {
            FieldTower::Root { base, .. } => base.core(),
            other => other,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self.core() {
            FieldTower::Rationals | FieldTower::PAdic { .. } => 0,
            FieldTower::Finite(ff) => ff.p,
            FieldTower::Laurent { base, .. } => base.characteristic(),
            FieldTower::Root { .. } => unreachable!(),
        }
    }

    /// Laurent variable names, outermost first.
    pub fn laurent_vars(&self) -> Vec<String> {
        match self {
            FieldTower::Laurent { base, var, .. } => {
                let mut v = vec![var.clone()];
                v.extend(base.laurent_vars());
                v
            }
            FieldTower::Root { base, .. } => base.laurent_vars(),
            _ => Vec::new(),
        }
    }

    /// `(variable, residue field)` pairs, outermost variable first.
    pub fn residue_chain(&self) -> Vec<(String, FieldTower)> {
        match self {
            FieldTower::Laurent { base, var, .. } => {
                let mut v = vec![(var.clone(), (**base).clone())];
                v.extend(base.residue_chain());
                v
            }
            FieldTower::Root { base, .. } => base.residue_chain(),
            _ => Vec::new(),
        }
    }

    /// The field below all Laurent variables and root adjunctions.
    pub fn ground(&self) -> &FieldTower {
        match self {
            FieldTower::Laurent { base, .. } | FieldTower::Root { base, .. } => base.ground(),
            other => other,
        }
    }

    /// Residue field of the outermost Laurent variable.
    pub fn laurent_base(&self) -> Option<&FieldTower> {
        match self.core() {
            FieldTower::Laurent { base, .. } => Some(base),
            _ => None,
        }
    }

    /// Prime and precision of the p-adic ground field, if any.
    pub fn padic_ground(&self) -> Option<(u64, u32)> {
        match self.ground() {
            FieldTower::PAdic { p, prec } => Some((*p, *prec)),
            _ => None,
        }
    }

    fn lau_prec(&self) -> u32 {
        match self.core() {
            FieldTower::Laurent { prec, .. } => *prec,
            _ => DEFAULT_LAURENT_PRECISION,
        }
    }

    // ---- constructors -------------------------------------------------------------

    pub fn zero(&self) -> Elem {
        match self.core() {
            FieldTower::Rationals => Elem::Q(BigRational::zero()),
            FieldTower::Finite(_) => Elem::F(0),
            FieldTower::PAdic { .. } => Elem::P(PAdic::Exact(BigRational::zero())),
            FieldTower::Laurent { .. } => Elem::L(Laurent { terms: vec![], prec: None }),
            FieldTower::Root { .. } => unreachable!(),
        }
    }

    pub fn one(&self) -> Elem {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Elem {
        self.from_bigint(&big(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match self.core() {
            FieldTower::Rationals => Elem::Q(rat_int(n)),
            FieldTower::Finite(ff) => {
                Elem::F(n.mod_floor(&BigInt::from(ff.p)).to_u64().unwrap())
            }
            FieldTower::PAdic { .. } => Elem::P(PAdic::Exact(rat_int(n))),
            FieldTower::Laurent { base, .. } => self.embed(base.from_bigint(n)),
            FieldTower::Root { .. } => unreachable!(),
        }
    }

    pub fn from_rational(&self, r: &BigRational) -> Result<Elem> {
        let n = self.from_bigint(r.numer());
        let d = self.from_bigint(r.denom());
        self.div(&n, &d)
    }

    /// Embed an element of the immediate Laurent base as a constant.
    pub fn embed(&self, b: Elem) -> Elem {
        match self.core() {
            FieldTower::Laurent { base, .. } => {
                if base.is_zero(&b) {
                    Elem::L(Laurent { terms: vec![], prec: None })
                } else {
                    Elem::L(Laurent { terms: vec![(0, b)], prec: None })
                }
            }
            _ => b,
        }
    }

    /// Embed an element of the ground field through every Laurent level.
    pub fn from_ground(&self, g: Elem) -> Elem {
        match self.core() {
            FieldTower::Laurent { base, .. } => self.embed(base.from_ground(g)),
            _ => g,
        }
    }

    /// Embed an element of any intermediate tower `sub` (a base of `self`).
    pub fn lift_from(&self, sub: &FieldTower, x: Elem) -> Result<Elem> {
        if self.core() == sub.core() {
            return Ok(x);
        }
        match self.core() {
            FieldTower::Laurent { base, .. } => Ok(self.embed(base.lift_from(sub, x)?)),
            _ => invalid(format!("{sub} is not a subfield of {self}")),
        }
    }

    /// The Laurent variable `name` as an element of this tower.
    pub fn var(&self, name: &str) -> Result<Elem> {
        match self.core() {
            FieldTower::Laurent { base, var, .. } => {
                if var == name {
                    Ok(Elem::L(Laurent {
                        terms: vec![(1, base.one())],
                        prec: None,
                    }))
                } else {
                    Ok(self.embed(base.var(name)?))
                }
            }
            _ => invalid(format!("unknown variable '{name}' in {self}")),
        }
    }

    /// Monomial `c t^k` in the outermost variable.
    pub fn monomial(&self, c: Elem, k: i64) -> Result<Elem> {
        match self.core() {
            FieldTower::Laurent { base, .. } => {
                if base.is_zero(&c) {
                    Ok(self.zero())
                } else {
                    Ok(Elem::L(Laurent { terms: vec![(k, c)], prec: None }))
                }
            }
            _ => invalid(format!("{self} has no Laurent variable")),
        }
    }

    /// Generator `g` of a finite extension field.
    pub fn generator_g(&self) -> Result<Elem> {
        match self.core() {
            FieldTower::Finite(ff) if ff.e > 1 => Ok(Elem::F(ff.p)),
            FieldTower::Laurent { base, .. } => Ok(self.embed(base.generator_g()?)),
            _ => invalid(format!("{self} has no generator 'g'")),
        }
    }

    // ---- arithmetic -----------------------------------------------------------

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self.core(), a, b) {
            (FieldTower::Rationals, Elem::Q(x), Elem::Q(y)) => Elem::Q(x + y),
            (FieldTower::Finite(ff), Elem::F(x), Elem::F(y)) => Elem::F(ff.add(*x, *y)),
            (FieldTower::PAdic { p, prec }, Elem::P(x), Elem::P(y)) => {
                Elem::P(padic::add(x, y, *p, *prec))
            }
            (FieldTower::Laurent { base, .. }, Elem::L(x), Elem::L(y)) => {
                Elem::L(lau_add(base, x, y))
            }
            _ => panic!("element does not belong to {self}: {a:?} + {b:?}"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self.core(), a) {
            (FieldTower::Rationals, Elem::Q(x)) => Elem::Q(-x),
            (FieldTower::Finite(ff), Elem::F(x)) => Elem::F(ff.neg(*x)),
            (FieldTower::PAdic { p, .. }, Elem::P(x)) => Elem::P(padic::neg(x, *p)),
            (FieldTower::Laurent { base, .. }, Elem::L(x)) => Elem::L(Laurent {
                terms: x.terms.iter().map(|(k, c)| (*k, base.neg(c))).collect(),
                prec: x.prec,
            }),
            _ => panic!("element does not belong to {self}: {a:?}"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self.core(), a, b) {
            (FieldTower::Rationals, Elem::Q(x), Elem::Q(y)) => Elem::Q(x * y),
            (FieldTower::Finite(ff), Elem::F(x), Elem::F(y)) => Elem::F(ff.mul(*x, *y)),
            (FieldTower::PAdic { p, prec }, Elem::P(x), Elem::P(y)) => {
                Elem::P(padic::mul(x, y, *p, *prec))
            }
            (FieldTower::Laurent { base, .. }, Elem::L(x), Elem::L(y)) => {
                Elem::L(lau_mul(base, x, y))
            }
            _ => panic!("element does not belong to {self}: {a:?} * {b:?}"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        match (self.core(), a) {
            (FieldTower::Rationals, Elem::Q(x)) => {
                if x.is_zero() {
                    invalid("division by zero")
                } else {
                    Ok(Elem::Q(x.recip()))
                }
            }
            (FieldTower::Finite(ff), Elem::F(x)) => ff
                .inv(*x)
                .map(Elem::F)
                .ok_or_else(|| Error::Invalid("division by zero".into())),
            (FieldTower::PAdic { p, .. }, Elem::P(x)) => padic::inv(x, *p).map(Elem::P),
            (FieldTower::Laurent { base, prec, .. }, Elem::L(x)) => {
                lau_inv(base, x, *prec).map(Elem::L)
            }
            _ => panic!("element does not belong to {self}: {a:?}"),
        }
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Elem, e: i64) -> Result<Elem> {
        let mut base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut k = e.unsigned_abs();
        let mut r = self.one();
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(&r, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(r)
    }

    pub fn scale_int(&self, a: &Elem, n: i64) -> Elem {
        self.mul(a, &self.int(n))
    }

    /// True when the element is zero (exactly, or at the declared precision).
    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Q(x) => x.is_zero(),
            Elem::F(x) => *x == 0,
            Elem::P(x) => padic::is_zero(x),
            Elem::L(x) => x.terms.is_empty(),
        }
    }

    pub fn eq(&self, a: &Elem, b: &Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        self.eq(a, &self.one())
    }

    /// True when the element is known exactly (no truncated expansion anywhere).
    pub fn is_exact(&self, a: &Elem) -> bool {
        match (self.core(), a) {
            (FieldTower::PAdic { .. }, Elem::P(x)) => matches!(x, PAdic::Exact(_)),
            (FieldTower::Laurent { base, .. }, Elem::L(x)) => {
                x.prec.is_none() && x.terms.iter().all(|(_, c)| base.is_exact(c))
            }
            _ => true,
        }
    }

    /// The rational value of an element of ℚ, or of an exact p-adic, or of a
    /// constant Laurent polynomial over those.
    pub fn as_rational(&self, a: &Elem) -> Option<BigRational> {
        match (self.core(), a) {
            (FieldTower::Rationals, Elem::Q(x)) => Some(x.clone()),
            (FieldTower::PAdic { .. }, Elem::P(PAdic::Exact(x))) => Some(x.clone()),
            (FieldTower::Laurent { base, .. }, Elem::L(x)) => {
                if x.prec.is_some() {
                    return None;
                }
                match x.terms.as_slice() {
                    [] => Some(BigRational::zero()),
                    [(0, c)] => base.as_rational(c),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    // ---- valuations and Laurent structure --------------------------------------

    /// Valuation in the outermost Laurent variable.
    pub fn laurent_valuation(&self, a: &Elem) -> Result<i64> {
        match (self.core(), a) {
            (FieldTower::Laurent { .. }, Elem::L(x)) => match x.terms.first() {
                Some((k, _)) => Ok(*k),
                None => match x.prec {
                    None => invalid("valuation of zero"),
                    Some(n) => Err(Error::Precision(format!(
                        "value vanishes modulo t^{n}; valuation unknown"
                    ))),
                },
            },
            _ => invalid(format!("{self} is not a Laurent extension")),
        }
    }

    /// Write `x = t^v * u * tail` with `u` a unit of the base and `tail = 1 + O(t)`.
    pub fn laurent_split(&self, x: &Elem) -> Result<LaurentSplit> {
        let v = self.laurent_valuation(x)?;
        let unit = match x {
            Elem::L(l) => l.terms[0].1.clone(),
            _ => unreachable!(),
        };
        let lead = self.monomial(unit.clone(), v)?;
        let tail = self.div(x, &lead)?;
        Ok(LaurentSplit { valuation: v, unit, tail })
    }

    /// p-adic valuation of an element of the ground descriptor.
    pub fn padic_valuation(&self, a: &Elem) -> Result<i64> {
        match (self.core(), a) {
            (FieldTower::PAdic { p, .. }, Elem::P(x)) => padic::valuation(x, *p),
            (FieldTower::Rationals, Elem::Q(_)) | _ => {
                invalid(format!("{self} is not a p-adic descriptor"))
            }
        }
    }

    /// Unit part of a p-adic element modulo `p^k`.
    pub fn padic_unit_mod(&self, a: &Elem, k: u32) -> Result<BigInt> {
        match (self.core(), a) {
            (FieldTower::PAdic { p, .. }, Elem::P(x)) => padic::unit_mod(x, *p, k),
            _ => invalid(format!("{self} is not a p-adic descriptor")),
        }
    }

    /// p-adic element `p^val * unit` with the unit known modulo `p^rel`.
    pub fn padic_approx(&self, val: i64, unit: BigInt, rel: u32) -> Result<Elem> {
        match self.core() {
            FieldTower::PAdic { p, .. } => {
                let m = p_pow(*p, rel);
                let u = unit.mod_floor(&m);
                if (&u % BigInt::from(*p)).is_zero() {
                    return invalid("p-adic unit must be prime to p");
                }
                Ok(Elem::P(PAdic::Approx { val, unit: u, rel }))
            }
            _ => invalid(format!("{self} is not a p-adic descriptor")),
        }
    }

    // ---- roots and powers -----------------------------------------------------

    /// Decide whether `x` is an `n`-th power, returning a witness when representable.
    pub fn is_nth_power(&self, x: &Elem, n: u64) -> Result<PowerTest> {
        if n == 0 {
            return invalid("n must be positive");
        }
        if self.is_zero(x) {
            return invalid("zero has no power class");
        }
        if n == 1 {
            return Ok(PowerTest {
                is_power: true,
                witness: Some(x.clone()),
                certificate: "trivial exponent".into(),
            });
        }
        match (self.core(), x) {
            (FieldTower::Rationals, Elem::Q(r)) => Ok(rational_power(r, n)),
            (FieldTower::Finite(ff), Elem::F(a)) => Ok(finite_power(ff, *a, n)),
            (FieldTower::PAdic { p, .. }, Elem::P(a)) => self.padic_power(*p, a, n),
            (FieldTower::Laurent { .. }, Elem::L(_)) => self.laurent_power(x, n),
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn is_square(&self, x: &Elem) -> Result<bool> {
        Ok(self.is_nth_power(x, 2)?.is_power)
    }

    fn padic_power(&self, p: u64, a: &PAdic, n: u64) -> Result<PowerTest> {
        let (pk, tame) = split_p_part(n, p);
        if pk > 1 && p != 2 {
            return unsupported(format!(
                "{n}-th powers over Qp({p}) are wild; only n prime to p is supported"
            ));
        }
        if let PAdic::Exact(r) = a {
            let t = rational_power(r, n);
            if t.is_power {
                return Ok(PowerTest {
                    is_power: true,
                    witness: match t.witness {
                        Some(Elem::Q(w)) => Some(self.wrap_rational(w)),
                        _ => None,
                    },
                    certificate: "exact rational root".into(),
                });
            }
        }
        let v = padic::valuation(a, p)?;
        if v.rem_euclid(n as i64) != 0 {
            let cert = if n == 2 {
                "odd valuation".to_string()
            } else {
                format!("valuation {v} not divisible by {n}")
            };
            return Ok(PowerTest { is_power: false, witness: None, certificate: cert });
        }
        let prec = match self.core() {
            FieldTower::PAdic { prec, .. } => *prec,
            _ => unreachable!(),
        };
        let rel = padic::rel(a).unwrap_or(prec);
        // tame part
        let mut root_tame: Option<BigInt> = None;
        if tame > 1 {
            let u1 = padic::unit_mod(a, p, 1)?.to_u64().unwrap();
            let g = arith::gcd_u64(tame, p - 1);
            if arith::pow_mod(u1, (p - 1) / g, p) != 1 {
                return Ok(PowerTest {
                    is_power: false,
                    witness: None,
                    certificate: "unit-class obstruction".into(),
                });
            }
            let u = padic::unit_mod(a, p, rel)?;
            root_tame = Some(hensel_root(&u, tame, p, rel));
        }
        let mut root_two: Option<(BigInt, u32)> = None;
        if pk > 1 {
            let k = pk.trailing_zeros();
            if rel < k + 2 {
                return Err(Error::Precision(format!(
                    "2-adic unit known modulo 2^{rel}; 2^{} required",
                    k + 2
                )));
            }
            let u = padic::unit_mod(a, p, rel)?;
            let m = p_pow(2, k + 2);
            if !(&u % &m).is_one() {
                return Ok(PowerTest {
                    is_power: false,
                    witness: None,
                    certificate: "unit-class obstruction".into(),
                });
            }
            let mut y = u;
            let mut r = rel;
            for _ in 0..k {
                y = two_adic_sqrt(&y, r);
                r -= 1;
            }
            root_two = Some((y, r));
        }
        // combine coprime roots: y = y1^s * y2^t where s*tame + t*pk = 1
        let val = v / n as i64;
        let witness = match (root_tame, root_two) {
            (Some(y), None) => Some((y, rel)),
            (None, Some((y, r))) => Some((y, r)),
            (Some(y1), Some((y2, r2))) => {
                let e = BigInt::from(tame as i64).extended_gcd(&BigInt::from(pk as i64));
                let m = p_pow(p, r2);
                let pw = |b: &BigInt, ex: &BigInt| -> BigInt {
                    if ex.is_negative() {
                        big_inv_mod(b, &m).unwrap().modpow(&(-ex), &m)
                    } else {
                        b.modpow(ex, &m)
                    }
                };
                // x = y1^tame = y2^pk;  (y1^t * y2^s)^n = x^(t*pk + s*tame)
                Some(((pw(&y1, &e.y) * pw(&y2, &e.x)).mod_floor(&m), r2))
            }
            (None, None) => None,
        };
        let witness = match witness {
            Some((y, r)) => Some(self.padic_approx(val, y, r)?),
            None => None,
        };
        Ok(PowerTest {
            is_power: true,
            witness,
            certificate: "Hensel lift of residue root".into(),
        })
    }

    fn wrap_rational(&self, r: BigRational) -> Elem {
        match self.core() {
            FieldTower::Rationals => Elem::Q(r),
            FieldTower::PAdic { .. } => Elem::P(PAdic::Exact(r)),
            _ => self.from_rational(&r).expect("unit denominators"),
        }
    }

    fn laurent_power(&self, x: &Elem, n: u64) -> Result<PowerTest> {
        let base = self.laurent_base().unwrap().clone();
        let split = self.laurent_split(x)?;
        if split.valuation.rem_euclid(n as i64) != 0 {
            let cert = if n == 2 {
                "odd valuation".to_string()
            } else {
                format!("valuation {} not divisible by {n}", split.valuation)
            };
            return Ok(PowerTest { is_power: false, witness: None, certificate: cert });
        }
        let ut = base.is_nth_power(&split.unit, n)?;
        if !ut.is_power {
            return Ok(PowerTest {
                is_power: false,
                witness: None,
                certificate: format!("leading coefficient: {}", ut.certificate),
            });
        }
        let ch = self.characteristic();
        let (pk, tame) = if ch > 0 { split_p_part(n, ch) } else { (1, n) };
        let mut tail = split.tail.clone();
        if pk > 1 {
            match self.frobenius_root(&tail, pk)? {
                Some(r) => tail = r,
                None => {
                    return Ok(PowerTest {
                        is_power: false,
                        witness: None,
                        certificate: "principal unit is not a p-th power".into(),
                    })
                }
            }
        }
        let tail_root = if tame > 1 { self.newton_root(&tail, tame)? } else { tail };
        let witness = match ut.witness {
            Some(w) => Some(self.mul(
                &self.monomial(w, split.valuation / n as i64)?,
                &tail_root,
            )),
            None => None,
        };
        Ok(PowerTest {
            is_power: true,
            witness,
            certificate: "valuation, leading unit and principal-unit root".into(),
        })
    }

    /// `pk`-th root (pk a power of the characteristic) of a principal unit of a
    /// Laurent tower in positive characteristic.
    fn frobenius_root(&self, s: &Elem, pk: u64) -> Result<Option<Elem>> {
        let base = self.laurent_base().unwrap();
        let l = match s {
            Elem::L(l) => l,
            _ => unreachable!(),
        };
        let mut terms = Vec::new();
        for (k, c) in &l.terms {
            if k.rem_euclid(pk as i64) != 0 {
                return Ok(None);
            }
            let r = base.is_nth_power(c, pk)?;
            if !r.is_power {
                return Ok(None);
            }
            let w = r
                .witness
                .ok_or_else(|| Error::Unsupported("no coefficient root available".into()))?;
            terms.push((k / pk as i64, w));
        }
        if l.prec.is_some() {
            return Err(Error::Precision(
                "p-th power test on a truncated expansion".into(),
            ));
        }
        Ok(Some(Elem::L(Laurent { terms, prec: None })))
    }

    /// `n`-th root of a principal unit `1 + O(t)` by Newton iteration (char ∤ n).
    fn newton_root(&self, s: &Elem, n: u64) -> Result<Elem> {
        let mut y = self.one();
        let nn = self.int(n as i64);
        let steps = 2 + (self.lau_prec() as f64).log2().ceil() as usize;
        for _ in 0..steps {
            let yn1 = self.pow(&y, n as i64 - 1)?;
            let f = self.sub(&self.mul(&yn1, &y), s);
            let d = self.mul(&nn, &yn1);
            y = self.sub(&y, &self.div(&f, &d)?);
        }
        Ok(y)
    }

    /// Primitive `m`-th root of unity, chosen deterministically.
    pub fn primitive_root_of_unity(&self, m: u64) -> Result<RootLookup> {
        if m == 0 {
            return invalid("m must be positive");
        }
        match self {
            FieldTower::Root { base, .. } => return base.primitive_root_of_unity(m),
            FieldTower::Laurent { base, .. } => {
                let ch = self.characteristic();
                if ch > 0 && m % ch == 0 {
                    return Ok(RootLookup::Absent(format!(
                        "no nontrivial {ch}-power roots of unity in characteristic {ch}"
                    )));
                }
                return Ok(match base.primitive_root_of_unity(m)? {
                    RootLookup::Found(z) => RootLookup::Found(self.embed(z)),
                    a => a,
                });
            }
            _ => {}
        }
        match self {
            FieldTower::Rationals => Ok(match m {
                1 => RootLookup::Found(self.one()),
                2 => RootLookup::Found(self.int(-1)),
                _ => RootLookup::Absent(format!("Q contains only ±1; {m} ∤ 2")),
            }),
            FieldTower::Finite(ff) => {
                let q = ff.order();
                if (q - 1) % m != 0 {
                    return Ok(RootLookup::Absent(format!("{m} ∤ q−1")));
                }
                Ok(RootLookup::Found(Elem::F(smallest_of_order(ff, m))))
            }
            FieldTower::PAdic { p, prec } => {
                if m == 1 {
                    return Ok(RootLookup::Found(self.one()));
                }
                if m == 2 {
                    return Ok(RootLookup::Found(self.int(-1)));
                }
                if (p - 1) % m != 0 {
                    return Ok(RootLookup::Absent(format!("{m} ∤ p−1")));
                }
                let ff = FiniteField::new(*p)?;
                let a = smallest_of_order(&ff, m);
                let t = teichmuller(a, *p, *prec);
                Ok(RootLookup::Found(Elem::P(PAdic::Approx { val: 0, unit: t, rel: *prec })))
            }
            _ => unreachable!(),
        }
    }

    /// Deterministic "named" constants usable in element expressions: `p` is the
    /// residue prime of a p-adic ground field and `u` the least positive integer whose
    /// residue is a non-square unit (also for finite prime ground fields).
    pub fn standard_bindings(&self) -> HashMap<String, Elem> {
        let mut out = HashMap::new();
        match self.ground() {
            FieldTower::PAdic { p, .. } => {
                out.insert("p".to_string(), self.int(*p as i64));
                if *p > 2 {
                    let u = (2..*p).find(|&u| arith::legendre(u, *p) == -1).unwrap();
                    out.insert("u".to_string(), self.int(u as i64));
                } else {
                    out.insert("u".to_string(), self.int(5));
                }
            }
            FieldTower::Finite(ff) if ff.p > 2 => {
                let nonsq = (1..ff.order())
                    .find(|&x| ff.pow(x, (ff.order() - 1) / 2) != 1)
                    .unwrap();
                out.insert("u".to_string(), self.from_ground(Elem::F(nonsq)));
            }
            _ => {}
        }
        if let FieldTower::Root { m, .. } = self {
            if let Ok(RootLookup::Found(z)) = self.primitive_root_of_unity(*m) {
                out.insert("zeta".to_string(), z);
            }
        }
        out
    }

    // ---- parsing and printing --------------------------------------------------

    /// Parse an element expression. Identifiers resolve to `bindings`, Laurent
    /// variables, the extension generator `g`, or the adjoined root `zeta`.
    pub fn parse_elem(&self, s: &str, bindings: &HashMap<String, Elem>) -> Result<Elem> {
        let toks = tokenize(s)?;
        let mut p = ExprParser { toks: &toks, pos: 0, field: self, bindings };
        let v = p.expr()?;
        if p.pos != toks.len() {
            return Err(Error::Syntax(format!("unexpected trailing input in '{s}'")));
        }
        Ok(v)
    }

    pub fn parse_elem_plain(&self, s: &str) -> Result<Elem> {
        self.parse_elem(s, &self.standard_bindings())
    }

    pub fn fmt_elem(&self, a: &Elem) -> String {
        match (self.core(), a) {
            (FieldTower::Rationals, Elem::Q(x)) => x.to_string(),
            (FieldTower::Finite(ff), Elem::F(x)) => {
                if ff.e == 1 {
                    x.to_string()
                } else {
                    let d = ff.digits(*x);
                    let parts: Vec<String> = d
                        .iter()
                        .enumerate()
                        .rev()
                        .filter(|(_, c)| **c != 0)
                        .map(|(i, c)| match (i, c) {
                            (0, c) => c.to_string(),
                            (1, 1) => "g".to_string(),
                            (1, c) => format!("{c}*g"),
                            (i, 1) => format!("g^{i}"),
                            (i, c) => format!("{c}*g^{i}"),
                        })
                        .collect();
                    if parts.is_empty() {
                        "0".into()
                    } else {
                        parts.join(" + ")
                    }
                }
            }
            (FieldTower::PAdic { p, .. }, Elem::P(x)) => match x {
                PAdic::Exact(r) => r.to_string(),
                PAdic::Approx { val, unit, rel } => {
                    let head = if *val == 0 {
                        unit.to_string()
                    } else {
                        format!("{unit}*{p}^{val}")
                    };
                    format!("{head} + O({p}^{})", val + *rel as i64)
                }
                PAdic::Zero { abs } => format!("O({p}^{abs})"),
            },
            (FieldTower::Laurent { base, var, .. }, Elem::L(x)) => {
                let mut parts: Vec<String> = x
                    .terms
                    .iter()
                    .map(|(k, c)| {
                        let cs = base.fmt_elem(c);
                        let cs = if cs.contains(['+', ' ']) || (cs.starts_with('-') && *k != 0) {
                            format!("({cs})")
                        } else {
                            cs
                        };
                        match k {
                            0 => cs,
                            1 if cs == "1" => var.clone(),
                            1 => format!("{cs}*{var}"),
                            k if cs == "1" => format!("{var}^{k}"),
                            k => format!("{cs}*{var}^{k}"),
                        }
                    })
                    .collect();
                if let Some(n) = x.prec {
                    parts.push(format!("O({var}^{n})"));
                }
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join(" + ")
                }
            }
            _ => format!("{a:?}"),
        }
    }

    // ---- sampling ------------------------------------------------------------

    /// Random element with small coefficients (possibly zero).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        match self.core() {
            FieldTower::Rationals => Elem::Q(BigRational::new(
                big(rng.gen_range(-9..=9)),
                big(rng.gen_range(1..=6)),
            )),
            FieldTower::Finite(ff) => Elem::F(rng.gen_range(0..ff.order())),
            FieldTower::PAdic { p, .. } => {
                let n = rng.gen_range(-30i64..=30);
                let d = loop {
                    let d = rng.gen_range(1i64..=12);
                    if d as u64 % p != 0 || rng.gen_bool(0.3) {
                        break d;
                    }
                };
                Elem::P(PAdic::Exact(BigRational::new(big(n), big(d))))
            }
            FieldTower::Laurent { base, .. } => {
                let lo = rng.gen_range(-1i64..=1);
                let len = rng.gen_range(0..=3);
                let mut terms = Vec::new();
                for k in lo..lo + len {
                    let c = base.sample(rng);
                    if !base.is_zero(&c) {
                        terms.push((k, c));
                    }
                }
                Elem::L(Laurent { terms, prec: None })
            }
            FieldTower::Root { .. } => unreachable!(),
        }
    }

    /// Random nonzero element.
    pub fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        loop {
            let x = self.sample(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }
}

/// `(p-part, prime-to-p part)` of `n`.
fn split_p_part(mut n: u64, p: u64) -> (u64, u64) {
    let mut pk = 1;
    while n % p == 0 {
        n /= p;
        pk *= p;
    }
    (pk, n)
}

fn rational_power(r: &BigRational, n: u64) -> PowerTest {
    let k = n as u32;
    let num = if r.is_negative() && n % 2 == 1 {
        arith::exact_root(&-r.numer(), k).map(|x| -x)
    } else {
        arith::exact_root(r.numer(), k)
    };
    let den = arith::exact_root(r.denom(), k);
    match (num, den) {
        (Some(a), Some(b)) => PowerTest {
            is_power: true,
            witness: Some(Elem::Q(BigRational::new(a, b))),
            certificate: "exact integer roots of numerator and denominator".into(),
        },
        _ => PowerTest {
            is_power: false,
            witness: None,
            certificate: if r.is_negative() && n % 2 == 0 {
                "negative value (real place)".into()
            } else {
                "numerator or denominator is not a perfect power".into()
            },
        },
    }
}

fn finite_power(ff: &FiniteField, a: u64, n: u64) -> PowerTest {
    let q = ff.order();
    let g = arith::gcd_u64(n, q - 1);
    if ff.pow(a, (q - 1) / g) != 1 {
        return PowerTest {
            is_power: false,
            witness: None,
            certificate: "unit-class obstruction".into(),
        };
    }
    let witness = if q <= 1 << 22 {
        (1..q).find(|&y| ff.pow(y, n) == a).map(Elem::F)
    } else {
        None
    };
    PowerTest {
        is_power: true,
        witness,
        certificate: "power-map criterion a^((q-1)/gcd(n,q-1)) = 1".into(),
    }
}

fn smallest_of_order(ff: &FiniteField, m: u64) -> u64 {
    let q = ff.order();
    if q <= 1 << 22 {
        if let Some(x) = (1..q).find(|&x| ff.element_order(x) == m) {
            return x;
        }
    }
    ff.pow(ff.generator(), (q - 1) / m)
}

/// Teichmüller lift of a residue `a` modulo `p^n`.
fn teichmuller(a: u64, p: u64, n: u32) -> BigInt {
    let m = p_pow(p, n);
    let mut y = BigInt::from(a);
    for _ in 0..n {
        y = y.modpow(&BigInt::from(p), &m);
    }
    y
}

/// Hensel lift of an `n`-th root (p ∤ n) of the unit `u` modulo `p^rel`.
fn hensel_root(u: &BigInt, n: u64, p: u64, rel: u32) -> BigInt {
    let u1 = u.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    let y0 = (1..p)
        .find(|&y| arith::pow_mod(y, n, p) == u1)
        .expect("residue root exists");
    let m = p_pow(p, rel);
    let nb = BigInt::from(n);
    let mut y = BigInt::from(y0);
    for _ in 0..=rel {
        let f = (y.modpow(&nb, &m) - u).mod_floor(&m);
        if f.is_zero() {
            break;
        }
        let d = (&nb * y.modpow(&BigInt::from(n - 1), &m)).mod_floor(&m);
        let di = big_inv_mod(&d, &m).expect("derivative is a unit");
        y = (&y - f * di).mod_floor(&m);
    }
    y
}

/// Square root of a 2-adic unit `u ≡ 1 mod 8` known modulo `2^r`; the result is
/// correct modulo `2^(r-1)`.
fn two_adic_sqrt(u: &BigInt, r: u32) -> BigInt {
    let mut y = BigInt::one();
    for j in 3..r {
        let m = p_pow(2, j + 1);
        if ((&y * &y - u).mod_floor(&m)).is_zero() {
            continue;
        }
        y += p_pow(2, j - 1);
    }
    y.mod_floor(&p_pow(2, r - 1))
}

fn lau_add(base: &FieldTower, x: &Laurent, y: &Laurent) -> Laurent {
    let prec = match (x.prec, y.prec) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    };
    let mut map: BTreeMap<i64, Elem> = BTreeMap::new();
    for (k, c) in x.terms.iter().chain(&y.terms) {
        if prec.map_or(false, |n| *k >= n) {
            continue;
        }
        match map.get_mut(k) {
            Some(e) => *e = base.add(e, c),
            None => {
                map.insert(*k, c.clone());
            }
        }
    }
    Laurent {
        terms: map.into_iter().filter(|(_, c)| !base.is_zero(c)).collect(),
        prec,
    }
}

fn lau_mul(base: &FieldTower, x: &Laurent, y: &Laurent) -> Laurent {
    let exact_zero = |l: &Laurent| l.terms.is_empty() && l.prec.is_none();
    if exact_zero(x) || exact_zero(y) {
        return Laurent { terms: vec![], prec: None };
    }
    let v = |l: &Laurent| l.terms.first().map(|t| t.0).or(l.prec).unwrap();
    let cap = |a: i64, p: Option<i64>| p.map(|n| a + n);
    let prec = match (cap(v(x), y.prec), cap(v(y), x.prec)) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    };
    let mut map: BTreeMap<i64, Elem> = BTreeMap::new();
    for (i, a) in &x.terms {
        for (j, b) in &y.terms {
            let k = i + j;
            if prec.map_or(false, |n| k >= n) {
                continue;
            }
            let c = base.mul(a, b);
            match map.get_mut(&k) {
                Some(e) => *e = base.add(e, &c),
                None => {
                    map.insert(k, c);
                }
            }
        }
    }
    Laurent {
        terms: map.into_iter().filter(|(_, c)| !base.is_zero(c)).collect(),
        prec,
    }
}

fn lau_inv(base: &FieldTower, x: &Laurent, rel_prec: u32) -> Result<Laurent> {
    let (v, c) = match x.terms.first() {
        Some((v, c)) => (*v, c.clone()),
        None => {
            return match x.prec {
                None => invalid("division by zero"),
                Some(n) => Err(Error::Precision(format!(
                    "inverting a value known only modulo t^{n}"
                ))),
            }
        }
    };
    let ci = base.inv(&c)?;
    if x.terms.len() == 1 && x.prec.is_none() {
        return Ok(Laurent { terms: vec![(-v, ci)], prec: None });
    }
    let target = match x.prec {
        Some(n) => (rel_prec as i64).min(n - v),
        None => rel_prec as i64,
    };
    if target <= 0 {
        return Err(Error::Precision("no relative precision left".into()));
    }
    let t = target as usize;
    let mut y = vec![base.zero(); t];
    for (k, a) in &x.terms {
        let idx = k - v;
        if idx >= 0 && (idx as usize) < t {
            y[idx as usize] = base.mul(a, &ci);
        }
    }
    let mut s = vec![base.one()];
    for k in 1..t {
        let mut acc = base.zero();
        for j in 1..=k {
            if !base.is_zero(&y[j]) {
                acc = base.add(&acc, &base.mul(&y[j], &s[k - j]));
            }
        }
        s.push(base.neg(&acc));
    }
    let terms = s
        .into_iter()
        .enumerate()
        .map(|(k, sk)| (k as i64 - v, base.mul(&sk, &ci)))
        .filter(|(_, c)| !base.is_zero(c))
        .collect();
    Ok(Laurent { terms, prec: Some(target - v) })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = cs[st..i].iter().collect();
            out.push(Tok::Num(txt.parse().unwrap()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Op('-'));
            i += 1;
        } else {
            return Err(Error::Syntax(format!("unexpected character '{c}' in '{s}'")));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [Tok],
    pos: usize,
    field: &'a FieldTower,
    bindings: &'a HashMap<String, Elem>,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Elem> {
        let f = self.field;
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = f.add(&acc, &self.term()?);
            } else if self.eat('-') {
                acc = f.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Elem> {
        let f = self.field;
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = f.mul(&acc, &self.unary()?);
            } else if self.eat('/') {
                acc = f.div(&acc, &self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Elem> {
        if self.eat('-') {
            let v = self.unary()?;
            return Ok(self.field.neg(&v));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Elem> {
        let b = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.peek() {
                Some(Tok::Num(n)) => n.to_i64().ok_or_else(|| Error::Syntax("huge exponent".into()))?,
                _ => return Err(Error::Syntax("expected an integer exponent".into())),
            };
            self.pos += 1;
            return self.field.pow(&b, if neg { -e } else { e });
        }
        Ok(b)
    }

    fn atom(&mut self) -> Result<Elem> {
        let f = self.field;
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(f.from_bigint(&n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(v) = self.bindings.get(&name) {
                    return Ok(v.clone());
                }
                if f.laurent_vars().contains(&name) {
                    return f.var(&name);
                }
                if name == "g" {
                    return f.generator_g();
                }
                Err(Error::Syntax(format!("unknown identifier '{name}' over {f}")))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Syntax("missing ')'".into()));
                }
                Ok(v)
            }
            other => Err(Error::Syntax(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldTower {
        FieldTower::Rationals
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_field("Q").unwrap(), FieldTower::Rationals);
        let f = parse_field("F(7)((t))").unwrap();
        assert_eq!(f.characteristic(), 7);
        let chain = f.residue_chain();
        assert_eq!(chain.len(), 1);
        assert_eq!(chain[0].0, "t");
        assert_eq!(chain[0].1, FieldTower::finite(7).unwrap());
        let g = parse_field("Qp(5)((t1))((t2))").unwrap();
        assert_eq!(g.laurent_vars(), vec!["t2", "t1"]);
        assert_eq!(g.ground(), &FieldTower::padic(5).unwrap());
        assert!(parse_field("F(7)[zeta_5]").is_err());
        assert!(parse_field("F(7)[zeta_3]").is_ok());
        assert!(parse_field("F(12)").is_err());
        assert!(parse_field("Qp(4)").is_err());
        assert!(matches!(parse_field("R"), Err(Error::Syntax(_))));
    }

    #[test]
    fn print_parse_roundtrip() {
        for s in [
            "Q",
            "F(4)",
            "F(7)((t))",
            "Qp(5)((t1))((t2))",
            "Qp(17,12)",
            "Q((s,20))",
            "Qp(13)[zeta_4]((t))",
        ] {
            let f = parse_field(s).unwrap();
            assert_eq!(parse_field(&f.to_string()).unwrap(), f);
            assert_eq!(f.to_string(), s);
        }
    }

    #[test]
    fn power_examples() {
        let f7 = FieldTower::finite(7).unwrap();
        let t = f7.is_nth_power(&Elem::F(2), 2).unwrap();
        assert!(t.is_power);
        assert_eq!(t.witness, Some(Elem::F(3)));
        let t = q().is_nth_power(&q().int(4), 2).unwrap();
        assert_eq!(t.witness, Some(q().int(2)));
        let q5 = FieldTower::padic(5).unwrap();
        let t = q5.is_nth_power(&q5.int(5), 2).unwrap();
        assert!(!t.is_power);
        assert_eq!(t.certificate, "odd valuation");
    }

    #[test]
    fn padic_roots_certified() {
        let q17 = FieldTower::padic(17).unwrap();
        // 2 is a square mod 17 (6^2 = 36 = 2), so 2 is a 17-adic square
        let t = q17.is_nth_power(&q17.int(2), 2).unwrap();
        assert!(t.is_power);
        let w = t.witness.unwrap();
        assert!(q17.eq(&q17.mul(&w, &w), &q17.int(2)));
        assert!(!q17.is_nth_power(&q17.int(3), 2).unwrap().is_power);
        let q2 = FieldTower::padic(2).unwrap();
        assert!(q2.is_nth_power(&q2.int(17), 2).unwrap().is_power);
        assert!(!q2.is_nth_power(&q2.int(5), 2).unwrap().is_power);
        let w = q2.is_nth_power(&q2.int(17), 2).unwrap().witness.unwrap();
        assert!(q2.eq(&q2.mul(&w, &w), &q2.int(17)));
        assert!(!q2.is_nth_power(&q2.int(41), 4).unwrap().is_power);
        assert!(q2.is_nth_power(&q2.int(41), 2).unwrap().is_power);
        let w = q2.is_nth_power(&q2.int(33), 4).unwrap().witness.unwrap();
        assert!(q2.eq(&q2.pow(&w, 4).unwrap(), &q2.int(33)));
        let w = q2.is_nth_power(&q2.int(33 * 33 * 33), 12).unwrap().witness.unwrap();
        assert!(q2.eq(&q2.pow(&w, 12).unwrap(), &q2.int(33 * 33 * 33)));
        let q7 = FieldTower::padic(7).unwrap();
        let w = q7.is_nth_power(&q7.int(2), 6).unwrap();
        assert!(!w.is_power);
        let x = q7.pow(&q7.int(3), 6).unwrap();
        let w = q7.is_nth_power(&q7.add(&x, &q7.int(49)), 6).unwrap().witness.unwrap();
        assert!(q7.eq(&q7.pow(&w, 6).unwrap(), &q7.add(&x, &q7.int(49))));
        assert!(matches!(q17.is_nth_power(&q17.int(2), 17), Err(Error::Unsupported(_))));
    }

    #[test]
    fn roots_of_unity() {
        let f7 = FieldTower::finite(7).unwrap();
        assert_eq!(f7.primitive_root_of_unity(3).unwrap(), RootLookup::Found(Elem::F(2)));
        assert_eq!(q().primitive_root_of_unity(2).unwrap(), RootLookup::Found(q().int(-1)));
        assert_eq!(
            f7.primitive_root_of_unity(5).unwrap(),
            RootLookup::Absent("5 ∤ q−1".into())
        );
        let q13 = FieldTower::padic(13).unwrap();
        let z = q13.primitive_root_of_unity(4).unwrap().found().unwrap();
        assert!(q13.eq(&q13.pow(&z, 4).unwrap(), &q13.one()));
        assert!(!q13.eq(&q13.pow(&z, 2).unwrap(), &q13.one()));
    }

    #[test]
    fn laurent_split_examples() {
        let f = parse_field("Q((t))").unwrap();
        let x = f.parse_elem_plain("3*t^2 + t^3").unwrap();
        let s = f.laurent_split(&x).unwrap();
        assert_eq!(s.valuation, 2);
        assert_eq!(s.unit, q().int(3));
        let expect = f.parse_elem_plain("1 + t/3").unwrap();
        assert!(f.eq(&s.tail, &expect));
        let y = f.parse_elem_plain("t^-1").unwrap();
        let s = f.laurent_split(&y).unwrap();
        assert_eq!((s.valuation, s.unit.clone()), (-1, q().int(1)));
        assert!(f.is_one(&s.tail));
        let g = parse_field("Qp(5)((t))").unwrap();
        let z = g.parse_elem_plain("5*t").unwrap();
        let s = g.laurent_split(&z).unwrap();
        assert_eq!(s.valuation, 1);
        let q5 = FieldTower::padic(5).unwrap();
        assert_eq!(q5.padic_valuation(&s.unit).unwrap(), 1);
    }

    #[test]
    fn laurent_inverse_series() {
        let f = parse_field("Q((t))").unwrap();
        let x = f.parse_elem_plain("1 + t").unwrap();
        let y = f.inv(&x).unwrap();
        let prod = f.mul(&x, &y);
        assert!(f.is_one(&prod));
        if let Elem::L(l) = &y {
            assert_eq!(l.prec, Some(16));
            assert_eq!(l.terms.len(), 16);
        }
    }

    #[test]
    fn laurent_square_roots() {
        let f = parse_field("Q((t))").unwrap();
        let x = f.parse_elem_plain("4*t^2 + 4*t^3").unwrap();
        let r = f.is_nth_power(&x, 2).unwrap();
        assert!(r.is_power);
        let w = r.witness.unwrap();
        assert!(f.eq(&f.mul(&w, &w), &x));
        let g = parse_field("F(2)((t))").unwrap();
        let a = g.parse_elem_plain("1 + t^2").unwrap();
        assert!(g.is_square(&a).unwrap());
        let b = g.parse_elem_plain("1 + t").unwrap();
        assert!(!g.is_square(&b).unwrap());
    }

    #[test]
    fn padic_precision_loss_is_reported() {
        let q5 = FieldTower::padic(5).unwrap();
        let z = q5.primitive_root_of_unity(4).unwrap().found().unwrap();
        let d = q5.sub(&z, &z);
        assert!(q5.is_zero(&d));
        assert!(matches!(q5.padic_valuation(&d), Err(Error::Precision(_))));
    }

    #[test]
    fn finite_extension_arithmetic() {
        let f4 = FieldTower::finite(4).unwrap();
        let g = f4.generator_g().unwrap();
        let g2 = f4.mul(&g, &g);
        assert!(f4.eq(&g2, &f4.add(&g, &f4.one())));
        assert_eq!(f4.fmt_elem(&g2), "g + 1");
        let f9 = FieldTower::finite(9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = f9.sample_nonzero(&mut rng);
            assert!(f9.is_one(&f9.mul(&a, &f9.inv(&a).unwrap())));
        }
    }

    #[test]
    fn field_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in ["Q", "F(7)", "F(9)", "Qp(5)", "Q((t))", "F(3)((s))((t))", "Qp(7)((t))"] {
            let f = parse_field(s).unwrap();
            for _ in 0..1000 {
                let (a, b, c) = (f.sample(&mut rng), f.sample(&mut rng), f.sample(&mut rng));
                assert!(f.eq(&f.mul(&f.mul(&a, &b), &c), &f.mul(&a, &f.mul(&b, &c))), "{s}");
                assert!(f.eq(&f.add(&f.add(&a, &b), &c), &f.add(&a, &f.add(&b, &c))));
                assert!(f.eq(
                    &f.mul(&a, &f.add(&b, &c)),
                    &f.add(&f.mul(&a, &b), &f.mul(&a, &c))
                ));
                if !f.is_zero(&a) && f.is_exact(&a) {
                    let ai = f.inv(&a).unwrap();
                    assert!(f.is_one(&f.mul(&a, &ai)), "{s}: {}", f.fmt_elem(&a));
                }
            }
        }
    }
}
