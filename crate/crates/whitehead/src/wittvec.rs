//! Witt vectors of length at most 3, logarithmic-differential classes
//! `w ⊗ b₁ ⊗ … ⊗ b_q`, and the maps of the characteristic-2 lift: `π²₁`,
//! Kato's `φ`, `i*` and the algebra lift `[a,b) ↦ (4a+1,b)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebras::{self, AlgElem, Algebra, Presentation};
use crate::error::{invalid, unsupported, Error, Result};
use crate::fields::{Elem, FieldTower, Laurent, PAdic};
use crate::ktheory::{KClass, ZeroDecision};

pub const MAX_LENGTH: usize = 3;

// ---- universal polynomials ---------------------------------------------------

/// Sparse polynomial over ℤ in the variables `X₀…X_{l-1}, Y₀…Y_{l-1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct MPoly(BTreeMap<Vec<u32>, BigInt>);

const NVARS: usize = 2 * MAX_LENGTH;

impl MPoly {
    fn var(i: usize) -> MPoly {
        let mut e = vec![0; NVARS];
        e[i] = 1;
        MPoly(BTreeMap::from([(e, BigInt::one())]))
    }

    fn constant(c: BigInt) -> MPoly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(vec![0; NVARS], c);
        }
        MPoly(m)
    }

    fn add(&self, o: &MPoly) -> MPoly {
        let mut m = self.0.clone();
        for (e, c) in &o.0 {
            let v = m.entry(e.clone()).or_insert_with(BigInt::zero);
            *v += c;
            if v.is_zero() {
                m.remove(e);
            }
        }
        MPoly(m)
    }

    fn scale(&self, k: &BigInt) -> MPoly {
        if k.is_zero() {
            return MPoly::default();
        }
        MPoly(self.0.iter().map(|(e, c)| (e.clone(), c * k)).collect())
    }

    fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.scale(&BigInt::from(-1)))
    }

    fn mul(&self, o: &MPoly) -> MPoly {
        let mut m: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *m.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        m.retain(|_, c| !c.is_zero());
        MPoly(m)
    }

    fn pow(&self, k: u64) -> MPoly {
        let mut acc = MPoly::constant(BigInt::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    fn div_exact(&self, k: &BigInt) -> MPoly {
        MPoly(
            self.0
                .iter()
                .map(|(e, c)| {
                    let (q, r) = c.div_rem(k);
                    assert!(r.is_zero(), "ghost recursion must divide exactly");
                    (e.clone(), q)
                })
                .collect(),
        )
    }
}

/// Addition, multiplication and negation polynomials for one prime.
struct Universal {
    add: Vec<MPoly>,
    mul: Vec<MPoly>,
    neg: Vec<MPoly>,
}

fn ghost(p: u64, n: usize, comps: &[MPoly]) -> MPoly {
    let mut acc = MPoly::default();
    for (i, c) in comps.iter().enumerate().take(n + 1) {
        let pi = BigInt::from(p).pow(i as u32);
        acc = acc.add(&c.pow(p.pow((n - i) as u32)).scale(&pi));
    }
    acc
}

/// Solve `ghost_n(S) = target_n` for `S₀, S₁, …`.
fn solve_ghost(p: u64, targets: &[MPoly]) -> Vec<MPoly> {
    let mut s: Vec<MPoly> = Vec::new();
    for (n, t) in targets.iter().enumerate() {
        let mut rest = t.clone();
        for (i, si) in s.iter().enumerate() {
            let pi = BigInt::from(p).pow(i as u32);
            rest = rest.sub(&si.pow(p.pow((n - i) as u32)).scale(&pi));
        }
        s.push(rest.div_exact(&BigInt::from(p).pow(n as u32)));
    }
    s
}

fn build_universal(p: u64) -> Universal {
    let xs: Vec<MPoly> = (0..MAX_LENGTH).map(MPoly::var).collect();
    let ys: Vec<MPoly> = (0..MAX_LENGTH).map(|i| MPoly::var(MAX_LENGTH + i)).collect();
    let gx: Vec<MPoly> = (0..MAX_LENGTH).map(|n| ghost(p, n, &xs)).collect();
    let gy: Vec<MPoly> = (0..MAX_LENGTH).map(|n| ghost(p, n, &ys)).collect();
    let add_t: Vec<MPoly> = gx.iter().zip(&gy).map(|(a, b)| a.add(b)).collect();
    let mul_t: Vec<MPoly> = gx.iter().zip(&gy).map(|(a, b)| a.mul(b)).collect();
    let neg_t: Vec<MPoly> = gx.iter().map(|a| a.scale(&BigInt::from(-1))).collect();
    Universal {
        add: solve_ghost(p, &add_t),
        mul: solve_ghost(p, &mul_t),
        neg: solve_ghost(p, &neg_t),
    }
}

fn universal(p: u64) -> Arc<Universal> {
    static TABLE: OnceLock<Mutex<HashMap<u64, Arc<Universal>>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = table.lock().expect("universal table lock");
    guard.entry(p).or_insert_with(|| Arc::new(build_universal(p))).clone()
}

// ---- Witt vectors ---------------------------------------------------------------

/// Witt vector `(a₀,…,a_{l-1})` over a characteristic-`p` tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    pub comps: Vec<Elem>,
}

impl WittVector {
    pub fn new(comps: Vec<Elem>) -> Self {
        WittVector { comps }
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }
}

/// Arithmetic in `W_l(k)` for a characteristic-`p` tower `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittRing {
    pub field: FieldTower,
    pub p: u64,
    pub l: usize,
}

impl WittRing {
    pub fn new(field: &FieldTower, l: usize) -> Result<WittRing> {
        let p = field.characteristic();
        if p == 0 {
            return invalid("Witt vectors need a field of positive characteristic");
        }
        if l == 0 || l > MAX_LENGTH {
            return unsupported(format!("Witt vectors of length {l}; lengths 1..={MAX_LENGTH} are supported"));
        }
        Ok(WittRing { field: field.clone(), p, l })
    }

    pub fn zero(&self) -> WittVector {
        WittVector::new(vec![self.field.zero(); self.l])
    }

    pub fn one(&self) -> WittVector {
        let mut v = self.zero();
        v.comps[0] = self.field.one();
        v
    }

    /// Teichmüller representative `[a] = (a, 0, …)`.
    pub fn teichmuller(&self, a: &Elem) -> WittVector {
        let mut v = self.zero();
        v.comps[0] = a.clone();
        v
    }

    pub fn from_ints(&self, cs: &[i64]) -> Result<WittVector> {
        if cs.len() != self.l {
            return invalid(format!("expected {} components, got {}", self.l, cs.len()));
        }
        Ok(WittVector::new(cs.iter().map(|&c| self.field.int(c)).collect()))
    }

    fn check(&self, v: &WittVector) -> Result<()> {
        if v.len() != self.l {
            return invalid(format!("Witt vector of length {} in W_{}", v.len(), self.l));
        }
        Ok(())
    }

    fn eval(&self, polys: &[MPoly], x: &WittVector, y: &WittVector) -> WittVector {
        let f = &self.field;
        let vals: Vec<&Elem> = (0..MAX_LENGTH)
            .map(|i| x.comps.get(i).unwrap_or(&x.comps[0]))
            .chain((0..MAX_LENGTH).map(|i| y.comps.get(i).unwrap_or(&y.comps[0])))
            .collect();
        let p = BigInt::from(self.p);
        let comps = polys
            .iter()
            .take(self.l)
            .map(|poly| {
                let mut acc = f.zero();
                for (e, c) in &poly.0 {
                    let c = c.mod_floor(&p);
                    if c.is_zero() {
                        continue;
                    }
                    let mut term = f.int(c.to_i64().unwrap());
                    for (i, &k) in e.iter().enumerate() {
                        if k > 0 {
                            term = f.mul(&term, &f.pow(vals[i], k as i64).unwrap());
                        }
                    }
                    acc = f.add(&acc, &term);
                }
                acc
            })
            .collect();
        WittVector::new(comps)
    }

    pub fn add(&self, x: &WittVector, y: &WittVector) -> Result<WittVector> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.eval(&universal(self.p).add, x, y))
    }

    pub fn mul(&self, x: &WittVector, y: &WittVector) -> Result<WittVector> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.eval(&universal(self.p).mul, x, y))
    }

    pub fn neg(&self, x: &WittVector) -> Result<WittVector> {
        self.check(x)?;
        Ok(self.eval(&universal(self.p).neg, x, x))
    }

    pub fn sub(&self, x: &WittVector, y: &WittVector) -> Result<WittVector> {
        self.add(x, &self.neg(y)?)
    }

    pub fn scale_int(&self, x: &WittVector, k: i64) -> Result<WittVector> {
        let base = if k < 0 { self.neg(x)? } else { x.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = self.zero();
        let mut pw = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &pw)?;
            }
            pw = self.add(&pw, &pw)?;
            k >>= 1;
        }
        Ok(acc)
    }

    pub fn eq(&self, x: &WittVector, y: &WittVector) -> bool {
        x.len() == y.len() && x.comps.iter().zip(&y.comps).all(|(a, b)| self.field.eq(a, b))
    }

    pub fn is_zero(&self, x: &WittVector) -> bool {
        x.comps.iter().all(|a| self.field.is_zero(a))
    }

    /// `w^{(p)} = (a₀^p, …)`.
    pub fn frobenius(&self, x: &WittVector) -> Result<WittVector> {
        self.check(x)?;
        let f = &self.field;
        Ok(WittVector::new(
            x.comps.iter().map(|a| f.pow(a, self.p as i64).unwrap()).collect(),
        ))
    }

    /// `℘(v) = v^{(p)} − v`.
    pub fn wp(&self, x: &WittVector) -> Result<WittVector> {
        self.sub(&self.frobenius(x)?, x)
    }

    /// Truncation `W_l → W_{l-1}`.
    pub fn truncate(&self, x: &WittVector) -> Result<(WittRing, WittVector)> {
        self.check(x)?;
        if self.l < 2 {
            return invalid("cannot truncate a Witt vector of length 1");
        }
        let r = WittRing { field: self.field.clone(), p: self.p, l: self.l - 1 };
        Ok((r, WittVector::new(x.comps[..self.l - 1].to_vec())))
    }

    /// Solve `v^{(p)} − v = w` componentwise by search over a finite field.
    pub fn solve_wp(&self, w: &WittVector) -> Result<Option<WittVector>> {
        self.check(w)?;
        let FieldTower::Finite(ff) = self.field.core() else {
            return unsupported(format!("Artin-Schreier-Witt equations over {}", self.field));
        };
        let q = ff.order();
        if q > 1 << 16 {
            return unsupported("Artin-Schreier-Witt search beyond 2^16 elements");
        }
        let mut v = self.zero();
        for n in 0..self.l {
            let mut found = false;
            for c in 0..q {
                v.comps[n] = Elem::F(c);
                let lhs = self.wp(&v)?;
                if (0..=n).all(|i| self.field.eq(&lhs.comps[i], &w.comps[i])) {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(None);
            }
        }
        Ok(Some(v))
    }

    /// Order of `w` in `W_l(k)/℘W_l(k)` over a finite field.
    pub fn class_order(&self, w: &WittVector) -> Result<u64> {
        let mut acc = w.clone();
        for k in 1..=self.p.pow(self.l as u32) {
            if self.solve_wp(&acc)?.is_some() {
                return Ok(k);
            }
            acc = self.add(&acc, w)?;
        }
        Err(Error::Invalid("class order exceeds p^l".into()))
    }

    pub fn fmt(&self, x: &WittVector) -> String {
        let parts: Vec<String> = x.comps.iter().map(|a| self.field.fmt_elem(a)).collect();
        format!("({})", parts.join(", "))
    }
}

/// `π²₁: W₂ → W₁`, `(a₀, a₁) ↦ (a₀)`.
pub fn pi_projection(r: &WittRing, w: &WittVector) -> Result<WittVector> {
    if r.l != 2 || r.p != 2 {
        return invalid("pi projection is defined on W_2 over characteristic 2");
    }
    Ok(r.truncate(w)?.1)
}

// ---- logarithmic differentials ------------------------------------------------------

/// Formal sum of generators `w ⊗ b₁ ⊗ … ⊗ b_q` in `H^{q+1}_{p^l}(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogDiffClass {
    pub ring: WittRing,
    pub q: usize,
    pub terms: Vec<(WittVector, Vec<Elem>)>,
}

impl LogDiffClass {
    pub fn generator(ring: &WittRing, w: WittVector, slots: Vec<Elem>) -> Result<LogDiffClass> {
        ring.check(&w)?;
        if slots.iter().any(|b| ring.field.is_zero(b)) {
            return invalid("zero slot in a logarithmic differential");
        }
        let c = LogDiffClass { ring: ring.clone(), q: slots.len(), terms: vec![(w, slots)] };
        c.normalize()
    }

    pub fn zero(ring: &WittRing, q: usize) -> LogDiffClass {
        LogDiffClass { ring: ring.clone(), q, terms: vec![] }
    }

    pub fn is_trivially_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &LogDiffClass) -> Result<LogDiffClass> {
        if self.ring != o.ring || self.q != o.q {
            return invalid("logarithmic differentials in different groups");
        }
        let mut r = self.clone();
        r.terms.extend(o.terms.iter().cloned());
        r.normalize()
    }

    pub fn scale_int(&self, k: i64) -> Result<LogDiffClass> {
        let mut r = self.clone();
        for t in r.terms.iter_mut() {
            t.0 = self.ring.scale_int(&t.0, k)?;
        }
        r.normalize()
    }

    /// Apply the relator families: repeated slots, `(0,…,a,…,0) ⊗ a ⊗ …`,
    /// `(w^{(p)} − w) ⊗ …` (recognised over finite fields), slot `1`; then collect.
    pub fn normalize(&self) -> Result<LogDiffClass> {
        let r = &self.ring;
        let f = &r.field;
        let mut out: Vec<(WittVector, Vec<Elem>)> = Vec::new();
        'term: for (w, slots) in &self.terms {
            if r.is_zero(w) {
                continue;
            }
            for (i, b) in slots.iter().enumerate() {
                if f.is_one(b) || slots[i + 1..].iter().any(|c| f.eq(b, c)) {
                    continue 'term;
                }
            }
            let nonzero: Vec<usize> = (0..w.len()).filter(|&i| !f.is_zero(&w.comps[i])).collect();
            if nonzero.len() == 1 && slots.iter().any(|b| f.eq(b, &w.comps[nonzero[0]])) {
                continue;
            }
            match out.iter_mut().find(|(_, s)| s.len() == slots.len() && s.iter().zip(slots).all(|(a, b)| f.eq(a, b))) {
                Some(e) => e.0 = r.add(&e.0, w)?,
                None => out.push((w.clone(), slots.clone())),
            }
        }
        let mut kept = Vec::new();
        for (w, s) in out {
            if r.is_zero(&w) {
                continue;
            }
            if let Ok(Some(_)) = r.solve_wp(&w) {
                continue;
            }
            kept.push((w, s));
        }
        Ok(LogDiffClass { ring: r.clone(), q: self.q, terms: kept })
    }

    /// The map `r` induced by `π²₁` on generators.
    pub fn reduce_r(&self) -> Result<LogDiffClass> {
        let (r2, _) = self.ring.truncate(&self.ring.zero())?;
        let terms = self
            .terms
            .iter()
            .map(|(w, s)| Ok((self.ring.truncate(w)?.1, s.clone())))
            .collect::<Result<Vec<_>>>()?;
        LogDiffClass { ring: r2, q: self.q, terms }.normalize()
    }

    /// Certified zero test: finite fields only.
    pub fn decide_zero(&self) -> Result<ZeroDecision> {
        if self.is_trivially_zero() {
            return Ok(ZeroDecision::Zero);
        }
        if !matches!(self.ring.field.core(), FieldTower::Finite(_)) {
            return Ok(ZeroDecision::Undecided(format!(
                "no decision procedure for H^{}_{}^{} over {}",
                self.q + 1,
                self.ring.p,
                self.ring.l,
                self.ring.field
            )));
        }
        if self.q >= 1 {
            return Ok(ZeroDecision::Zero);
        }
        let total = self.terms.iter().try_fold(self.ring.zero(), |acc, (w, _)| self.ring.add(&acc, w))?;
        Ok(match self.ring.solve_wp(&total)? {
            Some(_) => ZeroDecision::Zero,
            None => ZeroDecision::NonZero,
        })
    }

    pub fn fmt(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let f = &self.ring.field;
        self.terms
            .iter()
            .map(|(w, s)| {
                let mut parts = vec![self.ring.fmt(w)];
                parts.extend(s.iter().map(|b| f.fmt_elem(b)));
                parts.join(" (x) ")
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

// ---- lift datum --------------------------------------------------------------------

/// Residue tower of characteristic `p` together with a characteristic-0 tower
/// whose integral elements reduce onto it, and declared lifts.
#[derive(Clone, Debug)]
pub struct LiftDatum {
    pub residue: FieldTower,
    pub lift: FieldTower,
    lifts: Vec<(Elem, Elem)>,
}

impl LiftDatum {
    pub fn new(residue: &FieldTower, lift: &FieldTower) -> Result<LiftDatum> {
        let p = residue.characteristic();
        if p == 0 || lift.characteristic() != 0 {
            return invalid("a lift datum pairs a characteristic-p residue tower with a characteristic-0 tower");
        }
        if let Some((q, _)) = lift.padic_ground() {
            if q != p {
                return invalid(format!("residue characteristic {p} differs from Q_{q}"));
            }
        }
        if !matches!(residue.ground(), FieldTower::Finite(ff) if ff.degree() == 1) {
            return unsupported("lift data over non-prime residue fields");
        }
        if residue.laurent_vars() != lift.laurent_vars() {
            return invalid("residue and lift towers have different Laurent variables");
        }
        Ok(LiftDatum { residue: residue.clone(), lift: lift.clone(), lifts: vec![] })
    }

    /// Reduction of an integral element of the lift tower.
    pub fn reduce(&self, x: &Elem) -> Result<Elem> {
        reduce_in(&self.lift, &self.residue, x)
    }

    /// Record `lift` as the chosen lift of its reduction.
    pub fn declare(&mut self, lift: &Elem) -> Result<Elem> {
        let r = self.reduce(lift)?;
        if let Some(e) = self.lifts.iter_mut().find(|(a, _)| self.residue.eq(a, &r)) {
            e.1 = lift.clone();
        } else {
            self.lifts.push((r.clone(), lift.clone()));
        }
        Ok(r)
    }

    pub fn lift_of(&self, x: &Elem) -> Result<Elem> {
        if let Some((_, l)) = self.lifts.iter().find(|(a, _)| self.residue.eq(a, x)) {
            return Ok(l.clone());
        }
        canonical_lift(&self.residue, &self.lift, x)
    }
}

fn reduce_in(lift: &FieldTower, res: &FieldTower, x: &Elem) -> Result<Elem> {
    let p = res.characteristic();
    match (lift.core(), x) {
        (FieldTower::Laurent { base, .. }, Elem::L(l)) => {
            let FieldTower::Laurent { base: rb, .. } = res.core() else {
                return invalid("tower shapes differ");
            };
            if l.prec.is_some_and(|n| n <= 0) {
                return Err(Error::Precision("lift known only modulo a non-positive power".into()));
            }
            let mut acc = res.zero();
            for (k, c) in &l.terms {
                let rc = reduce_in(base, rb, c)?;
                acc = res.add(&acc, &res.monomial(rc, *k)?);
            }
            if let Some(n) = l.prec {
                if let Elem::L(mut r) = acc {
                    r.prec = Some(n);
                    return Ok(Elem::L(r));
                }
            }
            Ok(acc)
        }
        (FieldTower::Rationals, Elem::Q(r)) => {
            if r.is_zero() {
                return Ok(res.zero());
            }
            if crate::arith::rat_val(r, p) < 0 {
                return invalid("element is not integral at p");
            }
            if crate::arith::rat_val(r, p) > 0 {
                return Ok(res.zero());
            }
            Ok(res.int(crate::arith::rat_residue(r, p) as i64))
        }
        (FieldTower::PAdic { .. }, Elem::P(px)) => {
            if matches!(px, PAdic::Zero { .. }) {
                return Ok(res.zero());
            }
            let v = lift.padic_valuation(x)?;
            if v < 0 {
                return invalid("element is not integral at p");
            }
            if v > 0 {
                return Ok(res.zero());
            }
            Ok(res.int(lift.padic_unit_mod(x, 1)?.to_i64().unwrap()))
        }
        _ => invalid("element does not belong to the lift tower"),
    }
}

/// Lift with coefficients in `[0, p)` term by term.
fn canonical_lift(res: &FieldTower, lift: &FieldTower, x: &Elem) -> Result<Elem> {
    match (res.core(), x) {
        (FieldTower::Laurent { base: rb, .. }, Elem::L(l)) => {
            let FieldTower::Laurent { base: lb, .. } = lift.core() else {
                return invalid("tower shapes differ");
            };
            let mut acc = lift.zero();
            for (k, c) in &l.terms {
                let lc = canonical_lift(rb, lb, c)?;
                acc = lift.add(&acc, &lift.monomial(lc, *k)?);
            }
            if let (Some(n), Elem::L(r)) = (l.prec, &acc) {
                return Ok(Elem::L(Laurent { terms: r.terms.clone(), prec: Some(n) }));
            }
            Ok(acc)
        }
        (FieldTower::Laurent { base: rb, .. }, other) => {
            let FieldTower::Laurent { base: lb, .. } = lift.core() else {
                return invalid("tower shapes differ");
            };
            Ok(lift.embed(canonical_lift(rb, lb, other)?))
        }
        (FieldTower::Finite(_), Elem::F(c)) => Ok(lift.int(*c as i64)),
        _ => invalid("unsupported residue element"),
    }
}

// ---- Kato's map, i*, algebra lift ---------------------------------------------------

/// `{1 + 4b, a₁, …, a_r}` modulo 2 over the characteristic-0 tower.
pub fn kato_phi(f: &FieldTower, b: &Elem, slots: &[Elem]) -> Result<KClass> {
    if f.characteristic() != 0 {
        return invalid("Kato's map lands in a characteristic-0 tower");
    }
    let one_4b = f.add(&f.one(), &f.scale_int(b, 4));
    if f.is_zero(&one_4b) {
        return invalid("1 + 4b vanishes");
    }
    let mut s = vec![one_4b];
    s.extend(slots.iter().cloned());
    KClass::symbol(f, s, 2)
}

/// Character datum `i(w)`: a solution of `v^{(p)} − v = w` over a finite extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub w: WittVector,
    pub residue: FieldTower,
    pub solution: WittVector,
    pub extension: FieldTower,
    pub order: u64,
}

/// Symbol-backed image `Σ i(w) ∪ h^q({b̃₁,…,b̃_q})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IStarImage {
    pub modulus: u64,
    pub terms: Vec<(Character, KClass)>,
}

fn embed_prime(ext: &FieldTower, x: &Elem) -> Result<Elem> {
    match x {
        Elem::F(c) => Ok(ext.int(*c as i64)),
        _ => unsupported("character data only for finite residue fields"),
    }
}

/// Solve `v^{(p)} − v = w` over `F_{p^d}` for the smallest `d ≤ 4` that works.
pub fn character(r: &WittRing, w: &WittVector) -> Result<Character> {
    let FieldTower::Finite(ff) = r.field.core() else {
        return unsupported(format!("Artin-Schreier-Witt characters over {}", r.field));
    };
    let order = r.class_order(w)?;
    let p = ff.p();
    let degrees: Vec<u32> = if ff.degree() == 1 { (1..=4).collect() } else { vec![1] };
    for d in degrees {
        let q = p.pow(d * ff.degree());
        if q > 1 << 16 {
            break;
        }
        let ext = if d == 1 { r.field.clone() } else { FieldTower::finite(q)? };
        if let Some(v) = solve_in(&ext, w)? {
            return Ok(Character { w: w.clone(), residue: r.field.clone(), solution: v, extension: ext, order });
        }
    }
    Err(Error::Unsupported("no Artin-Schreier-Witt solution within the supported extension degree".into()))
}

/// Solve `v^{(p)} − v = w` in `W_l(ext)` for `w` with prime-field components.
fn solve_in(ext: &FieldTower, w: &WittVector) -> Result<Option<WittVector>> {
    let er = WittRing::new(ext, w.len())?;
    let ew = WittVector::new(w.comps.iter().map(|c| embed_prime(ext, c)).collect::<Result<_>>()?);
    er.solve_wp(&ew)
}

/// Two characters agree when their solutions, taken in a common extension,
/// differ by a Frobenius-fixed vector.
pub fn same_character(a: &Character, b: &Character) -> Result<bool> {
    if a.w.len() != b.w.len() || a.residue != b.residue {
        return Ok(false);
    }
    let (big, sa, sb) = if a.extension == b.extension {
        (&a.extension, a.solution.clone(), b.solution.clone())
    } else {
        let (big, small, keep) = match (a.extension.core(), b.extension.core()) {
            (FieldTower::Finite(x), FieldTower::Finite(y)) if x.degree() >= y.degree() => (&a.extension, b, a),
            _ => (&b.extension, a, b),
        };
        let Some(v) = solve_in(big, &small.w)? else {
            return Ok(false);
        };
        if std::ptr::eq(keep, a) {
            (big, keep.solution.clone(), v)
        } else {
            (big, v, keep.solution.clone())
        }
    };
    let r = WittRing::new(big, a.w.len())?;
    let d = r.sub(&sa, &sb)?;
    Ok(r.eq(&r.frobenius(&d)?, &d))
}

/// Reduction of a character to `W_{l-1}` (truncate `w` and the solution).
pub fn reduce_character(c: &Character) -> Result<Character> {
    let (er, v) = WittRing::new(&c.extension, c.w.len())?.truncate(&c.solution)?;
    let (wr, w) = WittRing::new(&c.residue, c.w.len())?.truncate(&c.w)?;
    let ew = WittVector::new(w.comps.iter().map(|x| embed_prime(&c.extension, x)).collect::<Result<_>>()?);
    if !er.eq(&er.wp(&v)?, &ew) {
        return Err(Error::Invalid("truncated solution does not solve the truncated equation".into()));
    }
    let order = wr.class_order(&w)?;
    Ok(Character { w, residue: c.residue.clone(), solution: v, extension: c.extension.clone(), order })
}

/// A constant of a Laurent tower viewed in the ground field.
fn to_ground(f: &FieldTower, x: &Elem) -> Option<Elem> {
    match (f.core(), x) {
        (FieldTower::Laurent { base, .. }, Elem::L(l)) => match l.terms.as_slice() {
            [] => Some(base.zero()).and_then(|z| to_ground(base, &z)),
            [(0, c)] => to_ground(base, c),
            _ => None,
        },
        (FieldTower::Laurent { .. }, _) => None,
        _ => Some(x.clone()),
    }
}

/// `i*`: `w ⊗ b̄₁ ⊗ … ⊗ b̄_q ↦ i(w) ∪ h^q({b₁,…,b_q})` using the declared lifts.
pub fn i_star(c: &LogDiffClass, datum: &LiftDatum) -> Result<IStarImage> {
    if c.ring.field != datum.residue {
        return invalid("class and lift datum have different residue towers");
    }
    let m = c.ring.p.pow(c.ring.l as u32);
    let residue_ground = datum.residue.ground().clone();
    let gr = WittRing::new(&residue_ground, c.ring.l)?;
    let mut terms = Vec::new();
    for (w, slots) in &c.terms {
        let comps = w
            .comps
            .iter()
            .map(|x| to_ground(&datum.residue, x))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Unsupported("i* needs Witt components in the finite residue field".into()))?;
        let ch = character(&gr, &WittVector::new(comps))?;
        if ch.order == 1 {
            continue;
        }
        let lifted = slots.iter().map(|b| datum.lift_of(b)).collect::<Result<Vec<_>>>()?;
        let k = KClass::symbol(&datum.lift, lifted, m)?;
        terms.push((ch, k));
    }
    Ok(IStarImage { modulus: m, terms })
}

/// `r_B`: reduce characters and symbols from `ℤ/p^l` to `ℤ/p^{l-1}`.
pub fn reduce_image(img: &IStarImage, p: u64) -> Result<IStarImage> {
    let m = img.modulus / p;
    let mut terms = Vec::new();
    for (ch, k) in &img.terms {
        let rc = reduce_character(ch)?;
        if rc.order > 1 {
            terms.push((rc, k.reduce_modulus(m)?));
        }
    }
    Ok(IStarImage { modulus: m, terms })
}

/// Term-by-term comparison of two `i*` images.
pub fn same_image(a: &IStarImage, b: &IStarImage) -> Result<bool> {
    if a.modulus != b.modulus || a.terms.len() != b.terms.len() {
        return Ok(false);
    }
    for ((c1, k1), (c2, k2)) in a.terms.iter().zip(&b.terms) {
        if !same_character(c1, c2)? || k1 != k2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `[a,b)⊗[c,d)` lifted to `(4ã+1, b̃) ⊗ (4c̃+1, d̃)`, with the generator map
/// `u ↦ (i−1)/2`, `v ↦ j` on each factor.
#[derive(Clone, Debug)]
pub struct LiftedAlgebra {
    pub algebra: Algebra,
    /// Lifted p-algebra relations `u² + u = ã`, `v² = b̃`, `uv = −v(u+1)` per factor.
    pub lifted_factors: Vec<Algebra>,
    pub entries: Vec<(Elem, Elem)>,
    pub generator_map: Vec<(String, String)>,
    pub relations_verified: bool,
}

/// Quaternion-type algebra on `{1, u, v, uv}` with `u² = a − u`, `v² = b`, `vu = −uv − v`.
pub fn lifted_p_algebra(f: &FieldTower, a: &Elem, b: &Elem) -> Result<Algebra> {
    if f.characteristic() == 2 {
        return invalid("lifted p-algebras live in characteristic 0");
    }
    let one = f.one();
    let m1 = f.neg(&one);
    let na = f.neg(a);
    let nb = f.neg(b);
    let e = |i: usize, c: &Elem| (i, c.clone());
    let table = vec![
        vec![vec![e(0, &one)], vec![e(1, &one)], vec![e(2, &one)], vec![e(3, &one)]],
        vec![
            vec![e(1, &one)],
            vec![e(0, a), e(1, &m1)],
            vec![e(3, &one)],
            vec![e(2, a), e(3, &m1)],
        ],
        vec![
            vec![e(2, &one)],
            vec![e(3, &m1), e(2, &m1)],
            vec![e(0, b)],
            vec![e(0, &nb), e(1, &nb)],
        ],
        vec![
            vec![e(3, &one)],
            vec![e(2, &na)],
            vec![e(1, b)],
            vec![e(0, &f.mul(&na, b))],
        ],
    ];
    let table = table
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|entry| entry.into_iter().filter(|(_, c)| !f.is_zero(c)).collect())
                .collect()
        })
        .collect();
    algebras::from_parts(
        f,
        vec!["u".into(), "v".into()],
        vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]],
        table,
    )
}

/// Check `i = 2u+1`, `j = v`: `i² = 4a+1`, `j² = b`, `ij = −ji`, and that
/// `x ↦ i`, `y ↦ j` is an isomorphism from the symbol algebra `(4a+1, b)`.
pub fn verify_lift(lifted: &Algebra, sym: &Algebra, a: &Elem, b: &Elem) -> Result<bool> {
    let f = lifted.base();
    let u = lifted.basis(1);
    let v = lifted.basis(2);
    let two = f.int(2);
    let i = lifted.add(&lifted.scale(&two, &u), &lifted.one());
    let j = v;
    let four_a1 = f.add(&f.scale_int(a, 4), &f.one());
    let ok_rel = lifted.eq(&lifted.mul(&i, &i), &lifted.scalar(&four_a1))
        && lifted.eq(&lifted.mul(&j, &j), &lifted.scalar(b))
        && lifted.eq(&lifted.mul(&i, &j), &lifted.neg(&lifted.mul(&j, &i)));
    let images: Vec<AlgElem> = vec![lifted.one(), j.clone(), i.clone(), lifted.mul(&i, &j)];
    let mut ok_hom = true;
    for s in 0..4 {
        for t in 0..4 {
            let prod = sym.mul(&sym.basis(s), &sym.basis(t));
            let mapped = prod
                .iter()
                .enumerate()
                .fold(lifted.zero(), |acc, (k, c)| lifted.add(&acc, &lifted.scale(c, &images[k])));
            ok_hom &= lifted.eq(&mapped, &lifted.mul(&images[s], &images[t]));
        }
    }
    let m: crate::linalg::Matrix = (0..4).map(|r| (0..4).map(|c| images[c][r].clone()).collect()).collect();
    let bij = crate::linalg::rank(f, &m)? == 4;
    Ok(ok_rel && ok_hom && bij)
}

/// Lift `[a,b) ⊗ [c,d)` over characteristic 2 through the datum. `lifts` gives
/// `ã, b̃, c̃, d̃` explicitly; otherwise the datum's lifts are used.
pub fn lift_algebra(alg: &Algebra, datum: &LiftDatum, lifts: Option<&[Elem; 4]>) -> Result<LiftedAlgebra> {
    let Presentation::Tensor(l, r) = alg.tag() else {
        return invalid("expected [a,b) (*) [c,d)");
    };
    let mut residues = Vec::new();
    for fac in [l, r] {
        match fac.tag() {
            Presentation::PAlgebra { a, b, p: 2 } | Presentation::CyclicArtinSchreier { a, b, p: 2 } => {
                residues.push(a.clone());
                residues.push(b.clone());
            }
            _ => return invalid("lift needs characteristic-2 p-algebra factors"),
        }
    }
    let lifted: Vec<Elem> = match lifts {
        Some(ls) => {
            for (x, r) in ls.iter().zip(&residues) {
                if !datum.residue.eq(&datum.reduce(x)?, r) {
                    return invalid(format!(
                        "{} does not reduce to {}",
                        datum.lift.fmt_elem(x),
                        datum.residue.fmt_elem(r)
                    ));
                }
            }
            ls.to_vec()
        }
        None => residues.iter().map(|r| datum.lift_of(r)).collect::<Result<_>>()?,
    };
    if datum.lift.is_zero(&lifted[1]) || datum.lift.is_zero(&lifted[3]) {
        return invalid("lifts of b and d must be nonzero");
    }
    let entries = vec![(lifted[0].clone(), lifted[1].clone()), (lifted[2].clone(), lifted[3].clone())];
    let f = &datum.lift;
    let mut syms = Vec::new();
    let mut lifted_factors = Vec::new();
    let mut verified = true;
    for (a, b) in &entries {
        let four_a1 = f.add(&f.scale_int(a, 4), &f.one());
        let s = algebras::symbol(f, &four_a1, b, 2, Some(f.int(-1)))?;
        let lf = lifted_p_algebra(f, a, b)?;
        verified &= verify_lift(&lf, &s, a, b)?;
        syms.push(s);
        lifted_factors.push(lf);
    }
    let algebra = algebras::tensor(&syms[0], &syms[1])?;
    Ok(LiftedAlgebra {
        algebra,
        lifted_factors,
        entries,
        generator_map: vec![
            ("u".into(), "(x - 1)/2".into()),
            ("v".into(), "y".into()),
            ("u'".into(), "(z - 1)/2".into()),
            ("v'".into(), "w".into()),
        ],
        relations_verified: verified,
    })
}
