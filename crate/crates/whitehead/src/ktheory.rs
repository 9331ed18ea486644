//! Milnor K-symbols modulo `m`, tame residues, the tame Hilbert pairing on ℚ_p,
//! residue coordinates of cohomology classes over Laurent towers, and the
//! relative groups `H⁴_{N,A⊗r}` of biquaternion-type symbol algebras.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::{self, gcd_u64};
use crate::error::{invalid, unsupported, Error, Result};
use crate::fields::{Elem, FieldTower};
use crate::forms;

pub const RESIDUE_CONVENTION: &str =
    "second projection: d{t,u2,...,ur} = {u2,...,ur}, sp{u1,...,ur} = {u1,...,ur} for the uniformizer t";

/// Outcome of a certified zero test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroDecision {
    Zero,
    NonZero,
    Undecided(String),
}

/// Formal sum of pure symbols `Σ cᵢ {x₁,…,x_r}` in `K^M_r / m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KClass {
    base: FieldTower,
    modulus: u64,
    degree: usize,
    terms: Vec<(u64, Vec<Elem>)>,
}

impl KClass {
    pub fn zero(base: &FieldTower, degree: usize, modulus: u64) -> Self {
        KClass { base: base.clone(), modulus, degree, terms: vec![] }
    }

    /// Degree-0 class `c mod m`.
    pub fn integer(base: &FieldTower, c: i64, modulus: u64) -> Self {
        let k = KClass { base: base.clone(), modulus, degree: 0, terms: vec![(1, vec![])] };
        k.scale(c)
    }

    /// Pure symbol `{x₁,…,x_r}` modulo `m`, normalised.
    pub fn symbol(base: &FieldTower, slots: Vec<Elem>, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return invalid("modulus must be positive");
        }
        if slots.iter().any(|x| base.is_zero(x)) {
            return invalid("zero slot in a Milnor symbol");
        }
        let k = KClass {
            base: base.clone(),
            modulus,
            degree: slots.len(),
            terms: vec![(1 % modulus, slots)],
        };
        Ok(k.normalize())
    }

    pub fn base(&self) -> &FieldTower {
        &self.base
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(u64, Vec<Elem>)] {
        &self.terms
    }

    /// True when the normaliser reduced the class to the empty sum.
    pub fn is_trivially_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, o: &KClass) -> Result<()> {
        if self.base != o.base || self.modulus != o.modulus || self.degree != o.degree {
            return invalid("K-classes live in different groups");
        }
        Ok(())
    }

    pub fn add(&self, o: &KClass) -> Result<KClass> {
        self.check(o)?;
        let mut r = self.clone();
        r.terms.extend(o.terms.iter().cloned());
        Ok(r.normalize())
    }

    pub fn scale(&self, k: i64) -> KClass {
        let m = self.modulus as i64;
        let c = k.rem_euclid(m) as u64;
        let mut r = self.clone();
        for t in r.terms.iter_mut() {
            t.0 = ((t.0 as u128 * c as u128) % self.modulus as u128) as u64;
        }
        r.normalize()
    }

    pub fn neg(&self) -> KClass {
        self.scale(-1)
    }

    /// Product `{x…} · {y…}` (concatenation of slots).
    pub fn cup(&self, o: &KClass) -> Result<KClass> {
        if self.base != o.base || self.modulus != o.modulus {
            return invalid("K-classes over different towers or moduli");
        }
        let mut terms = Vec::new();
        for (c, xs) in &self.terms {
            for (d, ys) in &o.terms {
                let mut s = xs.clone();
                s.extend(ys.iter().cloned());
                terms.push(((*c as u128 * *d as u128 % self.modulus as u128) as u64, s));
            }
        }
        Ok(KClass {
            base: self.base.clone(),
            modulus: self.modulus,
            degree: self.degree + o.degree,
            terms,
        }
        .normalize())
    }

    /// Reduce the class to `K^M_r / m'` for `m' | m`.
    pub fn reduce_modulus(&self, m: u64) -> Result<KClass> {
        if m == 0 || self.modulus % m != 0 {
            return invalid(format!("{m} does not divide {}", self.modulus));
        }
        let mut r = self.clone();
        r.modulus = m;
        for t in r.terms.iter_mut() {
            t.0 %= m;
        }
        Ok(r.normalize())
    }

    /// Apply the listed relators: slot 1, Steinberg pairs, `{x,-x}`, `m`-th power
    /// slots, repeated slots `{x,x} = {x,-1}`; then collect equal symbols.
    pub fn normalize(&self) -> KClass {
        let f = &self.base;
        let minus_one = f.int(-1);
        let mut collected: Vec<(u64, Vec<Elem>)> = Vec::new();
        'term: for (c, slots) in &self.terms {
            let c = c % self.modulus;
            if c == 0 {
                continue;
            }
            let mut s = slots.clone();
            loop {
                let mut changed = false;
                for i in 0..s.len() {
                    for j in i + 1..s.len() {
                        if f.eq(&s[i], &s[j]) && !f.eq(&s[j], &minus_one) {
                            s[j] = minus_one.clone();
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            for (i, x) in s.iter().enumerate() {
                if f.is_one(x) {
                    continue 'term;
                }
                if self.modulus > 1 {
                    if let Ok(t) = f.is_nth_power(x, self.modulus) {
                        if t.is_power {
                            continue 'term;
                        }
                    }
                }
                for y in &s[i + 1..] {
                    if f.is_one(&f.add(x, y)) || f.is_zero(&f.add(x, y)) {
                        continue 'term;
                    }
                }
            }
            if self.modulus == 1 {
                continue;
            }
            match collected.iter_mut().find(|(_, t)| t.len() == s.len() && t.iter().zip(&s).all(|(a, b)| f.eq(a, b))) {
                Some(e) => e.0 = (e.0 + c) % self.modulus,
                None => collected.push((c, s)),
            }
        }
        collected.retain(|(c, _)| *c != 0);
        KClass {
            base: self.base.clone(),
            modulus: self.modulus,
            degree: self.degree,
            terms: collected,
        }
    }

    pub fn fmt(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let f = &self.base;
        self.terms
            .iter()
            .map(|(c, s)| {
                let inner: Vec<String> = s.iter().map(|x| f.fmt_elem(x)).collect();
                let sym = format!("{{{}}}", inner.join(", "));
                if *c == 1 {
                    sym
                } else {
                    format!("{c}*{sym}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", KClass::fmt(self), self.modulus)
    }
}

/// Split a class over `k((t))` (outermost variable) into its specialization and
/// residue parts over `k`, both for the uniformizer `t`.
pub fn split_symbol(c: &KClass) -> Result<(KClass, KClass)> {
    let f = &c.base;
    let base = f
        .laurent_base()
        .ok_or_else(|| Error::Invalid(format!("{f} is not a Laurent extension")))?
        .clone();
    let m = c.modulus;
    let minus_one = base.int(-1);
    let mut sp = KClass::zero(&base, c.degree, m);
    let mut res = KClass::zero(&base, c.degree.saturating_sub(1), m);
    for (coef, slots) in &c.terms {
        let splits = slots.iter().map(|x| f.laurent_split(x)).collect::<Result<Vec<_>>>()?;
        let r = slots.len();
        for mask in 0u32..(1u32 << r) {
            let chosen: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).collect();
            let mut mult: i64 = 1;
            for &i in &chosen {
                mult = mult * splits[i].valuation.rem_euclid(m as i64) % m as i64;
            }
            if mult == 0 {
                continue;
            }
            let k = (*coef as i64 * mult).rem_euclid(m as i64);
            if chosen.is_empty() {
                let s: Vec<Elem> = splits.iter().map(|x| x.unit.clone()).collect();
                sp.terms.push((k as u64, s));
            } else {
                let first = chosen[0];
                let s: Vec<Elem> = (0..r)
                    .filter(|&i| i != first)
                    .map(|i| if chosen.contains(&i) { minus_one.clone() } else { splits[i].unit.clone() })
                    .collect();
                let signed = if first % 2 == 1 { (m as i64 - k) % m as i64 } else { k };
                res.terms.push((signed as u64, s));
            }
        }
    }
    Ok((sp.normalize(), res.normalize()))
}

/// Tame residue `∂_t` along the outermost Laurent variable `var`.
pub fn tame_residue(c: &KClass, var: &str) -> Result<KClass> {
    match c.base.core() {
        FieldTower::Laurent { var: v, .. } if v == var => Ok(split_symbol(c)?.1),
        FieldTower::Laurent { var: v, .. } => invalid(format!(
            "residues are taken along the outermost variable; expected '{v}', got '{var}'"
        )),
        _ => invalid(format!("{} has no Laurent variable '{var}'", c.base)),
    }
}

/// Local symbol `(a,b)_m ∈ ℤ/m` on a p-adic descriptor, normalised against the
/// chosen primitive `m`-th root of unity (see [`chosen_root_residue`]).
pub fn hilbert_pairing(f: &FieldTower, a: &Elem, b: &Elem, m: u64) -> Result<u64> {
    let Some((p, _)) = f.padic_ground() else {
        return unsupported(format!("Hilbert pairing over {f}"));
    };
    if !matches!(f.core(), FieldTower::PAdic { .. }) {
        return unsupported(format!("Hilbert pairing over {f}"));
    }
    if f.is_zero(a) || f.is_zero(b) {
        return invalid("Hilbert pairing of zero");
    }
    if m == 1 {
        return Ok(0);
    }
    if p == 2 {
        if m != 2 {
            return unsupported("wild pairing: only m = 2 is supported over Q_2");
        }
        let h = forms::hilbert_symbol(f, a, b, None)?;
        return Ok(if h == 1 { 0 } else { 1 });
    }
    if (p - 1) % m != 0 {
        return unsupported(format!("wild or non-split pairing: {m} does not divide p-1 = {}", p - 1));
    }
    let al = f.padic_valuation(a)?;
    let be = f.padic_valuation(b)?;
    let ua = f.padic_unit_mod(a, 1)?.to_u64().unwrap();
    let ub = f.padic_unit_mod(b, 1)?.to_u64().unwrap();
    let pw = |x: u64, e: i64| -> u64 {
        let x = if e < 0 { arith::inv_mod(x, p).unwrap() } else { x };
        arith::pow_mod(x, e.unsigned_abs(), p)
    };
    let mut c = arith::mul_mod(pw(ua, be), pw(ub, -al), p);
    if (al * be).rem_euclid(2) == 1 {
        c = p - c;
    }
    let w = arith::pow_mod(c, (p - 1) / m, p);
    let z = chosen_root_residue(p, m);
    let mut acc = 1;
    for k in 0..m {
        if acc == w {
            return Ok(k);
        }
        acc = arith::mul_mod(acc, z, p);
    }
    Err(Error::Invalid("pairing value outside the m-th roots of unity".into()))
}

/// Residue of the chosen primitive `m`-th root of unity of ℚ_p (`m | p-1`).
pub fn chosen_root_residue(p: u64, m: u64) -> u64 {
    let ff = crate::fields::FiniteField::new(p).expect("prime");
    (1..p).find(|&x| ff.element_order(x) == m).expect("m divides p-1")
}

/// Brauer invariant in ℚ/ℤ of the symbol algebra attached to `(a,b)_m`.
pub fn brauer_coordinate(f: &FieldTower, a: &Elem, b: &Elem, m: u64) -> Result<(u64, u64)> {
    let v = hilbert_pairing(f, a, b, m)?;
    let g = gcd_u64(v, m).max(1);
    Ok((v / g, m / g))
}

/// Value of one residue coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoordValue {
    /// Element of `ℤ/modulus`.
    Mod { value: u64, modulus: u64 },
    /// Class in `k^×/m` of a local or finite field: valuation and unit index.
    Pair { valuation: u64, unit: u64, modulus: u64 },
    Zero,
    Undecided(String),
}

impl CoordValue {
    pub fn is_zero(&self) -> Option<bool> {
        match self {
            CoordValue::Mod { value, .. } => Some(*value == 0),
            CoordValue::Pair { valuation, unit, .. } => Some(*valuation == 0 && *unit == 0),
            CoordValue::Zero => Some(true),
            CoordValue::Undecided(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            CoordValue::Mod { value, modulus } => format!("{value} mod {modulus}"),
            CoordValue::Pair { valuation, unit, modulus } => {
                format!("(v={valuation}, ind={unit}) mod {modulus}")
            }
            CoordValue::Zero => "0".into(),
            CoordValue::Undecided(r) => format!("undecided ({r})"),
        }
    }
}

/// Coordinate indexed by the residue path (variables residued, outermost first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinate {
    pub path: Vec<String>,
    pub degree: usize,
    pub value: CoordValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohCoordinates {
    pub modulus: u64,
    pub degree: usize,
    pub coords: Vec<Coordinate>,
    pub chosen_root: Option<String>,
    pub convention: &'static str,
}

impl CohCoordinates {
    /// Coordinate where every Laurent variable was residued.
    pub fn top(&self) -> Option<&Coordinate> {
        self.coords.iter().max_by_key(|c| c.path.len())
    }

    pub fn decision(&self) -> ZeroDecision {
        let mut undecided = None;
        for c in &self.coords {
            match c.value.is_zero() {
                Some(false) => return ZeroDecision::NonZero,
                None => undecided = Some(c.value.describe()),
                _ => {}
            }
        }
        match undecided {
            Some(r) => ZeroDecision::Undecided(r),
            None => ZeroDecision::Zero,
        }
    }
}

/// Iterated residue/specialization coordinates of the cohomology class `h(c)`.
pub fn coh_coordinates(c: &KClass) -> Result<CohCoordinates> {
    let mut coords = Vec::new();
    collect_coords(c, &mut Vec::new(), &mut coords)?;
    let ground = c.base.ground();
    let chosen_root = match ground.primitive_root_of_unity(c.modulus) {
        Ok(crate::fields::RootLookup::Found(z)) => Some(ground.fmt_elem(&z)),
        _ => None,
    };
    Ok(CohCoordinates {
        modulus: c.modulus,
        degree: c.degree,
        coords,
        chosen_root,
        convention: RESIDUE_CONVENTION,
    })
}

fn collect_coords(c: &KClass, path: &mut Vec<String>, out: &mut Vec<Coordinate>) -> Result<()> {
    if let FieldTower::Laurent { var, .. } = c.base.core() {
        let (sp, res) = split_symbol(c)?;
        collect_coords(&sp, path, out)?;
        if c.degree > 0 {
            path.push(var.clone());
            collect_coords(&res, path, out)?;
            path.pop();
        }
        return Ok(());
    }
    out.push(Coordinate { path: path.clone(), degree: c.degree, value: ground_coordinate(c)? });
    Ok(())
}

fn ground_coordinate(c: &KClass) -> Result<CoordValue> {
    let f = &c.base;
    let m = c.modulus;
    if c.degree == 0 {
        let v = c.terms.iter().fold(0, |acc, (k, _)| (acc + k) % m);
        return Ok(CoordValue::Mod { value: v, modulus: m });
    }
    if c.terms.is_empty() {
        return Ok(CoordValue::Zero);
    }
    match f.core() {
        FieldTower::Finite(ff) => {
            if c.degree >= 2 {
                return Ok(CoordValue::Zero);
            }
            let q = ff.order();
            let g = gcd_u64(m, q - 1);
            let gen = ff.generator();
            let mut acc = 0u64;
            for (k, s) in &c.terms {
                let Elem::F(x) = s[0] else { unreachable!() };
                let d = finite_dlog(ff, gen, x);
                acc = (acc + k * (d % g)) % g;
            }
            Ok(CoordValue::Mod { value: acc, modulus: g })
        }
        FieldTower::PAdic { p, .. } => {
            let p = *p;
            match c.degree {
                1 => {
                    if p == 2 || (p - 1) % m != 0 {
                        return Ok(CoordValue::Undecided(format!("k^x/{m} over Q_{p}")));
                    }
                    let g = arith::primitive_root_mod(p);
                    let (mut va, mut ua) = (0u64, 0u64);
                    for (k, s) in &c.terms {
                        let v = f.padic_valuation(&s[0])?.rem_euclid(m as i64) as u64;
                        let u = f.padic_unit_mod(&s[0], 1)?.to_u64().unwrap();
                        let d = arith::dlog_mod(g, u, p).unwrap() % m;
                        va = (va + k * v) % m;
                        ua = (ua + k * d) % m;
                    }
                    Ok(CoordValue::Pair { valuation: va, unit: ua, modulus: m })
                }
                2 => {
                    let mut acc = 0u64;
                    for (k, s) in &c.terms {
                        match hilbert_pairing(f, &s[0], &s[1], m) {
                            Ok(v) => acc = (acc + k * v) % m,
                            Err(Error::Unsupported(r)) => return Ok(CoordValue::Undecided(r)),
                            Err(e) => return Err(e),
                        }
                    }
                    Ok(CoordValue::Mod { value: acc, modulus: m })
                }
                _ => {
                    if p != 2 && (p - 1) % m == 0 || m == 2 {
                        Ok(CoordValue::Zero)
                    } else {
                        Ok(CoordValue::Undecided("wild modulus".into()))
                    }
                }
            }
        }
        _ => Ok(CoordValue::Undecided(format!("degree-{} classes over {f}", c.degree))),
    }
}

fn finite_dlog(ff: &crate::fields::FiniteField, g: u64, x: u64) -> u64 {
    if ff.degree() == 1 {
        return arith::dlog_mod(g, x, ff.p()).unwrap();
    }
    let mut acc = 1;
    for k in 0..ff.order() - 1 {
        if acc == x {
            return k;
        }
        acc = ff.mul(acc, g);
    }
    unreachable!("generator spans the group")
}

/// Certified zero test for a K-class via its residue coordinates.
pub fn decide_zero(c: &KClass) -> Result<ZeroDecision> {
    if c.is_trivially_zero() {
        return Ok(ZeroDecision::Zero);
    }
    Ok(coh_coordinates(c)?.decision())
}

// ---- relative groups --------------------------------------------------------

/// Configuration `A = (a,t₁)_n ⊗ (b,t₂)_n` over `ℚ_p((t₁))((t₂))`.
#[derive(Clone, Debug)]
pub struct SymbolPairConfig {
    pub field: FieldTower,
    pub a: Elem,
    pub b: Elem,
    pub n: u64,
}

/// `ℤ/N` modulo the subgroup generated by top coordinates of `K₂ · r[A]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeGroup {
    pub modulus: u64,
    pub r: u64,
    pub period: u64,
    /// Generator of the residue subgroup `dℤ/N`.
    pub subgroup_generator: u64,
    pub order: u64,
    pub generator_values: Vec<(String, u64)>,
}

impl RelativeGroup {
    pub fn group_name(&self) -> String {
        format!("Z/{}", self.order)
    }

    /// `m_r`: multiplication by the period, then inclusion into `ℤ/N`.
    pub fn m_r(&self, x: u64) -> u64 {
        (self.period * (x % self.order)) % self.modulus
    }

    /// `π_r`: reduction modulo the residue subgroup.
    pub fn pi_r(&self, y: u64) -> u64 {
        y % self.order
    }

    pub fn m_r_well_defined(&self) -> bool {
        (self.period * self.order) % self.modulus == 0
    }

    pub fn m_r_injective(&self) -> bool {
        (1..self.order).all(|x| self.m_r(x) != 0)
    }

    /// `π_r ∘ m_r = ·period` on the relative group.
    pub fn composition_is_period(&self) -> bool {
        (0..self.order).all(|x| self.pi_r(self.m_r(x)) == (self.period * x) % self.order)
    }

    /// Post-composition with `π_r` from `Hom(ℤ/g, ℤ/N)` to `Hom(ℤ/g, ℤ/order)`.
    pub fn pi_tilde(&self, g: u64) -> PiTilde {
        let source: Vec<u64> = (0..self.modulus).filter(|k| (g * k) % self.modulus == 0).collect();
        let target: Vec<u64> = (0..self.order).filter(|k| (g * k) % self.order == 0).collect();
        let mut image: Vec<u64> = source.iter().map(|&k| self.pi_r(k)).collect();
        image.sort();
        image.dedup();
        let surjective = target.iter().all(|t| image.contains(t));
        PiTilde { source, target, image, surjective }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiTilde {
    pub source: Vec<u64>,
    pub target: Vec<u64>,
    pub image: Vec<u64>,
    pub surjective: bool,
}

/// Compute `H⁴_{N,A⊗r}` for the configuration with `N = n²`.
pub fn relative_group(cfg: &SymbolPairConfig, r: u64) -> Result<RelativeGroup> {
    let f = &cfg.field;
    let vars = f.laurent_vars();
    if vars.len() != 2 {
        return invalid("relative groups need a 2-fold Laurent tower");
    }
    let (p, _) = f
        .padic_ground()
        .ok_or_else(|| Error::Invalid("relative groups need a p-adic ground field".into()))?;
    let n = cfg.n;
    let big_n = n * n;
    if p == 2 || (p - 1) % big_n != 0 {
        return unsupported(format!("tame computation needs N = {big_n} | p-1"));
    }
    let (t2, t1) = (f.var(&vars[0])?, f.var(&vars[1])?);
    let ground = f.ground().clone();
    let teich = ground
        .primitive_root_of_unity(p - 1)?
        .found()
        .ok_or_else(|| Error::Invalid("no Teichmüller generator".into()))?;
    let gens = vec![
        ("teich".to_string(), f.from_ground(teich)),
        ("p".to_string(), f.int(p as i64)),
        (vars[1].clone(), t1.clone()),
        (vars[0].clone(), t2.clone()),
    ];
    let c = (r % n) * (big_n / n);
    let a_class = KClass::symbol(f, vec![cfg.a.clone(), t1], big_n)?
        .add(&KClass::symbol(f, vec![cfg.b.clone(), t2], big_n)?)?
        .scale(c as i64);
    let mut d = big_n;
    let mut values = Vec::new();
    for (nx, x) in &gens {
        for (ny, y) in &gens {
            if nx >= ny {
                continue;
            }
            let xy = KClass::symbol(f, vec![x.clone(), y.clone()], big_n)?;
            let cls = xy.cup(&a_class)?;
            let coords = coh_coordinates(&cls)?;
            let top = coords.top().ok_or_else(|| Error::Invalid("no top coordinate".into()))?;
            let v = match &top.value {
                CoordValue::Mod { value, .. } => *value,
                CoordValue::Zero => 0,
                other => return Err(Error::Undecided(other.describe())),
            };
            d = gcd_u64(d, v);
            values.push((format!("{{{nx},{ny}}}"), v));
        }
    }
    Ok(RelativeGroup {
        modulus: big_n,
        r,
        period: n,
        subgroup_generator: d % big_n,
        order: d,
        generator_values: values,
    })
}

/// Sum of Milnor symbols parsed from `{x,y,…}` over a tower.
pub fn parse_symbol(
    f: &FieldTower,
    s: &str,
    bindings: &std::collections::HashMap<String, Elem>,
    m: u64,
) -> Result<KClass> {
    let t = s.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|x| x.strip_suffix('}'))
        .ok_or_else(|| Error::Syntax(format!("expected '{{x1,...,xr}}', found '{s}'")))?;
    let slots = if inner.trim().is_empty() {
        vec![]
    } else {
        inner
            .split(',')
            .map(|x| f.parse_elem(x, bindings))
            .collect::<Result<Vec<_>>>()?
    };
    KClass::symbol(f, slots, m)
}

/// Integer `BigInt` helper for callers building symbols from integers.
pub fn int_slot(f: &FieldTower, n: i64) -> Elem {
    f.from_bigint(&BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::parse_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lq() -> FieldTower {
        parse_field("Q((t))").unwrap()
    }

    fn e(f: &FieldTower, s: &str) -> Elem {
        f.parse_elem_plain(s).unwrap()
    }

    #[test]
    fn normalizer_examples() {
        let f = lq();
        let x = e(&f, "3+t");
        let omx = f.sub(&f.one(), &x);
        assert!(KClass::symbol(&f, vec![x.clone(), omx], 5).unwrap().is_trivially_zero());
        let tt = KClass::symbol(&f, vec![e(&f, "t"), e(&f, "t")], 5).unwrap();
        let tm = KClass::symbol(&f, vec![e(&f, "t"), e(&f, "-1")], 5).unwrap();
        assert_eq!(tt, tm);
        let q = FieldTower::Rationals;
        assert!(KClass::symbol(&q, vec![q.int(4), q.int(7)], 2).unwrap().is_trivially_zero());
        assert!(KClass::symbol(&q, vec![q.int(3), q.int(-3)], 2).unwrap().is_trivially_zero());
        let s = KClass::symbol(&q, vec![q.int(3), q.int(5)], 3).unwrap();
        assert_eq!(s.normalize(), s);
        assert!(s.scale(3).is_trivially_zero());
    }

    #[test]
    fn residue_examples() {
        let f = lq();
        let q = FieldTower::Rationals;
        let r = tame_residue(&KClass::symbol(&f, vec![e(&f, "t"), e(&f, "5")], 2).unwrap(), "t").unwrap();
        assert_eq!(r, KClass::symbol(&q, vec![q.int(5)], 2).unwrap());
        let r = tame_residue(&KClass::symbol(&f, vec![e(&f, "2"), e(&f, "5")], 7).unwrap(), "t").unwrap();
        assert!(r.is_trivially_zero());
        let r = tame_residue(&KClass::symbol(&f, vec![e(&f, "t"), e(&f, "t")], 3).unwrap(), "t").unwrap();
        assert_eq!(r, KClass::symbol(&q, vec![q.int(-1)], 3).unwrap());
    }

    #[test]
    fn pairing_examples() {
        let q5 = FieldTower::padic(5).unwrap();
        assert_eq!(hilbert_pairing(&q5, &q5.int(2), &q5.int(5), 2).unwrap(), 1);
        assert_eq!(hilbert_pairing(&q5, &q5.int(4), &q5.int(5), 2).unwrap(), 0);
        let q13 = FieldTower::padic(13).unwrap();
        let z = chosen_root_residue(13, 4);
        for u in 1..13u64 {
            let v = hilbert_pairing(&q13, &q13.int(u as i64), &q13.int(13), 4).unwrap();
            let w = arith::pow_mod(u, 3, 13);
            assert_eq!(arith::pow_mod(z, v, 13), w);
        }
        let q7 = FieldTower::padic(7).unwrap();
        assert!(matches!(hilbert_pairing(&q7, &q7.int(2), &q7.int(7), 7), Err(Error::Unsupported(_))));
    }

    #[test]
    fn pairing_bilinear_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, m) in [(7u64, 3u64), (13, 4), (11, 5), (5, 2), (2, 2)] {
            let f = FieldTower::padic(p).unwrap();
            for _ in 0..100 {
                let mut draw = || {
                    let v: i64 = rng.gen_range(-40..=40);
                    let v = if v == 0 { 1 } else { v };
                    f.int(v)
                };
                let (a1, a2, b) = (draw(), draw(), draw());
                let l = hilbert_pairing(&f, &f.mul(&a1, &a2), &b, m).unwrap();
                let r = (hilbert_pairing(&f, &a1, &b, m).unwrap() + hilbert_pairing(&f, &a2, &b, m).unwrap()) % m;
                assert_eq!(l, r);
                let ab = hilbert_pairing(&f, &a1, &b, m).unwrap();
                let ba = hilbert_pairing(&f, &b, &a1, m).unwrap();
                assert_eq!((ab + ba) % m, 0);
                assert_eq!(hilbert_pairing(&f, &a1, &f.neg(&a1), m).unwrap(), 0);
            }
        }
    }

    #[test]
    fn top_coordinate_examples() {
        let f = parse_field("Qp(7)((t1))((t2))").unwrap();
        let b = f.standard_bindings();
        let sym = parse_symbol(&f, "{u,t1,p,t2}", &b, 2).unwrap();
        let c = coh_coordinates(&sym).unwrap();
        assert_eq!(c.top().unwrap().value, CoordValue::Mod { value: 1, modulus: 2 });
        let sq = parse_symbol(&f, "{4,t1,p,t2}", &b, 2).unwrap();
        assert_eq!(decide_zero(&sq).unwrap(), ZeroDecision::Zero);
        assert_eq!(decide_zero(&sym.scale(2)).unwrap(), ZeroDecision::Zero);
    }

    #[test]
    fn steinberg_relators_have_zero_residue() {
        let f = parse_field("F(7)((t))").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut count = 0;
        while count < 500 {
            let x = f.sample_nonzero(&mut rng);
            let y = f.sub(&f.one(), &x);
            if f.is_zero(&y) || !f.is_exact(&x) {
                continue;
            }
            let extra = f.sample_nonzero(&mut rng);
            let k = KClass {
                base: f.clone(),
                modulus: 3,
                degree: 3,
                terms: vec![(1, vec![x, y, extra])],
            };
            let r = tame_residue(&k, "t").unwrap();
            assert_eq!(decide_zero(&r).unwrap(), ZeroDecision::Zero);
            count += 1;
        }
    }

    #[test]
    fn relative_group_examples() {
        let f = parse_field("Qp(17)((t1))((t2))").unwrap();
        let b = f.standard_bindings();
        let cfg = SymbolPairConfig { field: f.clone(), a: b["u"].clone(), b: b["p"].clone(), n: 2 };
        let g = relative_group(&cfg, 1).unwrap();
        assert_eq!(g.order, 2);
        assert!(g.m_r_injective());
        assert!(g.composition_is_period());
        assert!(!g.pi_tilde(2).surjective);
        let g2 = relative_group(&cfg, 2).unwrap();
        assert_eq!(g2.order, 4);
    }
}
