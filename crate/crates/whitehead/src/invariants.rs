//! Headline computations: Platonov's SK₁, Kahn's bound and torsion exponents,
//! evaluation of the KMRT invariant as a Witt class, centre formulas,
//! non-triviality witnesses for SK₁ and the comparison maps `m_r`, `π_r`.

use std::fmt;

use crate::algebras::{self, AlgElem, Algebra, Involution, Presentation};
use crate::arith;
use crate::error::{invalid, unsupported, Error, Result};
use crate::fields::{Elem, FieldTower};
use crate::forms::{self, LevelCertificate, QuadraticForm, WittClass};
use crate::ktheory::{self, KClass, RelativeGroup, SymbolPairConfig, ZeroDecision};
use crate::linalg;

/// Where a certificate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Cited,
    Undecided,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Computed => write!(f, "computed"),
            Provenance::Cited => write!(f, "cited"),
            Provenance::Undecided => write!(f, "undecided"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub provenance: Provenance,
    pub detail: String,
}

impl Certificate {
    fn computed(d: impl Into<String>) -> Self {
        Certificate { provenance: Provenance::Computed, detail: d.into() }
    }

    fn cited(d: impl Into<String>) -> Self {
        Certificate { provenance: Provenance::Cited, detail: d.into() }
    }

    fn undecided(d: impl Into<String>) -> Self {
        Certificate { provenance: Provenance::Undecided, detail: d.into() }
    }
}

/// Integer known only through constraints (`d_A`, `i(p,m)`, `j(p,n)`, `λ`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalScalar {
    pub name: String,
    pub modulus: Option<u64>,
    pub constraints: Vec<String>,
}

impl FormalScalar {
    pub fn new(name: &str, modulus: Option<u64>) -> Self {
        FormalScalar { name: name.into(), modulus, constraints: vec![] }
    }

    pub fn constrain(mut self, c: &str) -> Self {
        if !self.constraints.iter().any(|x| x == c) {
            self.constraints.push(c.into());
        }
        self
    }

    pub fn describe(&self) -> String {
        let m = self.modulus.map(|m| format!(" mod {m}")).unwrap_or_default();
        if self.constraints.is_empty() {
            format!("{}{m} (undetermined)", self.name)
        } else {
            format!("{}{m}: {}", self.name, self.constraints.join(", "))
        }
    }
}

// ---- Platonov -----------------------------------------------------------------

/// `A = (F₁/F,σ₁,t₁) ⊗ (F₂/F,σ₂,t₂)` over `F = k((t₁))((t₂))` with Kummer data
/// `Kᵢ = k(ⁿ√aᵢ)` over a tame p-adic `k`.
#[derive(Clone, Debug)]
pub struct PlatonovConfig {
    pub k: FieldTower,
    pub n: u64,
    pub a1: Elem,
    pub a2: Elem,
}

/// Class of `x` in `k^×/(k^×)^n ≅ (ℤ/n)²` as (valuation, unit index).
fn kummer_coords(k: &FieldTower, x: &Elem, n: u64) -> Result<(u64, u64)> {
    let Some((p, _)) = k.padic_ground() else {
        return unsupported(format!("Kummer coordinates over {k}"));
    };
    if p == 2 || (p - 1) % n != 0 {
        return unsupported(format!("tame Kummer theory needs n | p-1 (n = {n}, p = {p})"));
    }
    let v = k.padic_valuation(x)?.rem_euclid(n as i64) as u64;
    let u = k.padic_unit_mod(x, 1)?;
    let u = u.to_string().parse::<u64>().map_err(|_| Error::Invalid("unit residue".into()))?;
    let g = arith::primitive_root_mod(p);
    let d = arith::dlog_mod(g, u, p).ok_or_else(|| Error::Invalid("discrete log".into()))? % n;
    Ok((v, d))
}

fn span_order(n: u64, gens: &[(u64, u64)]) -> u64 {
    let mut seen = std::collections::HashSet::new();
    let mut frontier = vec![(0u64, 0u64)];
    seen.insert((0, 0));
    while let Some((a, b)) = frontier.pop() {
        for (x, y) in gens {
            let next = ((a + x) % n, (b + y) % n);
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    seen.len() as u64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlatonovReport {
    pub n: u64,
    /// `[K:k]`, `[K₁:k]`, `[K₂:k]`.
    pub degrees: (u64, u64, u64),
    /// Order of `Br(K/k)/(Br(K₁/k)Br(K₂/k))`.
    pub order: u64,
    pub group: String,
    /// Generator `1/[K:k]` of `Br(K/k) ⊂ ℚ/ℤ`.
    pub generator: (u64, u64),
    pub division: Certificate,
    pub algebra: String,
}

pub fn sk1_platonov(cfg: &PlatonovConfig) -> Result<PlatonovReport> {
    let n = cfg.n;
    if n < 2 {
        return invalid("n must be at least 2");
    }
    let c1 = kummer_coords(&cfg.k, &cfg.a1, n)?;
    let c2 = kummer_coords(&cfg.k, &cfg.a2, n)?;
    let d1 = span_order(n, &[c1]);
    let d2 = span_order(n, &[c2]);
    let dk = span_order(n, &[c1, c2]);
    if dk != n * n {
        return invalid("K1 and K2 are not linearly disjoint");
    }
    let order = dk / arith::lcm_u64(d1, d2);
    let f = cfg.k.clone().laurent("t1")?.laurent("t2")?;
    let a1 = f.from_ground(cfg.a1.clone());
    let a2 = f.from_ground(cfg.a2.clone());
    let label = format!(
        "cyclic_kummer({}; t1; {n}) (*) cyclic_kummer({}; t2; {n})",
        cfg.k.fmt_elem(&cfg.a1),
        cfg.k.fmt_elem(&cfg.a2)
    );
    let division = if n == 2 {
        let t1 = f.var("t1")?;
        let t2 = f.var("t2")?;
        let q1 = algebras::symbol(&f, &a1, &t1, 2, None)?;
        let q2 = algebras::symbol(&f, &a2, &t2, 2, None)?;
        let test = algebras::is_division_biquaternion(&algebras::tensor(&q1, &q2)?)?;
        if !test.division {
            return invalid("Albert form is isotropic: the algebra is not division");
        }
        Certificate::computed(format!(
            "Albert form {} anisotropic ({})",
            test.albert.fmt(),
            test.isotropy.certificate
        ))
    } else {
        Certificate::cited("division for linearly disjoint tame Kummer data of degree n > 2")
    };
    Ok(PlatonovReport {
        n,
        degrees: (dk, d1, d2),
        order,
        group: format!("Z/{order}"),
        generator: (1, dk),
        division,
        algebra: label,
    })
}

// ---- Kahn ---------------------------------------------------------------------

/// `n̄ = ∏ pᵢ^{eᵢ−1}` for `n = ∏ pᵢ^{eᵢ}`.
pub fn kahn_bound(n: u64) -> Result<u64> {
    if n == 0 {
        return invalid("n must be >= 1");
    }
    Ok(arith::factor_u64(n).iter().map(|&(p, e)| p.pow(e - 1)).product())
}

/// `m = ∏ pᵢ^{fᵢ}` with `fᵢ = 1` for `pᵢ = 2` or `ind = per = pᵢ`, and `fᵢ = 2` for
/// `ind > per = pᵢ > 2`.
pub fn kahn_torsion(factors: &[(u64, u64, u64)]) -> Result<u64> {
    let mut m = 1u64;
    for &(p, ind, per) in factors {
        if !arith::is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        let is_pow = |x: u64| x > 1 && arith::prime_power(x).map(|(q, _)| q) == Some(p);
        if !is_pow(ind) || !is_pow(per) || ind % per != 0 {
            return invalid(format!("inconsistent (ind, per) = ({ind}, {per}) at p = {p}"));
        }
        let f = if p == 2 {
            1
        } else if per == p && ind == p {
            1
        } else if per == p && ind > p {
            2
        } else {
            return unsupported(format!("torsion exponent for per = {per} > p = {p}"));
        };
        m *= p.pow(f);
    }
    Ok(m)
}

// ---- KMRT ----------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct KmrtReport {
    pub hyperbolic: bool,
    pub v: Option<AlgElem>,
    pub form: Option<QuadraticForm>,
    pub class: Option<WittClass>,
    pub level: LevelCertificate,
    pub v_method: String,
}

impl KmrtReport {
    /// Zero modulo `I⁴`.
    pub fn vanishes(&self) -> bool {
        self.hyperbolic || (self.level.certified && self.level.level >= 4)
    }
}

fn pfaffian_trace(alg: &Algebra, s: &Involution, x: &AlgElem) -> Result<Elem> {
    algebras::pfaffian_trace(alg, s, x)
}

/// Admissible `v ∈ Symd` with `v (Trp(v) − v)⁻¹ = w`, scaled by `c`.
pub fn kmrt_v(alg: &Algebra, sigma: &Involution, w: &AlgElem, c: &Elem) -> Result<(AlgElem, String)> {
    let f = alg.base();
    let t = pfaffian_trace(alg, sigma, w)?;
    let two_t = f.add(&f.int(2), &t);
    let v = if !f.is_zero(&two_t) {
        let v = alg.scale(&f.div(c, &two_t)?, &alg.add(&alg.one(), w));
        (v, "closed form c(1+w)/(2+Trp(w))".to_string())
    } else {
        let symd = &sigma.symd;
        let onew = alg.add(&alg.one(), w);
        let k = symd.len();
        let traces = symd.iter().map(|e| pfaffian_trace(alg, sigma, e)).collect::<Result<Vec<_>>>()?;
        let cols: Vec<AlgElem> = symd
            .iter()
            .zip(&traces)
            .map(|(e, tr)| alg.sub(&alg.mul(&onew, e), &alg.scale(tr, w)))
            .collect();
        let m: linalg::Matrix = (0..alg.dim()).map(|i| (0..k).map(|j| cols[j][i].clone()).collect()).collect();
        let ns = linalg::nullspace(f, &m, k)?;
        let combine = |coef: &[Elem]| {
            coef.iter().zip(symd).fold(alg.zero(), |acc, (ci, e)| alg.add(&acc, &alg.scale(ci, e)))
        };
        let mut found = None;
        'search: for weights in 1..=4i64 {
            for (idx, b) in ns.iter().enumerate() {
                let mut coef = b.clone();
                for (jdx, other) in ns.iter().enumerate() {
                    if jdx != idx {
                        for (x, y) in coef.iter_mut().zip(other) {
                            *x = f.add(x, &f.mul(&f.int(weights * (jdx as i64 + 1)), y));
                        }
                    }
                }
                let cand = combine(&coef);
                if !f.is_zero(&alg.reduced_norm(&cand)?) {
                    found = Some(alg.scale(c, &cand));
                    break 'search;
                }
            }
        }
        let v = found.ok_or_else(|| Error::Invalid("no invertible admissible v found".into()))?;
        (v, "linear solve (1+w)v = Trp(v)w over Symd".to_string())
    };
    let tv = pfaffian_trace(alg, sigma, &v.0)?;
    let lhs = alg.mul(&v.0, &alg.inverse(&alg.sub(&alg.scalar(&tv), &v.0))?);
    if !alg.eq(&lhs, w) {
        return Err(Error::Invalid("v fails the defining relation".into()));
    }
    Ok(v)
}

/// The form `Φ_v(x) = Trp(σ(x) v x)` on `A`, diagonalised.
pub fn phi_form(alg: &Algebra, sigma: &Involution, v: &AlgElem) -> Result<QuadraticForm> {
    let f = alg.base();
    let d = alg.dim();
    let eight = f.int(2 * alg.degree() as i64);
    let rows: Vec<AlgElem> = (0..d).map(|i| alg.mul(&sigma.apply(alg, &alg.basis(i)), v)).collect();
    let mut g = linalg::zeros(f, d, d);
    for i in 0..d {
        for j in i..d {
            let x = f.div(&alg.regular_trace(&alg.mul(&rows[i], &alg.basis(j))), &eight)?;
            g[i][j] = x.clone();
            g[j][i] = x;
        }
    }
    let (diag, rad) = linalg::diagonalize_symmetric(f, &g)?;
    if rad != 0 {
        return invalid("Phi_v is degenerate");
    }
    QuadraticForm::diagonal(f, diag)
}

/// `ρ_KMRT(a) = Φ_v + I⁴` for `a ∈ SL₁(A)`, with `c` scaling the admissible `v`.
pub fn kmrt_eval_with(alg: &Algebra, sigma: &Involution, a: &AlgElem, c: &Elem) -> Result<KmrtReport> {
    let f = alg.base();
    if alg.degree() != 4 || sigma.kind != algebras::InvolutionKind::Symplectic {
        return invalid("the KMRT invariant needs a biquaternion algebra with symplectic involution");
    }
    if !alg.is_sl1(a)? {
        return invalid("element does not have reduced norm 1");
    }
    if f.is_zero(c) {
        return invalid("scaling constant must be nonzero");
    }
    let hyp = algebras::is_hyperbolic_involution(alg, sigma)?;
    if hyp.isotropic {
        return Ok(KmrtReport {
            hyperbolic: true,
            v: None,
            form: None,
            class: None,
            level: LevelCertificate {
                level: 4,
                is_zero: Some(true),
                certified: true,
                certificate: format!("sigma hyperbolic: {}", hyp.certificate),
            },
            v_method: "none (hyperbolic involution)".into(),
        });
    }
    let w = alg.neg(&alg.mul(&sigma.apply(alg, a), a));
    let (v, method) = kmrt_v(alg, sigma, &w, c)?;
    let form = phi_form(alg, sigma, &v)?;
    let class = forms::witt_class(&form);
    let level = forms::i_level(&class)?;
    if level.certified && level.level < 3 {
        return Err(Error::Invalid(format!("Phi_v has level {} < 3", level.level)));
    }
    Ok(KmrtReport { hyperbolic: false, v: Some(v), form: Some(form), class: Some(class), level, v_method: method })
}

/// `ρ_KMRT(a)` with `c` chosen so that `v` has coprime integer coordinates over ℚ.
pub fn kmrt_eval(alg: &Algebra, sigma: &Involution, a: &AlgElem) -> Result<KmrtReport> {
    let f = alg.base();
    let c = if matches!(f, FieldTower::Rationals) && alg.is_sl1(a)? {
        let w = alg.neg(&alg.mul(&sigma.apply(alg, a), a));
        match kmrt_v(alg, sigma, &w, &f.one()) {
            Ok((v, _)) => primitive_scale(f, &v),
            Err(_) => f.one(),
        }
    } else {
        f.one()
    };
    kmrt_eval_with(alg, sigma, a, &c)
}

/// Scalar making a rational vector primitive integral.
fn primitive_scale(f: &FieldTower, v: &AlgElem) -> Elem {
    use num_integer::Integer;
    use num_traits::{One, Zero};
    let mut den = num_bigint::BigInt::one();
    let mut num = num_bigint::BigInt::zero();
    for x in v.iter().filter_map(|x| f.as_rational(x)) {
        den = den.lcm(x.denom());
        num = num.gcd(x.numer());
    }
    if num.is_zero() {
        return f.one();
    }
    f.from_rational(&num_rational::BigRational::new(den, num)).unwrap_or_else(|_| f.one())
}

// ---- centre formulas -------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CentreValue {
    pub pfister: QuadraticForm,
    pub class: WittClass,
    pub level: LevelCertificate,
    pub certificate: Certificate,
}

/// `⟪4a+1, b, 4c+1, d⟫ + I⁴` over a tower with a primitive 4th root of unity.
pub fn centre_value_biquat(f: &FieldTower, a: &Elem, b: &Elem, c: &Elem, d: &Elem) -> Result<CentreValue> {
    if f.primitive_root_of_unity(4)?.found().is_none() {
        return invalid(format!("{f} has no primitive 4th root of unity"));
    }
    let e1 = f.add(&f.scale_int(a, 4), &f.one());
    let e3 = f.add(&f.scale_int(c, 4), &f.one());
    let entries = [e1, b.clone(), e3, d.clone()];
    if entries.iter().any(|x| f.is_zero(x)) {
        return invalid("Pfister entries must be nonzero");
    }
    let pf = forms::pfister(f, &entries)?;
    let class = forms::witt_class(&pf);
    let (level, certificate) = match forms::i_level(&class) {
        Ok(l) if l.certified => {
            let c = Certificate::computed(l.certificate.clone());
            (l, c)
        }
        Ok(l) => (l, Certificate::undecided("level >=3 unverified")),
        Err(Error::Unsupported(r)) => (
            LevelCertificate { level: 3, is_zero: None, certified: false, certificate: r.clone() },
            Certificate::undecided(format!("level >=3 unverified ({r})")),
        ),
        Err(e) => return Err(e),
    };
    Ok(CentreValue { pfister: pf, class, level, certificate })
}

fn symbol_entries(alg: &Algebra) -> Result<(Elem, Elem, Elem, Elem, u64)> {
    let Presentation::Tensor(l, r) = alg.tag() else {
        return invalid("expected (a,b)_n (*) (c,d)_n");
    };
    let get = |q: &Algebra| match q.tag() {
        Presentation::Symbol { a, b, n, .. } | Presentation::CyclicKummer { a, b, n, .. } => {
            Ok((a.clone(), b.clone(), *n))
        }
        _ => invalid("factors must be symbol algebras"),
    };
    let (a, b, n1) = get(l)?;
    let (c, d, n2) = get(r)?;
    if n1 != n2 {
        return invalid("factors have different degrees");
    }
    Ok((a, b, c, d, n1))
}

#[derive(Clone, Debug)]
pub struct CentreSymbol {
    pub j: FormalScalar,
    pub lambda: Option<FormalScalar>,
    pub symbol: KClass,
    pub decision: ZeroDecision,
    pub certificate: Certificate,
}

/// `ρ_Kahn(ζ) = φ[j(p,n) h⁴({a,b,c,d})]` as the pair `(j, {a,b,c,d} mod n)`.
pub fn centre_symbol(alg: &Algebra) -> Result<CentreSymbol> {
    let (a, b, c, d, n) = symbol_entries(alg)?;
    let f = alg.base();
    if f.primitive_root_of_unity(n * n)?.found().is_none() {
        return invalid(format!("{f} has no primitive {}-th root of unity", n * n));
    }
    let symbol = KClass::symbol(f, vec![a, b, c, d], n)?;
    let nbar = kahn_bound(n * n)?;
    let j = FormalScalar::new("j(p,n)", Some(nbar));
    let (decision, certificate) = match ktheory::decide_zero(&symbol) {
        Ok(ZeroDecision::NonZero) => (
            ZeroDecision::NonZero,
            Certificate::computed("nonzero residue coordinate of h^4({a,b,c,d})"),
        ),
        Ok(ZeroDecision::Zero) => (ZeroDecision::Zero, Certificate::computed("symbol vanishes; value forced 0")),
        Ok(ZeroDecision::Undecided(r)) => (ZeroDecision::Undecided(r.clone()), Certificate::undecided(r)),
        Err(Error::Unsupported(r)) | Err(Error::Invalid(r)) => {
            (ZeroDecision::Undecided(r.clone()), Certificate::undecided(r))
        }
        Err(e) => return Err(e),
    };
    let lambda = if decision == ZeroDecision::NonZero && is_platonov_shape(alg) {
        Some(FormalScalar::new("lambda", Some(nbar * nbar)).constrain("!= 0"))
    } else {
        None
    };
    Ok(CentreSymbol { j, lambda, symbol, decision, certificate })
}

fn is_platonov_shape(alg: &Algebra) -> bool {
    let vars = alg.base().laurent_vars();
    if vars.len() != 2 {
        return false;
    }
    let Ok((_, b, _, d, _)) = symbol_entries(alg) else { return false };
    let f = alg.base();
    let (t2, t1) = (f.var(&vars[0]), f.var(&vars[1]));
    matches!((t1, t2), (Ok(t1), Ok(t2)) if f.eq(&b, &t1) && f.eq(&d, &t2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sk1Witness {
    /// `{a,b,c,d} ≠ 0`, hence `SK₁(A) ≠ 0`.
    NonTrivial(String),
    /// The symbol vanishes: no conclusion about SK₁.
    NoConclusion(String),
    Undecided(String),
}

/// `{a,b,c,d} ≠ 0 ∈ K^M₄(k)/l ⇒ SK₁(A) ≠ 0` for `A = (a,b)_l ⊗ (c,d)_l`.
pub fn sk1_nontrivial_witness(alg: &Algebra) -> Result<Sk1Witness> {
    let (a, b, c, d, l) = symbol_entries(alg)?;
    if !arith::is_prime(l) {
        return invalid(format!("{l} is not prime"));
    }
    let f = alg.base();
    if f.primitive_root_of_unity(l * l)?.found().is_none() {
        return invalid(format!("{f} has no primitive {}-th root of unity", l * l));
    }
    let sym = KClass::symbol(f, vec![a, b, c, d], l)?;
    Ok(match ktheory::decide_zero(&sym) {
        Ok(ZeroDecision::NonZero) => Sk1Witness::NonTrivial(format!("{} != 0 mod {l}", sym.fmt())),
        Ok(ZeroDecision::Zero) => Sk1Witness::NoConclusion("symbol is 0".into()),
        Ok(ZeroDecision::Undecided(r)) => Sk1Witness::Undecided(r),
        Err(Error::Unsupported(r)) | Err(Error::Invalid(r)) => Sk1Witness::Undecided(r),
        Err(e) => return Err(e),
    })
}

// ---- comparison maps --------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonReport {
    pub group: RelativeGroup,
    /// `(x, m_r(x))` for `x ∈ ℤ/order`.
    pub m_r: Vec<(u64, u64)>,
    /// `(y, π_r(y))` for `y ∈ ℤ/N`.
    pub pi_r: Vec<(u64, u64)>,
    pub m_r_well_defined: bool,
    pub m_r_injective: bool,
    pub composition_is_period: bool,
    pub pi_tilde_surjective: bool,
    pub sk1_order: u64,
}

/// Comparison maps for the Platonov configuration `(a,t₁)_n ⊗ (b,t₂)_n` at `r`.
pub fn comparison_report(cfg: &SymbolPairConfig, r: u64) -> Result<ComparisonReport> {
    let g = ktheory::relative_group(cfg, r)?;
    let m_r = (0..g.order).map(|x| (x, g.m_r(x))).collect();
    let pi_r = (0..g.modulus).map(|y| (y, g.pi_r(y))).collect();
    let sk1_order = cfg.n;
    Ok(ComparisonReport {
        m_r,
        pi_r,
        m_r_well_defined: g.m_r_well_defined(),
        m_r_injective: g.m_r_injective(),
        composition_is_period: g.composition_is_period(),
        pi_tilde_surjective: g.pi_tilde(sk1_order).surjective,
        sk1_order,
        group: g,
    })
}

// ---- descriptors ----------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantDescriptor {
    pub name: &'static str,
    pub value_group: &'static str,
    pub torsion_bound: String,
    pub relations: Vec<&'static str>,
}

/// Known invariants of SK₁ for an algebra of degree `n`, with recorded relations.
pub fn descriptors(n: u64) -> Result<Vec<InvariantDescriptor>> {
    let nbar = kahn_bound(n)?;
    let b = format!("{nbar}");
    Ok(vec![
        InvariantDescriptor {
            name: "S91",
            value_group: "H^4_n",
            torsion_bound: b.clone(),
            relations: vec!["S91 = rho_2: open"],
        },
        InvariantDescriptor {
            name: "S06",
            value_group: "H^4_{n,A(x)r}",
            torsion_bound: b.clone(),
            relations: vec!["compatibility with residues for S06: open"],
        },
        InvariantDescriptor { name: "Rost", value_group: "H^4_2", torsion_bound: "2".into(), relations: vec![] },
        InvariantDescriptor {
            name: "Kahn",
            value_group: "H^4_n",
            torsion_bound: b,
            relations: vec!["|Inv^4(SK1(A), H*_n)| <= nbar"],
        },
        InvariantDescriptor {
            name: "KMRT",
            value_group: "I^3 W_q / I^4 W_q",
            torsion_bound: "2".into(),
            relations: vec!["defined for biquaternion algebras (n = 4)"],
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::parse_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn platonov(p: u64, n: u64) -> PlatonovConfig {
        let k = FieldTower::padic(p).unwrap();
        let g = arith::primitive_root_mod(p) as i64;
        PlatonovConfig { a1: k.int(g), a2: k.int(p as i64), k, n }
    }

    #[test]
    fn platonov_examples() {
        for (p, n) in [(17u64, 2u64), (109, 3), (251, 5)] {
            let r = sk1_platonov(&platonov(p, n)).unwrap();
            assert_eq!(r.order, n);
            assert_eq!(r.group, format!("Z/{n}"));
        }
        let r = sk1_platonov(&platonov(17, 2)).unwrap();
        assert_eq!(r.division.provenance, Provenance::Computed);
        let mut bad = platonov(17, 2);
        bad.a2 = bad.a1.clone();
        let e = sk1_platonov(&bad).unwrap_err();
        assert!(e.to_string().contains("not linearly disjoint"));
    }

    #[test]
    fn kahn_examples() {
        assert_eq!(kahn_bound(4).unwrap(), 2);
        assert_eq!(kahn_bound(12).unwrap(), 2);
        assert_eq!(kahn_bound(30).unwrap(), 1);
        assert!(kahn_bound(0).is_err());
        assert_eq!(kahn_torsion(&[(3, 9, 3), (2, 4, 2)]).unwrap(), 18);
        assert_eq!(kahn_torsion(&[(5, 5, 5)]).unwrap(), 5);
        assert!(kahn_torsion(&[(3, 3, 9)]).is_err());
    }

    fn biquat() -> Algebra {
        let f = FieldTower::Rationals;
        algebras::parse_algebra(&f, "symbol(-1; -1; 2) (*) symbol(2; 5; 2)", &f.standard_bindings()).unwrap()
    }

    #[test]
    fn kmrt_of_one_and_commutators() {
        let a = biquat();
        let s = algebras::make_symplectic_involution(&a).unwrap();
        let r = kmrt_eval(&a, &s, &a.one()).unwrap();
        assert!(r.vanishes());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..3 {
            let c = a.sl1_sample(&mut rng).unwrap();
            let r = kmrt_eval(&a, &s, &c).unwrap();
            assert!(r.vanishes(), "{:?}", r.level);
        }
    }

    #[test]
    fn kmrt_non_hyperbolic_path() {
        let a = biquat();
        let s = algebras::make_symplectic_involution_with(&a, 2).unwrap();
        let f = a.base().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..3 {
            let c = a.sl1_sample(&mut rng).unwrap();
            let r = kmrt_eval(&a, &s, &c).unwrap();
            assert!(!r.hyperbolic);
            assert_eq!(r.form.as_ref().unwrap().dim(), 16);
            assert!(r.vanishes());
            let r2 = kmrt_eval_with(&a, &s, &c, &f.int(3)).unwrap();
            assert!(r2.vanishes());
        }
    }

    #[test]
    fn centre_examples() {
        let f = parse_field("Qp(13)").unwrap();
        let v = centre_value_biquat(&f, &f.int(1), &f.int(3), &f.int(2), &f.int(7)).unwrap();
        assert_eq!(v.level.is_zero, Some(true));
        assert_eq!(v.certificate.provenance, Provenance::Computed);
        let q = FieldTower::Rationals;
        assert!(centre_value_biquat(&q, &q.int(1), &q.int(3), &q.int(2), &q.int(7)).is_err());
        let l = parse_field("Qp(17)((t1))((t2))").unwrap();
        let alg = algebras::parse_algebra(&l, "symbol(u; t1; 2) (*) symbol(p; t2; 2)", &l.standard_bindings()).unwrap();
        let cs = centre_symbol(&alg).unwrap();
        assert_eq!(cs.decision, ZeroDecision::NonZero);
        assert!(cs.lambda.is_some());
        assert!(matches!(sk1_nontrivial_witness(&alg).unwrap(), Sk1Witness::NonTrivial(_)));
        let triv = algebras::parse_algebra(&l, "symbol(1; t1; 2) (*) symbol(p; t2; 2)", &l.standard_bindings());
        if let Ok(t) = triv {
            assert!(matches!(sk1_nontrivial_witness(&t).unwrap(), Sk1Witness::NoConclusion(_)));
        }
    }

    #[test]
    fn comparison_examples() {
        let l = parse_field("Qp(17)((t1))((t2))").unwrap();
        let b = l.standard_bindings();
        let cfg = SymbolPairConfig { field: l.clone(), a: b["u"].clone(), b: b["p"].clone(), n: 2 };
        let rep = comparison_report(&cfg, 1).unwrap();
        assert_eq!(rep.group.order, 2);
        assert_eq!(rep.m_r, vec![(0, 0), (1, 2)]);
        assert_eq!(rep.pi_r, vec![(0, 0), (1, 1), (2, 0), (3, 1)]);
        assert!(rep.m_r_injective && rep.composition_is_period);
        assert!(!rep.pi_tilde_surjective);
    }
}
