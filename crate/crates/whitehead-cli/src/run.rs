//! Verb handlers producing report payloads.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use whitehead::algebras::{self, Algebra};
use whitehead::forms::{self, LevelCertificate, PFISTER_CONVENTION};
use whitehead::invariants::{self, Certificate, PlatonovConfig, Provenance, Sk1Witness};
use whitehead::ktheory::{self, ZeroDecision, RESIDUE_CONVENTION};
use whitehead::wittvec::{self, LiftDatum, WittRing, WittVector};
use whitehead::{arith, parse_field, Elem, Error, FieldTower};

use crate::{usage, BoundsArgs, Cli, Command, Failure, InvariantCmd, Outcome, WittOp};

type Res = std::result::Result<Outcome, Failure>;

pub fn verb(c: &Command) -> &'static str {
    match c {
        Command::Sk1 { .. } => "sk1",
        Command::Invariant { .. } => "invariant",
        Command::Residue { .. } => "residue",
        Command::Form { .. } => "form",
        Command::Wittvec { .. } => "wittvec",
        Command::Lift { .. } => "lift",
        Command::Bounds(_) => "bounds",
        Command::Centre { .. } => "centre",
        Command::Selftest => "selftest",
    }
}

pub fn dispatch(cli: &Cli) -> Res {
    match &cli.cmd {
        Command::Sk1 { config } => sk1(config),
        Command::Invariant { which: InvariantCmd::Kmrt { algebra, field, element, involution } } => {
            kmrt(algebra, field, element, *involution, cli.seed)
        }
        Command::Residue { field, symbol, modulus, at } => residue(field, symbol, *modulus, at),
        Command::Form { expr, field, bind } => form(expr, field, bind),
        Command::Wittvec { p, l, q, op, lhs, rhs } => wittvec_op(*p, *l, q.unwrap_or(*p), *op, lhs, rhs),
        Command::Lift { algebra } => lift(algebra),
        Command::Bounds(b) => bounds(b),
        Command::Centre { field, algebra, biquat, zeta } => centre(field, algebra.as_deref(), biquat, zeta),
        Command::Selftest => selftest(cli.seed),
    }
}

fn conventions(extra: &[(&str, String)]) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("pfister_sign".into(), json!(PFISTER_CONVENTION));
    m.insert("residue_sign".into(), json!(RESIDUE_CONVENTION));
    for (k, v) in extra {
        m.insert((*k).into(), json!(v));
    }
    Value::Object(m)
}

fn cert_json(what: &str, c: &Certificate) -> Value {
    json!({"claim": what, "provenance": c.provenance.to_string(), "detail": c.detail})
}

fn level_json(l: &LevelCertificate) -> Value {
    json!({"level": l.level, "is_zero": l.is_zero, "certified": l.certified, "certificate": l.certificate, "summary": l.describe()})
}

fn level_cert(l: &LevelCertificate) -> Certificate {
    Certificate {
        provenance: if l.certified { Provenance::Computed } else { Provenance::Undecided },
        detail: l.certificate.clone(),
    }
}

fn outcome(input: Value, result: Value, certificates: Vec<Value>, conv: Value, text: String) -> Outcome {
    let undecided = certificates.iter().any(|c| c["provenance"] == "undecided");
    Outcome { input, result, certificates, conventions: conv, text, undecided, failed: false }
}

fn field_of(s: &str) -> std::result::Result<FieldTower, Failure> {
    Ok(parse_field(s)?)
}

fn bindings(f: &FieldTower, extra: &[String]) -> std::result::Result<HashMap<String, Elem>, Failure> {
    let mut b = f.standard_bindings();
    for kv in extra {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("binding '{kv}' is not name=expr")))?;
        let x = f.parse_elem(v, &b)?;
        b.insert(k.trim().to_string(), x);
    }
    Ok(b)
}

// ---- sk1 -------------------------------------------------------------------------

fn sk1(path: &str) -> Res {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| usage(format!("malformed config: {e}")))?;
    let field = match (&doc["field"], &doc["p"]) {
        (Value::String(s), _) => s.clone(),
        (_, Value::Number(p)) => format!("Qp({p})"),
        _ => return Err(usage("config needs \"field\" or \"p\"")),
    };
    let n = doc["n"].as_u64().ok_or_else(|| usage("config needs an integer \"n\""))?;
    let k = field_of(&field)?;
    let (p, _) = k.padic_ground().ok_or_else(|| Failure::from(Error::Unsupported(format!("{k} is not p-adic"))))?;
    let b = k.standard_bindings();
    let get = |key: &str, default: String| -> std::result::Result<Elem, Failure> {
        let s = doc[key].as_str().map(str::to_string).unwrap_or(default);
        Ok(k.parse_elem(&s, &b)?)
    };
    let a1 = get("a1", arith::primitive_root_mod(p).to_string())?;
    let a2 = get("a2", "p".into())?;
    let cfg = PlatonovConfig { k: k.clone(), n, a1: a1.clone(), a2: a2.clone() };
    let r = invariants::sk1_platonov(&cfg)?;
    let input = json!({"field": k.to_string(), "n": n, "a1": k.fmt_elem(&a1), "a2": k.fmt_elem(&a2)});
    let division = match r.division.provenance {
        Provenance::Computed => "computed certificate",
        Provenance::Cited => "cited certificate",
        Provenance::Undecided => "undecided",
    };
    let result = json!({
        "group": r.group,
        "order": r.order,
        "degrees": {"K": r.degrees.0, "K1": r.degrees.1, "K2": r.degrees.2},
        "generator": format!("{}/{}", r.generator.0, r.generator.1),
        "algebra": r.algebra,
        "division": division,
    });
    let text = format!(
        "SK1(A) = {}\n  A = {}\n  [K:k] = {}, [K1:k] = {}, [K2:k] = {}\n  division: {} ({})\n",
        r.group, r.algebra, r.degrees.0, r.degrees.1, r.degrees.2, division, r.division.detail
    );
    Ok(outcome(input, result, vec![cert_json("A is a division algebra", &r.division)], conventions(&[]), text))
}

// ---- invariant kmrt ----------------------------------------------------------------

fn kmrt(algebra: &str, field: &str, element: &str, choice: usize, seed: u64) -> Res {
    let f = field_of(field)?;
    let b = f.standard_bindings();
    let alg = algebras::parse_algebra(&f, algebra, &b)?;
    let sigma = algebras::make_symplectic_involution_with(&alg, choice)?;
    let a = if element == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        alg.sl1_sample(&mut rng)?
    } else {
        alg.parse_elem(element, &b)?
    };
    let r = invariants::kmrt_eval(&alg, &sigma, &a)?;
    let input = json!({
        "algebra": alg.to_string(),
        "field": f.to_string(),
        "element": alg.fmt_elem(&a),
        "involution": choice,
    });
    let form = r.form.as_ref().map(|q| q.fmt());
    let result = json!({
        "hyperbolic_involution": r.hyperbolic,
        "v": r.v.as_ref().map(|v| alg.fmt_elem(v)),
        "v_method": r.v_method,
        "form": form,
        "dimension": r.form.as_ref().map(|q| q.dim()),
        "level": level_json(&r.level),
        "zero_mod_I4": r.vanishes(),
    });
    let text = format!(
        "KMRT invariant of {} in {}\n  involution: {} ({})\n  v: {}\n  Phi_v: {}\n  {}\n",
        alg.fmt_elem(&a),
        alg,
        sigma.label,
        if r.hyperbolic { "hyperbolic" } else { "anisotropic" },
        r.v.as_ref().map(|v| alg.fmt_elem(v)).unwrap_or_else(|| "-".into()),
        form.unwrap_or_else(|| "0".into()),
        r.level.describe()
    );
    Ok(outcome(
        input,
        result,
        vec![cert_json("I-level of Phi_v", &level_cert(&r.level))],
        conventions(&[("involution", sigma.label.clone())]),
        text,
    ))
}

// ---- residue -----------------------------------------------------------------------

fn residue(field: &str, symbol: &str, m: u64, at: &[String]) -> Res {
    let f = field_of(field)?;
    let b = f.standard_bindings();
    let c = ktheory::parse_symbol(&f, symbol, &b, m)?;
    let vars: Vec<String> = if at.is_empty() { f.laurent_vars() } else { at.to_vec() };
    let mut steps = Vec::new();
    let mut text = format!("{} over {f}\n", c.fmt());
    let mut cur = c.clone();
    for v in &vars {
        cur = ktheory::tame_residue(&cur, v)?;
        steps.push(json!({"at": v, "field": cur.base().to_string(), "residue": cur.fmt()}));
        text.push_str(&format!("  residue at {v}: {}\n", cur.fmt()));
    }
    let coords = ktheory::coh_coordinates(&c)?;
    let top = coords.top().map(|t| json!({"path": t.path, "degree": t.degree, "value": t.value.describe()}));
    let decision = coords.decision();
    let (dec, cert) = match &decision {
        ZeroDecision::Zero => ("zero", Certificate { provenance: Provenance::Computed, detail: "all coordinates vanish".into() }),
        ZeroDecision::NonZero => ("nonzero", Certificate { provenance: Provenance::Computed, detail: "nonzero coordinate".into() }),
        ZeroDecision::Undecided(r) => ("undecided", Certificate { provenance: Provenance::Undecided, detail: r.clone() }),
    };
    if let Some(t) = coords.top() {
        text.push_str(&format!("  top coordinate [{}]: {}\n", t.path.join(","), t.value.describe()));
    }
    text.push_str(&format!("  h(c) is {dec}\n"));
    let input = json!({"field": f.to_string(), "symbol": c.fmt(), "mod": m, "at": vars});
    let result = json!({
        "steps": steps,
        "final": cur.fmt(),
        "top_coordinate": top,
        "coordinates": coords.coords.iter().map(|c| json!({"path": c.path, "degree": c.degree, "value": c.value.describe()})).collect::<Vec<_>>(),
        "decision": dec,
    });
    let conv = conventions(&[("chosen_root", coords.chosen_root.clone().unwrap_or_else(|| "none".into()))]);
    Ok(outcome(input, result, vec![cert_json("h(c) = 0 decision", &cert)], conv, text))
}

// ---- form --------------------------------------------------------------------------

fn form(expr: &str, field: &str, bind: &[String]) -> Res {
    let f = field_of(field)?;
    let b = bindings(&f, bind)?;
    let q = forms::parse_form(&f, expr, &b)?;
    let class = forms::witt_class(&q);
    let iso = forms::isotropy(&q)?;
    let kernel = class.anisotropic_kernel()?;
    let inv = forms::form_invariants(&q)?;
    let (level, lcert) = match forms::i_level(&class) {
        Ok(l) => {
            let c = level_cert(&l);
            (Some(l), c)
        }
        Err(Error::Unsupported(r)) => (None, Certificate { provenance: Provenance::Undecided, detail: r }),
        Err(e) => return Err(e.into()),
    };
    let witness = iso.witness.as_ref().map(|w| w.iter().map(|x| f.fmt_elem(x)).collect::<Vec<_>>());
    let input = json!({"field": f.to_string(), "form": q.fmt()});
    let result = json!({
        "dimension": q.dim(),
        "isotropic": iso.isotropic,
        "witness": witness,
        "anisotropic_kernel": kernel.fmt(),
        "invariants": {
            "signed_discriminant": inv.signed_discriminant,
            "signature": inv.signature,
            "hasse": inv.hasse.iter().map(|(p, e)| json!([p, e])).collect::<Vec<_>>(),
            "arf": inv.arf,
        },
        "i_level": level.as_ref().map(level_json),
    });
    let text = format!(
        "{} over {f}\n  dimension {}\n  {} ({})\n  anisotropic kernel: {}\n  {}\n",
        q.fmt(),
        q.dim(),
        if iso.isotropic { "isotropic" } else { "anisotropic" },
        iso.certificate,
        kernel.fmt(),
        level.as_ref().map(|l| l.describe()).unwrap_or_else(|| "I-level undecided".into())
    );
    let certs = vec![
        cert_json("isotropy", &Certificate { provenance: Provenance::Computed, detail: iso.certificate.clone() }),
        cert_json("I-level", &lcert),
    ];
    Ok(outcome(input, result, certs, conventions(&[("hasse", inv.normalization.to_string())]), text))
}

// ---- wittvec -------------------------------------------------------------------------

fn wittvec_op(p: u64, l: usize, q: u64, op: WittOp, lhs: &[String], rhs: &[String]) -> Res {
    let f = FieldTower::finite(q)?;
    if f.characteristic() != p {
        return Err(usage(format!("q = {q} is not a power of p = {p}")));
    }
    let ring = WittRing::new(&f, l)?;
    let parse = |xs: &[String], name: &str| -> std::result::Result<WittVector, Failure> {
        if xs.len() != l {
            return Err(usage(format!("--{name} needs {l} components")));
        }
        Ok(WittVector::new(xs.iter().map(|x| f.parse_elem_plain(x)).collect::<whitehead::Result<_>>()?))
    };
    let x = parse(lhs, "lhs")?;
    let needs_rhs = matches!(op, WittOp::Add | WittOp::Sub | WittOp::Mul);
    let y = if needs_rhs { Some(parse(rhs, "rhs")?) } else { None };
    let out = match op {
        WittOp::Add => ring.add(&x, y.as_ref().unwrap())?,
        WittOp::Sub => ring.sub(&x, y.as_ref().unwrap())?,
        WittOp::Mul => ring.mul(&x, y.as_ref().unwrap())?,
        WittOp::Neg => ring.neg(&x)?,
        WittOp::Frob => ring.frobenius(&x)?,
        WittOp::Wp => ring.wp(&x)?,
    };
    let opname = format!("{op:?}").to_lowercase();
    let input = json!({
        "p": p, "l": l, "q": q, "op": opname,
        "lhs": ring.fmt(&x),
        "rhs": y.as_ref().map(|y| ring.fmt(y)),
    });
    let result = json!({"value": ring.fmt(&out), "components": out.comps.iter().map(|c| f.fmt_elem(c)).collect::<Vec<_>>()});
    let text = match &y {
        Some(y) => format!("{} {opname} {} = {} in W_{l}(F_{q})\n", ring.fmt(&x), ring.fmt(y), ring.fmt(&out)),
        None => format!("{opname} {} = {} in W_{l}(F_{q})\n", ring.fmt(&x), ring.fmt(&out)),
    };
    Ok(outcome(input, result, vec![], conventions(&[]), text))
}

// ---- lift ----------------------------------------------------------------------------

/// Integer entries of `palg(a; b; 2) (*) palg(c; d; 2)`.
fn palg_entries(s: &str) -> std::result::Result<Vec<i64>, Failure> {
    let mut out = Vec::new();
    for fac in s.split("(*)") {
        let fac = fac.trim();
        let inner = fac
            .strip_prefix("palg(")
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| usage(format!("expected palg(a; b; 2), found '{fac}'")))?;
        let parts: Vec<&str> = inner.split(';').map(str::trim).collect();
        if parts.len() != 3 || parts[2] != "2" {
            return Err(usage(format!("expected palg(a; b; 2), found '{fac}'")));
        }
        for x in &parts[..2] {
            out.push(x.parse::<i64>().map_err(|_| usage(format!("lift entries must be integers, found '{x}'")))?);
        }
    }
    if out.len() != 4 {
        return Err(usage("expected two palg factors"));
    }
    Ok(out)
}

fn lift(algebra: &str) -> Res {
    let ints = palg_entries(algebra)?;
    let res = FieldTower::finite(2)?;
    let lf = FieldTower::Rationals;
    let datum = LiftDatum::new(&res, &lf)?;
    let a = algebras::tensor(
        &algebras::p_algebra(&res, &res.int(ints[0]), &res.int(ints[1]))?,
        &algebras::p_algebra(&res, &res.int(ints[2]), &res.int(ints[3]))?,
    )?;
    let lifts = [lf.int(ints[0]), lf.int(ints[1]), lf.int(ints[2]), lf.int(ints[3])];
    let out = wittvec::lift_algebra(&a, &datum, Some(&lifts))?;
    let map: Vec<Value> = out.generator_map.iter().map(|(k, v)| json!([k, v])).collect();
    let input = json!({"algebra": format!("palg({}; {}; 2) (*) palg({}; {}; 2)", ints[0], ints[1], ints[2], ints[3])});
    let result = json!({
        "residue_algebra": a.to_string(),
        "lifted": out.algebra.to_string(),
        "lifted_factors": out.lifted_factors.iter().map(|x| x.labels()).collect::<Vec<_>>(),
        "generator_map": map,
        "relations_verified": out.relations_verified,
    });
    let mut text = format!("{a} over F2 lifts to {} over Q\n", out.algebra);
    for (k, v) in &out.generator_map {
        text.push_str(&format!("  {k} = {v}\n"));
    }
    text.push_str(&format!("  relations verified: {}\n", out.relations_verified));
    let cert = if out.relations_verified {
        Certificate { provenance: Provenance::Computed, detail: "i = 2u+1, j = v is an algebra isomorphism".into() }
    } else {
        Certificate { provenance: Provenance::Undecided, detail: "relations failed".into() }
    };
    Ok(outcome(input, result, vec![cert_json("lift isomorphism", &cert)], conventions(&[("zeta", "-1".into())]), text))
}

// ---- bounds --------------------------------------------------------------------------

fn parse_factors(s: &str) -> std::result::Result<Vec<(u64, u64, u64)>, Failure> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    for tup in cleaned.split("),") {
        let t = tup.trim_start_matches('(').trim_end_matches(')');
        let xs: Vec<u64> = t
            .split(',')
            .map(|x| x.parse::<u64>().map_err(|_| usage(format!("malformed factor '{tup}'"))))
            .collect::<std::result::Result<_, _>>()?;
        if xs.len() != 3 {
            return Err(usage(format!("factor '{tup}' must be (p,ind,per)")));
        }
        out.push((xs[0], xs[1], xs[2]));
    }
    Ok(out)
}

fn bounds(b: &BoundsArgs) -> Res {
    if let Some(n) = b.n {
        if n == 0 {
            return Err(usage("n must be ≥ 1"));
        }
        let nbar = invariants::kahn_bound(n)?;
        let descs = invariants::descriptors(n)?;
        let result = json!({
            "nbar": nbar,
            "descriptors": descs.iter().map(|d| json!({"name": d.name, "value_group": d.value_group, "torsion_bound": d.torsion_bound, "relations": d.relations})).collect::<Vec<_>>(),
        });
        let text = format!("n = {n}: nbar = {nbar}\n");
        return Ok(outcome(json!({"n": n}), result, vec![], conventions(&[]), text));
    }
    let s = b.factors.as_deref().unwrap_or_default();
    let fs = parse_factors(s)?;
    let m = invariants::kahn_torsion(&fs)?;
    let canon = fs.iter().map(|(p, i, e)| format!("({p},{i},{e})")).collect::<Vec<_>>().join(",");
    let text = format!("factors {canon}: m = {m}\n");
    Ok(outcome(json!({"factors": canon}), json!({"m": m}), vec![], conventions(&[]), text))
}

// ---- centre --------------------------------------------------------------------------

fn centre(field: &str, algebra: Option<&str>, biquat: &[String], zeta: &str) -> Res {
    if zeta != "auto" {
        return Err(usage("only --zeta auto is supported"));
    }
    let f = field_of(field)?;
    let b = f.standard_bindings();
    if !biquat.is_empty() {
        if biquat.len() != 4 {
            return Err(usage("--biquat needs a,b,c,d"));
        }
        let xs = biquat.iter().map(|x| f.parse_elem(x, &b)).collect::<whitehead::Result<Vec<_>>>()?;
        let v = invariants::centre_value_biquat(&f, &xs[0], &xs[1], &xs[2], &xs[3])?;
        let input = json!({"field": f.to_string(), "biquat": xs.iter().map(|x| f.fmt_elem(x)).collect::<Vec<_>>()});
        let result = json!({"pfister": v.pfister.fmt(), "level": level_json(&v.level)});
        let text = format!("<<4a+1, b, 4c+1, d>> = {}\n  {}\n", v.pfister.fmt(), v.level.describe());
        return Ok(outcome(input, result, vec![cert_json("class modulo I^4", &v.certificate)], conventions(&[]), text));
    }
    let algebra = algebra.ok_or_else(|| usage("centre needs --algebra or --biquat"))?;
    let alg: Algebra = algebras::parse_algebra(&f, algebra, &b)?;
    let cs = invariants::centre_symbol(&alg)?;
    let w = invariants::sk1_nontrivial_witness(&alg);
    let (wtag, wdetail) = match &w {
        Ok(Sk1Witness::NonTrivial(d)) => ("true", d.clone()),
        Ok(Sk1Witness::NoConclusion(d)) => ("no conclusion", d.clone()),
        Ok(Sk1Witness::Undecided(d)) => ("undecided", d.clone()),
        Err(e) => ("hypothesis violated", e.to_string()),
    };
    let dec = match &cs.decision {
        ZeroDecision::Zero => "zero",
        ZeroDecision::NonZero => "nonzero",
        ZeroDecision::Undecided(_) => "undecided",
    };
    let input = json!({"field": f.to_string(), "algebra": alg.to_string(), "zeta": zeta});
    let result = json!({
        "j": cs.j.describe(),
        "lambda": cs.lambda.as_ref().map(|l| l.describe()),
        "symbol": cs.symbol.fmt(),
        "symbol_modulus": cs.symbol.modulus(),
        "symbol_decision": dec,
        "sk1_nontrivial": wtag,
    });
    let text = format!(
        "rho_Kahn(zeta) = phi[{} * h^4({})]\n  symbol is {dec} ({})\n  SK1(A) != 0: {wtag} ({wdetail})\n",
        cs.j.name,
        cs.symbol.fmt(),
        cs.certificate.detail
    );
    let wcert = Certificate {
        provenance: if wtag == "undecided" { Provenance::Undecided } else { Provenance::Computed },
        detail: wdetail,
    };
    Ok(outcome(
        input,
        result,
        vec![cert_json("h^4({a,b,c,d}) decision", &cs.certificate), cert_json("SK1 witness", &wcert)],
        conventions(&[]),
        text,
    ))
}

// ---- selftest ------------------------------------------------------------------------

fn suite_witt() -> whitehead::Result<bool> {
    let f = FieldTower::finite(2)?;
    let r = WittRing::new(&f, 2)?;
    let all: Vec<(u64, WittVector)> = (0..4)
        .map(|k| (k, r.from_ints(&[(k % 2) as i64, (k / 2) as i64]).unwrap()))
        .collect();
    let val = |w: &WittVector| {
        let a0 = u64::from(!f.is_zero(&w.comps[0]));
        let a1 = u64::from(!f.is_zero(&w.comps[1]));
        (a0 + 2 * a1) % 4
    };
    let iso = |k: u64| {
        let a0 = k % 2;
        let rest = (k - a0) / 2 % 2;
        a0 + 2 * rest
    };
    for (i, x) in &all {
        for (j, y) in &all {
            if val(&r.add(x, y)?) != iso((iso(*i) + iso(*j)) % 4) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn suite_pairing() -> whitehead::Result<bool> {
    for p in [3u64, 5, 7, 11] {
        let f = FieldTower::padic(p)?;
        for a in 1..=12i64 {
            for b in 1..=12i64 {
                let (x, y) = (f.int(a), f.int(b));
                let pair = ktheory::hilbert_pairing(&f, &x, &y, 2)?;
                let q = forms::QuadraticForm::diagonal(&f, vec![x, y, f.int(-1)])?;
                let iso = forms::isotropy(&q)?.isotropic;
                if (pair == 0) != iso {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn suite_kahn() -> whitehead::Result<bool> {
    for n in 1..=200u64 {
        let mut m = n;
        let mut expect = 1;
        let mut d = 2;
        while m > 1 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            if e > 0 {
                expect *= d.pow(e - 1);
            }
            d += 1;
        }
        if invariants::kahn_bound(n)? != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

fn suite_pfaffian(seed: u64) -> whitehead::Result<bool> {
    let f = FieldTower::Rationals;
    let alg = algebras::parse_algebra(&f, "symbol(-1; -1; 2) (*) symbol(2; 5; 2)", &f.standard_bindings())?;
    let s = algebras::make_symplectic_involution(&alg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..5 {
        let x = alg.sample(&mut rng);
        let y = alg.add(&x, &s.apply(&alg, &x));
        let d = algebras::pfaffian_data(&alg, &s, &y)?;
        let nrd = alg.reduced_norm(&y)?;
        if !f.eq(&f.mul(&d.nrp, &d.nrp), &nrd) {
            return Ok(false);
        }
        let trd = alg.reduced_trace(&y)?;
        if !f.eq(&f.scale_int(&d.trp, 2), &trd) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn suite_residue(seed: u64) -> whitehead::Result<bool> {
    use rand::Rng;
    let f = parse_field("F(7)((t))")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..50 {
        let x = f.sample_nonzero(&mut rng);
        let one_minus = f.sub(&f.one(), &x);
        if f.is_zero(&one_minus) {
            continue;
        }
        let m = rng.gen_range(2..=6u64);
        let c = ktheory::KClass::symbol(&f, vec![x, one_minus], m)?;
        if !ktheory::tame_residue(&c, "t")?.normalize().is_trivially_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn selftest(seed: u64) -> Res {
    let suites: Vec<(&str, whitehead::Result<bool>)> = vec![
        ("wittvec: W2(F2) = Z/4", suite_witt()),
        ("ktheory: pairing vs isotropy", suite_pairing()),
        ("invariants: kahn bound vs trial division", suite_kahn()),
        ("algebras: Pfaffian identities", suite_pfaffian(seed)),
        ("ktheory: Steinberg residues", suite_residue(seed)),
    ];
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut failed = false;
    for (name, r) in suites {
        let (ok, detail) = match r {
            Ok(b) => (b, String::new()),
            Err(e) => (false, e.to_string()),
        };
        failed |= !ok;
        text.push_str(&format!("{} {name}{}\n", if ok { "PASS" } else { "FAIL" }, if detail.is_empty() { String::new() } else { format!(" ({detail})") }));
        rows.push(json!({"suite": name, "pass": ok, "detail": detail}));
    }
    let mut o = outcome(json!({"seed": seed}), json!({"suites": rows}), vec![], conventions(&[]), text);
    o.failed = failed;
    Ok(o)
}
