//! Integer helpers shared by the field and form code.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_prime::nt_funcs;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(big(n), big(d))
}

pub fn rat_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m` when it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = BigInt::from(a).extended_gcd(&BigInt::from(m));
    if !g.gcd.is_one() {
        return None;
    }
    let x = g.x.mod_floor(&BigInt::from(m));
    x.to_u64()
}

pub fn is_prime(n: u64) -> bool {
    nt_funcs::is_prime64(n)
}

/// Prime factorisation of a machine integer, sorted by prime.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    if n <= 1 {
        return Vec::new();
    }
    nt_funcs::factorize64(n)
        .into_iter()
        .map(|(p, e)| (p, e as u32))
        .collect()
}

/// `Some((p, e))` when `q = p^e` with `e >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = factor_u64(q);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

/// Prime factorisation of a big integer. Returns `None` if some cofactor
/// could not be split within the factoring budget.
pub fn factor_big(n: &BigUint) -> Option<BTreeMap<BigUint, u32>> {
    let mut out = BTreeMap::new();
    if n <= &BigUint::one() {
        return Some(out);
    }
    let mut rest = n.clone();
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let bp = BigUint::from(p);
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            *out.entry(bp.clone()).or_insert(0) += 1;
        }
    }
    if rest.is_one() {
        return Some(out);
    }
    let (found, unsplit) = nt_funcs::factors(rest, None);
    if unsplit.is_some_and(|v| !v.is_empty()) {
        return None;
    }
    for (p, e) in found {
        *out.entry(p).or_insert(0) += e as u32;
    }
    Some(out)
}

/// `(v, u)` with `n = p^v * u` and `p` not dividing `u`. `n` must be nonzero.
pub fn split_val(n: &BigInt, p: u64) -> (i64, BigInt) {
    let bp = BigInt::from(p);
    let mut v = 0;
    let mut u = n.clone();
    while !u.is_zero() && (&u % &bp).is_zero() {
        u /= &bp;
        v += 1;
    }
    (v, u)
}

/// p-adic valuation of a nonzero rational.
pub fn rat_val(r: &BigRational, p: u64) -> i64 {
    split_val(r.numer(), p).0 - split_val(r.denom(), p).0
}

/// Unit part of a nonzero rational reduced modulo `p^k`, as a residue in `[0, p^k)`.
pub fn rat_unit_mod(r: &BigRational, p: u64, k: u32) -> BigInt {
    let (_, n) = split_val(r.numer(), p);
    let (_, d) = split_val(r.denom(), p);
    let m = BigInt::from(p).pow(k);
    let di = big_inv_mod(&d, &m).expect("unit denominator");
    (n * di).mod_floor(&m)
}

pub fn big_inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.mod_floor(m).extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Legendre symbol `(a/p)` for an odd prime `p` and `a` prime to `p`.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest generator of the cyclic group `F_p^x`.
pub fn primitive_root_mod(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let fs = factor_u64(p - 1);
    (2..p)
        .find(|&g| fs.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("prime modulus")
}

/// Discrete logarithm of `x` to base `g` in `F_p^x`, by baby-step giant-step.
pub fn dlog_mod(g: u64, x: u64, p: u64) -> Option<u64> {
    let n = p - 1;
    let m = (n as f64).sqrt().ceil() as u64 + 1;
    let mut table = std::collections::HashMap::new();
    let mut cur = 1u64;
    for j in 0..m {
        table.entry(cur).or_insert(j);
        cur = mul_mod(cur, g, p);
    }
    let factor = pow_mod(inv_mod(g, p)?, m, p);
    let mut gamma = x % p;
    for i in 0..=m {
        if let Some(&j) = table.get(&gamma) {
            return Some((i * m + j) % n);
        }
        gamma = mul_mod(gamma, factor, p);
    }
    None
}

/// Residue of a nonzero rational unit at `p`, reduced to `[0, p)`.
pub fn rat_residue(r: &BigRational, p: u64) -> u64 {
    rat_unit_mod(r, p, 1).to_u64().expect("small residue")
}

/// Squarefree part of a nonzero integer together with the sign.
pub fn squarefree_part(n: &BigInt) -> Option<BigInt> {
    let f = factor_big(n.magnitude())?;
    let mut out = BigInt::one();
    for (p, e) in f {
        if e % 2 == 1 {
            out *= BigInt::from_biguint(Sign::Plus, p);
        }
    }
    if n.is_negative() {
        out = -out;
    }
    Some(out)
}

/// Exact integer `n`-th root when it exists.
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return exact_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    if r.pow(k) == *n {
        Some(r)
    } else {
        None
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

fn small_primes() -> &'static [u64] {
    static PRIMES: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    PRIMES.get_or_init(|| {
        let bound = 1usize << 15;
        let mut sieve = vec![true; bound];
        let mut out = Vec::new();
        for i in 2..bound {
            if sieve[i] {
                out.push(i as u64);
                for j in (i * i..bound).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        out
    })
}

fn remove_factor(n: &mut BigUint, d: &BigUint) -> u32 {
    let mut e = 0;
    while (&*n % d).is_zero() {
        *n /= d;
        e += 1;
    }
    e
}

/// Primes dividing some `num·den` to an odd power. Small primes are found by trial
/// division; the remaining cofactors are refined into a pairwise coprime base and
/// only base elements occurring to an odd power are factored.
pub fn odd_primes_of(values: &[BigRational]) -> Option<Vec<BigUint>> {
    let mut set = std::collections::BTreeSet::new();
    let mut hard: Vec<BigUint> = Vec::new();
    for v in values {
        let mut n = (v.numer() * v.denom()).magnitude().clone();
        if n.is_zero() {
            continue;
        }
        for &p in small_primes() {
            let bp = BigUint::from(p);
            if n.is_one() {
                break;
            }
            if remove_factor(&mut n, &bp) % 2 == 1 {
                set.insert(bp);
            }
        }
        if !n.is_one() {
            hard.push(n);
        }
    }
    let mut base: Vec<BigUint> = hard.clone();
    base.sort();
    base.dedup();
    'refine: loop {
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if !g.is_one() {
                    let (a, b) = (&base[i] / &g, &base[j] / &g);
                    base.remove(j);
                    base.remove(i);
                    for x in [a, b, g] {
                        if !x.is_one() && !base.contains(&x) {
                            base.push(x);
                        }
                    }
                    continue 'refine;
                }
            }
        }
        break;
    }
    for b in base {
        let odd = hard.iter().any(|h| remove_factor(&mut h.clone(), &b) % 2 == 1);
        if !odd {
            continue;
        }
        for (p, _) in factor_big(&b)? {
            set.insert(p);
        }
    }
    Some(set.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(121), Some((11, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(7), Some((7, 1)));
    }

    #[test]
    fn dlog_roundtrip() {
        let p = 251;
        let g = primitive_root_mod(p);
        for x in 1..p {
            let k = dlog_mod(g, x, p).unwrap();
            assert_eq!(pow_mod(g, k, p), x);
        }
    }

    #[test]
    fn valuations() {
        let r = rat(50, 3);
        assert_eq!(rat_val(&r, 5), 2);
        assert_eq!(rat_val(&r, 3), -1);
        assert_eq!(rat_unit_mod(&r, 5, 1), big(4));
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(&big(-72)), Some(big(-2)));
        assert_eq!(exact_root(&big(-27), 3), Some(big(-3)));
        assert_eq!(exact_root(&big(26), 3), None);
    }
}
