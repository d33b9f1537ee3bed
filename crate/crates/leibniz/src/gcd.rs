//! Integer polynomial gcd kernels.
//!
//! All routines work on the primitive integer term maps stored inside
//! `Polynomial`. The univariate case runs a small-prime modular algorithm
//! (images mod word-sized primes, Chinese remainder reconstruction, trial
//! division to certify) with a primitive-remainder-sequence fallback; the
//! multivariate case recurses on the highest present variable through
//! content/primitive-part splitting and pseudo-division.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{Monomial, ZTerms};

/// Convolution of integer term maps. Multiplying primitives yields a
/// primitive map with positive leading coefficient (Gauss), so callers need
/// no renormalization when the inputs are canonical.
pub(crate) fn zterms_mul(a: &ZTerms, b: &ZTerms) -> ZTerms {
    let mut out = ZTerms::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = ma.mul(mb);
            match out.entry(m) {
                Entry::Occupied(mut e) => {
                    *e.get_mut() += ca * cb;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(ca * cb);
                }
            }
        }
    }
    out
}

/// Exact quotient in Z[t1,...,tm]; `None` when the division is not exact.
pub(crate) fn zterms_exact_div(num: &ZTerms, den: &ZTerms) -> Option<ZTerms> {
    let (dm, dc) = den.iter().next_back()?;
    let mut rem = num.clone();
    let mut quot = ZTerms::new();
    while let Some((rm, rc)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
        let qm = rm.div(dm)?;
        let (qc, r) = rc.div_rem(dc);
        if !r.is_zero() {
            return None;
        }
        for (m, c) in den {
            let mm = qm.mul(m);
            match rem.entry(mm) {
                Entry::Occupied(mut e) => {
                    *e.get_mut() -= &qc * c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(-(&qc * c));
                }
            }
        }
        quot.insert(qm, qc);
    }
    Some(quot)
}

fn positive_lc(mut t: ZTerms) -> ZTerms {
    let negative = t
        .iter()
        .next_back()
        .map(|(_, c)| c.is_negative())
        .unwrap_or(false);
    if negative {
        for c in t.values_mut() {
            *c = -&*c;
        }
    }
    t
}

fn constant_term(nvars: usize, value: BigInt) -> ZTerms {
    let mut t = ZTerms::new();
    t.insert(Monomial::one(nvars), value);
    t
}

/// Gcd over Z of two integer term maps (integer content included).
pub(crate) fn gcd_zterms(a: &ZTerms, b: &ZTerms, nvars: usize) -> ZTerms {
    if a.is_empty() {
        return positive_lc(b.clone());
    }
    if b.is_empty() {
        return positive_lc(a.clone());
    }
    let mut present = vec![false; nvars];
    for m in a.keys().chain(b.keys()) {
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                present[i] = true;
            }
        }
    }
    let vars: Vec<usize> = (0..nvars).filter(|&i| present[i]).collect();
    match vars.len() {
        0 => {
            let ca = a.values().next().unwrap();
            let cb = b.values().next().unwrap();
            constant_term(nvars, ca.gcd(cb))
        }
        1 => {
            let v = vars[0];
            let g = gcd_dense(to_dense(a, v), to_dense(b, v));
            from_dense(&g, v, nvars)
        }
        _ => gcd_multivar(a, b, nvars, *vars.last().unwrap()),
    }
}

// ---------------------------------------------------------------------------
// univariate dense representation

fn to_dense(t: &ZTerms, v: usize) -> Vec<BigInt> {
    let deg = t.keys().map(|m| m.exponents()[v]).max().unwrap_or(0) as usize;
    let mut out = vec![BigInt::zero(); deg + 1];
    for (m, c) in t {
        out[m.exponents()[v] as usize] = c.clone();
    }
    out
}

fn from_dense(coeffs: &[BigInt], v: usize, nvars: usize) -> ZTerms {
    let mut out = ZTerms::new();
    for (e, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            let mut exps = vec![0u32; nvars];
            exps[v] = e as u32;
            out.insert(Monomial::new(exps), c.clone());
        }
    }
    out
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

fn int_content(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn div_coeffs(v: &mut [BigInt], d: &BigInt) {
    if d.is_one() {
        return;
    }
    for c in v.iter_mut() {
        *c = &*c / d;
    }
}

fn positive_dense(mut v: Vec<BigInt>) -> Vec<BigInt> {
    if v.last().map(|c| c.is_negative()).unwrap_or(false) {
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }
    v
}

fn gcd_dense(mut a: Vec<BigInt>, mut b: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() {
        return positive_dense(b);
    }
    if b.is_empty() {
        return positive_dense(a);
    }
    let ca = int_content(&a);
    div_coeffs(&mut a, &ca);
    let cb = int_content(&b);
    div_coeffs(&mut b, &cb);
    let c = ca.gcd(&cb);
    let mut g = gcd_primitive_dense(a, b);
    if !c.is_one() {
        for x in g.iter_mut() {
            *x *= &c;
        }
    }
    positive_dense(g)
}

const MAX_MODULAR_ATTEMPTS: usize = 24;

/// Gcd of primitive dense polynomials, result primitive with positive lead.
fn gcd_primitive_dense(a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    if a.len() == 1 || b.len() == 1 {
        // a primitive constant is a unit
        return vec![BigInt::one()];
    }
    let lc_g = a.last().unwrap().gcd(b.last().unwrap());
    let mut primes = PrimeGen::new();
    let mut modulus = BigInt::zero();
    let mut residues: Vec<BigInt> = Vec::new();
    let mut res_deg = usize::MAX;
    for _ in 0..MAX_MODULAR_ATTEMPTS {
        let p = primes.next_prime();
        let pa = reduce_mod(&a, p);
        let pb = reduce_mod(&b, p);
        if *pa.last().unwrap() == 0 || *pb.last().unwrap() == 0 {
            continue;
        }
        let g = gcd_mod(pa, pb, p);
        if g.len() == 1 {
            // coprime image proves coprime polynomials
            return vec![BigInt::one()];
        }
        let d = g.len() - 1;
        if d > res_deg {
            continue;
        }
        let lcm = lc_g.mod_floor(&BigInt::from(p)).to_u64().unwrap();
        let scaled: Vec<u64> = g.iter().map(|&c| mulmod(c, lcm, p)).collect();
        if d < res_deg {
            residues = scaled.iter().map(|&c| BigInt::from(c)).collect();
            modulus = BigInt::from(p);
            res_deg = d;
        } else {
            crt_combine(&mut residues, &modulus, &scaled, p);
            modulus *= BigInt::from(p);
        }
        let mut cand = symmetric_lift(&residues, &modulus);
        trim(&mut cand);
        if cand.is_empty() || cand.len() != res_deg + 1 {
            continue;
        }
        let cc = int_content(&cand);
        div_coeffs(&mut cand, &cc);
        if divides_dense(&a, &cand) && divides_dense(&b, &cand) {
            return positive_dense(cand);
        }
    }
    prs_dense(a, b)
}

fn crt_combine(residues: &mut [BigInt], modulus: &BigInt, new: &[u64], p: u64) {
    let pb = BigInt::from(p);
    let inv = mod_inverse(modulus, &pb);
    for (r, &n) in residues.iter_mut().zip(new.iter()) {
        let nb = BigInt::from(n);
        let diff = (&nb - &*r).mod_floor(&pb);
        let k = (&diff * &inv).mod_floor(&pb);
        *r += modulus * k;
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(p)
}

fn symmetric_lift(residues: &[BigInt], modulus: &BigInt) -> Vec<BigInt> {
    let half = modulus / 2;
    residues
        .iter()
        .map(|r| {
            if r > &half {
                r - modulus
            } else {
                r.clone()
            }
        })
        .collect()
}

/// Exact divisibility of dense integer polynomials.
fn divides_dense(num: &[BigInt], den: &[BigInt]) -> bool {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dlc = den.last().unwrap();
    let dd = den.len() - 1;
    while rem.len() > dd {
        let rlc = rem.last().unwrap();
        let (q, r) = rlc.div_rem(dlc);
        if !r.is_zero() {
            return false;
        }
        let shift = rem.len() - 1 - dd;
        for (i, dc) in den.iter().enumerate() {
            let idx = shift + i;
            rem[idx] -= &q * dc;
        }
        trim(&mut rem);
    }
    rem.is_empty()
}

/// Primitive remainder sequence over the integers; correctness fallback.
fn prs_dense(mut a: Vec<BigInt>, mut b: Vec<BigInt>) -> Vec<BigInt> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 {
            return vec![BigInt::one()];
        }
        let mut r = prem_dense(&a, &b);
        trim(&mut r);
        if r.is_empty() {
            return positive_dense(b);
        }
        let c = int_content(&r);
        div_coeffs(&mut r, &c);
        a = b;
        b = r;
    }
}

/// Pseudo-remainder: repeatedly eliminates the leading term after scaling by
/// the divisor's leading coefficient.
fn prem_dense(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    trim(&mut r);
    let lb = b.last().unwrap().clone();
    let db = b.len() - 1;
    while r.len() > db {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &lr * bc;
        }
        trim(&mut r);
    }
    r
}

// ---------------------------------------------------------------------------
// modular arithmetic on word-sized primes

fn reduce_mod(v: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut out: Vec<u64> = v
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().unwrap())
        .collect();
    while out.last().map(|&c| c == 0).unwrap_or(false) {
        out.pop();
    }
    out
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Monic gcd of dense polynomials over GF(p).
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    while !b.is_empty() {
        let r = rem_mod(&a, &b, p);
        a = b;
        b = r;
    }
    let inv = invmod(*a.last().unwrap(), p);
    for c in a.iter_mut() {
        *c = mulmod(*c, inv, p);
    }
    a
}

fn rem_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv_lb = invmod(*b.last().unwrap(), p);
    while r.len() > db {
        let lr = *r.last().unwrap();
        if lr != 0 {
            let q = mulmod(lr, inv_lb, p);
            let shift = r.len() - 1 - db;
            for (i, &bc) in b.iter().enumerate() {
                let sub = mulmod(q, bc, p);
                let idx = shift + i;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        while r.last().map(|&c| c == 0).unwrap_or(false) {
            r.pop();
        }
    }
    r
}

/// Odd candidates above 2^62 filtered by deterministic Miller-Rabin.
struct PrimeGen {
    next: u64,
}

impl PrimeGen {
    fn new() -> Self {
        PrimeGen {
            next: (1u64 << 62) + 1,
        }
    }

    fn next_prime(&mut self) -> u64 {
        loop {
            let c = self.next;
            self.next += 2;
            if is_prime_u64(c) {
                return c;
            }
        }
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    // deterministic witness set for the full u64 range
    'witness: for &w in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---------------------------------------------------------------------------
// multivariate recursion

/// Polynomial in one distinguished variable with term-map coefficients; the
/// distinguished exponent is zeroed inside the coefficient monomials.
type Split = BTreeMap<u32, ZTerms>;

fn split_by_var(t: &ZTerms, v: usize) -> Split {
    let mut out = Split::new();
    for (m, c) in t {
        let e = m.exponents()[v];
        let mut exps = m.exponents().to_vec();
        exps[v] = 0;
        out.entry(e)
            .or_insert_with(ZTerms::new)
            .insert(Monomial::new(exps), c.clone());
    }
    out
}

fn unsplit(s: &Split, v: usize) -> ZTerms {
    let mut out = ZTerms::new();
    for (e, coeff) in s {
        for (m, c) in coeff {
            let mut exps = m.exponents().to_vec();
            exps[v] = *e;
            out.insert(Monomial::new(exps), c.clone());
        }
    }
    out
}

fn split_degree(s: &Split) -> u32 {
    *s.keys().next_back().expect("nonzero split")
}

fn split_content(s: &Split, nvars: usize) -> ZTerms {
    let mut g = ZTerms::new();
    for coeff in s.values() {
        g = gcd_zterms(&g, coeff, nvars);
        if g.len() == 1 {
            if let Some((m, c)) = g.iter().next() {
                if m.is_one() && c.is_one() {
                    break;
                }
            }
        }
    }
    g
}

fn split_div_content(s: &Split, content: &ZTerms) -> Split {
    s.iter()
        .map(|(e, coeff)| {
            let q = zterms_exact_div(coeff, content).expect("content divides");
            (*e, q)
        })
        .collect()
}

fn split_scale(s: &Split, factor: &ZTerms) -> Split {
    s.iter()
        .map(|(e, coeff)| (*e, zterms_mul(coeff, factor)))
        .collect()
}

fn split_sub(a: Split, b: &Split) -> Split {
    let mut out = a;
    for (e, coeff) in b {
        let entry = out.entry(*e).or_insert_with(ZTerms::new);
        for (m, c) in coeff {
            match entry.entry(m.clone()) {
                Entry::Occupied(mut oe) => {
                    *oe.get_mut() -= c;
                    if oe.get().is_zero() {
                        oe.remove();
                    }
                }
                Entry::Vacant(ve) => {
                    ve.insert(-c);
                }
            }
        }
        if out.get(e).map(|t| t.is_empty()).unwrap_or(false) {
            out.remove(e);
        }
    }
    out
}

/// Pseudo-remainder of splits in the distinguished variable.
fn split_prem(a: &Split, b: &Split) -> Split {
    let db = split_degree(b);
    let lb = b[&db].clone();
    let mut r = a.clone();
    while !r.is_empty() && split_degree(&r) >= db {
        let dr = split_degree(&r);
        let lr = r[&dr].clone();
        let scaled = split_scale(&r, &lb);
        let mut shifted = Split::new();
        for (e, coeff) in b {
            shifted.insert(e + (dr - db), zterms_mul(coeff, &lr));
        }
        r = split_sub(scaled, &shifted);
    }
    r
}

fn gcd_multivar(a: &ZTerms, b: &ZTerms, nvars: usize, v: usize) -> ZTerms {
    let sa = split_by_var(a, v);
    let sb = split_by_var(b, v);
    let ca = split_content(&sa, nvars);
    let cb = split_content(&sb, nvars);
    let cg = gcd_zterms(&ca, &cb, nvars);
    let mut pa = split_div_content(&sa, &ca);
    let mut pb = split_div_content(&sb, &cb);
    if split_degree(&pa) < split_degree(&pb) {
        std::mem::swap(&mut pa, &mut pb);
    }
    let pp_gcd = loop {
        if split_degree(&pb) == 0 {
            break Split::from([(0u32, constant_term(nvars, BigInt::one()))]);
        }
        let r = split_prem(&pa, &pb);
        if r.is_empty() {
            break pb;
        }
        let rc = split_content(&r, nvars);
        pa = pb;
        pb = split_div_content(&r, &rc);
    };
    positive_lc(zterms_mul(&cg, &unsplit(&pp_gcd, v)))
}
