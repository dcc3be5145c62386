//! Squarefree and irreducible factorization of univariate polynomials.
//!
//! Over `Q`: Yun's squarefree decomposition followed by Zassenhaus
//! (Berlekamp modulo a small prime, Hensel lifting, subset recombination).
//! Over `F_p`: squarefree decomposition with `p`-th roots, then Berlekamp.
//! Over `Q(c)`: squarefree decomposition; squarefree parts of degree two are
//! split by an exact square-root test of the discriminant.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{Field, Rat};
use super::fp::Fp;
use super::poly::{is_one, UniPoly};
use super::quotient::{BaseField, QuotientElem};
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

pub type Factorization<F> = Vec<(UniPoly<F>, usize)>;

/// Fields over which univariate polynomials can be split into irreducibles.
pub trait Factorable: Field {
    /// Monic irreducible factors with multiplicities, in a deterministic
    /// order (by degree, then coefficients). Constants give an empty list.
    fn factor(p: &UniPoly<Self>) -> Result<Factorization<Self>>;
}

/// Orders factors by degree, then by their printed coefficients.
fn sort_factors<F: Field>(mut v: Factorization<F>) -> Factorization<F> {
    v.sort_by_cached_key(|(f, m)| (f.degree().unwrap_or(0), format!("{:?}", f.coeffs()), *m));
    v
}

/// Yun's squarefree decomposition in characteristic zero.
pub fn squarefree_char0<F: Field>(f: &UniPoly<F>) -> Factorization<F> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let f = f.monic();
    let df = f.derivative();
    let a0 = UniPoly::gcd(&f, &df);
    let mut b = f.div_exact(&a0).unwrap();
    let mut c = df.div_exact(&a0).unwrap();
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while !b.is_constant() {
        let a = UniPoly::gcd(&b, &d);
        b = b.div_exact(&a).unwrap();
        c = d.div_exact(&a).unwrap();
        d = &c - &b.derivative();
        if !a.is_constant() {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

// ---------------------------------------------------------------- F_p

fn fp_modulus(f: &UniPoly<Fp>) -> Option<u64> {
    f.coeffs().iter().find_map(|c| c.modulus())
}

/// Squarefree decomposition over `F_p`.
pub fn squarefree_fp(f: &UniPoly<Fp>) -> Factorization<Fp> {
    let Some(p) = fp_modulus(f) else {
        // every coefficient is an unreduced constant: nothing to factor
        return Vec::new();
    };
    let f = f.map(|c| c.clone() + Fp::new(0, p)).monic();
    sqf_fp_rec(&f, p)
}

fn sqf_fp_rec(f: &UniPoly<Fp>, p: u64) -> Factorization<Fp> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let df = f.derivative();
    let mut c = UniPoly::gcd(f, &df);
    let mut w = f.div_exact(&c).unwrap();
    let mut i = 1;
    while !w.is_constant() {
        let y = UniPoly::gcd(&w, &c);
        let fac = w.div_exact(&y).unwrap();
        if !fac.is_constant() {
            out.push((fac, i));
        }
        w = y.clone();
        c = c.div_exact(&y).unwrap();
        i += 1;
    }
    if !c.is_constant() {
        // c is a p-th power; coefficients of F_p are their own p-th roots
        let deg = c.degree().unwrap();
        let root = UniPoly::new((0..=deg / p as usize).map(|k| c.coeff(k * p as usize)).collect());
        for (g, m) in sqf_fp_rec(&root, p) {
            out.push((g, m * p as usize));
        }
    }
    out
}

/// Right kernel of a matrix over a field.
pub fn nullspace<F: Field>(mut m: Vec<Vec<F>>, cols: usize) -> Vec<Vec<F>> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].try_inv().unwrap();
        for j in 0..cols {
            m[r][j] = m[r][j].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    m[i][j] = m[i][j].clone() - f.clone() * m[r][j].clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![F::zero(); cols];
            v[fc] = F::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][fc].clone();
            }
            v
        })
        .collect()
}

/// Berlekamp splitting of a monic squarefree polynomial over `F_p`.
pub fn berlekamp(f: &UniPoly<Fp>, p: u64) -> Vec<UniPoly<Fp>> {
    let n = match f.degree() {
        Some(n) if n >= 2 => n,
        _ => return vec![f.clone()],
    };
    let xp = powmod(&UniPoly::x(), p, f);
    let mut rows = Vec::with_capacity(n);
    let mut cur = UniPoly::one();
    for _ in 0..n {
        rows.push((0..n).map(|j| cur.coeff(j)).collect::<Vec<Fp>>());
        cur = (&cur * &xp).rem(f);
    }
    // kernel of (Q - I)^T
    let mut qt = vec![vec![Fp::new(0, p); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut v = rows[j][i].clone() + Fp::new(0, p);
            if i == j {
                v = v - Fp::new(1, p);
            }
            qt[i][j] = v;
        }
    }
    let basis = nullspace(qt, n);
    let k = basis.len();
    let mut factors = vec![f.clone()];
    if k == 1 {
        return factors;
    }
    for v in basis.iter() {
        let g = UniPoly::new(v.clone());
        if g.is_constant() {
            continue;
        }
        let mut next = Vec::new();
        for h in factors {
            if h.degree() == Some(1) || next.len() + 1 >= k {
                next.push(h);
                continue;
            }
            let mut rest = h;
            for s in 0..p {
                if rest.degree().unwrap_or(0) <= 1 {
                    break;
                }
                let shifted = &g - &UniPoly::constant(Fp::new(s as i64, p));
                let d = UniPoly::gcd(&rest, &shifted);
                if !d.is_constant() && d.degree() != rest.degree() {
                    rest = rest.div_exact(&d).unwrap();
                    next.push(d);
                }
            }
            next.push(rest);
        }
        factors = next;
        if factors.len() == k {
            break;
        }
    }
    factors.into_iter().map(|f| f.monic()).collect()
}

fn powmod<F: Field>(base: &UniPoly<F>, mut e: u64, m: &UniPoly<F>) -> UniPoly<F> {
    let mut acc = UniPoly::one();
    let mut b = base.rem(m);
    while e > 0 {
        if e & 1 == 1 {
            acc = (&acc * &b).rem(m);
        }
        b = (&b * &b).rem(m);
        e >>= 1;
    }
    acc
}

impl Factorable for Fp {
    fn factor(f: &UniPoly<Fp>) -> Result<Factorization<Fp>> {
        let Some(p) = fp_modulus(f) else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for (g, m) in squarefree_fp(f) {
            for h in berlekamp(&g, p) {
                out.push((h, m));
            }
        }
        Ok(sort_factors(out))
    }
}

// ---------------------------------------------------------------- Q

type ZPoly = Vec<BigInt>;

fn zpoly_trim(mut v: ZPoly) -> ZPoly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Primitive integer polynomial with positive leading coefficient.
fn primitive_part(f: &UniPoly<Rat>) -> ZPoly {
    let den = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: ZPoly = f.coeffs().iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: ZPoly = ints.iter().map(|c| c / &g).collect();
    if out.last().is_some_and(|c| c.is_negative()) {
        out = out.into_iter().map(|c| -c).collect();
    }
    out
}

fn to_rat(z: &ZPoly) -> UniPoly<Rat> {
    UniPoly::new(z.iter().map(|c| Rat::from_integer(c.clone())).collect())
}

fn to_fp(z: &ZPoly, p: u64) -> UniPoly<Fp> {
    let pb = BigInt::from(p);
    UniPoly::new(z.iter().map(|c| Fp::Mod { v: c.mod_floor(&pb).to_u64().unwrap(), p }).collect())
}

fn from_fp(f: &UniPoly<Fp>, p: u64) -> ZPoly {
    f.coeffs().iter().map(|c| BigInt::from((c.clone() + Fp::new(0, p)).residue().unwrap())).collect()
}

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    zpoly_trim(out)
}

fn zsub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    zpoly_trim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

fn zadd_scaled(a: &ZPoly, b: &ZPoly, s: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    zpoly_trim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() + s * b.get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

/// Symmetric residues modulo `m`.
fn zsym(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m / 2;
    zpoly_trim(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..2000).filter(|&n| (2..).take_while(|k| k * k <= n).all(|k| n % k != 0))
}

/// Lifts `g * h = f (mod p)` to `mod p^k`. `f`, `g`, `h` monic.
fn hensel_lift(f: &ZPoly, g: &ZPoly, h: &ZPoly, p: u64, k: u32) -> (ZPoly, ZPoly) {
    let gp = to_fp(g, p);
    let hp = to_fp(h, p);
    let (one, s, t) = UniPoly::xgcd(&gp, &hp);
    debug_assert!(is_one(&one));
    let pb = BigInt::from(p);
    let mut g = g.clone();
    let mut h = h.clone();
    let mut m = pb.clone();
    for _ in 1..k {
        let err = zsub(f, &zmul(&g, &h));
        let e: ZPoly = err.iter().map(|c| {
            debug_assert!((c % &m).is_zero());
            c / &m
        }).collect();
        let ep = to_fp(&e, p);
        let (q, r) = (&ep * &t).div_rem(&gp);
        let dg = r;
        let dh = (&(&ep * &s) + &(&q * &hp)).rem(&hp);
        g = zadd_scaled(&g, &from_fp(&dg, p), &m);
        h = zadd_scaled(&h, &from_fp(&dh, p), &m);
        m *= &pb;
    }
    (g, h)
}

fn multi_lift(f: &ZPoly, factors: &[UniPoly<Fp>], p: u64, k: u32) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let m = BigInt::from(p).pow(k);
        return vec![zsym(f, &m)];
    }
    let mid = factors.len() / 2;
    let prod = |fs: &[UniPoly<Fp>]| fs.iter().fold(UniPoly::one(), |acc, x| &acc * x);
    let g = from_fp(&prod(&factors[..mid]), p);
    let h = from_fp(&prod(&factors[mid..]), p);
    let (gl, hl) = hensel_lift(f, &g, &h, p, k);
    let mut out = multi_lift(&gl, &factors[..mid], p, k);
    out.extend(multi_lift(&hl, &factors[mid..], p, k));
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact division over `Z` of monic polynomials.
fn zdiv_exact(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let q = to_rat(a).div_exact(&to_rat(b))?;
    q.coeffs()
        .iter()
        .map(|c| c.is_integer().then(|| c.numer().clone()))
        .collect()
}

/// Irreducible factors of a monic squarefree integer polynomial.
fn zassenhaus_monic(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    let fq = to_rat(f);
    let p = small_primes()
        .find(|&p| {
            let fp = to_fp(f, p);
            fp.degree() == Some(n) && UniPoly::gcd(&fp, &fp.derivative()).is_constant()
        })
        .expect("no good prime below 2000");
    let modular = berlekamp(&to_fp(f, p), p);
    if modular.len() == 1 {
        return vec![f.clone()];
    }
    // coefficient bound for any factor: 2^n * ||f||_2 <= 2^n * (n+1) * max|f_i|
    let maxc = f.iter().map(|c| c.abs()).max().unwrap();
    let bound = (BigInt::one() << n) * BigInt::from(n + 1) * maxc * 2 + 1;
    let mut k = 1u32;
    let pb = BigInt::from(p);
    while pb.pow(k) <= bound {
        k += 1;
    }
    let modulus = pb.pow(k);
    let mut lifted = multi_lift(f, &modular, p, k);
    let mut rest = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut hit = None;
        for s in subsets(lifted.len(), size) {
            let prod = s.iter().fold(vec![BigInt::one()], |acc, &i| zmul(&acc, &lifted[i]));
            let cand = zsym(&prod, &modulus);
            if let Some(q) = zdiv_exact(&rest, &cand) {
                hit = Some((s, cand, q));
                break;
            }
        }
        match hit {
            Some((s, cand, q)) => {
                found.push(cand);
                rest = q;
                lifted = lifted
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !s.contains(i))
                    .map(|(_, x)| x)
                    .collect();
            }
            None => size += 1,
        }
    }
    found.push(rest);
    debug_assert_eq!(found.iter().fold(UniPoly::one(), |acc, x| &acc * &to_rat(x)), fq);
    found
}

/// Irreducible factors over `Q` of a squarefree polynomial, monic.
fn factor_squarefree_q(f: &UniPoly<Rat>) -> Vec<UniPoly<Rat>> {
    let prim = primitive_part(f);
    let n = prim.len() - 1;
    if n <= 1 {
        return vec![f.monic()];
    }
    let a = prim[n].clone();
    // G(y) = a^(n-1) F(y/a) is monic with integer coefficients
    let g: ZPoly = prim
        .iter()
        .enumerate()
        .map(|(i, c)| if i == n { BigInt::one() } else { c * a.pow((n - 1 - i) as u32) })
        .collect();
    zassenhaus_monic(&g)
        .into_iter()
        .map(|h| {
            // H(a z), then make monic over Q
            let back = UniPoly::new(
                h.iter()
                    .enumerate()
                    .map(|(i, c)| Rat::from_integer(c * a.pow(i as u32)))
                    .collect(),
            );
            back.monic()
        })
        .collect()
}

impl Factorable for Rat {
    fn factor(f: &UniPoly<Rat>) -> Result<Factorization<Rat>> {
        let mut out = Vec::new();
        for (g, m) in squarefree_char0(f) {
            for h in factor_squarefree_q(&g) {
                out.push((h, m));
            }
        }
        Ok(sort_factors(out))
    }
}

// ---------------------------------------------------------------- Q(c)

pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rat::new(n, d))
}

fn poly_sqrt(p: &UniPoly<Rat>) -> Option<UniPoly<Rat>> {
    if p.is_zero() {
        return Some(UniPoly::zero());
    }
    let lc = rat_sqrt(&p.lead())?;
    let mut acc = UniPoly::constant(lc);
    for (g, m) in squarefree_char0(p) {
        if m % 2 != 0 {
            return None;
        }
        acc = &acc * &g.pow(m / 2);
    }
    Some(acc)
}

/// Square root in `Q(c)`, if one exists.
pub fn ratfunc_sqrt(x: &RatFunc) -> Option<RatFunc> {
    Some(RatFunc::new(poly_sqrt(x.num())?, poly_sqrt(x.den())?))
}

impl Factorable for RatFunc {
    fn factor(f: &UniPoly<RatFunc>) -> Result<Factorization<RatFunc>> {
        let mut out = Vec::new();
        for (g, m) in squarefree_char0(f) {
            match g.degree() {
                Some(1) => out.push((g, m)),
                Some(2) => {
                    let (a, b, c) = (g.coeff(2), g.coeff(1), g.coeff(0));
                    let disc = b.clone() * b.clone() - RatFunc::from_int(4) * a.clone() * c;
                    match ratfunc_sqrt(&disc) {
                        Some(s) => {
                            let two_a = RatFunc::from_int(2) * a;
                            let r1 = (-b.clone() + s.clone()) / two_a.clone();
                            let r2 = (-b - s) / two_a;
                            out.push((UniPoly::linear_root(r1), m));
                            out.push((UniPoly::linear_root(r2), m));
                        }
                        None => out.push((g, m)),
                    }
                }
                _ => {
                    return Err(Error::Unsupported(
                        "irreducible factorization over Q(c) beyond degree 2".into(),
                    ))
                }
            }
        }
        Ok(sort_factors(out))
    }
}

impl<F: BaseField> Factorable for QuotientElem<F> {
    fn factor(f: &UniPoly<Self>) -> Result<Factorization<Self>> {
        match f.degree() {
            None | Some(0) => Ok(Vec::new()),
            Some(1) => Ok(vec![(f.monic(), 1)]),
            _ => Err(Error::Unsupported("factorization over an algebraic extension".into())),
        }
    }
}

/// Irreducible factorization with multiplicities.
pub fn factor_squarefree_irreducible<F: Factorable>(p: &UniPoly<F>) -> Result<Factorization<F>> {
    F::factor(p)
}

/// Embeds a polynomial over `Q` into an extension `Q[z]/(m)`.
pub fn embed_poly(p: &UniPoly<Rat>, _m: &Arc<UniPoly<Rat>>) -> UniPoly<QuotientElem<Rat>> {
    p.map(|c| QuotientElem::embed(c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::int;

    fn p(c: &[i64]) -> UniPoly<Rat> {
        UniPoly::new(c.iter().map(|&x| int(x)).collect())
    }

    fn product(fs: &Factorization<Rat>) -> UniPoly<Rat> {
        fs.iter().fold(UniPoly::one(), |acc, (f, m)| &acc * &f.pow(*m))
    }

    #[test]
    fn difference_of_squares() {
        let fs = Rat::factor(&p(&[-1, 0, 1])).unwrap();
        assert_eq!(fs, vec![(p(&[-1, 1]), 1), (p(&[1, 1]), 1)]);
    }

    #[test]
    fn monomial_square() {
        assert_eq!(Rat::factor(&p(&[0, 0, 1])).unwrap(), vec![(p(&[0, 1]), 2)]);
    }

    #[test]
    fn z_times_z_minus_one_squared() {
        // oracle: z (z-1)^2 = z^3 - 2z^2 + z
        let expanded = &p(&[0, 1]) * &(&p(&[-1, 1]) * &p(&[-1, 1]));
        assert_eq!(expanded, p(&[0, 1, -2, 1]));
        let fs = Rat::factor(&expanded).unwrap();
        assert_eq!(fs, vec![(p(&[-1, 1]), 2), (p(&[0, 1]), 1)]);
    }

    #[test]
    fn constant_gives_empty() {
        assert!(Rat::factor(&p(&[5])).unwrap().is_empty());
    }

    #[test]
    fn swinnerton_dyer_like_quartic_is_irreducible() {
        // x^4 - 10x^2 + 1 splits modulo every prime but is irreducible over Q
        let f = p(&[1, 0, -10, 0, 1]);
        assert_eq!(Rat::factor(&f).unwrap(), vec![(f.clone(), 1)]);
    }

    #[test]
    fn non_monic_product_of_quadratics() {
        let a = p(&[1, 0, 3]);
        let b = p(&[2, 5, 7]);
        let f = &(&a * &b) * &p(&[3, 2]);
        let fs = Rat::factor(&f).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(product(&fs), f.monic());
    }

    #[test]
    fn berlekamp_mod_five() {
        // x^4 - 1 = (x-1)(x-2)(x-3)(x-4) mod 5
        let f = UniPoly::new(vec![Fp::new(-1, 5), Fp::new(0, 5), Fp::new(0, 5), Fp::new(0, 5), Fp::new(1, 5)]);
        let fs = Fp::factor(&f).unwrap();
        assert_eq!(fs.len(), 4);
        assert!(fs.iter().all(|(g, m)| g.degree() == Some(1) && *m == 1));
    }

    #[test]
    fn fp_pth_power_is_detected() {
        // (x + 1)^5 = x^5 + 1 mod 5
        let f = UniPoly::new(vec![Fp::new(1, 5), Fp::new(0, 5), Fp::new(0, 5), Fp::new(0, 5), Fp::new(0, 5), Fp::new(1, 5)]);
        let fs = Fp::factor(&f).unwrap();
        assert_eq!(fs, vec![(UniPoly::new(vec![Fp::new(1, 5), Fp::new(1, 5)]), 5)]);
    }

    #[test]
    fn ratfunc_quadratic_splits_when_disc_is_square() {
        let c = RatFunc::var();
        // (z - c)(z + 1) = z^2 + (1 - c) z - c
        let f = UniPoly::new(vec![-c.clone(), RatFunc::one() - c.clone(), RatFunc::one()]);
        let fs = RatFunc::factor(&f).unwrap();
        assert_eq!(fs.len(), 2);
        // z^2 - c stays irreducible
        let g = UniPoly::new(vec![-c, RatFunc::zero(), RatFunc::one()]);
        assert_eq!(RatFunc::factor(&g).unwrap(), vec![(g.clone(), 1)]);
    }
}
