//! Exact arithmetic in `F_{p^k}` for odd `p`.
//!
//! Elements are stored as indices: the base-`p` digits of the index are the
//! coefficients (low degree first) of the residue modulo a fixed monic
//! irreducible polynomial. Index 0 is zero and index 1 is one. Multiplication
//! goes through log/antilog tables built from a fixed generator.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted by [`FieldSpec::new`].
pub const DEFAULT_MAX_ORDER: u64 = 1 << 20;

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A non-principal additive character `e(x) = exp(2 pi i tr(x) / p)`.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub values: Vec<Complex64>,
}

impl CharacterTable {
    #[inline]
    pub fn eval(&self, x: FieldElement) -> Complex64 {
        self.values[x.index()]
    }
}

struct Inner {
    p: u32,
    k: u32,
    order: u32,
    modulus: Vec<u32>,
    generator: FieldElement,
    log: Vec<u32>,
    exp: Vec<u32>,
    trace: Vec<u32>,
    character: CharacterTable,
    // e(a * b) for all a, b; built on first use by the transforms.
    product_characters: OnceLock<Vec<Complex64>>,
}

/// A concrete finite field. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.0.p)
            .field("k", &self.0.k)
            .field("modulus", &self.0.modulus)
            .field("generator", &self.0.generator)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.k == other.0.k)
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomials over F_p, coefficients low degree first, no trailing zeros.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_pow(m[dm] as u64, p as u64 - 2, p as u64);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = (*r.last().unwrap() as u64 * lead_inv) % p as u64;
        for (i, &mi) in m.iter().enumerate() {
            let sub = (c * mi as u64) % p as u64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Monic polynomial of the given degree whose lower coefficients are the
/// base-`p` digits of `code` (low degree first).
fn monic_from_code(code: u64, degree: u32, p: u32) -> Vec<u32> {
    let mut c = code;
    let mut out = Vec::with_capacity(degree as usize + 1);
    for _ in 0..degree {
        out.push((c % p as u64) as u32);
        c /= p as u64;
    }
    out.push(1);
    out
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = (m.len() - 1) as u32;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for code in 0..count {
            let f = monic_from_code(code, d, p);
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible of degree `k`, with the
/// lower coefficients compared low degree first.
fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(k);
    for rank in 0..count {
        // c_0 is the most significant digit of `rank`.
        let mut coeffs = vec![0u32; k as usize + 1];
        let mut r = rank;
        for i in (0..k as usize).rev() {
            coeffs[i] = (r % p as u64) as u32;
            r /= p as u64;
        }
        coeffs[k as usize] = 1;
        if coeffs[0] != 0 && is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

impl FieldSpec {
    pub fn new(p: u32, k: u32) -> Result<Self> {
        Self::with_max_order(p, k, DEFAULT_MAX_ORDER)
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn with_max_order(p: u32, k: u32, max_order: u64) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        let order = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if order > max_order || order > u32::MAX as u64 {
            return Err(Error::DegreeTooLarge {
                order,
                max: max_order,
            });
        }
        let order = order as u32;
        let modulus = smallest_irreducible(p, k);

        let digits = |mut x: u32| -> Vec<u32> {
            let mut d = Vec::with_capacity(k as usize);
            for _ in 0..k {
                d.push(x % p);
                x /= p;
            }
            d
        };
        let pack = |d: &[u32]| -> u32 {
            let mut x = 0u32;
            for &c in d.iter().rev() {
                x = x * p + c;
            }
            x
        };
        let mul_poly = |a: u32, b: u32| -> u32 {
            let da = digits(a);
            let db = digits(b);
            let mut prod = vec![0u64; 2 * k as usize];
            for (i, &x) in da.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
                }
            }
            let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
            let mut r = poly_rem(&prod, &modulus, p);
            r.resize(k as usize, 0);
            pack(&r)
        };

        // Smallest index whose multiplicative order is order - 1.
        let group = order - 1;
        let mut generator = None;
        let mut exp = Vec::new();
        for cand in 1..order {
            exp.clear();
            let mut x = 1u32;
            let mut steps = 0u32;
            loop {
                exp.push(x);
                x = mul_poly(x, cand);
                steps += 1;
                if x == 1 || steps > group {
                    break;
                }
            }
            if steps == group {
                generator = Some(FieldElement(cand));
                break;
            }
        }
        let generator = generator.expect("multiplicative group is cyclic");
        let mut log = vec![0u32; order as usize];
        for (i, &x) in exp.iter().enumerate() {
            log[x as usize] = i as u32;
        }

        // Trace is F_p-linear: tabulate it on the monomial basis first.
        let pow_idx = |base: u32, e: u64| -> u32 {
            if base == 0 {
                return if e == 0 { 1 } else { 0 };
            }
            let l = (log[base as usize] as u64 * (e % group as u64)) % group as u64;
            exp[l as usize]
        };
        let add_idx = |a: u32, b: u32| -> u32 {
            let da = digits(a);
            let db = digits(b);
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            pack(&s)
        };
        let mut basis_trace = Vec::with_capacity(k as usize);
        for i in 0..k {
            let b = p.pow(i);
            let mut acc = 0u32;
            let mut conj = b;
            for _ in 0..k {
                acc = add_idx(acc, conj);
                conj = pow_idx(conj, p as u64);
            }
            debug_assert!(acc < p, "trace lands in the prime subfield");
            basis_trace.push(acc);
        }
        let mut trace = vec![0u32; order as usize];
        for (x, slot) in trace.iter_mut().enumerate() {
            let d = digits(x as u32);
            let t: u64 = d
                .iter()
                .zip(&basis_trace)
                .map(|(&c, &t)| c as u64 * t as u64)
                .sum();
            *slot = (t % p as u64) as u32;
        }

        let roots: Vec<Complex64> = (0..p)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / p as f64))
            .collect();
        let character = CharacterTable {
            values: trace.iter().map(|&t| roots[t as usize]).collect(),
        };

        Ok(FieldSpec(Arc::new(Inner {
            p,
            k,
            order,
            modulus,
            generator,
            log,
            exp,
            trace,
            character,
            product_characters: OnceLock::new(),
        })))
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.k
    }

    /// `|F| = p^k`.
    #[inline]
    pub fn order(&self) -> u32 {
        self.0.order
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.0.order as usize
    }

    /// Coefficients of the monic modulus, low degree first, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.0.generator
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.0.order).map(FieldElement)
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.0.order {
            Ok(FieldElement(index))
        } else {
            Err(Error::InvalidInput(format!(
                "index {index} out of range for a field of order {}",
                self.0.order
            )))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let p = self.0.p as i64;
        FieldElement(n.rem_euclid(p) as u32)
    }

    /// Integer lift in `0..p` of an element of the prime subfield.
    pub fn prime_lift(&self, a: FieldElement) -> Option<u32> {
        (a.0 < self.0.p).then_some(a.0)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.0.p;
        if self.0.k == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.0.k {
            let s = (x % p + y % p) % p;
            out += s * place;
            place = place.wrapping_mul(p);
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.0.p;
        if self.0.k == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.0.k {
            let d = x % p;
            out += ((p - d) % p) * place;
            place = place.wrapping_mul(p);
            x /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let g = self.0.order - 1;
        let l = self.0.log[a.index()] + self.0.log[b.index()];
        FieldElement(self.0.exp[(if l >= g { l - g } else { l }) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = self.0.order - 1;
        let l = self.0.log[a.index()];
        Ok(FieldElement(self.0.exp[((g - l) % g) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let g = (self.0.order - 1) as u64;
        let l = (self.0.log[a.index()] as u64 * (e % g)) % g;
        FieldElement(self.0.exp[l as usize])
    }

    /// Discrete logarithm with respect to [`FieldSpec::generator`].
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (!a.is_zero()).then(|| self.0.log[a.index()])
    }

    pub fn is_square(&self, a: FieldElement) -> bool {
        a.is_zero() || self.0.log[a.index()].is_multiple_of(2)
    }

    /// All square roots of `a`, in increasing index order.
    pub fn square_roots(&self, a: FieldElement) -> Vec<FieldElement> {
        if a.is_zero() {
            return vec![FieldElement::ZERO];
        }
        let l = self.0.log[a.index()];
        if !l.is_multiple_of(2) {
            return Vec::new();
        }
        let r = FieldElement(self.0.exp[(l / 2) as usize]);
        let s = self.neg(r);
        let mut out = vec![r, s];
        out.sort();
        out
    }

    /// `Q`: the non-zero squares, in increasing index order.
    pub fn nonzero_squares(&self) -> Vec<FieldElement> {
        self.elements()
            .filter(|&a| !a.is_zero() && self.is_square(a))
            .collect()
    }

    /// `a -> a^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.0.p as u64)
    }

    /// Absolute trace `a + a^p + ... + a^(p^(k-1))`, an element of the prime subfield.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.0.trace[a.index()])
    }

    /// Non-trivial involution fixing the index-2 subfield (`k = 2` only).
    pub fn conj(&self, a: FieldElement) -> Result<FieldElement> {
        if self.0.k != 2 {
            return Err(Error::NotQuadraticExtension(self.0.k));
        }
        Ok(self.frobenius(a))
    }

    /// `(a - conj(a)) / 2`, defined for quadratic extensions.
    pub fn im_part(&self, a: FieldElement) -> Result<FieldElement> {
        let c = self.conj(a)?;
        let two = self.from_int(2);
        self.div(self.sub(a, c), two)
    }

    pub fn character(&self) -> &CharacterTable {
        &self.0.character
    }

    #[inline]
    pub fn e(&self, x: FieldElement) -> Complex64 {
        self.0.character.values[x.index()]
    }

    /// Row-major `|F| x |F|` table of `e(a b)`.
    pub fn product_characters(&self) -> &[Complex64] {
        self.0.product_characters.get_or_init(|| {
            let q = self.size();
            let mut table = Vec::with_capacity(q * q);
            for a in self.elements() {
                for b in self.elements() {
                    table.push(self.e(self.mul(a, b)));
                }
            }
            table
        })
    }

    pub fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        a.iter().zip(b).fold(FieldElement::ZERO, |acc, (&x, &y)| {
            self.add(acc, self.mul(x, y))
        })
    }

    pub fn add_vec(&self, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(&self, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    pub fn scale_vec(&self, c: FieldElement, a: &[FieldElement]) -> Vec<FieldElement> {
        a.iter().map(|&x| self.mul(c, x)).collect()
    }

    /// `-1` is a square iff `|F| = 1 (mod 4)`.
    pub fn minus_one_is_square(&self) -> bool {
        self.is_square(self.neg(FieldElement::ONE))
    }

    /// Little-endian mixed-radix index of a point of `F^n`.
    pub fn point_index(&self, coords: &[FieldElement]) -> usize {
        let q = self.size();
        coords
            .iter()
            .rev()
            .fold(0usize, |acc, c| acc * q + c.index())
    }

    pub fn point_coords(&self, mut index: usize, n: usize) -> Vec<FieldElement> {
        let q = self.size();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(FieldElement((index % q) as u32));
            index /= q;
        }
        out
    }

    pub fn space_size(&self, n: usize) -> usize {
        self.size().pow(n as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = FieldSpec::prime(7).unwrap();
        assert_eq!(f.order(), 7);
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.mul(FieldElement(3), FieldElement(5)), FieldElement(1));
        assert_eq!(f.inv(FieldElement(0)), Err(Error::DivisionByZero));
        assert_eq!(f.generator(), FieldElement(3));
        for a in f.elements() {
            assert_eq!(f.trace(a), a);
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldSpec::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldSpec::new(2, 3).unwrap_err(), Error::EvenCharacteristic);
        assert!(matches!(
            FieldSpec::new(3, 30),
            Err(Error::DegreeTooLarge { .. })
        ));
        assert_eq!(FieldSpec::new(3, 0).unwrap_err(), Error::ZeroDegree);
    }

    #[test]
    fn f9_uses_x_squared_plus_one() {
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        // x has index 3 (digits [0, 1]); x * x = -1 = 2.
        let x = FieldElement(3);
        assert_eq!(f.mul(x, x), FieldElement(2));
        // tr(x) = x + x^3 = 0.
        assert_eq!(f.trace(x), FieldElement::ZERO);
        let trace_zero = f.elements().filter(|&a| f.trace(a).is_zero()).count();
        assert_eq!(trace_zero, 3);
        for a in f.elements().filter(|&a| f.trace(a).is_zero()) {
            assert!((f.e(a) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn squares_in_f7() {
        let f = FieldSpec::prime(7).unwrap();
        assert!(!f.is_square(FieldElement(6)));
        assert_eq!(
            f.square_roots(FieldElement(4)),
            vec![FieldElement(2), FieldElement(5)]
        );
        assert_eq!(f.square_roots(FieldElement(0)), vec![FieldElement(0)]);
        assert!(f.square_roots(FieldElement(3)).is_empty());
        assert!(!f.minus_one_is_square());
        assert!(FieldSpec::prime(5).unwrap().minus_one_is_square());
    }

    #[test]
    fn quadratic_extension_involution() {
        let f = FieldSpec::new(3, 2).unwrap();
        for a in f.elements() {
            let c = f.conj(a).unwrap();
            assert_eq!(f.conj(c).unwrap(), a);
            let in_subfield = a.0 < 3;
            assert_eq!(f.im_part(a).unwrap().is_zero(), in_subfield);
            assert_eq!(c == a, in_subfield);
        }
        let f7 = FieldSpec::prime(7).unwrap();
        assert_eq!(
            f7.im_part(FieldElement(2)),
            Err(Error::NotQuadraticExtension(1))
        );
    }

    #[test]
    fn f3_character_values() {
        let f = FieldSpec::prime(3).unwrap();
        let w = Complex64::from_polar(1.0, TAU / 3.0);
        assert!((f.e(FieldElement(0)) - 1.0).norm() < 1e-15);
        assert!((f.e(FieldElement(1)) - w).norm() < 1e-15);
        assert!((f.e(FieldElement(2)) - w * w).norm() < 1e-15);
    }

    #[test]
    fn point_index_is_little_endian() {
        let f = FieldSpec::prime(5).unwrap();
        let pt = [FieldElement(2), FieldElement(3), FieldElement(1)];
        assert_eq!(f.point_index(&pt), 2 + 3 * 5 + 25);
        assert_eq!(f.point_coords(2 + 3 * 5 + 25, 3), pt.to_vec());
    }
}
