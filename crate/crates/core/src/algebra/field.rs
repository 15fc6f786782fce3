//! Finite fields F_q for prime powers q ≤ 32, backed by dense lookup tables.
//!
//! An element is an integer `n` in `0..q`; the base-p digits of `n` (least
//! significant first) are the coefficients of a polynomial over F_p, reduced
//! modulo the lexicographically smallest monic irreducible polynomial of
//! degree e (coefficients compared from the constant term upward).

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_Q: u32 = 32;

struct Tables {
    q: u32,
    p: u32,
    e: u32,
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Arithmetic context for F_q. Cheap to clone; the tables are shared.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.q == other.0.q
    }
}

impl Eq for Field {}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0.q)
    }
}

/// Splits `q` as `p^e` with `p` prime, or returns `None`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Polynomials over F_p as coefficient vectors, low degree first.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = dr - dm + i;
                r[idx] = (r[idx] + p * p - c * mi % p) % p;
            }
        }
        r.pop();
        if r.is_empty() {
            r.push(0);
        }
    }
    poly_trim(r)
}

fn mod_inv(a: u32, p: u32) -> u32 {
    (1..p).find(|x| a * x % p == 1).expect("nonzero element of a prime field")
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    // A reducible polynomial has a monic factor of degree at most deg/2.
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        for low in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut x = low;
            for _ in 0..d {
                g.push((x % p as usize) as u32);
                x /= p as usize;
            }
            g.push(1);
            let r = poly_rem(f, &g, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

fn canonical_modulus(p: u32, e: u32) -> Vec<u32> {
    // Enumerate (c_0, ..., c_{e-1}) with c_0 most significant.
    let count = (p as usize).pow(e);
    for idx in 0..count {
        let mut coeffs = vec![0u32; e as usize + 1];
        let mut x = idx;
        for i in (0..e as usize).rev() {
            coeffs[i] = (x % p as usize) as u32;
            x /= p as usize;
        }
        coeffs[e as usize] = 1;
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

fn encode(poly: &[u32], p: u32) -> u8 {
    poly.iter().rev().fold(0u32, |acc, &c| acc * p + c) as u8
}

fn decode(mut n: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = n % p;
            n /= p;
            d
        })
        .collect()
}

impl Field {
    /// Builds F_q. Fails for non prime powers and for q > 32.
    pub fn new(q: u32) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NotAPrimePower(q))?;
        if q > MAX_Q {
            return Err(Error::UnsupportedSize(q));
        }
        let modulus = canonical_modulus(p, e);
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let pa = decode(a, p, e);
            for b in 0..q {
                let pb = decode(b, p, e);
                let sum: Vec<u32> = pa.iter().zip(&pb).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = encode(&sum, p);
                let mut prod = vec![0u32; 2 * e as usize - 1];
                for (i, x) in pa.iter().enumerate() {
                    for (j, y) in pb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&poly_trim(prod), &modulus, p);
                r.resize(e as usize, 0);
                mul[(a * q + b) as usize] = encode(&r, p);
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap() as u8)
            .collect();
        let inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap() as u8
                }
            })
            .collect();
        Ok(Field(Arc::new(Tables {
            q,
            p,
            e,
            modulus: modulus.iter().map(|&c| c as u8).collect(),
            add,
            mul,
            neg,
            inv,
        })))
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.0.q as usize
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.e
    }

    /// Coefficients of the defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u8] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.0.add[a as usize * self.order() + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.0.mul[a as usize * self.order() + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.0.neg[a as usize]
    }

    /// Multiplicative inverse; `inv(0)` is 0 by convention.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.0.inv[a as usize]
    }

    pub fn pow(&self, a: u8, mut n: u64) -> u8 {
        let mut base = a;
        let mut acc = 1u8;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.0.q as u8
    }

    pub fn nonzero(&self) -> impl Iterator<Item = u8> {
        1..self.0.q as u8
    }

    #[inline]
    pub fn dot(&self, a: &[u8], b: &[u8]) -> u8 {
        a.iter()
            .zip(b)
            .fold(0u8, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// `y += c * x`, coordinatewise.
    #[inline]
    pub fn axpy(&self, y: &mut [u8], c: u8, x: &[u8]) {
        if c == 0 {
            return;
        }
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.add(*yi, self.mul(c, xi));
        }
    }

    pub fn scale(&self, c: u8, x: &[u8]) -> Vec<u8> {
        x.iter().map(|&xi| self.mul(c, xi)).collect()
    }

    pub fn negate(&self, x: &[u8]) -> Vec<u8> {
        x.iter().map(|&xi| self.neg(xi)).collect()
    }

    /// Scales a nonzero vector so that its first nonzero coordinate is 1.
    /// The zero vector is returned unchanged.
    pub fn normalize(&self, x: &[u8]) -> Vec<u8> {
        match x.iter().find(|&&c| c != 0) {
            Some(&lead) => self.scale(self.inv(lead), x),
            None => x.to_vec(),
        }
    }

    /// Checks every field axiom by brute force. Cost is O(q^3).
    pub fn check_axioms(&self) -> bool {
        let els: Vec<u8> = self.elements().collect();
        for &a in &els {
            if self.add(a, 0) != a || self.mul(a, 1) != a || self.add(a, self.neg(a)) != 0 {
                return false;
            }
            if a != 0 && self.mul(a, self.inv(a)) != 1 {
                return false;
            }
            for &b in &els {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
                for &c in &els {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c))
                        || self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c))
                        || self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}
