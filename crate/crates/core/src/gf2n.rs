//! Arithmetic in GF(2^n) for 1 <= n <= 16.
//!
//! Elements are polynomials over F2 of degree < n stored as bit masks.
//! Multiplication goes through exp/log tables built when the context is
//! created; [`clmul_reduce`] is the table-free reference product used to
//! build and test them.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 16;

/// An element of GF(2^n), canonical (fully reduced) for its context.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn bits(self) -> u16 {
        self.0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// addition in characteristic 2 is XOR
#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl std::ops::AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

/// Carry-less product of `a` and `b` reduced modulo `modulus` (degree `n`).
pub fn clmul_reduce(a: u32, b: u32, modulus: u32, n: u32) -> u32 {
    let mut acc: u32 = 0;
    let mut a = a;
    let mut b = b;
    let top = 1u32 << n;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Irreducibility over F2 by trial division against every polynomial of
/// degree 1..=deg/2.
pub fn is_irreducible(p: u32) -> bool {
    let d = poly_degree(p);
    if d < 1 {
        return false;
    }
    for dd in 1..=(d / 2) {
        for low in 0..(1u32 << dd) {
            let divisor = (1u32 << dd) | low;
            if poly_rem(p, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

/// Least irreducible polynomial of degree `n`, compared as an integer mask.
pub fn default_modulus(n: u32) -> Result<u32> {
    check_degree(n)?;
    let lo = 1u32 << n;
    (lo..(lo << 1))
        .find(|&p| is_irreducible(p))
        .ok_or(Error::DegreeOutOfRange(n))
}

fn check_degree(n: u32) -> Result<()> {
    if n == 0 || n > MAX_DEGREE {
        Err(Error::DegreeOutOfRange(n))
    } else {
        Ok(())
    }
}

/// GF(2^n) arithmetic context. Immutable after construction.
#[derive(Clone)]
pub struct FieldCtx {
    n: u32,
    modulus: u32,
    order: u32,
    // exp has length 2(q-1) so that log a + log b never needs a modulo
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("n", &self.n)
            .field("modulus", &format_args!("{:b}", self.modulus))
            .finish()
    }
}

impl FieldCtx {
    /// Field with the default (least irreducible) modulus.
    pub fn new(n: u32) -> Result<FieldCtx> {
        let modulus = default_modulus(n)?;
        FieldCtx::with_modulus(n, modulus)
    }

    pub fn with_modulus(n: u32, modulus: u32) -> Result<FieldCtx> {
        check_degree(n)?;
        if poly_degree(modulus) != n as i32 {
            return Err(Error::ModulusDegree { n, modulus });
        }
        if !is_irreducible(modulus) {
            return Err(Error::ReducibleModulus(modulus));
        }
        let order = 1u32 << n;
        let group = (order - 1) as usize;
        let generator = (1..order)
            .find(|&g| multiplicative_order(g, modulus, n) == group as u32)
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u16; 2 * group];
        let mut log = vec![0u16; order as usize];
        let mut x = 1u32;
        for i in 0..group {
            exp[i] = x as u16;
            exp[i + group] = x as u16;
            log[x as usize] = i as u16;
            x = clmul_reduce(x, generator, modulus, n);
        }
        Ok(FieldCtx {
            n,
            modulus,
            order,
            exp,
            log,
        })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// q = 2^n.
    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Checked conversion of a raw mask into an element.
    pub fn element(&self, bits: u32) -> Result<FieldElement> {
        if bits >= self.order {
            Err(Error::NotCanonical { bits, n: self.n })
        } else {
            Ok(FieldElement(bits as u16))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(|b| FieldElement(b as u16))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.order).map(|b| FieldElement(b as u16))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let s = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElement(self.exp[s])
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        let group = (self.order - 1) as usize;
        let l = self.log[a.0 as usize] as usize;
        Some(FieldElement(self.exp[(group - l) % group]))
    }

    #[inline]
    pub fn div(&self, a: FieldElement, b: FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// The unique square root, a^(2^(n-1)).
    pub fn sqrt(&self, a: FieldElement) -> FieldElement {
        let mut x = a;
        for _ in 1..self.n {
            x = self.square(x);
        }
        x
    }

    /// Absolute trace to F2: sum of a^(2^i) for i < n.
    pub fn trace(&self, a: FieldElement) -> u8 {
        let mut acc = a;
        let mut x = a;
        for _ in 1..self.n {
            x = self.square(x);
            acc += x;
        }
        debug_assert!(acc.0 <= 1);
        acc.0 as u8
    }

    /// All t with t^2 + t + c = 0: two solutions differing by 1 when
    /// Tr(c) = 0, none otherwise.
    pub fn solve_artin_schreier(&self, c: FieldElement) -> Vec<FieldElement> {
        if self.trace(c) == 1 {
            return Vec::new();
        }
        let t = self.half_trace_root(c);
        let mut out = vec![t, t + FieldElement::ONE];
        out.sort();
        out
    }

    // t -> t^2 + t is F2-linear; solve it on the polynomial basis by
    // Gaussian elimination over F2.
    fn half_trace_root(&self, c: FieldElement) -> FieldElement {
        let n = self.n as usize;
        // rows: (image mask, preimage mask)
        let mut rows: Vec<(u32, u32)> = (0..n)
            .map(|i| {
                let x = FieldElement(1 << i);
                ((self.square(x) + x).0 as u32, 1u32 << i)
            })
            .collect();
        let mut target = (c.0 as u32, 0u32);
        let mut pivot_row = 0;
        for bit in (0..n).rev() {
            let Some(r) = (pivot_row..n).find(|&r| rows[r].0 >> bit & 1 == 1) else {
                continue;
            };
            rows.swap(pivot_row, r);
            let (pv, pp) = rows[pivot_row];
            for (k, row) in rows.iter_mut().enumerate() {
                if k != pivot_row && row.0 >> bit & 1 == 1 {
                    row.0 ^= pv;
                    row.1 ^= pp;
                }
            }
            if target.0 >> bit & 1 == 1 {
                target.0 ^= pv;
                target.1 ^= pp;
            }
            pivot_row += 1;
        }
        debug_assert_eq!(target.0, 0, "trace-zero constant has a root");
        FieldElement(target.1 as u16)
    }

    /// Least element of trace 1.
    pub fn least_trace_one(&self) -> FieldElement {
        self.elements()
            .find(|&x| self.trace(x) == 1)
            .expect("trace is surjective")
    }

    /// Form parameter used when none is configured: 1 for odd n, the least
    /// trace-1 element otherwise.
    pub fn default_lambda(&self) -> FieldElement {
        if self.n % 2 == 1 {
            FieldElement::ONE
        } else {
            self.least_trace_one()
        }
    }

    /// All (x, y) with x^2 + xy + lam y^2 + mu = 1, requiring Tr(lam) = 1.
    ///
    /// The y = 0 solution is x = sqrt(mu + 1); for y != 0 the substitution
    /// t = x/y turns the equation into t^2 + t + lam + (mu+1)/y^2 = 0.
    pub fn conic_solution_set(
        &self,
        lam: FieldElement,
        mu: FieldElement,
    ) -> Result<Vec<(FieldElement, FieldElement)>> {
        if self.trace(lam) != 1 {
            return Err(Error::TraceZeroLambda(lam.0));
        }
        let rhs = mu + FieldElement::ONE;
        let mut out = vec![(self.sqrt(rhs), FieldElement::ZERO)];
        for y in self.nonzero_elements() {
            let c = lam + self.div(rhs, self.square(y)).unwrap();
            for t in self.solve_artin_schreier(c) {
                out.push((self.mul(t, y), y));
            }
        }
        out.sort();
        Ok(out)
    }
}

fn multiplicative_order(g: u32, modulus: u32, n: u32) -> u32 {
    let mut x = g;
    let mut k = 1;
    while x != 1 {
        x = clmul_reduce(x, g, modulus, n);
        k += 1;
        if k > (1 << n) {
            return 0;
        }
    }
    k
}

/// Parses a polynomial written as a binary literal, e.g. `1011` for x^3+x+1.
pub fn parse_binary_modulus(s: &str) -> Result<u32> {
    let s = s.trim().trim_start_matches("0b");
    u32::from_str_radix(s, 2).map_err(|_| Error::BadModulusLiteral(s.to_string()))
}
