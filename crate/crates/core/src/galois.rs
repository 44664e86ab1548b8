//! Galois ring GR(4, m) = Z4[x] / (h(x)).
//!
//! `h` is the Hensel lift of a primitive binary polynomial, so the class of `x`
//! is a Teichmüller unit `ξ` of multiplicative order `2^m - 1`. Elements are
//! coefficient vectors over the basis `1, ξ, …, ξ^{m-1}`.

use crate::error::{Error, Result};

/// Primitive binary polynomials, bit `i` = coefficient of `x^i`.
const PRIMITIVE_BINARY: [(usize, u32); 12] = [
    (1, 0b11),
    (2, 0b111),
    (3, 0b1011),
    (4, 0b1_0011),
    (5, 0b10_0101),
    (6, 0b100_0011),
    (7, 0b1000_0011),
    (8, 0x11D),
    (9, 0x211),
    (10, 0x409),
    (11, 0x805),
    (12, 0x1053),
];

pub const MAX_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaloisRingElement {
    coeffs: Vec<u8>,
}

impl GaloisRingElement {
    /// Coefficients are reduced mod 4.
    pub fn new(coeffs: Vec<u8>) -> Self {
        Self {
            coeffs: coeffs.into_iter().map(|c| c & 3).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisRing {
    degree: usize,
    binary: u32,
    /// Monic modulus, `degree + 1` coefficients, lowest power first.
    modulus: Vec<u8>,
    /// `ξ^{2i}` for `i < degree`, the images of the basis under Frobenius.
    frobenius_basis: Vec<GaloisRingElement>,
}

impl GaloisRing {
    pub fn new(degree: usize) -> Result<Self> {
        let binary = PRIMITIVE_BINARY
            .iter()
            .find(|(d, _)| *d == degree)
            .map(|&(_, b)| b)
            .ok_or_else(|| Error::InvalidSpec(format!("GR(4,{degree}) unsupported; degree must be 1..={MAX_DEGREE}")))?;
        let modulus = hensel_lift(binary, degree);
        let mut ring = Self {
            degree,
            binary,
            modulus,
            frobenius_basis: Vec::new(),
        };
        let xi = ring.xi();
        ring.frobenius_basis = (0..degree).map(|i| ring.pow(&xi, 2 * i as u64).expect("same degree")).collect();
        Ok(ring)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    /// Human readable modulus, e.g. `x^3+2x^2+x+3`.
    pub fn modulus_string(&self) -> String {
        poly_string(&self.modulus)
    }

    /// The binary primitive polynomial that was lifted.
    pub fn binary_polynomial_string(&self) -> String {
        let coeffs: Vec<u8> = (0..=self.degree).map(|i| ((self.binary >> i) & 1) as u8).collect();
        poly_string(&coeffs)
    }

    pub fn size(&self) -> usize {
        1 << (2 * self.degree)
    }

    pub fn zero(&self) -> GaloisRingElement {
        GaloisRingElement {
            coeffs: vec![0; self.degree],
        }
    }

    pub fn one(&self) -> GaloisRingElement {
        self.constant(1)
    }

    pub fn constant(&self, c: u8) -> GaloisRingElement {
        let mut e = self.zero();
        e.coeffs[0] = c & 3;
        e
    }

    /// The Teichmüller generator `ξ`, the class of `x`.
    pub fn xi(&self) -> GaloisRingElement {
        if self.degree == 1 {
            // x ≡ 1 modulo the lift of x + 1
            return self.one();
        }
        let mut e = self.zero();
        e.coeffs[1] = 1;
        e
    }

    /// Element whose coefficient vector, read `c_0` first, is the base-4 expansion of `index`.
    pub fn element(&self, index: usize) -> GaloisRingElement {
        let mut coeffs = vec![0u8; self.degree];
        let mut rest = index;
        for c in coeffs.iter_mut().rev() {
            *c = (rest & 3) as u8;
            rest >>= 2;
        }
        GaloisRingElement { coeffs }
    }

    /// All `4^m` elements in lexicographic coefficient order.
    pub fn elements(&self) -> impl Iterator<Item = GaloisRingElement> + '_ {
        (0..self.size()).map(|i| self.element(i))
    }

    /// `{0, 1, ξ, …, ξ^{2^m - 2}}`.
    pub fn teichmuller_set(&self) -> Vec<GaloisRingElement> {
        let order = (1usize << self.degree) - 1;
        let xi = self.xi();
        let mut set = Vec::with_capacity(order + 1);
        set.push(self.zero());
        let mut cur = self.one();
        for _ in 0..order {
            set.push(cur.clone());
            cur = self.mul_unchecked(&cur, &xi);
        }
        set
    }

    fn check(&self, a: &GaloisRingElement) -> Result<()> {
        if a.degree() != self.degree {
            return Err(Error::MixedDegree(self.degree, a.degree()));
        }
        Ok(())
    }

    pub fn add(&self, a: &GaloisRingElement, b: &GaloisRingElement) -> Result<GaloisRingElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(GaloisRingElement {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x + y) & 3).collect(),
        })
    }

    pub fn neg(&self, a: &GaloisRingElement) -> Result<GaloisRingElement> {
        self.check(a)?;
        Ok(GaloisRingElement {
            coeffs: a.coeffs.iter().map(|x| (4 - x) & 3).collect(),
        })
    }

    pub fn mul(&self, a: &GaloisRingElement, b: &GaloisRingElement) -> Result<GaloisRingElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    fn mul_unchecked(&self, a: &GaloisRingElement, b: &GaloisRingElement) -> GaloisRingElement {
        let n = self.degree;
        let mut prod = vec![0u32; 2 * n - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] += u32::from(x) * u32::from(y);
            }
        }
        for d in (n..prod.len()).rev() {
            let c = prod[d] & 3;
            if c == 0 {
                continue;
            }
            // subtract c * x^{d-n} * h(x); every coefficient stays nonnegative mod 4
            for (i, &h) in self.modulus.iter().enumerate() {
                prod[d - n + i] += (4 - c) * u32::from(h);
            }
        }
        GaloisRingElement {
            coeffs: prod[..n].iter().map(|&c| (c & 3) as u8).collect(),
        }
    }

    pub fn pow(&self, a: &GaloisRingElement, mut exp: u64) -> Result<GaloisRingElement> {
        self.check(a)?;
        let mut base = a.clone();
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_unchecked(&acc, &base);
            }
            base = self.mul_unchecked(&base, &base);
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Frobenius automorphism `ξ ↦ ξ²`, extended Z4-linearly.
    pub fn frobenius(&self, a: &GaloisRingElement) -> Result<GaloisRingElement> {
        self.check(a)?;
        let mut acc = vec![0u8; self.degree];
        for (&c, img) in a.coeffs.iter().zip(&self.frobenius_basis) {
            for (slot, &v) in acc.iter_mut().zip(&img.coeffs) {
                *slot = (*slot + c * v) & 3;
            }
        }
        Ok(GaloisRingElement { coeffs: acc })
    }

    /// Generalized trace `Σ_{j<m} φ^j(a)`, a value in Z4.
    pub fn trace(&self, a: &GaloisRingElement) -> Result<u8> {
        self.check(a)?;
        let mut cur = a.clone();
        let mut acc = a.clone();
        for _ in 1..self.degree {
            cur = self.frobenius(&cur)?;
            acc = self.add(&acc, &cur)?;
        }
        debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0), "trace lies in Z4");
        Ok(acc.coeffs[0])
    }
}

/// Graeffe lift: `h(x²) = ±(e(x)² − o(x)²)` with `f = e + o` split by parity.
fn hensel_lift(binary: u32, degree: usize) -> Vec<u8> {
    let f: Vec<i64> = (0..=degree).map(|i| i64::from((binary >> i) & 1)).collect();
    let even: Vec<i64> = f.iter().enumerate().map(|(i, &c)| if i % 2 == 0 { c } else { 0 }).collect();
    let odd: Vec<i64> = f.iter().enumerate().map(|(i, &c)| if i % 2 == 1 { c } else { 0 }).collect();
    let square = |p: &[i64]| -> Vec<i64> {
        let mut out = vec![0i64; 2 * p.len() - 1];
        for (i, &a) in p.iter().enumerate() {
            for (j, &b) in p.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    };
    let sign = if degree % 2 == 0 { 1 } else { -1 };
    let (e2, o2) = (square(&even), square(&odd));
    (0..=degree)
        .map(|j| (sign * (e2[2 * j] - o2[2 * j])).rem_euclid(4) as u8)
        .collect()
}

fn poly_string(coeffs: &[u8]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        terms.push(match i {
            0 => coef,
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{i}"),
        });
    }
    terms.join("+")
}
