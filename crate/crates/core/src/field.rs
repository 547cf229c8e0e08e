//! Finite fields GF(p^m) with log/antilog tables.
//!
//! Elements are encoded as integers `0..q` whose base-p digits are the
//! polynomial coefficients over the prime field.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {0} exceeds the supported table size")]
    TooLarge(u64),
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf {
    p: u32,
    m: u32,
    q: u32,
    /// `exp[k]` is the k-th power of the primitive element, for `k < q - 1`.
    exp: Vec<u32>,
    /// `log[x]` for nonzero x; `log[0]` is unused.
    log: Vec<u32>,
}

impl Gf {
    pub fn new(p: u32, m: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q64 = (p as u64).pow(m);
        if q64 > 1 << 16 {
            return Err(FieldError::TooLarge(q64));
        }
        let q = q64 as u32;
        // Search monic polynomials x^m + c_{m-1}x^{m-1} + ... + c_0 until x is primitive.
        for tail in 0..q {
            let coeffs = digits(tail, p, m);
            if coeffs[0] == 0 {
                continue;
            }
            if let Some(exp) = powers_of_x(&coeffs, p, q) {
                let mut log = vec![0; q as usize];
                for (k, &x) in exp.iter().enumerate() {
                    log[x as usize] = k as u32;
                }
                return Ok(Self { p, m, q, exp, log });
            }
        }
        unreachable!("every finite field has a primitive polynomial")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        if self.m == 1 {
            return (x + y) % self.p;
        }
        let (mut x, mut y, mut out, mut place) = (x, y, 0, 1);
        for _ in 0..self.m {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, x: u32) -> u32 {
        if self.m == 1 {
            return (self.p - x % self.p) % self.p;
        }
        let (mut x, mut out, mut place) = (x, 0, 1);
        for _ in 0..self.m {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        if x == 0 || y == 0 {
            return 0;
        }
        let k = (self.log[x as usize] + self.log[y as usize]) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn inv(&self, x: u32) -> Option<u32> {
        if x == 0 {
            return None;
        }
        let k = (self.q - 1 - self.log[x as usize]) % (self.q - 1);
        Some(self.exp[k as usize])
    }

    /// Elements forming a basis of the field over the prime field.
    pub fn prime_basis(&self) -> Vec<u32> {
        (0..self.m).map(|i| self.p.pow(i)).collect()
    }
}

fn digits(mut x: u32, p: u32, m: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

/// Powers of x modulo the monic polynomial with low coefficients `coeffs`,
/// or `None` when x does not generate the multiplicative group.
fn powers_of_x(coeffs: &[u32], p: u32, q: u32) -> Option<Vec<u32>> {
    let m = coeffs.len();
    let mut cur = vec![0u32; m];
    cur[0] = 1;
    let mut seen = vec![false; q as usize];
    let mut exp = Vec::with_capacity(q as usize - 1);
    for _ in 0..q - 1 {
        let code = cur.iter().rev().fold(0, |acc, &d| acc * p + d);
        if code == 0 || seen[code as usize] {
            return None;
        }
        seen[code as usize] = true;
        exp.push(code);
        // Multiply by x and reduce with x^m = -(c_0 + ... + c_{m-1} x^{m-1}).
        let top = cur[m - 1];
        for i in (1..m).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        for i in 0..m {
            cur[i] = (cur[i] + (p - coeffs[i]) * top) % p;
        }
    }
    let back = cur.iter().rev().fold(0, |acc, &d| acc * p + d);
    (back == 1).then_some(exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2), (2, 3)] {
            let f = Gf::new(p, m).unwrap();
            let q = f.order();
            for x in 0..q {
                assert_eq!(f.add(x, f.neg(x)), 0);
                if x != 0 {
                    assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
                }
                for y in 0..q {
                    assert_eq!(f.add(x, y), f.add(y, x));
                    assert_eq!(f.mul(x, y), f.mul(y, x));
                    for z in 0..q {
                        assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_composite() {
        assert_eq!(Gf::new(4, 1), Err(FieldError::NotPrime(4)));
    }
}
