//! Polynomials of degree at most three over `Z_L`.
//!
//! A [`ModPoly`] stores `q0 + q1 x + q2 x^2 + q3 x^3` with every coefficient
//! reduced modulo `L`. Two polynomials induce the same function on `Z_L`
//! exactly when their difference is a null polynomial, so the set returned by
//! [`null_polynomials`] is the group by which the search quotients the
//! coefficient space.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Polynomial `q0 + q1 x + q2 x^2 + q3 x^3 (mod L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPoly")]
pub struct ModPoly {
    modulus: u64,
    coeffs: [u64; 4],
}

impl ModPoly {
    /// Builds a polynomial from `[q0, q1, q2, q3]`, reducing each coefficient mod `modulus`.
    pub fn new(modulus: u64, coeffs: [u64; 4]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(Self {
            modulus,
            coeffs: coeffs.map(|c| c % modulus),
        })
    }

    /// Polynomial with `q0 = 0`.
    pub fn cubic(modulus: u64, q1: u64, q2: u64, q3: u64) -> Result<Self> {
        Self::new(modulus, [0, q1, q2, q3])
    }

    pub fn zero(modulus: u64) -> Result<Self> {
        Self::new(modulus, [0; 4])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> [u64; 4] {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs[k]
    }

    /// `(q1, q2, q3)`, the key used for lexicographic ordering of candidates.
    pub fn key(&self) -> (u64, u64, u64) {
        (self.coeffs[1], self.coeffs[2], self.coeffs[3])
    }

    /// Largest `k` with `q_k != 0`, or 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        (1..4).rev().find(|&k| self.coeffs[k] != 0).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Evaluates the polynomial at `x`, which must lie in `[0, L)`.
    pub fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.modulus {
            return Err(Error::OutOfRange {
                value: x,
                modulus: self.modulus,
            });
        }
        Ok(self.eval_reduced(x))
    }

    /// Horner evaluation; every intermediate product is below `L^2`, so the
    /// `u128` accumulator cannot overflow for any `u64` modulus.
    #[inline]
    pub(crate) fn eval_reduced(&self, x: u64) -> u64 {
        let m = self.modulus as u128;
        let x = x as u128;
        let [q0, q1, q2, q3] = self.coeffs.map(|c| c as u128);
        let mut acc = q3;
        acc = (acc * x + q2) % m;
        acc = (acc * x + q1) % m;
        acc = (acc * x + q0) % m;
        acc as u64
    }

    /// Evaluates at every point of `Z_L`.
    pub fn values(&self) -> Vec<u64> {
        (0..self.modulus).map(|x| self.eval_reduced(x)).collect()
    }

    /// The permutation induced by this polynomial, if it is one.
    pub fn as_permutation(&self) -> Result<Permutation> {
        let n = self.modulus as usize;
        let mut seen = vec![false; n];
        let mut forward = Vec::with_capacity(n);
        for x in 0..self.modulus {
            let y = self.eval_reduced(x) as usize;
            if std::mem::replace(&mut seen[y], true) {
                return Err(Error::NotBijective(self.to_string(), self.modulus));
            }
            forward.push(y);
        }
        Ok(Permutation::from_forward_unchecked(forward))
    }

    pub fn is_permutation(&self) -> bool {
        self.as_permutation().is_ok()
    }

    fn check_modulus(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    /// Coefficient-wise sum modulo `L`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        let m = self.modulus;
        let mut coeffs = [0; 4];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = (self.coeffs[k] + other.coeffs[k]) % m;
        }
        Ok(Self { modulus: m, coeffs })
    }

    /// Coefficient-wise difference modulo `L`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        let m = self.modulus;
        let mut coeffs = [0; 4];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = (self.coeffs[k] + m - other.coeffs[k]) % m;
        }
        Ok(Self { modulus: m, coeffs })
    }

    /// True iff both polynomials define the same function on `Z_L`.
    ///
    /// Decided by the null-polynomial test: equal free terms and a
    /// `(q1, q2, q3)` difference that is null.
    pub fn equivalent(&self, other: &Self) -> Result<bool> {
        let diff = self.sub(other)?;
        if diff.coeffs[0] != 0 {
            return Ok(false);
        }
        Ok(null_polynomials(self.modulus)?.contains(&diff))
    }

    /// Every member of the equivalence class of `self` (same `q0`).
    pub fn class_members(&self) -> Vec<Self> {
        null_polynomials(self.modulus)
            .expect("modulus validated at construction")
            .iter()
            .map(|n| self.add(n).expect("same modulus"))
            .collect()
    }

    /// Smallest degree found in the equivalence class.
    pub fn effective_degree(&self) -> usize {
        self.class_members()
            .iter()
            .map(ModPoly::degree)
            .min()
            .unwrap_or(0)
    }

    /// Class member with the lexicographically smallest `(q1, q2, q3)`.
    pub fn canonical(&self) -> Self {
        self.class_members()
            .into_iter()
            .min_by_key(ModPoly::key)
            .unwrap_or(*self)
    }

    /// Parses the `3x+8x^2+16x^3` notation; coefficients are reduced mod `modulus`.
    pub fn parse(text: &str, modulus: u64) -> Result<Self> {
        let coeffs = parse_terms(text)?;
        if modulus < 2 {
            return Err(Error::InvalidModulus(modulus));
        }
        let mut reduced = [0u64; 4];
        for (k, c) in coeffs.iter().enumerate() {
            reduced[k] = (c % modulus as u128) as u64;
        }
        Self::new(modulus, reduced)
    }
}

#[derive(Deserialize)]
struct RawPoly {
    modulus: u64,
    coeffs: [u64; 4],
}

impl TryFrom<RawPoly> for ModPoly {
    type Error = Error;

    fn try_from(raw: RawPoly) -> Result<Self> {
        ModPoly::new(raw.modulus, raw.coeffs)
    }
}

impl PartialOrd for ModPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ModPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.modulus, self.coeffs[0], self.key()).cmp(&(
            other.modulus,
            other.coeffs[0],
            other.key(),
        ))
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("x")?,
                (1, c) => write!(f, "{c}x")?,
                (k, 1) => write!(f, "x^{k}")?,
                (k, c) => write!(f, "{c}x^{k}")?,
            }
        }
        Ok(())
    }
}

fn parse_error(reason: impl Into<String>) -> Error {
    Error::Parse {
        what: "polynomial",
        reason: reason.into(),
    }
}

/// Splits `a + bx + cx^2 + dx^3` into raw coefficients (not yet reduced).
fn parse_terms(text: &str) -> Result<[u128; 4]> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(parse_error("empty input"));
    }
    let mut coeffs = [0u128; 4];
    let mut seen = [false; 4];
    for term in compact.split('+') {
        if term.is_empty() {
            return Err(parse_error(format!("empty term in {text:?}")));
        }
        let (coef_text, power) = match term.find('x') {
            None => (term, 0usize),
            Some(pos) => {
                let rest = &term[pos + 1..];
                let power = if rest.is_empty() {
                    1
                } else if let Some(exp) = rest.strip_prefix('^') {
                    match exp {
                        "0" => 0,
                        "1" => 1,
                        "2" => 2,
                        "3" => 3,
                        _ => return Err(parse_error(format!("unsupported exponent in {term:?}"))),
                    }
                } else {
                    return Err(parse_error(format!(
                        "unexpected {rest:?} after x in {term:?}"
                    )));
                };
                (&term[..pos], power)
            }
        };
        let coef = if coef_text.is_empty() {
            if power == 0 {
                return Err(parse_error(format!("missing coefficient in {term:?}")));
            }
            1
        } else {
            let digits = coef_text.strip_suffix('*').unwrap_or(coef_text);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_error(format!("bad coefficient {coef_text:?}")));
            }
            digits
                .parse::<u64>()
                .map_err(|e| parse_error(format!("{coef_text:?}: {e}")))? as u128
        };
        if std::mem::replace(&mut seen[power], true) {
            return Err(parse_error(format!("repeated power {power} in {text:?}")));
        }
        coeffs[power] = coef;
    }
    Ok(coeffs)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `(n(n+1)/2) mod 3`; equals 1 exactly when `n ≡ 1 (mod 3)`.
pub fn triangular_class(n: u64) -> u64 {
    // n(n+1)/2 mod 3 depends only on n mod 6
    let r = n % 6;
    (r * (r + 1) / 2) % 3
}

/// Number of null polynomials of degree at most 3 with `q0 = 0`.
pub fn null_class_size(modulus: u64) -> u64 {
    gcd(modulus, 6) * gcd(modulus, 2)
}

/// Number of null polynomials of degree at most 2 with `q0 = 0`.
pub fn quadratic_null_class_size(modulus: u64) -> u64 {
    gcd(modulus, 2)
}

/// Every null polynomial of degree at most 3 with `q0 = 0`, built from the
/// closed-form solutions, sorted by `(q1, q2, q3)`.
pub fn null_polynomials(modulus: u64) -> Result<Vec<ModPoly>> {
    if modulus < 2 {
        return Err(Error::InvalidModulus(modulus));
    }
    let l = modulus;
    let mut triples: Vec<(u64, u64, u64)> = vec![(0, 0, 0)];
    if l.is_multiple_of(2) {
        let h = l / 2;
        triples.push((h, h, 0));
        // q1 = q3 = L/2 and q2 = q3 = L/2
        triples.push((h, 0, h));
        triples.push((0, h, h));
    }
    if l.is_multiple_of(3) {
        let t = l / 3;
        triples.push((2 * t, 0, t));
        triples.push((t, 0, 2 * t));
    }
    if l.is_multiple_of(6) {
        let s = l / 6;
        let h = l / 2;
        let t = l / 3;
        triples.extend([
            (5 * s, 0, s),
            (t, h, s),
            (s, h, t),
            (5 * s, h, 2 * t),
            (s, 0, 5 * s),
            (2 * t, h, 5 * s),
        ]);
    }
    let mut out: Vec<ModPoly> = triples
        .into_iter()
        .map(|(a, b, c)| ModPoly::cubic(l, a, b, c))
        .collect::<Result<_>>()?;
    out.sort_by_key(ModPoly::key);
    out.dedup();
    Ok(out)
}

/// Null polynomials restricted to degree at most `max_degree` (2 or 3).
pub fn null_polynomials_up_to(modulus: u64, max_degree: usize) -> Result<Vec<ModPoly>> {
    Ok(null_polynomials(modulus)?
        .into_iter()
        .filter(|p| p.degree() <= max_degree)
        .collect())
}
