//! Dense complex polynomials with root extraction and multiset utilities.
//!
//! * coefficient vectors in ascending powers, exact-zero tails trimmed
//! * roots via the companion matrix plus Newton polishing
//! * reconstruction from a root multiset, lexicographic ordering, greedy
//!   minimum-distance pairing between multisets
//! * reality classification with the scale-aware test `|Im| ≤ tol·(1+|Re|)`
//! * determinants of polynomial-entry matrices (cofactor small, fraction-free
//!   Bareiss beyond)

use crate::config::tol;
use crate::linalg;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("zero polynomial has no root multiset")]
    ZeroPolynomial,
    #[error("inexact polynomial division (relative remainder {0:.3e})")]
    InexactDivision(f64),
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,
}

/// Polynomial over ℂ, coefficients ascending, no exact-zero tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while let Some(last) = coeffs.last() {
            if last.re == 0.0 && last.im == 0.0 {
                coeffs.pop();
            } else {
                break;
            }
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = C64::new(1.0, 0.0);
        Polynomial { coeffs }
    }

    /// `x - r`
    pub fn linear_from_root(r: C64) -> Self {
        Polynomial::new(vec![-r, C64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every coefficient is at most `abs_tol` in magnitude.
    pub fn is_negligible(&self, abs_tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.norm() <= abs_tol)
    }

    pub fn leading(&self) -> Option<C64> {
        self.coeffs.last().copied()
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()))
    }

    pub fn eval(&self, x: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * C64::new(k as f64, 0.0))
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `p(x + a)`
    pub fn shift(&self, a: C64) -> Polynomial {
        let mut acc = Polynomial::zero();
        for &c in self.coeffs.iter().rev() {
            // acc <- acc·(x + a) + c
            let mut next = acc.mul_xpow(1);
            next = &next + &acc.scale(a);
            next = &next + &Polynomial::constant(c);
            acc = next;
        }
        acc
    }

    /// `p(s·x)`
    pub fn scale_arg(&self, s: C64) -> Polynomial {
        let mut pow = C64::new(1.0, 0.0);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            coeffs.push(c * pow);
            pow *= s;
        }
        Polynomial::new(coeffs)
    }

    /// `x^k · p(x)`
    pub fn mul_xpow(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial { coeffs }
    }

    /// Splits off the leading coefficient: `p = leading · monic`.
    pub fn monic(&self) -> Option<(C64, Polynomial)> {
        let lead = self.leading()?;
        let inv = C64::new(1.0, 0.0) / lead;
        Some((lead, self.scale(inv)))
    }

    /// Multiplicity of the root 0 under a relative coefficient cutoff.
    pub fn valuation(&self, rel_tol: f64) -> Option<usize> {
        let scale = self.max_coeff_norm();
        if scale == 0.0 {
            return None;
        }
        self.coeffs.iter().position(|c| c.norm() > rel_tol * scale)
    }

    /// Copy with trailing coefficients of magnitude at most `rel·scale`
    /// removed.
    pub fn trim_relative_to(&self, rel: f64, scale: f64) -> Polynomial {
        let cut = rel * scale;
        let mut coeffs = self.coeffs.clone();
        while let Some(last) = coeffs.last() {
            if last.norm() <= cut {
                coeffs.pop();
            } else {
                break;
            }
        }
        Polynomial::new(coeffs)
    }

    /// Drops the `k` lowest coefficients (divides by `x^k`).
    pub fn div_xpow(&self, k: usize) -> Polynomial {
        if k >= self.coeffs.len() {
            return Polynomial::zero();
        }
        Polynomial::new(self.coeffs[k..].to_vec())
    }

    /// Long division that must leave a negligible remainder.
    pub fn try_div_exact(&self, divisor: &Polynomial, rel_tol: f64) -> Result<Polynomial, PolyError> {
        if divisor.is_zero() {
            return Err(PolyError::InexactDivision(f64::INFINITY));
        }
        if self.is_zero() {
            return Ok(Polynomial::zero());
        }
        let dn = divisor.degree().unwrap();
        let nn = self.degree().unwrap();
        if nn < dn {
            let rel = self.max_coeff_norm() / self.max_coeff_norm().max(1.0);
            return Err(PolyError::InexactDivision(rel));
        }
        let lead = divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![C64::new(0.0, 0.0); nn - dn + 1];
        for k in (0..=nn - dn).rev() {
            let q = rem[k + dn] / lead;
            quot[k] = q;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
        }
        let rem_norm = rem.iter().take(dn).fold(0.0f64, |a, c| a.max(c.norm()));
        let scale = self.max_coeff_norm().max(1e-300);
        let rel = rem_norm / scale;
        if rel > rel_tol {
            return Err(PolyError::InexactDivision(rel));
        }
        Ok(Polynomial::new(quot))
    }

    /// Synthetic division by `x - r`, discarding the remainder.
    pub fn deflate(&self, r: C64) -> Polynomial {
        let n = self.coeffs.len();
        if n <= 1 {
            return Polynomial::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); n - 1];
        let mut carry = C64::new(0.0, 0.0);
        for k in (0..n - 1).rev() {
            carry = self.coeffs[k + 1] + carry * r;
            out[k] = carry;
        }
        Polynomial::new(out)
    }

    /// Root multiset via the companion matrix, each root Newton-polished.
    pub fn roots(&self) -> Result<RootMultiset, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let n = self.degree().unwrap();
        if n == 0 {
            return Ok(RootMultiset::new(Vec::new(), tol::REALITY));
        }
        if n == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            return Ok(RootMultiset::new(vec![r], tol::REALITY));
        }
        let lead = self.leading().unwrap();
        let mut comp = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            comp[(i, n - 1)] = -self.coeffs[i] / lead;
            if i + 1 < n {
                comp[(i + 1, i)] = C64::new(1.0, 0.0);
            }
        }
        let raw = linalg::eigvals(&comp).map_err(|_| PolyError::EigenFailure)?;
        let dp = self.derivative();
        let scale = self.max_coeff_norm();
        let roots = raw.into_iter().map(|r| self.polish_root(&dp, r, scale)).collect();
        Ok(RootMultiset::new(roots, tol::REALITY))
    }

    fn polish_root(&self, dp: &Polynomial, r0: C64, scale: f64) -> C64 {
        let mut best = r0;
        let mut best_val = self.eval(r0).norm();
        let mut r = r0;
        for _ in 0..50 {
            let dv = dp.eval(r);
            if dv.norm() < 1e-300 {
                break;
            }
            let step = self.eval(r) / dv;
            r -= step;
            let v = self.eval(r).norm();
            if v < best_val {
                best_val = v;
                best = r;
            }
            if best_val <= 1e-16 * scale || step.norm() <= 1e-16 * (1.0 + r.norm()) {
                break;
            }
        }
        best
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{}{}i)", c.re, if c.im < 0.0 { "-" } else { "+" }, c.im.abs())?;
            }
            match k {
                0 => {}
                1 => write!(f, "·x")?,
                _ => write!(f, "·x^{k}")?,
            }
        }
        Ok(())
    }
}

// ---- arithmetic ----

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.coeff(k) + rhs.coeff(k);
        }
        Polynomial::new(out)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.coeff(k) - rhs.coeff(k);
        }
        Polynomial::new(out)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

// ---- serde: JSON array of [re, im] pairs, ascending powers ----

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Polynomial;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of [re, im] coefficient pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Polynomial, A::Error> {
                let mut coeffs = Vec::new();
                while let Some(pair) = seq.next_element::<[f64; 2]>()? {
                    coeffs.push(C64::new(pair[0], pair[1]));
                }
                Ok(Polynomial::new(coeffs))
            }
        }
        deserializer.deserialize_seq(V)
    }
}

// ---- root multisets ----

/// Roots with multiplicity (repeated entries), lexicographically ordered.
#[derive(Debug, Clone)]
pub struct RootMultiset {
    pub roots: Vec<C64>,
    pub tol: f64,
}

#[derive(Serialize, Deserialize)]
struct RootMultisetRepr {
    roots: Vec<[f64; 2]>,
    tol: f64,
}

impl Serialize for RootMultiset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RootMultisetRepr {
            roots: self.roots.iter().map(|r| [r.re, r.im]).collect(),
            tol: self.tol,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RootMultiset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RootMultisetRepr::deserialize(deserializer)?;
        Ok(RootMultiset::new(
            repr.roots.into_iter().map(|p| C64::new(p[0], p[1])).collect(),
            repr.tol,
        ))
    }
}

impl RootMultiset {
    pub fn new(mut roots: Vec<C64>, tol: f64) -> Self {
        roots.sort_by(cmp_lex);
        RootMultiset { roots, tol }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Monic polynomial with exactly these roots.
    pub fn to_polynomial(&self) -> Polynomial {
        from_roots(&self.roots)
    }

    /// True when the multiset is closed under complex conjugation.
    pub fn conjugation_closed(&self, tol: f64) -> bool {
        let conj: Vec<C64> = self.roots.iter().map(|r| r.conj()).collect();
        pair_roots(&self.roots, &conj).max_distance <= tol
    }

    /// Indices of roots that pass the reality test at the stored tolerance.
    pub fn real_flags(&self) -> Vec<bool> {
        classify_real(&self.roots, self.tol)
    }
}

/// Monic polynomial from a plain root list.
pub fn from_roots(roots: &[C64]) -> Polynomial {
    let mut acc = Polynomial::one();
    for &r in roots {
        acc = &acc * &Polynomial::linear_from_root(r);
    }
    acc
}

fn cmp_lex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Result of greedily pairing two equally sized root lists.
#[derive(Debug, Clone, Serialize)]
pub struct PairingReport {
    /// Largest distance over the chosen pairs.
    pub max_distance: f64,
    /// Pairs as indices into the two input lists.
    pub pairs: Vec<(usize, usize)>,
}

/// Greedy minimum-distance pairing after lexicographic ordering.
///
/// Both lists are visited in `(Re, Im)` order; each entry of the first grabs
/// the nearest unused entry of the second. Deterministic for identical input.
pub fn pair_roots(a: &[C64], b: &[C64]) -> PairingReport {
    assert_eq!(a.len(), b.len(), "pairing needs equally sized root lists");
    let mut ia: Vec<usize> = (0..a.len()).collect();
    let mut ib: Vec<usize> = (0..b.len()).collect();
    ia.sort_by(|&i, &j| cmp_lex(&a[i], &a[j]));
    ib.sort_by(|&i, &j| cmp_lex(&b[i], &b[j]));
    let mut used = vec![false; b.len()];
    let mut pairs = Vec::with_capacity(a.len());
    let mut max_distance = 0.0f64;
    for &i in &ia {
        let mut best: Option<(usize, f64)> = None;
        for (slot, &j) in ib.iter().enumerate() {
            if used[slot] {
                continue;
            }
            let d = (a[i] - b[j]).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((slot, d));
            }
        }
        if let Some((slot, d)) = best {
            used[slot] = true;
            pairs.push((i, ib[slot]));
            max_distance = max_distance.max(d);
        }
    }
    PairingReport { max_distance, pairs }
}

/// Scale-aware reality test: `|Im v| ≤ tol·(1 + |Re v|)` per value.
pub fn classify_real(values: &[C64], tol: f64) -> Vec<bool> {
    values.iter().map(|v| v.im.abs() <= tol * (1.0 + v.re.abs())).collect()
}

// ---- determinants of polynomial matrices ----

/// Determinant of a square polynomial-entry matrix.
///
/// Cofactor expansion up to 4×4, fraction-free Bareiss elimination beyond
/// (falling back to cofactors if an elimination division misbehaves).
pub fn poly_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "poly_det needs a square matrix");
    if n == 0 {
        return Polynomial::one();
    }
    if n <= 4 {
        return det_cofactor(m);
    }
    det_bareiss(m).unwrap_or_else(|| det_cofactor(m))
}

fn det_cofactor(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    let cols: Vec<usize> = (0..n).collect();
    det_cofactor_rec(m, 0, &cols)
}

fn det_cofactor_rec(m: &[Vec<Polynomial>], row: usize, cols: &[usize]) -> Polynomial {
    if cols.is_empty() {
        return Polynomial::one();
    }
    let mut acc = Polynomial::zero();
    for (pos, &col) in cols.iter().enumerate() {
        let entry = &m[row][col];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&c| c != col).collect();
        let minor = det_cofactor_rec(m, row + 1, &rest);
        let term = entry * &minor;
        if pos % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

fn det_bareiss(m: &[Vec<Polynomial>]) -> Option<Polynomial> {
    let n = m.len();
    let mut a: Vec<Vec<Polynomial>> = m.to_vec();
    let mut prev = Polynomial::one();
    let mut sign = 1.0;
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, p| acc.max(p.max_coeff_norm()));
    let tiny = 1e-14 * scale.max(1e-300);
    for k in 0..n - 1 {
        if a[k][k].max_coeff_norm() <= tiny {
            let swap = (k + 1..n).max_by(|&i, &j| {
                a[i][k].max_coeff_norm().total_cmp(&a[j][k].max_coeff_norm())
            })?;
            if a[swap][k].max_coeff_norm() <= tiny {
                return Some(Polynomial::zero());
            }
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                match num.try_div_exact(&prev, 1e-7) {
                    Ok(q) => a[i][j] = q,
                    Err(_) => return None,
                }
            }
        }
        prev = a[k][k].clone();
    }
    Some(a[n - 1][n - 1].scale(C64::new(sign, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        let err = Polynomial::zero().roots().unwrap_err();
        assert_eq!(err.to_string(), "zero polynomial has no root multiset");
    }

    #[test]
    fn constant_polynomial_has_empty_root_multiset() {
        let rm = Polynomial::from_real(&[4.0]).roots().unwrap();
        assert!(rm.is_empty());
    }

    #[test]
    fn linear_root() {
        let rm = Polynomial::from_real(&[-5.0, 1.0]).roots().unwrap();
        assert_eq!(rm.len(), 1);
        assert!((rm.roots[0] - c(5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quadratic_with_conjugate_roots() {
        // x^2 + 3/4
        let rm = Polynomial::from_real(&[0.75, 0.0, 1.0]).roots().unwrap();
        let s = 0.75f64.sqrt();
        let rep = pair_roots(&rm.roots, &[c(0.0, -s), c(0.0, s)]);
        assert!(rep.max_distance < 1e-12);
        assert!(rm.conjugation_closed(1e-10));
    }

    #[test]
    fn quadratic_with_root_at_zero() {
        // x^2 - 2x -> {0, 2}
        let rm = Polynomial::from_real(&[0.0, -2.0, 1.0]).roots().unwrap();
        assert!((rm.roots[0] - c(0.0, 0.0)).norm() < 1e-12);
        assert!((rm.roots[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn from_roots_examples() {
        assert_eq!(from_roots(&[]), Polynomial::one());
        let p = from_roots(&[c(0.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(p, Polynomial::from_real(&[0.0, -2.0, 1.0]));
        let q = from_roots(&[c(0.0, 1.0), c(0.0, -1.0)]);
        assert!((q.coeff(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(q.coeff(1).norm() < 1e-15);
        assert!((q.coeff(2) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn classify_real_is_scale_aware() {
        let flags = classify_real(
            &[c(1.0, 1e-9), c(0.0, 1e-3), c(1e6, 0.5), c(2.0, -3.0)],
            1e-6,
        );
        assert_eq!(flags, vec![true, false, true, false]);
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = Polynomial::from_real(&[1.0, -2.0, 0.5, 3.0]);
        let q = p.shift(c(1.5, -0.25));
        for k in 0..6 {
            let x = c(k as f64 * 0.3 - 1.0, 0.1 * k as f64);
            assert!((q.eval(x) - p.eval(x + c(1.5, -0.25))).norm() < 1e-12);
        }
    }

    #[test]
    fn deflate_removes_one_root() {
        let p = from_roots(&[c(1.0, 0.0), c(2.0, 0.0), c(-0.5, 0.0)]);
        let q = p.deflate(c(2.0, 0.0));
        let rm = q.roots().unwrap();
        assert!((rm.roots[0] - c(-0.5, 0.0)).norm() < 1e-12);
        assert!((rm.roots[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exact_division_round_trip() {
        let a = Polynomial::from_real(&[1.0, 2.0, 3.0]);
        let b = Polynomial::from_real(&[-0.5, 1.0, 1.0, 0.25]);
        let prod = &a * &b;
        let q = prod.try_div_exact(&a, 1e-12).unwrap();
        assert!((&q - &b).max_coeff_norm() < 1e-12);
        let bad = &prod + &Polynomial::from_real(&[0.1]);
        assert!(bad.try_div_exact(&a, 1e-12).is_err());
    }

    #[test]
    fn poly_det_small_matches_hand_expansion() {
        // det [[x, 1], [2, x]] = x^2 - 2
        let x = Polynomial::monomial(1);
        let m = vec![
            vec![x.clone(), Polynomial::one()],
            vec![Polynomial::from_real(&[2.0]), x.clone()],
        ];
        assert_eq!(poly_det(&m), Polynomial::from_real(&[-2.0, 0.0, 1.0]));
    }

    #[test]
    fn poly_det_bareiss_agrees_with_cofactor() {
        // 5×5 with entries (x + i·j small constants): compare both engines.
        let n = 5;
        let mut m = Vec::new();
        for i in 0..n {
            let mut row = Vec::new();
            for j in 0..n {
                row.push(Polynomial::new(vec![
                    c(0.3 * (i as f64) - 0.2 * (j as f64), 0.1),
                    c(1.0 + 0.1 * (i as f64) * (j as f64), 0.0),
                ]));
            }
            m.push(row);
        }
        let det_b = poly_det(&m);
        let det_c = det_cofactor(&m);
        assert!((&det_b - &det_c).max_coeff_norm() < 1e-8 * det_c.max_coeff_norm().max(1.0));
    }

    #[test]
    fn pairing_reports_worst_distance() {
        let a = [c(0.0, 0.0), c(1.0, 0.0)];
        let b = [c(1.0, 0.05), c(0.0, 0.0)];
        let rep = pair_roots(&a, &b);
        assert!((rep.max_distance - 0.05).abs() < 1e-15);
    }

    // ---- property tests ----

    fn separated_root_sets() -> impl Strategy<Value = Vec<C64>> {
        // Subsets of a fixed lattice keep pairwise separation ≥ 0.5 without
        // rejection sampling.
        let lattice: Vec<(i32, i32)> =
            (-3..=3).flat_map(|re| (-3..=3).map(move |im| (re, im))).collect();
        proptest::sample::subsequence(lattice, 1..=10).prop_map(|pts| {
            pts.into_iter()
                .map(|(re, im)| c(re as f64 * 0.7, im as f64 * 0.7))
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_root_round_trip(roots in separated_root_sets()) {
            let p = from_roots(&roots);
            let rm = p.roots().unwrap();
            let q = rm.to_polynomial();
            let scale = p.max_coeff_norm().max(1.0);
            prop_assert!((&p - &q).max_coeff_norm() <= 1e-8 * scale);
        }

        #[test]
        fn prop_real_coefficients_give_conjugate_closed_roots(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 2..=11),
            lead in 0.5f64..2.0,
        ) {
            let mut cs = coeffs;
            cs.push(lead);
            let p = Polynomial::from_real(&cs);
            let rm = p.roots().unwrap();
            prop_assert!(rm.conjugation_closed(1e-6));
        }

        #[test]
        fn prop_pairing_identical_lists_is_exact(roots in separated_root_sets()) {
            let rep = pair_roots(&roots, &roots);
            prop_assert!(rep.max_distance == 0.0);
        }
    }
}
