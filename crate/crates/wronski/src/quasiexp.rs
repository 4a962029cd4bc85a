//! Quasi-exponential spaces `span{p_i(x)·Q_i^x}` / `span{p_i(x)·e^{λ_i x}}`
//! and their discrete and differential Wronskians.
//!
//! * canonical (monic echelon) bases per repeated-base group
//! * factored Wronskian values: exponential prefactor · κ · monic polynomial
//! * dimension counts and generic degree bounds
//! * step rescaling between the discrete and differential pictures
//! * confluent families: repeated-base limits with their explicit
//!   regularized determinants, plus an iterated-difference helper
//!
//! Spaces are validated lazily: construction checks shapes, while
//! [`QuasiExpSpace::standard_basis`] and the Wronskian routines detect
//! dependent members.

use crate::poly::{poly_det, Polynomial, C64};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("degenerate space")]
    Degenerate,
    #[error("identically zero Wronskian")]
    IdenticallyZero,
    #[error("multiplicative-mode discrete Wronskian requires step h = 1")]
    StepNotOne,
    #[error("step must be a nonzero real number")]
    BadStep,
    #[error("differential Wronskian requires exponent mode")]
    NeedsExponentMode,
    #[error("rescaling requires exponent mode")]
    RescaleNeedsExponentMode,
    #[error("zero base in multiplicative mode")]
    ZeroBase,
    #[error("member polynomial is zero")]
    ZeroMember,
    #[error("space has no members")]
    Empty,
    #[error("ambient degree bound l = {l} must exceed the dimension N = {n}")]
    AmbientBound { l: usize, n: usize },
}

#[derive(Debug, Error)]
pub enum ConfluentError {
    #[error("use confluent_limit")]
    CoincidentBases,
    #[error("family needs ambient degree d > N (got d = {d}, N = {n})")]
    AmbientDegree { d: usize, n: usize },
    #[error("charge polynomial degree must stay below the ambient degree")]
    ChargeDegree,
    #[error("base points must be distinct and nonzero")]
    BadBasePoints,
    #[error("multiplicities must be positive and sum to the charge count")]
    BadMultiplicities,
    #[error("base vector length must equal the charge count")]
    BadBaseVector,
}

/// Which exponential coordinate the members carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// members `p(x)·Q^x`, `param` is the base `Q`
    Multiplicative,
    /// members `p(x)·e^{λx}`, `param` is the exponent `λ`
    Exponent,
}

/// A single spanning function `p(x)·Q^x` or `p(x)·e^{λx}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub param: C64,
    pub poly: Polynomial,
}

/// Span of finitely many quasi-exponentials, one [`Mode`] throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiExpSpace {
    pub mode: Mode,
    pub members: Vec<Member>,
}

/// Factored Wronskian: `prefactor(x) · kappa · monic(x)`.
#[derive(Debug, Clone)]
pub struct WronskianValue {
    pub kappa: C64,
    pub monic: Polynomial,
    pub prefactor: Prefactor,
}

/// Exponential prefactor descriptor of a factored Wronskian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prefactor {
    /// `(∏ Q_i)^x`
    BaseProduct(C64),
    /// `e^{(Σ λ_i) x}`
    ExponentSum(C64),
}

impl WronskianValue {
    /// `κ · monic`, the polynomial factor with its constant restored.
    pub fn scaled(&self) -> Polynomial {
        self.monic.scale(self.kappa)
    }
}

fn params_equal(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

impl QuasiExpSpace {
    pub fn new(mode: Mode, members: Vec<Member>) -> Result<Self, SpaceError> {
        if members.is_empty() {
            return Err(SpaceError::Empty);
        }
        for m in &members {
            if m.poly.is_zero() {
                return Err(SpaceError::ZeroMember);
            }
            if mode == Mode::Multiplicative && m.param.norm() == 0.0 {
                return Err(SpaceError::ZeroBase);
            }
        }
        Ok(QuasiExpSpace { mode, members })
    }

    pub fn dimension(&self) -> usize {
        self.members.len()
    }

    /// Member indices grouped by (numerically) equal parameter, in order of
    /// first occurrence.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, m) in self.members.iter().enumerate() {
            match groups
                .iter_mut()
                .find(|g| params_equal(self.members[g[0]].param, m.param))
            {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        groups
    }

    /// Monic echelon basis: within every equal-parameter group the degrees
    /// are strictly increasing, each part is monic, and a part has no
    /// coefficient at another part's degree.
    pub fn standard_basis(&self) -> Result<QuasiExpSpace, SpaceError> {
        let mut out: Vec<Member> = Vec::with_capacity(self.members.len());
        for group in self.groups() {
            let param = self.members[group[0]].param;
            let mut work: Vec<Polynomial> =
                group.iter().map(|&i| self.members[i].poly.clone()).collect();
            let scale = work.iter().fold(0.0f64, |a, p| a.max(p.max_coeff_norm()));
            let cut = 1e-10 * scale;
            let mut fixed: Vec<Polynomial> = Vec::new();
            while !work.is_empty() {
                // Highest-degree polynomial becomes the next pivot.
                let pick = work
                    .iter()
                    .enumerate()
                    .max_by_key(|(_, p)| p.degree().unwrap_or(0))
                    .map(|(i, _)| i)
                    .unwrap();
                let pivot = work.swap_remove(pick);
                let pivot = pivot.trim_relative_to(1e-12, scale);
                if pivot.is_negligible(cut) {
                    return Err(SpaceError::Degenerate);
                }
                let deg = pivot.degree().unwrap();
                let (_, pivot) = pivot.monic().unwrap();
                for p in work.iter_mut() {
                    let c = p.coeff(deg);
                    if c.norm() > 0.0 {
                        *p = &*p - &pivot.scale(c);
                    }
                    *p = p.trim_relative_to(1e-12, scale);
                }
                fixed.push(pivot);
            }
            // Back-substitution: clear every lower pivot degree from the
            // higher parts, restoring monic leading coefficients at the end.
            fixed.reverse(); // ascending degree
            for hi in 1..fixed.len() {
                for lo in 0..hi {
                    let d = fixed[lo].degree().unwrap();
                    let c = fixed[hi].coeff(d);
                    if c.norm() > 0.0 {
                        let sub = fixed[lo].scale(c);
                        fixed[hi] = &fixed[hi] - &sub;
                    }
                }
            }
            for p in fixed {
                out.push(Member { param, poly: p });
            }
        }
        QuasiExpSpace::new(self.mode, out)
    }

    /// Discrete Wronskian `det(f_i(x+(j-1)h))` in factored form.
    ///
    /// Multiplicative mode is restricted to `h = 1`; exponent mode accepts
    /// any nonzero real step.
    pub fn discrete_wronskian(&self, h: f64) -> Result<WronskianValue, SpaceError> {
        let n = self.members.len();
        let (mults, shift): (Vec<C64>, f64) = match self.mode {
            Mode::Multiplicative => {
                if h != 1.0 {
                    return Err(SpaceError::StepNotOne);
                }
                (self.members.iter().map(|m| m.param).collect(), 1.0)
            }
            Mode::Exponent => {
                if !(h != 0.0 && h.is_finite()) {
                    return Err(SpaceError::BadStep);
                }
                (
                    self.members.iter().map(|m| (m.param * C64::new(h, 0.0)).exp()).collect(),
                    h,
                )
            }
        };
        let mut matrix = Vec::with_capacity(n);
        for (i, m) in self.members.iter().enumerate() {
            let mut row = Vec::with_capacity(n);
            let mut mult = C64::new(1.0, 0.0);
            for j in 0..n {
                let shifted = m.poly.shift(C64::new(j as f64 * shift, 0.0));
                row.push(shifted.scale(mult));
                if j + 1 < n {
                    mult *= mults[i];
                }
            }
            matrix.push(row);
        }
        let det = poly_det(&matrix);
        self.factor_det(det, &matrix)
    }

    /// Differential Wronskian `det(f_i^{(j-1)})` for exponent-mode spaces.
    pub fn wronskian(&self) -> Result<WronskianValue, SpaceError> {
        if self.mode != Mode::Exponent {
            return Err(SpaceError::NeedsExponentMode);
        }
        let n = self.members.len();
        let mut matrix = Vec::with_capacity(n);
        for m in &self.members {
            let mut row = Vec::with_capacity(n);
            let mut g = m.poly.clone();
            for j in 0..n {
                if j > 0 {
                    g = &g.scale(m.param) + &g.derivative();
                }
                row.push(g.clone());
            }
            matrix.push(row);
        }
        let det = poly_det(&matrix);
        self.factor_det(det, &matrix)
    }

    fn factor_det(
        &self,
        det: Polynomial,
        matrix: &[Vec<Polynomial>],
    ) -> Result<WronskianValue, SpaceError> {
        let row_scale: f64 = matrix
            .iter()
            .map(|row| row.iter().fold(0.0f64, |a, p| a.max(p.max_coeff_norm())).max(1.0))
            .product();
        let det = det.trim_relative_to(1e-12, det.max_coeff_norm());
        if det.is_negligible(1e-10 * row_scale) {
            return Err(SpaceError::IdenticallyZero);
        }
        let (kappa, monic) = det.monic().unwrap();
        let prefactor = match self.mode {
            Mode::Multiplicative => {
                Prefactor::BaseProduct(self.members.iter().map(|m| m.param).product())
            }
            Mode::Exponent => {
                Prefactor::ExponentSum(self.members.iter().map(|m| m.param).sum())
            }
        };
        Ok(WronskianValue { kappa, monic, prefactor })
    }

    /// Dimension count for spaces spanned inside degree-`l` blocks: the
    /// ambient family of such spaces has `n = (l-1)N - Σ n_i(n_i-1) + 1`
    /// essential parameters, and generic monic Wronskians reach degree `n-1`.
    pub fn expected_degree(&self, l: usize) -> Result<usize, SpaceError> {
        let sizes: Vec<usize> = self.groups().iter().map(|g| g.len()).collect();
        expected_degree(l, &sizes)
    }

    /// Sends `p(x)e^{λx}` to the multiplicative member `p̃(x)·(e^{hλ})^x`
    /// with `p̃` the monic rescaling of `p(hx)`; Wronskian roots move by
    /// `z ↦ z/h`.
    pub fn rescale(&self, h: f64) -> Result<QuasiExpSpace, SpaceError> {
        if self.mode != Mode::Exponent {
            return Err(SpaceError::RescaleNeedsExponentMode);
        }
        if !(h != 0.0 && h.is_finite()) {
            return Err(SpaceError::BadStep);
        }
        let members = self
            .members
            .iter()
            .map(|m| {
                let scaled = m.poly.scale_arg(C64::new(h, 0.0));
                let (_, monic) = scaled.monic().expect("nonzero member");
                Member { param: (m.param * C64::new(h, 0.0)).exp(), poly: monic }
            })
            .collect();
        QuasiExpSpace::new(Mode::Multiplicative, members)
    }
}

/// Standalone form of [`QuasiExpSpace::expected_degree`] on raw group sizes.
pub fn expected_degree(l: usize, group_sizes: &[usize]) -> Result<usize, SpaceError> {
    let n_total: usize = group_sizes.iter().sum();
    if l <= n_total {
        return Err(SpaceError::AmbientBound { l, n: n_total });
    }
    let base = (l - 1) * n_total + 1;
    let defect: usize = group_sizes.iter().map(|&s| s * (s - 1)).sum();
    Ok(base - defect)
}

// ---- serde ----

#[derive(Serialize, Deserialize)]
struct MemberRepr {
    #[serde(skip_serializing_if = "Option::is_none")]
    base: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<[f64; 2]>,
    poly: Polynomial,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    mode: Mode,
    members: Vec<MemberRepr>,
}

impl Serialize for QuasiExpSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let members = self
            .members
            .iter()
            .map(|m| {
                let pair = [m.param.re, m.param.im];
                match self.mode {
                    Mode::Multiplicative => {
                        MemberRepr { base: Some(pair), exponent: None, poly: m.poly.clone() }
                    }
                    Mode::Exponent => {
                        MemberRepr { base: None, exponent: Some(pair), poly: m.poly.clone() }
                    }
                }
            })
            .collect();
        SpaceRepr { mode: self.mode, members }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuasiExpSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SpaceRepr::deserialize(deserializer)?;
        let mut members = Vec::with_capacity(repr.members.len());
        for m in repr.members {
            let pair = match (repr.mode, m.base, m.exponent) {
                (Mode::Multiplicative, Some(p), None) => p,
                (Mode::Exponent, None, Some(p)) => p,
                (Mode::Multiplicative, _, _) => {
                    return Err(D::Error::custom(
                        "multiplicative members need a \"base\" field and no \"exponent\"",
                    ))
                }
                (Mode::Exponent, _, _) => {
                    return Err(D::Error::custom(
                        "exponent members need an \"exponent\" field and no \"base\"",
                    ))
                }
            };
            members.push(Member { param: C64::new(pair[0], pair[1]), poly: m.poly });
        }
        QuasiExpSpace::new(repr.mode, members).map_err(D::Error::custom)
    }
}

impl Serialize for WronskianValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            kappa: [f64; 2],
            monic: &'a Polynomial,
            prefactor: PrefactorRepr,
        }
        #[derive(Serialize)]
        struct PrefactorRepr {
            kind: &'static str,
            value: [f64; 2],
        }
        let prefactor = match self.prefactor {
            Prefactor::BaseProduct(q) => {
                PrefactorRepr { kind: "base_product", value: [q.re, q.im] }
            }
            Prefactor::ExponentSum(l) => {
                PrefactorRepr { kind: "exponent_sum", value: [l.re, l.im] }
            }
        };
        Repr { kappa: [self.kappa.re, self.kappa.im], monic: &self.monic, prefactor }
            .serialize(serializer)
    }
}

// ---- confluent families ----

/// Polynomial family `p(x,Q,𝐐) = x^d + Σ_j ∏_{r<j}(Q-Q_r)·q_j(x)` whose
/// Wronskians stay meaningful as bases collide.
#[derive(Debug, Clone)]
pub struct ConfluentFamily {
    /// ambient degree `d` (strictly larger than the number of charges)
    pub ambient_degree: usize,
    /// charge polynomials `q_1..q_N`, each of degree `< d`
    pub charges: Vec<Polynomial>,
    /// distinct limit base points `Q°_1..Q°_k`
    pub base_points: Vec<C64>,
    /// multiplicities `n_1..n_k`, summing to `N`
    pub multiplicities: Vec<usize>,
}

/// Output of [`ConfluentFamily::confluent_limit`]: the explicit limit space
/// and the scalar that regularizes the collapsed Vandermonde factor.
#[derive(Debug, Clone)]
pub struct ConfluentLimit {
    pub space: QuasiExpSpace,
    pub scalar: C64,
}

impl ConfluentFamily {
    pub fn new(
        ambient_degree: usize,
        charges: Vec<Polynomial>,
        base_points: Vec<C64>,
        multiplicities: Vec<usize>,
    ) -> Result<Self, ConfluentError> {
        let n = charges.len();
        if ambient_degree <= n {
            return Err(ConfluentError::AmbientDegree { d: ambient_degree, n });
        }
        if charges.iter().any(|q| q.degree().is_some_and(|d| d >= ambient_degree)) {
            return Err(ConfluentError::ChargeDegree);
        }
        if multiplicities.is_empty()
            || multiplicities.contains(&0)
            || multiplicities.iter().sum::<usize>() != n
        {
            return Err(ConfluentError::BadMultiplicities);
        }
        if base_points.len() != multiplicities.len()
            || base_points.iter().any(|q| q.norm() == 0.0)
        {
            return Err(ConfluentError::BadBasePoints);
        }
        for i in 0..base_points.len() {
            for j in i + 1..base_points.len() {
                if params_equal(base_points[i], base_points[j]) {
                    return Err(ConfluentError::BadBasePoints);
                }
            }
        }
        Ok(ConfluentFamily { ambient_degree, charges, base_points, multiplicities })
    }

    /// Limit base vector `𝐐°` flattened by multiplicity, group by group.
    pub fn expanded_bases(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for (s, &q) in self.base_points.iter().enumerate() {
            out.extend(std::iter::repeat_n(q, self.multiplicities[s]));
        }
        out
    }

    /// Staircase perturbation of `𝐐°`: member `r` of group `s` sits at
    /// `Q°_s + r·h`.
    pub fn staircase(&self, h: f64) -> Vec<C64> {
        let mut out = Vec::new();
        for (s, &q) in self.base_points.iter().enumerate() {
            for r in 0..self.multiplicities[s] {
                out.push(q + C64::new(r as f64 * h, 0.0));
            }
        }
        out
    }

    /// `p(x,Q,𝐐)` for a scalar `Q` and a full-length base vector `𝐐`.
    pub fn p_poly(&self, q_scalar: C64, bases: &[C64]) -> Polynomial {
        let mut acc = Polynomial::monomial(self.ambient_degree);
        let mut prefix = C64::new(1.0, 0.0);
        for (j, charge) in self.charges.iter().enumerate() {
            if j > 0 {
                prefix *= q_scalar - bases[j - 1];
            }
            acc = &acc + &charge.scale(prefix);
        }
        acc
    }

    /// Regularized Wronskian `W(x,𝐐)`: the base-power prefactor is dropped
    /// and the Vandermonde of `𝐐` divided out. Coincident entries of `𝐐`
    /// must go through [`ConfluentFamily::confluent_limit`] instead.
    pub fn confluent_wronskian(&self, bases: &[C64]) -> Result<Polynomial, ConfluentError> {
        let n = self.charges.len();
        if bases.len() != n {
            return Err(ConfluentError::BadBaseVector);
        }
        let mut vandermonde = C64::new(1.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                if params_equal(bases[i], bases[j]) {
                    return Err(ConfluentError::CoincidentBases);
                }
                vandermonde *= bases[j] - bases[i];
            }
        }
        let mut matrix = Vec::with_capacity(n);
        for &q in bases.iter().take(n) {
            let p = self.p_poly(q, bases);
            let mut row = Vec::with_capacity(n);
            let mut mult = C64::new(1.0, 0.0);
            for j in 0..n {
                row.push(p.shift(C64::new(j as f64, 0.0)).scale(mult));
                if j + 1 < n {
                    mult *= q;
                }
            }
            matrix.push(row);
        }
        let det = poly_det(&matrix);
        Ok(det.scale(C64::new(1.0, 0.0) / vandermonde))
    }

    /// Explicit limit at `𝐐 = 𝐐°`: members `p_i°(x)·(Q°_{m(i)})^x` with
    /// `p_i° = (Q^{-r}(x+Q∂_Q)^r p(x,Q,𝐐°))|_{Q=Q°_{m(i)}}` of degree `d+r`,
    /// and the scalar `1/(∏_{i<j}(Q°_j-Q°_i)^{n_i n_j}·∏_i ∏_j (n_i-j)^j)`.
    ///
    /// The factored discrete Wronskian of the returned space, multiplied by
    /// the scalar, reproduces the limit of `confluent_wronskian` along any
    /// collapsing path; the step-family tests drive exactly that comparison.
    pub fn confluent_limit(&self) -> Result<ConfluentLimit, ConfluentError> {
        let expanded = self.expanded_bases();
        // p(x,Q,𝐐°) as coefficients of powers of Q.
        let n = self.charges.len();
        let mut by_qpow: Vec<Polynomial> = vec![Polynomial::zero(); n.max(1)];
        by_qpow[0] = Polynomial::monomial(self.ambient_degree);
        let mut prefix = vec![C64::new(1.0, 0.0)]; // coefficients of ∏_{r<j}(Q - Q°_r)
        for (j, charge) in self.charges.iter().enumerate() {
            if j > 0 {
                // prefix *= (Q - expanded[j-1])
                let root = expanded[j - 1];
                let mut next = vec![C64::new(0.0, 0.0); prefix.len() + 1];
                for (k, &c) in prefix.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * root;
                }
                prefix = next;
            }
            for (k, &c) in prefix.iter().enumerate() {
                if k < by_qpow.len() {
                    by_qpow[k] = &by_qpow[k] + &charge.scale(c);
                }
            }
        }
        let mut members = Vec::with_capacity(n);
        for (s, &q0) in self.base_points.iter().enumerate() {
            for r in 0..self.multiplicities[s] {
                // (x+Q∂_Q)^r acts diagonally: c_k(x)Q^k ↦ (x+k)^r c_k(x) Q^k.
                let mut p = Polynomial::zero();
                for (k, ck) in by_qpow.iter().enumerate() {
                    if ck.is_zero() {
                        continue;
                    }
                    let mut factor = Polynomial::one();
                    let lin = Polynomial::new(vec![C64::new(k as f64, 0.0), C64::new(1.0, 0.0)]);
                    for _ in 0..r {
                        factor = &factor * &lin;
                    }
                    let qpow = q0.powi(k as i32 - r as i32);
                    p = &p + &(&factor * ck).scale(qpow);
                }
                members.push(Member { param: q0, poly: p });
            }
        }
        let mut scalar = C64::new(1.0, 0.0);
        for i in 0..self.base_points.len() {
            for j in i + 1..self.base_points.len() {
                let power = (self.multiplicities[i] * self.multiplicities[j]) as i32;
                scalar *= (self.base_points[j] - self.base_points[i]).powi(power);
            }
        }
        for &m in &self.multiplicities {
            for j in 1..m {
                scalar *= C64::new(((m - j) as f64).powi(j as i32), 0.0);
            }
        }
        let space =
            QuasiExpSpace::new(Mode::Multiplicative, members).map_err(|_| ConfluentError::BadBasePoints)?;
        Ok(ConfluentLimit { space, scalar: C64::new(1.0, 0.0) / scalar })
    }
}

/// Iterated forward difference `τ^order` with step `h` in the base variable:
/// `τf(Q) = (f(Q+h)-f(Q))/h`, converging to `f^{(order)}(Q)` at rate `O(h)`.
pub fn discrete_derivative(
    f: &dyn Fn(C64) -> C64,
    q: C64,
    h: f64,
    order: usize,
) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut binom = 1.0f64;
    for k in 0..=order {
        let sign = if (order - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let arg = q + C64::new(k as f64 * h, 0.0);
        acc += f(arg) * C64::new(sign * binom, 0.0);
        binom = binom * (order - k) as f64 / (k + 1) as f64;
    }
    acc / C64::new(h.powi(order as i32), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::pair_roots;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mult_space(data: &[(f64, &[f64])]) -> QuasiExpSpace {
        QuasiExpSpace::new(
            Mode::Multiplicative,
            data.iter()
                .map(|(q, p)| Member { param: c(*q, 0.0), poly: Polynomial::from_real(p) })
                .collect(),
        )
        .unwrap()
    }

    fn exp_space(data: &[(f64, &[f64])]) -> QuasiExpSpace {
        QuasiExpSpace::new(
            Mode::Exponent,
            data.iter()
                .map(|(l, p)| Member { param: c(*l, 0.0), poly: Polynomial::from_real(p) })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_constant_members_give_vandermonde_constant() {
        // bases (1,3), parts (1,1): monic part 1, κ = 3-1 = 2
        let v = mult_space(&[(1.0, &[1.0]), (3.0, &[1.0])]);
        let w = v.discrete_wronskian(1.0).unwrap();
        assert_eq!(w.monic, Polynomial::one());
        assert!((w.kappa - c(2.0, 0.0)).norm() < 1e-14);
        assert_eq!(w.prefactor, Prefactor::BaseProduct(c(3.0, 0.0)));
    }

    #[test]
    fn single_member_keeps_its_polynomial() {
        // 3x·2^x: monic part x, κ = 3
        let v = mult_space(&[(2.0, &[0.0, 3.0])]);
        let w = v.discrete_wronskian(1.0).unwrap();
        assert_eq!(w.monic, Polynomial::monomial(1));
        assert!((w.kappa - c(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn multiplicative_step_must_be_one() {
        let v = mult_space(&[(2.0, &[1.0])]);
        let err = v.discrete_wronskian(0.5).unwrap_err();
        assert_eq!(err.to_string(), "multiplicative-mode discrete Wronskian requires step h = 1");
    }

    #[test]
    fn dependent_members_give_zero_wronskian() {
        let v = mult_space(&[(2.0, &[0.0, 1.0]), (2.0, &[0.0, 2.0])]);
        let err = v.discrete_wronskian(1.0).unwrap_err();
        assert_eq!(err.to_string(), "identically zero Wronskian");
    }

    #[test]
    fn standard_basis_sorts_and_separates_degrees() {
        let v = mult_space(&[(2.0, &[1.0, 1.0]), (2.0, &[0.0, 1.0])]);
        let s = v.standard_basis().unwrap();
        assert_eq!(s.members[0].poly, Polynomial::one());
        assert_eq!(s.members[1].poly, Polynomial::monomial(1));
    }

    #[test]
    fn standard_basis_clears_lower_pivot_degrees() {
        // group degrees (1,3): the cubic may keep x^2 and constant terms but
        // loses its x-coefficient (the linear member's degree).
        let v = mult_space(&[(1.0, &[2.0, 1.0]), (1.0, &[1.0, 3.0, 0.5, 1.0])]);
        let s = v.standard_basis().unwrap();
        assert_eq!(s.members[0].poly.degree(), Some(1));
        assert_eq!(s.members[1].poly.degree(), Some(3));
        assert!(s.members[1].poly.coeff(1).norm() < 1e-12);
        assert!((s.members[0].poly.leading().unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!((s.members[1].poly.leading().unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn standard_basis_detects_dependence() {
        let v = mult_space(&[(2.0, &[0.0, 1.0]), (2.0, &[0.0, 3.0])]);
        let err = v.standard_basis().unwrap_err();
        assert_eq!(err.to_string(), "degenerate space");
    }

    #[test]
    fn vandermonde_degeneration_for_constant_parts() {
        let bases = [0.5, 1.25, 2.0, -1.5];
        let v = mult_space(&[
            (bases[0], &[1.0]),
            (bases[1], &[1.0]),
            (bases[2], &[1.0]),
            (bases[3], &[1.0]),
        ]);
        let w = v.discrete_wronskian(1.0).unwrap();
        assert_eq!(w.monic, Polynomial::one());
        let mut expect = 1.0;
        for i in 0..4 {
            for j in i + 1..4 {
                expect *= bases[j] - bases[i];
            }
        }
        assert!((w.kappa - c(expect, 0.0)).norm() < 1e-10 * expect.abs());
    }

    #[test]
    fn differential_wronskian_of_mixed_pair() {
        // {1·e^{0x}, x·e^{x}}: rows (1,0), (x, x+1) -> det = x+1
        let v = exp_space(&[(0.0, &[1.0]), (1.0, &[0.0, 1.0])]);
        let w = v.wronskian().unwrap();
        assert_eq!(w.monic, Polynomial::from_real(&[1.0, 1.0]));
        assert!((w.kappa - c(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(w.prefactor, Prefactor::ExponentSum(c(1.0, 0.0)));
    }

    #[test]
    fn differential_wronskian_needs_exponent_mode() {
        let v = mult_space(&[(2.0, &[1.0])]);
        assert!(matches!(v.wronskian(), Err(SpaceError::NeedsExponentMode)));
    }

    #[test]
    fn basis_change_keeps_monic_part_and_scales_kappa() {
        let v = mult_space(&[(1.0, &[0.5, 1.0]), (1.0, &[1.0, 0.0, 0.0, 1.0]), (2.5, &[1.0, 1.0])]);
        let w0 = v.discrete_wronskian(1.0).unwrap();
        // Recombine inside the repeated-base group by [[2,1],[-1,1]], det 3.
        let p0 = &v.members[0].poly;
        let p1 = &v.members[1].poly;
        let q0 = &p0.scale(c(2.0, 0.0)) + &p1.scale(c(1.0, 0.0));
        let q1 = &p0.scale(c(-1.0, 0.0)) + &p1.scale(c(1.0, 0.0));
        let v2 = QuasiExpSpace::new(
            Mode::Multiplicative,
            vec![
                Member { param: c(1.0, 0.0), poly: q0 },
                Member { param: c(1.0, 0.0), poly: q1 },
                v.members[2].clone(),
            ],
        )
        .unwrap();
        let w1 = v2.discrete_wronskian(1.0).unwrap();
        assert!((&w0.monic - &w1.monic).max_coeff_norm() <= 1e-9);
        let ratio = w1.kappa / w0.kappa;
        assert!((ratio - c(3.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn expected_degree_requires_room() {
        assert!(matches!(
            expected_degree(2, &[1, 1]),
            Err(SpaceError::AmbientBound { l: 2, n: 2 })
        ));
        // two singleton groups below degree 3: n = 2·2 + 1 = 5
        assert_eq!(expected_degree(3, &[1, 1]).unwrap(), 5);
        assert_eq!(expected_degree(4, &[2]).unwrap(), 5);
    }

    #[test]
    fn expected_degree_bounds_generic_monic_degree() {
        // generic full-degree parts reach the bound n-1 exactly
        let v = mult_space(&[(1.5, &[0.3, -0.7, 1.0]), (0.5, &[-0.4, 0.2, 1.0])]);
        let n = v.expected_degree(3).unwrap();
        let w = v.discrete_wronskian(1.0).unwrap();
        assert_eq!(w.monic.degree().unwrap(), n - 1);
        // a defective-degree instance stays strictly below
        let v2 = mult_space(&[(1.5, &[1.0]), (0.5, &[-0.4, 0.2, 1.0])]);
        let w2 = v2.discrete_wronskian(1.0).unwrap();
        assert!(w2.monic.degree().unwrap() < v2.expected_degree(3).unwrap() - 1);
    }

    #[test]
    fn rescale_maps_roots_by_inverse_step() {
        let v = exp_space(&[(0.4, &[0.3, 1.0]), (-0.6, &[-1.0, 0.5, 1.0])]);
        let h = 0.7;
        let wh = v.discrete_wronskian(h).unwrap();
        let resc = v.rescale(h).unwrap();
        assert_eq!(resc.mode, Mode::Multiplicative);
        let w1 = resc.discrete_wronskian(1.0).unwrap();
        let lhs: Vec<C64> = wh.monic.roots().unwrap().roots.iter().map(|z| z / c(h, 0.0)).collect();
        let rhs = w1.monic.roots().unwrap().roots;
        assert_eq!(lhs.len(), rhs.len());
        let rep = pair_roots(&lhs, &rhs);
        assert!(rep.max_distance < 1e-8, "max distance {}", rep.max_distance);
    }

    #[test]
    fn discrete_derivative_converges_linearly() {
        let f = |q: C64| q * q * q;
        let q0 = c(1.3, 0.0);
        let exact = c(6.0 * 1.3, 0.0); // (q^3)'' = 6q
        let e1 = (discrete_derivative(&f, q0, 1e-3, 2) - exact).norm();
        let e2 = (discrete_derivative(&f, q0, 5e-4, 2) - exact).norm();
        assert!(e1 / e2 > 1.5 && e1 / e2 < 2.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn confluent_wronskian_rejects_coincident_bases() {
        let fam = ConfluentFamily::new(
            3,
            vec![Polynomial::from_real(&[0.5, 1.0]), Polynomial::from_real(&[1.0, -0.5])],
            vec![c(1.2, 0.0)],
            vec![2],
        )
        .unwrap();
        let err = fam.confluent_wronskian(&[c(1.2, 0.0), c(1.2, 0.0)]).unwrap_err();
        assert_eq!(err.to_string(), "use confluent_limit");
    }

    #[test]
    fn confluent_wronskian_stays_bounded_along_a_collapsing_path() {
        let fam = ConfluentFamily::new(
            3,
            vec![Polynomial::from_real(&[0.5, 1.0]), Polynomial::from_real(&[1.0, -0.5])],
            vec![c(1.2, 0.0)],
            vec![2],
        )
        .unwrap();
        let mut norms = Vec::new();
        for m in 3..=6 {
            let delta = 10f64.powi(-m);
            let bases = [c(1.2, 0.0), c(1.2 + delta, 0.0)];
            let w = fam.confluent_wronskian(&bases).unwrap();
            norms.push(w.max_coeff_norm());
        }
        let top = norms.iter().fold(0.0f64, |a, &b| a.max(b));
        let bottom = norms.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        assert!(top.is_finite() && top / bottom < 10.0, "norms {norms:?}");
    }

    #[test]
    fn confluent_limit_matches_extrapolated_family() {
        let fam = ConfluentFamily::new(
            3,
            vec![Polynomial::from_real(&[0.5, 1.0]), Polynomial::from_real(&[1.0, -0.5])],
            vec![c(1.2, 0.0)],
            vec![2],
        )
        .unwrap();
        let limit = fam.confluent_limit().unwrap();
        let wz = limit.space.discrete_wronskian(1.0).unwrap();
        let direct = wz.scaled().scale(limit.scalar);

        let h0 = 4e-3;
        let level = |h: f64| fam.confluent_wronskian(&fam.staircase(h)).unwrap();
        let w1 = level(h0);
        let w2 = level(h0 / 2.0);
        let w3 = level(h0 / 4.0);
        let t1 = &w2.scale(c(2.0, 0.0)) - &w1;
        let t2 = &w3.scale(c(2.0, 0.0)) - &w2;
        let extrap = (&t2.scale(c(4.0, 0.0)) - &t1).scale(c(1.0 / 3.0, 0.0));

        let scale = direct.max_coeff_norm().max(1.0);
        let resid = (&extrap - &direct).max_coeff_norm() / scale;
        assert!(resid <= 1e-6, "residual {resid}");
    }

    #[test]
    fn space_json_round_trip() {
        let v = mult_space(&[(2.0, &[0.0, 3.0]), (1.0, &[1.0])]);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("\"mode\":\"multiplicative\"") && text.contains("\"base\""));
        let back: QuasiExpSpace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        let bad = text.replace("base", "exponent");
        assert!(serde_json::from_str::<QuasiExpSpace>(&bad).is_err());
    }

    #[test]
    fn kappa_matches_degree_factor_for_single_group() {
        // one group, degrees (1,3): leading coefficient is 3-1 = 2 for any
        // admissible coefficients
        for (a, b, cc) in [(0.4, -1.0, 2.2), (-2.0, 0.1, 0.0), (1.0, 3.0, -0.7)] {
            let v = mult_space(&[(1.0, &[a, 1.0]), (1.0, &[cc, 0.0, b, 1.0])]);
            let w = v.discrete_wronskian(1.0).unwrap();
            assert!((w.kappa - c(2.0, 0.0)).norm() < 1e-10, "a={a} b={b} c={cc}");
        }
    }

}
