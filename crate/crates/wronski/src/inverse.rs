//! Inverse problem: find all spaces with a prescribed Wronskian root
//! multiset, given the base/degree structure of the answer.
//!
//! The unknowns are the free coefficients of the standard-basis member
//! polynomials; matching the Wronskian determinant against the target monic
//! polynomial coefficient-by-coefficient gives a square polynomial system.
//! A damped multistart Newton solver enumerates its solutions, with the
//! Jacobian computed exactly from row-linearity of the determinant. On top
//! of the solver sit the closed reality conditions for the two worked
//! two-parameter families and the grid scanner comparing both.

use crate::config::{tol, RunConfig};
use crate::linalg;
use crate::poly::{from_roots, poly_det, PolyError, Polynomial, C64};
use crate::quasiexp::{Member, Mode, QuasiExpSpace, SpaceError};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InvError {
    #[error("system is not square: {unknowns} unknown coefficients vs {equations} target roots")]
    NotSquare { unknowns: usize, equations: usize },
    #[error("bases must be pairwise distinct across groups")]
    DuplicateBase,
    #[error("multiplicative bases must be nonzero")]
    ZeroBase,
    #[error("degrees within a group must be strictly increasing")]
    BadDegrees,
    #[error("structure has no groups")]
    Empty,
    #[error("bipartition search too large")]
    BipartitionTooLarge,
    #[error("grid has {0} points; the scan limit is 1000000")]
    GridTooLarge(usize),
    #[error("unknown example number {0}; supported: 1, 2")]
    UnknownExample(u8),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One group of members sharing a base (or exponent): strictly increasing
/// standard-basis degrees.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    pub param: f64,
    pub degrees: Vec<usize>,
}

/// Flat coordinate of one unknown coefficient.
#[derive(Debug, Clone, Copy)]
struct Slot {
    group: usize,
    member: usize,
    power: usize,
}

/// Square inverse problem: structure plus target root multiset.
#[derive(Debug, Clone)]
pub struct InverseProblem {
    pub mode: Mode,
    pub targets: Vec<C64>,
    pub groups: Vec<GroupSpec>,
    target_poly: Polynomial,
    slots: Vec<Slot>,
    kappa_struct: C64,
    size: usize,
}

impl InverseProblem {
    pub fn new(mode: Mode, targets: Vec<C64>, groups: Vec<GroupSpec>) -> Result<Self, InvError> {
        if groups.is_empty() {
            return Err(InvError::Empty);
        }
        let scale = groups.iter().fold(1.0f64, |a, g| a.max(g.param.abs()));
        for (i, g) in groups.iter().enumerate() {
            if g.degrees.is_empty() || g.degrees.windows(2).any(|w| w[0] >= w[1]) {
                return Err(InvError::BadDegrees);
            }
            if mode == Mode::Multiplicative && g.param.abs() <= 1e-12 * scale {
                return Err(InvError::ZeroBase);
            }
            for other in &groups[..i] {
                if (g.param - other.param).abs() <= 1e-12 * scale {
                    return Err(InvError::DuplicateBase);
                }
            }
        }
        let mut slots = Vec::new();
        for (gi, g) in groups.iter().enumerate() {
            for (mi, &d) in g.degrees.iter().enumerate() {
                let pivots = &g.degrees[..mi];
                for power in 0..d {
                    if !pivots.contains(&power) {
                        slots.push(Slot { group: gi, member: mi, power });
                    }
                }
            }
        }
        let size = slots.len();
        if targets.len() != size {
            return Err(InvError::NotSquare { unknowns: size, equations: targets.len() });
        }
        let target_poly = from_roots(&targets);
        let mut problem = InverseProblem {
            mode,
            targets,
            groups,
            target_poly,
            slots,
            kappa_struct: C64::new(0.0, 0.0),
            size,
        };
        let at_zero = problem.raw_det(&vec![C64::new(0.0, 0.0); size]);
        debug_assert_eq!(at_zero.degree(), Some(size));
        problem.kappa_struct = at_zero.leading().expect("monomial structure is independent");
        Ok(problem)
    }

    pub fn system_size(&self) -> usize {
        self.size
    }

    /// Member polynomials for a coefficient vector: monic of the prescribed
    /// degree, zero at earlier pivot degrees of the same group.
    fn build_members(&self, u: &[C64]) -> Vec<Vec<Polynomial>> {
        let mut members: Vec<Vec<Polynomial>> = self
            .groups
            .iter()
            .map(|g| {
                g.degrees
                    .iter()
                    .map(|&d| Polynomial::monomial(d))
                    .collect()
            })
            .collect();
        for (slot, &value) in self.slots.iter().zip(u) {
            let p = &mut members[slot.group][slot.member];
            let mut coeffs = p.coeffs().to_vec();
            coeffs[slot.power] = value;
            *p = Polynomial::new(coeffs);
        }
        members
    }

    /// Raw Wronskian determinant of the flattened member list.
    fn det_of(&self, members: &[Vec<Polynomial>]) -> Polynomial {
        let n = members.iter().map(|g| g.len()).sum::<usize>();
        let mut matrix: Vec<Vec<Polynomial>> = Vec::with_capacity(n);
        for (gi, group) in members.iter().enumerate() {
            let param = self.groups[gi].param;
            for p in group {
                let mut row = Vec::with_capacity(n);
                match self.mode {
                    Mode::Multiplicative => {
                        let mut qpow = C64::new(1.0, 0.0);
                        for j in 0..n {
                            if j > 0 {
                                qpow *= C64::new(param, 0.0);
                            }
                            row.push(p.shift(C64::new(j as f64, 0.0)).scale(qpow));
                        }
                    }
                    Mode::Exponent => {
                        let mut g = p.clone();
                        for j in 0..n {
                            if j > 0 {
                                g = &g.scale(C64::new(param, 0.0)) + &g.derivative();
                            }
                            row.push(g.clone());
                        }
                    }
                }
                matrix.push(row);
            }
        }
        poly_det(&matrix)
    }

    fn raw_det(&self, u: &[C64]) -> Polynomial {
        self.det_of(&self.build_members(u))
    }

    /// Residual vector: low coefficients of `det − κ·target`.
    fn residual(&self, u: &[C64]) -> DVector<C64> {
        let det = self.raw_det(u);
        DVector::from_iterator(
            self.size,
            (0..self.size).map(|k| det.coeff(k) - self.kappa_struct * self.target_poly.coeff(k)),
        )
    }

    /// Exact Jacobian: the determinant is linear in each member row, so the
    /// partial under one coefficient is the determinant with that member
    /// replaced by the bare monomial of the coefficient's power.
    fn jacobian(&self, u: &[C64]) -> DMatrix<C64> {
        let members = self.build_members(u);
        let mut jac = DMatrix::<C64>::zeros(self.size, self.size);
        for (col, slot) in self.slots.iter().enumerate() {
            let mut modified = members.clone();
            modified[slot.group][slot.member] = Polynomial::monomial(slot.power);
            let det = self.det_of(&modified);
            for k in 0..self.size {
                jac[(k, col)] = det.coeff(k);
            }
        }
        jac
    }

    fn scale(&self) -> f64 {
        (self.kappa_struct.norm() * self.target_poly.max_coeff_norm()).max(1.0)
    }

    fn newton(&self, start: &[C64]) -> Option<Vec<C64>> {
        let scale = self.scale();
        let mut u: DVector<C64> = DVector::from_column_slice(start);
        let mut f = self.residual(u.as_slice());
        for _ in 0..80 {
            if f.norm() <= 1e-12 * scale {
                return Some(u.as_slice().to_vec());
            }
            let jac = self.jacobian(u.as_slice());
            let step = linalg::solve(&jac, &(-&f)).ok()?;
            let mut lambda = 1.0f64;
            let mut accepted = false;
            for _ in 0..10 {
                let trial = &u + &step * C64::new(lambda, 0.0);
                let ft = self.residual(trial.as_slice());
                if ft.norm() < (1.0 - 0.25 * lambda) * f.norm() {
                    u = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                return None;
            }
        }
        (f.norm() <= 1e-10 * scale).then(|| u.as_slice().to_vec())
    }

    /// Multistart enumeration of solutions. Start 0 is the all-monomial
    /// configuration; the rest draw complex Gaussian coefficients scaled to
    /// the magnitude of the target roots, each from its own seeded stream.
    pub fn solve_inverse(&self, cfg: &RunConfig) -> SolutionSet {
        let rho = self
            .targets
            .iter()
            .fold(1.0f64, |a, z| a.max(z.norm()));
        let mut found: Vec<Vec<C64>> = Vec::new();
        let mut first_seen: Vec<usize> = Vec::new();
        let starts = cfg.starts.max(1);
        for k in 0..starts {
            let start = if k == 0 {
                vec![C64::new(0.0, 0.0); self.size]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(k as u64);
                self.slots
                    .iter()
                    .map(|slot| {
                        let d = self.groups[slot.group].degrees[slot.member];
                        let mag = rho.powi((d - slot.power) as i32);
                        C64::new(gaussian(&mut rng) * mag, gaussian(&mut rng) * mag)
                    })
                    .collect()
            };
            let Some(u) = self.newton(&start) else { continue };
            let u_norm = u.iter().fold(0.0f64, |a, z| a.max(z.norm()));
            let radius = tol::DEDUP_RADIUS * (1.0 + u_norm);
            let is_new = found.iter().all(|v| {
                u.iter().zip(v).any(|(a, b)| (a - b).norm() > radius)
            });
            if is_new {
                found.push(u);
                first_seen.push(k);
            }
        }
        let mut solutions = Vec::new();
        for u in found {
            let space = self.as_space(&u);
            let Ok(space) = space else { continue };
            let forward = match self.mode {
                Mode::Multiplicative => space.discrete_wronskian(1.0),
                Mode::Exponent => space.wronskian(),
            };
            let Ok(w) = forward else { continue };
            let forward_residual =
                (&w.monic - &self.target_poly).max_coeff_norm() / self.target_poly.max_coeff_norm().max(1.0);
            if forward_residual > 1e-8 {
                continue;
            }
            let max_imag = u
                .iter()
                .fold(0.0f64, |a, z| a.max(z.im.abs() / (1.0 + z.re.abs())));
            let is_real = max_imag <= cfg.tol;
            solutions.push(InverseSolution {
                coefficients: u,
                space,
                forward_residual,
                max_imag,
                is_real,
            });
        }
        solutions.sort_by(|a, b| {
            for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
                let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        });
        let late = first_seen.iter().any(|&k| 4 * k > 3 * starts);
        let possibly_incomplete = solutions.is_empty() || late;
        SolutionSet {
            solutions,
            starts_used: starts,
            dedup_radius: tol::DEDUP_RADIUS,
            possibly_incomplete,
        }
    }

    /// Space in the quasi-exponential representation for a solution vector.
    pub fn as_space(&self, u: &[C64]) -> Result<QuasiExpSpace, SpaceError> {
        let members = self.build_members(u);
        let flat: Vec<Member> = members
            .iter()
            .enumerate()
            .flat_map(|(gi, group)| {
                let param = C64::new(self.groups[gi].param, 0.0);
                group.iter().map(move |p| Member { param, poly: p.clone() })
            })
            .collect();
        QuasiExpSpace::new(self.mode, flat)
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.random();
        if u1 > 1e-300 {
            let u2: f64 = rng.random();
            return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
    }
}

/// One solution of the inverse problem.
#[derive(Debug, Clone)]
pub struct InverseSolution {
    pub coefficients: Vec<C64>,
    pub space: QuasiExpSpace,
    pub forward_residual: f64,
    pub max_imag: f64,
    pub is_real: bool,
}

impl Serialize for InverseSolution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            coefficients: Vec<[f64; 2]>,
            space: &'a QuasiExpSpace,
            forward_residual: f64,
            max_imag: f64,
            is_real: bool,
        }
        Repr {
            coefficients: self.coefficients.iter().map(|c| [c.re, c.im]).collect(),
            space: &self.space,
            forward_residual: self.forward_residual,
            max_imag: self.max_imag,
            is_real: self.is_real,
        }
        .serialize(serializer)
    }
}

/// Deduplicated solutions plus solver diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionSet {
    pub solutions: Vec<InverseSolution>,
    pub starts_used: usize,
    pub dedup_radius: f64,
    /// set when nothing was found or a solution only appeared late in the
    /// start schedule
    pub possibly_incomplete: bool,
}

impl SolutionSet {
    pub fn real_count(&self) -> usize {
        self.solutions.iter().filter(|s| s.is_real).count()
    }
}

/// Closed reality condition for the two worked families; nonnegative exactly
/// when both solutions are real.
///
/// Example 1 takes `(A, Q)` and returns `(Q−1)²A² + 4Q`; example 2 takes
/// `(A, B)` and returns `A² + B² − AB − 3/4`. The evaluation order is fixed
/// so the published tangency points land on exact zeros.
pub fn example_reality_condition(example: u8, a: f64, second: f64) -> Result<f64, InvError> {
    match example {
        1 => {
            let t = second - 1.0;
            Ok(t * t * (a * a) + 4.0 * second)
        }
        2 => Ok(a * a + second * second - a * second - 0.75),
        other => Err(InvError::UnknownExample(other)),
    }
}

/// Separation test behind the reality statements: true when all pairwise
/// gaps are at least 1, or — with the signed-base flag — when some
/// bipartition has gaps at least 1 inside both parts.
pub fn separation_guarantees_real(z: &[f64], signed_bases: bool) -> Result<bool, InvError> {
    let mut sorted = z.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).all(|w| w[1] - w[0] >= 1.0) {
        return Ok(true);
    }
    if !signed_bases {
        return Ok(false);
    }
    let n = sorted.len();
    if n > 12 {
        return Err(InvError::BipartitionTooLarge);
    }
    let part_ok = |mask: usize, inside: bool| -> bool {
        let mut last: Option<f64> = None;
        for (i, &v) in sorted.iter().enumerate() {
            if ((mask >> i) & 1 == 1) != inside {
                continue;
            }
            if let Some(prev) = last {
                if v - prev < 1.0 {
                    return false;
                }
            }
            last = Some(v);
        }
        true
    };
    for mask in 0..(1usize << n.saturating_sub(1)) {
        if part_ok(mask, true) && part_ok(mask, false) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact grid values `num/den` for `num` in an inclusive integer range, so
/// dyadic-critical points are hit without rounding.
pub fn grid_values(num_start: i64, num_end: i64, den: i64) -> Vec<f64> {
    (num_start..=num_end).map(|k| k as f64 / den as f64).collect()
}

/// Grid axis from float bounds: reconstructs the rational lattice when the
/// step is (close to) a unit fraction, otherwise falls back to repeated
/// addition.
pub fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
    let den = 1.0 / step;
    let n0 = min * den;
    let n1 = max * den;
    let close = |x: f64| (x - x.round()).abs() < 1e-6 * (1.0 + x.abs());
    if step > 0.0 && close(den) && close(n0) && close(n1) {
        grid_values(n0.round() as i64, n1.round() as i64, den.round() as i64)
    } else {
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| min + k as f64 * step).collect()
    }
}

/// Solver verdict at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Real,
    Complex,
    Incomplete,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Real => write!(f, "real"),
            Verdict::Complex => write!(f, "complex"),
            Verdict::Incomplete => write!(f, "incomplete"),
        }
    }
}

/// One scanned grid point: coordinates, closed-form condition, solver
/// verdict, and their agreement.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub a: f64,
    pub second: f64,
    pub condition: f64,
    /// −1, 0 (inside the boundary band), or 1
    pub condition_sign: i8,
    pub real_count: usize,
    pub verdict: Verdict,
    pub agree: bool,
}

/// Scan outcome over the whole grid.
#[derive(Debug, Clone, Serialize)]
pub struct ScanTable {
    pub example: u8,
    pub rows: Vec<ScanRow>,
    pub disagreements: usize,
    pub banded: usize,
}

fn derive_seed(seed: u64, index: u64) -> u64 {
    // SplitMix64 of the combined value keeps per-point streams uncorrelated.
    let mut x = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn scan_point(example: u8, a: f64, second: f64, cfg: &RunConfig, seed: u64) -> ScanRow {
    let condition = example_reality_condition(example, a, second).expect("validated example");
    let cond_scale = 1.0 + a.abs().max(second.abs());
    let condition_sign = if condition.abs() < tol::BOUNDARY_BAND * cond_scale {
        0
    } else if condition > 0.0 {
        1
    } else {
        -1
    };
    let problem = match example {
        1 => InverseProblem::new(
            Mode::Multiplicative,
            vec![C64::new(0.0, 0.0), C64::new(a, 0.0)],
            vec![
                GroupSpec { param: 1.0, degrees: vec![1] },
                GroupSpec { param: second, degrees: vec![1] },
            ],
        ),
        _ => InverseProblem::new(
            Mode::Multiplicative,
            vec![C64::new(0.0, 0.0), C64::new(a, 0.0), C64::new(second, 0.0)],
            vec![GroupSpec { param: 1.0, degrees: vec![1, 3] }],
        ),
    };
    let Ok(problem) = problem else {
        return ScanRow {
            a,
            second,
            condition,
            condition_sign,
            real_count: 0,
            verdict: Verdict::Incomplete,
            agree: condition_sign == 0,
        };
    };
    let quick = RunConfig { seed, starts: 32, ..cfg.clone() };
    let mut set = problem.solve_inverse(&quick);
    if set.solutions.len() < 2 {
        let full = RunConfig { seed, starts: cfg.starts.max(200), ..cfg.clone() };
        set = problem.solve_inverse(&full);
    }
    let real_count = set.real_count();
    let verdict = if set.solutions.len() < 2 {
        Verdict::Incomplete
    } else if real_count == set.solutions.len() {
        Verdict::Real
    } else {
        Verdict::Complex
    };
    let agree = match condition_sign {
        0 => true,
        1 => verdict == Verdict::Real,
        _ => verdict == Verdict::Complex && real_count == 0,
    };
    ScanRow { a, second, condition, condition_sign, real_count, verdict, agree }
}

/// Scans a rectangular grid, solving the example's inverse problem at every
/// point and comparing the reality verdict against the closed condition.
/// Rows come out in row-major order (first axis outermost) regardless of
/// thread schedule.
pub fn scan_region(
    example: u8,
    a_values: &[f64],
    second_values: &[f64],
    cfg: &RunConfig,
) -> Result<ScanTable, InvError> {
    if !(example == 1 || example == 2) {
        return Err(InvError::UnknownExample(example));
    }
    let total = a_values.len() * second_values.len();
    if total > 1_000_000 {
        return Err(InvError::GridTooLarge(total));
    }
    let points: Vec<(usize, f64, f64)> = a_values
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| {
            second_values
                .iter()
                .enumerate()
                .map(move |(j, &s)| (i * second_values.len() + j, a, s))
        })
        .collect();
    let rows: Vec<ScanRow> = points
        .par_iter()
        .map(|&(idx, a, s)| scan_point(example, a, s, cfg, derive_seed(cfg.seed, idx as u64)))
        .collect();
    let disagreements = rows.iter().filter(|r| !r.agree).count();
    let banded = rows.iter().filter(|r| r.condition_sign == 0).count();
    Ok(ScanTable { example, rows, disagreements, banded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cfg(seed: u64, starts: usize) -> RunConfig {
        RunConfig { seed, starts, ..RunConfig::default() }
    }

    #[test]
    fn two_base_pair_recovers_both_radical_solutions() {
        // bases (1,2), targets {0,2}: (a,b) = (±√3, −3∓√3)
        let p = InverseProblem::new(
            Mode::Multiplicative,
            vec![c(0.0, 0.0), c(2.0, 0.0)],
            vec![
                GroupSpec { param: 1.0, degrees: vec![1] },
                GroupSpec { param: 2.0, degrees: vec![1] },
            ],
        )
        .unwrap();
        let set = p.solve_inverse(&cfg(7, 64));
        assert_eq!(set.solutions.len(), 2, "expected both quadratic roots");
        assert_eq!(set.real_count(), 2);
        let s3 = 3.0f64.sqrt();
        let mut pairs: Vec<(f64, f64)> = set
            .solutions
            .iter()
            .map(|s| (s.coefficients[0].re, s.coefficients[1].re))
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        assert!((pairs[0].0 + s3).abs() < 1e-9 && (pairs[0].1 + 3.0 - s3).abs() < 1e-9);
        assert!((pairs[1].0 - s3).abs() < 1e-9 && (pairs[1].1 + 3.0 + s3).abs() < 1e-9);
        assert!(!set.possibly_incomplete);
    }

    #[test]
    fn differential_pair_recovers_both_solutions() {
        // exponents (0,1), targets {0,2}: (α,β) = (±√2, 2∓√2) for (x−α, (x−β)eˣ)
        let p = InverseProblem::new(
            Mode::Exponent,
            vec![c(0.0, 0.0), c(2.0, 0.0)],
            vec![
                GroupSpec { param: 0.0, degrees: vec![1] },
                GroupSpec { param: 1.0, degrees: vec![1] },
            ],
        )
        .unwrap();
        let set = p.solve_inverse(&cfg(11, 64));
        assert_eq!(set.solutions.len(), 2);
        let s2 = 2.0f64.sqrt();
        // constant coefficients are −α and −β
        let mut alphas: Vec<f64> = set.solutions.iter().map(|s| -s.coefficients[0].re).collect();
        alphas.sort_by(f64::total_cmp);
        assert!((alphas[0] + s2).abs() < 1e-9);
        assert!((alphas[1] - s2).abs() < 1e-9);
        for s in &set.solutions {
            let alpha = -s.coefficients[0].re;
            let beta = -s.coefficients[1].re;
            assert!((alpha + beta - 2.0).abs() < 1e-9, "β = 2 − α");
        }
    }

    #[test]
    fn repeated_base_cubic_structure_matches_hand_expansion() {
        // base 1 twice, degrees (1,3), targets {0,2,1}:
        // 3a² + 9a + 6 = 0 → (a,b,c) ∈ {(−1,−6,5), (−2,−3,4)}
        let p = InverseProblem::new(
            Mode::Multiplicative,
            vec![c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)],
            vec![GroupSpec { param: 1.0, degrees: vec![1, 3] }],
        )
        .unwrap();
        assert_eq!(p.system_size(), 3);
        let set = p.solve_inverse(&cfg(3, 96));
        assert_eq!(set.solutions.len(), 2);
        let mut triples: Vec<(f64, f64, f64)> = set
            .solutions
            .iter()
            .map(|s| {
                // slots: (member 0, power 0) = a; (member 1, power 0) = c;
                // (member 1, power 2) = b
                (s.coefficients[0].re, s.coefficients[2].re, s.coefficients[1].re)
            })
            .collect();
        triples.sort_by(|x, y| x.0.total_cmp(&y.0));
        let close = |x: f64, y: f64| (x - y).abs() < 1e-8;
        assert!(close(triples[0].0, -2.0) && close(triples[0].1, -3.0) && close(triples[0].2, 4.0));
        assert!(close(triples[1].0, -1.0) && close(triples[1].1, -6.0) && close(triples[1].2, 5.0));
    }

    #[test]
    fn planted_space_is_recovered() {
        let p = InverseProblem::new(
            Mode::Multiplicative,
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![
                GroupSpec { param: 1.0, degrees: vec![2] },
                GroupSpec { param: -2.0, degrees: vec![1] },
            ],
        )
        .unwrap();
        let planted = vec![c(0.7, 0.0), c(-0.3, 0.0), c(1.2, 0.0)];
        let w = p
            .as_space(&planted)
            .unwrap()
            .discrete_wronskian(1.0)
            .unwrap();
        let targets = w.monic.roots().unwrap().roots;
        let p2 = InverseProblem::new(Mode::Multiplicative, targets, p.groups.clone()).unwrap();
        let set = p2.solve_inverse(&cfg(5, 64));
        let recovered = set.solutions.iter().any(|s| {
            s.coefficients
                .iter()
                .zip(&planted)
                .all(|(x, y)| (x - y).norm() < 1e-6)
        });
        assert!(recovered, "planted coefficients absent from {} solutions", set.solutions.len());
    }

    #[test]
    fn non_square_structure_is_rejected() {
        let err = InverseProblem::new(
            Mode::Multiplicative,
            vec![c(0.0, 0.0)],
            vec![
                GroupSpec { param: 1.0, degrees: vec![1] },
                GroupSpec { param: 2.0, degrees: vec![1] },
            ],
        )
        .unwrap_err();
        assert!(matches!(err, InvError::NotSquare { unknowns: 2, equations: 1 }));
    }

    #[test]
    fn separation_test_matches_enumerated_cases() {
        assert!(separation_guarantees_real(&[0.0, 2.0], false).unwrap());
        assert!(!separation_guarantees_real(&[0.0, 0.5, 1.5], false).unwrap());
        assert!(separation_guarantees_real(&[0.0, 0.5, 1.5], true).unwrap());
        assert!(!separation_guarantees_real(&[0.0, 0.3, 0.6], true).unwrap());
        let z: Vec<f64> = (0..13).map(|k| k as f64 * 0.5).collect();
        let err = separation_guarantees_real(&z, true).unwrap_err();
        assert_eq!(err.to_string(), "bipartition search too large");
    }

    #[test]
    fn reality_condition_hits_exact_zeros() {
        assert_eq!(example_reality_condition(1, 1.0, -1.0).unwrap(), 0.0);
        assert_eq!(example_reality_condition(2, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(example_reality_condition(2, 0.5, -0.5).unwrap(), 0.0);
        assert_eq!(example_reality_condition(2, 0.0, 0.0).unwrap(), -0.75);
        assert!(example_reality_condition(3, 0.0, 0.0).is_err());
    }

    #[test]
    fn exact_grid_contains_dyadic_points() {
        let v = grid_values(-40, 40, 20);
        assert_eq!(v.len(), 81);
        assert_eq!(v[50], 0.5);
        assert_eq!(v[60], 1.0);
        let ax = axis(-2.0, 2.0, 0.05);
        assert_eq!(ax.len(), 81);
        assert_eq!(ax[50], 0.5);
    }

    #[test]
    fn scan_with_positive_base_is_all_real() {
        // example 1, Q = 2: condition = A² + 8 > 0 everywhere
        let a_values = grid_values(-4, 4, 2);
        let table = scan_region(1, &a_values, &[2.0], &cfg(1, 32)).unwrap();
        assert_eq!(table.rows.len(), 9);
        assert_eq!(table.disagreements, 0);
        assert!(table.rows.iter().all(|r| r.verdict == Verdict::Real));
    }

    #[test]
    fn oversized_grid_is_rejected() {
        let big: Vec<f64> = (0..1001).map(|k| k as f64).collect();
        assert!(matches!(
            scan_region(2, &big, &big, &cfg(1, 1)),
            Err(InvError::GridTooLarge(1002001))
        ));
    }
}
