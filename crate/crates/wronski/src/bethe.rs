//! Dense spin-chain operators on `(ℂ^N)^{⊗n}`: rational R-matrices, the
//! first transfer matrix and its residues, qKZ Hamiltonians, twisted bilinear
//! forms, and positivity certification of their Grams.
//!
//! Everything is built explicitly as an `N^n × N^n` matrix, which keeps the
//! module honest at desk scale (the size is capped at 4096). Basis order is
//! positional: index `a₁·N^{n-1} + a₂·N^{n-2} + … + aₙ` with site 1 holding
//! the most significant digit.

use crate::linalg;
use crate::poly::C64;
use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BetheError {
    #[error("local dimension and site count must be positive")]
    EmptySpace,
    #[error("tensor dimension N^n exceeds the cap of 4096")]
    TooLarge,
    #[error("expected {expected} evaluation parameters, got {got}")]
    BadZLength { expected: usize, got: usize },
    #[error("expected {expected} twist values, got {got}")]
    BadQLength { expected: usize, got: usize },
    #[error("twist values must be nonzero")]
    ZeroTwist,
    #[error("site index {0} out of range 1..={1}")]
    SiteRange(usize, usize),
    #[error("two-site operator needs distinct sites")]
    EqualSites,
    #[error("evaluation point coincides with the pole at z_{0}")]
    Pole(usize),
    #[error("residue at z_{0} needs pairwise distinct evaluation parameters")]
    CollidingPoles(usize),
    #[error("operator K_{0} is near-singular (condition estimate {1:.3e})")]
    NearSingular(usize, f64),
    #[error("hypotheses violated")]
    HypothesesViolated,
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

/// Dense operator on the tensor-product space, tagged with what it was
/// built as.
#[derive(Debug, Clone)]
pub struct TensorOperator {
    pub matrix: DMatrix<C64>,
    pub label: String,
}

/// Which bilinear form a Gram matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    /// ⟨v, w⟩ — identity Gram in the standard basis
    Shapovalov,
    /// ⟨v, 𝐑w⟩
    Yangian,
    /// ⟨v, 𝐑gw⟩
    Twisted,
}

/// Gram matrix of a bilinear form in the standard basis.
#[derive(Debug, Clone)]
pub struct BilinearFormGram {
    pub gram: DMatrix<C64>,
    pub kind: FormKind,
}

/// Positivity certificate for a real symmetric Gram.
#[derive(Debug, Clone, Serialize)]
pub struct FormCertificate {
    pub kind: FormKind,
    /// relative `max|G - Gᵀ|`
    pub symmetry_defect: f64,
    /// smallest eigenvalue of the symmetrized Gram
    pub min_eigenvalue: f64,
    pub positive_definite: bool,
}

/// Worst relative residuals of the structural identities tying the connection
/// operators together.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityResiduals {
    /// `K_i` against the scaled residue of the twisted transfer matrix
    pub residue: f64,
    /// pairwise `[K_i, K_j]`
    pub commutation: f64,
    /// `K_iᵀ·𝐑 − 𝐑·K_i`
    pub symmetry: f64,
}

/// `(ℂ^N)^{⊗n}` with evaluation parameters `z_1..z_n` and a diagonal twist
/// `diag(Q_1..Q_N)`.
#[derive(Debug, Clone)]
pub struct TensorSpace {
    n_local: usize,
    sites: usize,
    z: Vec<f64>,
    q: Vec<f64>,
}

impl TensorSpace {
    pub fn new(n_local: usize, sites: usize, z: Vec<f64>, q: Vec<f64>) -> Result<Self, BetheError> {
        if n_local == 0 || sites == 0 {
            return Err(BetheError::EmptySpace);
        }
        let mut dim = 1usize;
        for _ in 0..sites {
            dim = dim.saturating_mul(n_local);
            if dim > 4096 {
                return Err(BetheError::TooLarge);
            }
        }
        if z.len() != sites {
            return Err(BetheError::BadZLength { expected: sites, got: z.len() });
        }
        if q.len() != n_local {
            return Err(BetheError::BadQLength { expected: n_local, got: q.len() });
        }
        if q.contains(&0.0) {
            return Err(BetheError::ZeroTwist);
        }
        Ok(TensorSpace { n_local, sites, z, q })
    }

    pub fn local_dim(&self) -> usize {
        self.n_local
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn twist(&self) -> &[f64] {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.n_local.pow(self.sites as u32)
    }

    fn check_site(&self, s: usize) -> Result<(), BetheError> {
        if s == 0 || s > self.sites {
            return Err(BetheError::SiteRange(s, self.sites));
        }
        Ok(())
    }

    /// Digit of `index` at 1-based `site` (site 1 most significant).
    fn digit(&self, index: usize, site: usize) -> usize {
        let shift = self.n_local.pow((self.sites - site) as u32);
        (index / shift) % self.n_local
    }

    /// Embeds `E_{ab}` acting on one site: identity on every other digit.
    fn matrix_unit(&self, site: usize, a: usize, b: usize) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| {
            let same_elsewhere = (1..=self.sites)
                .filter(|&s| s != site)
                .all(|s| self.digit(r, s) == self.digit(c, s));
            if same_elsewhere && self.digit(r, site) == a && self.digit(c, site) == b {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Embeds the flip of sites `i`, `j`.
    fn flip(&self, i: usize, j: usize) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| {
            let mut ok = self.digit(r, i) == self.digit(c, j) && self.digit(r, j) == self.digit(c, i);
            ok = ok
                && (1..=self.sites)
                    .filter(|&s| s != i && s != j)
                    .all(|s| self.digit(r, s) == self.digit(c, s));
            if ok {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `R(x) = x·Id + P` acting on sites `(i, j)`, identity elsewhere.
    pub fn site_r(&self, x: C64, i: usize, j: usize) -> Result<TensorOperator, BetheError> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(BetheError::EqualSites);
        }
        let d = self.dim();
        let matrix = DMatrix::<C64>::identity(d, d) * x + self.flip(i, j);
        Ok(TensorOperator { matrix, label: format!("R({i},{j})") })
    }

    /// Diagonal twist acting on one site.
    pub fn site_q(&self, site: usize) -> Result<TensorOperator, BetheError> {
        self.check_site(site)?;
        let d = self.dim();
        let matrix = DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                C64::new(self.q[self.digit(r, site)], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(TensorOperator { matrix, label: format!("Q({site})") })
    }

    /// Ordered product of all pairwise R-matrices,
    /// `R(n-1,n) · [R(n-2,n) R(n-2,n-1)] ⋯ [R(1,n) ⋯ R(1,2)]`,
    /// each factor evaluated at the difference of its two evaluation
    /// parameters. Its matrix is the Gram of the Yangian form.
    pub fn big_r(&self) -> TensorOperator {
        let d = self.dim();
        let mut acc = DMatrix::<C64>::identity(d, d);
        for i in (1..self.sites).rev() {
            for j in ((i + 1)..=self.sites).rev() {
                let x = C64::new(self.z[i - 1] - self.z[j - 1], 0.0);
                let r = self.site_r(x, i, j).expect("validated sites");
                acc *= r.matrix;
            }
        }
        TensorOperator { matrix: acc, label: "R".into() }
    }

    /// The i-th qKZ Hamiltonian
    /// `K_i = R(i,i-1)⋯R(i,1) · Q⁽ⁱ⁾ · R(i,n)⋯R(i,i+1)` with each factor at
    /// the corresponding parameter difference.
    pub fn qkz_hamiltonian(&self, i: usize) -> Result<TensorOperator, BetheError> {
        self.check_site(i)?;
        let d = self.dim();
        let mut acc = DMatrix::<C64>::identity(d, d);
        for j in (1..i).rev() {
            let x = C64::new(self.z[i - 1] - self.z[j - 1], 0.0);
            acc *= self.site_r(x, i, j)?.matrix;
        }
        acc *= self.site_q(i)?.matrix;
        for j in ((i + 1)..=self.sites).rev() {
            let x = C64::new(self.z[i - 1] - self.z[j - 1], 0.0);
            acc *= self.site_r(x, i, j)?.matrix;
        }
        Ok(TensorOperator { matrix: acc, label: format!("K_{i}") })
    }

    /// All qKZ Hamiltonians `K_1..K_n`.
    pub fn qkz_hamiltonians(&self) -> Result<Vec<TensorOperator>, BetheError> {
        (1..=self.sites).map(|i| self.qkz_hamiltonian(i)).collect()
    }

    /// Auxiliary-space monodromy product `M_n ⋯ M_1`, where the single-site
    /// factor has operator entries `(M_s)_{ab} = δ_ab·Id + E_ba/(x - z_s)`.
    /// With `numerator_site = Some(s)` that site contributes only the bare
    /// `E_ba` block, which isolates the residue of the product at `x = z_s`.
    fn monodromy(
        &self,
        x: C64,
        numerator_site: Option<usize>,
    ) -> Result<Vec<Vec<DMatrix<C64>>>, BetheError> {
        let nl = self.n_local;
        let d = self.dim();
        let zero = DMatrix::<C64>::zeros(d, d);
        let mut acc: Vec<Vec<DMatrix<C64>>> = vec![vec![zero.clone(); nl]; nl];
        for (a, row) in acc.iter_mut().enumerate() {
            row[a] = DMatrix::identity(d, d);
        }
        for s in 1..=self.sites {
            let mut factor: Vec<Vec<DMatrix<C64>>> = vec![vec![zero.clone(); nl]; nl];
            if numerator_site == Some(s) {
                for (a, row) in factor.iter_mut().enumerate() {
                    for (b, entry) in row.iter_mut().enumerate() {
                        *entry = self.matrix_unit(s, b, a);
                    }
                }
            } else {
                let den = x - C64::new(self.z[s - 1], 0.0);
                if den.norm() == 0.0 {
                    return Err(BetheError::Pole(s));
                }
                let inv = C64::new(1.0, 0.0) / den;
                for (a, row) in factor.iter_mut().enumerate() {
                    for (b, entry) in row.iter_mut().enumerate() {
                        *entry = &self.matrix_unit(s, b, a) * inv;
                        if a == b {
                            *entry += DMatrix::<C64>::identity(d, d);
                        }
                    }
                }
            }
            // left-multiply: acc ← factor · acc in the auxiliary indices
            let mut next: Vec<Vec<DMatrix<C64>>> = vec![vec![zero.clone(); nl]; nl];
            for a in 0..nl {
                for b in 0..nl {
                    let mut sum = zero.clone();
                    for (c, f) in factor[a].iter().enumerate() {
                        sum += f * &acc[c][b];
                    }
                    next[a][b] = sum;
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// First transfer matrix `B₁(x) = Σ_a Q_a T_aa(x)` on the tensor
    /// product, a rational function of `x` with simple poles at the `z_i`.
    pub fn transfer_b1(&self, x: C64) -> Result<TensorOperator, BetheError> {
        let t = self.monodromy(x, None)?;
        let d = self.dim();
        let mut b1 = DMatrix::<C64>::zeros(d, d);
        for (a, qa) in self.q.iter().enumerate() {
            b1 += &t[a][a] * C64::new(*qa, 0.0);
        }
        Ok(TensorOperator { matrix: b1, label: "B1".into() })
    }

    /// Residue of `B₁` at `z_i`, taken analytically by replacing the site-i
    /// factor of the monodromy with its pole numerator.
    pub fn b1_residue(&self, i: usize) -> Result<TensorOperator, BetheError> {
        self.check_site(i)?;
        for j in 1..=self.sites {
            if j != i && self.z[j - 1] == self.z[i - 1] {
                return Err(BetheError::CollidingPoles(i));
            }
        }
        let x = C64::new(self.z[i - 1], 0.0);
        let t = self.monodromy(x, Some(i))?;
        let d = self.dim();
        let mut res = DMatrix::<C64>::zeros(d, d);
        for (a, qa) in self.q.iter().enumerate() {
            res += &t[a][a] * C64::new(*qa, 0.0);
        }
        Ok(TensorOperator { matrix: res, label: format!("Res_{i} B1") })
    }

    /// `G_s = (K_1 K_2 ⋯ K_s)⁻¹`; `G_0` is the identity.
    pub fn twist_g(&self, s: usize) -> Result<TensorOperator, BetheError> {
        if s > self.sites {
            return Err(BetheError::SiteRange(s, self.sites));
        }
        let d = self.dim();
        let mut prod = DMatrix::<C64>::identity(d, d);
        for i in 1..=s {
            let k = self.qkz_hamiltonian(i)?;
            let cond = linalg::condition(&k.matrix);
            if !cond.is_finite() || cond > 1e12 {
                return Err(BetheError::NearSingular(i, cond));
            }
            prod *= k.matrix;
        }
        let matrix = linalg::inverse(&prod)?;
        Ok(TensorOperator { matrix, label: format!("G_{s}") })
    }

    /// [`Self::twist_g`] scaled by `(-1)^{s(s-1)/2}`.
    ///
    /// Reducing the ordered R-product against `K_1 ⋯ K_s` cancels every
    /// cross-pair factor exactly but leaves a scalar `1/(1 - (z_i - z_j)²)`
    /// per pair `i < j ≤ s`, each negative once those gaps exceed one. The
    /// compensating sign makes the twisted Gram positive definite — rather
    /// than definite of alternating sign — under the split separation
    /// hypotheses (gaps above one inside `1..=s` and inside `s+1..=n`, all
    /// twist values positive).
    pub fn signed_twist_g(&self, s: usize) -> Result<TensorOperator, BetheError> {
        let g = self.twist_g(s)?;
        let sign = if (s * s.saturating_sub(1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(TensorOperator {
            matrix: g.matrix * C64::new(sign, 0.0),
            label: format!("±G_{s}"),
        })
    }

    /// Gram of the tensor Shapovalov form: the identity.
    pub fn shapovalov_gram(&self) -> BilinearFormGram {
        let d = self.dim();
        BilinearFormGram { gram: DMatrix::identity(d, d), kind: FormKind::Shapovalov }
    }

    /// Gram of the Yangian form `⟨v, 𝐑w⟩`.
    pub fn yangian_gram(&self) -> BilinearFormGram {
        BilinearFormGram { gram: self.big_r().matrix, kind: FormKind::Yangian }
    }

    /// Gram of the twisted form `⟨v, 𝐑gw⟩`.
    pub fn twisted_gram(&self, g: &TensorOperator) -> BilinearFormGram {
        BilinearFormGram { gram: self.big_r().matrix * &g.matrix, kind: FormKind::Twisted }
    }

    /// Symmetry and positivity certificate for the Gram of `⟨v, 𝐑gw⟩`
    /// restricted to the real span. A Gram with entries off the real axis
    /// beyond `1e-10` (relative) means the realness hypotheses failed and is
    /// reported as an error.
    pub fn certify_form(&self, g: &TensorOperator) -> Result<FormCertificate, BetheError> {
        let id = g.matrix == DMatrix::<C64>::identity(self.dim(), self.dim());
        let form = self.twisted_gram(g);
        let gram = form.gram;
        let scale = linalg::max_abs(&gram).max(1.0);
        if linalg::max_imag(&gram) / scale > 1e-10 {
            return Err(BetheError::HypothesesViolated);
        }
        let real = linalg::real_part(&gram);
        let defect = (&real - real.transpose()).iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale;
        let sym = (&real + real.transpose()) * 0.5;
        let eigs = linalg::sym_eigenvalues(&sym);
        let min_eigenvalue = eigs.first().copied().unwrap_or(0.0);
        Ok(FormCertificate {
            kind: if id { FormKind::Yangian } else { FormKind::Twisted },
            symmetry_defect: defect,
            min_eigenvalue,
            positive_definite: min_eigenvalue > 0.0,
        })
    }

    /// Identity operator, the `g` of the untwisted Yangian form.
    pub fn identity_op(&self) -> TensorOperator {
        let d = self.dim();
        TensorOperator { matrix: DMatrix::identity(d, d), label: "Id".into() }
    }

    /// Residue formula, pairwise commutativity, and transpose-symmetry of the
    /// connection operators, each as a worst relative residual.
    pub fn identity_residuals(&self) -> Result<IdentityResiduals, BetheError> {
        let ks = self.qkz_hamiltonians()?;
        let r = self.big_r();
        let mut residue = 0.0f64;
        for (idx, k) in ks.iter().enumerate() {
            let res = self.b1_residue(idx + 1)?;
            let pref: f64 = self
                .z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != idx)
                .map(|(_, &zj)| self.z[idx] - zj)
                .product();
            let scale = linalg::max_abs(&k.matrix).max(1.0);
            let diff = &k.matrix - &res.matrix * C64::new(pref, 0.0);
            residue = residue.max(linalg::max_abs(&diff) / scale);
        }
        let mut commutation = 0.0f64;
        for a in &ks {
            for b in &ks {
                let scale =
                    (linalg::max_abs(&a.matrix) * linalg::max_abs(&b.matrix)).max(1.0);
                let diff = &a.matrix * &b.matrix - &b.matrix * &a.matrix;
                commutation = commutation.max(linalg::max_abs(&diff) / scale);
            }
        }
        let mut symmetry = 0.0f64;
        for k in &ks {
            let scale = (linalg::max_abs(&k.matrix) * linalg::max_abs(&r.matrix)).max(1.0);
            let diff = k.matrix.transpose() * &r.matrix - &r.matrix * &k.matrix;
            symmetry = symmetry.max(linalg::max_abs(&diff) / scale);
        }
        Ok(IdentityResiduals { residue, commutation, symmetry })
    }
}
