//! Schürmann triples built from a representation and a vector, the block
//! stochastic generator on `ĥ = ℂΩ ⊕ k`, numerical GNS, and the Markov
//! convolution semigroup.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{convolution_exponential, FiniteBialgebra, Functional, State};
use crate::error::{Error, Result};
use crate::io::{mat_to_rows, pairs_to_vec, rows_to_mat, vec_to_pairs, Pair};
use crate::linalg::{max_abs_diff, CMatrix, CVector, C64, ONE};

pub const REP_TOL: f64 = 1e-9;

/// Relative eigenvalue cut separating the GNS null space.
pub const GNS_REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RepResiduals {
    pub unital: f64,
    pub multiplicative: f64,
    pub star: f64,
}

impl RepResiduals {
    pub fn max(&self) -> f64 {
        self.unital.max(self.multiplicative).max(self.star)
    }

    fn first_failure(&self, tol: f64) -> Option<(&'static str, f64)> {
        [
            ("unital", self.unital),
            ("multiplicative", self.multiplicative),
            ("*-preserving", self.star),
        ]
        .into_iter()
        .find(|(_, r)| r.is_nan() || *r > tol)
    }
}

/// Residuals of the unital *-homomorphism axioms for a map given on the basis.
pub fn homomorphism_residuals(alg: &FiniteBialgebra, mats: &[CMatrix]) -> RepResiduals {
    let d = alg.dim();
    let n = mats[0].nrows();
    let image = |x: &CVector| FiniteBialgebra::apply_linear(mats, x);
    let mut res = RepResiduals {
        unital: max_abs_diff(&image(alg.unit()), &CMatrix::identity(n, n)),
        ..Default::default()
    };
    for i in 0..d {
        res.star = res
            .star
            .max(max_abs_diff(&image(&alg.basis_star(i)), &mats[i].adjoint()));
        for j in 0..d {
            let lhs = image(&alg.basis_product(i, j));
            res.multiplicative = res
                .multiplicative
                .max(max_abs_diff(&lhs, &(&mats[i] * &mats[j])));
        }
    }
    res
}

/// A unital *-representation `ν: A → B(k)`, stored as `ν(b_i)`.
#[derive(Clone, Debug)]
pub struct Representation {
    mats: Vec<CMatrix>,
}

impl Representation {
    pub fn new(alg: &FiniteBialgebra, mats: Vec<CMatrix>) -> Result<Self> {
        Self::with_tol(alg, mats, REP_TOL)
    }

    pub fn with_tol(alg: &FiniteBialgebra, mats: Vec<CMatrix>, tol: f64) -> Result<Self> {
        alg.check_len(mats.len(), "representation")?;
        let k = mats[0].nrows();
        if mats.iter().any(|m| m.shape() != (k, k)) {
            return Err(Error::Structure(
                "representation matrices must be square, of one size".into(),
            ));
        }
        if let Some((axiom, residual)) = homomorphism_residuals(alg, &mats).first_failure(tol) {
            return Err(Error::NotARepresentation { axiom, residual });
        }
        Ok(Self { mats })
    }

    /// The fixture's own faithful representation.
    pub fn faithful(alg: &FiniteBialgebra) -> Result<Self> {
        Self::new(alg, alg.faithful_rep().to_vec())
    }

    /// Compression of the faithful representation onto the given coordinates;
    /// a representation only if that coordinate subspace is invariant.
    pub fn faithful_block(alg: &FiniteBialgebra, indices: &[usize]) -> Result<Self> {
        let r = alg.rep_dim();
        if indices.is_empty() || indices.iter().any(|&i| i >= r) {
            return Err(Error::Structure(format!(
                "block indices must lie in 0..{r}"
            )));
        }
        let mats = alg
            .faithful_rep()
            .iter()
            .map(|m| {
                CMatrix::from_fn(indices.len(), indices.len(), |p, q| {
                    m[(indices[p], indices[q])]
                })
            })
            .collect();
        Self::new(alg, mats)
    }

    pub fn target_dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn image(&self, x: &CVector) -> CMatrix {
        FiniteBialgebra::apply_linear(&self.mats, x)
    }

    pub fn residuals(&self, alg: &FiniteBialgebra) -> RepResiduals {
        homomorphism_residuals(alg, &self.mats)
    }
}

/// `(ν, δ, γ)` packaged from `(ν, ξ̃)`:
/// `γ(a) = ⟨ξ̃, (ν(a) − ε(a))ξ̃⟩`, `δ(a) = (ν(a) − ε(a))ξ̃`, `λ = ‖ξ̃‖²`.
#[derive(Clone, Debug)]
pub struct SchurmannTriple {
    pub rep: Representation,
    pub xi: CVector,
    pub gamma: Functional,
    pub delta: Vec<CVector>,
    pub lambda: f64,
}

impl SchurmannTriple {
    pub fn from_rep_vector(
        alg: &FiniteBialgebra,
        rep: Representation,
        xi: CVector,
    ) -> Result<Self> {
        let k = rep.target_dim();
        if xi.len() != k {
            return Err(Error::Structure(format!(
                "xi has length {}, rep acts on dimension {k}",
                xi.len()
            )));
        }
        let eps = alg.counit();
        let delta: Vec<CVector> = rep
            .mats()
            .iter()
            .enumerate()
            .map(|(i, m)| m * &xi - &xi * eps[i])
            .collect();
        let gamma = Functional::new(CVector::from_iterator(
            alg.dim(),
            delta.iter().map(|dv| xi.dotc(dv)),
        ));
        let lambda = xi.norm_squared();
        Ok(Self {
            rep,
            xi,
            gamma,
            delta,
            lambda,
        })
    }

    pub fn k_dim(&self) -> usize {
        self.rep.target_dim()
    }

    /// `ξ = ξ̃ / ‖ξ̃‖`, or `None` when `ξ̃ = 0`.
    pub fn unit_xi(&self) -> Option<CVector> {
        (self.lambda > 0.0).then(|| &self.xi / C64::new(self.lambda.sqrt(), 0.0))
    }

    /// `δ(x)` for an arbitrary element.
    pub fn delta_of(&self, x: &CVector) -> CVector {
        let mut out = CVector::zeros(self.k_dim());
        for (dv, c) in self.delta.iter().zip(x.iter()) {
            out += dv * *c;
        }
        out
    }

    /// Max residual of `γ(1) = 0`, `δ(1) = 0`, Hermiticity of γ and the defining formulas.
    pub fn invariant_residual(&self, alg: &FiniteBialgebra) -> f64 {
        let u = alg.unit();
        let mut res = self.gamma.eval(u).norm().max(self.delta_of(u).norm());
        res = res.max(self.gamma.hermiticity_residual(alg));
        for i in 0..alg.dim() {
            let nu = &self.rep.mats()[i];
            let dv = nu * &self.xi - &self.xi * alg.counit()[i];
            res = res.max((&dv - &self.delta[i]).norm());
            res = res.max((self.xi.dotc(&dv) - self.gamma.coeffs[i]).norm());
        }
        res
    }

    /// Smallest eigenvalue of `[γ(b_i* b_j)]` compressed to `ker ε`.
    pub fn conditional_positivity(&self, alg: &FiniteBialgebra) -> f64 {
        let gram = self.gamma.gram(alg);
        let basis = kernel_basis(alg.counit());
        if basis.ncols() == 0 {
            return 0.0;
        }
        let compressed = basis.adjoint() * gram * &basis;
        crate::linalg::hermitian_eigenvalues(&compressed)
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    pub fn to_file(&self) -> TripleFile {
        TripleFile {
            rep: self.rep.mats().iter().map(mat_to_rows).collect(),
            xi: vec_to_pairs(&self.xi),
        }
    }
}

/// Orthonormal basis (columns) of `{x : Σ e_i x_i = 0}`, the orthogonal
/// complement of `conj(e)`.
fn kernel_basis(e: &CVector) -> CMatrix {
    let d = e.len();
    let n = e.norm();
    if n == 0.0 {
        return CMatrix::identity(d, d);
    }
    let normal =
        CMatrix::from_column_slice(d, 1, (e.map(|z| z.conj()) / C64::new(n, 0.0)).as_slice());
    complete_basis(&normal, d).columns(1, d - 1).into_owned()
}

/// Extends orthonormal columns to an orthonormal basis of ℂ^d by Gram–Schmidt.
fn complete_basis(cols: &CMatrix, d: usize) -> CMatrix {
    let mut basis: Vec<CVector> = cols.column_iter().map(|c| c.into_owned()).collect();
    for i in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = crate::linalg::basis_vector(d, i);
        for b in &basis {
            let p = b.dotc(&v);
            v -= b * p;
        }
        let n = v.norm();
        if n > 1e-8 {
            basis.push(v / C64::new(n, 0.0));
        }
    }
    CMatrix::from_columns(&basis)
}

/// Serialized triple: representation matrices and `ξ̃`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleFile {
    pub rep: Vec<Vec<Vec<Pair>>>,
    pub xi: Vec<Pair>,
}

impl TripleFile {
    pub fn into_triple(self, alg: &FiniteBialgebra) -> Result<SchurmannTriple> {
        let mats = self
            .rep
            .iter()
            .map(|m| rows_to_mat(m, "rep"))
            .collect::<Result<Vec<_>>>()?;
        let rep = Representation::new(alg, mats)?;
        SchurmannTriple::from_rep_vector(alg, rep, pairs_to_vec(&self.xi))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// `φ(b_i) = [[γ, δ†], [δ, ν − ε I]]` on `ĥ = ℂΩ ⊕ k`, with `δ†(a) = δ(a*)†`.
#[derive(Clone, Debug)]
pub struct BlockGenerator {
    pub mats: Vec<CMatrix>,
}

impl BlockGenerator {
    pub fn hat_dim(&self) -> usize {
        self.mats[0].nrows()
    }

    /// The vacuum vector Ω spanning the first coordinate of ĥ.
    pub fn omega(&self) -> CVector {
        crate::linalg::basis_vector(self.hat_dim(), 0)
    }

    pub fn image(&self, x: &CVector) -> CMatrix {
        FiniteBialgebra::apply_linear(&self.mats, x)
    }
}

pub fn assemble_phi(alg: &FiniteBialgebra, triple: &SchurmannTriple) -> BlockGenerator {
    let d = alg.dim();
    let k = triple.k_dim();
    let eps = alg.counit();
    let mats = (0..d)
        .map(|i| {
            let mut m = CMatrix::zeros(k + 1, k + 1);
            m[(0, 0)] = triple.gamma.coeffs[i];
            let dagger = triple.delta_of(&alg.basis_star(i));
            for p in 0..k {
                m[(0, p + 1)] = dagger[p].conj();
                m[(p + 1, 0)] = triple.delta[i][p];
            }
            let corner = &triple.rep.mats()[i] - CMatrix::identity(k, k) * eps[i];
            m.view_mut((1, 1), (k, k)).copy_from(&corner);
            m
        })
        .collect();
    BlockGenerator { mats }
}

/// A GNS realization of a state on the quotient `A / N_ω`.
#[derive(Clone, Debug)]
pub struct GnsTriple {
    pub rep: Representation,
    /// Class of the unit.
    pub cyclic: CVector,
    /// `r × d` isometry from `(A, ⟨x, y⟩ = ω(x* y))` mod null space onto `ℂ^r`.
    pub quotient: CMatrix,
}

impl GnsTriple {
    pub fn dim(&self) -> usize {
        self.cyclic.len()
    }
}

/// GNS construction by eigendecomposition of `G = [ω(b_i* b_j)]`.
///
/// Eigenvalues at most `rel_tol · max eigenvalue` span the null space. A
/// negative eigenvalue below that cut, or `ω(1) ≠ 1`, rejects `ω`.
pub fn gns_from_state(
    alg: &FiniteBialgebra,
    omega: &Functional,
    rel_tol: f64,
) -> Result<GnsTriple> {
    alg.check_len(omega.dim(), "state")?;
    let unitality = (omega.eval(alg.unit()) - ONE).norm();
    if unitality > REP_TOL {
        return Err(Error::NotAState {
            reason: format!("ω(1) deviates from 1 by {unitality:.3e}"),
        });
    }
    let gram = omega.gram(alg);
    let hermitian = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
    let eig = hermitian.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cut = rel_tol * top;
    if let Some(low) = eig
        .eigenvalues
        .iter()
        .cloned()
        .find(|&l| l < -cut.max(f64::MIN_POSITIVE))
    {
        return Err(Error::NotAState {
            reason: format!("Gram matrix eigenvalue {low:.3e} < 0"),
        });
    }
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > cut)
        .collect();
    let d = alg.dim();
    let r = keep.len();
    // W = Λ^{1/2} V†, W⁺ = V Λ^{-1/2}
    let quotient = CMatrix::from_fn(r, d, |p, j| {
        let i = keep[p];
        eig.eigenvectors[(j, i)].conj() * eig.eigenvalues[i].sqrt()
    });
    let lift = CMatrix::from_fn(d, r, |j, p| {
        let i = keep[p];
        eig.eigenvectors[(j, i)] / eig.eigenvalues[i].sqrt()
    });
    let mats = (0..d)
        .map(|i| &quotient * alg.left_mult(i) * &lift)
        .collect();
    let rep = Representation::new(alg, mats)?;
    let cyclic = &quotient * alg.unit();
    Ok(GnsTriple {
        rep,
        cyclic,
        quotient,
    })
}

/// `P_t = exp_⋆(tγ)`, certified as a state.
pub fn markov_semigroup(alg: &FiniteBialgebra, triple: &SchurmannTriple, t: f64) -> Result<State> {
    let p = convolution_exponential(alg, &triple.gamma, t)?;
    State::certify(alg, p, REP_TOL)
}

/// The vector state `a ↦ ⟨v, ν(a) v⟩`.
pub fn vector_state(rep: &Representation, v: &CVector) -> Functional {
    Functional::new(CVector::from_iterator(
        rep.mats().len(),
        rep.mats().iter().map(|m| v.dotc(&(m * v))),
    ))
}
