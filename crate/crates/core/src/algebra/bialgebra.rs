use crate::error::{Error, Result};
use crate::linalg::{basis_vector, op_norm, CMatrix, CVector, C64, ZERO};

/// Raw structure constants of a finite-dimensional bialgebra.
///
/// `mult` is stored flat with `b_i b_j = Σ_k mult[(i*d + j)*d + k] b_k`.
/// `coproduct` is `d² × d` with `Δ(b_i) = Σ_{j,k} coproduct[(j*d + k, i)] b_j ⊗ b_k`.
/// `star` row `i` holds the coefficients of `b_i*`.
#[derive(Clone, Debug, PartialEq)]
pub struct BialgebraData {
    pub labels: Vec<String>,
    pub mult: Vec<C64>,
    pub unit: CVector,
    pub star: CMatrix,
    pub counit: CVector,
    pub coproduct: CMatrix,
    pub faithful_rep: Vec<CMatrix>,
}

/// A finite-dimensional C*-bialgebra given by dense structure constants.
///
/// Construction only checks shapes; the axioms are checked by
/// [`validate_bialgebra`](super::validate_bialgebra).
#[derive(Clone, Debug)]
pub struct FiniteBialgebra {
    data: BialgebraData,
    left: Vec<CMatrix>,
    coproduct_terms: Vec<Vec<(usize, usize, C64)>>,
}

impl FiniteBialgebra {
    pub fn new(data: BialgebraData) -> Result<Self> {
        let d = data.labels.len();
        if d == 0 {
            return Err(Error::Structure("dimension must be positive".into()));
        }
        let shape_err = |what: &str, got: String, want: String| {
            Error::Structure(format!("{what} has shape {got}, expected {want}"))
        };
        if data.mult.len() != d * d * d {
            return Err(shape_err(
                "mult",
                data.mult.len().to_string(),
                (d * d * d).to_string(),
            ));
        }
        if data.unit.len() != d {
            return Err(shape_err(
                "unit",
                data.unit.len().to_string(),
                d.to_string(),
            ));
        }
        if data.counit.len() != d {
            return Err(shape_err(
                "counit",
                data.counit.len().to_string(),
                d.to_string(),
            ));
        }
        if data.star.shape() != (d, d) {
            return Err(shape_err(
                "star",
                format!("{:?}", data.star.shape()),
                format!("({d}, {d})"),
            ));
        }
        if data.coproduct.shape() != (d * d, d) {
            return Err(shape_err(
                "coproduct",
                format!("{:?}", data.coproduct.shape()),
                format!("({}, {d})", d * d),
            ));
        }
        if data.faithful_rep.len() != d {
            return Err(shape_err(
                "faithful_rep",
                data.faithful_rep.len().to_string(),
                d.to_string(),
            ));
        }
        let r = data.faithful_rep[0].nrows();
        if r == 0 || data.faithful_rep.iter().any(|m| m.shape() != (r, r)) {
            return Err(Error::Structure(
                "faithful_rep matrices must be square and all of one size".into(),
            ));
        }

        let left = (0..d)
            .map(|i| CMatrix::from_fn(d, d, |k, j| data.mult[(i * d + j) * d + k]))
            .collect();
        let coproduct_terms = (0..d)
            .map(|i| {
                let mut terms = Vec::new();
                for j in 0..d {
                    for k in 0..d {
                        let c = data.coproduct[(j * d + k, i)];
                        if c != ZERO {
                            terms.push((j, k, c));
                        }
                    }
                }
                terms
            })
            .collect();
        Ok(Self {
            data,
            left,
            coproduct_terms,
        })
    }

    pub fn dim(&self) -> usize {
        self.data.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.data.labels
    }

    pub fn data(&self) -> &BialgebraData {
        &self.data
    }

    pub fn into_data(self) -> BialgebraData {
        self.data
    }

    #[inline]
    pub fn mult(&self, i: usize, j: usize, k: usize) -> C64 {
        let d = self.dim();
        self.data.mult[(i * d + j) * d + k]
    }

    /// Left multiplication by `b_i` as a `d × d` matrix on coefficient columns.
    pub fn left_mult(&self, i: usize) -> &CMatrix {
        &self.left[i]
    }

    pub fn unit(&self) -> &CVector {
        &self.data.unit
    }

    pub fn counit(&self) -> &CVector {
        &self.data.counit
    }

    pub fn star_matrix(&self) -> &CMatrix {
        &self.data.star
    }

    pub fn coproduct(&self) -> &CMatrix {
        &self.data.coproduct
    }

    /// Nonzero `(j, k, c)` with `Δ(b_i) = Σ c b_j ⊗ b_k`.
    pub fn coproduct_terms(&self, i: usize) -> &[(usize, usize, C64)] {
        &self.coproduct_terms[i]
    }

    pub fn faithful_rep(&self) -> &[CMatrix] {
        &self.data.faithful_rep
    }

    pub fn rep_dim(&self) -> usize {
        self.data.faithful_rep[0].nrows()
    }

    pub fn basis(&self, i: usize) -> CVector {
        basis_vector(self.dim(), i)
    }

    pub fn product(&self, x: &CVector, y: &CVector) -> CVector {
        let d = self.dim();
        let mut out = CVector::zeros(d);
        for (i, xi) in x.iter().enumerate() {
            if *xi == ZERO {
                continue;
            }
            out += &self.left[i] * y * *xi;
        }
        out
    }

    /// Coefficients of `b_i b_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> CVector {
        let d = self.dim();
        CVector::from_fn(d, |k, _| self.mult(i, j, k))
    }

    /// The involution, antilinear on coefficients.
    pub fn star(&self, x: &CVector) -> CVector {
        self.data.star.transpose() * x.map(|z| z.conj())
    }

    /// Coefficients of `b_i*`.
    pub fn basis_star(&self, i: usize) -> CVector {
        self.data.star.row(i).transpose()
    }

    pub fn counit_of(&self, x: &CVector) -> C64 {
        self.data.counit.dot(x)
    }

    /// `Δ(x)` as a `d²` coefficient vector on `b_j ⊗ b_k`.
    pub fn coproduct_of(&self, x: &CVector) -> CVector {
        &self.data.coproduct * x
    }

    /// Image under the faithful representation.
    pub fn rep_of(&self, x: &CVector) -> CMatrix {
        let r = self.rep_dim();
        let mut out = CMatrix::zeros(r, r);
        for (i, xi) in x.iter().enumerate() {
            if *xi != ZERO {
                out += &self.data.faithful_rep[i] * *xi;
            }
        }
        out
    }

    /// C*-norm of an element, through the faithful representation.
    pub fn norm_of(&self, x: &CVector) -> f64 {
        op_norm(&self.rep_of(x))
    }

    /// Image of a linear map given on the basis.
    pub fn apply_linear(maps: &[CMatrix], x: &CVector) -> CMatrix {
        let (r, c) = maps[0].shape();
        let mut out = CMatrix::zeros(r, c);
        for (m, xi) in maps.iter().zip(x.iter()) {
            if *xi != ZERO {
                out += m * *xi;
            }
        }
        out
    }

    pub(crate) fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Structure(format!(
                "{what} has length {len}, algebra has dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }
}
