//! Finite groups from Cayley tables and the two bialgebras they induce.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, ONE, ZERO};

use super::{BialgebraData, FiniteBialgebra};

/// A finite group with elements `0..n`; `table[g][h]` is the index of `gh`.
#[derive(Clone, Debug)]
pub struct Group {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl Group {
    /// Checks closure, associativity, a two-sided identity and inverses.
    pub fn from_cayley(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if labels.len() != n {
            return Err(Error::InvalidGroup(format!(
                "{} labels for {n} elements",
                labels.len()
            )));
        }
        if table
            .iter()
            .any(|row| row.len() != n || row.iter().any(|&x| x >= n))
        {
            return Err(Error::InvalidGroup(
                "table is not an n×n array over 0..n".into(),
            ));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let inverses = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table[g][h] == identity && table[h][g] == identity)
                    .ok_or_else(|| Error::InvalidGroup(format!("{} has no inverse", labels[g])))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            labels,
            table,
            identity,
            inverses,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let labels = (0..n).map(|g| g.to_string()).collect();
        let table = (0..n)
            .map(|g| (0..n).map(|h| (g + h) % n).collect())
            .collect();
        Self::from_cayley(labels, table).expect("cyclic group table is valid")
    }

    /// S₃ as permutations of {1,2,3} in one-line notation, identity first.
    /// The product `gh` is the composition `g ∘ h`.
    pub fn symmetric3() -> Self {
        let perms = Self::s3_permutations();
        let index = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| index(&[g[h[0]], g[h[1]], g[h[2]]]))
                    .collect()
            })
            .collect();
        let labels = perms
            .iter()
            .map(|p| p.iter().map(|x| (x + 1).to_string()).collect::<String>())
            .collect();
        Self::from_cayley(labels, table).expect("S3 table is valid")
    }

    /// The permutations behind [`Group::symmetric3`], in element order.
    pub fn s3_permutations() -> [[usize; 3]; 6] {
        [
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ]
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }
}

/// ℂ[G]: `λ_g λ_h = λ_{gh}`, `λ_g* = λ_{g⁻¹}`, `Δλ_g = λ_g ⊗ λ_g`, `ε(λ_g) = 1`,
/// represented faithfully by the left regular representation.
pub fn build_group_algebra(group: &Group) -> FiniteBialgebra {
    let n = group.order();
    let mut mult = vec![ZERO; n * n * n];
    for g in 0..n {
        for h in 0..n {
            mult[(g * n + h) * n + group.mul(g, h)] = ONE;
        }
    }
    let star = CMatrix::from_fn(n, n, |g, h| if h == group.inverse(g) { ONE } else { ZERO });
    let mut coproduct = CMatrix::zeros(n * n, n);
    for g in 0..n {
        coproduct[(g * n + g, g)] = ONE;
    }
    let faithful_rep = (0..n)
        .map(|g| CMatrix::from_fn(n, n, |r, c| if r == group.mul(g, c) { ONE } else { ZERO }))
        .collect();
    let data = BialgebraData {
        labels: group.labels().iter().map(|l| format!("λ{l}")).collect(),
        mult,
        unit: crate::linalg::basis_vector(n, group.identity()),
        star,
        counit: CVector::from_element(n, ONE),
        coproduct,
        faithful_rep,
    };
    FiniteBialgebra::new(data).expect("group algebra shapes are consistent")
}

/// C(G): `e_g e_h = δ_{g,h} e_g`, `e_g* = e_g`, `Δe_g = Σ_{hh' = g} e_h ⊗ e_{h'}`,
/// `ε(e_g) = δ_{g,id}`, represented faithfully by diagonal matrices.
pub fn build_function_algebra(group: &Group) -> FiniteBialgebra {
    let n = group.order();
    let mut mult = vec![ZERO; n * n * n];
    for g in 0..n {
        mult[(g * n + g) * n + g] = ONE;
    }
    let mut coproduct = CMatrix::zeros(n * n, n);
    for h in 0..n {
        for h2 in 0..n {
            coproduct[(h * n + h2, group.mul(h, h2))] = ONE;
        }
    }
    let faithful_rep = (0..n)
        .map(|g| {
            let mut m = CMatrix::zeros(n, n);
            m[(g, g)] = ONE;
            m
        })
        .collect();
    let data = BialgebraData {
        labels: group.labels().iter().map(|l| format!("δ{l}")).collect(),
        mult,
        unit: CVector::from_element(n, ONE),
        star: CMatrix::identity(n, n),
        counit: crate::linalg::basis_vector(n, group.identity()),
        coproduct,
        faithful_rep,
    };
    FiniteBialgebra::new(data).expect("function algebra shapes are consistent")
}

/// The 2-dimensional irreducible representation of S₃ (standard representation),
/// indexed like [`Group::symmetric3`]: permutation matrices restricted to the
/// orthonormal basis `(1,−1,0)/√2, (1,1,−2)/√6` of the sum-zero plane.
pub fn s3_standard_irrep() -> Vec<CMatrix> {
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    let basis = CMatrix::from_row_slice(
        3,
        2,
        &[
            C64::new(1.0 / s2, 0.0),
            C64::new(1.0 / s6, 0.0),
            C64::new(-1.0 / s2, 0.0),
            C64::new(1.0 / s6, 0.0),
            ZERO,
            C64::new(-2.0 / s6, 0.0),
        ],
    );
    Group::s3_permutations()
        .iter()
        .map(|p| {
            // P e_i = e_{p(i)}
            let perm = CMatrix::from_fn(3, 3, |r, c| if r == p[c] { ONE } else { ZERO });
            basis.adjoint() * perm * &basis
        })
        .collect()
}
