//! `[re, im]` pair encoding of complex vectors and matrices for JSON/TOML files.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

pub type Pair = [f64; 2];

pub fn c64(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn pair(z: &C64) -> Pair {
    [z.re, z.im]
}

pub fn vec_to_pairs(v: &CVector) -> Vec<Pair> {
    v.iter().map(pair).collect()
}

pub fn pairs_to_vec(p: &[Pair]) -> CVector {
    CVector::from_iterator(p.len(), p.iter().map(c64))
}

pub fn mat_to_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| pair(&m[(r, c)])).collect())
        .collect()
}

pub fn rows_to_mat(rows: &[Vec<Pair>], what: &str) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Structure(format!("{what}: ragged matrix rows")));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |r, c| c64(&rows[r][c])))
}

/// JSON for a pair with integral components written without a fractional part.
pub(crate) fn format_pair(p: &Pair) -> String {
    format!("[{},{}]", format_number(p[0]), format_number(p[1]))
}

pub(crate) fn format_number(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        serde_json::to_string(&x).unwrap_or_else(|_| "null".into())
    }
}

pub(crate) fn format_pair_row(row: &[Pair]) -> String {
    let items: Vec<String> = row.iter().map(format_pair).collect();
    format!("[{}]", items.join(","))
}
