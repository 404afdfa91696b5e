//! Exponential vectors of step functions, their discretization on time slots
//! of width `h`, and matrix elements of the walk and of the limiting Lévy
//! process between them.
//!
//! The continuous-time process is never built as an operator. Its matrix
//! elements `⟨ε(f), l_t(a) ε(g)⟩` are the ordered convolution, over the pieces
//! of `[0, t)` where `f, g` are constant (values `c, d`, length `Δ`), of
//! `e^{Δ⟨c,d⟩} exp_⋆(Δ γ_{c,d})` with `γ_{c,d}(a) = ⟨(1,c), φ(a) (1,d)⟩`.

use crate::algebra::{convolution_exponential, convolve_unchecked, FiniteBialgebra, Functional};
use crate::error::{Error, Result};
use crate::linalg::{re, CVector, C64, ONE};
use crate::schurmann::{assemble_phi, BlockGenerator, SchurmannTriple};
use crate::walk::{ordered_convolution, slot_functional, walk_dense, WalkStep};

/// Piecewise-constant `k`-valued function on `[0, T)`, zero beyond `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    k_dim: usize,
    pieces: Vec<(f64, CVector)>,
}

impl StepFunction {
    pub fn new(k_dim: usize, pieces: Vec<(f64, CVector)>) -> Result<Self> {
        for (dur, v) in &pieces {
            if !(*dur > 0.0 && dur.is_finite()) {
                return Err(Error::Structure(format!(
                    "step duration {dur} must be positive"
                )));
            }
            if v.len() != k_dim {
                return Err(Error::Structure(format!(
                    "step value has length {}, expected {k_dim}",
                    v.len()
                )));
            }
        }
        Ok(Self { k_dim, pieces })
    }

    pub fn zero(k_dim: usize) -> Self {
        Self {
            k_dim,
            pieces: Vec::new(),
        }
    }

    pub fn constant(value: CVector, duration: f64) -> Result<Self> {
        Self::new(value.len(), vec![(duration, value)])
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn pieces(&self) -> &[(f64, CVector)] {
        &self.pieces
    }

    pub fn total(&self) -> f64 {
        self.pieces.iter().map(|(d, _)| d).sum()
    }

    /// Interior and end breakpoints, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .scan(0.0, |acc, (d, _)| {
                *acc += d;
                Some(*acc)
            })
            .collect()
    }

    pub fn value_at(&self, t: f64) -> CVector {
        let mut start = 0.0;
        for (d, v) in &self.pieces {
            if t >= start && t < start + d {
                return v.clone();
            }
            start += d;
        }
        CVector::zeros(self.k_dim)
    }

    /// `∫_{t0}^{t1} f`, exact for step functions.
    pub fn integral(&self, t0: f64, t1: f64) -> CVector {
        let mut out = CVector::zeros(self.k_dim);
        let mut start = 0.0f64;
        for (d, v) in &self.pieces {
            let lo = start.max(t0);
            let hi = (start + d).min(t1);
            if hi > lo {
                out += v * re(hi - lo);
            }
            start += d;
        }
        out
    }

    pub fn average(&self, t0: f64, t1: f64) -> CVector {
        self.integral(t0, t1) / re(t1 - t0)
    }

    /// `∫_0^t ⟨f, g⟩`.
    pub fn inner_integral(&self, other: &StepFunction, t: f64) -> C64 {
        partition(self, other, 0.0, t)
            .into_iter()
            .map(|(lo, hi)| self.value_at(lo).dotc(&other.value_at(lo)) * (hi - lo))
            .sum()
    }
}

/// Maximal subintervals of `[t0, t1)` on which both functions are constant.
pub fn partition(f: &StepFunction, g: &StepFunction, t0: f64, t1: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = f
        .breakpoints()
        .into_iter()
        .chain(g.breakpoints())
        .filter(|&b| b > t0 && b < t1)
        .collect();
    cuts.push(t0);
    cuts.push(t1);
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Discretized exponential vector: slot `i` is `(1, √h · f̄_i)`, `f̄_i` the
/// average of `f` over `[(i−1)h, ih)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotVectors {
    pub h: f64,
    pub n: usize,
    pub slots: Vec<CVector>,
}

impl SlotVectors {
    /// `Π ⟨u_i, v_i⟩`.
    pub fn pairing(&self, other: &SlotVectors) -> C64 {
        self.slots
            .iter()
            .zip(other.slots.iter())
            .map(|(u, v)| u.dotc(v))
            .product()
    }
}

pub fn discretize_exponential(f: &StepFunction, h: f64, n: usize) -> Result<SlotVectors> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::StepOutOfRange {
            h,
            max: f64::INFINITY,
        });
    }
    let k = f.k_dim();
    let rh = h.sqrt();
    let slots = (0..n)
        .map(|i| {
            let avg = f.average(i as f64 * h, (i + 1) as f64 * h);
            let mut v = CVector::zeros(k + 1);
            v[0] = ONE;
            v.rows_mut(1, k).copy_from(&(avg * re(rh)));
            v
        })
        .collect();
    Ok(SlotVectors { h, n, slots })
}

/// `[t/h]`, with `t/h` within `1e-9` of an integer rounded to that integer.
pub fn step_count(t: f64, h: f64) -> usize {
    let q = t / h;
    let r = q.round();
    if (q - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        q.floor() as usize
    }
}

fn slot_pair(
    f: &StepFunction,
    g: &StepFunction,
    h: f64,
    t: f64,
) -> Result<(SlotVectors, SlotVectors)> {
    let n = step_count(t, h);
    Ok((
        discretize_exponential(f, h, n)?,
        discretize_exponential(g, h, n)?,
    ))
}

fn check_shapes(beta: &WalkStep, f: &StepFunction, g: &StepFunction, a: &CVector) -> Result<()> {
    let k = beta.k_dim();
    if f.k_dim() != k || g.k_dim() != k {
        return Err(Error::Structure(format!(
            "test functions take values in dimension {}/{}, walk noise has {k}",
            f.k_dim(),
            g.k_dim()
        )));
    }
    if a.len() != beta.mats().len() {
        return Err(Error::Structure(
            "observable length differs from algebra dimension".into(),
        ));
    }
    Ok(())
}

/// The functional `a ↦ ⟨D_h(f), J_n(a) D_h(g)⟩` with `n = [t/h]`.
pub fn walk_functional(
    alg: &FiniteBialgebra,
    beta: &WalkStep,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
) -> Result<Functional> {
    let (u, v) = slot_pair(f, g, beta.h, t)?;
    let mut acc = Functional::counit(alg);
    let mut cached: Option<(usize, Functional)> = None;
    for i in 0..u.n {
        let reuse = cached
            .as_ref()
            .is_some_and(|(j, _)| u.slots[*j] == u.slots[i] && v.slots[*j] == v.slots[i]);
        if !reuse {
            cached = Some((i, slot_functional(beta, &u.slots[i], &v.slots[i])));
        }
        let omega = &cached.as_ref().expect("slot functional cached").1;
        acc = convolve_unchecked(alg, &acc, omega);
    }
    Ok(acc)
}

/// `⟨D_h(f)|_n, J_n(a) D_h(g)|_n⟩`, `n = [t/h]`, by ordered convolution of slot functionals.
pub fn walk_matrix_element(
    alg: &FiniteBialgebra,
    beta: &WalkStep,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
    a: &CVector,
) -> Result<C64> {
    check_shapes(beta, f, g, a)?;
    Ok(walk_functional(alg, beta, f, g, t)?.eval(a))
}

/// The same matrix element through the materialized tensor power.
pub fn walk_matrix_element_dense(
    alg: &FiniteBialgebra,
    beta: &WalkStep,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
    a: &CVector,
    cap: usize,
) -> Result<C64> {
    check_shapes(beta, f, g, a)?;
    let (u, v) = slot_pair(f, g, beta.h, t)?;
    let dense = walk_dense(alg, beta, u.n, cap)?;
    Ok(dense.matrix_element(&u.slots, &v.slots, a))
}

/// `γ_{c,d}(a) = ⟨(1, c), φ(a) (1, d)⟩`.
pub fn associated_generator(phi: &BlockGenerator, c: &CVector, d: &CVector) -> Functional {
    let k = c.len();
    let mut ch = CVector::zeros(k + 1);
    let mut dh = CVector::zeros(k + 1);
    ch[0] = ONE;
    dh[0] = ONE;
    ch.rows_mut(1, k).copy_from(c);
    dh.rows_mut(1, k).copy_from(d);
    Functional::new(CVector::from_iterator(
        phi.mats.len(),
        phi.mats.iter().map(|m| ch.dotc(&(m * &dh))),
    ))
}

/// The interval functional `a ↦ ⟨ε(f_{[t0,t1)}), l_{[t0,t1)}(a) ε(g_{[t0,t1)})⟩`.
pub fn levy_functional(
    alg: &FiniteBialgebra,
    phi: &BlockGenerator,
    f: &StepFunction,
    g: &StepFunction,
    t0: f64,
    t1: f64,
) -> Result<Functional> {
    if t0 < 0.0 || t1 < t0 {
        return Err(Error::NegativeTime(t1 - t0));
    }
    let pieces = partition(f, g, t0, t1)
        .into_iter()
        .map(|(lo, hi)| {
            let (c, d) = (f.value_at(lo), g.value_at(lo));
            let len = hi - lo;
            let gen = associated_generator(phi, &c, &d);
            let scale = (c.dotc(&d) * len).exp();
            Ok(convolution_exponential(alg, &gen, len)?.scale(scale))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ordered_convolution(alg, &pieces))
}

/// `⟨ε(f_{[0,t)}), l_t(a) ε(g_{[0,t)})⟩`.
pub fn levy_matrix_element(
    alg: &FiniteBialgebra,
    triple: &SchurmannTriple,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
    a: &CVector,
) -> Result<C64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let k = triple.k_dim();
    if f.k_dim() != k || g.k_dim() != k {
        return Err(Error::Structure(
            "test functions do not match the noise dimension".into(),
        ));
    }
    alg.check_len(a.len(), "observable")?;
    let phi = assemble_phi(alg, triple);
    Ok(levy_functional(alg, &phi, f, g, 0.0, t)?.eval(a))
}
