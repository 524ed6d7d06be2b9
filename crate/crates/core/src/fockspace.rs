//! Exact open-system model on a truncated spin ⊗ Fock space.
//!
//! Basis index `s * (n_max + 1) + k` with spin index `s` (0 = ↑, 1 = ↓) slowest.
//! Operators are vectorised column-stacked: ρ_ij ↦ `j * dim + i`.

use crate::ModelParams;
use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, thiserror::Error)]
pub enum FockError {
    #[error("Fock cutoff must be at least 2, got {0}")]
    InvalidCutoff(usize),
    #[error("Δ/ω must be positive and finite, got {0}")]
    InvalidRatio(f64),
    #[error("model Δ/ω = {params} differs from configured ratio {config}")]
    RatioMismatch { params: f64, config: f64 },
    #[error("sparse factorisation failed: {0}")]
    Factorisation(String),
    #[error("steady state is not unique ({} independent solutions)", basis.len())]
    DegenerateNullSpace { basis: Vec<DensityMatrix> },
    #[error("steady-state residual {residual:e} exceeds tolerance")]
    Residual { residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertConfig {
    pub n_max: usize,
    /// Δ/ω.
    pub ratio: f64,
}

impl Default for HilbertConfig {
    fn default() -> Self {
        Self { n_max: 40, ratio: 50.0 }
    }
}

impl HilbertConfig {
    pub fn validate(&self) -> Result<(), FockError> {
        if self.n_max < 2 {
            return Err(FockError::InvalidCutoff(self.n_max));
        }
        if !(self.ratio > 0.0 && self.ratio.is_finite()) {
            return Err(FockError::InvalidRatio(self.ratio));
        }
        Ok(())
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.fock_dim()
    }

    /// Copy of `p` with Δ set to `ratio · ω`.
    pub fn params(&self, p: &ModelParams) -> ModelParams {
        ModelParams { delta: self.ratio * p.omega, ..*p }
    }
}

type Sparse = Vec<(usize, usize, f64)>;

fn kron(a: &Sparse, b: &Sparse, nb: usize, scale: Complex64, out: &mut Vec<(usize, usize, Complex64)>) {
    for &(ia, ja, va) in a {
        for &(ib, jb, vb) in b {
            out.push((ia * nb + ib, ja * nb + jb, scale * (va * vb)));
        }
    }
}

fn transpose(a: &Sparse) -> Sparse {
    a.iter().map(|&(i, j, v)| (j, i, v)).collect()
}

fn identity(n: usize) -> Sparse {
    (0..n).map(|i| (i, i, 1.0)).collect()
}

fn matmul(a: &Sparse, b: &Sparse, n: usize) -> Sparse {
    let mut d = vec![0.0; n * n];
    for &(i, k, va) in a {
        for &(k2, j, vb) in b {
            if k == k2 {
                d[i * n + j] += va * vb;
            }
        }
    }
    (0..n * n).filter(|&x| d[x] != 0.0).map(|x| (x / n, x % n, d[x])).collect()
}

/// Hamiltonian and annihilation operator as real sparse triplets.
pub fn hamiltonian(p: &ModelParams, cfg: &HilbertConfig) -> (Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>) {
    let nf = cfg.fock_dim();
    let idx = |s: usize, k: usize| s * nf + k;
    let g = p.g_tilde * (p.omega * p.delta).sqrt();
    let d = p.kappa * g * g / p.delta;
    let mut h = Vec::new();
    let mut a = Vec::new();
    for s in 0..2 {
        let half = if s == 0 { p.delta / 2.0 } else { -p.delta / 2.0 };
        for k in 0..nf {
            let i = idx(s, k);
            // D(a + a†)² = D(a² + a†² + 2a†a + 1)
            h.push((i, i, p.omega * k as f64 + half + d * (2 * k + 1) as f64));
            if k + 2 < nf {
                let v = d * (((k + 1) * (k + 2)) as f64).sqrt();
                h.push((i, idx(s, k + 2), v));
                h.push((idx(s, k + 2), i, v));
            }
            if k + 1 < nf {
                a.push((i, idx(s, k + 1), ((k + 1) as f64).sqrt()));
            }
        }
    }
    for k in 0..nf {
        // aσ₊ + a†σ₋ connects |↓,k⟩ and |↑,k−1⟩.
        if k >= 1 {
            let v = g * (k as f64).sqrt();
            h.push((idx(0, k - 1), idx(1, k), v));
            h.push((idx(1, k), idx(0, k - 1), v));
        }
        // τ(a†σ₊ + aσ₋) connects |↓,k⟩ and |↑,k+1⟩.
        if k + 1 < nf {
            let v = p.tau * g * ((k + 1) as f64).sqrt();
            h.push((idx(0, k + 1), idx(1, k), v));
            h.push((idx(1, k), idx(0, k + 1), v));
        }
    }
    (h, a)
}

/// Sparse Lindblad generator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub config: HilbertConfig,
    /// Operator dimension 2(n_max + 1); the superoperator is dim² × dim².
    pub dim: usize,
    pub triplets: Vec<(usize, usize, Complex64)>,
}

pub fn build_liouvillian(p: &ModelParams, cfg: &HilbertConfig) -> Result<Liouvillian, FockError> {
    cfg.validate()?;
    if (p.ratio() - cfg.ratio).abs() > 1e-12 * cfg.ratio {
        return Err(FockError::RatioMismatch { params: p.ratio(), config: cfg.ratio });
    }
    let n = cfg.dim();
    let (h, a) = hamiltonian(p, cfg);
    let id = identity(n);
    let ad_a = matmul(&transpose(&a), &a, n);
    let gamma = p.gamma();
    let i = Complex64::i();
    let mut t = Vec::new();
    kron(&id, &h, n, -i, &mut t);
    kron(&transpose(&h), &id, n, i, &mut t);
    kron(&a, &a, n, Complex64::new(2.0 * gamma, 0.0), &mut t);
    kron(&id, &ad_a, n, Complex64::new(-gamma, 0.0), &mut t);
    kron(&transpose(&ad_a), &id, n, Complex64::new(-gamma, 0.0), &mut t);
    Ok(Liouvillian { config: *cfg, dim: n, triplets: t })
}

impl Liouvillian {
    /// L·v for a column-stacked operator.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; v.len()];
        for &(r, c, x) in &self.triplets {
            out[r] += x * v[c];
        }
        out
    }

    /// Rows of the trace functional summed over each column; zero for a
    /// trace-preserving generator.
    pub fn trace_column_sums(&self) -> Vec<Complex64> {
        let n = self.dim;
        let mut sums = vec![ZERO; n * n];
        for &(r, c, x) in &self.triplets {
            if r % (n + 1) == 0 {
                sums[c] += x;
            }
        }
        sums
    }

    fn solve_with_trace_row(&self, row: usize) -> Result<Vec<Complex64>, FockError> {
        let n = self.dim;
        let mut t: Vec<Triplet<usize, usize, Complex64>> =
            self.triplets.iter().filter(|&&(r, _, _)| r != row).map(|&(r, c, x)| Triplet::new(r, c, x)).collect();
        t.extend((0..n).map(|k| Triplet::new(row, k * n + k, ONE)));
        let m = SparseColMat::<usize, Complex64>::try_new_from_triplets(n * n, n * n, &t)
            .map_err(|e| FockError::Factorisation(format!("{e:?}")))?;
        let lu = m.sp_lu().map_err(|e| FockError::Factorisation(format!("{e:?}")))?;
        let mut b = Mat::<Complex64>::zeros(n * n, 1);
        b[(row, 0)] = ONE;
        let x = lu.solve(&b);
        let v: Vec<Complex64> = (0..n * n).map(|k| x[(k, 0)]).collect();
        if v.iter().any(|z| !z.is_finite()) {
            return Err(FockError::Factorisation("non-finite solution".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub n_max: usize,
    pub data: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_vec(n_max: usize, v: &[Complex64]) -> Self {
        let n = 2 * (n_max + 1);
        Self { n_max, data: DMatrix::from_column_slice(n, n, v) }
    }

    /// |k⟩⟨k| ⊗ |s⟩⟨s| with s = 0 for ↑ and 1 for ↓.
    pub fn basis_state(n_max: usize, spin: usize, k: usize) -> Self {
        let n = 2 * (n_max + 1);
        let i = spin * (n_max + 1) + k;
        let mut data = DMatrix::from_element(n, n, ZERO);
        data[(i, i)] = ONE;
        Self { n_max, data }
    }

    pub fn to_vec(&self) -> Vec<Complex64> {
        self.data.as_slice().to_vec()
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.data - self.data.adjoint()).camax()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.data.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let d = &self.data - &other.data;
        0.5 * d.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Unnormalised cavity block ⟨↓|ρ|↓⟩.
    pub fn spin_down_block(&self) -> DMatrix<Complex64> {
        let nf = self.n_max + 1;
        self.data.view((nf, nf), (nf, nf)).into_owned()
    }

    /// Total population of the two highest Fock levels.
    pub fn top_population(&self) -> f64 {
        let nf = self.n_max + 1;
        [0, 1].iter().flat_map(|&s| [nf - 1, nf - 2].map(|k| self.data[(s * nf + k, s * nf + k)].re)).sum()
    }

    pub fn cutoff_sufficient(&self) -> bool {
        self.top_population() < 1e-6
    }
}

/// Largest superoperator dimension handled by the dense null-space fallback.
pub const DENSE_LIMIT: usize = 2500;

fn hermitised(n_max: usize, v: &[Complex64]) -> DensityMatrix {
    let mut r = DensityMatrix::from_vec(n_max, v);
    r.data = (&r.data + r.data.adjoint()) * Complex64::new(0.5, 0.0);
    r
}

/// Null space of `l` by dense SVD, each vector scaled to unit trace when its
/// trace is non-zero.
pub fn dense_null_basis(l: &Liouvillian, rel_tol: f64) -> Vec<DensityMatrix> {
    let n2 = l.dim * l.dim;
    let mut m = DMatrix::from_element(n2, n2, ZERO);
    for &(r, c, x) in &l.triplets {
        m[(r, c)] += x;
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    (0..n2)
        .filter(|&k| svd.singular_values[k] <= rel_tol * smax)
        .map(|k| {
            let v: Vec<Complex64> = v_t.row(k).iter().map(|z| z.conj()).collect();
            let mut r = DensityMatrix::from_vec(l.config.n_max, &v);
            let t = r.trace();
            if t.norm() > 1e-8 {
                r.data /= t;
            }
            r
        })
        .collect()
}

/// Null vector of `l` with unit trace, Hermitised. The trace constraint is
/// imposed on two different rows; disagreement or a singular system signals
/// a degenerate null space.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix, FockError> {
    let n = l.dim;
    let n_max = l.config.n_max;
    let solutions = (l.solve_with_trace_row(0), l.solve_with_trace_row(n * n - 1));
    let rho = match solutions {
        (Ok(x), Ok(y)) => {
            let (a, b) = (hermitised(n_max, &x), hermitised(n_max, &y));
            let scale = a.data.camax().max(b.data.camax());
            if (&a.data - &b.data).camax() > 1e-6 * scale {
                return Err(FockError::DegenerateNullSpace { basis: vec![a, b] });
            }
            a
        }
        (first, _) if n * n <= DENSE_LIMIT => {
            let mut basis = dense_null_basis(l, 1e-12);
            match basis.len() {
                0 => return Err(first.err().unwrap_or(FockError::Factorisation("empty null space".into()))),
                1 => {
                    let r = basis.pop().unwrap();
                    hermitised(n_max, &r.to_vec())
                }
                _ => return Err(FockError::DegenerateNullSpace { basis }),
            }
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let residual = l.apply(&rho.to_vec()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if residual > 1e-10 {
        return Err(FockError::Residual { residual });
    }
    Ok(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub a: Complex64,
    pub n: f64,
    pub a2: Complex64,
    pub sigma_z: f64,
    pub sigma_plus: Complex64,
    pub sigma_minus: Complex64,
    /// ⟨−σ_z e^{iπa†a}⟩.
    pub parity: f64,
}

pub fn observables(rho: &DensityMatrix) -> Observables {
    let nf = rho.n_max + 1;
    let r = &rho.data;
    let mut o =
        Observables { a: ZERO, n: 0.0, a2: ZERO, sigma_z: 0.0, sigma_plus: ZERO, sigma_minus: ZERO, parity: 0.0 };
    for s in 0..2 {
        let sz = if s == 0 { 1.0 } else { -1.0 };
        for k in 0..nf {
            let i = s * nf + k;
            let pop = r[(i, i)].re;
            o.n += k as f64 * pop;
            o.sigma_z += sz * pop;
            o.parity += -sz * if k % 2 == 0 { 1.0 } else { -1.0 } * pop;
            // Tr(ρa) = Σ ρ_{k+1,k}√(k+1)
            if k + 1 < nf {
                o.a += r[(i + 1, i)] * ((k + 1) as f64).sqrt();
            }
            if k + 2 < nf {
                o.a2 += r[(i + 2, i)] * (((k + 1) * (k + 2)) as f64).sqrt();
            }
        }
    }
    for k in 0..nf {
        // σ₊ = |↑⟩⟨↓|, so Tr(ρσ₊) = Σ_k ρ_{↓k,↑k}.
        o.sigma_plus += r[(nf + k, k)];
        o.sigma_minus += r[(k, nf + k)];
    }
    o
}

/// Quasi-probability on a rectangular grid; `values[(ip, ix)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub values: DMatrix<f64>,
}

impl WignerGrid {
    /// Trapezoidal ∫∫ W dx dp.
    pub fn integral(&self) -> f64 {
        let w = |v: &[f64], i: usize| {
            let n = v.len();
            if n < 2 {
                return 0.0;
            }
            let left = if i > 0 { v[i] - v[i - 1] } else { 0.0 };
            let right = if i + 1 < n { v[i + 1] - v[i] } else { 0.0 };
            0.5 * (left + right)
        };
        let mut s = 0.0;
        for (ip, _) in self.p.iter().enumerate() {
            for (ix, _) in self.x.iter().enumerate() {
                s += self.values[(ip, ix)] * w(&self.x, ix) * w(&self.p, ip);
            }
        }
        s
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    pub fn boundary_max(&self) -> f64 {
        let (r, c) = self.values.shape();
        let mut m: f64 = 0.0;
        for i in 0..r {
            m = m.max(self.values[(i, 0)].abs()).max(self.values[(i, c - 1)].abs());
        }
        for j in 0..c {
            m = m.max(self.values[(0, j)].abs()).max(self.values[(r - 1, j)].abs());
        }
        m
    }
}

/// Evenly spaced axis of `n` points on [lo, hi].
pub fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn wigner_point(rho: &DMatrix<Complex64>, x: f64, p: f64) -> f64 {
    let m = rho.nrows();
    let alpha = Complex64::new(x, p) / std::f64::consts::SQRT_2;
    let b = 4.0 * alpha.norm_sqr();
    let two_a = 2.0 * alpha;
    let mut total = 0.0;
    // Offset k = n − m; generalised Laguerre L_j^k(b) by upward recurrence in j.
    let mut pow = ONE;
    for k in 0..m {
        let (mut l_prev, mut l_cur) = (0.0, 1.0);
        // √(j!/(j+k)!) built incrementally.
        let mut ratio = (1..=k).fold(1.0, |acc, q| acc / (q as f64).sqrt());
        let mut acc = ZERO;
        for j in 0..m - k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += rho[(j, j + k)] * (sign * ratio * l_cur);
            let next = ((2 * j + 1 + k) as f64 - b) * l_cur - (j + k) as f64 * l_prev;
            l_prev = l_cur;
            l_cur = next / (j + 1) as f64;
            ratio *= ((j + 1) as f64 / (j + 1 + k) as f64).sqrt();
        }
        let term = acc * pow;
        total += if k == 0 { term.re } else { 2.0 * term.re };
        pow *= two_a;
    }
    total * (-b / 2.0).exp() / std::f64::consts::PI
}

/// W(x, p) of a single-mode operator via displaced-parity matrix elements,
/// with x = (a + a†)/√2 and p = (a − a†)/(i√2).
pub fn wigner(rho: &DMatrix<Complex64>, x: &[f64], p: &[f64]) -> WignerGrid {
    let rows: Vec<Vec<f64>> = p.par_iter().map(|&pv| x.iter().map(|&xv| wigner_point(rho, xv, pv)).collect()).collect();
    let values = DMatrix::from_fn(p.len(), x.len(), |i, j| rows[i][j]);
    WignerGrid { x: x.to_vec(), p: p.to_vec(), values }
}

/// Evaluates on a square grid centred on the origin with fixed spacing,
/// growing the half-width by half until the boundary magnitude drops below
/// `edge_tol` or `max_expansions` is reached.
pub fn wigner_auto(
    rho: &DMatrix<Complex64>,
    half_width: f64,
    spacing: f64,
    edge_tol: f64,
    max_expansions: usize,
) -> WignerGrid {
    let mut l = half_width;
    let mut k = 0;
    loop {
        let half = (l / spacing).ceil() as i64;
        let ax: Vec<f64> = (-half..=half).map(|i| i as f64 * spacing).collect();
        let w = wigner(rho, &ax, &ax);
        if w.boundary_max() < edge_tol || k >= max_expansions {
            return w;
        }
        l *= 1.5;
        k += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub x: f64,
    pub p: f64,
    pub value: f64,
}

/// Interior local maxima above `frac · max W`, kept greedily by height with a
/// Chebyshev separation of at least `sep` cells.
pub fn count_peaks(w: &WignerGrid, frac: f64, sep: usize) -> Vec<Peak> {
    let v = &w.values;
    let (r, c) = v.shape();
    let floor = frac * w.max();
    let mut cand = Vec::new();
    for i in 1..r.saturating_sub(1) {
        for j in 1..c.saturating_sub(1) {
            let z = v[(i, j)];
            if z <= floor {
                continue;
            }
            let is_max = (i - 1..=i + 1).all(|a| (j - 1..=j + 1).all(|b| v[(a, b)] <= z));
            if is_max {
                cand.push((z, i, j));
            }
        }
    }
    cand.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut kept: Vec<(f64, usize, usize)> = Vec::new();
    for (z, i, j) in cand {
        if kept.iter().all(|&(_, a, b)| i.abs_diff(a).max(j.abs_diff(b)) >= sep) {
            kept.push((z, i, j));
        }
    }
    kept.into_iter().map(|(z, i, j)| Peak { x: w.x[j], p: w.p[i], value: z }).collect()
}

/// Steady state and observables for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub observables: Observables,
    pub top_population: f64,
    pub cutoff_sufficient: bool,
}

pub fn solve_steady_state(p: &ModelParams, cfg: &HilbertConfig) -> Result<SteadyState, FockError> {
    let l = build_liouvillian(&cfg.params(p), cfg)?;
    let rho = steady_state(&l)?;
    Ok(SteadyState {
        observables: observables(&rho),
        top_population: rho.top_population(),
        cutoff_sufficient: rho.cutoff_sufficient(),
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_max: usize, ratio: f64) -> HilbertConfig {
        HilbertConfig { n_max, ratio }
    }

    fn params(g: f64, t: f64, k: f64, c: &HilbertConfig) -> ModelParams {
        c.params(&ModelParams::unit(g, t, k, 0.5).unwrap())
    }

    #[test]
    fn rejects_bad_config() {
        assert!(matches!(cfg(1, 5.0).validate(), Err(FockError::InvalidCutoff(1))));
        assert!(matches!(cfg(4, 0.0).validate(), Err(FockError::InvalidRatio(_))));
        let p = ModelParams::unit(0.5, 2.0, 3.0, 0.5).unwrap();
        assert!(matches!(build_liouvillian(&p, &cfg(4, 5.0)), Err(FockError::RatioMismatch { .. })));
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let c = cfg(6, 5.0);
        let (h, _) = hamiltonian(&params(0.7, 2.0, 3.0, &c), &c);
        let n = c.dim();
        let mut d = vec![0.0; n * n];
        for (i, j, v) in h {
            d[i * n + j] += v;
        }
        for i in 0..n {
            for j in 0..n {
                assert_eq!(d[i * n + j], d[j * n + i]);
            }
        }
    }

    #[test]
    fn trace_preserving() {
        let c = cfg(6, 5.0);
        let l = build_liouvillian(&params(0.7, 2.0, 3.0, &c), &c).unwrap();
        assert!(l.trace_column_sums().iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn damped_cavity_relaxes_to_vacuum_down() {
        let c = cfg(5, 5.0);
        let l = build_liouvillian(&params(0.0, 2.0, 0.0, &c), &c).unwrap();
        let vac = DensityMatrix::basis_state(5, 1, 0);
        assert!(l.apply(&vac.to_vec()).iter().all(|z| z.norm() < 1e-14));
        // The decoupled spin keeps its populations, so the null space is two-dimensional
        // and contains vacuum ⊗ ↓.
        let Err(FockError::DegenerateNullSpace { basis }) = steady_state(&l) else { panic!("expected degeneracy") };
        assert_eq!(basis.len(), 2);
        let down = |r: &DensityMatrix| r.data[(6, 6)];
        let up = |r: &DensityMatrix| r.data[(0, 0)];
        // Some combination of the basis reproduces vacuum ⊗ ↓.
        let (a, b) = (&basis[0], &basis[1]);
        let det = up(a) * down(b) - up(b) * down(a);
        assert!(det.norm() > 1e-6);
        let ca = -up(b) / det;
        let cb = up(a) / det;
        let comb = &a.data * ca + &b.data * cb;
        assert!((comb - &vac.data).camax() < 1e-10);
    }

    #[test]
    fn vacuum_observables() {
        let o = observables(&DensityMatrix::basis_state(4, 1, 0));
        assert_eq!(o.n, 0.0);
        assert_eq!(o.sigma_z, -1.0);
        assert_eq!(o.parity, 1.0);
    }

    #[test]
    fn vacuum_wigner_peak() {
        let mut r = DMatrix::from_element(3, 3, ZERO);
        r[(0, 0)] = ONE;
        let w = wigner(&r, &[0.0], &[0.0]);
        assert!((w.values[(0, 0)] - 1.0 / std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn single_photon_is_negative_at_origin() {
        let mut r = DMatrix::from_element(3, 3, ZERO);
        r[(1, 1)] = ONE;
        let w = wigner(&r, &[0.0], &[0.0]);
        assert!((w.values[(0, 0)] + 1.0 / std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn peak_separation() {
        let ax = axis(-1.0, 1.0, 21);
        let values = DMatrix::from_fn(21, 21, |i, j| {
            let (x, p) = (ax[j], ax[i]);
            (-((x - 0.5).powi(2) + p * p) * 40.0).exp() + 0.5 * (-((x + 0.5).powi(2) + p * p) * 40.0).exp()
        });
        let w = WignerGrid { x: ax.clone(), p: ax, values };
        let peaks = count_peaks(&w, 0.05, 3);
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0].x - 0.5).abs() < 1e-12);
        assert_eq!(count_peaks(&w, 0.6, 3).len(), 1);
    }
}
