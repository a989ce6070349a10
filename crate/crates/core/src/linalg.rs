//! Sparse symmetric matrices, a minimum-degree LDLᵀ factorization and a
//! shift-invert Lanczos solver for the smallest generalized eigenvalue of
//! `A x = λ B x`, with a dense solver as fallback and oracle.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric matrix in compressed sparse row form, both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate `(row, col, value)` entries. Each off-diagonal entry
    /// must be given in both orientations.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::Parameter(format!("entry ({i}, {j}) outside {n}x{n} matrix")));
            }
            rows[i].push((j, v));
        }
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        indptr.push(0);
        for row in &mut rows {
            row.sort_by_key(|p| p.0);
            for &(j, v) in row.iter() {
                if indices.len() > *indptr.last().unwrap() && *indices.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix { n, indptr, indices, values })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix { n, indptr: (0..=n).collect(), indices: (0..n).collect(), values: vec![1.0; n] }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::identity(d.len());
        m.values.copy_from_slice(d);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |p| p.1)
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| j == i || v == 0.0))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (self.get(j, i) - v).abs() <= tol * v.abs().max(1.0)))
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        dot(x, &y)
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: f64, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.n != other.n {
            return Err(Error::Parameter("matrix dimensions differ".into()));
        }
        let mut trip = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            trip.extend(self.row(i).map(|(j, v)| (i, j, v)));
            trip.extend(other.row(i).map(|(j, v)| (i, j, c * v)));
        }
        CsrMatrix::from_triplets(self.n, &trip)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// One `row col value` line per stored entry, 0-based, after a
    /// `% n nnz` header.
    pub fn write_coo(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "% {} {}", self.n, self.nnz())?;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(out, "{i} {j} {v:.17e}")?;
            }
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Minimum-degree elimination order on the sparsity graph of `a`, ties
/// broken by smallest index.
pub fn minimum_degree_order(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let mut adj: Vec<HashSet<usize>> =
        (0..n).map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect()).collect();
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n).map(|i| Reverse((adj[i].len(), i))).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] || d != adj[v].len() {
            continue;
        }
        done[v] = true;
        order.push(v);
        let mut nbrs: Vec<usize> = adj[v].drain().collect();
        nbrs.sort_unstable();
        for &u in &nbrs {
            adj[u].remove(&v);
        }
        for (k, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[k + 1..] {
                if adj[u].insert(w) {
                    adj[w].insert(u);
                }
            }
        }
        for &u in &nbrs {
            heap.push(Reverse((adj[u].len(), u)));
        }
    }
    order
}

/// `P A Pᵀ = L D Lᵀ` with unit lower-triangular `L` stored by columns.
#[derive(Debug, Clone)]
pub struct Ldlt {
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

/// Relative pivot size below which a factorization counts as singular.
pub const PIVOT_TOL: f64 = 1e-12;

impl Ldlt {
    /// Up-looking factorization driven by the elimination tree. Fails with
    /// the offending pivot when `a` is not numerically positive definite.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let perm = minimum_degree_order(a);
        Self::factor_with_order(a, perm)
    }

    pub fn factor_with_order(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.n;
        let mut pinv = vec![0; n];
        for (k, &p) in perm.iter().enumerate() {
            pinv[p] = k;
        }
        const NONE: usize = usize::MAX;
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for (j, _) in a.row(perm[k]) {
                let mut i = pinv[j];
                if i < k {
                    while flag[i] != k {
                        if parent[i] == NONE {
                            parent[i] = k;
                        }
                        lnz[i] += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                }
            }
        }
        let mut lp = vec![0; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        let mut li = vec![0; lp[n]];
        let mut lx = vec![0.0; lp[n]];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut pattern = vec![0; n];
        lnz.iter_mut().for_each(|c| *c = 0);
        flag.iter_mut().for_each(|f| *f = NONE);
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            let mut akk = 0.0;
            for (j, v) in a.row(perm[k]) {
                let mut i = pinv[j];
                if i <= k {
                    y[i] += v;
                    if i == k {
                        akk = v;
                    }
                    let mut len = 0;
                    while flag[i] != k {
                        pattern[len] = i;
                        len += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                    while len > 0 {
                        top -= 1;
                        len -= 1;
                        pattern[top] = pattern[len];
                    }
                }
            }
            d[k] = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let start = lp[i];
                for p in start..start + lnz[i] {
                    y[li[p]] -= lx[p] * yi;
                }
                let lki = yi / d[i];
                d[k] -= lki * yi;
                li[start + lnz[i]] = k;
                lx[start + lnz[i]] = lki;
                lnz[i] += 1;
            }
            if !(d[k] > PIVOT_TOL * akk.abs()) || !d[k].is_finite() {
                return Err(Error::Factorization { pivot: perm[k] });
            }
        }
        Ok(Ldlt { perm, lp, li, lx, d })
    }

    pub fn fill(&self) -> usize {
        self.lx.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            for p in self.lp[j]..self.lp[j + 1] {
                x[self.li[p]] -= self.lx[p] * xj;
            }
        }
        for (xj, dj) in x.iter_mut().zip(&self.d) {
            *xj /= dj;
        }
        for j in (0..n).rev() {
            let mut s = x[j];
            for p in self.lp[j]..self.lp[j + 1] {
                s -= self.lx[p] * x[self.li[p]];
            }
            x[j] = s;
        }
        for (k, &p) in self.perm.iter().enumerate() {
            b[p] = x[k];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    Sparse,
    Dense,
}

/// Below this many unknowns `Method::Auto` uses the dense solver.
pub const DENSE_LIMIT: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Converged once ‖A x − λ B x‖/‖B x‖ ≤ tol·max(|λ|, 1), or once it
    /// reaches the floating point floor of the residual.
    pub tol: f64,
    /// Maximum number of operator applications (linear solves).
    pub max_ops: usize,
    pub krylov_dim: usize,
    pub method: Method,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-8, max_ops: 10_000, krylov_dim: 30, method: Method::Auto }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    pub lambda: f64,
    /// ‖A x − λ B x‖ / ‖B x‖
    pub residual: f64,
    #[serde(skip)]
    pub vector: Vec<f64>,
    pub ops: usize,
    pub shift: f64,
    pub method: Method,
    pub size: usize,
}

fn residual(a: &CsrMatrix, b: &CsrMatrix, lambda: f64, x: &[f64]) -> f64 {
    let n = a.n;
    let (mut ax, mut bx) = (vec![0.0; n], vec![0.0; n]);
    a.mul_vec(x, &mut ax);
    b.mul_vec(x, &mut bx);
    let nb = dot(&bx, &bx).sqrt();
    axpy(-lambda, &bx, &mut ax);
    dot(&ax, &ax).sqrt() / nb
}

/// Residual attainable in floating point: ε (‖A‖ + |λ| ‖B‖) ‖x‖ / ‖B x‖.
fn roundoff_floor(a: &CsrMatrix, b: &CsrMatrix, lambda: f64, x: &[f64]) -> f64 {
    let mut bx = vec![0.0; x.len()];
    b.mul_vec(x, &mut bx);
    let scale = a.norm_inf() + lambda.abs() * b.norm_inf();
    f64::EPSILON * scale * dot(x, x).sqrt() / dot(&bx, &bx).sqrt()
}

fn check_pair(a: &CsrMatrix, b: &CsrMatrix) -> Result<()> {
    if a.n != b.n {
        return Err(Error::Parameter(format!("A is {}x{} but B is {}x{}", a.n, a.n, b.n, b.n)));
    }
    if a.n == 0 {
        return Err(Error::EmptyRange("empty eigenvalue problem".into()));
    }
    Ok(())
}

/// Smallest eigenvalue of the pencil (A, B), A symmetric positive
/// semidefinite and B symmetric positive definite.
pub fn smallest_eigenvalue(a: &CsrMatrix, b: &CsrMatrix, opts: &EigenOptions) -> Result<EigenResult> {
    check_pair(a, b)?;
    let dense = match opts.method {
        Method::Dense => true,
        Method::Sparse => false,
        Method::Auto => a.n < DENSE_LIMIT,
    };
    if dense {
        dense_smallest(a, b)
    } else {
        lanczos_smallest(a, b, opts)
    }
}

/// The `k` smallest eigenvalues by dense reduction to a standard problem.
pub fn dense_eigenvalues(a: &CsrMatrix, b: &CsrMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_pair(a, b)?;
    let chol = b
        .to_dense()
        .cholesky()
        .ok_or_else(|| Error::Factorization { pivot: 0 })?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Factorization { pivot: 0 })?;
    let c = &linv * a.to_dense() * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut idx: Vec<usize> = (0..a.n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    // back-transform eigenvectors: x = L⁻ᵀ y
    let mut vecs = DMatrix::zeros(a.n, a.n);
    for (col, &i) in idx.iter().enumerate() {
        let y = eig.eigenvectors.column(i);
        let x = linv.transpose() * y;
        vecs.set_column(col, &x);
    }
    Ok((values, vecs))
}

pub fn dense_smallest(a: &CsrMatrix, b: &CsrMatrix) -> Result<EigenResult> {
    let (values, vecs) = dense_eigenvalues(a, b)?;
    let mut x: Vec<f64> = vecs.column(0).iter().copied().collect();
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(EigenResult {
        lambda: values[0],
        residual: residual(a, b, values[0], &x),
        vector: x,
        ops: 0,
        shift: 0.0,
        method: Method::Dense,
        size: a.n,
    })
}

/// Factors `A − σB`, with σ = 0 when A is numerically definite and
/// σ = −tol·(max diag A / max diag B) otherwise.
fn shifted_factor(a: &CsrMatrix, b: &CsrMatrix, tol: f64) -> Result<(Ldlt, f64)> {
    match Ldlt::factor(a) {
        Ok(f) => Ok((f, 0.0)),
        Err(Error::Factorization { .. }) => {
            let da = a.diagonal().into_iter().fold(0.0, f64::max);
            let db = b.diagonal().into_iter().fold(0.0, f64::max);
            let sigma = -tol * (da / db);
            let f = Ldlt::factor(&a.add_scaled(-sigma, b)?)?;
            Ok((f, sigma))
        }
        Err(e) => Err(e),
    }
}

/// Shift-invert Lanczos in the B-inner product with full
/// reorthogonalization, restarted from the current Ritz vector.
pub fn lanczos_smallest(a: &CsrMatrix, b: &CsrMatrix, opts: &EigenOptions) -> Result<EigenResult> {
    check_pair(a, b)?;
    let n = a.n;
    let (fac, sigma) = shifted_factor(a, b, opts.tol)?;
    let m = opts.krylov_dim.clamp(2, n.max(2)).min(n);
    let bnorm = |x: &[f64], bx: &mut Vec<f64>| {
        b.mul_vec(x, bx);
        dot(x, bx).sqrt()
    };

    let mut start = vec![1.0; n];
    let mut ops = 0;
    let mut last_res = f64::INFINITY;
    let mut bx = vec![0.0; n];
    loop {
        let nrm = bnorm(&start, &mut bx);
        start.iter_mut().for_each(|v| *v /= nrm);
        // basis vectors q_j and B q_j
        let mut q: Vec<Vec<f64>> = vec![start.clone()];
        let mut bq: Vec<Vec<f64>> = vec![{
            let mut t = vec![0.0; n];
            b.mul_vec(&start, &mut t);
            t
        }];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            let mut w = bq[j].clone();
            fac.solve(&mut w);
            ops += 1;
            let aj = dot(&w, &bq[j]);
            alpha.push(aj);
            // two passes of classical Gram-Schmidt in the B-inner product
            for _ in 0..2 {
                for (qi, bqi) in q.iter().zip(&bq) {
                    let c = dot(&w, bqi);
                    axpy(-c, qi, &mut w);
                }
            }
            if j + 1 == m || ops >= opts.max_ops {
                break;
            }
            let mut bw = vec![0.0; n];
            let bj = bnorm(&w, &mut bw);
            if !(bj > 1e-14 * aj.abs()) {
                break;
            }
            w.iter_mut().for_each(|v| *v /= bj);
            bw.iter_mut().for_each(|v| *v /= bj);
            beta.push(bj);
            q.push(w);
            bq.push(bw);
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let top = (0..k).max_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j])).unwrap();
        let theta = eig.eigenvalues[top];
        let s = eig.eigenvectors.column(top);
        let mut x = vec![0.0; n];
        for (i, qi) in q.iter().take(k).enumerate() {
            axpy(s[i], qi, &mut x);
        }
        if x.iter().sum::<f64>() < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        let lambda = sigma + 1.0 / theta;
        let res = residual(a, b, lambda, &x);
        last_res = res.min(last_res);
        if res <= opts.tol * lambda.abs().max(1.0) || res <= roundoff_floor(a, b, lambda, &x) {
            return Ok(EigenResult { lambda, residual: res, vector: x, ops, shift: sigma, method: Method::Sparse, size: n });
        }
        if ops >= opts.max_ops {
            return Err(Error::NoConvergence { iterations: ops, residual: last_res });
        }
        start = x;
    }
}
