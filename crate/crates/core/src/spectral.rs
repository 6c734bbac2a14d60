//! Hermitian eigendecomposition, degeneracy clusters and spectral projections.
//!
//! The eigensolver is a cyclic complex Jacobi method: every off-diagonal pair
//! `(p, q)` is annihilated by `U = diag(1, e^{−iφ})·R(θ)` where `φ = arg a_pq`
//! makes the pivot real and `R(θ)` is the classical real Jacobi rotation.
//! The sweep order is fixed, so identical inputs give bit-identical output.

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{format40, CMatrix, Complex, PrecisionContext};

pub const MAX_DIM: usize = 64;
pub const MAX_SWEEPS: u32 = 100;

/// A square matrix checked to be Hermitian within `2^{−bits+8}` of the
/// larger magnitude of each mirrored pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(matrix: CMatrix, ctx: &PrecisionContext) -> Result<Self> {
        let n = matrix.dim();
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "matrix dimension {n} outside 1..={MAX_DIM}"
            )));
        }
        let matrix = matrix.with_prec(ctx.bits());
        // pairs that are both near zero are judged against the largest entry
        let floor = Float::with_val(ctx.bits(), matrix.max_abs() * ctx.half_eps());
        if let Some((row, col, dev)) = matrix.hermitian_defect(&ctx.eps_shifted(8), &floor) {
            return Err(Error::NotHermitian {
                row,
                col,
                deviation: format40(&dev),
            });
        }
        Ok(HermitianMatrix(matrix))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending, with multiplicity.
    pub eigenvalues: Vec<Float>,
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: CMatrix,
    /// Contiguous index groups of (numerically) equal eigenvalues.
    pub clusters: Vec<Vec<usize>>,
    pub cluster_tolerance: Float,
    cluster_of: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SpectralProjection {
    pub cluster_id: usize,
    pub matrix: CMatrix,
}

/// Greedy left-to-right clustering of an ascending list: a new cluster
/// starts whenever the gap to the previous value exceeds `tolerance`.
pub fn cluster_degeneracies(eigenvalues: &[Float], tolerance: &Float) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, lam) in eigenvalues.iter().enumerate() {
        let start_new = match i {
            0 => true,
            _ => Float::with_val(lam.prec(), lam - &eigenvalues[i - 1]) > *tolerance,
        };
        if start_new {
            clusters.push(vec![i]);
        } else if let Some(last) = clusters.last_mut() {
            last.push(i);
        }
    }
    clusters
}

/// `2^{−bits/2}·(λ_max − λ_min)`.
pub fn default_cluster_tolerance(eigenvalues: &[Float], ctx: &PrecisionContext) -> Float {
    match (eigenvalues.first(), eigenvalues.last()) {
        (Some(lo), Some(hi)) => Float::with_val(ctx.bits(), hi - lo) * ctx.half_eps(),
        _ => ctx.zero(),
    }
}

/// Eigendecomposition with the default cluster tolerance.
pub fn eigendecompose(h: &HermitianMatrix, ctx: &PrecisionContext) -> Result<SpectralDecomposition> {
    let (eigenvalues, eigenvectors) = jacobi(h.matrix(), ctx)?;
    let tol = default_cluster_tolerance(&eigenvalues, ctx);
    Ok(SpectralDecomposition::assemble(eigenvalues, eigenvectors, tol))
}

fn jacobi(h: &CMatrix, ctx: &PrecisionContext) -> Result<(Vec<Float>, CMatrix)> {
    let n = h.dim();
    let prec = ctx.bits();
    let mut a = h.with_prec(prec);
    let mut v = CMatrix::identity(n, prec);
    for i in 0..n {
        a[(i, i)].im = Float::new(prec);
    }
    let scale = {
        let f = a.frobenius();
        if f.is_zero() {
            ctx.one()
        } else {
            f
        }
    };
    let done_below = Float::with_val(prec, &scale * ctx.pow2(-(prec as i32)));
    let negligible = Float::with_val(prec, &scale * ctx.pow2(-(prec as i32) - 8));

    let off_norm = |a: &CMatrix| {
        let mut s = Float::new(prec);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_norm(&a) <= done_below {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)].abs();
                if b <= negligible {
                    a[(p, q)] = Complex::zero(prec);
                    a[(q, p)] = Complex::zero(prec);
                    continue;
                }
                rotate(&mut a, &mut v, p, q, &b, prec);
            }
        }
    }
    if !converged {
        let residual = off_norm(&a);
        if residual > done_below {
            return Err(Error::EigenNotConverged {
                sweeps: MAX_SWEEPS,
                residual: format40(&residual),
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re.clone()).collect();
    let vectors = CMatrix::from_fn(n, |r, c| v[(r, order[c])].clone());
    Ok((eigenvalues, vectors))
}

/// Zero `a[p][q]` with `A ← U* A U`, `V ← V U`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, b: &Float, prec: u32) {
    let n = a.dim();
    let phase = a[(p, q)].div_real(b); // e^{iφ}
    let phase_conj = phase.conj();
    let two_b = Float::with_val(prec, b * 2u32);
    let tau = Float::with_val(prec, &a[(q, q)].re - &a[(p, p)].re) / &two_b;
    let root = (Float::with_val(prec, tau.square_ref()) + 1u32).sqrt();
    let t = {
        let mag = Float::with_val(prec, tau.abs_ref()) + &root;
        let t = Float::with_val(prec, 1u32) / mag;
        if tau.is_sign_negative() {
            -t
        } else {
            t
        }
    };
    let c = (Float::with_val(prec, t.square_ref()) + 1u32).recip_sqrt();
    let s = Float::with_val(prec, &t * &c);

    // column update: U_pp = c, U_pq = s, U_qp = −s e^{−iφ}, U_qq = c e^{−iφ}
    let s_pc = phase_conj.scale(&s);
    let c_pc = phase_conj.scale(&c);
    let col_update = |m: &mut CMatrix| {
        for k in 0..n {
            let mp = m[(k, p)].clone();
            let mq = m[(k, q)].clone();
            m[(k, p)] = mp.scale(&c).sub_ref(&s_pc.mul_ref(&mq));
            m[(k, q)] = mp.scale(&s).add_ref(&c_pc.mul_ref(&mq));
        }
    };
    col_update(a);
    col_update(v);

    // row update with U*
    let s_p = phase.scale(&s);
    let c_p = phase.scale(&c);
    for k in 0..n {
        let ap = a[(p, k)].clone();
        let aq = a[(q, k)].clone();
        a[(p, k)] = ap.scale(&c).sub_ref(&s_p.mul_ref(&aq));
        a[(q, k)] = ap.scale(&s).add_ref(&c_p.mul_ref(&aq));
    }
    a[(p, q)] = Complex::zero(prec);
    a[(q, p)] = Complex::zero(prec);
    a[(p, p)].im = Float::new(prec);
    a[(q, q)].im = Float::new(prec);
}

impl SpectralDecomposition {
    fn assemble(eigenvalues: Vec<Float>, eigenvectors: CMatrix, tolerance: Float) -> Self {
        let clusters = cluster_degeneracies(&eigenvalues, &tolerance);
        let mut cluster_of = vec![0; eigenvalues.len()];
        for (id, members) in clusters.iter().enumerate() {
            for &i in members {
                cluster_of[i] = id;
            }
        }
        SpectralDecomposition {
            eigenvalues,
            eigenvectors,
            clusters,
            cluster_tolerance: tolerance,
            cluster_of,
        }
    }

    /// Re-cluster with an explicit tolerance.
    pub fn with_cluster_tolerance(self, tolerance: Float) -> Self {
        SpectralDecomposition::assemble(self.eigenvalues, self.eigenvectors, tolerance)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn prec(&self) -> u32 {
        self.eigenvectors.prec()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, index: usize) -> usize {
        self.cluster_of[index]
    }

    /// Mean eigenvalue of a cluster; the energy `λ` attached to `Π_λ`.
    pub fn cluster_energy(&self, id: usize) -> Float {
        let members = &self.clusters[id];
        let mut s = Float::new(self.prec());
        for &i in members {
            s += &self.eigenvalues[i];
        }
        s / members.len() as u64
    }

    /// Energy of each eigen-index, snapped to its cluster mean so that
    /// phases inside a degenerate block cancel exactly.
    pub fn level_energies(&self) -> Vec<Float> {
        let means: Vec<Float> = (0..self.cluster_count())
            .map(|id| self.cluster_energy(id))
            .collect();
        (0..self.dim()).map(|i| means[self.cluster_of[i]].clone()).collect()
    }

    /// `V* M V`.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> Result<CMatrix> {
        self.eigenvectors.adjoint().matmul(&m.matmul(&self.eigenvectors)?)
    }

    /// `V M V*`.
    pub fn from_eigenbasis(&self, m: &CMatrix) -> Result<CMatrix> {
        self.eigenvectors.matmul(&m.matmul(&self.eigenvectors.adjoint())?)
    }

    /// `V diag(λ) V*`.
    pub fn reconstruct(&self) -> CMatrix {
        self.from_eigenbasis(&CMatrix::diagonal(&self.eigenvalues))
            .expect("square by construction")
    }

    /// `Π = Σ_{i ∈ cluster} v_i v_i*`.
    pub fn projection(&self, cluster_id: usize) -> Result<SpectralProjection> {
        let members = self.clusters.get(cluster_id).ok_or(Error::InvalidCluster {
            id: cluster_id,
            count: self.clusters.len(),
        })?;
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut m = CMatrix::zeros(n, self.prec());
        for &k in members {
            for i in 0..n {
                for j in 0..n {
                    let term = v[(i, k)].mul_ref(&v[(j, k)].conj());
                    m[(i, j)] += &term;
                }
            }
        }
        Ok(SpectralProjection {
            cluster_id,
            matrix: m,
        })
    }

    pub fn projections(&self) -> Vec<SpectralProjection> {
        (0..self.cluster_count())
            .map(|id| self.projection(id).expect("valid cluster id"))
            .collect()
    }
}

/// Free-function alias of [`SpectralDecomposition::projection`].
pub fn projection(decomp: &SpectralDecomposition, cluster_id: usize) -> Result<SpectralProjection> {
    decomp.projection(cluster_id)
}
