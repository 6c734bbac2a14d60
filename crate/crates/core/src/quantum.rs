//! States, observables and their evolution under a decomposed Hamiltonian.
//!
//! Everything is computed in the eigenbasis of `H`: an entry `(m, n)` of a
//! state there picks up `e^{−it(E_m − E_n)}` under evolution, is kept or
//! dropped by dephasing depending on whether `m` and `n` share a cluster, and
//! is multiplied by `F_T(E_m − E_n)` by continuous weighted averaging.

use rug::Float;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::numerics::{
    cis_reduced, format40, CMatrix, Complex, PrecisionContext, QuadratureOptions,
};
use crate::spectral::{eigendecompose, HermitianMatrix, SpectralDecomposition};
use crate::weights::{continuous_weighted_average_with, kernel_ft, NormalizedWeight};

/// Positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, `|Tr ρ − 1| ≤ 2^{−bits/2}` and
    /// `λ_min ≥ −2^{−bits/2}`.
    pub fn new(matrix: CMatrix, ctx: &PrecisionContext) -> Result<Self> {
        let h = HermitianMatrix::new(matrix, ctx)?;
        let tol = ctx.half_eps();
        let trace = h.matrix().trace();
        let dev = Float::with_val(ctx.bits(), &trace.re - 1u32).abs();
        if dev > tol || trace.im.clone().abs() > tol {
            return Err(Error::TraceNotOne {
                trace: trace.to_string(),
            });
        }
        let dec = eigendecompose(&h, ctx)?;
        let min = &dec.eigenvalues[0];
        if *min < Float::with_val(ctx.bits(), -&tol) {
            return Err(Error::NotPositive {
                min_eigenvalue: format40(min),
            });
        }
        Ok(DensityOperator {
            matrix: h.into_inner(),
        })
    }

    /// Skip validation for matrices produced by trace-preserving maps.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        DensityOperator { matrix }
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize, ctx: &PrecisionContext) -> Self {
        let k = ctx.one() / dim as u64;
        DensityOperator::from_trusted(CMatrix::identity(dim, ctx.bits()).scale(&k))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> Complex {
        self.matrix.trace()
    }

    pub fn distance(&self, other: &DensityOperator) -> Result<StateDistance> {
        let diff = self.matrix.sub(&other.matrix)?;
        Ok(StateDistance {
            max_entry: diff.max_abs(),
            frobenius: diff.frobenius(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct StateDistance {
    pub max_entry: Float,
    pub frobenius: Float,
}

/// Unit vector `ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vector: Vec<Complex>,
}

impl PureState {
    /// Rejects vectors whose norm deviates from 1 by more than `10·2^{−bits/2}`.
    pub fn new(vector: Vec<Complex>, ctx: &PrecisionContext) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::InvalidArgument("empty state vector".into()));
        }
        let mut norm = ctx.zero();
        for z in &vector {
            norm += z.norm_sqr();
        }
        let norm = norm.sqrt();
        let slack = Float::with_val(ctx.bits(), ctx.half_eps() * 10u32);
        if Float::with_val(ctx.bits(), &norm - 1u32).abs() > slack {
            return Err(Error::NotNormalized {
                norm: format40(&norm),
            });
        }
        Ok(PureState {
            vector: vector.into_iter().map(|z| z.with_prec(ctx.bits())).collect(),
        })
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// Hermitian observable `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable(HermitianMatrix);

impl Observable {
    pub fn new(matrix: CMatrix, ctx: &PrecisionContext) -> Result<Self> {
        Ok(Observable(HermitianMatrix::new(matrix, ctx)?))
    }

    pub fn from_hermitian(h: HermitianMatrix) -> Self {
        Observable(h)
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `|ψ⟩⟨ψ|`.
pub fn pure_density(psi: &PureState) -> DensityOperator {
    let v = psi.amplitudes();
    DensityOperator::from_trusted(CMatrix::from_fn(v.len(), |i, j| v[i].mul_ref(&v[j].conj())))
}

/// `e^{−iθ}` for `θ = t·ω`.
fn phase(t: &Float, omega: &Float, ctx: &PrecisionContext) -> Complex {
    let theta = -Float::with_val(ctx.bits(), t * omega);
    cis_reduced(&theta, ctx)
}

fn frequency(energies: &[Float], m: usize, n: usize) -> Float {
    Float::with_val(energies[m].prec(), &energies[m] - &energies[n])
}

/// `ρ_t = U ρ_0 U*` with `U = Σ_λ e^{−iλt} Π_λ`.
pub fn evolve(
    decomp: &SpectralDecomposition,
    rho0: &DensityOperator,
    t: &Float,
    ctx: &PrecisionContext,
) -> Result<DensityOperator> {
    check_dims(decomp.dim(), rho0.dim())?;
    if t.is_zero() {
        return Ok(rho0.clone());
    }
    let e = decomp.level_energies();
    let mut rt = decomp.to_eigenbasis(rho0.matrix())?;
    let n = rt.dim();
    for i in 0..n {
        for j in 0..n {
            if decomp.cluster_of(i) != decomp.cluster_of(j) {
                let ph = phase(t, &frequency(&e, i, j), ctx);
                rt[(i, j)] = rt[(i, j)].mul_ref(&ph);
            }
        }
    }
    Ok(DensityOperator::from_trusted(decomp.from_eigenbasis(&rt)?))
}

/// `Tr(ρA)`, rejecting imaginary parts above `2^{−bits/2}·max(1, ‖A‖_max)`.
pub fn expectation(rho: &DensityOperator, a: &Observable, ctx: &PrecisionContext) -> Result<Float> {
    check_dims(rho.dim(), a.dim())?;
    let n = rho.dim();
    let mut acc = Complex::zero(ctx.bits());
    for i in 0..n {
        for j in 0..n {
            acc.add_mul(&rho.matrix()[(i, j)], &a.matrix()[(j, i)]);
        }
    }
    let mut scale = a.matrix().max_abs();
    if scale < 1u32 {
        scale = ctx.one();
    }
    if acc.im.clone().abs() > Float::with_val(ctx.bits(), ctx.half_eps() * &scale) {
        return Err(Error::ImaginaryExpectation {
            imag: format40(&acc.im),
        });
    }
    Ok(acc.re)
}

/// `ρ_diag = Σ_λ Π_λ ρ_0 Π_λ`: the eigenbasis blocks of `ρ_0` belonging to
/// each cluster, with every inter-cluster entry removed.
pub fn diagonal_state(
    decomp: &SpectralDecomposition,
    rho0: &DensityOperator,
) -> Result<DensityOperator> {
    check_dims(decomp.dim(), rho0.dim())?;
    let mut rt = decomp.to_eigenbasis(rho0.matrix())?;
    let n = rt.dim();
    let prec = rt.prec();
    for i in 0..n {
        for j in 0..n {
            if decomp.cluster_of(i) != decomp.cluster_of(j) {
                rt[(i, j)] = Complex::zero(prec);
            }
        }
    }
    Ok(DensityOperator::from_trusted(decomp.from_eigenbasis(&rt)?))
}

/// `ρ̄_T = ∫_0^1 w(s) ρ_{Ts} ds`, computed entrywise in the eigenbasis as
/// `ρ̃_mn · F_T(E_m − E_n)`.
pub fn weighted_averaged_state(
    decomp: &SpectralDecomposition,
    rho0: &DensityOperator,
    w: &NormalizedWeight,
    t: &Float,
) -> Result<DensityOperator> {
    weighted_averaged_state_with(decomp, rho0, w, t, Execution::default())
}

pub fn weighted_averaged_state_with(
    decomp: &SpectralDecomposition,
    rho0: &DensityOperator,
    w: &NormalizedWeight,
    t: &Float,
    exec: Execution,
) -> Result<DensityOperator> {
    check_dims(decomp.dim(), rho0.dim())?;
    if *t <= 0u32 {
        return Err(Error::InvalidArgument("averaging time must be positive".into()));
    }
    let e = decomp.level_energies();
    let mut rt = decomp.to_eigenbasis(rho0.matrix())?;
    let n = rt.dim();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| decomp.cluster_of(i) != decomp.cluster_of(j))
        .filter(|&(i, j)| !rt[(i, j)].is_zero() || !rt[(j, i)].is_zero())
        .collect();
    let kernels = exec::map(exec, &pairs, |&(i, j)| kernel_ft(w, &frequency(&e, i, j), t));
    for (&(i, j), f) in pairs.iter().zip(kernels) {
        let f = f?;
        // w is real, so F_T(−ω) = conj F_T(ω)
        rt[(i, j)] = rt[(i, j)].mul_ref(&f);
        rt[(j, i)] = rt[(j, i)].mul_ref(&f.conj());
    }
    Ok(DensityOperator::from_trusted(decomp.from_eigenbasis(&rt)?))
}

/// `⟨A⟩_t = Σ_{m,n} ρ̃_mn Ã_nm e^{−it(E_m − E_n)}` folded into a constant
/// plus one complex coefficient per inter-cluster pair `m < n`.
#[derive(Debug, Clone)]
pub struct ExpectationExpansion {
    /// Contribution of intra-cluster entries; equals `Tr(ρ_diag A)`.
    pub constant: Float,
    /// `(2 ρ̃_mn Ã_nm, E_m − E_n)`; the signal adds `Re(coeff · e^{−iωt})`.
    pub terms: Vec<(Complex, Float)>,
    ctx: PrecisionContext,
}

impl ExpectationExpansion {
    pub fn new(
        decomp: &SpectralDecomposition,
        rho0: &DensityOperator,
        a: &Observable,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        check_dims(decomp.dim(), rho0.dim())?;
        check_dims(decomp.dim(), a.dim())?;
        let rt = decomp.to_eigenbasis(rho0.matrix())?;
        let at = decomp.to_eigenbasis(a.matrix())?;
        let e = decomp.level_energies();
        let n = decomp.dim();
        let mut constant = Complex::zero(ctx.bits());
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let same = decomp.cluster_of(i) == decomp.cluster_of(j);
                if same {
                    constant.add_mul(&rt[(i, j)], &at[(j, i)]);
                } else if i < j {
                    let c = rt[(i, j)].mul_ref(&at[(j, i)]);
                    if !c.is_zero() {
                        terms.push((c.scale(&ctx.real(2)), frequency(&e, i, j)));
                    }
                }
            }
        }
        Ok(ExpectationExpansion {
            constant: constant.re,
            terms,
            ctx: ctx.clone(),
        })
    }

    pub fn eval(&self, t: &Float) -> Float {
        let mut acc = self.constant.clone();
        for (c, omega) in &self.terms {
            let ph = phase(t, omega, &self.ctx);
            let z = c.mul_ref(&ph);
            acc += z.re;
        }
        acc
    }

    /// Largest `|E_m − E_n|` with a nonzero coefficient.
    pub fn max_frequency(&self) -> Float {
        let mut m = self.ctx.zero();
        for (_, omega) in &self.terms {
            let a = Float::with_val(self.ctx.bits(), omega.abs_ref());
            if a > m {
                m = a;
            }
        }
        m
    }
}

/// Which algebraic route [`expectation_series_with`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesPath {
    /// `Tr(ρ_t A)` with `ρ_t` from [`evolve`].
    Evolution,
    /// The eigenbasis expansion of `⟨A⟩_t`.
    Expansion,
}

/// `⟨A⟩_t` for each time, via the eigenbasis expansion.
pub fn expectation_series(
    decomp: &SpectralDecomposition,
    rho0: &DensityOperator,
    a: &Observable,
    times: &[Float],
    ctx: &PrecisionContext,
) -> Result<Vec<Float>> {
    expectation_series_with(decomp, rho0, a, times, ctx, SeriesPath::Expansion, Execution::default())
}

pub fn expectation_series_with(
    decomp: &SpectralDecomposition,
    rho0: &DensityOperator,
    a: &Observable,
    times: &[Float],
    ctx: &PrecisionContext,
    path: SeriesPath,
    exec: Execution,
) -> Result<Vec<Float>> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("no evaluation times given".into()));
    }
    match path {
        SeriesPath::Expansion => {
            let exp = ExpectationExpansion::new(decomp, rho0, a, ctx)?;
            Ok(exec::map(exec, times, |t| exp.eval(t)))
        }
        SeriesPath::Evolution => {
            check_dims(decomp.dim(), a.dim())?;
            exec::map(exec, times, |t| {
                let rho_t = evolve(decomp, rho0, t, ctx)?;
                expectation(&rho_t, a, ctx)
            })
            .into_iter()
            .collect()
        }
    }
}

/// `𝒲_T[⟨A⟩] = ∫_0^1 w(s) ⟨A⟩_{Ts} ds` by quadrature of the expectation
/// signal, with the initial node count sized to its fastest oscillation.
pub fn weighted_time_average(
    expansion: &ExpectationExpansion,
    w: &NormalizedWeight,
    t: &Float,
) -> Result<Float> {
    let ctx = w.ctx();
    let xi = Float::with_val(ctx.bits(), t * expansion.max_frequency());
    let turns = (xi / ctx.two_pi_guarded()).ceil().to_f64() as usize;
    let opts = QuadratureOptions::default().with_initial_nodes(256 + 2 * turns);
    let v = continuous_weighted_average_with(
        w,
        |ts| Complex::from_real(expansion.eval(ts)),
        t,
        opts,
    )?;
    Ok(v.re)
}

/// A seeded random finite system: `H = V diag(d) V*` with a prescribed
/// spectrum containing one 2-fold degeneracy, a full-rank `ρ_0 = GG*/Tr GG*`
/// and a random Hermitian `A`.
#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub hamiltonian: HermitianMatrix,
    pub rho0: DensityOperator,
    pub observable: Observable,
    /// The prescribed spectrum, ascending.
    pub spectrum: Vec<Float>,
    pub unitary: CMatrix,
}

/// Smallest spacing between distinct prescribed eigenvalues.
pub const RANDOM_MIN_SPACING: f64 = 0.2;

impl RandomSystem {
    /// Eigenvalues lie in `[−2, 2]` and the distinct ones are at least
    /// [`RANDOM_MIN_SPACING`] apart.
    pub fn generate(seed: u64, dim: usize, ctx: &PrecisionContext) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        use rand_distr::StandardNormal;

        if dim < 3 {
            return Err(Error::InvalidArgument("random systems need dim ≥ 3".into()));
        }
        let prec = ctx.bits();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let distinct = loop {
            let mut v: Vec<f64> = (0..dim - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
            v.sort_by(f64::total_cmp);
            if v.windows(2).all(|p| p[1] - p[0] >= RANDOM_MIN_SPACING) {
                break v;
            }
        };
        let doubled = rng.gen_range(0..distinct.len());
        let mut spectrum: Vec<Float> = distinct.iter().map(|&x| Float::with_val(prec, x)).collect();
        spectrum.insert(doubled, spectrum[doubled].clone());

        let mut gauss = |n: usize| -> Vec<Complex> {
            (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex::new(Float::with_val(prec, re), Float::with_val(prec, im))
                })
                .collect()
        };
        let unitary = random_unitary(dim, &mut gauss, ctx);
        let g = CMatrix::from_rows((0..dim).map(|_| gauss(dim)).collect())?;
        let a = CMatrix::from_rows((0..dim).map(|_| gauss(dim)).collect())?;

        let d = CMatrix::diagonal(&spectrum);
        let h = unitary.matmul(&d)?.matmul(&unitary.adjoint())?;
        let h = symmetrize(&h);
        let gg = g.matmul(&g.adjoint())?;
        let tr = gg.trace().re;
        let rho = symmetrize(&gg.scale(&(ctx.one() / tr)));
        let a = symmetrize(&a.add(&a.adjoint())?.scale(&(ctx.one() / 2u32)));
        Ok(RandomSystem {
            hamiltonian: HermitianMatrix::new(h, ctx)?,
            rho0: DensityOperator::new(rho, ctx)?,
            observable: Observable::new(a, ctx)?,
            spectrum,
            unitary,
        })
    }
}

/// Averages `M` with `M*` so rounding leaves an exactly Hermitian matrix.
fn symmetrize(m: &CMatrix) -> CMatrix {
    let adj = m.adjoint();
    let half = Float::with_val(m.prec(), 0.5);
    m.add(&adj).expect("same dimension").scale(&half)
}

/// Gram-Schmidt on Gaussian columns; the result is unitary to working precision.
fn random_unitary(
    dim: usize,
    gauss: &mut impl FnMut(usize) -> Vec<Complex>,
    ctx: &PrecisionContext,
) -> CMatrix {
    let mut cols: Vec<Vec<Complex>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = gauss(dim);
        // two passes keep the columns orthogonal to working precision
        for _ in 0..2 {
            for u in &cols {
                let mut dot = Complex::zero(ctx.bits());
                for (ui, vi) in u.iter().zip(&v) {
                    dot.add_mul(&ui.conj(), vi);
                }
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= &dot.mul_ref(ui);
                }
            }
        }
        let mut norm = ctx.zero();
        for z in &v {
            norm += z.norm_sqr();
        }
        let norm = norm.sqrt();
        if norm < 1e-3 {
            continue;
        }
        cols.push(v.iter().map(|z| z.div_real(&norm)).collect());
    }
    CMatrix::from_fn(dim, |i, j| cols[j][i].clone())
}
