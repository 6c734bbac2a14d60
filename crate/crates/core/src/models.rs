//! Three independent spins in fields `ω = (1, √2, √3)`, started in `|+⟩^{⊗3}`
//! and observed through the mean transverse magnetization.
//!
//! Basis states are ordered lexicographically with `↑` before `↓`, site 1
//! being the most significant factor; index bit `1` means `↓`.

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{cos_reduced, CMatrix, Complex, PrecisionContext};
use crate::quantum::{diagonal_state, expectation, pure_density, DensityOperator, Observable, PureState};
use crate::spectral::{eigendecompose, HermitianMatrix};

pub const SITES: usize = 3;
pub const DIM: usize = 1 << SITES;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `I ⊗ … ⊗ σ^{axis} ⊗ … ⊗ I` with the Pauli matrix on `site` (1-based).
pub fn pauli_tensor(axis: Axis, site: usize, ctx: &PrecisionContext) -> Result<Observable> {
    Observable::new(pauli_matrix(axis, site, ctx.bits())?, ctx)
}

fn pauli_matrix(axis: Axis, site: usize, prec: u32) -> Result<CMatrix> {
    if !(1..=SITES).contains(&site) {
        return Err(Error::InvalidArgument(format!(
            "site {site} outside 1..={SITES}"
        )));
    }
    let shift = SITES - site;
    let one = |v: i32| Complex::from_real(Float::with_val(prec, v));
    let i_unit = |v: i32| Complex::new(Float::new(prec), Float::with_val(prec, v));
    Ok(CMatrix::from_fn(DIM, |r, c| {
        // every other factor is the identity
        if (r ^ c) & !(1 << shift) != 0 {
            return Complex::zero(prec);
        }
        let (br, bc) = ((r >> shift) & 1, (c >> shift) & 1);
        match axis {
            Axis::Z if br == bc => one(if br == 0 { 1 } else { -1 }),
            Axis::X if br != bc => one(1),
            // σ^y = [[0, −i], [i, 0]]
            Axis::Y if br != bc => i_unit(if br == 0 { -1 } else { 1 }),
            _ => Complex::zero(prec),
        }
    }))
}

#[derive(Debug, Clone)]
pub struct SpinModel {
    pub hamiltonian: HermitianMatrix,
    pub initial_state: PureState,
    pub observable: Observable,
    pub frequencies: [Float; SITES],
}

/// `H = Σ ω_j σ_j^z`, `ψ_0 = |+⟩^{⊗3}`, `A = (1/3) Σ σ_j^x`.
pub fn build_three_spin(ctx: &PrecisionContext) -> SpinModel {
    build_spin_model([ctx.one(), ctx.sqrt2(), ctx.sqrt3()], ctx)
        .expect("the default model is well formed")
}

/// Same structure with arbitrary field strengths.
pub fn build_spin_model(frequencies: [Float; SITES], ctx: &PrecisionContext) -> Result<SpinModel> {
    let prec = ctx.bits();
    let energies: Vec<Float> = (0..DIM)
        .map(|idx| {
            let mut e = Float::new(prec);
            for (j, w) in frequencies.iter().enumerate() {
                if (idx >> (SITES - 1 - j)) & 1 == 0 {
                    e += w;
                } else {
                    e -= w;
                }
            }
            e
        })
        .collect();
    let hamiltonian = HermitianMatrix::new(CMatrix::diagonal(&energies), ctx)?;
    let amp = Complex::from_real(ctx.one() / Float::with_val(prec, 8u32).sqrt());
    let initial_state = PureState::new(vec![amp; DIM], ctx)?;
    let mut a = CMatrix::zeros(DIM, prec);
    for site in 1..=SITES {
        a = a.add(&pauli_matrix(Axis::X, site, prec)?)?;
    }
    let observable = Observable::new(a.scale(&(ctx.one() / 3u32)), ctx)?;
    Ok(SpinModel {
        hamiltonian,
        initial_state,
        observable,
        frequencies,
    })
}

impl SpinModel {
    pub fn initial_density(&self) -> DensityOperator {
        pure_density(&self.initial_state)
    }
}

/// `y_n = (1/3)[cos 2n + cos 2√2 n + cos 2√3 n]`.
pub fn explicit_signal(n: u64, ctx: &PrecisionContext) -> Float {
    let prec = ctx.guard_bits() + (64 - n.leading_zeros());
    let one = Float::with_val(prec, 1u32);
    let mut acc = ctx.zero();
    for w in [&one, ctx.sqrt2_guarded(), ctx.sqrt3_guarded()] {
        let theta = Float::with_val(prec, w * (2 * n));
        acc += cos_reduced(&theta, ctx);
    }
    acc / 3u32
}

/// `(ρ_diag, Tr(ρ_diag A))` through the general spectral route.
pub fn model_equilibrium(model: &SpinModel, ctx: &PrecisionContext) -> Result<(DensityOperator, Float)> {
    let decomp = eigendecompose(&model.hamiltonian, ctx)?;
    let rho_diag = diagonal_state(&decomp, &model.initial_density())?;
    let a_eq = expectation(&rho_diag, &model.observable, ctx)?;
    Ok((rho_diag, a_eq))
}
