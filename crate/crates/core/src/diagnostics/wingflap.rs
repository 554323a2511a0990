//! Two-point measurement ("wing-flap") statistics of an observable `O` around
//! a Heisenberg-evolved perturbation `W(τ)`.
//!
//! Protocol: measure `O` projectively, apply `W(τ) = e^{iHτ} W e^{-iHτ}`,
//! measure `O` again. The distribution of the change `ΔO` has characteristic
//! function `G(u) = Σ p(ΔO) e^{-iuΔO}`, which equals the OTOC
//! `tr[ρ_D W(τ)† V† W(τ) V]` with `V = e^{iuO}` and `ρ_D` the state after the
//! first measurement.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::dense::{self, Matrix, Op, C64, I};
use crate::linalg::operator::{Operator, HERMITIAN_TOL};
use crate::linalg::spectrum::eig_hermitian;
use crate::linalg::state::DensityMatrix;

/// Eigenvalues of `O` closer than this share a measurement outcome.
pub const OUTCOME_TOL: f64 = 1e-9;

/// Merged outcomes with less probability than this are rounding noise and dropped.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WingflapOutcome {
    pub delta: f64,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WingflapDistribution {
    /// Outcomes sorted by `delta`, equal changes merged, impossible ones dropped.
    pub outcomes: Vec<WingflapOutcome>,
    /// `max |W†W - I|`; non-zero values flag a non-unitary perturbation.
    pub unitarity_residual: f64,
}

impl WingflapDistribution {
    pub fn total_probability(&self) -> f64 {
        dense::pairwise_sum(&self.outcomes.iter().map(|o| o.probability).collect::<Vec<_>>())
    }

    /// `G(u) = Σ p e^{-iuΔO}`.
    pub fn characteristic_function(&self, u: f64) -> C64 {
        self.outcomes
            .iter()
            .map(|o| C64::from_polar(o.probability, -u * o.delta))
            .sum()
    }
}

/// Distribution of `ΔO = o_b - o_a` with
/// `p(a, b) = tr[P_b W(τ) P_a ρ P_a W(τ)†]` over the eigenprojectors `P` of `O`.
pub fn wingflap_distribution(
    rho: &DensityMatrix,
    o: &Operator,
    w: &Operator,
    h: &Operator,
    tau: f64,
) -> Result<WingflapDistribution> {
    let op = rho.operator();
    op.check_same_dim(o)?;
    op.check_same_dim(w)?;
    op.check_same_dim(h)?;
    o.require_hermitian(HERMITIAN_TOL)?;
    let unitarity_residual = w.unitarity_residual();

    let spectrum_o = eig_hermitian(o)?;
    let v = spectrum_o.eigenvectors();
    let levels: Vec<(f64, Matrix)> = spectrum_o
        .degenerate_groups(OUTCOME_TOL)
        .into_iter()
        .map(|group| {
            let value = group.iter().map(|&j| spectrum_o.eigenvalues()[j]).sum::<f64>() / group.len() as f64;
            let mut p = Matrix::zeros(o.dim(), o.dim());
            for &j in &group {
                let col = v.column(j);
                p += &col * col.adjoint();
            }
            (value, p)
        })
        .collect();

    let wt = eig_hermitian(h)?.propagator(tau).conjugate_adj(w);
    let mut raw: Vec<WingflapOutcome> = Vec::with_capacity(levels.len() * levels.len());
    for (o_a, p_a) in &levels {
        let post = dense::conjugate(p_a, rho.matrix());
        let evolved = dense::conjugate(wt.matrix(), &post);
        for (o_b, p_b) in &levels {
            let prob = dense::trace_of_product(p_b, &evolved).re;
            raw.push(WingflapOutcome {
                delta: o_b - o_a,
                probability: prob,
            });
        }
    }
    raw.sort_by(|x, y| x.delta.total_cmp(&y.delta));
    let mut outcomes: Vec<WingflapOutcome> = Vec::new();
    for item in raw {
        match outcomes.last_mut() {
            Some(last) if (item.delta - last.delta).abs() <= OUTCOME_TOL => last.probability += item.probability,
            _ => outcomes.push(item),
        }
    }
    outcomes.retain(|o| o.probability.abs() > NEGLIGIBLE_PROBABILITY);
    Ok(WingflapDistribution {
        outcomes,
        unitarity_residual,
    })
}

/// `e^{iuO}` for Hermitian `O`.
pub fn phase_operator(o: &Operator, u: f64) -> Result<Operator> {
    let spectrum = eig_hermitian(o)?;
    Ok(Operator::new(spectrum.map(|lambda| (I * u * lambda).exp()))?)
}

/// `Σ_a P_a ρ P_a`: the state after a non-selective measurement of `O`.
pub fn dephase_in_eigenbasis(rho: &DensityMatrix, o: &Operator) -> Result<DensityMatrix> {
    rho.operator().check_same_dim(o)?;
    let spectrum = eig_hermitian(o)?;
    let v = spectrum.eigenvectors();
    let mut out = Matrix::zeros(o.dim(), o.dim());
    for group in spectrum.degenerate_groups(OUTCOME_TOL) {
        let mut p = Matrix::zeros(o.dim(), o.dim());
        for &j in &group {
            let col = v.column(j);
            p += &col * col.adjoint();
        }
        let pr = dense::matmul(&p, rho.matrix());
        dense::gemm(C64::new(1.0, 0.0), &pr, Op::N, &p, Op::N, C64::new(1.0, 0.0), &mut out);
    }
    Ok(DensityMatrix::from_hermitized(Operator::new(out)?))
}
