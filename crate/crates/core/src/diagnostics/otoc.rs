//! Four-point out-of-time-ordered correlator and the squared commutator.

use crate::error::Result;
use crate::linalg::dense::{self, Op, C64};
use crate::linalg::operator::Operator;
use crate::linalg::spectrum::{eig_hermitian, Spectrum};
use crate::linalg::state::DensityMatrix;

/// OTOC value at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OtocSample {
    pub time: f64,
    pub value: C64,
}

fn check_dims(rho: &DensityMatrix, w: &Operator, v: &Operator, h: &Operator) -> Result<()> {
    let op = rho.operator();
    op.check_same_dim(w)?;
    op.check_same_dim(v)?;
    op.check_same_dim(h)
}

/// `W(t) = e^{iHt} W e^{-iHt}`.
pub(crate) fn heisenberg(spectrum: &Spectrum, w: &Operator, t: f64) -> Operator {
    spectrum.propagator(t).conjugate_adj(w)
}

fn otoc_at(rho: &DensityMatrix, wt: &Operator, v: &Operator) -> C64 {
    // tr[ρ W(t)† V† W(t) V]
    let a = dense::matmul_op(wt.matrix(), Op::H, v.matrix(), Op::H);
    let b = dense::matmul(wt.matrix(), v.matrix());
    let ab = dense::matmul(&a, &b);
    dense::trace_of_product(rho.matrix(), &ab)
}

/// `F(t) = tr[ρ W(t)† V† W(t) V]`.
pub fn otoc(rho: &DensityMatrix, w: &Operator, v: &Operator, h: &Operator, t: f64) -> Result<C64> {
    check_dims(rho, w, v, h)?;
    let spectrum = eig_hermitian(h)?;
    Ok(otoc_at(rho, &heisenberg(&spectrum, w, t), v))
}

/// `F(t)` on a time grid, sharing one diagonalisation.
pub fn otoc_series(rho: &DensityMatrix, w: &Operator, v: &Operator, h: &Operator, times: &[f64]) -> Result<Vec<OtocSample>> {
    check_dims(rho, w, v, h)?;
    let spectrum = eig_hermitian(h)?;
    Ok(times
        .iter()
        .map(|&time| OtocSample {
            time,
            value: otoc_at(rho, &heisenberg(&spectrum, w, time), v),
        })
        .collect())
}

/// `⟨[W†(t), V]† [W†(t), V]⟩`, evaluated directly from the commutator.
pub fn squared_commutator(rho: &DensityMatrix, w: &Operator, v: &Operator, h: &Operator, t: f64) -> Result<f64> {
    check_dims(rho, w, v, h)?;
    let spectrum = eig_hermitian(h)?;
    let wt_dag = heisenberg(&spectrum, w, t).adjoint();
    let k = dense::commutator(wt_dag.matrix(), v.matrix());
    let kk = dense::matmul_op(&k, Op::H, &k, Op::N);
    Ok(dense::trace_of_product(rho.matrix(), &kk).re)
}
