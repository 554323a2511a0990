//! Exact propagation of Lindblad generators.
//!
//! The generator is classified once:
//!
//! * jumps diagonal in an eigenbasis of `H` (energy dephasing, or no jumps at
//!   all): every matrix element of the state evolves independently, so the
//!   exponential is a closed-form Schur multiplier in that basis;
//! * jumps diagonal in the computational basis (local `Z` dephasing): the
//!   dissipator is a Schur multiplier and the action of `exp(t𝓛)` is computed
//!   by a truncated Taylor series with substepping;
//! * anything else goes through the same Taylor action with the full
//!   `L ρ L† - {L†L, ρ}/2` dissipator.
//!
//! No dense `d² × d²` superoperator is ever formed here.

use crate::error::{Result, ScrambleError};
use crate::linalg::dense::{self, Matrix, Op, C64, I, ONE, ZERO};
use crate::linalg::spectrum::eig_hermitian_matrix;

use super::LindbladSpec;

/// Which way the generator acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    /// States: `dρ/dt = 𝓛(ρ)`.
    Schrodinger,
    /// Observables: `dW/dt = 𝓛†(W)`.
    Heisenberg,
}

/// Forces a propagation route; `Auto` picks the cheapest exact one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Auto,
    Taylor,
}

const STRUCTURE_TOL: f64 = 1e-10;
const TAYLOR_THETA: f64 = 2.0;
const TAYLOR_TOL: f64 = 1e-17;
const TAYLOR_MAX_TERMS: usize = 80;

#[derive(Clone, Debug)]
enum Generator {
    Eigenbasis {
        basis: Matrix,
        rates: Matrix,
    },
    Masked {
        h: Matrix,
        mask: Matrix,
        shift: f64,
        norm: f64,
    },
    General {
        h: Matrix,
        jumps: Vec<Matrix>,
        decay: Matrix,
        gamma: f64,
        norm: f64,
    },
}

#[derive(Clone, Debug)]
pub struct LindbladPropagator {
    dim: usize,
    picture: Picture,
    generator: Generator,
}

fn off_diagonal_max(m: &Matrix) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// `γ Σ_k (l_a l̄_b - (|l_a|² + |l_b|²)/2)` for diagonal jump entries `l`.
fn dephasing_rates(diagonals: &[Vec<C64>], gamma: f64, d: usize) -> Matrix {
    Matrix::from_fn(d, d, |a, b| {
        diagonals
            .iter()
            .map(|l| l[a] * l[b].conj() - C64::new(0.5 * (l[a].norm_sqr() + l[b].norm_sqr()), 0.0))
            .sum::<C64>()
            * gamma
    })
}

impl LindbladPropagator {
    pub fn new(spec: &LindbladSpec, picture: Picture) -> Result<Self> {
        Self::with_strategy(spec, picture, Strategy::Auto)
    }

    pub fn with_strategy(spec: &LindbladSpec, picture: Picture, strategy: Strategy) -> Result<Self> {
        let h = dense::hermitize(spec.hamiltonian().matrix());
        let d = h.nrows();
        let gamma = spec.gamma();
        let jumps: Vec<&Matrix> = spec.jump_ops().iter().map(|j| j.matrix()).collect();
        let active = gamma > 0.0 && !jumps.is_empty();
        let spectrum = eig_hermitian_matrix(&h);
        let h_norm = spectrum.spectral_norm();

        if strategy == Strategy::Auto {
            let v = spectrum.eigenvectors();
            let rotated: Vec<Matrix> = if active {
                jumps.iter().map(|l| dense::conjugate_adj(v, l)).collect()
            } else {
                Vec::new()
            };
            let diagonal_in_eigenbasis = rotated
                .iter()
                .zip(&jumps)
                .all(|(r, l)| off_diagonal_max(r) <= STRUCTURE_TOL * dense::max_abs(l).max(1.0));
            if diagonal_in_eigenbasis {
                let diagonals: Vec<Vec<C64>> =
                    rotated.iter().map(|r| (0..d).map(|i| r[(i, i)]).collect()).collect();
                let e = spectrum.eigenvalues();
                let mut rates = dephasing_rates(&diagonals, gamma, d);
                for b in 0..d {
                    for a in 0..d {
                        rates[(a, b)] += -I * (e[a] - e[b]);
                    }
                }
                if picture == Picture::Heisenberg {
                    rates.iter_mut().for_each(|z| *z = z.conj());
                }
                return Ok(LindbladPropagator {
                    dim: d,
                    picture,
                    generator: Generator::Eigenbasis {
                        basis: v.clone(),
                        rates,
                    },
                });
            }
        }

        let diagonal_in_computational = jumps
            .iter()
            .all(|l| off_diagonal_max(l) <= STRUCTURE_TOL * dense::max_abs(l).max(1.0));
        if diagonal_in_computational || !active {
            let diagonals: Vec<Vec<C64>> = if active {
                jumps.iter().map(|l| (0..d).map(|i| l[(i, i)]).collect()).collect()
            } else {
                Vec::new()
            };
            let mut mask = dephasing_rates(&diagonals, gamma, d);
            if picture == Picture::Heisenberg {
                mask.iter_mut().for_each(|z| *z = z.conj());
            }
            let (lo, hi) = mask
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)));
            let shift = 0.5 * (lo + hi);
            mask.iter_mut().for_each(|z| z.re -= shift);
            let norm = 2.0 * h_norm + dense::max_abs(&mask);
            return Ok(LindbladPropagator {
                dim: d,
                picture,
                generator: Generator::Masked { h, mask, shift, norm },
            });
        }

        let owned: Vec<Matrix> = jumps.iter().map(|l| (*l).clone()).collect();
        let mut decay = Matrix::zeros(d, d);
        for l in &owned {
            dense::gemm(ONE, l, Op::H, l, Op::N, ONE, &mut decay);
        }
        let jump_norm: f64 = owned.iter().map(|l| dense::frobenius_norm(l).powi(2)).sum();
        let norm = 2.0 * h_norm + gamma * (jump_norm + dense::frobenius_norm(&decay));
        Ok(LindbladPropagator {
            dim: d,
            picture,
            generator: Generator::General {
                h,
                jumps: owned,
                decay,
                gamma,
                norm,
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    /// Whether the closed-form eigenbasis route is in use.
    pub fn is_closed_form(&self) -> bool {
        matches!(self.generator, Generator::Eigenbasis { .. })
    }

    /// One application of the (shifted) generator.
    fn generate(&self, x: &Matrix) -> Matrix {
        let sign = match self.picture {
            Picture::Schrodinger => -I,
            Picture::Heisenberg => I,
        };
        match &self.generator {
            Generator::Eigenbasis { .. } => unreachable!("closed form has no Taylor route"),
            Generator::Masked { h, mask, .. } => {
                let mut out = x.component_mul(mask);
                dense::gemm(sign, h, Op::N, x, Op::N, ONE, &mut out);
                dense::gemm(-sign, x, Op::N, h, Op::N, ONE, &mut out);
                out
            }
            Generator::General {
                h,
                jumps,
                decay,
                gamma,
                ..
            } => {
                let half = C64::new(-0.5 * gamma, 0.0);
                let mut out = Matrix::zeros(self.dim, self.dim);
                dense::gemm(sign, h, Op::N, x, Op::N, ZERO, &mut out);
                dense::gemm(-sign, x, Op::N, h, Op::N, ONE, &mut out);
                dense::gemm(half, decay, Op::N, x, Op::N, ONE, &mut out);
                dense::gemm(half, x, Op::N, decay, Op::N, ONE, &mut out);
                let g = C64::new(*gamma, 0.0);
                for l in jumps {
                    let (first, second) = match self.picture {
                        Picture::Schrodinger => (Op::N, Op::H),
                        Picture::Heisenberg => (Op::H, Op::N),
                    };
                    let lx = dense::matmul_op(l, first, x, Op::N);
                    dense::gemm(g, &lx, Op::N, l, second, ONE, &mut out);
                }
                out
            }
        }
    }

    fn taylor(&self, x: &Matrix, t: f64, norm: f64, shift: f64) -> Matrix {
        let steps = ((norm * t) / TAYLOR_THETA).ceil().max(1.0) as usize;
        let tau = t / steps as f64;
        let damping = (shift * tau).exp();
        let mut current = x.clone();
        for _ in 0..steps {
            let mut sum = current.clone();
            let mut term = current;
            let mut previous_small = false;
            for k in 1..=TAYLOR_MAX_TERMS {
                term = self.generate(&term);
                term *= C64::new(tau / k as f64, 0.0);
                sum += &term;
                let small = dense::frobenius_norm(&term) <= TAYLOR_TOL * dense::frobenius_norm(&sum).max(1e-300);
                if small && previous_small {
                    break;
                }
                previous_small = small;
            }
            sum *= C64::new(damping, 0.0);
            current = sum;
        }
        current
    }

    /// `exp(t 𝓛) x` (Schrödinger) or `exp(t 𝓛†) x` (Heisenberg).
    pub fn apply(&self, x: &Matrix, t: f64) -> Result<Matrix> {
        if t < 0.0 || !t.is_finite() {
            return Err(ScrambleError::NegativeTime(t));
        }
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(ScrambleError::DimensionMismatch {
                expected: self.dim,
                found: x.nrows(),
            });
        }
        if t == 0.0 {
            return Ok(x.clone());
        }
        Ok(match &self.generator {
            Generator::Eigenbasis { basis, rates } => {
                let mut rotated = dense::conjugate_adj(basis, x);
                rotated
                    .iter_mut()
                    .zip(rates.iter())
                    .for_each(|(z, r)| *z *= (r * t).exp());
                dense::conjugate(basis, &rotated)
            }
            Generator::Masked { norm, shift, .. } => self.taylor(x, t, *norm, *shift),
            Generator::General { norm, .. } => self.taylor(x, t, *norm, 0.0),
        })
    }

    /// Propagated operators at each of the non-decreasing `times`.
    pub fn series(&self, x: &Matrix, times: &[f64]) -> Result<Vec<Matrix>> {
        let mut out = Vec::with_capacity(times.len());
        let mut last_t = 0.0;
        let mut current = x.clone();
        for &t in times {
            if t < last_t {
                return Err(ScrambleError::ContractViolation(format!(
                    "time grid must be non-decreasing ({t} after {last_t})"
                )));
            }
            current = match &self.generator {
                // closed form is cheaper and exact from the origin
                Generator::Eigenbasis { .. } => self.apply(x, t)?,
                _ => self.apply(&current, t - last_t)?,
            };
            out.push(current.clone());
            last_t = t;
        }
        Ok(out)
    }
}
