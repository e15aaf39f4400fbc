//! Continuous algebraic Riccati equation
//! `A^T P + P A - P B R^-1 B^T P + Q = 0`.
//!
//! The stabilizing solution is found by Newton-Kleinman iteration. The first
//! stabilizing gain comes from the matrix sign function of the Hamiltonian,
//! which needs only inverses and works for any stabilizable, detectable
//! problem without a pole-placement step.

use nalgebra::DMatrix;

use crate::error::SynthesisError;
use crate::linalg;
use crate::num::Real;

#[derive(Debug, Clone, Copy)]
pub struct CareOptions<T: Real> {
    /// Accept when `||residual||_F < tolerance * (1 + ||P||_F)`.
    pub tolerance: T,
    pub max_iterations: usize,
}

impl<T: Real> Default for CareOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-8),
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CareSolution<T: Real> {
    pub p: DMatrix<T>,
    /// Optimal gain `R^-1 B^T P`.
    pub k: DMatrix<T>,
    /// Frobenius norm of the Riccati residual at `p`.
    pub residual: T,
    pub iterations: usize,
}

pub fn care_residual<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    q: &DMatrix<T>,
    r_inv: &DMatrix<T>,
    p: &DMatrix<T>,
) -> T {
    let res = a.transpose() * p + p * a - p * b * r_inv * b.transpose() * p + q;
    res.norm()
}

pub fn solve_care<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    q: &DMatrix<T>,
    r: &DMatrix<T>,
) -> Result<CareSolution<T>, SynthesisError> {
    solve_care_with(a, b, q, r, &CareOptions::default())
}

pub fn solve_care_with<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    q: &DMatrix<T>,
    r: &DMatrix<T>,
    opts: &CareOptions<T>,
) -> Result<CareSolution<T>, SynthesisError> {
    let n = a.nrows();
    let m = b.ncols();
    if !a.is_square() || b.nrows() != n || q.shape() != (n, n) || r.shape() != (m, m) {
        return Err(SynthesisError::Dimension(format!(
            "A {}x{}, B {}x{}, Q {}x{}, R {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            q.nrows(),
            q.ncols(),
            r.nrows(),
            r.ncols()
        )));
    }
    linalg::check_definite(r, "R", true)?;
    linalg::check_definite(q, "Q", false)?;
    if let Some(mode) = linalg::uncontrollable_mode(a, b, T::lit(1e-9)) {
        return Err(SynthesisError::Unstabilizable {
            re: mode.re.to_f64_lossy(),
            im: mode.im.to_f64_lossy(),
        });
    }
    let r_inv = r
        .clone()
        .try_inverse()
        .ok_or(SynthesisError::Singular("R"))?;
    let bt = b.transpose();
    let gain = |p: &DMatrix<T>| &r_inv * &bt * p;

    let mut k = match sign_function_solution(a, b, q, &r_inv) {
        Ok(p0) => gain(&p0),
        Err(_) => DMatrix::zeros(m, n),
    };
    if !linalg::is_hurwitz(&(a - b * &k)) {
        if linalg::is_hurwitz(a) {
            k = DMatrix::zeros(m, n);
        } else {
            return Err(SynthesisError::NoConvergence {
                iterations: 0,
                residual: f64::INFINITY,
            });
        }
    }

    let mut p = DMatrix::zeros(n, n);
    let mut residual = T::max_value().unwrap();
    let mut iterations = 0;
    for it in 1..=opts.max_iterations {
        iterations = it;
        let closed = a - b * &k;
        let rhs = q + k.transpose() * r * &k;
        let p_next = linalg::solve_lyapunov(&closed, &rhs)?;
        let change = (&p_next - &p).norm();
        p = p_next;
        k = gain(&p);
        residual = care_residual(a, b, q, &r_inv, &p);
        let scale = T::one() + p.norm();
        // Newton converges quadratically; stop once the update stalls at
        // rounding level after the residual target is met.
        if residual < opts.tolerance * scale && change <= T::lit(1e-13) * scale {
            break;
        }
    }
    let scale = T::one() + p.norm();
    if !(residual < opts.tolerance * scale) {
        return Err(SynthesisError::NoConvergence {
            iterations,
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(CareSolution {
        p,
        k,
        residual,
        iterations,
    })
}

/// Stabilizing solution from the matrix sign function of the Hamiltonian.
fn sign_function_solution<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    q: &DMatrix<T>,
    r_inv: &DMatrix<T>,
) -> Result<DMatrix<T>, SynthesisError> {
    let n = a.nrows();
    let g = b * r_inv * b.transpose();
    let mut h = DMatrix::<T>::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-&g));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let mut z = h;
    let exponent = T::one() / T::from_usize(2 * n).unwrap();
    for _ in 0..100 {
        let det = z.clone().lu().determinant().abs();
        if !(det > T::zero()) || !det.is_finite() {
            return Err(SynthesisError::Singular("Hamiltonian sign iteration"));
        }
        let c = det.powf(-exponent);
        let zc = &z * c;
        let inv = zc
            .clone()
            .try_inverse()
            .ok_or(SynthesisError::Singular("Hamiltonian sign iteration"))?;
        let next = (zc + inv) * T::lit(0.5);
        let change = (&next - &z).norm();
        let done = change <= T::lit(1e-12) * next.norm();
        z = next;
        if done {
            break;
        }
    }
    let ident = DMatrix::<T>::identity(n, n);
    let w11 = z.view((0, 0), (n, n)).clone_owned();
    let w12 = z.view((0, n), (n, n)).clone_owned();
    let w21 = z.view((n, 0), (n, n)).clone_owned();
    let w22 = z.view((n, n), (n, n)).clone_owned();
    let mut lhs = DMatrix::<T>::zeros(2 * n, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(&w12);
    lhs.view_mut((n, 0), (n, n)).copy_from(&(w22 + &ident));
    let mut rhs = DMatrix::<T>::zeros(2 * n, n);
    rhs.view_mut((0, 0), (n, n)).copy_from(&(-(w11 + &ident)));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(-w21));
    let p = lhs
        .svd(true, true)
        .solve(&rhs, T::lit(1e-14))
        .map_err(|_| SynthesisError::Singular("sign-function projection"))?;
    Ok(linalg::symmetrize(&p))
}
