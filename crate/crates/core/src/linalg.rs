//! Dense linear-algebra helpers shared by plant validation and gain synthesis.

use nalgebra::{Complex, DMatrix};

use crate::error::SynthesisError;
use crate::num::Real;

pub fn eigenvalues<T: Real>(a: &DMatrix<T>) -> Vec<Complex<T>> {
    a.clone().complex_eigenvalues().iter().copied().collect()
}

pub fn eigenvalues_f64<T: Real>(a: &DMatrix<T>) -> Vec<(f64, f64)> {
    eigenvalues(a)
        .into_iter()
        .map(|c| (c.re.to_f64_lossy(), c.im.to_f64_lossy()))
        .collect()
}

pub fn max_real_part<T: Real>(a: &DMatrix<T>) -> T {
    eigenvalues(a)
        .into_iter()
        .map(|c| c.re)
        .fold(T::min_value().unwrap(), |m, r| if r > m { r } else { m })
}

pub fn is_hurwitz<T: Real>(a: &DMatrix<T>) -> bool {
    max_real_part(a) < T::zero()
}

pub fn frobenius<T: Real>(a: &DMatrix<T>) -> T {
    a.norm()
}

/// Popov-Belevitch-Hautus test on every eigenvalue with real part above
/// `-margin`. Returns the first mode that `b` cannot reach, if any.
pub fn uncontrollable_mode<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    margin: T,
) -> Option<Complex<T>> {
    let n = a.nrows();
    let m = b.ncols();
    for lambda in eigenvalues(a) {
        if lambda.re < -margin {
            continue;
        }
        // Real embedding of the complex matrix [A - lambda I, B].
        let mut mr = DMatrix::<T>::zeros(n, n + m);
        mr.view_mut((0, 0), (n, n)).copy_from(a);
        for i in 0..n {
            mr[(i, i)] -= lambda.re;
        }
        mr.view_mut((0, n), (n, m)).copy_from(b);
        let mut mi = DMatrix::<T>::zeros(n, n + m);
        for i in 0..n {
            mi[(i, i)] = -lambda.im;
        }
        let mut big = DMatrix::<T>::zeros(2 * n, 2 * (n + m));
        big.view_mut((0, 0), (n, n + m)).copy_from(&mr);
        big.view_mut((0, n + m), (n, n + m)).copy_from(&(-&mi));
        big.view_mut((n, 0), (n, n + m)).copy_from(&mi);
        big.view_mut((n, n + m), (n, n + m)).copy_from(&mr);
        let sv = big.singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let scale = if smax > T::one() { smax } else { T::one() };
        if smin <= T::lit(1e-9) * scale {
            return Some(lambda);
        }
    }
    None
}

/// Solves `A^T X + X A = -M` by Kronecker vectorization.
pub fn solve_lyapunov<T: Real>(
    a: &DMatrix<T>,
    m: &DMatrix<T>,
) -> Result<DMatrix<T>, SynthesisError> {
    let n = a.nrows();
    let at = a.transpose();
    let ident = DMatrix::<T>::identity(n, n);
    // vec(A^T X) = (I (x) A^T) vec X ; vec(X A) = (A^T (x) I) vec X
    let op = ident.kronecker(&at) + at.kronecker(&ident);
    let rhs = DMatrix::from_column_slice(n * n, 1, (-m).as_slice());
    let sol = op
        .lu()
        .solve(&rhs)
        .ok_or(SynthesisError::Singular("Lyapunov operator"))?;
    let x = DMatrix::from_column_slice(n, n, sol.as_slice());
    Ok(symmetrize(&x))
}

pub fn symmetrize<T: Real>(x: &DMatrix<T>) -> DMatrix<T> {
    (x + x.transpose()) * T::lit(0.5)
}

/// Checks symmetry and that all eigenvalues are `>= 0` (or `> 0` when `strict`).
pub fn check_definite<T: Real>(
    m: &DMatrix<T>,
    name: &'static str,
    strict: bool,
) -> Result<(), SynthesisError> {
    let requirement = if strict {
        "symmetric positive definite"
    } else {
        "symmetric positive semidefinite"
    };
    if !m.is_square() {
        return Err(SynthesisError::InvalidWeight {
            name,
            requirement,
            detail: format!("shape {}x{}", m.nrows(), m.ncols()),
        });
    }
    let asym = (m - m.transpose()).norm();
    let scale = m.norm().max(T::one());
    if asym > T::lit(1e-12) * scale {
        return Err(SynthesisError::InvalidWeight {
            name,
            requirement,
            detail: format!("asymmetry {:.3e}", asym.to_f64_lossy()),
        });
    }
    let eig = m.clone().symmetric_eigenvalues();
    let min = eig.min();
    let tol = T::lit(1e-12) * scale;
    let ok = if strict { min > tol } else { min >= -tol };
    if !ok {
        return Err(SynthesisError::InvalidWeight {
            name,
            requirement,
            detail: format!("smallest eigenvalue {:.6e}", min.to_f64_lossy()),
        });
    }
    Ok(())
}
