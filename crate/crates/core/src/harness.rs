//! Seeded instance generation and independent oracles for testing.
//!
//! Product matrices come from orthosymmetric families, so the
//! double-adjoint condition holds automatically for every square map.
//! The oracles deliberately avoid the Schur path used by the library:
//! the diagonalizable sign oracle applies the stem eigenvalue-wise
//! through an explicit eigenvector basis, and the classical polar
//! oracle rests on a cyclic complex Jacobi eigensolver.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eigen;
use crate::error::{Error, Result};
use crate::matfunc::{self, SignFunctionSpec};
use crate::matrix::ComplexMatrix;
use crate::space::{FormKind, ScalarProductSpace, Tolerances};

const MAX_ATTEMPTS: usize = 100;
/// Reject sampled matrices with sigma_min/sigma_max below this.
const COND_FLOOR: f64 = 1e-6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Orthosymmetric product-matrix families: each N here satisfies
/// N^# = +-N (or is unitary up to scaling), which makes the adjoint an
/// involution on square matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductFamily {
    /// N = I.
    Identity,
    /// Random nonsingular symmetric N (real or complex by form).
    Symmetric,
    /// Random nonsingular skew-symmetric N; requires even dimension.
    SkewSymmetric,
    /// Random nonsingular Hermitian N (sesquilinear forms).
    Hermitian,
    /// Ones on the antidiagonal.
    AntiDiagonalFlip,
    /// [[0, I], [-I, 0]]; requires even dimension.
    Symplectic,
    /// diag(+1 x p, -1 x q).
    Signature { p: usize, q: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct InstanceRecipe {
    pub dim: usize,
    pub form: FormKind,
    pub family: ProductFamily,
    pub seed: u64,
}

fn random_real(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal), 0.0))
}

fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn random_square(rng: &mut ChaCha8Rng, n: usize, form: FormKind) -> ComplexMatrix {
    match form {
        FormKind::RealBilinear => random_real(rng, n, n),
        _ => random_complex(rng, n, n),
    }
}

fn well_conditioned(
    rng: &mut ChaCha8Rng,
    make: impl Fn(&mut ChaCha8Rng) -> ComplexMatrix,
) -> Result<ComplexMatrix> {
    for _ in 0..MAX_ATTEMPTS {
        let a = make(rng);
        if eigen::singular_value_ratio(&a)? > COND_FLOOR {
            return Ok(a);
        }
    }
    Err(Error::GenerationExhausted(MAX_ATTEMPTS))
}

fn product_matrix(
    rng: &mut ChaCha8Rng,
    dim: usize,
    form: FormKind,
    family: ProductFamily,
) -> Result<ComplexMatrix> {
    match family {
        ProductFamily::Identity => Ok(ComplexMatrix::identity(dim)),
        ProductFamily::Symmetric => well_conditioned(rng, |rng| {
            let r = random_square(rng, dim, form);
            r.add(&r.transpose())
        }),
        ProductFamily::SkewSymmetric => {
            if !dim.is_multiple_of(2) {
                return Err(Error::DimensionMismatch(
                    "skew-symmetric products need even dimension".to_string(),
                ));
            }
            well_conditioned(rng, |rng| {
                let r = random_square(rng, dim, form);
                r.sub(&r.transpose())
            })
        }
        ProductFamily::Hermitian => well_conditioned(rng, |rng| {
            let r = random_square(rng, dim, form);
            r.add(&r.conj_transpose())
        }),
        ProductFamily::AntiDiagonalFlip => Ok(ComplexMatrix::from_fn(dim, dim, |r, col| {
            if r + col == dim - 1 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })),
        ProductFamily::Symplectic => {
            if !dim.is_multiple_of(2) {
                return Err(Error::DimensionMismatch(
                    "symplectic products need even dimension".to_string(),
                ));
            }
            let h = dim / 2;
            Ok(ComplexMatrix::from_fn(dim, dim, |r, col| {
                if r < h && col == r + h {
                    c(1.0, 0.0)
                } else if r >= h && col == r - h {
                    c(-1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            }))
        }
        ProductFamily::Signature { p, q } => {
            if p + q != dim {
                return Err(Error::DimensionMismatch(format!(
                    "signature ({p}, {q}) does not fill dimension {dim}"
                )));
            }
            Ok(ComplexMatrix::from_fn(dim, dim, |r, col| {
                if r != col {
                    c(0.0, 0.0)
                } else if r < p {
                    c(1.0, 0.0)
                } else {
                    c(-1.0, 0.0)
                }
            }))
        }
    }
}

/// Generate a scalar-product space and a well-conditioned square F.
/// Skew families force complex-valued or even-dimensional data as
/// appropriate; Hermitian is only meaningful for sesquilinear forms.
pub fn generate_instance(
    recipe: &InstanceRecipe,
    tol: &Tolerances,
) -> Result<(ScalarProductSpace, ComplexMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let n_matrix = product_matrix(&mut rng, recipe.dim, recipe.form, recipe.family)?;
    let space = ScalarProductSpace::new(n_matrix, recipe.form, tol)?;
    let f = well_conditioned(&mut rng, |rng| random_square(rng, recipe.dim, recipe.form))?;
    Ok((space, f))
}

/// A = V diag(eigenvalues) V^{-1} with a well-conditioned V and
/// eigenvalues kept away from the origin, the imaginary axis, and each
/// other, so that every stem is smooth on the spectrum and clusters
/// stay separated.
#[derive(Clone, Debug)]
pub struct DiagonalizableInstance {
    pub a: ComplexMatrix,
    pub v: ComplexMatrix,
    pub eigenvalues: Vec<Complex64>,
}

pub fn random_diagonalizable(n: usize, seed: u64) -> Result<DiagonalizableInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eigenvalues: Vec<Complex64> = Vec::with_capacity(n);
    let mut attempts = 0;
    while eigenvalues.len() < n {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * n {
            return Err(Error::GenerationExhausted(attempts));
        }
        let re_mag = 0.3 + 1.7 * rng.gen::<f64>();
        let re = if rng.gen::<bool>() { re_mag } else { -re_mag };
        let im = 2.0 * (rng.gen::<f64>() - 0.5);
        let l = c(re, im);
        if eigenvalues.iter().all(|&m| (l - m).norm() > 0.05) {
            eigenvalues.push(l);
        }
    }
    let v = well_conditioned(&mut rng, |rng| {
        ComplexMatrix::identity(n).add(&random_complex(rng, n, n).scale(Complex64::new(0.3, 0.0)))
    })?;
    let d = ComplexMatrix::diagonal(&eigenvalues);
    // A V = V D
    let a = v.solve_right(&v.mul(&d))?;
    Ok(DiagonalizableInstance { a, v, eigenvalues })
}

/// Apply a stem eigenvalue-wise through the stored eigenvector basis:
/// V diag(f(lambda)) V^{-1}.
pub fn oracle_sign_diagonalizable(
    inst: &DiagonalizableInstance,
    spec: &SignFunctionSpec,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let values: Vec<Complex64> = inst
        .eigenvalues
        .iter()
        .map(|&l| matfunc::stem_value(l, spec, tol))
        .collect::<Result<_>>()?;
    let d = ComplexMatrix::diagonal(&values);
    inst.v.solve_right(&inst.v.mul(&d))
}

/// A single-eigenvalue defective matrix: a direct sum of Jordan blocks
/// conjugated by a random well-conditioned similarity. Any stem with
/// all derivatives zero must map it to f(eigenvalue) * I.
#[derive(Clone, Debug)]
pub struct DefectiveFixture {
    pub a: ComplexMatrix,
    pub eigenvalue: Complex64,
    pub dim: usize,
}

pub fn jordan_fixture(
    eigenvalue: Complex64,
    block_sizes: &[usize],
    seed: u64,
) -> Result<DefectiveFixture> {
    let dim: usize = block_sizes.iter().sum();
    assert!(dim > 0, "at least one Jordan block");
    let mut j = ComplexMatrix::zeros(dim, dim);
    let mut offset = 0;
    for &size in block_sizes {
        for i in 0..size {
            j[(offset + i, offset + i)] = eigenvalue;
            if i + 1 < size {
                j[(offset + i, offset + i + 1)] = c(1.0, 0.0);
            }
        }
        offset += size;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = well_conditioned(&mut rng, |rng| {
        ComplexMatrix::identity(dim).add(&random_complex(rng, dim, dim).scale(Complex64::new(0.2, 0.0)))
    })?;
    let a = x.solve_right(&x.mul(&j))?;
    Ok(DefectiveFixture {
        a,
        eigenvalue,
        dim,
    })
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns (Q, d) with A = Q diag(d) Q^* and unitary Q.
pub fn jacobi_hermitian_eigen(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>)> {
    assert!(a.is_square(), "Jacobi eigensolver requires a square matrix");
    let n = a.rows();
    let herm_res = a.sub(&a.conj_transpose()).frobenius_norm();
    if herm_res > 1e-10 * a.frobenius_norm().max(1.0) {
        return Err(Error::DimensionMismatch(
            "Jacobi eigensolver requires a Hermitian matrix".to_string(),
        ));
    }
    let mut w = a.clone();
    let mut q = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for r in 0..n {
            for col in 0..n {
                if r != col {
                    off += w[(r, col)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            let d: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
            return Ok((q, d));
        }
        for p in 0..n {
            for r in p + 1..n {
                let apq = w[(p, r)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let app = w[(p, p)].re;
                let aqq = w[(r, r)].re;
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(app - aqq);
                let (cos_t, sin_t) = (theta.cos(), theta.sin());
                let s = phase * sin_t;
                // columns: [p] <- c*col_p + s*col_q ; [q] <- -conj(s)*col_p + c*col_q
                for i in 0..n {
                    let wp = w[(i, p)];
                    let wq = w[(i, r)];
                    w[(i, p)] = wp * cos_t + wq * s.conj();
                    w[(i, r)] = -wp * s + wq * cos_t;
                    let qp = q[(i, p)];
                    let qq = q[(i, r)];
                    q[(i, p)] = qp * cos_t + qq * s.conj();
                    q[(i, r)] = -qp * s + qq * cos_t;
                }
                // rows (conjugate transpose of the column action)
                for jcol in 0..n {
                    let wp = w[(p, jcol)];
                    let wq = w[(r, jcol)];
                    w[(p, jcol)] = wp * cos_t + wq * s;
                    w[(r, jcol)] = -wp * s.conj() + wq * cos_t;
                }
            }
        }
    }
    Err(Error::ConvergenceFailure(60))
}

/// Classical polar decomposition F = U H with unitary U and Hermitian
/// positive definite H, computed entirely through the Jacobi
/// eigensolver (independent of the Schur engine).
pub fn oracle_classical_polar(f: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    assert!(f.is_square(), "classical polar oracle expects square F");
    let gram = f.conj_transpose().mul(f);
    let (q, d) = jacobi_hermitian_eigen(&gram)?;
    let roots: Vec<Complex64> = d
        .iter()
        .map(|&x| {
            if x <= 0.0 {
                Err(Error::SingularGram { ratio: x })
            } else {
                Ok(c(x.sqrt(), 0.0))
            }
        })
        .collect::<Result<_>>()?;
    let h = q.mul(&ComplexMatrix::diagonal(&roots)).mul(&q.conj_transpose());
    let u = h.solve_right(f)?;
    Ok((u, h))
}
