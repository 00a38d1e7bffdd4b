//! Decomposition drivers F = W S (right) and F = S' W' (left), and the
//! certification layer that re-derives every defining property of a
//! computed factorization from scratch.
//!
//! Right side: G = F^[M,N] F, Sigma = sign(G), S = (Sigma G)^{1/2},
//! W = F S^{-1}. Left side: G' = F F^[M,N], Sigma' = sign(G'),
//! S' = (Sigma' G')^{1/2}, W' = S'^{-1} F. W has orthonormal columns
//! with respect to the twisted pair (M, N Sigma); W' has orthonormal
//! rows with respect to (M Sigma', N). For square F both sides share
//! the same W.

use num_complex::Complex64;

use crate::eigen;
use crate::error::{Error, Result};
use crate::matfunc::{
    self, ClusterOrder, EigenClassification, SignFunctionSpec, SignKind,
};
use crate::matrix::ComplexMatrix;
use crate::space::{
    self, FormKind, ProductPair, ScalarProductSpace, Tolerances,
};

/// Determinant identities hold exactly in theory; this is the pinned
/// numerical threshold for |det| checks.
pub const DET_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
        }
    }
}

/// A computed factorization. For `Side::Right`, F = w * s; for
/// `Side::Left`, F = s * w. `sigma` is the generalized sign of the
/// corresponding Gram matrix and satisfies s^2 = sigma * gram.
#[derive(Clone, Debug)]
pub struct PolarFactors {
    pub w: ComplexMatrix,
    pub s: ComplexMatrix,
    pub sigma: ComplexMatrix,
    pub side: Side,
    pub sign: SignFunctionSpec,
    pub classification: Vec<EigenClassification>,
}

/// Decompose F with respect to a product pair, on the requested side.
pub fn decompose(
    f: &ComplexMatrix,
    pair: &ProductPair,
    spec: &SignFunctionSpec,
    side: Side,
    tol: &Tolerances,
) -> Result<PolarFactors> {
    decompose_with_order(f, pair, spec, side, tol, ClusterOrder::FirstAppearance)
}

/// As `decompose`, threading the Schur cluster layout order through to
/// the sign evaluation (used to exercise uniqueness of the factors).
pub fn decompose_with_order(
    f: &ComplexMatrix,
    pair: &ProductPair,
    spec: &SignFunctionSpec,
    side: Side,
    tol: &Tolerances,
    order: ClusterOrder,
) -> Result<PolarFactors> {
    tol.validate()?;
    if f.rows() != pair.m_space().dim() || f.cols() != pair.n_space().dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix between spaces of dimensions ({}, {})",
            f.rows(),
            f.cols(),
            pair.m_space().dim(),
            pair.n_space().dim()
        )));
    }
    if pair.form() == FormKind::RealBilinear {
        if let Some((row, col)) = f.first_nonreal_entry() {
            return Err(Error::NonRealEntries { row, col });
        }
    }
    if f.is_square() {
        let ratio = conditioning_ratio(f)?;
        if ratio <= tol.tol_sing {
            return Err(Error::SingularInput { ratio });
        }
    }
    let da = pair.double_adjoint_holds(f, tol)?;
    if !da.holds {
        return Err(Error::DoubleAdjointViolation {
            residual: da.residual,
        });
    }
    let fsharp = pair.adjoint(f)?;
    let gram = match side {
        Side::Right => fsharp.mul(f),
        Side::Left => f.mul(&fsharp),
    };
    let ratio = conditioning_ratio(&gram)?;
    if ratio <= tol.tol_sing {
        return Err(Error::SingularGram { ratio });
    }
    let sign = matfunc::generalized_sign_with_order(&gram, spec, tol, order)?;
    let s = matfunc::principal_sqrt(&sign.sigma.mul(&gram), tol)?;
    let w = match side {
        Side::Right => s.solve_right(f)?,
        Side::Left => s.solve(f)?,
    };
    Ok(PolarFactors {
        w,
        s,
        sigma: sign.sigma,
        side,
        sign: spec.clone(),
        classification: sign.classification,
    })
}

/// Square-matrix convenience: one scalar product on both sides.
pub fn decompose_square(
    f: &ComplexMatrix,
    space: &ScalarProductSpace,
    spec: &SignFunctionSpec,
    side: Side,
    tol: &Tolerances,
) -> Result<PolarFactors> {
    decompose(f, &ProductPair::square(space.clone()), spec, side, tol)
}

/// Both sides at once. For square F the two share the same W and the
/// left factors are the W-conjugates of the right ones.
pub fn decompose_both(
    f: &ComplexMatrix,
    pair: &ProductPair,
    spec: &SignFunctionSpec,
    tol: &Tolerances,
) -> Result<(PolarFactors, PolarFactors)> {
    let right = decompose(f, pair, spec, Side::Right, tol)?;
    let left = decompose(f, pair, spec, Side::Left, tol)?;
    Ok((right, left))
}

/// Relative conditioning estimate: the singular-value ratio floored by
/// the LU pivot ratio, which still sees exact rank deficiency after the
/// A^* A squaring has washed it out.
fn conditioning_ratio(a: &ComplexMatrix) -> Result<f64> {
    let sv = eigen::singular_value_ratio(a)?;
    let lu = match a.lu() {
        Ok(lu) => lu.pivot_ratio(),
        Err(Error::SingularFactorization) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(sv.min(lu))
}

#[derive(Clone, Debug)]
pub struct CertCheck {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CertCheck {
    fn new(name: &str, residual: f64, threshold: f64) -> Self {
        CertCheck {
            name: name.to_string(),
            residual,
            threshold,
            pass: residual <= threshold,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertificationReport {
    pub checks: Vec<CertCheck>,
    pub pass: bool,
}

impl CertificationReport {
    pub fn residual(&self, name: &str) -> Option<f64> {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.residual)
    }
}

/// Strip rounding-level imaginary parts so a numerically real Sigma can
/// seed a real-bilinear twisted product. Returns the matrix and the
/// largest imaginary magnitude removed.
fn realify(a: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let mut worst = 0.0f64;
    let out = ComplexMatrix::from_fn(a.rows(), a.cols(), |r, c| {
        worst = worst.max(a[(r, c)].im.abs());
        Complex64::new(a[(r, c)].re, 0.0)
    });
    (out, worst)
}

/// Re-check every defining property of a computed factorization against
/// the original data. All residuals are recomputed from F and the pair;
/// nothing is trusted from the solver beyond the factors themselves.
pub fn certify(
    f: &ComplexMatrix,
    factors: &PolarFactors,
    pair: &ProductPair,
    tol: &Tolerances,
) -> Result<CertificationReport> {
    let mut checks: Vec<CertCheck> = Vec::new();
    let w = &factors.w;
    let s = &factors.s;
    let sigma = &factors.sigma;
    let n_eq = tol.tol_eq;

    let reconstructed = match factors.side {
        Side::Right => w.mul(s),
        Side::Left => s.mul(w),
    };
    checks.push(CertCheck::new(
        "reconstruction",
        reconstructed.relative_distance(f),
        n_eq,
    ));

    let fsharp = pair.adjoint(f)?;
    let gram = match factors.side {
        Side::Right => fsharp.mul(f),
        Side::Left => f.mul(&fsharp),
    };
    checks.push(CertCheck::new(
        "square_relation",
        s.mul(s).relative_distance(&sigma.mul(&gram)),
        n_eq,
    ));
    let unimodular = eigen::eigenvalues(sigma)?
        .iter()
        .map(|e| (e.norm() - 1.0).abs())
        .fold(0.0f64, f64::max);
    checks.push(CertCheck::new("sigma_unimodular_spectrum", unimodular, n_eq));
    // the +-1-valued stems make Sigma an involution
    if matches!(
        factors.sign,
        SignFunctionSpec::Builtin(SignKind::Sign1) | SignFunctionSpec::Builtin(SignKind::Sign2)
    ) {
        checks.push(CertCheck::new(
            "sigma_involution",
            sigma
                .mul(sigma)
                .relative_distance(&ComplexMatrix::identity(sigma.rows())),
            n_eq,
        ));
    }
    checks.push(CertCheck::new(
        "commutation",
        sigma.mul(s).relative_distance(&s.mul(sigma)),
        n_eq,
    ));

    // S and Sigma are selfadjoint in the scalar product on their side:
    // N for the right factorization, M for the left.
    let host = match factors.side {
        Side::Right => pair.n_space(),
        Side::Left => pair.m_space(),
    };
    checks.push(CertCheck::new(
        "s_selfadjoint",
        host.adjoint(s)?.relative_distance(s),
        n_eq,
    ));
    checks.push(CertCheck::new(
        "sigma_selfadjoint",
        host.adjoint(sigma)?.relative_distance(sigma),
        n_eq,
    ));

    let (r_pos, margin) = space::r_positive_margin(s, tol)?;
    checks.push(CertCheck {
        name: "s_r_positive".to_string(),
        residual: (-margin).max(0.0),
        threshold: 0.0,
        pass: r_pos,
    });

    // W is orthonormal with respect to the twisted product: columns for
    // (M, N Sigma^{-1}), rows for (M Sigma', N).
    let twisted = {
        let mut t = match factors.side {
            Side::Right => sigma.solve_right(host.matrix())?,
            Side::Left => host.matrix().mul(sigma),
        };
        let mut realness = 0.0;
        if pair.form() == FormKind::RealBilinear {
            let (tr, worst) = realify(&t);
            t = tr;
            realness = worst;
            checks.push(CertCheck::new(
                "sigma_realness",
                realness / sigma.frobenius_norm().max(1.0),
                n_eq,
            ));
        }
        let _ = realness;
        ScalarProductSpace::new(t, pair.form(), tol)?
    };
    let (twisted_pair, ortho) = match factors.side {
        Side::Right => {
            let p = ProductPair::new(pair.m_space().clone(), twisted)?;
            let o = space::has_orthonormal_columns(w, &p, tol)?;
            (p, ("w_orthonormal_columns", o))
        }
        Side::Left => {
            let p = ProductPair::new(twisted, pair.n_space().clone())?;
            let o = space::has_orthonormal_rows(w, &p, tol)?;
            (p, ("w_orthonormal_rows", o))
        }
    };
    let dim = match factors.side {
        Side::Right => w.cols(),
        Side::Left => w.rows(),
    };
    checks.push(CertCheck::new(
        ortho.0,
        ortho.1.residual,
        n_eq * dim.max(1) as f64,
    ));
    let da = twisted_pair.double_adjoint_holds(w, tol)?;
    checks.push(CertCheck::new("w_double_adjoint", da.residual, n_eq));

    // determinant identities are specific to a single product on both
    // sides; with two different products only the twisted orthonormality
    // constrains det W
    let one_product = f.is_square()
        && pair
            .m_space()
            .matrix()
            .sub(pair.n_space().matrix())
            .frobenius_norm()
            == 0.0;
    if one_product {
        let det_w = w.determinant()?;
        let det_sigma = sigma.determinant()?;
        let (w_res, sigma_res) = match pair.form() {
            // det W = +-1 and det Sigma = +1 over the reals
            FormKind::RealBilinear => (
                (det_w - 1.0).norm().min((det_w + 1.0).norm()),
                (det_sigma - 1.0).norm(),
            ),
            // |det W| = 1 and |det Sigma| = 1
            FormKind::ComplexBilinear => {
                ((det_w.norm() - 1.0).abs(), (det_sigma.norm() - 1.0).abs())
            }
            // |det W| = 1 and det Sigma = +1
            FormKind::Sesquilinear => {
                ((det_w.norm() - 1.0).abs(), (det_sigma - 1.0).norm())
            }
        };
        checks.push(CertCheck::new("det_w", w_res, DET_TOL));
        checks.push(CertCheck::new("det_sigma", sigma_res, DET_TOL));
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(CertificationReport { checks, pass })
}
