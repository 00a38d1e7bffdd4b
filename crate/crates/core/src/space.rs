//! Scalar products [x,y]_N over the real or complex field, the adjoints
//! they induce, and the executable predicates used by the decomposition
//! theorems: double-adjoint identity, r-positive-definiteness, and
//! orthonormal columns/rows with respect to a pair of products.

use crate::eigen;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Lu};

/// Kind of bilinear or sesquilinear form defined by a product matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    RealBilinear,
    ComplexBilinear,
    Sesquilinear,
}

impl FormKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FormKind::RealBilinear => "real_bilinear",
            FormKind::ComplexBilinear => "complex_bilinear",
            FormKind::Sesquilinear => "sesquilinear",
        }
    }
}

/// Tolerance bundle used throughout the library.
///
/// * `tol_sing`  — relative singular-value cutoff for nonsingularity,
/// * `tol_eq`    — relative Frobenius residual for matrix equality,
/// * `tol_class` — eigenvalue classification band around stem
///   discontinuities and the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub tol_sing: f64,
    pub tol_eq: f64,
    pub tol_class: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_sing: 1e-12,
            tol_eq: 1e-8,
            tol_class: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if self.tol_sing > 0.0 && self.tol_eq > 0.0 && self.tol_class > 0.0 {
            Ok(())
        } else {
            Err(Error::Parse(
                "tolerances must be strictly positive".to_string(),
            ))
        }
    }
}

/// Outcome of a tolerance-based predicate: the verdict plus the
/// residual it was judged on.
#[derive(Clone, Copy, Debug)]
pub struct PredicateOutcome {
    pub holds: bool,
    pub residual: f64,
}

/// A^# — transpose for bilinear forms, conjugate transpose for
/// sesquilinear forms.
pub fn sharp(a: &ComplexMatrix, form: FormKind) -> ComplexMatrix {
    match form {
        FormKind::RealBilinear | FormKind::ComplexBilinear => a.transpose(),
        FormKind::Sesquilinear => a.conj_transpose(),
    }
}

/// A nonsingular product matrix N together with the kind of form it
/// defines. Holds a cached factorization for adjoint solves.
#[derive(Clone, Debug)]
pub struct ScalarProductSpace {
    matrix: ComplexMatrix,
    form: FormKind,
    lu: Lu,
}

impl ScalarProductSpace {
    pub fn new(matrix: ComplexMatrix, form: FormKind, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "product matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if form == FormKind::RealBilinear {
            if let Some((row, col)) = matrix.first_nonreal_entry() {
                return Err(Error::NonRealEntries { row, col });
            }
        }
        let ratio = eigen::singular_value_ratio(&matrix)?;
        if ratio <= tol.tol_sing {
            return Err(Error::SingularInput { ratio });
        }
        let lu = matrix.lu()?;
        Ok(Self { matrix, form, lu })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn form(&self) -> FormKind {
        self.form
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// N-adjoint A^[N] = N^{-1} A^# N, via the cached factorization.
    pub fn adjoint(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.dim() || a.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "adjoint of a {}x{} matrix in a dimension-{} space",
                a.rows(),
                a.cols(),
                self.dim()
            )));
        }
        let rhs = sharp(a, self.form).mul(&self.matrix);
        self.lu.solve(&rhs)
    }
}

/// Two scalar-product spaces of the same form kind, defining the
/// (M,N)-adjoint of rectangular maps between them.
#[derive(Clone, Debug)]
pub struct ProductPair {
    m_space: ScalarProductSpace,
    n_space: ScalarProductSpace,
}

impl ProductPair {
    pub fn new(m_space: ScalarProductSpace, n_space: ScalarProductSpace) -> Result<Self> {
        if m_space.form() != n_space.form() {
            return Err(Error::DimensionMismatch(format!(
                "product pair mixes form kinds {:?} and {:?}",
                m_space.form(),
                n_space.form()
            )));
        }
        Ok(Self { m_space, n_space })
    }

    /// Pair (N, N): one scalar product viewed as a pair.
    pub fn square(space: ScalarProductSpace) -> Self {
        Self {
            m_space: space.clone(),
            n_space: space,
        }
    }

    pub fn m_space(&self) -> &ScalarProductSpace {
        &self.m_space
    }

    pub fn n_space(&self) -> &ScalarProductSpace {
        &self.n_space
    }

    pub fn form(&self) -> FormKind {
        self.m_space.form()
    }

    pub fn swapped(&self) -> Self {
        Self {
            m_space: self.n_space.clone(),
            n_space: self.m_space.clone(),
        }
    }

    /// (M,N)-adjoint A^[M,N] = N^{-1} A^# M of an m x n matrix.
    pub fn adjoint(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.m_space.dim() || a.cols() != self.n_space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "(M,N)-adjoint of a {}x{} matrix against dimensions ({}, {})",
                a.rows(),
                a.cols(),
                self.m_space.dim(),
                self.n_space.dim()
            )));
        }
        let rhs = sharp(a, self.form()).mul(self.m_space.matrix());
        self.n_space.lu.solve(&rhs)
    }

    /// Whether (F^[M,N])^[N,M] = F to tol_eq, with the relative residual.
    pub fn double_adjoint_holds(
        &self,
        f: &ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<PredicateOutcome> {
        let once = self.adjoint(f)?;
        let twice = self.swapped().adjoint(&once)?;
        let residual = twice.relative_distance(f);
        Ok(PredicateOutcome {
            holds: residual <= tol.tol_eq,
            residual,
        })
    }
}

/// All eigenvalues in the open right half-plane, strictly beyond the
/// classification band.
pub fn is_r_positive_definite(a: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    Ok(r_positive_margin(a, tol)?.0)
}

/// (verdict, min real part of the spectrum).
pub fn r_positive_margin(a: &ComplexMatrix, tol: &Tolerances) -> Result<(bool, f64)> {
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut margin = f64::INFINITY;
    for ev in eigen::eigenvalues(a)? {
        margin = margin.min(ev.re);
    }
    Ok((margin > tol.tol_class * scale, margin))
}

/// ||W^[M,N] W - I_n||_F <= tol_eq * n.
pub fn has_orthonormal_columns(
    w: &ComplexMatrix,
    pair: &ProductPair,
    tol: &Tolerances,
) -> Result<PredicateOutcome> {
    let n = w.cols();
    let product = pair.adjoint(w)?.mul(w);
    let residual = product.sub(&ComplexMatrix::identity(n)).frobenius_norm();
    Ok(PredicateOutcome {
        holds: residual <= tol.tol_eq * n.max(1) as f64,
        residual,
    })
}

/// ||W W^[M,N] - I_m||_F <= tol_eq * m.
pub fn has_orthonormal_rows(
    w: &ComplexMatrix,
    pair: &ProductPair,
    tol: &Tolerances,
) -> Result<PredicateOutcome> {
    let m = w.rows();
    let product = w.mul(&pair.adjoint(w)?);
    let residual = product.sub(&ComplexMatrix::identity(m)).frobenius_norm();
    Ok(PredicateOutcome {
        holds: residual <= tol.tol_eq * m.max(1) as f64,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn space(entries: Vec<Complex64>, n: usize, form: FormKind) -> ScalarProductSpace {
        let m = ComplexMatrix::new(n, n, entries).unwrap();
        ScalarProductSpace::new(m, form, &Tolerances::default()).unwrap()
    }

    #[test]
    fn sharp_cases() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(sharp(&a, FormKind::RealBilinear), expected);

        let i = ComplexMatrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(sharp(&i, FormKind::Sesquilinear)[(0, 0)], c(0.0, -1.0));
        assert_eq!(sharp(&i, FormKind::ComplexBilinear)[(0, 0)], c(0.0, 1.0));
    }

    #[test]
    fn sharp_is_involution() {
        let a = ComplexMatrix::from_fn(3, 2, |r, col| c(r as f64, col as f64 + 0.5));
        for form in [
            FormKind::ComplexBilinear,
            FormKind::Sesquilinear,
            FormKind::RealBilinear,
        ] {
            assert_eq!(sharp(&sharp(&a, form), form), a);
        }
    }

    #[test]
    fn real_bilinear_rejects_complex_product_matrix() {
        let m = ComplexMatrix::new(1, 1, vec![c(1.0, 0.5)]).unwrap();
        assert!(matches!(
            ScalarProductSpace::new(m, FormKind::RealBilinear, &Tolerances::default()),
            Err(Error::NonRealEntries { row: 0, col: 0 })
        ));
    }

    #[test]
    fn singular_product_matrix_rejected() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            ScalarProductSpace::new(m, FormKind::ComplexBilinear, &Tolerances::default()),
            Err(Error::SingularInput { .. })
        ));
    }

    #[test]
    fn adjoint_with_identity_is_sharp() {
        let n = space(vec![c(1.0, 0.0)], 1, FormKind::Sesquilinear);
        let a = ComplexMatrix::new(1, 1, vec![c(-1.0, 2.0)]).unwrap();
        let adj = n.adjoint(&a).unwrap();
        assert!((adj[(0, 0)] - c(-1.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn adjoint_paper_fixture_diag_h() {
        // H = diag(1, -4) real bilinear, F antidiagonal(4, 1)
        let h = space(
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.0)],
            2,
            FormKind::RealBilinear,
        );
        let f = ComplexMatrix::from_real(2, 2, &[0.0, 4.0, 1.0, 0.0]).unwrap();
        let adj = h.adjoint(&f).unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[0.0, -4.0, -1.0, 0.0]).unwrap();
        assert!(adj.sub(&expected).frobenius_norm() < 1e-14);
        let gram = adj.mul(&f);
        let want = ComplexMatrix::diagonal(&[c(-4.0, 0.0), c(-4.0, 0.0)]);
        assert!(gram.sub(&want).frobenius_norm() < 1e-14);
    }

    #[test]
    fn pair_adjoint_gram_fixture() {
        // M = diag(4i, 1), N = diag(1, -2i) sesquilinear, F antidiagonal(1, 3i)
        let tol = Tolerances::default();
        let m = space(
            vec![c(0.0, 4.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            2,
            FormKind::Sesquilinear,
        );
        let n = space(
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -2.0)],
            2,
            FormKind::Sesquilinear,
        );
        let pair = ProductPair::new(m, n).unwrap();
        let f = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 3.0), c(0.0, 0.0)],
        )
        .unwrap();
        let gram = pair.adjoint(&f).unwrap().mul(&f);
        let want = ComplexMatrix::diagonal(&[c(9.0, 0.0), c(-2.0, 0.0)]);
        assert!(gram.sub(&want).frobenius_norm() < 1e-13);
        assert!(pair.double_adjoint_holds(&f, &tol).unwrap().holds);
    }

    #[test]
    fn pair_adjoint_with_identities_is_conj_transpose() {
        let tol = Tolerances::default();
        let m = space(
            ComplexMatrix::identity(3).entries().to_vec(),
            3,
            FormKind::Sesquilinear,
        );
        let n = space(
            ComplexMatrix::identity(2).entries().to_vec(),
            2,
            FormKind::Sesquilinear,
        );
        let pair = ProductPair::new(m, n).unwrap();
        let f = ComplexMatrix::from_fn(3, 2, |r, col| c(r as f64 + 1.0, col as f64 - 0.3));
        let adj = pair.adjoint(&f).unwrap();
        assert!(adj.sub(&f.conj_transpose()).frobenius_norm() < 1e-13);
        assert!(pair.double_adjoint_holds(&f, &tol).unwrap().holds);
    }

    #[test]
    fn double_adjoint_counterexamples_from_nonorthosymmetric_products() {
        let tol = Tolerances::default();
        // N = [[0,1],[2i,0]] sesquilinear
        let n = space(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0), c(0.0, 0.0)],
            2,
            FormKind::Sesquilinear,
        );
        let pair = ProductPair::square(n);
        let good = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(pair.double_adjoint_holds(&good, &tol).unwrap().holds);
        let bad = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
        )
        .unwrap();
        let out = pair.double_adjoint_holds(&bad, &tol).unwrap();
        assert!(!out.holds);
        assert!(out.residual > 1e-2);
    }

    #[test]
    fn double_adjoint_depends_on_form_kind() {
        // N = [[0,1],[i,0]] with F = [[0,1],[4i,0]]: holds sesquilinear,
        // fails complex bilinear
        let entries = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)];
        let f = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 4.0), c(0.0, 0.0)],
        )
        .unwrap();
        let tol = Tolerances::default();
        let sesq = ProductPair::square(space(entries.clone(), 2, FormKind::Sesquilinear));
        assert!(sesq.double_adjoint_holds(&f, &tol).unwrap().holds);
        let bilin = ProductPair::square(space(entries, 2, FormKind::ComplexBilinear));
        assert!(!bilin.double_adjoint_holds(&f, &tol).unwrap().holds);
    }

    #[test]
    fn r_positive_definite_cases() {
        let tol = Tolerances::default();
        let a = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(2.0, 0.0)]);
        assert!(is_r_positive_definite(&a, &tol).unwrap());
        let b = ComplexMatrix::new(1, 1, vec![c(2.0, 1.0)]).unwrap();
        assert!(is_r_positive_definite(&b, &tol).unwrap());
        let d = ComplexMatrix::diagonal(&[c(-1.0, 0.0), c(3.0, 0.0)]);
        assert!(!is_r_positive_definite(&d, &tol).unwrap());
    }

    #[test]
    fn orthonormal_column_predicates() {
        let tol = Tolerances::default();
        let id = space(
            ComplexMatrix::identity(2).entries().to_vec(),
            2,
            FormKind::Sesquilinear,
        );
        let pair = ProductPair::square(id);
        let w = ComplexMatrix::identity(2);
        assert!(has_orthonormal_columns(&w, &pair, &tol).unwrap().holds);
        assert!(has_orthonormal_rows(&w, &pair, &tol).unwrap().holds);
        let w2 = w.scale(c(2.0, 0.0));
        assert!(!has_orthonormal_columns(&w2, &pair, &tol).unwrap().holds);
        let zero_row = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(!has_orthonormal_rows(&zero_row, &pair, &tol).unwrap().holds);
    }

    #[test]
    fn orthonormal_columns_twisted_fixture() {
        // W = [1/2; -2i] with M = [[0,1],[i,0]] and the twisted product
        // N Sigma^{-1} = -(1+i), all sesquilinear
        let tol = Tolerances::default();
        let m = space(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            2,
            FormKind::Sesquilinear,
        );
        let n_twisted = space(vec![c(-1.0, -1.0)], 1, FormKind::Sesquilinear);
        let pair = ProductPair::new(m, n_twisted).unwrap();
        let w = ComplexMatrix::new(2, 1, vec![c(0.5, 0.0), c(0.0, -2.0)]).unwrap();
        let out = has_orthonormal_columns(&w, &pair, &tol).unwrap();
        assert!(out.holds, "residual {}", out.residual);
    }

    #[test]
    fn square_orthonormal_columns_iff_rows() {
        use rand::{Rng, SeedableRng};
        let tol = Tolerances::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        // random unitary-ish W via Schur vectors of a random matrix
        let a = ComplexMatrix::from_fn(3, 3, |_, _| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let w = crate::eigen::schur(&a).unwrap().q;
        let id = space(
            ComplexMatrix::identity(3).entries().to_vec(),
            3,
            FormKind::Sesquilinear,
        );
        let pair = ProductPair::square(id);
        let cols = has_orthonormal_columns(&w, &pair, &tol).unwrap();
        let rows = has_orthonormal_rows(&w, &pair, &tol).unwrap();
        assert_eq!(cols.holds, rows.holds);
        assert!(cols.holds);
    }
}
