//! Dense eigen-structure kernels: unitary reduction to complex Schur
//! form, eigenvalue reordering by contiguous clusters, and triangular
//! Sylvester solves. All computation proceeds in complex arithmetic,
//! including for real inputs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::space::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A = q t q^* with q unitary and t upper triangular.
#[derive(Clone, Debug)]
pub struct SchurForm {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
}

impl SchurForm {
    /// Reassemble q t q^*.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.q.mul(&self.t).mul(&self.q.conj_transpose())
    }
}

/// Complex Schur decomposition by Householder reduction to Hessenberg
/// form followed by explicitly shifted QR with Wilkinson shifts.
/// Budget: 30n QR steps before `ConvergenceFailure`.
pub fn schur(a: &ComplexMatrix) -> Result<SchurForm> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "schur requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(SchurForm {
            q: ComplexMatrix::zeros(0, 0),
            t: ComplexMatrix::zeros(0, 0),
        });
    }
    let (mut h, mut q) = hessenberg(a);

    let budget = 30 * n;
    let mut steps = 0usize;
    let mut hi = n - 1; // active window is rows/cols lo..=hi
    let mut stagnation = 0usize;
    while hi > 0 {
        // deflate trailing eigenvalues
        let mut deflated = false;
        for i in (1..=hi).rev() {
            if subdiag_negligible(&h, i) {
                h[(i, i - 1)] = ZERO;
                if i == hi {
                    hi -= 1;
                    stagnation = 0;
                    deflated = true;
                    break;
                }
            }
        }
        if deflated {
            continue;
        }
        if hi == 0 {
            break;
        }
        // find the start of the active block
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != ZERO {
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            stagnation = 0;
            continue;
        }
        if steps >= budget {
            return Err(Error::ConvergenceFailure(budget));
        }
        steps += 1;
        stagnation += 1;

        let shift = if stagnation.is_multiple_of(12) {
            // exceptional shift to break rare symmetric stagnation
            let m = h[(hi, hi - 1)].norm()
                + if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            h[(hi, hi)] + Complex64::new(0.75 * m, 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, &mut q, lo, hi, shift, n);
    }

    // clean strict lower triangle
    for r in 0..n {
        for c in 0..r {
            h[(r, c)] = ZERO;
        }
    }
    Ok(SchurForm { q, t: h })
}

/// Eigenvalues of a square matrix: the diagonal of its Schur factor.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    Ok(schur(a)?.t.diag())
}

/// Singular values, descending, computed from the spectrum of A^* A.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = a.conj_transpose().mul(a);
    let mut sv: Vec<f64> = eigenvalues(&gram)?
        .into_iter()
        .map(|z| z.re.max(0.0).sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(sv)
}

/// Ratio sigma_min/sigma_max, or 0 for an empty/zero matrix.
pub fn singular_value_ratio(a: &ComplexMatrix) -> Result<f64> {
    let sv = singular_values(a)?;
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => Ok(min / max),
        _ => Ok(0.0),
    }
}

/// Reorder the Schur form so that eigenvalues sharing a cluster id are
/// contiguous, with clusters sorted by ascending id. Swaps adjacent
/// diagonal entries with 2x2 unitary similarities.
pub fn reorder(form: &SchurForm, cluster_of: &[usize]) -> Result<SchurForm> {
    Ok(reorder_with_layout(form, cluster_of)?.0)
}

/// As `reorder`, also returning the cluster id layout after sorting.
pub fn reorder_with_layout(
    form: &SchurForm,
    cluster_of: &[usize],
) -> Result<(SchurForm, Vec<usize>)> {
    let n = form.t.rows();
    assert_eq!(cluster_of.len(), n, "one cluster id per eigenvalue");
    let mut t = form.t.clone();
    let mut q = form.q.clone();
    let mut ids = cluster_of.to_vec();
    let scale = t.frobenius_norm().max(1.0);

    // stable bubble sort by cluster id; each adjacent transposition is
    // realized as a unitary swap of Schur diagonal entries
    loop {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1) {
            if ids[k] > ids[k + 1] {
                swap_adjacent(&mut t, &mut q, k, scale)?;
                ids.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    Ok((SchurForm { q, t }, ids))
}

/// Solve t11 X - X t22 = c for upper-triangular t11 (p x p) and t22
/// (q x q) with disjoint spectra, by column-wise back substitution.
pub fn sylvester_triangular(
    t11: &ComplexMatrix,
    t22: &ComplexMatrix,
    c: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let p = t11.rows();
    let q = t22.rows();
    assert!(t11.is_square() && t22.is_square());
    assert_eq!((c.rows(), c.cols()), (p, q), "rhs shape mismatch");
    let scale = (t11.frobenius_norm() + t22.frobenius_norm()).max(1.0);
    let mut x = ComplexMatrix::zeros(p, q);
    for j in 0..q {
        // rhs_j = c_j + sum_{k<j} x_k * t22[k, j]
        let mut rhs: Vec<Complex64> = (0..p).map(|r| c[(r, j)]).collect();
        for k in 0..j {
            let t = t22[(k, j)];
            if t != ZERO {
                for r in 0..p {
                    rhs[r] += x[(r, k)] * t;
                }
            }
        }
        // (t11 - t22[j,j] I) x_j = rhs, upper-triangular back substitution
        let mu = t22[(j, j)];
        for r in (0..p).rev() {
            let mut s = rhs[r];
            for k in r + 1..p {
                s -= t11[(r, k)] * x[(k, j)];
            }
            let d = t11[(r, r)] - mu;
            if d.norm() <= tol.tol_class * scale {
                return Err(Error::SingularSylvester { value: mu });
            }
            x[(r, j)] = s / d;
        }
    }
    Ok(x)
}

fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k, rows k+1..n
        let x: Vec<Complex64> = (k + 1..n).map(|r| h[(r, k)]).collect();
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue; // already in Hessenberg position
        }
        let alpha = if x[0] == ZERO {
            Complex64::new(-norm_x, 0.0)
        } else {
            -(x[0] / x[0].norm()) * norm_x
        };
        let mut v = x;
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H <- P H, rows k+1..n, all columns
        for c in 0..n {
            let mut dot = ZERO;
            for (i, r) in (k + 1..n).enumerate() {
                dot += v[i].conj() * h[(r, c)];
            }
            dot *= beta;
            for (i, r) in (k + 1..n).enumerate() {
                let sub = v[i] * dot;
                h[(r, c)] -= sub;
            }
        }
        // H <- H P, all rows, columns k+1..n
        for r in 0..n {
            let mut dot = ZERO;
            for (i, c) in (k + 1..n).enumerate() {
                dot += h[(r, c)] * v[i];
            }
            dot *= beta;
            for (i, c) in (k + 1..n).enumerate() {
                let sub = dot * v[i].conj();
                h[(r, c)] -= sub;
            }
        }
        // Q <- Q P
        for r in 0..n {
            let mut dot = ZERO;
            for (i, c) in (k + 1..n).enumerate() {
                dot += q[(r, c)] * v[i];
            }
            dot *= beta;
            for (i, c) in (k + 1..n).enumerate() {
                let sub = dot * v[i].conj();
                q[(r, c)] -= sub;
            }
        }
        for r in k + 2..n {
            h[(r, k)] = ZERO;
        }
        h[(k + 1, k)] = alpha;
    }
    (h, q)
}

fn subdiag_negligible(h: &ComplexMatrix, i: usize) -> bool {
    let s = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
    let s = if s == 0.0 { h.frobenius_norm() } else { s };
    h[(i, i - 1)].norm() <= f64::EPSILON * s
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit-shift QR step on the window lo..=hi of a Hessenberg
/// matrix, with similarity accumulated into q.
fn qr_step(
    h: &mut ComplexMatrix,
    q: &mut ComplexMatrix,
    lo: usize,
    hi: usize,
    shift: Complex64,
    n: usize,
) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        // rows k, k+1, columns k..n
        for col in k..n {
            let a = h[(k, col)];
            let b = h[(k + 1, col)];
            h[(k, col)] = c * a + s.conj() * b;
            h[(k + 1, col)] = -s * a + c * b;
        }
        rots.push((c, s));
    }
    for (k, (c, s)) in rots.into_iter().enumerate() {
        let k = lo + k;
        // columns k, k+1, rows 0..=min(k+1, hi) plus everything above
        let rmax = (k + 1).min(hi);
        for row in 0..=rmax {
            let a = h[(row, k)];
            let b = h[(row, k + 1)];
            h[(row, k)] = c * a + s * b;
            h[(row, k + 1)] = -s.conj() * a + c * b;
        }
        for row in 0..n {
            let a = q[(row, k)];
            let b = q[(row, k + 1)];
            q[(row, k)] = c * a + s * b;
            q[(row, k + 1)] = -s.conj() * a + c * b;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Givens rotation with real cosine: [c, conj(s); -s, c] * [a; b] = [r; 0].
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if a == ZERO {
        return (0.0, b.conj() / b.norm());
    }
    let c = a.norm() / norm;
    let phase = a / a.norm();
    let s = phase.conj() * b / norm;
    (c, s)
}

/// Swap diagonal entries k and k+1 of an upper-triangular t by a 2x2
/// unitary similarity, updating t and q in place.
fn swap_adjacent(
    t: &mut ComplexMatrix,
    q: &mut ComplexMatrix,
    k: usize,
    scale: f64,
) -> Result<()> {
    let n = t.rows();
    let t11 = t[(k, k)];
    let t12 = t[(k, k + 1)];
    let t22 = t[(k + 1, k + 1)];
    // eigenvector of [[t11, t12], [0, t22]] for eigenvalue t22
    let v1 = t12;
    let v2 = t22 - t11;
    let vnorm = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
    if vnorm == 0.0 {
        return Ok(()); // equal diagonal, nothing to move
    }
    let c1 = v1 / vnorm;
    let c2 = v2 / vnorm;
    // unitary Z = [[c1, -conj(c2)], [c2, conj(c1)]]; apply Z^* T Z
    // columns k, k+1
    for row in 0..n {
        let a = t[(row, k)];
        let b = t[(row, k + 1)];
        t[(row, k)] = a * c1 + b * c2;
        t[(row, k + 1)] = -a * c2.conj() + b * c1.conj();
    }
    // rows k, k+1
    for col in 0..n {
        let a = t[(k, col)];
        let b = t[(k + 1, col)];
        t[(k, col)] = c1.conj() * a + c2.conj() * b;
        t[(k + 1, col)] = -c2 * a + c1 * b;
    }
    for row in 0..n {
        let a = q[(row, k)];
        let b = q[(row, k + 1)];
        q[(row, k)] = a * c1 + b * c2;
        q[(row, k + 1)] = -a * c2.conj() + b * c1.conj();
    }
    let residual = t[(k + 1, k)].norm();
    if residual > 1e-8 * scale {
        return Err(Error::IllConditionedSwap { residual });
    }
    t[(k + 1, k)] = ZERO;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_schur_valid(a: &ComplexMatrix, f: &SchurForm, tol: f64) {
        let n = a.rows();
        let qhq = f.q.conj_transpose().mul(&f.q);
        assert!(
            qhq.sub(&ComplexMatrix::identity(n)).frobenius_norm() < tol * n as f64,
            "q not unitary"
        );
        for r in 0..n {
            for col in 0..r {
                assert!(f.t[(r, col)].norm() < tol * f.t.frobenius_norm().max(1.0));
            }
        }
        let rec = f.reconstruct();
        assert!(
            rec.sub(a).frobenius_norm() < tol * a.frobenius_norm().max(1.0),
            "reconstruction residual {}",
            rec.sub(a).frobenius_norm()
        );
    }

    #[test]
    fn diagonal_input_is_exact() {
        let a = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(-1.0, 2.0), c(0.5, 0.0)]);
        let f = schur(&a).unwrap();
        assert_eq!(f.t, a);
        assert_eq!(f.q, ComplexMatrix::identity(3));
    }

    #[test]
    fn eigenvalues_of_antidiagonal() {
        // characteristic polynomial lambda^2 - 4
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 4.0, 1.0, 0.0]).unwrap();
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((ev[0] - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((ev[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_pure_imaginary_diag() {
        let a = ComplexMatrix::diagonal(&[c(0.0, 4.0), c(0.0, -4.0)]);
        let ev = eigenvalues(&a).unwrap();
        let mut mods: Vec<f64> = ev.iter().map(|z| z.im).collect();
        mods.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(mods, vec![-4.0, 4.0]);
    }

    #[test]
    fn random_matrices_reconstruct() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for n in [2usize, 3, 5, 8, 16] {
            for _ in 0..8 {
                let a = ComplexMatrix::from_fn(n, n, |_, _| {
                    c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let f = schur(&a).unwrap();
                assert_schur_valid(&a, &f, 1e-10);
            }
        }
    }

    #[test]
    fn real_random_matrices_reconstruct() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = ComplexMatrix::from_fn(6, 6, |_, _| c(rng.gen::<f64>() - 0.5, 0.0));
            let f = schur(&a).unwrap();
            assert_schur_valid(&a, &f, 1e-10);
        }
    }

    #[test]
    fn eigenvalues_match_characteristic_roots_small() {
        // companion matrix of lambda^3 - 6 lambda^2 + 11 lambda - 6 = (l-1)(l-2)(l-3)
        let a = ComplexMatrix::from_real(
            3,
            3,
            &[6.0, -11.0, 6.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn reorder_sorts_clusters() {
        let a = ComplexMatrix::diagonal(&[c(-2.0, 0.0), c(9.0, 0.0)]);
        let f = schur(&a).unwrap();
        // put 9 first
        let (g, ids) = reorder_with_layout(&f, &[1, 0]).unwrap();
        assert_eq!(ids, vec![0, 1]);
        assert!((g.t[(0, 0)] - c(9.0, 0.0)).norm() < 1e-12);
        assert!((g.t[(1, 1)] - c(-2.0, 0.0)).norm() < 1e-12);
        assert!(g.reconstruct().sub(&a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn reorder_single_cluster_is_identity() {
        let a = ComplexMatrix::diagonal(&[c(9.0, 0.0), c(-2.0, 0.0)]);
        let f = schur(&a).unwrap();
        let g = reorder(&f, &[0, 0]).unwrap();
        assert_eq!(g.t, f.t);
    }

    #[test]
    fn reorder_preserves_similarity_nontrivial() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = ComplexMatrix::from_fn(5, 5, |_, _| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let f = schur(&a).unwrap();
        let ids = vec![1, 0, 1, 0, 0];
        let (g, layout) = reorder_with_layout(&f, &ids).unwrap();
        assert_eq!(layout, vec![0, 0, 0, 1, 1]);
        assert!(g.reconstruct().sub(&a).frobenius_norm() < 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn sylvester_scalar_cases() {
        let tol = Tolerances::default();
        let t11 = ComplexMatrix::diagonal(&[c(1.0, 0.0)]);
        let t22 = ComplexMatrix::diagonal(&[c(-1.0, 0.0)]);
        let rhs = ComplexMatrix::diagonal(&[c(2.0, 0.0)]);
        let x = sylvester_triangular(&t11, &t22, &rhs, &tol).unwrap();
        assert!((x[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let t11 = ComplexMatrix::diagonal(&[c(3.0, 0.0)]);
        let t22 = ComplexMatrix::diagonal(&[c(0.0, -2f64.sqrt())]);
        let rhs = ComplexMatrix::zeros(1, 1);
        let x = sylvester_triangular(&t11, &t22, &rhs, &tol).unwrap();
        assert_eq!(x[(0, 0)], ZERO);
    }

    #[test]
    fn sylvester_block_case() {
        let tol = Tolerances::default();
        let t11 = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(2.0, 0.0)]);
        let t22 = ComplexMatrix::diagonal(&[c(-1.0, 0.0)]);
        let rhs = ComplexMatrix::from_real(2, 1, &[1.0, 3.0]).unwrap();
        let x = sylvester_triangular(&t11, &t22, &rhs, &tol).unwrap();
        assert!((x[(0, 0)] - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sylvester_detects_spectral_overlap() {
        let tol = Tolerances::default();
        let t11 = ComplexMatrix::diagonal(&[c(1.0, 0.0)]);
        let t22 = ComplexMatrix::diagonal(&[c(1.0, 0.0)]);
        let rhs = ComplexMatrix::diagonal(&[c(1.0, 0.0)]);
        assert!(matches!(
            sylvester_triangular(&t11, &t22, &rhs, &tol),
            Err(Error::SingularSylvester { .. })
        ));
    }

    #[test]
    fn sylvester_residual_random() {
        use rand::{Rng, SeedableRng};
        let tol = Tolerances::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut upper = |n: usize, offset: f64| {
            ComplexMatrix::from_fn(n, n, |r, col| {
                if r > col {
                    ZERO
                } else if r == col {
                    c(rng.gen::<f64>() + offset, rng.gen::<f64>())
                } else {
                    c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                }
            })
        };
        let t11 = upper(3, 4.0);
        let t22 = upper(4, -4.0);
        let rhs = ComplexMatrix::from_fn(3, 4, |_, _| c(rng.gen::<f64>() - 0.5, 0.0));
        let x = sylvester_triangular(&t11, &t22, &rhs, &tol).unwrap();
        let res = t11.mul(&x).sub(&x.mul(&t22)).sub(&rhs).frobenius_norm();
        let bound = tol.tol_eq
            * (t11.frobenius_norm() + t22.frobenius_norm())
            * x.frobenius_norm().max(1.0);
        assert!(res < bound, "residual {res} vs bound {bound}");
    }

    #[test]
    fn singular_value_ratio_flags_singularity() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(singular_value_ratio(&a).unwrap() < 1e-7);
        let b = ComplexMatrix::identity(3);
        assert!((singular_value_ratio(&b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convergence_budget_is_enforced() {
        // zero-dimensional and 1x1 degenerate cases terminate immediately
        let a = ComplexMatrix::diagonal(&[c(5.0, 0.0)]);
        let f = schur(&a).unwrap();
        assert_eq!(f.t[(0, 0)], c(5.0, 0.0));
    }
}
