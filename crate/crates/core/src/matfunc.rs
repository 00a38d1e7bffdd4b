//! Generalized matrix sign functions and the principal matrix square
//! root, evaluated on the complex Schur form.
//!
//! The stems in scope take unit-modulus values and have all derivatives
//! equal to zero, so a diagonal block whose eigenvalues share one stem
//! value evaluates exactly to a scalar multiple of the identity; the
//! remaining blocks come from the Parlett recurrence with triangular
//! Sylvester solves.

use std::sync::Arc;

use num_complex::Complex64;

use crate::eigen;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::space::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues closer than this (relative to ||A||_F) share a cluster,
/// so that the computed eigenvalues of a defective block are treated as
/// one multiple eigenvalue.
const PROXIMITY_CLUSTER_TOL: f64 = 1e-4;

/// Stem values closer than this are treated as equal when merging
/// clusters.
const STEM_VALUE_MERGE_TOL: f64 = 1e-10;

/// Built-in generalized sign stems.
///
/// * `Sign1` — the half-plane sign extended by +1 on the punctured
///   imaginary axis,
/// * `Sign2` — -1 on the negative real axis, +1 everywhere else,
/// * `Sign3` — the unit-modulus direction conj(lambda)/|lambda|.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignKind {
    Sign1,
    Sign2,
    Sign3,
}

impl SignKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignKind::Sign1 => "sign1",
            SignKind::Sign2 => "sign2",
            SignKind::Sign3 => "sign3",
        }
    }
}

pub type CustomStem = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A stem function selection: one of the built-ins or a custom map.
/// Custom stems must be unit-modulus, conjugation-respecting maps with
/// all derivatives zero; both properties are validated numerically on
/// every spectrum the stem is applied to.
#[derive(Clone)]
pub enum SignFunctionSpec {
    Builtin(SignKind),
    Custom { name: String, stem: CustomStem },
}

impl std::fmt::Debug for SignFunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignFunctionSpec::Builtin(k) => write!(f, "SignFunctionSpec::Builtin({k:?})"),
            SignFunctionSpec::Custom { name, .. } => {
                write!(f, "SignFunctionSpec::Custom({name})")
            }
        }
    }
}

impl SignFunctionSpec {
    pub fn sign1() -> Self {
        SignFunctionSpec::Builtin(SignKind::Sign1)
    }

    pub fn sign2() -> Self {
        SignFunctionSpec::Builtin(SignKind::Sign2)
    }

    pub fn sign3() -> Self {
        SignFunctionSpec::Builtin(SignKind::Sign3)
    }

    pub fn name(&self) -> &str {
        match self {
            SignFunctionSpec::Builtin(k) => k.as_str(),
            SignFunctionSpec::Custom { name, .. } => name,
        }
    }
}

/// Per-eigenvalue classification produced alongside the sign matrix.
#[derive(Clone, Copy, Debug)]
pub struct EigenClassification {
    pub value: Complex64,
    pub stem_value: Complex64,
    /// Distance from the eigenvalue to the nearest point where the stem
    /// is discontinuous (the defining axis, or the origin).
    pub discontinuity_distance: f64,
}

#[derive(Clone, Debug)]
pub struct SignResult {
    pub sigma: ComplexMatrix,
    pub classification: Vec<EigenClassification>,
}

/// Order in which eigenvalue clusters are laid out on the diagonal.
/// `Reversed` exists to exercise uniqueness under a permuted Schur
/// ordering; both orders must produce the same function value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClusterOrder {
    FirstAppearance,
    Reversed,
}

/// Stem value at a scalar eigenvalue. Uses an absolute zero band of
/// `tol_class` around the origin.
pub fn stem_value(lambda: Complex64, spec: &SignFunctionSpec, tol: &Tolerances) -> Result<Complex64> {
    let class = classify(lambda, spec, tol.tol_class, tol)?;
    Ok(class.stem_value)
}

fn classify(
    lambda: Complex64,
    spec: &SignFunctionSpec,
    zero_band: f64,
    tol: &Tolerances,
) -> Result<EigenClassification> {
    if lambda.norm() <= zero_band {
        return Err(Error::UndefinedAtZero { value: lambda });
    }
    let (stem, distance) = match spec {
        SignFunctionSpec::Builtin(SignKind::Sign1) => {
            let distance = lambda.re.abs();
            let stem = if lambda.re == 0.0 {
                ONE // punctured imaginary axis
            } else if distance <= zero_band {
                return Err(Error::NearDiscontinuity {
                    value: lambda,
                    distance,
                });
            } else if lambda.re > 0.0 {
                ONE
            } else {
                -ONE
            };
            (stem, distance)
        }
        SignFunctionSpec::Builtin(SignKind::Sign2) => {
            // distance to the closed negative real axis
            let distance = if lambda.re < 0.0 {
                lambda.im.abs()
            } else {
                lambda.norm()
            };
            let stem = if lambda.re < 0.0 && lambda.im == 0.0 {
                -ONE
            } else {
                ONE
            };
            (stem, distance)
        }
        SignFunctionSpec::Builtin(SignKind::Sign3) => {
            (lambda.conj() / lambda.norm(), lambda.norm())
        }
        SignFunctionSpec::Custom { stem, .. } => {
            let v = stem(lambda);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidStem {
                    property: "finiteness",
                    value: lambda,
                });
            }
            if (v.norm() - 1.0).abs() > tol.tol_eq {
                return Err(Error::InvalidStem {
                    property: "unit modulus",
                    value: lambda,
                });
            }
            let vc = stem(lambda.conj());
            if (vc - v.conj()).norm() > tol.tol_eq {
                return Err(Error::InvalidStem {
                    property: "conjugation symmetry",
                    value: lambda,
                });
            }
            (v, lambda.norm())
        }
    };
    Ok(EigenClassification {
        value: lambda,
        stem_value: stem,
        discontinuity_distance: distance,
    })
}

/// Snap near-real eigenvalues to the real axis. Computed spectra of
/// matrices with conjugation-symmetric spectrum carry rounding-level
/// imaginary parts that would otherwise straddle the Sign2 branch cut.
fn snap_spectrum(lambdas: &[Complex64], band: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = lambdas.to_vec();
    let mut used = vec![false; out.len()];
    for i in 0..out.len() {
        if used[i] {
            continue;
        }
        if out[i].im.abs() <= band {
            out[i] = Complex64::new(out[i].re, 0.0);
            used[i] = true;
            continue;
        }
        // pair with the closest conjugate partner, if one exists
        let target = out[i].conj();
        let mut best: Option<(usize, f64)> = None;
        for j in i + 1..out.len() {
            if used[j] {
                continue;
            }
            let d = (out[j] - target).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            if d <= band {
                let nu = (out[i] + out[j].conj()) / 2.0;
                out[i] = nu;
                out[j] = nu.conj();
                used[j] = true;
            }
        }
        used[i] = true;
    }
    out
}

struct Clustering {
    /// cluster id per diagonal position
    ids: Vec<usize>,
    /// representative stem value per cluster id
    values: Vec<Complex64>,
}

fn cluster_spectrum(
    lambdas: &[Complex64],
    spec: &SignFunctionSpec,
    scale: f64,
    tol: &Tolerances,
    order: ClusterOrder,
) -> Result<Clustering> {
    let n = lambdas.len();
    let prox = PROXIMITY_CLUSTER_TOL * scale;

    // union-find over eigenvalue proximity
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if (lambdas[i] - lambdas[j]).norm() <= prox {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }

    // stem value per proximity group, evaluated at the group mean so
    // that the split eigenvalues of a defective block average back to
    // the true eigenvalue
    let mut group_members: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        group_members.entry(r).or_default().push(i);
    }
    let zero_band = tol.tol_class * scale;
    let mut group_value: std::collections::BTreeMap<usize, Complex64> = Default::default();
    for (&root, members) in &group_members {
        let mean = members.iter().map(|&i| lambdas[i]).sum::<Complex64>()
            / members.len() as f64;
        let class = classify(mean, spec, zero_band, tol)?;
        let mut v = class.stem_value;
        if v.norm() > 0.0 {
            v /= v.norm();
        }
        group_value.insert(root, v);
    }

    // merge groups with equal stem values, assigning final ids in the
    // requested diagonal order
    let positions: Vec<usize> = match order {
        ClusterOrder::FirstAppearance => (0..n).collect(),
        ClusterOrder::Reversed => (0..n).rev().collect(),
    };
    let mut values: Vec<Complex64> = Vec::new();
    let mut group_id: std::collections::BTreeMap<usize, usize> = Default::default();
    let mut ids = vec![0usize; n];
    for &pos in &positions {
        let root = find(&mut parent, pos);
        let id = match group_id.get(&root) {
            Some(&id) => id,
            None => {
                let v = group_value[&root];
                let id = match values
                    .iter()
                    .position(|&u| (u - v).norm() <= STEM_VALUE_MERGE_TOL)
                {
                    Some(existing) => existing,
                    None => {
                        values.push(v);
                        values.len() - 1
                    }
                };
                group_id.insert(root, id);
                id
            }
        };
        ids[pos] = id;
    }
    Ok(Clustering { ids, values })
}

/// Evaluate a generalized sign function on a nonsingular matrix by the
/// Schur-Parlett block recurrence.
pub fn generalized_sign(
    a: &ComplexMatrix,
    spec: &SignFunctionSpec,
    tol: &Tolerances,
) -> Result<SignResult> {
    generalized_sign_with_order(a, spec, tol, ClusterOrder::FirstAppearance)
}

/// As `generalized_sign`, with an explicit cluster layout order. Both
/// orders must agree to rounding; tests use this to exercise uniqueness
/// under a permuted Schur ordering.
pub fn generalized_sign_with_order(
    a: &ComplexMatrix,
    spec: &SignFunctionSpec,
    tol: &Tolerances,
    order: ClusterOrder,
) -> Result<SignResult> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "sign function of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Err(Error::UndefinedAtZero { value: ZERO });
    }
    let form = eigen::schur(a)?;
    let lambdas = snap_spectrum(&form.t.diag(), tol.tol_class * scale);
    let zero_band = tol.tol_class * scale;
    let mut classification = Vec::with_capacity(n);
    for &l in &lambdas {
        classification.push(classify(l, spec, zero_band, tol)?);
    }
    let clustering = cluster_spectrum(&lambdas, spec, scale, tol, order)?;
    let (reordered, layout) = eigen::reorder_with_layout(&form, &clustering.ids)?;
    let f_t = parlett_block_function(&reordered.t, &layout, &clustering.values, tol)?;
    let sigma = reordered.q.mul(&f_t).mul(&reordered.q.conj_transpose());
    Ok(SignResult {
        sigma,
        classification,
    })
}

/// Evaluate a block-constant primary function on an upper-triangular t
/// whose diagonal is grouped into contiguous clusters (ascending ids in
/// `layout`), with value `values[id]` on cluster `id`.
fn parlett_block_function(
    t: &ComplexMatrix,
    layout: &[usize],
    values: &[Complex64],
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let n = t.rows();
    // block boundaries
    let mut blocks: Vec<(usize, usize, Complex64)> = Vec::new(); // [start, end)
    let mut start = 0usize;
    while start < n {
        let id = layout[start];
        let mut end = start;
        while end < n && layout[end] == id {
            end += 1;
        }
        blocks.push((start, end, values[id]));
        start = end;
    }

    let mut f = ComplexMatrix::zeros(n, n);
    for &(s, e, c) in &blocks {
        for i in s..e {
            f[(i, i)] = c;
        }
    }
    let nb = blocks.len();
    let sub = |m: &ComplexMatrix, (r0, r1): (usize, usize), (c0, c1): (usize, usize)| {
        ComplexMatrix::from_fn(r1 - r0, c1 - c0, |r, c| m[(r0 + r, c0 + c)])
    };
    for sep in 1..nb {
        for bi in 0..nb - sep {
            let bj = bi + sep;
            let (is, ie, ci) = blocks[bi];
            let (js, je, cj) = blocks[bj];
            // C = F_ii T_ij - T_ij F_jj + sum_k (F_ik T_kj - T_ik F_kj)
            let t_ij = sub(t, (is, ie), (js, je));
            let mut rhs = t_ij.scale(ci - cj);
            for &(ks, ke, _) in &blocks[bi + 1..bj] {
                let f_ik = sub(&f, (is, ie), (ks, ke));
                let t_kj = sub(t, (ks, ke), (js, je));
                let t_ik = sub(t, (is, ie), (ks, ke));
                let f_kj = sub(&f, (ks, ke), (js, je));
                rhs = rhs.add(&f_ik.mul(&t_kj)).sub(&t_ik.mul(&f_kj));
            }
            let t_ii = sub(t, (is, ie), (is, ie));
            let t_jj = sub(t, (js, je), (js, je));
            let x = eigen::sylvester_triangular(&t_ii, &t_jj, &rhs, tol)?;
            for r in 0..ie - is {
                for c in 0..je - js {
                    f[(is + r, js + c)] = x[(r, c)];
                }
            }
        }
    }
    Ok(f)
}

/// Principal square root of a matrix with no eigenvalues on the closed
/// negative real axis, by the triangular Schur recurrence.
pub fn principal_sqrt(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "square root of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Err(Error::UndefinedAtZero { value: ZERO });
    }
    let band = tol.tol_class * scale;
    let form = eigen::schur(a)?;
    for l in form.t.diag() {
        if l.norm() <= band {
            return Err(Error::UndefinedAtZero { value: l });
        }
        if l.re < 0.0 && l.im.abs() <= band {
            return Err(Error::NegativeRealEigenvalue { value: l });
        }
    }
    let t = &form.t;
    let mut u = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        u[(i, i)] = t[(i, i)].sqrt();
    }
    for sep in 1..n {
        for i in 0..n - sep {
            let j = i + sep;
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= u[(i, k)] * u[(k, j)];
            }
            u[(i, j)] = s / (u[(i, i)] + u[(j, j)]);
        }
    }
    Ok(form.q.mul(&u).mul(&form.q.conj_transpose()))
}
