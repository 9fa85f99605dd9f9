//! Cyclic complex Jacobi eigensolver for 6×6 Hermitian matrices and the
//! Frobenius projection onto the PSD cone built on it.

// Rotations touch paired rows and columns, so index loops are clearer here.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::pauli::HermitianMat6;

pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal magnitudes below this fraction of ‖H‖_F count as converged.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-13;

const PHASE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition6 {
    /// Ascending.
    pub eigenvalues: [f64; 6],
    /// `eigenvectors[k]` pairs with `eigenvalues[k]`; each has its first
    /// non-negligible component real and positive.
    pub eigenvectors: [[C64; 6]; 6],
}

impl EigenDecomposition6 {
    /// `Σ f(λₖ) vₖvₖᴴ`, assembled as an exactly Hermitian matrix.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMat6 {
        let weights = self.eigenvalues.map(f);
        outer_sum(&weights, &self.eigenvectors, |_| true)
    }
}

fn outer_sum(
    weights: &[f64; 6],
    vectors: &[[C64; 6]; 6],
    keep: impl Fn(usize) -> bool,
) -> HermitianMat6 {
    let mut m = [[C64::new(0.0, 0.0); 6]; 6];
    for k in (0..6).filter(|&k| keep(k) && weights[k] != 0.0) {
        let v = &vectors[k];
        let w = weights[k];
        for i in 0..6 {
            let wi = v[i] * w;
            for j in i..6 {
                m[i][j] += wi * v[j].conj();
            }
        }
    }
    for i in 0..6 {
        m[i][i].im = 0.0;
        for j in i + 1..6 {
            m[j][i] = m[i][j].conj();
        }
    }
    HermitianMat6::from_hermitian_unchecked(m)
}

fn jacobi(h: &HermitianMat6, want_vectors: bool) -> Result<([f64; 6], [[C64; 6]; 6]), LinalgError> {
    let mut a = *h.entries();
    if a.iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let mut v = [[C64::new(0.0, 0.0); 6]; 6];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    let threshold = OFF_DIAGONAL_TOLERANCE * h.frobenius_norm();

    let off_max = |a: &[[C64; 6]; 6]| {
        let mut m = 0.0f64;
        for p in 0..6 {
            for q in p + 1..6 {
                m = m.max(a[p][q].norm());
            }
        }
        m
    };

    let mut sweeps = 0;
    loop {
        let off = off_max(&a);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps, off_diagonal: off });
        }
        sweeps += 1;
        for p in 0..5 {
            for q in p + 1..6 {
                let beta = a[p][q];
                let r = beta.norm();
                if r <= threshold {
                    continue;
                }
                let phase = beta / r;
                let theta = (a[q][q].re - a[p][p].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let se = phase * s;
                let se_conj = se.conj();

                // A ← A J with J = [[c, s·e], [-s·ē, c]] on (p, q).
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = akp * c - se_conj * akq;
                    row[q] = se * akp + akq * c;
                }
                // A ← Jᴴ A.
                for k in 0..6 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = apk * c - se * aqk;
                    a[q][k] = se_conj * apk + aqk * c;
                }
                a[p][q] = C64::new(0.0, 0.0);
                a[q][p] = C64::new(0.0, 0.0);
                a[p][p].im = 0.0;
                a[q][q].im = 0.0;

                if want_vectors {
                    for row in v.iter_mut() {
                        let (vkp, vkq) = (row[p], row[q]);
                        row[p] = vkp * c - se_conj * vkq;
                        row[q] = se * vkp + vkq * c;
                    }
                }
            }
        }
    }

    let mut order: [usize; 6] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[i][i].re.total_cmp(&a[j][j].re));
    let eigenvalues = order.map(|i| a[i][i].re);
    let eigenvectors = order.map(|col| {
        let mut vec: [C64; 6] = std::array::from_fn(|row| v[row][col]);
        if let Some(k) = vec.iter().position(|z| z.norm() > PHASE_THRESHOLD) {
            let rot = vec[k].conj() / vec[k].norm();
            for z in vec.iter_mut() {
                *z *= rot;
            }
            vec[k].im = 0.0;
        }
        vec
    });
    Ok((eigenvalues, eigenvectors))
}

pub fn eig_hermitian(h: &HermitianMat6) -> Result<EigenDecomposition6, LinalgError> {
    let (eigenvalues, eigenvectors) = jacobi(h, true)?;
    Ok(EigenDecomposition6 { eigenvalues, eigenvectors })
}

/// Ascending eigenvalues only.
pub fn eigenvalues(h: &HermitianMat6) -> Result<[f64; 6], LinalgError> {
    jacobi(h, false).map(|(l, _)| l)
}

pub fn min_eigenvalue(h: &HermitianMat6) -> Result<f64, LinalgError> {
    eigenvalues(h).map(|l| l[0])
}

/// Frobenius-nearest PSD matrix: negative eigenvalues are clamped to zero.
pub fn project_psd(h: &HermitianMat6) -> Result<HermitianMat6, LinalgError> {
    let eig = eig_hermitian(h)?;
    Ok(project_from_eig(h, &eig))
}

pub(crate) fn project_from_eig(h: &HermitianMat6, eig: &EigenDecomposition6) -> HermitianMat6 {
    let l = &eig.eigenvalues;
    let negatives = l.iter().filter(|&&x| x < 0.0).count();
    match negatives {
        0 => *h,
        6 => HermitianMat6::zeros(),
        // Sum over whichever part of the spectrum is smaller.
        n if n <= 3 => {
            let neg = outer_sum(l, &eig.eigenvectors, |k| l[k] < 0.0);
            h.sub(&neg)
        }
        _ => outer_sum(l, &eig.eigenvectors, |k| l[k] > 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(rng: &mut impl Rng, scale: f64) -> HermitianMat6 {
        let m: [[C64; 6]; 6] = std::array::from_fn(|_| {
            std::array::from_fn(|_| C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        });
        HermitianMat6::from_matrix(m)
    }

    fn random_psd(rng: &mut impl Rng) -> HermitianMat6 {
        let h = random_hermitian(rng, 1.0);
        let eig = eig_hermitian(&h).unwrap();
        eig.reconstruct_with(|l| l.abs())
    }

    #[test]
    fn diagonal_input() {
        let h = HermitianMat6::from_diagonal([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let eig = eig_hermitian(&h).unwrap();
        assert_eq!(eig.eigenvalues, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        for (k, v) in eig.eigenvectors.iter().enumerate() {
            for (i, z) in v.iter().enumerate() {
                assert_eq!(*z, C64::new(if i == k { 1.0 } else { 0.0 }, 0.0));
            }
        }
        let eig = eig_hermitian(&HermitianMat6::identity()).unwrap();
        assert_eq!(eig.eigenvalues, [1.0; 6]);
    }

    #[test]
    fn reconstruction_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let h = random_hermitian(&mut rng, 1.0);
            let eig = eig_hermitian(&h).unwrap();
            let back = eig.reconstruct_with(|l| l);
            assert!(back.sub(&h).max_abs() <= 1e-10);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            assert!((eig.eigenvalues.iter().sum::<f64>() - h.trace()).abs() <= 1e-10);
            let hn = h.frobenius_norm();
            for (k, v) in eig.eigenvectors.iter().enumerate() {
                for i in 0..6 {
                    let hv: C64 = (0..6).map(|j| h.get(i, j) * v[j]).sum();
                    assert!((hv - v[i] * eig.eigenvalues[k]).norm() <= 1e-10 * hn);
                }
                for (l, w) in eig.eigenvectors.iter().enumerate() {
                    let ip: C64 = (0..6).map(|i| v[i].conj() * w[i]).sum();
                    let want = if k == l { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(want, 0.0)).norm() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn deterministic_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(&mut rng, 1.0);
        let a = eig_hermitian(&h).unwrap();
        let b = eig_hermitian(&h).unwrap();
        assert_eq!(a, b);
        for v in &a.eigenvectors {
            let lead = v.iter().find(|z| z.norm() > PHASE_THRESHOLD).unwrap();
            assert!(lead.re > 0.0 && lead.im == 0.0);
        }
    }

    #[test]
    fn projection_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let q = random_psd(&mut rng);
        assert!(project_psd(&q).unwrap().sub(&q).max_abs() <= 1e-10);

        let neg = HermitianMat6::identity().scale(-1.0);
        assert_eq!(project_psd(&neg).unwrap(), HermitianMat6::zeros());

        let d = HermitianMat6::from_diagonal([2.0, -3.0, 1.0, 0.0, -1.0, 5.0]);
        let p = project_psd(&d).unwrap();
        assert!(p.sub(&HermitianMat6::from_diagonal([2.0, 0.0, 1.0, 0.0, 0.0, 5.0])).max_abs() <= 1e-15);
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert_eq!(min_eigenvalue(&HermitianMat6::identity()).unwrap(), 1.0);
        let d = HermitianMat6::from_diagonal([-2.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(min_eigenvalue(&d).unwrap(), -2.0);
    }

    #[test]
    fn projection_is_metric_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..300 {
            let h = random_hermitian(&mut rng, 2.0);
            let p = project_psd(&h).unwrap();
            assert!(project_psd(&p).unwrap().sub(&p).max_abs() <= 1e-9);
            assert!(min_eigenvalue(&p).unwrap() >= -1e-12);
            let q = random_psd(&mut rng);
            let vi = h.sub(&p).inner(&q.sub(&p));
            assert!(vi <= 1e-8, "variational inequality violated: {vi}");
            assert!(h.sub(&p).frobenius_norm() <= h.sub(&q).frobenius_norm() + 1e-8);
        }
    }

    #[test]
    fn zero_matrix() {
        let eig = eig_hermitian(&HermitianMat6::zeros()).unwrap();
        assert_eq!(eig.eigenvalues, [0.0; 6]);
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = *HermitianMat6::identity().entries();
        m[2][2] = C64::new(f64::NAN, 0.0);
        let h = HermitianMat6::from_matrix(m);
        assert_eq!(eig_hermitian(&h), Err(LinalgError::NonFinite));
    }
}
