//! Vector quaternions as scaled Pauli matrices, and the 6×6 Hermitian edge
//! matrices whose PSD-ness couples two sphere points with their inner product.
//!
//! For x = (a,b,c) the embedding is `M = [[-ci, -b-ai], [b-ai, ci]]`, which
//! is skew-Hermitian with `MᴴM = ‖x‖² Id`. The edge matrix for (x, x') and
//! auxiliaries (d,e,f,g) is
//!
//! ```text
//! [ Id    M     M' ]
//! [ Mᴴ    Id    D  ]      D = [[d-gi, -f-ei], [f-ei, d+gi]]
//! [ M'ᴴ   Dᴴ    Id ]
//! ```
//!
//! which equals `B Bᴴ` with `B = [Id; Mᴴ; M'ᴴ]` exactly when x and x' are unit
//! vectors and `D = MᴴM'`.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::sphere::{UnitVec3, Vec3};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Structural tolerance used by [`extract_from_matrix`].
pub const STRUCTURE_TOLERANCE: f64 = 1e-8;

/// Relative threshold below which an eigenvalue counts as zero.
pub const RANK_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbeddingError {
    #[error("edge matrix entry ({row},{col}) deviates from the expected structure by {deviation:e}")]
    MalformedEdgeMatrix { row: usize, col: usize, deviation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMat2(pub [[C64; 2]; 2]);

impl ComplexMat2 {
    pub fn adjoint(&self) -> ComplexMat2 {
        let m = &self.0;
        ComplexMat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn mul(&self, o: &ComplexMat2) -> ComplexMat2 {
        let (a, b) = (&self.0, &o.0);
        ComplexMat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }
}

/// Full storage of a 6×6 Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMat6([[C64; 6]; 6]);

impl HermitianMat6 {
    /// Symmetrizes `(m + mᴴ)/2`, so the result is exactly Hermitian.
    pub fn from_matrix(m: [[C64; 6]; 6]) -> Self {
        let mut h = m;
        for i in 0..6 {
            h[i][i] = C64::new(m[i][i].re, 0.0);
            for j in i + 1..6 {
                let v = (m[i][j] + m[j][i].conj()) * 0.5;
                h[i][j] = v;
                h[j][i] = v.conj();
            }
        }
        HermitianMat6(h)
    }

    /// Trusts the caller that `m` is already exactly Hermitian.
    pub(crate) fn from_hermitian_unchecked(m: [[C64; 6]; 6]) -> Self {
        HermitianMat6(m)
    }

    pub fn identity() -> Self {
        Self::from_diagonal([1.0; 6])
    }

    pub fn zeros() -> Self {
        HermitianMat6([[ZERO; 6]; 6])
    }

    pub fn from_diagonal(diag: [f64; 6]) -> Self {
        let mut m = [[ZERO; 6]; 6];
        for (i, d) in diag.into_iter().enumerate() {
            m[i][i] = C64::new(d, 0.0);
        }
        HermitianMat6(m)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn entries(&self) -> &[[C64; 6]; 6] {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        (0..6).map(|i| self.0[i][i].re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMat6(self.0.map(|row| row.map(|v| v * s)))
    }

    pub fn add(&self, o: &Self) -> Self {
        HermitianMat6(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + o.0[i][j])))
    }

    pub fn sub(&self, o: &Self) -> Self {
        HermitianMat6(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - o.0[i][j])))
    }

    /// Real Frobenius inner product `Re tr(AᴴB)`.
    pub fn inner(&self, o: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                s += (self.0[i][j].conj() * o.0[i][j]).re;
            }
        }
        s
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Auxiliary edge variables of the relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeAux {
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl EdgeAux {
    pub const ZERO: EdgeAux = EdgeAux { d: 0.0, e: 0.0, f: 0.0, g: 0.0 };

    pub fn as_array(&self) -> [f64; 4] {
        [self.d, self.e, self.f, self.g]
    }

    pub fn from_array([d, e, f, g]: [f64; 4]) -> Self {
        EdgeAux { d, e, f, g }
    }
}

pub fn pauli_embed(x: &Vec3) -> ComplexMat2 {
    let [a, b, c] = x.0;
    ComplexMat2([
        [C64::new(0.0, -c), C64::new(-b, -a)],
        [C64::new(b, -a), C64::new(0.0, c)],
    ])
}

/// `Mᴴ(x) M(x')`, whose trace is `2 x·x'`.
pub fn edge_gram(x: &Vec3, xp: &Vec3) -> ComplexMat2 {
    pauli_embed(x).adjoint().mul(&pauli_embed(xp))
}

/// The auxiliaries that make the edge matrix rank 2: `d = x·x'` and
/// `(e, f, g) = x' × x`.
pub fn exact_edge_params(x: &UnitVec3, xp: &UnitVec3) -> EdgeAux {
    exact_edge_params_vec(&x.vec(), &xp.vec())
}

pub(crate) fn exact_edge_params_vec(x: &Vec3, xp: &Vec3) -> EdgeAux {
    let [a, b, c] = x.0;
    let [ap, bp, cp] = xp.0;
    EdgeAux {
        d: a * ap + b * bp + c * cp,
        e: bp * c - b * cp,
        f: a * cp - ap * c,
        g: ap * b - a * bp,
    }
}

/// The upper-triangle entries of the edge matrix that depend on parameters.
/// Everything else is fixed: unit diagonal, zeros at (0,1), (2,3), (4,5).
fn structured_upper(x: &Vec3, xp: &Vec3, aux: &EdgeAux) -> [(usize, usize, C64); 12] {
    let [a, b, c] = x.0;
    let [ap, bp, cp] = xp.0;
    let EdgeAux { d, e, f, g } = *aux;
    [
        (0, 2, C64::new(0.0, -c)),
        (0, 3, C64::new(-b, -a)),
        (1, 2, C64::new(b, -a)),
        (1, 3, C64::new(0.0, c)),
        (0, 4, C64::new(0.0, -cp)),
        (0, 5, C64::new(-bp, -ap)),
        (1, 4, C64::new(bp, -ap)),
        (1, 5, C64::new(0.0, cp)),
        (2, 4, C64::new(d, -g)),
        (2, 5, C64::new(-f, -e)),
        (3, 4, C64::new(f, -e)),
        (3, 5, C64::new(d, g)),
    ]
}

pub fn build_edge_matrix(x: &Vec3, xp: &Vec3, aux: &EdgeAux) -> HermitianMat6 {
    let mut m = [[ZERO; 6]; 6];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    for (i, j, v) in structured_upper(x, xp, aux) {
        m[i][j] = v;
        m[j][i] = v.conj();
    }
    HermitianMat6::from_hermitian_unchecked(m)
}

/// Reads `(x, x', aux)` back out of a matrix with the edge-matrix structure.
///
/// Each parameter appears twice in the upper triangle; both occurrences must
/// agree to [`STRUCTURE_TOLERANCE`], as must the fixed entries.
pub fn extract_from_matrix(h: &HermitianMat6) -> Result<(Vec3, Vec3, EdgeAux), EmbeddingError> {
    let p = |i: usize, j: usize| h.get(i, j);
    let x = Vec3::new(-p(0, 3).im, -p(0, 3).re, -p(0, 2).im);
    let xp = Vec3::new(-p(0, 5).im, -p(0, 5).re, -p(0, 4).im);
    let aux = EdgeAux { d: p(2, 4).re, e: -p(2, 5).im, f: -p(2, 5).re, g: -p(2, 4).im };

    let expected = build_edge_matrix(&x, &xp, &aux);
    for i in 0..6 {
        for j in 0..6 {
            let deviation = (h.get(i, j) - expected.get(i, j)).norm();
            if deviation > STRUCTURE_TOLERANCE {
                return Err(EmbeddingError::MalformedEdgeMatrix { row: i, col: j, deviation });
            }
        }
    }
    Ok((x, xp, aux))
}

/// Exact check of `Mᴴ = -M`.
pub fn is_skew_hermitian(m: &ComplexMat2) -> bool {
    let adj = m.adjoint();
    (0..2).all(|i| (0..2).all(|j| adj.0[i][j] == -m.0[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::eig_hermitian;
    use crate::sphere::normalize;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close2(a: &ComplexMat2, b: &ComplexMat2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a.0[i][j] - b.0[i][j]).norm() <= tol))
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(
            pauli_embed(&Vec3::new(0.0, 0.0, 1.0)),
            ComplexMat2([[c(0.0, -1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]])
        );
        let m = pauli_embed(&Vec3::new(1.0, 0.0, 0.0));
        assert!(close2(&m, &ComplexMat2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, -1.0), c(0.0, 0.0)]]), 0.0));
        let m = pauli_embed(&Vec3::new(0.0, 1.0, 0.0));
        assert!(close2(&m, &ComplexMat2([[c(0.0, 0.0), c(-1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]), 0.0));
    }

    #[test]
    fn gram_examples() {
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        let e2 = Vec3::new(0.0, 1.0, 0.0);
        let id = ComplexMat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(close2(&edge_gram(&e1, &e1), &id, 0.0));
        let g = edge_gram(&e1, &e2);
        assert!(close2(&g, &ComplexMat2([[c(0.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]), 0.0));
        assert_eq!(g.trace().re, 0.0);
    }

    #[test]
    fn exact_params_examples() {
        let a = exact_edge_params(&UnitVec3::E1, &UnitVec3::E2);
        assert_eq!(a, EdgeAux { d: 0.0, e: 0.0, f: 0.0, g: -1.0 });
        let x = normalize(Vec3::new(0.3, -0.4, 0.2)).unwrap();
        let a = exact_edge_params(&x, &x);
        assert!((a.d - 1.0).abs() < 1e-15 && a.e.abs() < 1e-16 && a.f.abs() < 1e-16 && a.g.abs() < 1e-16);
    }

    #[test]
    fn exact_matrix_has_two_eigenvalues_three() {
        let x = UnitVec3::E3;
        let h = build_edge_matrix(&x.vec(), &x.vec(), &EdgeAux { d: 1.0, ..EdgeAux::ZERO });
        let eig = eig_hermitian(&h).unwrap();
        let want = [0.0, 0.0, 0.0, 0.0, 3.0, 3.0];
        for (l, w) in eig.eigenvalues.iter().zip(want) {
            assert!((l - w).abs() < 1e-10, "{:?}", eig.eigenvalues);
        }
    }

    #[test]
    fn wrong_aux_breaks_psd() {
        // x ⟂ x' needs g = -1; zero auxiliaries leave a negative eigenvalue.
        let h = build_edge_matrix(&Vec3::new(1.0, 0.0, 0.0), &Vec3::new(0.0, 1.0, 0.0), &EdgeAux::ZERO);
        let eig = eig_hermitian(&h).unwrap();
        assert!(eig.eigenvalues[0] < -0.1, "{:?}", eig.eigenvalues);
    }

    #[test]
    fn extract_identity_and_malformed() {
        let (x, xp, aux) = extract_from_matrix(&HermitianMat6::identity()).unwrap();
        assert_eq!((x, xp, aux), (Vec3::ZERO, Vec3::ZERO, EdgeAux::ZERO));

        let h = build_edge_matrix(&Vec3::new(0.1, 0.2, 0.3), &Vec3::new(-0.3, 0.5, 0.0), &EdgeAux::ZERO);
        let mut m = *h.entries();
        // Break the redundancy between (0,3) and (1,2), which both carry `a`.
        m[1][2] += c(0.0, 1e-3);
        m[2][1] = m[1][2].conj();
        let broken = HermitianMat6::from_matrix(m);
        assert!(matches!(
            extract_from_matrix(&broken),
            Err(EmbeddingError::MalformedEdgeMatrix { row: 1, col: 2, .. })
        ));

        let mut m = *HermitianMat6::identity().entries();
        m[4][4] = c(1.1, 0.0);
        assert!(extract_from_matrix(&HermitianMat6::from_matrix(m)).is_err());
    }

    #[test]
    fn from_matrix_symmetrizes() {
        let mut m = [[C64::new(0.0, 0.0); 6]; 6];
        m[0][1] = c(1.0, 2.0);
        m[0][0] = c(3.0, 5.0);
        let h = HermitianMat6::from_matrix(m);
        assert_eq!(h.get(0, 1), c(0.5, 1.0));
        assert_eq!(h.get(1, 0), c(0.5, -1.0));
        assert_eq!(h.get(0, 0), c(3.0, 0.0));
    }

    fn arb_vec() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-2.0f64..2.0).prop_map(Vec3)
    }

    fn arb_unit() -> impl Strategy<Value = UnitVec3> {
        arb_vec().prop_filter("nondegenerate", |v| v.norm() > 1e-3).prop_map(|v| normalize(v).unwrap())
    }

    fn arb_aux() -> impl Strategy<Value = EdgeAux> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(EdgeAux::from_array)
    }

    proptest! {
        #[test]
        fn embedding_identities(v in arb_vec(), w in arb_vec()) {
            let m = pauli_embed(&v);
            prop_assert!(is_skew_hermitian(&m));
            let mhm = m.adjoint().mul(&m);
            let n2 = v.norm_squared();
            prop_assert!((mhm.0[0][0] - c(n2, 0.0)).norm() <= 1e-14);
            prop_assert!((mhm.0[1][1] - c(n2, 0.0)).norm() <= 1e-14);
            prop_assert!(mhm.0[0][1].norm() <= 1e-14 && mhm.0[1][0].norm() <= 1e-14);
            prop_assert!((edge_gram(&v, &w).trace().re - 2.0 * v.dot(&w)).abs() <= 1e-14);
        }

        #[test]
        fn exact_aux_is_cross_product(x in arb_unit(), y in arb_unit()) {
            let a = exact_edge_params(&x, &y);
            let cr = y.vec().cross(&x.vec());
            prop_assert!((a.e - cr.0[0]).abs() <= 1e-14);
            prop_assert!((a.f - cr.0[1]).abs() <= 1e-14);
            prop_assert!((a.g - cr.0[2]).abs() <= 1e-14);
            let s = a.d * a.d + a.e * a.e + a.f * a.f + a.g * a.g;
            prop_assert!((s - 1.0).abs() <= 1e-14);
            prop_assert!((-1.0..=1.0).contains(&a.d));
        }

        #[test]
        fn exact_matrix_is_psd_rank_two(x in arb_unit(), y in arb_unit()) {
            let h = build_edge_matrix(&x.vec(), &y.vec(), &exact_edge_params(&x, &y));
            let eig = eig_hermitian(&h).unwrap();
            prop_assert!(eig.eigenvalues[0] >= -1e-10);
            let big = eig.eigenvalues.iter().filter(|&&l| l >= 1e-6).count();
            prop_assert_eq!(big, 2);
        }

        #[test]
        fn extract_round_trips(x in arb_vec(), y in arb_vec(), aux in arb_aux()) {
            let (x2, y2, aux2) = extract_from_matrix(&build_edge_matrix(&x, &y, &aux)).unwrap();
            prop_assert_eq!((x2, y2, aux2), (x, y, aux));
        }

        #[test]
        fn edge_matrix_is_affine(x in arb_vec(), y in arb_vec(), aux in arb_aux(),
                                 k in 0usize..10, h in 0.1f64..1.0) {
            // Second difference along any single parameter vanishes.
            let bump = |t: f64| {
                let mut p = [x.0[0], x.0[1], x.0[2], y.0[0], y.0[1], y.0[2], aux.d, aux.e, aux.f, aux.g];
                p[k] += t;
                build_edge_matrix(&Vec3([p[0], p[1], p[2]]), &Vec3([p[3], p[4], p[5]]),
                    &EdgeAux::from_array([p[6], p[7], p[8], p[9]]))
            };
            let second = bump(h).add(&bump(-h)).sub(&bump(0.0).scale(2.0));
            prop_assert!(second.max_abs() <= 1e-12);
        }
    }
}
