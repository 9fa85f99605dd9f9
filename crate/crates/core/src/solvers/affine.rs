use crate::graph::Problem;
use crate::pauli::{build_edge_matrix, EdgeAux, HermitianMat6};
use crate::sphere::Vec3;

/// Where an edge endpoint's coordinates come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointSlot {
    /// Three consecutive optimization variables starting at this offset.
    Var(usize),
    /// A pinned node: its datum is substituted as a constant.
    Const(Vec3),
}

/// The stacked affine map `z ↦ (A_e(z))_e = (C_e + Σᵢ zᵢ B_{e,i})_e` from the
/// optimization variables to the per-edge Hermitian matrices.
///
/// Variables are laid out as three coordinates per free node that has at
/// least one edge, followed by `(d, e, f, g)` per edge.
#[derive(Debug, Clone)]
pub struct AffineMap {
    num_vars: usize,
    slots: Vec<Option<EndpointSlot>>,
    aux_offset: usize,
    endpoints: Vec<(usize, usize)>,
    constants: Vec<HermitianMat6>,
    coefficients: Vec<Vec<(usize, HermitianMat6)>>,
    column_norms_sq: Vec<f64>,
    norm_bound: f64,
}

const POWER_ITERATIONS: usize = 50;
const NORM_SAFETY: f64 = 1.01;

impl AffineMap {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_edges(&self) -> usize {
        self.constants.len()
    }

    /// Slot of node `i`; `None` for free nodes without edges, which do not
    /// enter any constraint.
    pub fn slot(&self, i: usize) -> Option<EndpointSlot> {
        self.slots[i]
    }

    pub fn aux_index(&self, e: usize) -> usize {
        self.aux_offset + 4 * e
    }

    pub fn constant(&self, e: usize) -> &HermitianMat6 {
        &self.constants[e]
    }

    /// `(variable index, B_{e,i})` for every variable entering edge `e`.
    pub fn coefficients(&self, e: usize) -> &[(usize, HermitianMat6)] {
        &self.coefficients[e]
    }

    /// Upper bound on the operator norm of the stacked map.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Diagonal of `A*A`: squared norm of each variable's column.
    pub fn column_norms_sq(&self) -> &[f64] {
        &self.column_norms_sq
    }

    pub fn node_value(&self, i: usize, z: &[f64]) -> Option<Vec3> {
        self.slots[i].map(|slot| match slot {
            EndpointSlot::Var(k) => Vec3([z[k], z[k + 1], z[k + 2]]),
            EndpointSlot::Const(y) => y,
        })
    }

    pub fn aux_value(&self, e: usize, z: &[f64]) -> EdgeAux {
        let k = self.aux_index(e);
        EdgeAux::from_array([z[k], z[k + 1], z[k + 2], z[k + 3]])
    }

    /// `A_e(z)`.
    pub fn apply(&self, e: usize, z: &[f64]) -> HermitianMat6 {
        let mut m = *self.constants[e].entries();
        for (k, b) in &self.coefficients[e] {
            let zk = z[*k];
            if zk == 0.0 {
                continue;
            }
            for (row, brow) in m.iter_mut().zip(b.entries()) {
                for (v, bv) in row.iter_mut().zip(brow) {
                    *v += bv * zk;
                }
            }
        }
        HermitianMat6::from_hermitian_unchecked(m)
    }

    /// Adds `A_e*(Y) = (Re⟨B_{e,i}, Y⟩)ᵢ` into `out`.
    pub fn adjoint_add(&self, e: usize, y: &HermitianMat6, out: &mut [f64]) {
        for (k, b) in &self.coefficients[e] {
            out[*k] += b.inner(y);
        }
    }

    /// The same matrix as [`AffineMap::apply`], assembled directly from the
    /// edge-matrix parametrization.
    pub fn assemble_direct(&self, e: usize, z: &[f64]) -> HermitianMat6 {
        let (u, v) = self.endpoints[e];
        let xu = self.node_value(u, z).expect("edge endpoints have slots");
        let xv = self.node_value(v, z).expect("edge endpoints have slots");
        build_edge_matrix(&xu, &xv, &self.aux_value(e, z))
    }

    fn apply_all_adjoint(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_vars];
        for e in 0..self.num_edges() {
            let linear = self.apply(e, z).sub(&self.constants[e]);
            self.adjoint_add(e, &linear, &mut out);
        }
        out
    }
}

/// Builds the affine constraint map of the relaxation for `problem`.
///
/// The operator-norm bound is estimated by power iteration on `A*A` and
/// inflated by 1%.
pub fn assemble_affine_map(problem: &Problem) -> AffineMap {
    let n = problem.num_nodes();
    let mut slots = vec![None; n];
    let mut next = 0;
    for (i, slot) in slots.iter_mut().enumerate() {
        if problem.is_fixed(i) {
            *slot = Some(EndpointSlot::Const(problem.datum(i).expect("fixed nodes carry data").vec()));
        } else if !problem.incident(i).is_empty() {
            *slot = Some(EndpointSlot::Var(next));
            next += 3;
        }
    }
    let aux_offset = next;
    let num_edges = problem.num_edges();
    let num_vars = aux_offset + 4 * num_edges;
    let endpoints: Vec<_> = (0..num_edges).map(|e| problem.endpoints(e)).collect();

    let zero = vec![0.0; num_vars];
    let mut map = AffineMap {
        num_vars,
        slots,
        aux_offset,
        endpoints,
        constants: Vec::with_capacity(num_edges),
        coefficients: Vec::with_capacity(num_edges),
        column_norms_sq: vec![0.0; num_vars],
        norm_bound: 0.0,
    };

    for e in 0..num_edges {
        let constant = map.assemble_direct(e, &zero);
        let (u, v) = map.endpoints[e];
        let mut vars: Vec<usize> = Vec::with_capacity(10);
        for node in [u, v] {
            if let Some(EndpointSlot::Var(k)) = map.slots[node] {
                vars.extend(k..k + 3);
            }
        }
        vars.extend(map.aux_index(e)..map.aux_index(e) + 4);
        let mut unit = zero.clone();
        let coefficients = vars
            .into_iter()
            .map(|k| {
                unit[k] = 1.0;
                let b = map.assemble_direct(e, &unit).sub(&constant);
                unit[k] = 0.0;
                map.column_norms_sq[k] += b.inner(&b);
                (k, b)
            })
            .collect();
        map.constants.push(constant);
        map.coefficients.push(coefficients);
    }

    let mut v = vec![1.0; num_vars];
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let w = map.apply_all_adjoint(&v);
        estimate = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        v = w;
    }
    map.norm_bound = NORM_SAFETY * estimate.max(0.0).sqrt();
    map
}
