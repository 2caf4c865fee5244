//! SU(2)-equivariant isometric embeddings of an irrep into a physical space.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::intrinsic::Code;
use crate::linalg::{null_space, CMat, C64, ZERO};
use crate::spaces::{build_space, PhysicalSpace, SpaceSpec};

/// Singular values below this count as kernel.
const KERNEL_TOL: f64 = 1e-9;

/// Upper bound on stored isometry entries (copies × dim × total_dim).
const MAX_FAMILY_ENTRIES: usize = 1 << 26;

/// The `m` canonical equivariant isometries `V ↪ H`.
#[derive(Debug, Clone)]
pub struct EmbeddingFamily {
    pub space: Arc<PhysicalSpace>,
    pub irrep_dim: usize,
    pub isometries: Vec<CMat>,
}

impl EmbeddingFamily {
    pub fn multiplicity(&self) -> usize {
        self.isometries.len()
    }

    /// U_z = Σ z_i U_i for a point of CP^{m−1}.
    ///
    /// A non-normalized `z` is rescaled to unit norm with a warning.
    pub fn at_point(&self, z: &[C64]) -> Result<CMat> {
        if z.len() != self.multiplicity() {
            return Err(Error::InvalidModuli(format!(
                "expected {} coordinates, got {}",
                self.multiplicity(),
                z.len()
            )));
        }
        let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-14 {
            return Err(Error::InvalidModuli("z = 0 is not a point of projective space".into()));
        }
        if (norm - 1.0).abs() > 1e-12 {
            log::warn!("moduli point has norm {norm}; renormalizing");
        }
        let mut u = CMat::zeros(self.space.total_dim(), self.irrep_dim);
        for (zi, ui) in z.iter().zip(&self.isometries) {
            u += ui * (zi / norm);
        }
        Ok(u)
    }

    /// The unique embedding when the multiplicity is one.
    pub fn unique(&self) -> Result<CMat> {
        match self.isometries.as_slice() {
            [u] => Ok(u.clone()),
            _ => Err(Error::InvalidModuli(format!(
                "embedding is not unique (multiplicity {})",
                self.multiplicity()
            ))),
        }
    }
}

/// Highest-weight vectors of every copy of irrep `dim`, as columns.
///
/// The kernel of `J+` inside the weight-`j` subspace is found by SVD; a
/// canonical orthonormal basis is then obtained by Gram-Schmidt over the
/// kernel projections of the weight-`j` basis vectors, taken in descending
/// basis-index order.
pub(crate) fn highest_weight_vectors(space: &PhysicalSpace, dim: usize) -> Result<Vec<Vec<(usize, C64)>>> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let tj = dim as i64 - 1;
    let weights = space.twice_weights();
    let cols: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] == tj).collect();
    let rows: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] == tj + 2).collect();
    if cols.is_empty() {
        return Ok(Vec::new());
    }
    let col_pos = |i: usize| cols.binary_search(&i).ok();
    let row_pos = |i: usize| rows.binary_search(&i).ok();
    let mut constraint = CMat::zeros(rows.len(), cols.len());
    for &(r, c, v) in &space.jplus().entries {
        if let (Some(rp), Some(cp)) = (row_pos(r), col_pos(c)) {
            constraint[(rp, cp)] += C64::new(v, 0.0);
        }
    }
    let kernel = if rows.is_empty() {
        CMat::identity(cols.len(), cols.len())
    } else {
        null_space(&constraint, KERNEL_TOL)
    };
    if kernel.ncols() == 0 {
        return Ok(Vec::new());
    }
    let projector = &kernel * kernel.adjoint();
    let mut basis: Vec<nalgebra::DVector<C64>> = Vec::new();
    for p in (0..cols.len()).rev() {
        if basis.len() == kernel.ncols() {
            break;
        }
        let mut v = projector.column(p).into_owned();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / C64::new(norm, 0.0));
        }
    }
    Ok(basis
        .into_iter()
        .map(|v| {
            cols.iter()
                .zip(v.iter())
                .map(|(&i, &x)| (i, x))
                .filter(|(_, x)| *x != ZERO)
                .collect()
        })
        .collect())
}

/// Generates the full copy `|k> ↦ J-^k v / ‖J-^k v‖` from a highest-weight vector.
pub(crate) fn lower_copy(space: &PhysicalSpace, dim: usize, top: &[(usize, C64)]) -> CMat {
    let total = space.total_dim();
    let mut u = CMat::zeros(total, dim);
    for &(i, x) in top {
        u[(i, 0)] = x;
    }
    let jminus = space.jminus();
    for k in 1..dim {
        let prev = u.column(k - 1).into_owned();
        let mut next = nalgebra::DVector::<C64>::zeros(total);
        for &(r, c, v) in &jminus.entries {
            next[r] += prev[c] * v;
        }
        let norm = next.norm();
        u.set_column(k, &(next / C64::new(norm, 0.0)));
    }
    u
}

/// All equivariant isometric embeddings of irrep `irrep_dim` into `space`.
pub fn embedding_family(space: Arc<PhysicalSpace>, irrep_dim: usize) -> Result<EmbeddingFamily> {
    let tops = highest_weight_vectors(&space, irrep_dim)?;
    if tops.is_empty() {
        return Err(Error::NoEmbedding(irrep_dim));
    }
    let entries = tops.len() * irrep_dim * space.total_dim();
    if entries > MAX_FAMILY_ENTRIES {
        return Err(Error::DenseLimit {
            dim: entries,
            limit: MAX_FAMILY_ENTRIES,
        });
    }
    let isometries = tops.iter().map(|t| lower_copy(&space, irrep_dim, t)).collect();
    Ok(EmbeddingFamily {
        space,
        irrep_dim,
        isometries,
    })
}

/// Pushes an intrinsic code forward: codewords `U·B` on `target`.
pub fn push_code(code: &Code, u: &CMat, target: Arc<PhysicalSpace>) -> Result<Code> {
    if u.ncols() != code.space().total_dim() || u.nrows() != target.total_dim() {
        return Err(Error::SpaceMismatch(format!(
            "embedding is {}x{}, code lives in dimension {} and target has dimension {}",
            u.nrows(),
            u.ncols(),
            code.space().total_dim(),
            target.total_dim()
        )));
    }
    Code::new(target, u * code.codewords())
}

/// Realizes an intrinsic irrep code on `spec` at moduli point `z`.
///
/// Without `z` the first canonical embedding is used.
pub fn realize(code: &Code, spec: &SpaceSpec, z: Option<&[C64]>) -> Result<Code> {
    let n = match code.space().spec() {
        SpaceSpec::Tensor(d) if d.len() == 1 => d[0],
        _ => {
            return Err(Error::Unsupported(
                "realization requires a code on a single irrep".into(),
            ))
        }
    };
    let target = Arc::new(build_space(spec)?);
    let family = embedding_family(Arc::clone(&target), n)?;
    let u = match z {
        Some(z) => family.at_point(z)?,
        None => family.isometries[0].clone(),
    };
    push_code(code, &u, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, isometry_residual};

    fn family(spec: SpaceSpec, n: usize) -> EmbeddingFamily {
        embedding_family(Arc::new(build_space(&spec).unwrap()), n).unwrap()
    }

    fn equivariance_residual(f: &EmbeddingFamily, u: &CMat) -> f64 {
        let v = crate::repcore::generators(f.irrep_dim).unwrap();
        let h = &f.space;
        let r1 = frobenius(&(u * &v.jplus - h.jplus_dense() * u));
        let r2 = frobenius(&(u * &v.jminus - h.jminus_dense() * u));
        let r3 = frobenius(&(u * &v.jz - h.jz_dense() * u));
        r1.max(r2).max(r3)
    }

    #[test]
    fn four_qubits_give_dicke_states() {
        let f = family(SpaceSpec::qubits(4), 5);
        assert_eq!(f.multiplicity(), 1);
        let u = f.unique().unwrap();
        for w in 0..5 {
            let count = (0..16u32).filter(|i| i.count_ones() as usize == w).count() as f64;
            for i in 0..16u32 {
                let want = if i.count_ones() as usize == w {
                    1.0 / count.sqrt()
                } else {
                    0.0
                };
                assert!((u[(i as usize, w)] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn two_qutrits_and_qubit_ququart() {
        let u = family(SpaceSpec::Tensor(vec![3, 3]), 5).unique().unwrap();
        let s6 = 6f64.sqrt();
        // |2> ↦ (|02> + 2|11> + |20>)/√6, indices 3a + b.
        for (i, want) in [(2, 1.0 / s6), (4, 2.0 / s6), (6, 1.0 / s6)] {
            assert!((u[(i, 2)] - C64::new(want, 0.0)).norm() < 1e-12);
        }
        let u = family(SpaceSpec::Tensor(vec![2, 4]), 5).unique().unwrap();
        // |1> ↦ (√3/2)|01> + (1/2)|10>, indices 4a + b.
        assert!((u[(1, 1)] - C64::new(3f64.sqrt() / 2.0, 0.0)).norm() < 1e-12);
        assert!((u[(4, 1)] - C64::new(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn six_qubits_have_five_orthogonal_copies() {
        let f = family(SpaceSpec::qubits(6), 5);
        assert_eq!(f.multiplicity(), 5);
        for (i, ui) in f.isometries.iter().enumerate() {
            assert!(equivariance_residual(&f, ui) < 1e-9);
            for (j, uj) in f.isometries.iter().enumerate() {
                let g = ui.adjoint() * uj;
                let want = if i == j {
                    CMat::identity(5, 5)
                } else {
                    CMat::zeros(5, 5)
                };
                assert!(frobenius(&(g - want)) < 1e-10);
            }
        }
    }

    #[test]
    fn at_point_handles_normalization() {
        let f = family(SpaceSpec::qubits(6), 5);
        let z: Vec<C64> = (0..5).map(|i| C64::new(1.0 + i as f64, -0.5 * i as f64)).collect();
        let u = f.at_point(&z).unwrap();
        assert!(isometry_residual(&u) < 1e-10);
        assert!(equivariance_residual(&f, &u) < 1e-9);
        assert!(f.at_point(&[ZERO; 5]).is_err());
        assert!(f.at_point(&[C64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn missing_irrep_is_an_error() {
        let s = Arc::new(build_space(&SpaceSpec::Tensor(vec![2, 2])).unwrap());
        assert!(matches!(embedding_family(s, 5), Err(Error::NoEmbedding(5))));
    }

    #[test]
    fn bosonic_manifold_embedding() {
        let f = family(SpaceSpec::Fock { excitation: 4, max: 8 }, 5);
        assert_eq!(f.multiplicity(), 1);
        let u = f.unique().unwrap();
        let labels = f.space.labels();
        for k in 0..5 {
            let col = u.column(k);
            let hit: Vec<usize> = (0..col.len()).filter(|&i| col[i].norm() > 1e-12).collect();
            assert_eq!(hit.len(), 1);
            assert_eq!(labels[hit[0]], vec![4 - k, k]);
            assert!((col[hit[0]] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
