//! Orthonormal operator bases of the isotypic components of L(H).
//!
//! The space is first split into irrep copies `|r, m>` (a unitary change of
//! basis). For every ordered pair of copies `(r, s)` the spherical tensor
//! operators
//!
//! ```text
//! T^L_M(r, s) = N Σ_m <j_s m; L M | j_r m+M> |r, m+M><s, m|
//! ```
//!
//! span the spin-L content of `Hom(copy s, copy r)`. Operators are stored
//! sparsely in copy coordinates and only densified on request.

use std::sync::Arc;

use crate::embed::{highest_weight_vectors, lower_copy};
use crate::error::Result;
use crate::linalg::{CMat, C64, ZERO};
use crate::repcore::cg_twice;
use crate::spaces::{decompose, PhysicalSpace};

/// One irrep copy inside the decomposition basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IrrepCopy {
    pub dim: usize,
    /// First column of the copy in [`Decomposition::basis`].
    pub offset: usize,
}

impl IrrepCopy {
    fn twice_j(&self) -> i64 {
        self.dim as i64 - 1
    }
}

/// A unitary whose columns are the standard bases of all irrep copies,
/// ordered by decreasing irrep dimension.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub total_dim: usize,
    pub basis: CMat,
    pub copies: Vec<IrrepCopy>,
}

pub fn decomposition(space: &PhysicalSpace) -> Result<Decomposition> {
    space.check_dense()?;
    let total = space.total_dim();
    let mut basis = CMat::zeros(total, total);
    let mut copies = Vec::new();
    let mut offset = 0;
    for (dim, _) in decompose(space) {
        for top in highest_weight_vectors(space, dim)? {
            let u = lower_copy(space, dim, &top);
            basis.view_mut((0, offset), (total, dim)).copy_from(&u);
            copies.push(IrrepCopy { dim, offset });
            offset += dim;
        }
    }
    debug_assert_eq!(offset, total);
    Ok(Decomposition {
        total_dim: total,
        basis,
        copies,
    })
}

impl Decomposition {
    /// Copy coordinates `Q†B` of vectors given in the physical basis.
    pub fn coordinates(&self, vectors: &CMat) -> CMat {
        self.basis.adjoint() * vectors
    }
}

/// One basis operator of a sector, in copy coordinates.
#[derive(Debug, Clone)]
pub struct SectorOp {
    pub left: usize,
    pub right: usize,
    /// Weight component M (J_z commutator eigenvalue).
    pub m: i64,
    pub entries: Vec<(usize, usize, f64)>,
}

/// Orthonormal basis of the spin-L isotypic component of L(H).
///
/// Operators are grouped by copy pair `(left, right)` in lexicographic order,
/// each group listing `M = L, L−1, …, −L`.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub l: usize,
    pub decomposition: Arc<Decomposition>,
    pub ops: Vec<SectorOp>,
}

impl SectorBasis {
    pub fn sector_dim(&self) -> usize {
        2 * self.l + 1
    }

    pub fn multiplicity(&self) -> usize {
        self.ops.len() / self.sector_dim()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// The `i`-th operator as a dense matrix on the physical space.
    pub fn dense(&self, i: usize) -> CMat {
        let n = self.decomposition.total_dim;
        let mut local = CMat::zeros(n, n);
        for &(r, c, v) in &self.ops[i].entries {
            local[(r, c)] += C64::new(v, 0.0);
        }
        let q = &self.decomposition.basis;
        q * local * q.adjoint()
    }

    /// `B† F_i B` given copy coordinates `p = Q†B`.
    pub fn compress(&self, i: usize, p: &CMat) -> CMat {
        let k = p.ncols();
        let mut out = CMat::zeros(k, k);
        for &(r, c, v) in &self.ops[i].entries {
            for a in 0..k {
                let left = p[(r, a)].conj() * v;
                if left == ZERO {
                    continue;
                }
                for b in 0..k {
                    out[(a, b)] += left * p[(c, b)];
                }
            }
        }
        out
    }
}

/// Spin-L sector basis of L(H) for an already decomposed space.
pub fn sector_basis_with(decomposition: &Arc<Decomposition>, l: usize) -> SectorBasis {
    let tl = 2 * l as i64;
    let mut ops = Vec::new();
    for (r, left) in decomposition.copies.iter().enumerate() {
        for (s, right) in decomposition.copies.iter().enumerate() {
            let (tjr, tjs) = (left.twice_j(), right.twice_j());
            if tl < (tjr - tjs).abs() || tl > tjr + tjs || (tjr + tjs + tl) % 2 != 0 {
                continue;
            }
            for m in (-(l as i64)..=l as i64).rev() {
                let mut entries = Vec::new();
                for tms in (-tjs..=tjs).step_by(2) {
                    let tmr = tms + 2 * m;
                    if tmr.abs() > tjr {
                        continue;
                    }
                    let coef = cg_twice(tjs, tms, tl, 2 * m, tjr, tmr);
                    if coef != 0.0 {
                        let row = left.offset + ((tjr - tmr) / 2) as usize;
                        let col = right.offset + ((tjs - tms) / 2) as usize;
                        entries.push((row, col, coef));
                    }
                }
                let norm = entries.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt();
                for e in &mut entries {
                    e.2 /= norm;
                }
                ops.push(SectorOp {
                    left: r,
                    right: s,
                    m,
                    entries,
                });
            }
        }
    }
    SectorBasis {
        l,
        decomposition: Arc::clone(decomposition),
        ops,
    }
}

/// Spin-L sector basis of L(H) (empty when no copy pair couples to L).
pub fn sector_basis(space: &PhysicalSpace, l: usize) -> Result<SectorBasis> {
    let decomposition = Arc::new(decomposition(space)?);
    Ok(sector_basis_with(&decomposition, l))
}

/// Perturbative order of the irrep of dimension `sector_dim`: the smallest
/// tensor power of the adjoint containing it. `None` means it never occurs.
pub fn ord(sector_dim: usize) -> Option<usize> {
    if sector_dim % 2 == 1 {
        Some((sector_dim - 1) / 2)
    } else {
        None
    }
}
