//! Physical Hilbert spaces carrying a global SU(2) action.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{block_diag, kron, CMat, SparseOp, C64};
use crate::repcore::{lift, GroupElement};

/// Largest dimension for which dense operators on the space are built.
pub const DENSE_LIMIT: usize = 4096;

/// Largest dimension for which the sparse generators are built.
pub const SPARSE_LIMIT: usize = 1 << 20;

/// How a physical space is assembled from SU(2) irreps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceSpec {
    /// Tensor product of irreps with the listed local dimensions.
    Tensor(Vec<usize>),
    /// Direct sum of `(irrep dim, multiplicity)` blocks.
    Sum(Vec<(usize, usize)>),
    /// Two bosonic modes truncated to `n_a + n_b <= max`; `excitation` marks
    /// the fixed-N manifold of interest.
    Fock { excitation: usize, max: usize },
}

impl SpaceSpec {
    pub fn irrep(dim: usize) -> Self {
        SpaceSpec::Tensor(vec![dim])
    }

    pub fn qubits(n: usize) -> Self {
        SpaceSpec::Tensor(vec![2; n])
    }

    pub fn total_dim(&self) -> usize {
        match self {
            SpaceSpec::Tensor(dims) => dims.iter().product(),
            SpaceSpec::Sum(blocks) => blocks.iter().map(|(d, m)| d * m).sum(),
            SpaceSpec::Fock { max, .. } => (max + 1) * (max + 2) / 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::Tensor(dims) => {
                if dims.is_empty() || dims.contains(&0) {
                    return Err(Error::InvalidSpec(format!("tensor factors {dims:?}")));
                }
            }
            SpaceSpec::Sum(blocks) => {
                if blocks.is_empty() || blocks.iter().any(|&(d, m)| d == 0 || m == 0) {
                    return Err(Error::InvalidSpec(format!("direct sum blocks {blocks:?}")));
                }
            }
            SpaceSpec::Fock { excitation, max } => {
                if *max < excitation + 1 {
                    return Err(Error::TruncationTooSmall {
                        max: *max,
                        required: excitation + 1,
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Tensor(dims) => {
                let parts: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                write!(f, "{}", parts.join("x"))
            }
            SpaceSpec::Sum(blocks) => {
                let parts: Vec<String> = blocks.iter().map(|(d, m)| format!("{d}*{m}")).collect();
                write!(f, "sum:{}", parts.join("+"))
            }
            SpaceSpec::Fock { excitation, max } => write!(f, "fock:N={excitation},max={max}"),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    /// Grammar: `2x2x2x2` (tensor), `sum:5*3+13*1` (direct sum),
    /// `fock:N=4,max=8` (bosonic).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid space '{s}'"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let s = s.trim();
        let spec = if let Some(rest) = s.strip_prefix("sum:") {
            let blocks = rest
                .split('+')
                .map(|b| {
                    let (d, m) = b.split_once('*').ok_or_else(bad)?;
                    Ok((num(d)?, num(m)?))
                })
                .collect::<Result<Vec<_>>>()?;
            SpaceSpec::Sum(blocks)
        } else if let Some(rest) = s.strip_prefix("fock:") {
            let mut excitation = None;
            let mut max = None;
            for kv in rest.split(',') {
                let (k, v) = kv.split_once('=').ok_or_else(bad)?;
                match k.trim() {
                    "N" => excitation = Some(num(v)?),
                    "max" => max = Some(num(v)?),
                    _ => return Err(bad()),
                }
            }
            let excitation = excitation.ok_or_else(bad)?;
            SpaceSpec::Fock {
                excitation,
                max: max.unwrap_or(excitation + 4),
            }
        } else {
            SpaceSpec::Tensor(s.split('x').map(num).collect::<Result<Vec<_>>>()?)
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A finite-dimensional Hilbert space with its total SU(2) generators.
///
/// `J_z` is diagonal in the stored basis; `J+` is kept sparse so that
/// multiplicity computations scale to spaces far beyond the dense limit.
#[derive(Debug, Clone)]
pub struct PhysicalSpace {
    spec: SpaceSpec,
    twice_m: Vec<i64>,
    jplus: SparseOp,
    labels: Vec<Vec<usize>>,
}

/// Assembles the generators of `spec` with deterministic basis ordering:
/// row-major for tensors, blocks in listed order for sums, and increasing
/// total excitation (then decreasing `n_a`) for Fock spaces.
pub fn build_space(spec: &SpaceSpec) -> Result<PhysicalSpace> {
    spec.validate()?;
    let dim = spec.total_dim();
    if dim > SPARSE_LIMIT {
        return Err(Error::DenseLimit {
            dim,
            limit: SPARSE_LIMIT,
        });
    }
    let mut jplus = SparseOp::new(dim);
    let mut twice_m = Vec::with_capacity(dim);
    let mut labels = Vec::with_capacity(dim);
    match spec {
        SpaceSpec::Tensor(dims) => {
            let mut strides = vec![1usize; dims.len()];
            for i in (0..dims.len().saturating_sub(1)).rev() {
                strides[i] = strides[i + 1] * dims[i + 1];
            }
            for idx in 0..dim {
                let digits: Vec<usize> = dims.iter().zip(&strides).map(|(q, s)| (idx / s) % q).collect();
                let tm: i64 = dims
                    .iter()
                    .zip(&digits)
                    .map(|(&q, &k)| q as i64 - 1 - 2 * k as i64)
                    .sum();
                twice_m.push(tm);
                for (site, (&q, &k)) in dims.iter().zip(&digits).enumerate() {
                    if k >= 1 {
                        let v = ((k * (q - k)) as f64).sqrt();
                        jplus.push(idx - strides[site], idx, v);
                    }
                }
                labels.push(digits);
            }
        }
        SpaceSpec::Sum(blocks) => {
            let mut offset = 0;
            for (b, &(d, mult)) in blocks.iter().enumerate() {
                for copy in 0..mult {
                    for k in 0..d {
                        twice_m.push(d as i64 - 1 - 2 * k as i64);
                        if k >= 1 {
                            jplus.push(offset + k - 1, offset + k, ((k * (d - k)) as f64).sqrt());
                        }
                        labels.push(vec![b, copy, k]);
                    }
                    offset += d;
                }
            }
        }
        SpaceSpec::Fock { max, .. } => {
            let mut index = BTreeMap::new();
            for n in 0..=*max {
                for nb in 0..=n {
                    let na = n - nb;
                    index.insert((na, nb), labels.len());
                    labels.push(vec![na, nb]);
                    twice_m.push(na as i64 - nb as i64);
                }
            }
            for (i, l) in labels.iter().enumerate() {
                let (na, nb) = (l[0], l[1]);
                if nb >= 1 {
                    let target = index[&(na + 1, nb - 1)];
                    jplus.push(target, i, (((na + 1) * nb) as f64).sqrt());
                }
            }
        }
    }
    Ok(PhysicalSpace {
        spec: spec.clone(),
        twice_m,
        jplus,
        labels,
    })
}

impl PhysicalSpace {
    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn total_dim(&self) -> usize {
        self.twice_m.len()
    }

    /// Twice the `J_z` eigenvalue of each basis vector.
    pub fn twice_weights(&self) -> &[i64] {
        &self.twice_m
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn jplus(&self) -> &SparseOp {
        &self.jplus
    }

    pub fn jminus(&self) -> SparseOp {
        self.jplus.transpose()
    }

    /// Local dimensions when the space is a tensor product.
    pub fn site_dims(&self) -> Option<&[usize]> {
        match &self.spec {
            SpaceSpec::Tensor(dims) => Some(dims),
            _ => None,
        }
    }

    /// The dimension `n` if the space is a single irrep.
    pub fn irrep_dim(&self) -> Option<usize> {
        match decompose(self).as_slice() {
            [(d, 1)] => Some(*d),
            _ => None,
        }
    }

    pub fn check_dense(&self) -> Result<()> {
        let dim = self.total_dim();
        if dim > DENSE_LIMIT {
            return Err(Error::DenseLimit {
                dim,
                limit: DENSE_LIMIT,
            });
        }
        Ok(())
    }

    pub fn jplus_dense(&self) -> CMat {
        self.jplus.to_dense()
    }

    pub fn jminus_dense(&self) -> CMat {
        self.jplus.to_dense().adjoint()
    }

    pub fn jz_dense(&self) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.total_dim(),
            self.twice_m.iter().map(|&t| C64::new(t as f64 / 2.0, 0.0)),
        ))
    }

    /// D(g) acting on the whole space.
    pub fn action(&self, g: &GroupElement) -> Result<CMat> {
        self.check_dense()?;
        match &self.spec {
            SpaceSpec::Tensor(dims) => {
                let mut out = lift(g, dims[0])?;
                for &q in &dims[1..] {
                    out = kron(&out, &lift(g, q)?);
                }
                Ok(out)
            }
            SpaceSpec::Sum(blocks) => {
                let mut mats = Vec::new();
                for &(d, mult) in blocks {
                    let l = lift(g, d)?;
                    mats.extend(std::iter::repeat_n(l, mult));
                }
                Ok(block_diag(&mats))
            }
            SpaceSpec::Fock { max, .. } => {
                let mats = (0..=*max).map(|n| lift(g, n + 1)).collect::<Result<Vec<_>>>()?;
                Ok(block_diag(&mats))
            }
        }
    }
}

/// Irrep content `(dim, multiplicity)` in decreasing dimension.
///
/// The multiplicity of spin `j` is the number of weight-`j` vectors minus the
/// number of weight-`(j+1)` vectors.
pub fn decompose(space: &PhysicalSpace) -> Vec<(usize, usize)> {
    weight_multiplicities(space.twice_weights())
}

pub(crate) fn weight_multiplicities(twice_m: &[i64]) -> Vec<(usize, usize)> {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &t in twice_m {
        *counts.entry(t).or_default() += 1;
    }
    let mut out = Vec::new();
    for (&tj, &n) in counts.iter().rev() {
        if tj < 0 {
            break;
        }
        let above = counts.get(&(tj + 2)).copied().unwrap_or(0);
        if n > above {
            out.push(((tj + 1) as usize, n - above));
        }
    }
    out
}

/// Multiplicity of irrep `dim` in `space` (zero when absent).
pub fn multiplicity(space: &PhysicalSpace, dim: usize) -> usize {
    decompose(space)
        .into_iter()
        .find(|&(d, _)| d == dim)
        .map_or(0, |(_, m)| m)
}

/// A finite rotation group given by conjugacy-class rotation angles.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGroup {
    pub name: String,
    /// `(class size, rotation angle)` pairs.
    pub classes: Vec<(usize, f64)>,
}

impl PointGroup {
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let classes = (0..n).map(|k| (1, 2.0 * PI * k as f64 / n as f64)).collect();
        Ok(PointGroup {
            name: format!("C{n}"),
            classes,
        })
    }

    pub fn tetrahedral() -> Self {
        PointGroup {
            name: "T".into(),
            classes: vec![(1, 0.0), (8, 2.0 * PI / 3.0), (3, PI)],
        }
    }

    pub fn octahedral() -> Self {
        PointGroup {
            name: "O".into(),
            classes: vec![(1, 0.0), (8, 2.0 * PI / 3.0), (6, PI / 2.0), (3, PI), (6, PI)],
        }
    }

    pub fn icosahedral() -> Self {
        PointGroup {
            name: "I".into(),
            classes: vec![
                (1, 0.0),
                (12, 2.0 * PI / 5.0),
                (12, 4.0 * PI / 5.0),
                (20, 2.0 * PI / 3.0),
                (15, PI),
            ],
        }
    }

    /// `C<n>`, `T`, `O` or `I`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "T" => Ok(Self::tetrahedral()),
            "O" => Ok(Self::octahedral()),
            "I" => Ok(Self::icosahedral()),
            _ => {
                let n = name
                    .strip_prefix('C')
                    .and_then(|n| n.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown point group '{name}'")))?;
                Self::cyclic(n)
            }
        }
    }

    pub fn order(&self) -> usize {
        self.classes.iter().map(|(s, _)| s).sum()
    }
}

fn character(ell: usize, angle: f64) -> f64 {
    let half = angle / 2.0;
    if half.sin().abs() < 1e-12 {
        // θ = 0 (or 2π): the full dimension.
        return (2 * ell + 1) as f64;
    }
    ((2 * ell + 1) as f64 * half).sin() / half.sin()
}

/// Dimension of the K-fixed subspace of the spin-ℓ irrep.
pub fn fixed_multiplicity(group: &PointGroup, ell: usize) -> Result<usize> {
    let sum: f64 = group
        .classes
        .iter()
        .map(|&(size, a)| size as f64 * character(ell, a))
        .sum();
    let value = sum / group.order() as f64;
    let rounded = value.round();
    if (value - rounded).abs() > 1e-6 || rounded < 0.0 {
        return Err(Error::PointGroupData {
            group: group.name.clone(),
            ell,
            value,
        });
    }
    Ok(rounded as usize)
}

/// Rotational space of a molecule with symmetry `group`, truncated at `ell_max`.
///
/// Each ℓ sector is modeled as the spin-ℓ irrep with multiplicity equal to
/// the number of K-fixed body-frame vectors.
pub fn molecular_spec(group: &PointGroup, ell_max: usize) -> Result<SpaceSpec> {
    let mut blocks = Vec::new();
    for ell in 0..=ell_max {
        let m = fixed_multiplicity(group, ell)?;
        if m > 0 {
            blocks.push((2 * ell + 1, m));
        }
    }
    Ok(SpaceSpec::Sum(blocks))
}

/// Two truncated bosonic modes with their ladder operators.
#[derive(Debug, Clone)]
pub struct BosonicSpace {
    pub space: PhysicalSpace,
    pub excitation: usize,
    pub a: CMat,
    pub b: CMat,
    pub adag: CMat,
    pub bdag: CMat,
}

impl BosonicSpace {
    /// Index of the Fock state `|n_a, n_b>`.
    pub fn index(&self, na: usize, nb: usize) -> Option<usize> {
        self.space.labels().iter().position(|l| l[0] == na && l[1] == nb)
    }
}

/// Two-mode Fock space `n_a + n_b <= max`. The fixed-N manifold carries the
/// spin-N/2 irrep with `J+ = a†b`, `J- = ab†`, `J_z = (n_a − n_b)/2`; the
/// irrep vector `|k>` corresponds to `|N−k, k>`.
pub fn schwinger_space(excitation: usize, max: usize) -> Result<BosonicSpace> {
    let space = build_space(&SpaceSpec::Fock { excitation, max })?;
    let dim = space.total_dim();
    let position: BTreeMap<(usize, usize), usize> = space
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| ((l[0], l[1]), i))
        .collect();
    let mut a = CMat::zeros(dim, dim);
    let mut b = CMat::zeros(dim, dim);
    for (&(na, nb), &i) in &position {
        if na >= 1 {
            a[(position[&(na - 1, nb)], i)] = C64::new((na as f64).sqrt(), 0.0);
        }
        if nb >= 1 {
            b[(position[&(na, nb - 1)], i)] = C64::new((nb as f64).sqrt(), 0.0);
        }
    }
    let adag = a.adjoint();
    let bdag = b.adjoint();
    Ok(BosonicSpace {
        space,
        excitation,
        a,
        b,
        adag,
        bdag,
    })
}
