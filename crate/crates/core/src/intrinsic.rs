//! Codes, per-sector Knill-Laflamme checks, intrinsic distance and
//! covariance.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::isotypic::{decomposition, sector_basis_with, SectorBasis};
use crate::linalg::{frobenius, identity, isometry_residual, trace, CMat, C64};
use crate::repcore::GroupElement;
use crate::spaces::{build_space, PhysicalSpace, SpaceSpec};

/// Orthonormality tolerance for codeword matrices.
const CODEWORD_TOL: f64 = 1e-10;

/// Default pass threshold for KL checks.
pub const DEFAULT_KL_TOL: f64 = 1e-8;

/// Tolerance used to identify group elements in the closure.
pub const CLOSURE_TOL: f64 = 1e-8;

/// Default maximum size of a covariance closure.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// A K-dimensional subspace given by orthonormal codeword columns.
#[derive(Debug, Clone)]
pub struct Code {
    space: Arc<PhysicalSpace>,
    codewords: CMat,
}

impl Code {
    pub fn new(space: Arc<PhysicalSpace>, codewords: CMat) -> Result<Self> {
        if codewords.nrows() != space.total_dim() {
            return Err(Error::SpaceMismatch(format!(
                "codewords have {} rows, space has dimension {}",
                codewords.nrows(),
                space.total_dim()
            )));
        }
        if codewords.ncols() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let r = isometry_residual(&codewords);
        if r > CODEWORD_TOL {
            return Err(Error::NotOrthonormal(r));
        }
        Ok(Code { space, codewords })
    }

    /// Code inside the `n`-dimensional irrep.
    pub fn in_irrep(n: usize, codewords: CMat) -> Result<Self> {
        Code::new(Arc::new(build_space(&SpaceSpec::irrep(n))?), codewords)
    }

    pub fn space(&self) -> &Arc<PhysicalSpace> {
        &self.space
    }

    pub fn codewords(&self) -> &CMat {
        &self.codewords
    }

    /// Code dimension K.
    pub fn k(&self) -> usize {
        self.codewords.ncols()
    }

    /// Orthogonal projector BB† onto the code space.
    pub fn projector(&self) -> CMat {
        &self.codewords * self.codewords.adjoint()
    }
}

/// Outcome of a Knill-Laflamme check over one operator family.
#[derive(Debug, Clone, Serialize)]
pub struct KlReport {
    pub sector_dim: usize,
    /// max over operators of ‖ΩFΩ − c_F Ω‖_F.
    pub residual: f64,
    #[serde(serialize_with = "crate::codefile::serialize_complex_vec")]
    pub constants: Vec<C64>,
    pub tol: f64,
    pub pass: bool,
}

/// KL residual of one compressed operator `M = B†FB`: returns (c, ‖M − c·1‖_F).
pub(crate) fn kl_residual(compressed: &CMat) -> (C64, f64) {
    let k = compressed.nrows();
    let c = trace(compressed) / C64::new(k as f64, 0.0);
    let r = frobenius(&(compressed - identity(k) * c));
    (c, r)
}

pub(crate) fn report_from(sector_dim: usize, values: impl IntoIterator<Item = (C64, f64)>, tol: f64) -> KlReport {
    let mut residual: f64 = 0.0;
    let mut constants = Vec::new();
    for (c, r) in values {
        residual = residual.max(r);
        constants.push(c);
    }
    KlReport {
        sector_dim,
        residual,
        constants,
        tol,
        pass: residual < tol,
    }
}

/// Checks ΩFΩ = c_F Ω for every operator of `basis`, with c_F = tr(ΩF)/K.
///
/// Since ‖ΩFΩ − cΩ‖_F = ‖B†FB − c·1‖_F for orthonormal B, the check works on
/// K×K compressions.
pub fn kl_check(code: &Code, basis: &SectorBasis, tol: f64) -> Result<KlReport> {
    if basis.decomposition.total_dim != code.space.total_dim() {
        return Err(Error::SpaceMismatch(format!(
            "sector basis acts on dimension {}, code lives in dimension {}",
            basis.decomposition.total_dim,
            code.space.total_dim()
        )));
    }
    let p = basis.decomposition.coordinates(&code.codewords);
    let values = (0..basis.len()).map(|i| kl_residual(&basis.compress(i, &p)));
    Ok(report_from(basis.sector_dim(), values, tol))
}

/// KL reports for sectors `L = 0..=max_l` on the code's own space.
pub fn sector_reports(code: &Code, ls: &[usize], tol: f64) -> Result<Vec<KlReport>> {
    let d = Arc::new(decomposition(&code.space)?);
    ls.iter()
        .map(|&l| kl_check(code, &sector_basis_with(&d, l), tol))
        .collect()
}

/// Smallest `L ≥ 1` whose sector violates KL; `n` if none does.
///
/// Requires the code space to be a single irrep of dimension `n`.
pub fn intrinsic_distance(code: &Code) -> Result<usize> {
    intrinsic_distance_with_tol(code, DEFAULT_KL_TOL)
}

pub fn intrinsic_distance_with_tol(code: &Code, tol: f64) -> Result<usize> {
    let n = code
        .space
        .irrep_dim()
        .ok_or_else(|| Error::Unsupported("intrinsic distance needs a single-irrep space".into()))?;
    let d = Arc::new(decomposition(&code.space)?);
    for l in 1..n {
        if !kl_check(code, &sector_basis_with(&d, l), tol)?.pass {
            return Ok(l);
        }
    }
    Ok(n)
}

/// Logical effect of a physical unitary on a code.
#[derive(Debug, Clone)]
pub enum LogicalAction {
    Covariant(CMat),
    NotCovariant { residual: f64 },
}

impl LogicalAction {
    pub fn matrix(&self) -> Option<&CMat> {
        match self {
            LogicalAction::Covariant(m) => Some(m),
            LogicalAction::NotCovariant { .. } => None,
        }
    }
}

/// L = B†DB, reported when D preserves the code space and L is unitary.
pub fn logical_action(code: &Code, gate: &CMat, tol: f64) -> Result<LogicalAction> {
    let n = code.space.total_dim();
    if gate.nrows() != n || gate.ncols() != n {
        return Err(Error::SpaceMismatch(format!(
            "gate is {}x{}, code space has dimension {n}",
            gate.nrows(),
            gate.ncols()
        )));
    }
    let b = &code.codewords;
    let db = gate * b;
    let logical = b.adjoint() * &db;
    let residual = frobenius(&(db - b * &logical)).max(isometry_residual(&logical));
    if residual < tol {
        Ok(LogicalAction::Covariant(logical))
    } else {
        Ok(LogicalAction::NotCovariant { residual })
    }
}

/// Finite group generated by the logical images of some physical elements.
#[derive(Debug, Clone)]
pub struct Closure {
    pub logical_generators: Vec<CMat>,
    pub elements: Vec<CMat>,
    /// False when the cap was hit before the closure completed.
    pub finite: bool,
}

impl Closure {
    pub fn order(&self) -> Option<usize> {
        self.finite.then_some(self.elements.len())
    }
}

/// Multiplicative closure of the logical images of `generators`.
pub fn covariance_closure(code: &Code, generators: &[GroupElement], cap: usize) -> Result<Closure> {
    let mut logical_generators = Vec::with_capacity(generators.len());
    for g in generators {
        let d = code.space.action(g)?;
        match logical_action(code, &d, 1e-8)? {
            LogicalAction::Covariant(l) => logical_generators.push(l),
            LogicalAction::NotCovariant { residual } => {
                return Err(Error::NotCovariant(format!("{g} (residual {residual:.2e})")))
            }
        }
    }
    Ok(close_group(logical_generators, cap))
}

pub(crate) fn close_group(logical_generators: Vec<CMat>, cap: usize) -> Closure {
    let k = logical_generators.first().map_or(1, |g| g.nrows());
    let mut elements = vec![identity(k)];
    let mut frontier = vec![0usize];
    let known = |elements: &[CMat], m: &CMat| elements.iter().any(|e| frobenius(&(e - m)) < CLOSURE_TOL);
    while let Some(i) = frontier.pop() {
        for g in &logical_generators {
            let p = &elements[i] * g;
            if !known(&elements, &p) {
                if elements.len() >= cap {
                    return Closure {
                        logical_generators,
                        elements,
                        finite: false,
                    };
                }
                elements.push(p);
                frontier.push(elements.len() - 1);
            }
        }
    }
    Closure {
        logical_generators,
        elements,
        finite: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isotypic::sector_basis;
    use crate::linalg::{c, max_abs_diff};
    use crate::repcore::lift;
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn five_two_two() -> Code {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut b = CMat::zeros(5, 2);
        b[(0, 0)] = c(s, 0.0);
        b[(4, 0)] = c(s, 0.0);
        b[(2, 1)] = c(1.0, 0.0);
        Code::in_irrep(5, b).unwrap()
    }

    #[test]
    fn non_orthonormal_codewords_rejected() {
        let b = CMat::from_element(5, 2, c(1.0, 0.0));
        assert!(matches!(Code::in_irrep(5, b), Err(Error::NotOrthonormal(_))));
        let b = CMat::identity(4, 2);
        assert!(matches!(Code::in_irrep(5, b), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn ququint_code_sectors() {
        let code = five_two_two();
        let r = sector_reports(&code, &[0, 1, 2], DEFAULT_KL_TOL).unwrap();
        assert!(r[0].pass && r[0].residual < 1e-12);
        // identity sector: c = tr(Ω·1/√n)/K = 1/√5
        assert!((r[0].constants[0] - c(1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!(r[1].pass && r[1].residual < 1e-12);
        assert!(!r[2].pass && r[2].residual > 1e-3);
        assert_eq!(intrinsic_distance(&code).unwrap(), 2);
    }

    #[test]
    fn top_two_states_have_distance_one() {
        let code = Code::in_irrep(5, CMat::identity(5, 2)).unwrap();
        assert_eq!(intrinsic_distance(&code).unwrap(), 1);
    }

    #[test]
    fn basis_mixing_does_not_change_residual() {
        let code = five_two_two();
        let space = build_space(&SpaceSpec::irrep(5)).unwrap();
        let basis = sector_basis(&space, 2).unwrap();
        let base = kl_check(&code, &basis, 1e-8).unwrap();
        // Any unitary mixing of the sector gives the same maximal violation
        // up to reshuffling, so compare the total squared residual instead.
        let p = basis.decomposition.coordinates(code.codewords());
        let comps: Vec<CMat> = (0..basis.len()).map(|i| basis.compress(i, &p)).collect();
        let total = |ms: &[CMat]| ms.iter().map(|m| kl_residual(m).1.powi(2)).sum::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = crate::repcore::GroupElement::random(&mut rng);
        let u = lift(&g, 5).unwrap();
        let mixed: Vec<CMat> = (0..5)
            .map(|i| (0..5).fold(CMat::zeros(2, 2), |acc, j| acc + &comps[j] * u[(i, j)]))
            .collect();
        assert!((total(&comps) - total(&mixed)).abs() < 1e-9);
        assert!(!base.pass);
    }

    #[test]
    fn logical_gates_of_ququint_code() {
        let code = five_two_two();
        let s = lift(&GroupElement::phase(), 5).unwrap();
        let z = logical_action(&code, &s, 1e-10).unwrap();
        let minus_z = CMat::from_diagonal(&DVector::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0)]));
        assert!(max_abs_diff(z.matrix().unwrap(), &minus_z) < 1e-10);

        let h = lift(&GroupElement::hadamard(), 5).unwrap();
        let r = logical_action(&code, &h, 1e-10).unwrap();
        let h3 = 3f64.sqrt() / 2.0;
        let want = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(h3, 0.0), c(h3, 0.0), c(-0.5, 0.0)]);
        assert!(max_abs_diff(r.matrix().unwrap(), &want) < 1e-10);

        let id = logical_action(&code, &identity(5), 1e-10).unwrap();
        assert!(max_abs_diff(id.matrix().unwrap(), &identity(2)) < 1e-14);

        let x = lift(&GroupElement::rotation([1.0, 0.0, 0.0], 0.3).unwrap(), 5).unwrap();
        assert!(matches!(
            logical_action(&code, &x, 1e-10).unwrap(),
            LogicalAction::NotCovariant { .. }
        ));
    }

    #[test]
    fn logical_action_is_multiplicative() {
        let code = five_two_two();
        let g = GroupElement::phase();
        let h = GroupElement::hadamard();
        let l = |x: &GroupElement| {
            logical_action(&code, &lift(x, 5).unwrap(), 1e-10)
                .unwrap()
                .matrix()
                .unwrap()
                .clone()
        };
        assert!(frobenius(&(l(&(g * h)) - l(&g) * l(&h))) < 1e-8);
    }

    #[test]
    fn closures() {
        let code = five_two_two();
        let c6 = covariance_closure(&code, &[GroupElement::phase(), GroupElement::hadamard()], 100).unwrap();
        assert_eq!(c6.order(), Some(6));
        let c1 = covariance_closure(&code, &[GroupElement::identity()], 100).unwrap();
        assert_eq!(c1.order(), Some(1));
        let capped = covariance_closure(&code, &[GroupElement::phase(), GroupElement::hadamard()], 4).unwrap();
        assert_eq!(capped.order(), None);
        let bad = covariance_closure(&code, &[GroupElement::rz(0.3)], 100);
        assert!(matches!(bad, Err(Error::NotCovariant(_))));
    }
}
