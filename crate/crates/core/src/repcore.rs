//! SU(2) irreps: ladder generators, lifting group elements to spin-j, and
//! Clebsch-Gordan coefficients.
//!
//! Basis convention: in the `n`-dimensional irrep (spin `j = (n-1)/2`) the
//! basis vector `|k>` has `J_z` eigenvalue `j - k`, so `|0>` is the highest
//! weight state.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;
use std::sync::OnceLock;

use nalgebra::{DVector, Matrix2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, exp_hermitian, CMat, C64, I, ONE, ZERO};

/// The `J+`, `J-`, `J_z` matrices of one SU(2) irrep (ħ = 1).
#[derive(Debug, Clone)]
pub struct IrrepOperators {
    pub dim: usize,
    pub jplus: CMat,
    pub jminus: CMat,
    pub jz: CMat,
}

impl IrrepOperators {
    pub fn spin(&self) -> f64 {
        (self.dim as f64 - 1.0) / 2.0
    }

    pub fn jx(&self) -> CMat {
        (&self.jplus + &self.jminus) * c(0.5, 0.0)
    }

    pub fn jy(&self) -> CMat {
        (&self.jplus - &self.jminus) * c(0.0, -0.5)
    }
}

/// Angular momentum generators of the `dim`-dimensional irrep.
pub fn generators(dim: usize) -> Result<IrrepOperators> {
    if dim == 0 {
        return Err(Error::InvalidDimension(dim));
    }
    let n = dim as f64;
    let j = (n - 1.0) / 2.0;
    let mut jplus = CMat::zeros(dim, dim);
    for k in 1..dim {
        let kf = k as f64;
        jplus[(k - 1, k)] = c((kf * (n - kf)).sqrt(), 0.0);
    }
    let jminus = jplus.adjoint();
    let jz = CMat::from_diagonal(&DVector::from_fn(dim, |k, _| c(j - k as f64, 0.0)));
    Ok(IrrepOperators { dim, jplus, jminus, jz })
}

/// An element of SU(2) in its defining 2×2 representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement(Matrix2<C64>);

const GROUP_TOL: f64 = 1e-12;

impl GroupElement {
    pub fn new(u: Matrix2<C64>) -> Result<Self> {
        let unitarity = (u.adjoint() * u - Matrix2::identity())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let det = u.determinant();
        if unitarity > GROUP_TOL || (det - ONE).norm() > GROUP_TOL {
            return Err(Error::InvalidGroupElement(format!(
                "unitarity residual {unitarity:.2e}, det = {det}"
            )));
        }
        Ok(GroupElement(u))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn identity() -> Self {
        GroupElement(Matrix2::identity())
    }

    /// Determinant-one phase gate e^{-iπ/4} S.
    pub fn phase() -> Self {
        let w = C64::from_polar(1.0, PI / 4.0);
        GroupElement(Matrix2::new(w.conj(), ZERO, ZERO, w))
    }

    /// Determinant-one Hadamard gate −iH.
    pub fn hadamard() -> Self {
        let h = c(0.0, -std::f64::consts::FRAC_1_SQRT_2);
        GroupElement(Matrix2::new(h, h, h, -h))
    }

    /// −iX, rotation by π about x.
    pub fn pauli_x() -> Self {
        GroupElement(Matrix2::new(ZERO, -I, -I, ZERO))
    }

    /// −iY, rotation by π about y.
    pub fn pauli_y() -> Self {
        GroupElement(Matrix2::new(ZERO, -ONE, ONE, ZERO))
    }

    /// −iZ, rotation by π about z.
    pub fn pauli_z() -> Self {
        GroupElement(Matrix2::new(-I, ZERO, ZERO, I))
    }

    /// exp(−iθ n̂·σ/2) for a unit axis `n̂`.
    pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = (axis[0].powi(2) + axis[1].powi(2) + axis[2].powi(2)).sqrt();
        if norm < 1e-14 {
            return Err(Error::InvalidGroupElement("zero rotation axis".into()));
        }
        let [x, y, z] = axis.map(|a| a / norm);
        let (s, co) = (angle / 2.0).sin_cos();
        Ok(GroupElement(Matrix2::new(
            c(co, -s * z),
            c(-s * y, -s * x),
            c(s * y, -s * x),
            c(co, s * z),
        )))
    }

    pub fn rz(angle: f64) -> Self {
        Self::rotation([0.0, 0.0, 1.0], angle).expect("z axis is nonzero")
    }

    /// Haar-random element.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let g: [f64; 4] = std::array::from_fn(|_| {
            // Box-Muller; uniform on S^3 after normalization.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
        });
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let alpha = c(g[0] / n, g[1] / n);
        let beta = c(g[2] / n, g[3] / n);
        GroupElement(Matrix2::new(alpha, -beta.conj(), beta, alpha.conj()))
    }

    pub fn dagger(&self) -> Self {
        GroupElement(self.0.adjoint())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc * *self)
    }

    /// Parses a gate name or a `*`-separated product of names.
    ///
    /// Names: `I`, `S`, `Sdag`, `S3dag`, `H`, `Hdag`, `X`, `Y`, `Z`, `Rz3`
    /// (rotation by 2π/3 about z). All are determinant-one.
    pub fn from_name(name: &str) -> Result<Self> {
        let mut acc = Self::identity();
        for part in name.split('*') {
            let g = match part.trim() {
                "I" => Self::identity(),
                "S" => Self::phase(),
                "Sdag" => Self::phase().dagger(),
                "S3dag" => Self::phase().pow(3).dagger(),
                "H" => Self::hadamard(),
                "Hdag" => Self::hadamard().dagger(),
                "X" => Self::pauli_x(),
                "Y" => Self::pauli_y(),
                "Z" => Self::pauli_z(),
                "Rz3" => Self::rz(2.0 * PI / 3.0),
                other => return Err(Error::Parse(format!("unknown gate '{other}'"))),
            };
            acc = acc * g;
        }
        Ok(acc)
    }

    /// Rotation angle θ ∈ [0, 2π] and unit axis with g = exp(−iθ n̂·σ/2).
    pub fn axis_angle(&self) -> (f64, [f64; 3]) {
        let u = &self.0;
        let cos_half = (u[(0, 0)] + u[(1, 1)]).re / 2.0;
        // tr(g σ_k) = −2i sin(θ/2) n_k
        let sx = (I * (u[(0, 1)] + u[(1, 0)])).re / 2.0;
        let sy = (I * (I * u[(0, 1)] - I * u[(1, 0)])).re / 2.0;
        let sz = (I * (u[(0, 0)] - u[(1, 1)])).re / 2.0;
        let sin_half = (sx * sx + sy * sy + sz * sz).sqrt();
        let theta = 2.0 * sin_half.atan2(cos_half);
        if sin_half < 1e-15 {
            return (theta, [0.0, 0.0, 1.0]);
        }
        (theta, [sx / sin_half, sy / sin_half, sz / sin_half])
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement(self.0 * rhs.0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = &self.0;
        write!(f, "[[{}, {}], [{}, {}]]", u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)])
    }
}

/// The spin-(dim−1)/2 representation matrix D(g) = exp(−iθ n̂·J).
pub fn lift(g: &GroupElement, dim: usize) -> Result<CMat> {
    GroupElement::new(*g.matrix())?;
    let ops = generators(dim)?;
    let (theta, [x, y, z]) = g.axis_angle();
    if x == 0.0 && y == 0.0 {
        let j = ops.spin();
        return Ok(CMat::from_diagonal(&DVector::from_fn(dim, |k, _| {
            C64::from_polar(1.0, -theta * z * (j - k as f64))
        })));
    }
    let h = ops.jx() * c(x, 0.0) + ops.jy() * c(y, 0.0) + &ops.jz * c(z, 0.0);
    Ok(exp_hermitian(&h, theta))
}

const MAX_FACTORIAL: usize = 256;

fn ln_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; MAX_FACTORIAL + 1];
        for k in 1..=MAX_FACTORIAL {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

fn twice(x: f64, what: &str) -> Result<i64> {
    let t = 2.0 * x;
    if (t - t.round()).abs() > 1e-9 {
        return Err(Error::InvalidAngularMomentum(format!(
            "{what} = {x} is not a half-integer"
        )));
    }
    Ok(t.round() as i64)
}

fn check_pair(tj: i64, tm: i64, what: &str) -> Result<()> {
    if tj < 0 || tm.abs() > tj || (tj - tm) % 2 != 0 {
        return Err(Error::InvalidAngularMomentum(format!(
            "{what}: j = {}, m = {}",
            tj as f64 / 2.0,
            tm as f64 / 2.0
        )));
    }
    if tj as usize > MAX_FACTORIAL / 3 {
        return Err(Error::InvalidAngularMomentum(format!("{what}: j too large")));
    }
    Ok(())
}

/// Clebsch-Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩ (Condon-Shortley).
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let (tj1, tm1) = (twice(j1, "j1")?, twice(m1, "m1")?);
    let (tj2, tm2) = (twice(j2, "j2")?, twice(m2, "m2")?);
    let (tj, tm) = (twice(j, "J")?, twice(m, "M")?);
    check_pair(tj1, tm1, "first")?;
    check_pair(tj2, tm2, "second")?;
    check_pair(tj, tm, "coupled")?;
    Ok(cg_twice(tj1, tm1, tj2, tm2, tj, tm))
}

/// Clebsch-Gordan coefficient with all labels given as twice their value.
///
/// Labels must already be valid; returns zero outside the selection rules.
pub(crate) fn cg_twice(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    if tm != tm1 + tm2 || tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm.abs() > tj {
        return 0.0;
    }
    let lf = ln_factorials();
    let f = |t: i64| -> f64 {
        debug_assert!(t % 2 == 0 && t >= 0);
        lf[(t / 2) as usize]
    };
    let ln_pre = 0.5
        * (((tj + 1) as f64).ln() + f(tj + tj1 - tj2) + f(tj - tj1 + tj2) + f(tj1 + tj2 - tj) - f(tj1 + tj2 + tj + 2)
            + f(tj + tm)
            + f(tj - tm)
            + f(tj1 - tm1)
            + f(tj1 + tm1)
            + f(tj2 - tm2)
            + f(tj2 + tm2));
    // k runs over integers keeping every factorial argument nonnegative.
    let k_min = 0.max((tj2 - tj - tm1) / 2).max((tj1 - tj + tm2) / 2);
    let k_max = ((tj1 + tj2 - tj) / 2).min((tj1 - tm1) / 2).min((tj2 + tm2) / 2);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let tk = 2 * k;
        let ln_den = f(tk)
            + f(tj1 + tj2 - tj - tk)
            + f(tj1 - tm1 - tk)
            + f(tj2 + tm2 - tk)
            + f(tj - tj2 + tm1 + tk)
            + f(tj - tj1 - tm2 + tk);
        let term = (ln_pre - ln_den).exp();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}
