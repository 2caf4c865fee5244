//! Registry of known intrinsic codes. Every load re-verifies the declared
//! sector pattern, intrinsic distance and covariance group order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intrinsic::{
    covariance_closure, intrinsic_distance, sector_reports, Code, DEFAULT_CLOSURE_CAP, DEFAULT_KL_TOL,
};
use crate::linalg::{CMat, C64};
use crate::repcore::GroupElement;

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub irrep_dim: usize,
    pub code_dim: usize,
    pub distance: usize,
    /// Sector dimensions 2L+1 that must pass KL.
    pub passing_sectors: &'static [usize],
    /// First sector dimension that must fail.
    pub failing_sector: usize,
    pub generators: &'static [&'static str],
    /// Order of the logical group generated by `generators`.
    pub group_order: usize,
    pub realizations: &'static [&'static str],
    pub description: &'static str,
}

const ENTRIES: [CatalogEntry; 4] = [
    CatalogEntry {
        name: "5-2-2",
        irrep_dim: 5,
        code_dim: 2,
        distance: 2,
        passing_sectors: &[1, 3],
        failing_sector: 5,
        generators: &["S", "H"],
        group_order: 6,
        realizations: &[
            "2x2x2x2",
            "2x2x2x2x2x2",
            "3x3",
            "2x4",
            "2x2x3",
            "2x3x4",
            "fock:N=4,max=8",
            "sum:5*3",
            "5",
        ],
        description: "qubit in spin 2: |0> = (|0> + |4>)/sqrt2, |1> = |2>; S3-covariant",
    },
    CatalogEntry {
        name: "13-3-2",
        irrep_dim: 13,
        code_dim: 3,
        distance: 2,
        passing_sectors: &[1, 3],
        failing_sector: 5,
        generators: &["X", "Z", "S*H"],
        group_order: 12,
        realizations: &["13", "sum:1*1+13*1+21*1+25*1", "fock:N=12,max=16"],
        description: "qutrit in spin 6; tetrahedral covariance",
    },
    CatalogEntry {
        name: "13-2-3",
        irrep_dim: 13,
        code_dim: 2,
        distance: 3,
        passing_sectors: &[1, 3, 5],
        failing_sector: 7,
        generators: &["X", "Rz3"],
        group_order: 6,
        realizations: &["13", "sum:1*1+13*1+21*1+25*1", "fock:N=12,max=16"],
        description: "qubit in spin 6 correcting first-order errors; S3-covariant",
    },
    CatalogEntry {
        name: "14-2-3",
        irrep_dim: 14,
        code_dim: 2,
        distance: 3,
        passing_sectors: &[1, 3, 5],
        failing_sector: 7,
        generators: &["Hdag", "S3dag"],
        group_order: 48,
        realizations: &[
            "2x2x2x2x2x2x2x2x2x2x2x2x2",
            "7x8",
            "4x6x6",
            "4x4x4x5",
            "2x4x4x4x4",
            "2x3x3x3x3x3x3",
            "fock:N=13,max=17",
            "14",
        ],
        description: "qubit in spin 13/2 correcting first-order errors; binary octahedral (Clifford) covariance",
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCode(name.to_string()))
}

/// Constants of the 13-2-3 code: `(v, w, D)`.
pub fn constants_13_2_3() -> (f64, f64, f64) {
    let v = (611_808_967.0 + 9900.0 * 3_807_314_905f64.sqrt()).cbrt() / 1050.0;
    let w = v + 104_929.0 / (1_102_500.0 * v) - 11.0 / 150.0;
    let d = 49.0 * w.powi(3) / 66.0 + 49.0 * w * w / 120.0 + w + 1.0;
    (v, w, d)
}

fn columns(n: usize, cols: &[&[(usize, f64)]]) -> CMat {
    let mut b = CMat::zeros(n, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for &(i, x) in *col {
            b[(i, j)] = C64::new(x, 0.0);
        }
    }
    b
}

fn codewords(name: &str) -> Result<CMat> {
    let s = f64::sqrt;
    Ok(match name {
        "5-2-2" => columns(5, &[&[(0, s(0.5)), (4, s(0.5))], &[(2, 1.0)]]),
        "13-3-2" => columns(
            13,
            &[
                &[
                    (1, -s(21.0 / 80.0)),
                    (3, 1.0 / s(10.0)),
                    (5, s(63.0 / 440.0)),
                    (9, -s(63.0 / 176.0)),
                    (11, -s(3.0 / 22.0)),
                ],
                &[
                    (0, 1.0 / (4.0 * s(11.0))),
                    (2, s(21.0 / 55.0)),
                    (4, -3.0 / (4.0 * s(5.0))),
                    (8, 3.0 / (4.0 * s(5.0))),
                    (10, -s(21.0 / 55.0)),
                    (12, -1.0 / (4.0 * s(11.0))),
                ],
                &[
                    (1, s(3.0 / 22.0)),
                    (3, s(63.0 / 176.0)),
                    (7, -s(63.0 / 440.0)),
                    (9, -1.0 / s(10.0)),
                    (11, s(21.0 / 80.0)),
                ],
            ],
        ),
        "13-2-3" => {
            let (_, w, d) = constants_13_2_3();
            let a = 7.0 * w.powf(1.5) / s(66.0) / s(d);
            let b = -7.0 * w / (2.0 * s(30.0)) / s(d);
            let c = s(w) / s(d);
            let e = 1.0 / s(d);
            columns(
                13,
                &[&[(1, a), (4, b), (7, c), (10, e)], &[(2, e), (5, c), (8, b), (11, a)]],
            )
        }
        "14-2-3" => {
            let (r2, r11, r22) = (s(2.0), s(11.0), s(22.0));
            let a = s(5.0) / 112.0 * (13.0 * r2 + 2.0 * r11);
            let b = s(13.0) / 112.0 * (10.0 - 3.0 * r22);
            let c = -s(65.0) / 112.0 * (6.0 + r22);
            let d = s(65.0) / 112.0 * (r2 - 2.0 * r11);
            columns(
                14,
                &[&[(0, a), (4, b), (8, c), (12, d)], &[(13, a), (9, b), (5, c), (1, d)]],
            )
        }
        other => return Err(Error::UnknownCode(other.to_string())),
    })
}

/// Loads and re-verifies a catalog code.
pub fn catalog_load(name: &str) -> Result<(Code, &'static CatalogEntry)> {
    let e = entry(name)?;
    let corrupt = |reason: String| Error::CorruptCatalog {
        name: name.to_string(),
        reason,
    };
    let code = Code::in_irrep(e.irrep_dim, codewords(name)?).map_err(|err| corrupt(err.to_string()))?;
    let ls: Vec<usize> = e.passing_sectors.iter().map(|d| (d - 1) / 2).collect();
    for r in sector_reports(&code, &ls, DEFAULT_KL_TOL)? {
        if !r.pass {
            return Err(corrupt(format!("sector {} residual {:.3e}", r.sector_dim, r.residual)));
        }
    }
    let fail = &sector_reports(&code, &[(e.failing_sector - 1) / 2], DEFAULT_KL_TOL)?[0];
    if fail.pass {
        return Err(corrupt(format!("sector {} unexpectedly passes", e.failing_sector)));
    }
    let d = intrinsic_distance(&code)?;
    if d != e.distance {
        return Err(corrupt(format!("intrinsic distance {d}, declared {}", e.distance)));
    }
    let gens = e
        .generators
        .iter()
        .map(|g| GroupElement::from_name(g))
        .collect::<Result<Vec<_>>>()?;
    let closure = covariance_closure(&code, &gens, DEFAULT_CLOSURE_CAP).map_err(|err| corrupt(err.to_string()))?;
    if closure.order() != Some(e.group_order) {
        return Err(corrupt(format!(
            "covariance group order {:?}, declared {}",
            closure.order(),
            e.group_order
        )));
    }
    Ok((code, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intrinsic::{logical_action, LogicalAction};
    use crate::repcore::lift;

    #[test]
    fn every_entry_loads() {
        for e in entries() {
            let (code, _) = catalog_load(e.name).unwrap();
            assert_eq!(code.k(), e.code_dim);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(catalog_load("7-1-1"), Err(Error::UnknownCode(_))));
    }

    #[test]
    fn cubic_root_constants() {
        let (v, w, d) = constants_13_2_3();
        assert!((v - 1.0183900513757285).abs() < 1e-14);
        assert!((w - 1.0385117709629887).abs() < 1e-14);
        assert!((d - 3.3104482662706145).abs() < 1e-13);
    }

    #[test]
    fn codewords_are_normalized_to_machine_precision() {
        for e in entries() {
            let b = codewords(e.name).unwrap();
            let g = b.adjoint() * &b;
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g[(i, j)] - C64::new(want, 0.0)).norm() < 1e-14, "{}", e.name);
                }
            }
        }
    }

    #[test]
    fn fourteen_dim_code_implements_paulis() {
        let (code, _) = catalog_load("14-2-3").unwrap();
        for g in ["X", "Z", "S", "H"] {
            let d = lift(&GroupElement::from_name(g).unwrap(), 14).unwrap();
            assert!(
                matches!(logical_action(&code, &d, 1e-8).unwrap(), LogicalAction::Covariant(_)),
                "{g}"
            );
        }
    }
}
