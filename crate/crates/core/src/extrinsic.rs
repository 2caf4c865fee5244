//! Extrinsic analysis of codes on physical spaces: Pauli weight enumerators,
//! conventional (weight-based) distance, perturbative depth, full-sector KL
//! and the bosonic error sweep.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intrinsic::{kl_check, kl_residual, report_from, Code, KlReport};
use crate::isotypic::{decomposition, sector_basis_with};
use crate::linalg::{apply_local, commutator, CMat, C64, I, ZERO};
use crate::repcore::cg_twice;
use crate::spaces::{build_space, BosonicSpace, SpaceSpec};

/// Pass threshold for extrinsic KL checks.
pub const EXTRINSIC_TOL: f64 = 1e-8;

/// Two enumerator coefficients differing by more than this are distinct.
pub const ENUMERATOR_TOL: f64 = 1e-9;

pub const DEFAULT_MAX_WEIGHT: usize = 3;
pub const DEFAULT_MAX_ORDER: usize = 4;

/// Maximum number of product operators a single scan may evaluate.
pub const DEFAULT_OPERATOR_CAP: usize = 2_000_000;

const MAX_ENUMERATOR_QUBITS: usize = 12;

/// Shor-Laflamme enumerators: `A_w = Σ|tr(ΠE)|²/K²`, `B_w = Σ tr(ΠEΠE†)/K`
/// over weight-w Pauli strings.
#[derive(Debug, Clone, Serialize)]
pub struct EnumeratorPair {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl EnumeratorPair {
    /// Smallest `w ≥ 1` with `B_w ≠ A_w`; `None` when the enumerators agree
    /// at every weight.
    pub fn distance(&self) -> Option<usize> {
        (1..self.a.len()).find(|&w| (self.b[w] - self.a[w]).abs() > ENUMERATOR_TOL)
    }

    pub fn table(&self) -> String {
        let mut out = String::from("  w            A_w            B_w\n");
        for (w, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            out.push_str(&format!("{w:>3} {a:>14.9} {b:>14.9}\n"));
        }
        out
    }
}

fn site_dims(code: &Code) -> Result<Vec<usize>> {
    match code.space().spec() {
        SpaceSpec::Tensor(d) => Ok(d.clone()),
        other => Err(Error::Unsupported(format!("product-space analysis on '{other}'"))),
    }
}

pub fn weight_enumerators(code: &Code) -> Result<EnumeratorPair> {
    let dims = site_dims(code)?;
    if dims.iter().any(|&q| q != 2) {
        return Err(Error::Unsupported(
            "weight enumerators need qubit sites; use conventional_distance".into(),
        ));
    }
    let n = dims.len();
    if n > MAX_ENUMERATOR_QUBITS {
        return Err(Error::DenseLimit {
            dim: n,
            limit: MAX_ENUMERATOR_QUBITS,
        });
    }
    let b = code.codewords();
    let k = code.k();
    let terms: Vec<(usize, f64, f64)> = (0..1usize << (2 * n))
        .into_par_iter()
        .map(|p| {
            // Digit of site i: 0 = I, 1 = X, 2 = Y, 3 = Z; site i is bit n−1−i.
            let (mut flip, mut sign_mask, mut ys, mut weight) = (0usize, 0usize, 0u32, 0usize);
            for i in 0..n {
                let bit = 1usize << (n - 1 - i);
                match (p >> (2 * (n - 1 - i))) & 3 {
                    1 => flip |= bit,
                    2 => {
                        flip |= bit;
                        sign_mask |= bit;
                        ys += 1;
                    }
                    3 => sign_mask |= bit,
                    _ => continue,
                }
                weight += 1;
            }
            let global = I.powu(ys);
            let mut m = CMat::zeros(k, k);
            for x in 0..1usize << n {
                let phase = if (x & sign_mask).count_ones() % 2 == 0 {
                    global
                } else {
                    -global
                };
                let y = x ^ flip;
                for a in 0..k {
                    let left = b[(y, a)].conj() * phase;
                    if left == ZERO {
                        continue;
                    }
                    for c in 0..k {
                        m[(a, c)] += left * b[(x, c)];
                    }
                }
            }
            let tr: C64 = (0..k).map(|i| m[(i, i)]).sum();
            (weight, tr.norm_sqr() / (k * k) as f64, m.norm_squared() / k as f64)
        })
        .collect();
    let mut a = vec![0.0; n + 1];
    let mut bw = vec![0.0; n + 1];
    for (w, ta, tb) in terms {
        a[w] += ta;
        bw[w] += tb;
    }
    Ok(EnumeratorPair { a, b: bw })
}

/// Spherical tensor bases of the operators on one site of dimension `q`:
/// `result[L][L − M]`.
fn local_sectors(q: usize) -> Result<Vec<Vec<CMat>>> {
    let space = build_space(&SpaceSpec::irrep(q))?;
    let d = Arc::new(decomposition(&space)?);
    Ok((0..q)
        .map(|l| {
            let basis = sector_basis_with(&d, l);
            (0..basis.len()).map(|i| basis.dense(i)).collect()
        })
        .collect())
}

fn local_tables(dims: &[usize]) -> Result<BTreeMap<usize, Vec<Vec<CMat>>>> {
    let mut tables = BTreeMap::new();
    for &q in dims {
        if let std::collections::btree_map::Entry::Vacant(e) = tables.entry(q) {
            e.insert(local_sectors(q)?);
        }
    }
    Ok(tables)
}

/// `B† (⊗ factors) B`.
fn compress_product(dims: &[usize], factors: &[(usize, &CMat)], b: &CMat) -> CMat {
    b.adjoint() * apply_local(dims, factors, b)
}

fn combinations(n: usize, t: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, t, &mut Vec::new(), &mut out);
    out
}

/// All index tuples `(i_0, …)` with `i_j < sizes[j]`, first index slowest.
fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|t| (0..s).map(move |i| [t.clone(), vec![i]].concat()))
            .collect();
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    /// First failing weight, or `max_weight + 1` when every scanned weight passed.
    pub distance: usize,
    /// False when `distance` is only a lower bound.
    pub exact: bool,
    /// Set when the operator cap stopped the scan.
    pub partial: bool,
    pub max_weight: usize,
    pub operators_checked: usize,
    /// Worst KL residual per scanned weight.
    pub residuals: Vec<f64>,
}

/// Distance in the conventional multi-qudit sense: KL over a trace-orthonormal
/// basis of every weight-t operator, for increasing t.
pub fn conventional_distance(code: &Code, max_weight: usize, cap: usize) -> Result<DistanceReport> {
    let dims = site_dims(code)?;
    let tables = local_tables(&dims)?;
    // Non-identity local basis per site dimension: all sectors L ≥ 1.
    let nontrivial: BTreeMap<usize, Vec<&CMat>> = tables
        .iter()
        .map(|(&q, t)| (q, t[1..].iter().flatten().collect()))
        .collect();
    let b = code.codewords();
    let mut report = DistanceReport {
        distance: max_weight + 1,
        exact: false,
        partial: false,
        max_weight,
        operators_checked: 0,
        residuals: Vec::new(),
    };
    for t in 1..=max_weight.min(dims.len()) {
        let supports = combinations(dims.len(), t);
        let count: usize = supports
            .iter()
            .map(|s| s.iter().map(|&i| dims[i] * dims[i] - 1).product::<usize>())
            .sum();
        if report.operators_checked + count > cap {
            log::warn!("operator cap {cap} reached at weight {t}; distance is a lower bound");
            report.distance = t;
            report.partial = true;
            return Ok(report);
        }
        let worst = supports
            .par_iter()
            .map(|support| {
                let sizes: Vec<usize> = support.iter().map(|&i| nontrivial[&dims[i]].len()).collect();
                tuples(&sizes)
                    .into_iter()
                    .map(|choice| {
                        let factors: Vec<(usize, &CMat)> = support
                            .iter()
                            .zip(&choice)
                            .map(|(&site, &j)| (site, nontrivial[&dims[site]][j]))
                            .collect();
                        kl_residual(&compress_product(&dims, &factors, b)).1
                    })
                    .fold(0.0, f64::max)
            })
            .collect::<Vec<f64>>()
            .into_iter()
            .fold(0.0, f64::max);
        report.operators_checked += count;
        report.residuals.push(worst);
        if worst >= EXTRINSIC_TOL {
            report.distance = t;
            report.exact = true;
            return Ok(report);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderResidual {
    pub order: usize,
    pub operators: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DepthReport {
    /// First failing total order, or `max_order + 1` if none failed.
    pub depth: usize,
    pub failing_order: Option<usize>,
    /// Local sector dimensions `2L_i + 1` of every failing product pattern.
    pub failing_patterns: Vec<Vec<usize>>,
    pub orders: Vec<OrderResidual>,
}

/// Assignments `(L_0, …)` with `Σ L_i = t` and `L_i < dims[i]`, in
/// lexicographically descending order.
fn order_patterns(dims: &[usize], t: usize) -> Vec<Vec<usize>> {
    fn rec(dims: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == dims.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for l in (0..=left.min(dims[i] - 1)).rev() {
            cur.push(l);
            rec(dims, left - l, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dims, t, &mut Vec::new(), &mut out);
    out
}

/// Perturbative depth: KL over products of local sector operators graded by
/// total order `Σ L_i`, for increasing order.
pub fn depth(code: &Code, max_order: usize) -> Result<DepthReport> {
    let dims = site_dims(code)?;
    let tables = local_tables(&dims)?;
    let b = code.codewords();
    let mut orders = Vec::new();
    for t in 0..=max_order {
        let patterns = order_patterns(&dims, t);
        let results: Vec<(f64, usize)> = patterns
            .par_iter()
            .map(|pattern| {
                let sizes: Vec<usize> = pattern.iter().map(|&l| 2 * l + 1).collect();
                let ops = tuples(&sizes);
                let worst = ops
                    .iter()
                    .map(|ms| {
                        let factors: Vec<(usize, &CMat)> = pattern
                            .iter()
                            .zip(ms)
                            .enumerate()
                            .filter(|(_, (&l, _))| l > 0)
                            .map(|(site, (&l, &m))| (site, &tables[&dims[site]][l][m]))
                            .collect();
                        kl_residual(&compress_product(&dims, &factors, b)).1
                    })
                    .fold(0.0, f64::max);
                (worst, ops.len())
            })
            .collect();
        let residual = results.iter().map(|r| r.0).fold(0.0, f64::max);
        let operators = results.iter().map(|r| r.1).sum();
        orders.push(OrderResidual {
            order: t,
            operators,
            residual,
        });
        if residual >= EXTRINSIC_TOL {
            let failing_patterns = patterns
                .iter()
                .zip(&results)
                .filter(|(_, r)| r.0 >= EXTRINSIC_TOL)
                .map(|(p, _)| p.iter().map(|&l| 2 * l + 1).collect())
                .collect();
            return Ok(DepthReport {
                depth: t,
                failing_order: Some(t),
                failing_patterns,
                orders,
            });
        }
    }
    Ok(DepthReport {
        depth: max_order + 1,
        failing_order: None,
        failing_patterns: Vec::new(),
        orders,
    })
}

/// KL over the entire spin-L isotypic component of L(H).
pub fn sector_kl(code: &Code, l: usize, tol: f64) -> Result<KlReport> {
    let d = Arc::new(decomposition(code.space())?);
    kl_check(code, &sector_basis_with(&d, l), tol)
}

/// KL for the spin-`total` part of the coupled two-site operators
/// `T^{l1} ⊗ T^{l2}` on sites `sites`.
pub fn coupled_pair_kl(
    code: &Code,
    sites: (usize, usize),
    ls: (usize, usize),
    total: usize,
    tol: f64,
) -> Result<KlReport> {
    let dims = site_dims(code)?;
    let (s1, s2) = sites;
    let (l1, l2) = ls;
    if s1 == s2 || s1 >= dims.len() || s2 >= dims.len() {
        return Err(Error::InvalidSpec(format!(
            "site pair ({s1}, {s2}) on {} sites",
            dims.len()
        )));
    }
    if l1 >= dims[s1] || l2 >= dims[s2] || total > l1 + l2 || total < l1.abs_diff(l2) {
        return Err(Error::InvalidAngularMomentum(format!("{l1} ⊗ {l2} → {total}")));
    }
    let t1 = local_sectors(dims[s1])?;
    let t2 = local_sectors(dims[s2])?;
    let b = code.codewords();
    let (l1i, l2i, li) = (l1 as i64, l2 as i64, total as i64);
    let values = (-li..=li).rev().map(|mu| {
        let mut m = CMat::zeros(code.k(), code.k());
        for m1 in -l1i..=l1i {
            let m2 = mu - m1;
            if m2.abs() > l2i {
                continue;
            }
            let coef = cg_twice(2 * l1i, 2 * m1, 2 * l2i, 2 * m2, 2 * li, 2 * mu);
            if coef == 0.0 {
                continue;
            }
            let f1 = &t1[l1][(l1i - m1) as usize];
            let f2 = &t2[l2][(l2i - m2) as usize];
            m += compress_product(&dims, &[(s1, f1), (s2, f2)], b) * C64::new(coef, 0.0);
        }
        kl_residual(&m)
    });
    Ok(report_from(2 * total + 1, values.collect::<Vec<_>>(), tol))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub operator: String,
    #[serde(serialize_with = "crate::codefile::serialize_complex")]
    pub c: C64,
    pub residual: f64,
    pub pass: bool,
    /// Whether the operator changes the total excitation number.
    pub changes_n: bool,
}

/// KL for the named bosonic error set on a code in the two-mode Fock space.
pub fn bosonic_sweep(bosons: &BosonicSpace, code: &Code, tol: f64) -> Result<Vec<SweepRow>> {
    if code.space().spec() != bosons.space.spec() {
        return Err(Error::SpaceMismatch(format!(
            "code lives on '{}', sweep space is '{}'",
            code.space().spec(),
            bosons.space.spec()
        )));
    }
    let modes = [
        ("a", &bosons.a),
        ("b", &bosons.b),
        ("a†", &bosons.adag),
        ("b†", &bosons.bdag),
    ];
    let jp = &bosons.adag * &bosons.b;
    let jm = &bosons.a * &bosons.bdag;
    let na = &bosons.adag * &bosons.a;
    let nb = &bosons.bdag * &bosons.b;
    let jz = (&na - &nb) * C64::new(0.5, 0.0);
    let mut ops: Vec<(String, CMat)> = modes.iter().map(|(n, m)| (n.to_string(), (*m).clone())).collect();
    ops.push(("J+".into(), jp.clone()));
    ops.push(("J-".into(), jm.clone()));
    ops.push(("Jz".into(), jz.clone()));
    ops.push(("a†a".into(), na));
    ops.push(("b†b".into(), nb));
    ops.push(("a†b".into(), jp.clone()));
    ops.push(("ab†".into(), jm));
    ops.push(("[J+,Jz]".into(), commutator(&jp, &jz)));
    for (n1, m1) in &modes {
        for (n2, m2) in &modes {
            for (n3, m3) in &modes {
                ops.push((format!("{n1}·{n2}·{n3}"), *m1 * *m2 * *m3));
            }
        }
    }
    let totals: Vec<usize> = bosons.space.labels().iter().map(|l| l[0] + l[1]).collect();
    let b = code.codewords();
    Ok(ops
        .into_iter()
        .map(|(operator, f)| {
            let changes_n =
                (0..f.nrows()).any(|r| (0..f.ncols()).any(|c| totals[r] != totals[c] && f[(r, c)].norm() > 1e-14));
            let (c, residual) = kl_residual(&(b.adjoint() * &f * b));
            SweepRow {
                operator,
                c,
                residual,
                pass: residual < tol,
                changes_n,
            }
        })
        .collect())
}
