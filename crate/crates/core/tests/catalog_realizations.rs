//! Catalog codes carried onto their listed physical realizations.

use intrinsic_codes::catalog::{catalog_load, entries};
use intrinsic_codes::embed::realize;
use intrinsic_codes::extrinsic::{conventional_distance, depth, sector_kl, EXTRINSIC_TOL};
use intrinsic_codes::spaces::{SpaceSpec, DENSE_LIMIT};

#[test]
fn listed_realizations_keep_passing_sectors() {
    for e in entries() {
        let (code, _) = catalog_load(e.name).unwrap();
        for spec in e.realizations {
            let spec: SpaceSpec = spec.parse().unwrap();
            if spec.total_dim() > DENSE_LIMIT {
                continue;
            }
            let c = realize(&code, &spec, None).unwrap();
            for d in e.passing_sectors {
                let r = sector_kl(&c, (d - 1) / 2, EXTRINSIC_TOL).unwrap();
                assert!(r.pass, "{} on {spec:?}: sector {d} residual {}", e.name, r.residual);
            }
        }
    }
}

#[test]
fn fourteen_dim_code_on_qubit_and_qutrits() {
    let (code, _) = catalog_load("14-2-3").unwrap();
    let c = realize(&code, &"2x3x3x3x3x3x3".parse().unwrap(), None).unwrap();
    let d = conventional_distance(&c, 3, 2_000_000).unwrap();
    assert_eq!((d.distance, d.exact), (2, true));
    assert_eq!(depth(&c, 4).unwrap().depth, 3);
}

#[test]
fn fourteen_dim_code_on_thirteen_qubits() {
    let (code, _) = catalog_load("14-2-3").unwrap();
    let c = realize(&code, &SpaceSpec::qubits(13), None).unwrap();
    let d = conventional_distance(&c, 3, 2_000_000).unwrap();
    assert_eq!(d.distance, 3);
    assert_eq!(depth(&c, 4).unwrap().depth, 3);
}
