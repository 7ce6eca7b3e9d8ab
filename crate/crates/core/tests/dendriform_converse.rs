use itertools::Itertools;
use omega_rb::omega::{check_diassociative, check_eds};
use omega_rb::rba::dendriform_from;
use omega_rb::trees::{ladder_pool, TreeAlgebra};
use omega_rb::{FormalSum, OmegaStructure, OpTable};

/// Structures that are not an EDS but pass on the ladder pool are reported,
/// not asserted. The EDS direction is covered by the acceptance suite.
#[test]
fn dendriform_failures_outside_eds() {
    let tables: Vec<OpTable> = OpTable::all(2).collect();
    let pool: Vec<_> = ladder_pool(2, 1, 3).into_iter().map(FormalSum::basis).collect();
    let (mut eds, mut passing_non_eds) = (0, Vec::new());
    for q in (0..4).map(|_| tables.iter()).multi_cartesian_product() {
        let s = OmegaStructure::eds(q[0].clone(), q[1].clone(), q[2].clone(), q[3].clone()).unwrap();
        if check_diassociative(&s).holds() && check_eds(&s).holds() {
            eds += 1;
            continue;
        }
        let alg = TreeAlgebra::weight_zero(&s, vec!["x".into()]).unwrap();
        let d = dendriform_from(&alg).unwrap();
        let passes = pool.iter().cartesian_product(&pool).cartesian_product(&pool).all(|((a, b), c)| {
            (0..2).cartesian_product(0..2).all(|(al, be)| d.violations(al, be, a, b, c).is_empty())
        });
        if passes {
            passing_non_eds.push(s);
        }
    }
    assert_eq!(eds, 45);
    println!("{} structures that are not an EDS pass the dendriform identities", passing_non_eds.len());
    for s in &passing_non_eds {
        println!("{s:?}");
    }
}
