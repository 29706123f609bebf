mod common;

use common::{fixture, m_sqrt2, two_i2};
use framelet::design::{optimize_sm2, parametrize, Constraints, FamilyFile, SearchGrid};
use framelet::laurent::{int, rat};
use framelet::symmetry::{SymmetryGroup, SymmetryType};
use framelet::{Error, SupportBox};

fn constraints(group: SymmetryGroup) -> Constraints {
    Constraints {
        sum_rules: 4,
        interpolatory: true,
        symmetry: Some(SymmetryType::new(group, vec![int(0), int(0)], 1)),
    }
}

#[test]
fn quincunx_family_has_two_parameters() {
    let ctx = m_sqrt2();
    let fam = parametrize(&SupportBox::cube(2, -3, 3), &ctx, &constraints(SymmetryGroup::d4())).unwrap();
    assert_eq!(fam.dimension(), 2);
    let fam = fam.reparametrize(&[vec![-2, -3], vec![0, -3]]).unwrap();
    assert_eq!(fam.instantiate(&[int(0), int(0)]).unwrap(), fixture("ex41_a"));
    assert_eq!(fam.instantiate(&[int(0), rat(1, 64)]).unwrap(), fixture("ex41_ta"));
    // The symmetric coordinate names the same parameter.
    let alt = fam.reparametrize(&[vec![-3, 2], vec![-3, 0]]).unwrap();
    assert_eq!(alt.instantiate(&[int(0), rat(1, 64)]).unwrap(), fixture("ex41_ta"));
    let f = fam.instantiate(&[rat(1, 100), rat(-1, 7)]).unwrap();
    assert_eq!(f.coeff(&[-2, -3]), rat(1, 100));
    assert_eq!(f.coeff(&[1, 2]), rat(-1, 64) - rat(3, 100) + rat(1, 7));
}

#[test]
fn square_family_has_one_parameter() {
    let ctx = two_i2();
    let fam = parametrize(&SupportBox::cube(2, -3, 3), &ctx, &constraints(SymmetryGroup::d6())).unwrap();
    assert_eq!(fam.dimension(), 1);
    let fam = fam.reparametrize(&[vec![0, 3]]).unwrap();
    assert_eq!(fam.instantiate(&[int(0)]).unwrap(), fixture("ex42_a"));
    assert_eq!(fam.instantiate(&[rat(-1, 64)]).unwrap(), fixture("ex42_ta"));
    let back = FamilyFile::to_family(&fam.to_file()).unwrap();
    assert_eq!(back, fam);
    let json = serde_json::to_string(&fam.to_file()).unwrap();
    let parsed: FamilyFile = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed.to_family().unwrap(), fam);
}

#[test]
fn small_box_cannot_reach_four_sum_rules() {
    let r = parametrize(&SupportBox::cube(2, -1, 1), &two_i2(), &constraints(SymmetryGroup::d6()));
    assert!(matches!(r, Err(Error::Infeasible)));
}

#[test]
fn tampered_family_is_rejected() {
    let fam = parametrize(&SupportBox::cube(2, -3, 3), &two_i2(), &constraints(SymmetryGroup::d6())).unwrap();
    let mut bad = fam.clone();
    bad.base[0] += rat(1, 1000);
    assert!(matches!(bad.instantiate(&[int(0)]), Err(Error::ConstraintViolation(_))));
    assert!(matches!(fam.instantiate(&[]), Err(Error::Arity { expected: 1, got: 0 })));
}

#[test]
fn grid_search_prefers_a_smooth_member() {
    let ctx = two_i2();
    let fam = parametrize(&SupportBox::cube(2, -3, 3), &ctx, &constraints(SymmetryGroup::d6()))
        .unwrap()
        .reparametrize(&[vec![0, 3]])
        .unwrap();
    let grid = SearchGrid {
        values: vec![vec![rat(-1, 64), int(0), rat(1, 64)]],
        refine_rounds: 1,
    };
    let best = optimize_sm2(&fam, &ctx, &grid).unwrap();
    assert_eq!(best.evaluated.len(), 5);
    assert!(best.certifies);
    // The evaluated members include a and ta, so the optimum beats both.
    assert!(best.estimate.sm2 >= 2.44);
}
