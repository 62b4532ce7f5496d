use cod_core::fixtures::example_433;
use cod_core::generator::{construct_g, extended_design};
use cod_core::oracle::{enumerate_cods, Placement, SearchSpec};

// On the fixed [4,3,3] support, row/column/variable negations span a
// 6-dimensional space of sign patterns (10 generators, 4-dimensional kernel)
// and per-variable conjugation gives 2^3 more: 2^9 = 512 designs in one orbit.
#[test]
fn forced_433() {
    let r = enumerate_cods(&SearchSpec::new(4, 3, 3, Placement::Forced)).unwrap();
    assert_eq!(r.candidates, 4u64.pow(9));
    assert_eq!(r.valid, 512);
    assert_eq!(r.classes.len(), 1);
    assert_eq!(r.classes[0].members, 512);
    assert!(r.contains(&example_433()).unwrap());
    assert!(r.contains(&construct_g(2).unwrap()).unwrap());
}

// Each of the 512 members above extends in exactly two ways (global flip).
#[test]
fn forced_443() {
    let r = enumerate_cods(&SearchSpec::new(4, 4, 3, Placement::Forced)).unwrap();
    assert_eq!(r.valid, 1024);
    assert_eq!(r.classes.len(), 1);
    assert!(r.contains(&extended_design(2).unwrap().unwrap()).unwrap());
}

// Alamouti: 2 diagonal choices, 2 * 2 conjugation choices, 8 sign patterns
// with an odd number of minus signs.
#[test]
fn free_222() {
    let r = enumerate_cods(&SearchSpec::new(2, 2, 2, Placement::Free)).unwrap();
    assert_eq!(r.candidates, 9u64.pow(4));
    assert_eq!(r.valid, 64);
    assert_eq!(r.classes.len(), 1);
}

#[test]
fn free_121() {
    let r = enumerate_cods(&SearchSpec::new(1, 2, 1, Placement::Free)).unwrap();
    assert_eq!((r.candidates, r.valid, r.classes.len()), (25, 0, 0));
}
