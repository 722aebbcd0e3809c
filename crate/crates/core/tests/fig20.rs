use std::collections::BTreeMap;

use bifol_core::checks::{self, Basepoint};
use bifol_core::corpus::{fig20, fig20_roles as roles};
use bifol_core::einf::{build_cylinder, twist_classes, TwistClass};

#[test]
fn marker_traces_on_the_transversal_are_untwisted() {
    let c = fig20();
    let t = c.crossed_by(c.leaf_by_id(roles::TRANSVERSAL).unwrap());
    let cyl = build_cylinder(&c, &t).unwrap();
    let classes: BTreeMap<String, TwistClass> =
        twist_classes(&c, &cyl).into_iter().map(|(s, k)| (c.leaf_id(s).to_string(), k)).collect();
    for (id, k) in &classes {
        assert!(!matches!(k, TwistClass::TwistedLR | TwistClass::TwistedRL), "{id} is {k:?}");
    }
    assert_eq!(classes["g1S"], TwistClass::RightUntwisted);
    assert_eq!(classes["g2S"], TwistClass::LeftUntwisted);
}

#[test]
fn extremal_sections_cross_the_seam_once() {
    let c = fig20();
    let t = c.crossed_by(c.leaf_by_id(roles::TRANSVERSAL).unwrap());
    let l = Basepoint::parse(&c, roles::LEFT_FIBER, roles::LEFT_MARKER).unwrap();
    let r = Basepoint::parse(&c, roles::RIGHT_FIBER, roles::RIGHT_MARKER).unwrap();
    let o = checks::extremal_sections_cross(&c, l, r, &t);
    assert!(o.pass, "{:?}", o.witnesses);
    let seam = &o.details["leftmostSeam"]["crossings"];
    assert_eq!(seam.as_array().unwrap().len(), 1);
    assert_eq!(seam[0]["from"], "g1A1");
}

#[test]
fn special_section_is_nontrivial_at_the_special_leaf() {
    let c = fig20();
    let o = checks::special_support_at(&c, c.leaf_by_id(roles::SPECIAL_LAMBDA).unwrap());
    assert!(o.pass, "{:?}", o.witnesses);
    assert!(!o.details["xLu"].as_array().unwrap().is_empty());
    assert!(!o.details["xRd"].as_array().unwrap().is_empty());
}
