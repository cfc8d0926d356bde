use minkval::polytope::PolytopeFile;
use minkval::scalar::{int, rat};
use minkval::vector::{transform_phi, PhiKind};
use minkval::{Error, OriginPosition, Polytope, Transform, Vector};

fn v(xs: &[i64]) -> Vector {
    Vector::from_ints(xs)
}

fn cube(lo: i64, hi: i64, n: usize) -> Polytope {
    Polytope::cuboid(&vec![(int(lo), int(hi)); n]).unwrap()
}

#[test]
fn hull_drops_interior_points() {
    let p = Polytope::convex_hull(&[
        v(&[0, 0]),
        v(&[1, 0]),
        v(&[0, 1]),
        Vector(vec![rat(1, 2), rat(1, 4)]),
    ])
    .unwrap();
    assert_eq!(p.vertices().len(), 3);
    assert!(p.is_simplex());
    assert_eq!(p.volume(), rat(1, 2));
}

#[test]
fn cube_counts() {
    let c = cube(0, 1, 3);
    assert_eq!(c.vertices().len(), 8);
    assert_eq!(c.faces(2).len(), 6);
    assert_eq!(c.faces(1).len(), 12);
    assert_eq!(c.volume(), int(1));
    assert_eq!(c.origin_position(), OriginPosition::RelativeBoundary);
}

#[test]
fn faces_through_the_origin() {
    let t = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
    assert!(t.faces_through_origin(0).is_empty());
    assert_eq!(t.faces_through_origin(1).len(), 3);
    assert_eq!(t.faces_through_origin(2).len(), 3);
    let c = cube(0, 1, 3);
    assert_eq!(c.faces_through_origin(1).len(), 3);
    assert_eq!(c.faces_through_origin(2).len(), 3);
    let s = cube(-1, 1, 3);
    assert_eq!(s.origin_position(), OriginPosition::Interior);
    for j in 1..3 {
        assert!(s.faces_through_origin(j).is_empty());
    }
}

#[test]
fn triangle_facet_data() {
    let t = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
    let mut data: Vec<_> =
        t.facet_data().iter().map(|f| (f.normal.clone(), f.offset.clone(), f.measure_sq.clone())).collect();
    data.sort_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(
        data,
        vec![(v(&[-1, 0]), int(0), int(1)), (v(&[0, -1]), int(0), int(1)), (v(&[1, 1]), int(1), int(2))]
    );
    let slanted = t.facet_data().iter().find(|f| f.offset == int(1)).unwrap();
    assert!((slanted.measure() - 2f64.sqrt()).abs() < 1e-15);
    assert!((slanted.unit_offset() - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn area_vectors_sum_to_zero() {
    for p in [cube(-1, 2, 3), Polytope::standard_simplex(4, 4, &int(2)).unwrap(), Polytope::hat_simplex(3, 3, &int(1)).unwrap()] {
        let n = p.n();
        let sum = p.facet_data().iter().fold(Vector::zeros(n), |acc, f| &acc + &f.normal);
        assert!(sum.is_zero());
    }
}

#[test]
fn phi_one_image_of_e1() {
    let Transform::Exact(m) = transform_phi(PhiKind::One, &rat(1, 2), 3).unwrap() else { panic!("float map") };
    assert_eq!(m.apply(&v(&[1, 0, 0])), Vector(vec![rat(1, 2), rat(1, 2), int(0)]));
    assert_eq!(*m.det(), int(1));
    assert!(matches!(transform_phi(PhiKind::One, &int(1), 3), Err(Error::InvalidParameter(_))));
}

#[test]
fn splitting_the_standard_simplex() {
    let t = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
    let normal = Vector(vec![rat(1, 2), rat(-1, 2), int(0)]);
    let split = t.halfspace_split(&normal).unwrap();
    assert!(!split.degenerate);
    assert_eq!(&split.positive.volume() + &split.negative.volume(), t.volume());
    for piece in [&split.positive, &split.negative] {
        assert!(piece.is_simplex());
        assert_eq!(piece.volume(), rat(1, 12));
    }
    assert_eq!(split.section.dim(), 2);
    assert!(split.section.vertices().iter().all(|x| x.dot(&normal) == int(0)));
}

#[test]
fn hat_simplex_and_projection() {
    let hat = Polytope::hat_simplex(3, 3, &int(1)).unwrap();
    assert_eq!(hat.vertices(), Polytope::convex_hull(&[v(&[0, 0, 0]), v(&[1, 0, 0]), v(&[0, 0, 1])]).unwrap().vertices());
    let t3 = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
    let shadow = t3.project(&[v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
    assert_eq!(shadow.vertices(), Polytope::standard_simplex(2, 3, &int(1)).unwrap().vertices());
    let seg = Polytope::standard_simplex(1, 3, &int(1)).unwrap();
    assert_eq!(seg.project_vector(&v(&[1, 2, 3])).unwrap(), v(&[1, 0, 0]));
}

#[test]
fn support_values() {
    let t2 = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
    assert_eq!(t2.support(&v(&[1, 1])), int(1));
    let seg = Polytope::standard_simplex(1, 1, &int(1)).unwrap();
    assert_eq!(seg.support(&v(&[-1])), int(0));
    assert_eq!(cube(-1, 1, 3).support(&v(&[1, 2, 3])), int(6));
    assert!(matches!(t2.support_checked(&v(&[1, 1, 1])), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn origin_must_be_contained() {
    let far = Polytope::convex_hull(&[v(&[1, 1]), v(&[2, 1]), v(&[1, 2])]);
    assert!(matches!(far, Err(Error::OriginNotContained)));
}

#[test]
fn polytope_file_roundtrip() {
    let p = Polytope::hat_simplex(3, 4, &rat(3, 2)).unwrap();
    let text = p.to_json();
    let back = Polytope::from_json(&text).unwrap();
    let file: PolytopeFile = serde_json::from_str(&text).unwrap();
    assert_eq!(file.n, 4);
    assert_eq!(back.vertices(), p.vertices());
    assert!(Polytope::from_json("{\"n\": 2, \"vertices\": [[\"0\"]]}").is_err());
}
