use std::f64::consts::FRAC_PI_2;

use ndarray::Array4;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use steerkit::basis::{full_basis, sample_basis, BandlimitPolicy, BlockWeights, RadialProfile};
use steerkit::conv::{convolve, equivariance_error, interior_probe, probe_margin, transform_field};
use steerkit::field::FieldType;
use steerkit::group::{Group, GroupElement};
use steerkit::representation::{irreps, regular_representation, IrrepId, Representation};

fn mixed_type(g: Group) -> FieldType {
    let mut reps = vec![regular_representation(g).unwrap()];
    reps.extend(irreps(g, 2).into_iter().map(Representation::irrep));
    FieldType::new(g, reps).unwrap()
}

fn grid_elements(g: Group) -> Vec<GroupElement> {
    let mut v = Vec::new();
    for q in 0..4 {
        let t = q as f64 * FRAC_PI_2;
        v.push(GroupElement::rotation(t));
        v.push(GroupElement::reflection(t - 2.0 * g.axis()));
    }
    v.into_iter().filter(|e| g.contains(e)).collect()
}

#[test]
fn grid_action_composes_exactly() {
    for g in [Group::cyclic(4), Group::dihedral(4, 0.0), Group::dihedral(2, 0.0), Group::flip(0.0)] {
        let ft = mixed_type(g);
        let f = interior_probe::<f64>(&ft, 9, 0, 5);
        let els = grid_elements(g);
        for a in &els {
            for b in &els {
                let lhs = transform_field(&transform_field(&f, b, [0.0, 0.0]).unwrap(), a, [0.0, 0.0]).unwrap();
                let rhs = transform_field(&f, &g.compose(a, b), [0.0, 0.0]).unwrap();
                assert_eq!(lhs.data(), rhs.data(), "{g} {a} {b}");
            }
        }
    }
}

#[test]
fn every_basis_element_is_exactly_equivariant() {
    let groups = [Group::cyclic(4), Group::dihedral(4, 0.0), Group::cyclic(2), Group::dihedral(1, 0.0), Group::O2];
    for g in groups {
        let (ti, to) = if g.is_finite() {
            (mixed_type(g), FieldType::new(g, vec![regular_representation(g).unwrap()]).unwrap())
        } else {
            let v = |i, k| Representation::irrep(IrrepId::new(g, i, k).unwrap());
            (
                FieldType::new(g, vec![v(0, 0), v(1, 2)]).unwrap(),
                FieldType::new(g, vec![v(1, 1), v(1, 0)]).unwrap(),
            )
        };
        let sym = full_basis(to.representation(), ti.representation(), 4).unwrap();
        for size in [5, 7] {
            let basis =
                sample_basis::<f64>(&sym, size, &RadialProfile::default_for(size), &BandlimitPolicy::default_for(size))
                    .unwrap();
            let probe = interior_probe(&ti, 17, probe_margin(size), 3);
            for i in 0..basis.dim() {
                let w = BlockWeights::unit(basis.dim(), i);
                for e in grid_elements(g) {
                    let err = equivariance_error(&ti, &to, &basis, &w, &e, &probe).unwrap();
                    assert!(err < 1e-10, "{g} S={size} element {i} at {e}: {err:e}");
                }
                let err = equivariance_error(&ti, &to, &basis, &w, &GroupElement::identity(), &probe).unwrap();
                assert_eq!(err, 0.0);
            }
        }
    }
}

#[test]
fn convolution_is_bilinear() {
    let g = Group::cyclic(4);
    let ti = mixed_type(g);
    let to = FieldType::new(g, vec![regular_representation(g).unwrap()]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut kernel = || Array4::from_shape_simple_fn((to.total_dim(), ti.total_dim(), 5, 5), || StandardNormal.sample(&mut rng));
    let (k1, k2) = (kernel(), kernel());
    let f1 = interior_probe::<f64>(&ti, 13, 0, 1);
    let f2 = interior_probe::<f64>(&ti, 13, 0, 2);
    let close = |a: &ndarray::Array3<f64>, b: &ndarray::Array3<f64>| (a - b).iter().all(|d| d.abs() < 1e-12);

    let ksum = &k1 + &k2;
    let lhs = convolve(&f1, ksum.view(), &to).unwrap();
    let rhs = convolve(&f1, k1.view(), &to).unwrap().into_data() + convolve(&f1, k2.view(), &to).unwrap().into_data();
    assert!(close(lhs.data(), &rhs));

    let fsum = steerkit::Field::new(ti.clone(), f1.data() + f2.data()).unwrap();
    let lhs = convolve(&fsum, k1.view(), &to).unwrap();
    let rhs = convolve(&f1, k1.view(), &to).unwrap().into_data() + convolve(&f2, k1.view(), &to).unwrap().into_data();
    assert!(close(lhs.data(), &rhs));

    let scaled = steerkit::Field::new(ti.clone(), f1.data() * 2.5).unwrap();
    let lhs = convolve(&scaled, k1.view(), &to).unwrap();
    let rhs = convolve(&f1, k1.view(), &to).unwrap().into_data() * 2.5;
    assert!(close(lhs.data(), &rhs));
    let k3 = &k1 * -0.5;
    let lhs = convolve(&f1, k3.view(), &to).unwrap();
    let rhs = convolve(&f1, k1.view(), &to).unwrap().into_data() * -0.5;
    assert!(close(lhs.data(), &rhs));
}

#[test]
fn f32_fields_follow_f64() {
    let g = Group::dihedral(4, 0.0);
    let r = regular_representation(g).unwrap();
    let ft = FieldType::new(g, vec![r.clone()]).unwrap();
    let sym = full_basis(&r, &r, 4).unwrap();
    let prof = RadialProfile::default_for(5);
    let pol = BandlimitPolicy::default_for(5);
    let b32 = sample_basis::<f32>(&sym, 5, &prof, &pol).unwrap();
    let probe = interior_probe::<f32>(&ft, 17, probe_margin(5), 8);
    let w = BlockWeights::<f32>::random(b32.dim(), 4);
    for e in grid_elements(g) {
        let err = equivariance_error(&ft, &ft, &b32, &w, &e, &probe).unwrap();
        assert!(err < 1e-6, "{e}: {err:e}");
    }
}
