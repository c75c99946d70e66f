use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use steerkit::conv::{interior_probe, transform_field};
use steerkit::field::FieldType;
use steerkit::group::{Group, GroupElement};
use steerkit::nonlinearity::*;
use steerkit::representation::{
    induced_representation, induced_so2_to_o2, irreps, quotient_representation, regular_representation, IrrepId,
    Representation,
};
use steerkit::Field;

const N: usize = 100;

fn elements(g: Group) -> Vec<GroupElement> {
    g.elements().unwrap_or_else(|_| g.sample_elements(64, 2))
}

/// `N` random fiber vectors laid out as a `1 × N` grid.
fn random_field(ft: &FieldType, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = Array3::from_shape_simple_fn((ft.total_dim(), 1, N), || StandardNormal.sample(&mut rng));
    Field::new(ft.clone(), data).unwrap()
}

/// Applies `ρ(g)` to every fiber without moving pixels.
fn act(f: &Field, g: &GroupElement) -> Field {
    let m = f.field_type().representation().matrix(g).unwrap();
    let mut out = f.clone();
    for b in 0..f.width() {
        let v = nalgebra::DVector::from_iterator(m.ncols(), f.data().slice(ndarray::s![.., 0, b]).iter().copied());
        let w = &m * v;
        for (c, x) in w.iter().enumerate() {
            out.data_mut()[[c, 0, b]] = *x;
        }
    }
    out
}

fn gap(a: &Field, b: &Field) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn commutes(ft: &FieldType, seed: u64, op: impl Fn(&Field) -> Field) {
    let f = random_field(ft, seed);
    let out = op(&f);
    for g in elements(ft.group()) {
        let err = gap(&op(&act(&f, &g)), &act(&out, &g));
        assert!(err < 1e-12, "{} at {g}: {err:e}", ft.representation());
    }
}

fn irrep(g: Group, i: u8, k: u32) -> Representation {
    Representation::irrep(IrrepId::new(g, i, k).unwrap())
}

fn unitary_types() -> Vec<FieldType> {
    let mut v = Vec::new();
    for g in [Group::cyclic(5), Group::dihedral(4, 0.0), Group::dihedral(6, 0.4), Group::flip(0.2)] {
        let mut reps: Vec<_> = irreps(g, 0).into_iter().map(Representation::irrep).collect();
        reps.push(regular_representation(g).unwrap());
        v.push(FieldType::new(g, reps).unwrap());
    }
    v.push(FieldType::new(Group::SO2, (0..4).map(|k| irrep(Group::SO2, 0, k)).collect()).unwrap());
    v.push(
        FieldType::new(Group::O2, vec![irrep(Group::O2, 1, 0), irrep(Group::O2, 1, 2), induced_so2_to_o2(1)]).unwrap(),
    );
    v
}

fn permutation_types() -> Vec<FieldType> {
    let d4 = Group::dihedral(4, 0.0);
    let c8 = Group::cyclic(8);
    vec![
        FieldType::new(c8, vec![regular_representation(c8).unwrap(), Representation::trivial(c8)]).unwrap(),
        FieldType::new(
            d4,
            vec![
                regular_representation(d4).unwrap(),
                quotient_representation(d4, Group::cyclic(4)).unwrap(),
                quotient_representation(d4, Group::flip(0.0)).unwrap(),
                induced_representation(d4, Group::cyclic(2), &Representation::trivial(Group::cyclic(2))).unwrap(),
            ],
        )
        .unwrap(),
        FieldType::new(Group::O2, vec![induced_so2_to_o2(0)]).unwrap(),
    ]
}

#[test]
fn norm_maps_commute() {
    for (s, ft) in unitary_types().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(s as u64);
        let biases: Vec<f64> = (0..ft.len()).map(|_| rng.random_range(0.0..1.5)).collect();
        commutes(ft, s as u64, |f| norm_relu(f, &biases).unwrap());
        commutes(ft, s as u64 + 10, squash);
        let scalars = FieldType::repeated(&Representation::trivial(ft.group()), ft.len()).unwrap();
        let gates = random_field(&scalars, 99);
        commutes(ft, s as u64 + 20, |f| {
            let g = Field::new(scalars.clone(), gates.data().clone()).unwrap();
            gated(f, &g).unwrap()
        });
        let f = random_field(ft, s as u64 + 30);
        let inv = norm_invariant_map(&f).unwrap();
        for g in elements(ft.group()) {
            assert!(gap(&norm_invariant_map(&act(&f, &g)).unwrap(), &inv) < 1e-12);
        }
    }
}

#[test]
fn permutation_maps_commute() {
    for (s, ft) in permutation_types().iter().enumerate() {
        commutes(ft, s as u64, |f| relu(f).unwrap());
        commutes(ft, s as u64 + 5, |f| pointwise(f, f64::tanh).unwrap());
        let f = random_field(ft, s as u64 + 7);
        let pooled = group_pool(&f).unwrap();
        for g in elements(ft.group()) {
            assert_eq!(group_pool(&act(&f, &g)).unwrap().data(), pooled.data());
        }
    }
}

#[test]
fn vector_field_map_commutes() {
    for n in 3..=12 {
        let g = Group::cyclic(n);
        let ft = FieldType::repeated(&regular_representation(g).unwrap(), 3).unwrap();
        // Gaussian samples are tie-free with probability one
        commutes(&ft, n as u64, |f| vector_field_nonlin(f).unwrap());
    }
}

#[test]
fn induced_maps_commute() {
    let o2 = Group::O2;
    for k in 1..=3 {
        let ft = FieldType::new(o2, vec![induced_so2_to_o2(k), induced_so2_to_o2(k + 1)]).unwrap();
        commutes(&ft, k as u64, |f| ind_norm_relu(f, &[0.3, 0.0]).unwrap());
    }
    for k in 0..=3 {
        let ft = FieldType::new(o2, vec![induced_so2_to_o2(k), induced_so2_to_o2(2)]).unwrap();
        let gt = FieldType::repeated(&induced_so2_to_o2(0), 2).unwrap();
        let f = random_field(&ft, k as u64);
        let gates = random_field(&gt, 50 + k as u64);
        let out = ind_gate(&f, &gates).unwrap();
        for g in elements(o2) {
            let err = gap(&ind_gate(&act(&f, &g), &act(&gates, &g)).unwrap(), &act(&out, &g));
            assert!(err < 1e-12, "k={k} {g}: {err:e}");
        }
    }
}

#[test]
fn absolute_value_is_invariant() {
    for (g, i, k) in [(Group::O2, 1, 0), (Group::dihedral(4, 0.0), 1, 0), (Group::dihedral(4, 0.0), 0, 2), (Group::flip(0.0), 1, 0)] {
        let ft = FieldType::repeated(&irrep(g, i, k), 2).unwrap();
        let f = random_field(&ft, 4);
        let out = absolute_invariant(&f).unwrap();
        for e in elements(g) {
            assert_eq!(absolute_invariant(&act(&f, &e)).unwrap().data(), out.data());
        }
    }
}

#[test]
fn restriction_matches_supergroup_action() {
    let cases = [
        (Group::dihedral(8, 0.0), Group::cyclic(4)),
        (Group::dihedral(4, 0.0), Group::flip(std::f64::consts::FRAC_PI_4)),
        (Group::dihedral(4, 0.0), Group::dihedral(2, 0.0)),
        (Group::cyclic(8), Group::cyclic(2)),
    ];
    for (g, h) in cases {
        let mut reps: Vec<_> = irreps(g, 0).into_iter().map(Representation::irrep).collect();
        reps.push(regular_representation(g).unwrap());
        let ft = FieldType::new(g, reps).unwrap();
        let rt = restrict_field_type(&ft, h).unwrap();
        assert_eq!(rt.total_dim(), ft.total_dim());
        let f = interior_probe::<f64>(&ft, 9, 0, 6);
        let fr = f.clone().with_type(rt).unwrap();
        for e in h.elements().unwrap() {
            let lhs = transform_field(&fr, &e, [0.0, 0.0]).unwrap();
            let rhs = transform_field(&f, &h.embed(&g, &e).unwrap(), [0.0, 0.0]).unwrap();
            assert_eq!(lhs.data(), rhs.data(), "{g} -> {h} at {e}");
        }
    }
    assert!(restrict_field_type(&FieldType::repeated(&Representation::trivial(Group::cyclic(4)), 1).unwrap(), Group::cyclic(3)).is_err());
}
