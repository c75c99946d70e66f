use steerkit::basis::full_basis;
use steerkit::group::Group;
use steerkit::oracle::{numeric_basis, sample_on_circle, subspace_distance, AngularFunctions};
use steerkit::representation::{irreps, Representation};

fn groups() -> Vec<Group> {
    let mut g = vec![Group::Trivial, Group::flip(0.0), Group::flip(0.9), Group::SO2, Group::O2];
    for n in 2..=8 {
        g.push(Group::cyclic(n));
    }
    for n in 1..=8 {
        g.push(Group::dihedral(n, 0.0));
    }
    g.push(Group::dihedral(3, 0.4));
    g
}

#[test]
fn irrep_pairs_match_numeric_null_space() {
    let b = 8;
    for g in groups() {
        let list: Vec<_> = irreps(g, 4).into_iter().filter(|p| p.frequency() <= 4).collect();
        for &po in &list {
            for &pi in &list {
                let (ro, ri) = (Representation::irrep(po), Representation::irrep(pi));
                let analytic = full_basis(&ro, &ri, b).unwrap();
                let numeric = numeric_basis(&ro, &ri, b).unwrap();
                assert_eq!(analytic.len(), numeric.len(), "{g} {po} <- {pi}");
                let pts = 2 * b as usize + 5;
                let d = subspace_distance(&sample_on_circle(&analytic, pts), &sample_on_circle(&numeric, pts));
                assert!(d < 1e-8, "{g} {po} <- {pi}: distance {d:e}");
            }
        }
    }
}
