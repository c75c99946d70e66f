use crate::error::{Error, Result};
use crate::group::{cos_sin, Group, GroupElement};
use crate::linalg::{block_diag, kron, Mat};

use super::{RepKind, Representation};

/// Left cosets `gH` of a finite subgroup, in order of first appearance while
/// walking the elements of `G`; each coset is represented by its first element.
struct Cosets {
    reps: Vec<GroupElement>,
    /// Coset index for every element of `G`, indexed like `G.elements()`.
    of: Vec<usize>,
}

impl Cosets {
    fn new(g: Group, h: Group) -> Result<Self> {
        let g_els = g.elements()?;
        let h_els = h.elements()?;
        if !h.is_subgroup_of(&g) {
            return Err(Error::NotSubgroup { sub: h, group: g });
        }
        let h_emb = h_els
            .iter()
            .map(|x| h.embed(&g, x))
            .collect::<Result<Vec<_>>>()?;
        let mut of = vec![usize::MAX; g_els.len()];
        let mut reps = Vec::new();
        for (i, x) in g_els.iter().enumerate() {
            if of[i] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(*x);
            for y in &h_emb {
                let j = g
                    .element_index(&g.compose(x, y))
                    .expect("closure of a finite group");
                of[j] = c;
            }
        }
        Ok(Self { reps, of })
    }

    fn coset_of(&self, g: Group, x: &GroupElement) -> usize {
        self.of[g.element_index(x).expect("member of the group")]
    }
}

/// `ρ_reg(g̃) e_g = e_{g̃g}` with axes indexed like [`Group::elements`].
pub fn regular_representation(group: Group) -> Result<Representation> {
    let els = group.elements()?;
    let n = els.len();
    Ok(Representation::build(
        group,
        n,
        "regular".into(),
        RepKind::Regular,
        None,
        Vec::new(),
        Box::new(move |g| {
            let mut m = Mat::zeros(n, n);
            for (j, x) in els.iter().enumerate() {
                let i = group
                    .element_index(&group.compose(g, x))
                    .expect("closure of a finite group");
                m[(i, j)] = 1.0;
            }
            m
        }),
    ))
}

/// `ρ_quot(g̃) e_{gH} = e_{g̃gH}`.
pub fn quotient_representation(group: Group, subgroup: Group) -> Result<Representation> {
    let cosets = Cosets::new(group, subgroup)?;
    let n = cosets.reps.len();
    Ok(Representation::build(
        group,
        n,
        format!("quot_{subgroup}"),
        RepKind::Quotient { subgroup },
        None,
        Vec::new(),
        Box::new(move |g| {
            let mut m = Mat::zeros(n, n);
            for (c, r) in cosets.reps.iter().enumerate() {
                m[(cosets.coset_of(group, &group.compose(g, r)), c)] = 1.0;
            }
            m
        }),
    ))
}

/// `Ind_H^G ρ̃` for finite `H ≤ G`.
///
/// Block `(c', c)` of `ρ(g̃)` is `ρ̃(R(c')⁻¹ g̃ R(c))` when `g̃R(c) ∈ R(c')H` and
/// zero otherwise, where `R` picks the coset representatives.
pub fn induced_representation(group: Group, subgroup: Group, rho: &Representation) -> Result<Representation> {
    if rho.group() != subgroup {
        return Err(Error::GroupMismatch(rho.group(), subgroup));
    }
    let cosets = Cosets::new(group, subgroup)?;
    let n = cosets.reps.len();
    let d = rho.dim();
    let inner = rho.clone();
    Ok(Representation::build(
        group,
        n * d,
        format!("ind_{subgroup}({})", rho.name()),
        RepKind::Induced { subgroup },
        rho.bandlimit(),
        Vec::new(),
        Box::new(move |g| {
            let mut m = Mat::zeros(n * d, n * d);
            for (c, r) in cosets.reps.iter().enumerate() {
                let gr = group.compose(g, r);
                let c2 = cosets.coset_of(group, &gr);
                let h = group.compose(&cosets.reps[c2].inverse(), &gr);
                let h = subgroup
                    .pull_back(&group, &h)
                    .expect("coset decomposition lands in the subgroup");
                m.view_mut((c2 * d, c * d), (d, d)).copy_from(&inner.eval(&h));
            }
            m
        }),
    ))
}

/// `Ind_{SO(2)}^{O(2)} ψ_k`.
///
/// For `k = 0` this is the regular representation of the reflection part
/// (two channels swapped by reflections). For `k > 0` it acts as
/// `diag(ψ(kθ), ψ(−kθ))` on rotations and swaps the two blocks on reflections.
pub fn induced_so2_to_o2(k: u32) -> Representation {
    let dim = if k == 0 { 2 } else { 4 };
    Representation::build(
        Group::O2,
        dim,
        format!("ind_so2({k})"),
        RepKind::InducedSo2 { frequency: k },
        Some(k),
        Vec::new(),
        Box::new(move |g| {
            if k == 0 {
                return if g.is_reflection() {
                    Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
                } else {
                    Mat::identity(2, 2)
                };
            }
            let (c, s) = cos_sin(f64::from(k) * g.theta());
            let a = Mat::from_row_slice(2, 2, &[c, -s, s, c]);
            let b = a.transpose();
            let mut m = Mat::zeros(4, 4);
            if g.is_reflection() {
                m.view_mut((0, 2), (2, 2)).copy_from(&a);
                m.view_mut((2, 0), (2, 2)).copy_from(&b);
            } else {
                m.view_mut((0, 0), (2, 2)).copy_from(&a);
                m.view_mut((2, 2), (2, 2)).copy_from(&b);
            }
            m
        }),
    )
}

/// `Res_H^G ρ`, evaluated by embedding `H` into `G`.
pub fn restrict(rho: &Representation, subgroup: Group) -> Result<Representation> {
    let group = rho.group();
    if !subgroup.is_subgroup_of(&group) {
        return Err(Error::NotSubgroup { sub: subgroup, group });
    }
    let inner = rho.clone();
    Ok(Representation::build(
        subgroup,
        rho.dim(),
        format!("res_{subgroup}({})", rho.name()),
        RepKind::Restricted { from: group },
        rho.bandlimit(),
        Vec::new(),
        Box::new(move |h| {
            let g = subgroup.embed(&group, h).expect("subgroup element embeds");
            inner.eval(&g)
        }),
    ))
}

/// `⊕ᵢ ρᵢ`; nested direct sums are flattened into one list of summands.
pub fn direct_sum(rhos: &[Representation]) -> Result<Representation> {
    let first = rhos
        .first()
        .ok_or_else(|| Error::InvalidArgument("direct sum of no representations".into()))?;
    let group = first.group();
    let mut parts = Vec::new();
    for r in rhos {
        if r.group() != group {
            return Err(Error::GroupMismatch(group, r.group()));
        }
        if r.kind() == &RepKind::DirectSum {
            parts.extend(r.components().iter().cloned());
        } else {
            parts.push(r.clone());
        }
    }
    let dim = parts.iter().map(Representation::dim).sum();
    let bandlimit = max_bandlimit(&parts);
    let name = parts.iter().map(|r| r.name().to_string()).collect::<Vec<_>>().join("+");
    let eval_parts = parts.clone();
    Ok(Representation::build(
        group,
        dim,
        name,
        RepKind::DirectSum,
        bandlimit,
        parts,
        Box::new(move |g| block_diag(&eval_parts.iter().map(|r| r.eval(g)).collect::<Vec<_>>())),
    ))
}

fn max_bandlimit(parts: &[Representation]) -> Option<u32> {
    let mut b = 0;
    for p in parts {
        match p.bandlimit() {
            Some(x) => b = b.max(x),
            None if p.group().is_finite() => {}
            None => return None,
        }
    }
    Some(b)
}

/// `ρ₁ ⊗ ρ₂` via Kronecker products.
pub fn tensor_product(a: &Representation, b: &Representation) -> Result<Representation> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch(a.group(), b.group()));
    }
    let bandlimit = match (a.bandlimit(), b.bandlimit()) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    let (ra, rb) = (a.clone(), b.clone());
    Ok(Representation::build(
        a.group(),
        a.dim() * b.dim(),
        format!("({})x({})", a.name(), b.name()),
        RepKind::Tensor,
        bandlimit,
        Vec::new(),
        Box::new(move |g| kron(&ra.eval(g), &rb.eval(g))),
    ))
}
