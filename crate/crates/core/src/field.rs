//! Field types and feature fields on a pixel grid.
//!
//! Pixel `(row a, col b)` of an `H × W` field sits at
//! `(x, y) = (b − (W−1)/2, (H−1)/2 − a)`: the origin is the image center and `y`
//! points up, so positive angles rotate counterclockwise on screen.

use ndarray::{s, Array3, ArrayView3};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::representation::{direct_sum, restrict, Representation};
use crate::scalar::Scalar;

/// A list of representations `ρ = ⊕ᵢ ρᵢ`, one per feature field.
#[derive(Clone, Debug)]
pub struct FieldType {
    group: Group,
    reps: Vec<Representation>,
    offsets: Vec<usize>,
    sum: Representation,
}

impl FieldType {
    pub fn new(group: Group, reps: Vec<Representation>) -> Result<Self> {
        if reps.is_empty() {
            return Err(Error::InvalidArgument("a field type needs at least one field".into()));
        }
        if let Some(r) = reps.iter().find(|r| r.group() != group) {
            return Err(Error::GroupMismatch(group, r.group()));
        }
        let mut offsets = Vec::with_capacity(reps.len());
        let mut acc = 0;
        for r in &reps {
            offsets.push(acc);
            acc += r.dim();
        }
        let sum = direct_sum(&reps)?;
        Ok(Self {
            group,
            reps,
            offsets,
            sum,
        })
    }

    /// `n` copies of one representation.
    pub fn repeated(rep: &Representation, n: usize) -> Result<Self> {
        Self::new(rep.group(), vec![rep.clone(); n])
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn representations(&self) -> &[Representation] {
        &self.reps
    }

    /// Number of fields.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// `Σᵢ dim ρᵢ`.
    pub fn total_dim(&self) -> usize {
        self.sum.dim()
    }

    /// First channel of each field.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn channels(&self, field: usize) -> std::ops::Range<usize> {
        self.offsets[field]..self.offsets[field] + self.reps[field].dim()
    }

    /// The direct sum `⊕ᵢ ρᵢ`.
    pub fn representation(&self) -> &Representation {
        &self.sum
    }

    /// Same channels, each representation restricted to `H`.
    pub fn restrict(&self, subgroup: Group) -> Result<FieldType> {
        let reps = self
            .reps
            .iter()
            .map(|r| restrict(r, subgroup))
            .collect::<Result<Vec<_>>>()?;
        FieldType::new(subgroup, reps)
    }

    pub(crate) fn same_layout(&self, other: &FieldType) -> bool {
        self.group == other.group
            && self.reps.len() == other.reps.len()
            && self.reps.iter().zip(&other.reps).all(|(a, b)| a.dim() == b.dim())
    }
}

/// Feature field data of shape `(C, H, W)` with `C = total_dim`.
#[derive(Clone, Debug)]
pub struct FeatureField<T: Scalar> {
    field_type: FieldType,
    data: Array3<T>,
}

impl<T: Scalar> FeatureField<T> {
    pub fn new(field_type: FieldType, data: Array3<T>) -> Result<Self> {
        let (c, h, w) = data.dim();
        if c != field_type.total_dim() {
            return Err(Error::Shape(format!(
                "{c} channels for a field type of dimension {}",
                field_type.total_dim()
            )));
        }
        if h == 0 || w == 0 {
            return Err(Error::Shape("empty grid".into()));
        }
        Ok(Self { field_type, data })
    }

    pub fn zeros(field_type: FieldType, height: usize, width: usize) -> Self {
        let c = field_type.total_dim();
        Self {
            field_type,
            data: Array3::zeros((c, height.max(1), width.max(1))),
        }
    }

    pub fn field_type(&self) -> &FieldType {
        &self.field_type
    }

    pub fn data(&self) -> &Array3<T> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array3<T> {
        &mut self.data
    }

    pub fn into_data(self) -> Array3<T> {
        self.data
    }

    pub fn height(&self) -> usize {
        self.data.dim().1
    }

    pub fn width(&self) -> usize {
        self.data.dim().2
    }

    /// Channels of field `i`, shape `(dim ρᵢ, H, W)`.
    pub fn field(&self, i: usize) -> ArrayView3<'_, T> {
        let r = self.field_type.channels(i);
        self.data.slice(s![r, .., ..])
    }

    /// Euclidean norm of all entries.
    pub fn norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
    }

    /// Reinterprets the data under another field type with the same channel count.
    pub fn with_type(self, field_type: FieldType) -> Result<Self> {
        Self::new(field_type, self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::regular_representation;

    #[test]
    fn layout() {
        let g = Group::cyclic(4);
        let r = regular_representation(g).unwrap();
        let ft = FieldType::new(g, vec![Representation::trivial(g), r.clone(), r]).unwrap();
        assert_eq!(ft.total_dim(), 9);
        assert_eq!(ft.offsets(), &[0, 1, 5]);
        assert_eq!(ft.channels(2), 5..9);
        assert!(FieldType::new(g, vec![Representation::trivial(Group::SO2)]).is_err());
        assert!(FeatureField::<f64>::new(ft.clone(), Array3::zeros((8, 3, 3))).is_err());
        let f = FeatureField::<f32>::zeros(ft, 5, 4);
        assert_eq!((f.height(), f.width()), (5, 4));
        assert_eq!(f.field(1).dim(), (4, 5, 4));
    }

    #[test]
    fn restriction_keeps_channels() {
        let g = Group::dihedral(4, 0.0);
        let ft = FieldType::repeated(&regular_representation(g).unwrap(), 2).unwrap();
        let r = ft.restrict(Group::cyclic(4)).unwrap();
        assert_eq!(r.total_dim(), 16);
        assert!(ft.restrict(Group::cyclic(3)).is_err());
    }
}
