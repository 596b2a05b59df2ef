use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tensor-product structure of a composite Hilbert space.
///
/// Basis states are ordered lexicographically with site 0 as the most
/// significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SpaceDescriptor {
    local_dims: Vec<usize>,
    total_dim: usize,
}

impl SpaceDescriptor {
    pub fn new(local_dims: Vec<usize>) -> Result<Self> {
        if local_dims.is_empty() {
            return Err(Error::invalid("a space needs at least one site"));
        }
        if let Some(&d) = local_dims.iter().find(|&&d| d < 2) {
            return Err(Error::invalid(format!("local dimension {d} < 2")));
        }
        let total_dim = local_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::invalid("total dimension overflows usize"))?;
        Ok(SpaceDescriptor { local_dims, total_dim })
    }

    /// `n` identical sites of dimension `d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn local_dim(&self, site: usize) -> Result<usize> {
        self.check_site(site)?;
        Ok(self.local_dims[site])
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            return Err(Error::SiteOutOfRange { site, n_sites: self.n_sites() });
        }
        Ok(())
    }

    /// Stride of `site` in the flattened index.
    pub fn stride(&self, site: usize) -> usize {
        self.local_dims[site + 1..].iter().product()
    }

    /// Split a flat basis index into per-site digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_sites()];
        for (slot, &d) in out.iter_mut().zip(&self.local_dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.local_dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Space of `self ⊗ other`.
    pub fn tensor(&self, other: &SpaceDescriptor) -> SpaceDescriptor {
        let mut dims = self.local_dims.clone();
        dims.extend_from_slice(&other.local_dims);
        SpaceDescriptor::new(dims).expect("tensor of valid spaces is valid")
    }

    pub fn is_uniform(&self) -> bool {
        self.local_dims.windows(2).all(|w| w[0] == w[1])
    }
}

impl TryFrom<Vec<usize>> for SpaceDescriptor {
    type Error = Error;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        SpaceDescriptor::new(dims)
    }
}

impl From<SpaceDescriptor> for Vec<usize> {
    fn from(s: SpaceDescriptor) -> Self {
        s.local_dims
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let s = SpaceDescriptor::new(vec![3, 2, 4]).unwrap();
        assert_eq!(s.total_dim(), 24);
        for i in 0..24 {
            assert_eq!(s.index_of(&s.digits(i)), i);
        }
        assert_eq!(s.digits(0), vec![0, 0, 0]);
        assert_eq!(s.digits(23), vec![2, 1, 3]);
        assert_eq!(s.stride(0), 8);
    }

    #[test]
    fn rejects_trivial_sites() {
        assert!(SpaceDescriptor::new(vec![3, 1]).is_err());
        assert!(SpaceDescriptor::new(vec![]).is_err());
        assert!(matches!(
            SpaceDescriptor::uniform(2, 3).unwrap().check_site(2),
            Err(Error::SiteOutOfRange { site: 2, n_sites: 2 })
        ));
    }
}
