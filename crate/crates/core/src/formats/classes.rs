//! Collapsing multi-class material annotations into binary ToM masks.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::TomMask;

/// Raw integer class ids as stored in an annotation file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRaster {
    width: usize,
    height: usize,
    ids: Vec<u16>,
}

impl ClassRaster {
    pub fn new(width: usize, height: usize, ids: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 || ids.len() != width * height {
            return Err(Error::Dimension(format!(
                "class raster {width}x{height} with {} ids",
                ids.len()
            )));
        }
        Ok(ClassRaster { width, height, ids })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn ids(&self) -> &[u16] {
        &self.ids
    }
}

/// Partition of class ids into transparent/mirror and everything else.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCollapseRule {
    pub tom_classes: BTreeSet<u16>,
    pub other_classes: BTreeSet<u16>,
}

impl ClassCollapseRule {
    pub fn new(
        tom: impl IntoIterator<Item = u16>,
        other: impl IntoIterator<Item = u16>,
    ) -> Result<Self> {
        let rule = ClassCollapseRule {
            tom_classes: tom.into_iter().collect(),
            other_classes: other.into_iter().collect(),
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(id) = self.tom_classes.intersection(&self.other_classes).next() {
            return Err(Error::Manifest {
                sample: None,
                reason: format!("class {id} is listed as both ToM and other"),
            });
        }
        Ok(())
    }

    /// Booster: 4 material classes, 2-3 are transparent/mirror.
    pub fn booster() -> Self {
        Self::new([2, 3], [0, 1]).expect("disjoint preset")
    }

    /// Trans10K: 12 classes, 0 is background and 1-11 are transparent things and stuff.
    pub fn trans10k() -> Self {
        Self::new(1..=11, [0]).expect("disjoint preset")
    }

    /// MSD: binary mirror masks, stored as either 0/1 or 0/255.
    pub fn msd() -> Self {
        Self::new([1, 255], [0]).expect("disjoint preset")
    }

    /// Plain 0/1 masks.
    pub fn binary() -> Self {
        Self::new([1], [0]).expect("disjoint preset")
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "booster" => Some(Self::booster()),
            "trans10k" => Some(Self::trans10k()),
            "msd" => Some(Self::msd()),
            "binary" => Some(Self::binary()),
            _ => None,
        }
    }

    pub fn classify(&self, id: u16) -> Result<bool> {
        if self.tom_classes.contains(&id) {
            Ok(true)
        } else if self.other_classes.contains(&id) {
            Ok(false)
        } else {
            Err(Error::ClassMap { class_id: id })
        }
    }
}

pub fn collapse_mask(raw: &ClassRaster, rule: &ClassCollapseRule) -> Result<TomMask> {
    let data = raw
        .ids()
        .iter()
        .map(|&id| rule.classify(id).map(u8::from))
        .collect::<Result<Vec<_>>>()?;
    TomMask::new(raw.width, raw.height, data)
}
