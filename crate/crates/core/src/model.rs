//! The on-disk model: a trained initializer plus, optionally, the type
//! classifier used by the extractor.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::extractor::TypeClassifier;
use crate::initializer::InitializerModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(flatten)]
    pub initializer: InitializerModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_classifier: Option<TypeClassifier>,
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self> {
        let model: Self = serde_json::from_slice(&fs::read(path)?)?;
        model.initializer.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }
}
