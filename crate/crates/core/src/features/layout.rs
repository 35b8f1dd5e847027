use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Extractor that produced the column.
    pub source: String,
    pub index: usize,
}

/// Named, ordered description of every column of a feature block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub version: String,
    pub columns: Vec<Column>,
}

impl FeatureLayout {
    pub fn new(version: impl Into<String>) -> Self {
        FeatureLayout {
            version: version.into(),
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, source: &str, name: impl Into<String>) {
        let index = self.columns.len();
        self.columns.push(Column {
            name: name.into(),
            source: source.to_string(),
            index,
        });
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn check(&self) -> Result<(), String> {
        let mut seen = std::collections::BTreeSet::new();
        for (i, c) in self.columns.iter().enumerate() {
            if c.index != i {
                return Err(format!("column {} has index {}, expected {i}", c.name, c.index));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(format!("duplicate column name {}", c.name));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub layout_id: String,
}
