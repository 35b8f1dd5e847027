//! Classifiers: CART tree, random forest, gradient boosting, logistic and
//! ridge regression, SVM, MLP, voting and stacking, plus a majority
//! baseline. Every trainer is a pure function of (data, params, seed).

pub mod data;
pub mod ensemble;
pub mod forest;
pub mod gboost;
pub mod linear;
pub mod mlp;
pub mod svm;
pub mod tree;

pub use data::{accuracy, argmax, stratified_folds, stratified_holdout, LabeledDataset};
pub use ensemble::{vote, MajorityModel, StackParams, StackingAudit, StackingModel, VoteModel, VoteParams};
pub use forest::{ForestParams, RandomForest};
pub use gboost::{GbParams, GradientBoosting};
pub use linear::{LinearModel, LogisticParams, RidgeParams};
pub use mlp::{Mlp, MlpActivation, MlpParams};
pub use svm::{Kernel, Svm, SvmParams};
pub use tree::{DecisionTree, TreeParams};

use crate::error::{Error, Result};
use crate::targets::ClassLabel;
use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub trait Classifier {
    /// Classes in ascending order; scores are aligned with this list.
    fn classes(&self) -> &[ClassLabel];
    fn predict_scores(&self, row: &[f64]) -> Vec<f64>;

    /// Argmax of the scores, ties to the lowest class.
    fn predict(&self, row: &[f64]) -> ClassLabel {
        self.classes()[argmax(&self.predict_scores(row))]
    }

    fn predict_batch(&self, x: ArrayView2<f64>) -> Vec<ClassLabel>
    where
        Self: Sync,
    {
        let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
        rows.par_iter().map(|r| self.predict(r)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Majority,
    Tree,
    Forest,
    Gb,
    Logreg,
    Ridge,
    Svm,
    Mlp,
    Vote,
    Stack,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Majority,
        Family::Tree,
        Family::Forest,
        Family::Gb,
        Family::Logreg,
        Family::Ridge,
        Family::Svm,
        Family::Mlp,
        Family::Vote,
        Family::Stack,
    ];
    /// Members of the default voting and stacking ensembles.
    pub const BASE: [Family; 7] =
        [Family::Tree, Family::Forest, Family::Gb, Family::Logreg, Family::Ridge, Family::Svm, Family::Mlp];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Majority => "majority",
            Family::Tree => "tree",
            Family::Forest => "forest",
            Family::Gb => "gb",
            Family::Logreg => "logreg",
            Family::Ridge => "ridge",
            Family::Svm => "svm",
            Family::Mlp => "mlp",
            Family::Vote => "vote",
            Family::Stack => "stack",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown model family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum HyperParams {
    Majority,
    Tree(TreeParams),
    Forest(ForestParams),
    Gb(GbParams),
    Logreg(LogisticParams),
    Ridge(RidgeParams),
    Svm(SvmParams),
    Mlp(MlpParams),
    Vote(VoteParams),
    Stack(StackParams),
}

impl HyperParams {
    pub fn family(&self) -> Family {
        match self {
            HyperParams::Majority => Family::Majority,
            HyperParams::Tree(_) => Family::Tree,
            HyperParams::Forest(_) => Family::Forest,
            HyperParams::Gb(_) => Family::Gb,
            HyperParams::Logreg(_) => Family::Logreg,
            HyperParams::Ridge(_) => Family::Ridge,
            HyperParams::Svm(_) => Family::Svm,
            HyperParams::Mlp(_) => Family::Mlp,
            HyperParams::Vote(_) => Family::Vote,
            HyperParams::Stack(_) => Family::Stack,
        }
    }

    /// Defaults used when a family is requested without parameters. The
    /// single tree is depth-limited here; `TreeParams::default()` is not.
    pub fn defaults(family: Family) -> HyperParams {
        let base = || Family::BASE.iter().map(|&f| HyperParams::defaults(f)).collect::<Vec<_>>();
        match family {
            Family::Majority => HyperParams::Majority,
            Family::Tree => HyperParams::Tree(TreeParams { max_depth: Some(8), min_samples_leaf: 2, max_features: None }),
            Family::Forest => HyperParams::Forest(ForestParams::default()),
            Family::Gb => HyperParams::Gb(GbParams::default()),
            Family::Logreg => HyperParams::Logreg(LogisticParams::default()),
            Family::Ridge => HyperParams::Ridge(RidgeParams::default()),
            Family::Svm => HyperParams::Svm(SvmParams::default()),
            Family::Mlp => HyperParams::Mlp(MlpParams::default()),
            Family::Vote => HyperParams::Vote(VoteParams { members: base() }),
            Family::Stack => HyperParams::Stack(StackParams {
                members: base(),
                meta: Box::new(HyperParams::Logreg(LogisticParams::default())),
                folds: 5,
            }),
        }
    }

    /// Candidates searched by [`tune`]. Ensembles are not tuned.
    pub fn grid(family: Family) -> Vec<HyperParams> {
        match family {
            Family::Tree => [Some(4), Some(8), None]
                .into_iter()
                .flat_map(|d| [1, 5].map(|m| HyperParams::Tree(TreeParams { max_depth: d, min_samples_leaf: m, max_features: None })))
                .collect(),
            Family::Forest => [Some(8), None]
                .into_iter()
                .map(|d| HyperParams::Forest(ForestParams { max_depth: d, ..Default::default() }))
                .collect(),
            Family::Gb => [(50, 2), (50, 3), (150, 2), (150, 3)]
                .into_iter()
                .map(|(r, d)| HyperParams::Gb(GbParams { rounds: r, max_depth: d, ..Default::default() }))
                .collect(),
            Family::Logreg => [1e-3, 1e-2, 1e-1, 1.0]
                .into_iter()
                .map(|l| HyperParams::Logreg(LogisticParams { lambda: l, ..Default::default() }))
                .collect(),
            Family::Ridge => [0.1, 1.0, 10.0, 100.0]
                .into_iter()
                .map(|l| HyperParams::Ridge(RidgeParams { lambda: l }))
                .collect(),
            Family::Svm => [0.1, 1.0, 10.0]
                .into_iter()
                .flat_map(|c| {
                    [Kernel::Linear, Kernel::Rbf { gamma: None }]
                        .map(|kernel| HyperParams::Svm(SvmParams { c, kernel, ..Default::default() }))
                })
                .collect(),
            Family::Mlp => [vec![32], vec![64, 32]]
                .into_iter()
                .flat_map(|h| [1e-4, 1e-2].map(|l2| HyperParams::Mlp(MlpParams { hidden: h.clone(), l2, ..Default::default() })))
                .collect(),
            f => vec![HyperParams::defaults(f)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Model {
    Majority(MajorityModel),
    Tree(DecisionTree),
    Forest(RandomForest),
    Gb(GradientBoosting),
    Logreg(LinearModel),
    Ridge(LinearModel),
    Svm(Svm),
    Mlp(Mlp),
    Vote(VoteModel),
    Stack(StackingModel),
}

impl Classifier for Model {
    fn classes(&self) -> &[ClassLabel] {
        match self {
            Model::Majority(m) => &m.classes,
            Model::Tree(m) => &m.classes,
            Model::Forest(m) => &m.classes,
            Model::Gb(m) => &m.classes,
            Model::Logreg(m) | Model::Ridge(m) => &m.classes,
            Model::Svm(m) => &m.classes,
            Model::Mlp(m) => &m.classes,
            Model::Vote(m) => &m.classes,
            Model::Stack(m) => &m.classes,
        }
    }

    fn predict_scores(&self, row: &[f64]) -> Vec<f64> {
        match self {
            Model::Majority(m) => m.priors.clone(),
            Model::Tree(m) => m.predict_scores(row),
            Model::Forest(m) => m.predict_scores(row),
            Model::Gb(m) => m.predict_scores(row),
            Model::Logreg(m) | Model::Ridge(m) => m.predict_scores(row),
            Model::Svm(m) => m.predict_scores(row),
            Model::Mlp(m) => m.predict_scores(row),
            Model::Vote(m) => ensemble::vote_scores(&m.members, &m.classes, row),
            Model::Stack(m) => m.predict_scores(row),
        }
    }
}

impl Model {
    pub fn family(&self) -> Family {
        match self {
            Model::Majority(_) => Family::Majority,
            Model::Tree(_) => Family::Tree,
            Model::Forest(_) => Family::Forest,
            Model::Gb(_) => Family::Gb,
            Model::Logreg(_) => Family::Logreg,
            Model::Ridge(_) => Family::Ridge,
            Model::Svm(_) => Family::Svm,
            Model::Mlp(_) => Family::Mlp,
            Model::Vote(_) => Family::Vote,
            Model::Stack(_) => Family::Stack,
        }
    }

    pub fn accuracy(&self, data: &LabeledDataset) -> f64 {
        accuracy(&self.predict_batch(data.x.view()), &data.y)
    }
}

pub fn train(hp: &HyperParams, data: &LabeledDataset, seed: u64) -> Result<Model> {
    data.validate()?;
    Ok(match hp {
        HyperParams::Majority => Model::Majority(MajorityModel::fit(data)),
        HyperParams::Tree(p) => Model::Tree(DecisionTree::fit(data, p)),
        HyperParams::Forest(p) => Model::Forest(RandomForest::fit(data, p, seed)),
        HyperParams::Gb(p) => Model::Gb(GradientBoosting::fit(data, p, seed)),
        HyperParams::Logreg(p) => Model::Logreg(linear::fit_logistic(data, p)),
        HyperParams::Ridge(p) => Model::Ridge(linear::fit_ridge(data, p)),
        HyperParams::Svm(p) => Model::Svm(Svm::fit(data, p)),
        HyperParams::Mlp(p) => Model::Mlp(Mlp::fit(data, p, seed)),
        HyperParams::Vote(p) => Model::Vote(VoteModel::fit(data, p, seed)?),
        HyperParams::Stack(p) => Model::Stack(StackingModel::fit(data, p, seed)?.0),
    })
}

/// Picks the grid candidate with the best accuracy on a stratified 20%
/// validation split of `data` (first candidate wins ties).
pub fn tune(family: Family, data: &LabeledDataset, seed: u64) -> Result<HyperParams> {
    let grid = HyperParams::grid(family);
    if grid.len() == 1 {
        return Ok(grid.into_iter().next().expect("one candidate"));
    }
    let (fit_idx, val_idx) = stratified_holdout(&data.y, 0.2, seed);
    if val_idx.is_empty() || fit_idx.is_empty() {
        return Ok(HyperParams::defaults(family));
    }
    let (fit, val) = (data.subset(&fit_idx), data.subset(&val_idx));
    let scores = grid
        .par_iter()
        .map(|hp| train(hp, &fit, seed).map(|m| m.accuracy(&val)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(grid[argmax(&scores)].clone())
}

pub const MODEL_FORMAT: &str = "harmonia-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: Model,
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    let file = ModelFile { format: MODEL_FORMAT.into(), version: MODEL_VERSION, model: model.clone() };
    let json = serde_json::to_string(&file).expect("model serializes");
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::json(path.display(), e))?;
    if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
        return Err(Error::Config(format!(
            "{}: unsupported model file {} v{}",
            path.display(),
            file.format,
            file.version
        )));
    }
    Ok(file.model)
}
