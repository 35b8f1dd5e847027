use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

pub const PCA_COMPONENTS: usize = 30;
pub const SVD_COMPONENTS: usize = 9;

/// PCA and truncated-SVD bases fitted on one training matrix.
///
/// Bases are stored column-per-component (`d × n`). When the data has fewer
/// directions than requested, the missing components are zero vectors so the
/// output width stays fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionModel {
    pub mean: Vec<f64>,
    pub pca_basis: Array2<f64>,
    pub explained_variance: Vec<f64>,
    pub svd_basis: Array2<f64>,
    pub singular_values: Vec<f64>,
}

/// Flips a direction so its largest-magnitude entry is positive.
fn canonical_sign(v: &mut [f64]) {
    let pivot = v
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, &x)| if x.abs() > bv.abs() { (i, x) } else { (bi, bv) });
    if pivot.1 < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn to_nalgebra(x: &ArrayView2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[[i, j]])
}

impl ProjectionModel {
    pub fn fit(x: ArrayView2<f64>, n_pca: usize, n_svd: usize) -> Self {
        let (n, d) = x.dim();
        let mean: Vec<f64> = if n == 0 {
            vec![0.0; d]
        } else {
            x.mean_axis(Axis(0)).expect("rows").to_vec()
        };
        let mut centered = x.to_owned();
        for mut row in centered.rows_mut() {
            row.iter_mut().zip(&mean).for_each(|(v, m)| *v -= m);
        }
        let xc = to_nalgebra(&centered.view());

        // PCA: eigen-decomposition of the covariance matrix
        let cov = if n > 0 { xc.transpose() * &xc / n as f64 } else { DMatrix::zeros(d, d) };
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let mut pca_basis = Array2::zeros((d, n_pca));
        let mut explained_variance = vec![0.0; n_pca];
        for (k, &j) in order.iter().take(n_pca).enumerate() {
            let mut v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
            canonical_sign(&mut v);
            for (i, x) in v.into_iter().enumerate() {
                pca_basis[[i, k]] = x;
            }
            explained_variance[k] = eig.eigenvalues[j].max(0.0);
        }

        // truncated SVD of the centered matrix
        let mut svd_basis = Array2::zeros((d, n_svd));
        let mut singular_values = vec![0.0; n_svd];
        if n > 0 && d > 0 {
            let svd = xc.svd(false, true);
            let vt = svd.v_t.expect("v_t requested");
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&a, &b| {
                svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b))
            });
            for (k, &j) in order.iter().take(n_svd).enumerate() {
                let mut v: Vec<f64> = vt.row(j).iter().copied().collect();
                canonical_sign(&mut v);
                for (i, x) in v.into_iter().enumerate() {
                    svd_basis[[i, k]] = x;
                }
                singular_values[k] = svd.singular_values[j];
            }
        }
        ProjectionModel {
            mean,
            pca_basis,
            explained_variance,
            svd_basis,
            singular_values,
        }
    }

    fn center(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut c = x.to_owned();
        for mut row in c.rows_mut() {
            row.iter_mut().zip(&self.mean).for_each(|(v, m)| *v -= m);
        }
        c
    }

    pub fn pca_scores(&self, x: ArrayView2<f64>) -> Array2<f64> {
        self.center(x).dot(&self.pca_basis)
    }

    pub fn svd_scores(&self, x: ArrayView2<f64>) -> Array2<f64> {
        self.center(x).dot(&self.svd_basis)
    }

    /// PCA scores followed by SVD scores.
    pub fn apply(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let c = self.center(x);
        ndarray::concatenate![Axis(1), c.dot(&self.pca_basis), c.dot(&self.svd_basis)]
    }

    /// Maps PCA scores back to the input space.
    pub fn reconstruct(&self, scores: ArrayView2<f64>) -> Array2<f64> {
        let mut out = scores.dot(&self.pca_basis.t());
        for mut row in out.rows_mut() {
            row.iter_mut().zip(&self.mean).for_each(|(v, m)| *v += m);
        }
        out
    }

    pub fn width(&self) -> usize {
        self.pca_basis.ncols() + self.svd_basis.ncols()
    }

    pub fn column_names(&self) -> Vec<String> {
        (0..self.pca_basis.ncols())
            .map(|i| format!("pca_{i}"))
            .chain((0..self.svd_basis.ncols()).map(|i| format!("svd_{i}")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, d), |(_, j)| rng.random::<f64>() * (j + 1) as f64)
    }

    #[test]
    fn pca_basis_is_orthonormal() {
        let x = random(200, 40, 1);
        let m = ProjectionModel::fit(x.view(), PCA_COMPONENTS, SVD_COMPONENTS);
        let gram = m.pca_basis.t().dot(&m.pca_basis);
        for ((i, j), v) in gram.indexed_iter() {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-8, "({i},{j}) = {v}");
        }
        assert!(m.explained_variance.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.singular_values.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(m.apply(x.view()).ncols(), 39);
    }

    #[test]
    fn full_basis_reconstructs_input() {
        let x = random(10, 10, 2);
        let m = ProjectionModel::fit(x.view(), 10, 10);
        let back = m.reconstruct(m.pca_scores(x.view()).view());
        for (a, b) in back.iter().zip(x.iter()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn svd_agrees_with_pca_up_to_sign() {
        let x = random(100, 12, 3);
        let m = ProjectionModel::fit(x.view(), 12, 5);
        for k in 0..5 {
            let dot: f64 = (0..12).map(|i| m.pca_basis[[i, k]] * m.svd_basis[[i, k]]).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-8);
            // singular value² / n equals the eigenvalue
            assert!((m.singular_values[k].powi(2) / 100.0 - m.explained_variance[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn narrow_data_pads_with_zero_components() {
        let x = random(5, 3, 4);
        let m = ProjectionModel::fit(x.view(), 30, 9);
        assert_eq!(m.apply(x.view()).dim(), (5, 39));
        assert!(m.pca_basis.column(10).iter().all(|&v| v == 0.0));
    }
}
