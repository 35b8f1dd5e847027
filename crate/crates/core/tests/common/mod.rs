//! Brute-force oracles shared by the integration and acceptance tests. They
//! deliberately avoid the library's own geometry helpers.

#![allow(dead_code)]

use harmonia::scene::{Canvas, Composition, Geometry, ShapeColor, ShapeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, TAU};

pub const GRAY: u8 = 0;
pub const BLACK: u8 = 1;
pub const WHITE: u8 = 2;

/// Up to `max_shapes` shapes of random kind, color, size, position and
/// rotation on a 512² canvas.
pub fn random_scene(seed: u64, max_shapes: usize) -> Composition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(0..=max_shapes);
    let mut c = Composition::empty(format!("{seed:016x}"), Canvas::default());
    for _ in 0..n {
        let geometry = match rng.random_range(0..3) {
            0 => Geometry::Circle { radius: rng.random_range(0.03..0.2) },
            1 => Geometry::Rectangle { width: rng.random_range(0.05..0.4), height: rng.random_range(0.05..0.4) },
            _ => Geometry::Triangle { circumradius: rng.random_range(0.05..0.25) },
        };
        let color = if rng.random_bool(0.5) { ShapeColor::Black } else { ShapeColor::White };
        c.shapes.push(ShapeSpec {
            geometry,
            color,
            center: [rng.random(), rng.random()],
            rotation: rng.random_range(0.0..TAU),
        });
    }
    c
}

fn cross(o: [f64; 2], a: [f64; 2], p: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
}

/// Closed convex polygon test, either winding.
fn in_convex(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let signs: Vec<f64> = (0..poly.len()).map(|i| cross(poly[i], poly[(i + 1) % poly.len()], p)).collect();
    signs.iter().all(|&s| s >= 0.0) || signs.iter().all(|&s| s <= 0.0)
}

/// Outline of a polygonal shape: rectangle corners rotated about the
/// center; triangle vertices on the circumcircle, the first pointing to
/// y = 0 at rotation 0.
pub fn polygon(s: &ShapeSpec) -> Option<Vec<[f64; 2]>> {
    let [cx, cy] = s.center;
    let (sin, cos) = s.rotation.sin_cos();
    match s.geometry {
        Geometry::Circle { .. } => None,
        Geometry::Rectangle { width, height } => Some(
            [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                .iter()
                .map(|&(a, b)| {
                    let (a, b) = (a * width / 2.0, b * height / 2.0);
                    [cx + cos * a - sin * b, cy + sin * a + cos * b]
                })
                .collect(),
        ),
        Geometry::Triangle { circumradius } => Some(
            (0..3)
                .map(|k| {
                    let t = s.rotation - FRAC_PI_2 + TAU * k as f64 / 3.0;
                    [cx + circumradius * t.cos(), cy + circumradius * t.sin()]
                })
                .collect(),
        ),
    }
}

pub fn inside(s: &ShapeSpec, p: [f64; 2]) -> bool {
    match s.geometry {
        Geometry::Circle { radius } => (p[0] - s.center[0]).powi(2) + (p[1] - s.center[1]).powi(2) <= radius * radius,
        _ => in_convex(&polygon(s).expect("polygonal"), p),
    }
}

/// Full-canvas scan: pixel (x, y) belongs to the shape iff its center does.
pub fn mask(s: &ShapeSpec, res: u32) -> Vec<bool> {
    let r = res as f64;
    let mut m = vec![false; (res * res) as usize];
    for y in 0..res {
        for x in 0..res {
            m[(y * res + x) as usize] = inside(s, [(x as f64 + 0.5) / r, (y as f64 + 0.5) / r]);
        }
    }
    m
}

/// Painter's-algorithm raster with classes GRAY/BLACK/WHITE, plus each
/// shape's own mask.
pub fn paint(c: &Composition) -> (Vec<u8>, Vec<Vec<bool>>) {
    let res = c.canvas.resolution;
    let masks: Vec<Vec<bool>> = c.shapes.iter().map(|s| mask(s, res)).collect();
    let mut px = vec![GRAY; (res * res) as usize];
    for (s, m) in c.shapes.iter().zip(&masks) {
        let v = if s.color == ShapeColor::Black { BLACK } else { WHITE };
        for (p, &inside) in px.iter_mut().zip(m) {
            if inside {
                *p = v;
            }
        }
    }
    (px, masks)
}

/// (gray, black, white) counts over pixels whose (x, y) pass `keep`.
pub fn count(px: &[u8], res: u32, keep: impl Fn(u32, u32) -> bool) -> [u64; 3] {
    let mut out = [0u64; 3];
    for y in 0..res {
        for x in 0..res {
            if keep(x, y) {
                out[px[(y * res + x) as usize] as usize] += 1;
            }
        }
    }
    out
}

/// Rule-of-thirds windows: pixel centers within side/2 of the intersection.
pub fn third_windows(px: &[u8], res: u32) -> [[u64; 3]; 4] {
    let side = (res / 6) as f64;
    let near = |i: u32, k: f64| ((i as f64 + 0.5) - k * res as f64 / 3.0).abs() <= side / 2.0;
    let mut out = [[0; 3]; 4];
    for (w, (kx, ky)) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (2.0, 2.0)].into_iter().enumerate() {
        out[w] = count(px, res, |x, y| near(x, kx) && near(y, ky));
    }
    out
}

/// Left and right thirds by pixel center.
pub fn thirds(px: &[u8], res: u32) -> [[u64; 3]; 2] {
    let w = res as f64;
    [
        count(px, res, |x, _| x as f64 + 0.5 < w / 3.0),
        count(px, res, |x, _| x as f64 + 0.5 > 2.0 * w / 3.0),
    ]
}

/// Components of the nearest-neighbour graph by repeated label merging.
pub fn group_count(c: &Composition) -> usize {
    let n = c.shapes.len();
    let d = |i: usize, j: usize| {
        let (a, b) = (c.shapes[i].center, c.shapes[j].center);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    };
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let Some(j) = (0..n).filter(|&j| j != i).min_by(|&a, &b| d(i, a).total_cmp(&d(i, b))) else {
            continue;
        };
        let (from, to) = (label[j], label[i]);
        for l in label.iter_mut() {
            if *l == from {
                *l = to;
            }
        }
    }
    label.sort_unstable();
    label.dedup();
    label.len()
}

/// (min, max, mean, population std); zeros when empty.
pub fn summary(xs: &[f64]) -> [f64; 4] {
    if xs.is_empty() {
        return [0.0; 4];
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    [
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        mean,
        var.sqrt(),
    ]
}

/// Every (left, right) pair by center x against 0.5, masses from the full
/// per-shape masks.
pub fn gravity(c: &Composition, masks: &[Vec<bool>]) -> [f64; 4] {
    let area = (c.canvas.resolution as f64).powi(2);
    let mass: Vec<f64> = masks.iter().map(|m| m.iter().filter(|&&b| b).count() as f64 / area).collect();
    let mut forces = Vec::new();
    for i in 0..c.shapes.len() {
        for j in 0..c.shapes.len() {
            let (a, b) = (c.shapes[i].center, c.shapes[j].center);
            if a[0] < 0.5 && b[0] >= 0.5 {
                let r = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                if r > 0.0 {
                    forces.push(1e-8 * mass[i] * mass[j] / r);
                }
            }
        }
    }
    summary(&forces)
}

/// Occupied-cell fractions for 2, 4, …, 64 cells per side.
pub fn occupancy(px: &[u8], res: u32) -> Vec<f64> {
    [2u32, 4, 8, 16, 32, 64]
        .iter()
        .map(|&g| {
            let cell = res / g;
            let mut hit = vec![false; (g * g) as usize];
            for y in 0..res {
                for x in 0..res {
                    if px[(y * res + x) as usize] != GRAY {
                        hit[((y / cell) * g + x / cell) as usize] = true;
                    }
                }
            }
            hit.iter().filter(|&&h| h).count() as f64 / (g * g) as f64
        })
        .collect()
}

/// Least-squares quadratic through (i, f[i]) by Cramer's rule on the
/// normal equations; returns (a, b, c) of a·x² + b·x + c.
pub fn quadratic_fit(f: &[f64]) -> [f64; 3] {
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for (i, &y) in f.iter().enumerate() {
        let x = i as f64;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += x.powi(k as i32);
        }
        for (k, tk) in t.iter_mut().enumerate() {
            *tk += y * x.powi(k as i32);
        }
    }
    // unknowns ordered (c, b, a): row k is Σ x^(k+j) · coef_j = Σ y x^k
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(m);
    let solve = |col: usize| {
        let mut mm = m;
        for r in 0..3 {
            mm[r][col] = t[r];
        }
        det3(mm) / d
    };
    [solve(2), solve(1), solve(0)]
}

pub fn fit_residual(f: &[f64], coef: [f64; 3]) -> f64 {
    f.iter()
        .enumerate()
        .map(|(i, &y)| {
            let x = i as f64;
            (coef[0] * x * x + coef[1] * x + coef[2] - y).powi(2)
        })
        .sum()
}

/// Deviation model on the half-point grid as a Markov chain over the
/// states 1, 1.5, …, 5: the row for state `x` uses the class of `x`
/// rounded half up.
pub fn transition_matrix(masses: &[[f64; 17]; 5]) -> [[f64; 9]; 9] {
    let mut p = [[0.0; 9]; 9];
    for (s, row) in p.iter_mut().enumerate() {
        let x = 1.0 + 0.5 * s as f64;
        let class = ((x + 0.5).floor() as usize).clamp(1, 5);
        for (k, &m) in masses[class - 1].iter().enumerate() {
            let next = (x + (-4.0 + 0.5 * k as f64)).clamp(1.0, 5.0);
            row[((next - 1.0) * 2.0).round() as usize] += m;
        }
    }
    p
}

/// Stationary distribution by power iteration from `start`.
pub fn stationary(p: &[[f64; 9]; 9], start: usize, steps: usize) -> [f64; 9] {
    let mut v = [0.0; 9];
    v[start] = 1.0;
    for _ in 0..steps {
        let mut next = [0.0; 9];
        for (i, &vi) in v.iter().enumerate() {
            for (j, &pij) in p[i].iter().enumerate() {
                next[j] += vi * pij;
            }
        }
        v = next;
    }
    v
}

pub fn state_mean(v: &[f64; 9]) -> f64 {
    v.iter().enumerate().map(|(s, p)| p * (1.0 + 0.5 * s as f64)).sum()
}

/// Relative closeness used for gradient checks.
pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-6)
}

/// Compares the library's pixel and scene features with the oracles above;
/// returns one message per mismatch.
pub fn feature_mismatches(c: &Composition) -> Vec<String> {
    use harmonia::features as f;
    use harmonia::scene::{rasterize, Pixel};

    let res = c.canvas.resolution;
    let r = rasterize(c);
    let (px, masks) = paint(c);
    let mut bad = Vec::new();
    let as3 = |p: harmonia::scene::PixelCounts| [p.gray, p.black, p.white];

    let lib_px: Vec<u8> = r
        .pixels()
        .iter()
        .map(|p| match p {
            Pixel::Gray => GRAY,
            Pixel::Black => BLACK,
            Pixel::White => WHITE,
        })
        .collect();
    let differing = lib_px.iter().zip(&px).filter(|(a, b)| a != b).count();
    if differing != 0 {
        bad.push(format!("raster: {differing} pixels differ"));
    }
    if f::group_count(c) != group_count(c) {
        bad.push(format!("group_count {} vs {}", f::group_count(c), group_count(c)));
    }
    let all = count(&px, res, |_, _| true);
    if as3(f::color_distribution(&r)) != all {
        bad.push(format!("color_distribution {:?} vs {all:?}", as3(f::color_distribution(&r))));
    }
    let covered = (all[1] + all[2]) as f64 / (res * res) as f64;
    if f::covered_area(&r) != covered {
        bad.push(format!("covered_area {} vs {covered}", f::covered_area(&r)));
    }
    let windows = f::two_third_points(&r).map(as3);
    if windows != third_windows(&px, res) {
        bad.push(format!("two_third_points {windows:?} vs {:?}", third_windows(&px, res)));
    }
    let bal = f::balance(&r).map(as3);
    if bal != thirds(&px, res) {
        bad.push(format!("balance {bal:?} vs {:?}", thirds(&px, res)));
    }
    let g = f::gravity(c, &r);
    let want = gravity(c, &masks);
    for (name, a, b) in [("min", g.min, want[0]), ("max", g.max, want[1]), ("mean", g.mean, want[2]), ("std", g.std, want[3])] {
        if (a - b).abs() > 1e-12 * b.abs() {
            bad.push(format!("gravity {name} {a:e} vs {b:e}"));
        }
    }
    bad
}

pub mod learners {
    use harmonia::autoenc::{flatten, Activation, NetworkParams, NetworkSpec};
    use harmonia::learn::svm::{kernel_matrix, smo};
    use harmonia::learn::{
        argmax, train, Classifier, DecisionTree, GbParams, GradientBoosting, HyperParams, Kernel, LabeledDataset, Mlp,
        MlpActivation, StackParams, StackingModel, TreeParams,
    };
    use harmonia::targets::ClassLabel;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Gaussian blobs with unit spread around class centers `sep` apart.
    pub fn blobs(n: usize, d: usize, classes: &[ClassLabel], sep: f64, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers: Vec<Vec<f64>> =
            classes.iter().map(|_| (0..d).map(|_| sep * rng.random_range(-1.0..1.0)).collect()).collect();
        let mut x = Array2::zeros((n, d));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let c = i % classes.len();
            for j in 0..d {
                let z: f64 = StandardNormal.sample(&mut rng);
                x[[i, j]] = centers[c][j] + z;
            }
            y.push(classes[c]);
        }
        LabeledDataset::new(x, y).unwrap()
    }

    /// SMO dual objective never decreases and ends within tolerance of KKT.
    pub fn smo_dual_monotone(seed: u64) -> Result<(), String> {
        let data = blobs(80, 4, &[ClassLabel::Bad, ClassLabel::Good], 1.0, seed);
        let y: Vec<f64> = data.y.iter().map(|&c| if c == ClassLabel::Good { 1.0 } else { -1.0 }).collect();
        for kernel in [Kernel::Linear, Kernel::Rbf { gamma: Some(0.5) }] {
            let k = kernel_matrix(data.x.view(), kernel);
            let fit = smo(&k, &y, 1.0, 1e-3, 100_000);
            if let Some(w) = fit.dual_history.windows(2).find(|w| w[1] < w[0] - 1e-12 * w[0].abs().max(1.0)) {
                return Err(format!("{kernel:?}: dual fell from {} to {}", w[0], w[1]));
            }
            if fit.kkt_gap > 1e-3 {
                return Err(format!("{kernel:?}: KKT gap {}", fit.kkt_gap));
            }
            if fit.alpha.iter().any(|&a| !(-1e-12..=1.0 + 1e-12).contains(&a)) {
                return Err(format!("{kernel:?}: alpha outside the box"));
            }
        }
        Ok(())
    }

    /// Training loss after each boosting round never increases.
    pub fn boosting_monotone(seed: u64) -> Result<(), String> {
        let data = blobs(150, 5, &ClassLabel::ALL, 0.8, seed);
        let m = GradientBoosting::fit(&data, &GbParams { rounds: 60, subsample: 0.7, ..Default::default() }, seed);
        match m.loss_history.windows(2).find(|w| w[1] > w[0]) {
            Some(w) => Err(format!("loss rose from {} to {}", w[0], w[1])),
            None if m.loss_history.len() < 2 => Err("no rounds accepted".into()),
            None => Ok(()),
        }
    }

    /// Worst relative error of the MLP's backprop against central
    /// differences over every weight and bias.
    pub fn mlp_gradient_error(activation: MlpActivation, seed: u64) -> f64 {
        let data = blobs(12, 4, &ClassLabel::ALL, 1.0, seed);
        let y: Vec<usize> = data.y.iter().map(|c| c.index()).collect();
        let rows: Vec<usize> = (0..data.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = Mlp::init(&[4, 6, 5, 3], activation, ClassLabel::ALL.to_vec(), &mut rng);
        let x = data.x.view();
        let (_, grads) = net.loss_and_grad(x, &y, &rows, 1e-3);
        let eps = 1e-6;
        let mut worst = 0.0f64;
        for l in 0..net.layers.len() {
            for (is_bias, len) in [(false, net.layers[l].w.len()), (true, net.layers[l].b.len())] {
                for i in 0..len {
                    let at = |delta: f64| {
                        let mut m = net.clone();
                        let p = if is_bias { &mut m.layers[l].b[i] } else { &mut m.layers[l].w[i] };
                        *p += delta;
                        m.loss_and_grad(x, &y, &rows, 1e-3).0
                    };
                    let numeric = (at(eps) - at(-eps)) / (2.0 * eps);
                    let analytic = if is_bias { grads[l].b[i] } else { grads[l].w[i] };
                    let scale = analytic.abs().max(numeric.abs()).max(1e-6);
                    worst = worst.max((analytic - numeric).abs() / scale);
                }
            }
        }
        worst
    }

    /// Worst relative error of the autoencoder's backprop: every parameter
    /// of a small network, and `probes` random parameters of the default
    /// 100×100 network.
    pub fn autoenc_gradient_error(seed: u64, probes: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let small = NetworkSpec {
            input_size: 8,
            channels: vec![3, 1],
            hidden_activation: Activation::Tanh,
            code_activation: Activation::Identity,
            output_activation: Activation::Sigmoid,
        };
        let mut worst = 0.0f64;
        for (spec, all) in [(small, true), (NetworkSpec::default(), false)] {
            let params = NetworkParams::init(&spec, seed).unwrap();
            let side = spec.input_size;
            let image: Vec<f64> = (0..side * side).map(|_| rng.random()).collect();
            let analytic = flatten(&params.loss_and_gradient(&image).1);
            let base = params.flat();
            let idx: Vec<usize> =
                if all { (0..base.len()).collect() } else { (0..probes).map(|_| rng.random_range(0..base.len())).collect() };
            let mut probe = params.clone();
            for i in idx {
                let eps = 1e-6;
                let mut w = base.clone();
                w[i] = base[i] + eps;
                probe.set_flat(&w);
                let up = probe.loss(&image);
                w[i] = base[i] - eps;
                probe.set_flat(&w);
                let down = probe.loss(&image);
                let numeric = (up - down) / (2.0 * eps);
                let scale = analytic[i].abs().max(numeric.abs()).max(1e-6);
                worst = worst.max((analytic[i] - numeric).abs() / scale);
            }
        }
        worst
    }

    /// Random dataset of `n` distinct rows with arbitrary labels; features
    /// are small integers so duplicates and ties are common.
    pub fn consistent_dataset(n: usize, d: usize, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        while rows.len() < n {
            let r: Vec<f64> = (0..d).map(|_| rng.random_range(0..4) as f64).collect();
            if !rows.contains(&r) {
                rows.push(r);
            }
        }
        let y: Vec<ClassLabel> = (0..n).map(|_| ClassLabel::ALL[rng.random_range(0..3)]).collect();
        let x = Array2::from_shape_fn((n, d), |(i, j)| rows[i][j]);
        LabeledDataset::new(x, y).unwrap()
    }

    pub fn tree_training_accuracy(data: &LabeledDataset) -> f64 {
        let t = DecisionTree::fit(data, &TreeParams::default());
        let pred: Vec<ClassLabel> =
            (0..data.len()).map(|i| t.classes[argmax(&t.predict_scores(&data.x.row(i).to_vec()))]).collect();
        harmonia::learn::accuracy(&pred, &data.y)
    }

    /// Fits a stacking ensemble and checks its out-of-fold audit.
    pub fn stacking_leak_free(seed: u64) -> Result<(), String> {
        let data = blobs(90, 3, &ClassLabel::ALL, 1.0, seed);
        let p = StackParams {
            members: vec![HyperParams::defaults(harmonia::learn::Family::Tree), HyperParams::defaults(harmonia::learn::Family::Logreg)],
            meta: Box::new(HyperParams::defaults(harmonia::learn::Family::Logreg)),
            folds: 5,
        };
        let (model, audit) = StackingModel::fit(&data, &p, seed).map_err(|e| e.to_string())?;
        if !audit.leak_free() {
            return Err("a meta-feature row came from a model trained on that row".into());
        }
        if audit.fold_of_row.len() != data.len() {
            return Err("audit does not cover every row".into());
        }
        let stacked = train(&HyperParams::Stack(p), &data, seed).map_err(|e| e.to_string())?;
        let same = (0..data.len()).all(|i| {
            let row = data.x.row(i).to_vec();
            stacked.predict_scores(&row) == model.predict_scores(&row)
        });
        if !same {
            return Err("train() and StackingModel::fit disagree".into());
        }
        Ok(())
    }
}

/// Random deviation model with positive mass on −1, −0.5, 0, 0.5, 1 for
/// every class, so the chain over half-point states mixes.
pub fn random_deviation_model(seed: u64) -> [[f64; 17]; 5] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = [[0.0; 17]; 5];
    for row in &mut m {
        let w: Vec<f64> = (0..5).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        for (k, v) in w.iter().enumerate() {
            row[6 + k] = v / total;
        }
    }
    m
}

/// Largest |simulated − stationary| / standard error over the five start
/// classes, with the simulated and analytic values.
pub fn convergence_z(masses: &[[f64; 17]; 5], rounds: usize, trials: usize, seed: u64) -> (f64, Vec<(f64, f64)>) {
    use harmonia::targets::{simulate_convergence, DeviationDistribution};
    let dist = DeviationDistribution::from_masses(*masses).unwrap();
    let sim = simulate_convergence(&dist, rounds, trials, seed);
    let p = transition_matrix(masses);
    let mut worst = 0.0f64;
    let mut pairs = Vec::new();
    for c in 0..5 {
        let want = state_mean(&stationary(&p, 2 * c, 5000));
        let z = (sim.values[c] - want).abs() / sim.std_errors[c].max(1e-300);
        worst = worst.max(z);
        pairs.push((sim.values[c], want));
    }
    (worst, pairs)
}

/// Handcrafted features of `n` generated compositions plus random stand-ins
/// for the autoencoder and visual-word blocks, at their real widths.
pub fn synthetic_raw(n: usize, seed: u64) -> harmonia::pipeline::RawFeatures {
    use harmonia::pipeline::{Block, RawFeatures};
    use harmonia::scene::{generate, GenConfig};
    use rand_distr::{Distribution, Exp, StandardNormal};

    let comps: Vec<Composition> = (0..n).map(|i| generate(&GenConfig::default(), seed * 10_000 + i as u64).unwrap()).collect();
    let handcrafted = harmonia::harness::handcrafted_block(&comps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ae_names = harmonia::autoenc::column_names(&harmonia::autoenc::NetworkSpec::default());
    let ae: Vec<Vec<f64>> = (0..n).map(|_| ae_names.iter().map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
    let bovw_names = harmonia::bovw::column_names(harmonia::bovw::BovwConfig::default().sizes);
    let exp = Exp::new(1.0).unwrap();
    let bovw: Vec<Vec<f64>> = (0..n).map(|_| bovw_names.iter().map(|_| exp.sample(&mut rng)).collect()).collect();
    RawFeatures {
        handcrafted,
        autoenc: Some(Block::from_rows(ae_names, &ae).unwrap()),
        bovw: Some(Block::from_rows(bovw_names, &bovw).unwrap()),
    }
}
