//! Linear probes on frozen embeddings.
//!
//! A probe is multinomial logistic regression fitted by full-batch gradient
//! descent with backtracking, scored by macro-F1 on held-out rows. Training
//! rows are drawn per class from a labelled-audio budget in seconds, so a
//! budget of 10 s means "ten seconds of each class's audio".

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dsp::{MelChunk, CHUNK_SECONDS, HOP_SECONDS};
use crate::model::{Autodecompose, Pooling, Which};
use crate::{Error, Result, RngStream};

/// Seconds of audio behind one mean-pooled chunk row.
pub const SECONDS_PER_CHUNK: f64 = CHUNK_SECONDS;
/// Seconds of audio behind one per-frame row.
pub const SECONDS_PER_FRAME: f64 = HOP_SECONDS;

/// Rows of embeddings with dense class labels.
///
/// Consecutive runs of `group_size` rows come from the same chunk and are
/// always kept on the same side of a split, so per-frame probes never test on
/// frames of a chunk they were trained on.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledEmbeddings {
    dim: usize,
    rows: Vec<f64>,
    labels: Vec<usize>,
    n_classes: usize,
    seconds_per_row: f64,
    group_size: usize,
}

impl LabeledEmbeddings {
    pub fn new(
        dim: usize,
        rows: Vec<f64>,
        labels: Vec<usize>,
        n_classes: usize,
        seconds_per_row: f64,
        group_size: usize,
    ) -> Result<Self> {
        if dim == 0 || rows.len() != labels.len() * dim {
            return Err(Error::InvalidInput(format!(
                "{} values do not form {} rows of width {dim}",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::InvalidInput(format!(
                "label {bad} outside [0, {n_classes})"
            )));
        }
        if labels.len() < n_classes {
            return Err(Error::InvalidInput(format!(
                "{} rows cannot cover {n_classes} classes",
                labels.len()
            )));
        }
        if !(seconds_per_row > 0.0) {
            return Err(Error::InvalidInput("seconds_per_row must be positive".into()));
        }
        if group_size == 0 || labels.len() % group_size != 0 {
            return Err(Error::InvalidInput(format!(
                "{} rows do not split into groups of {group_size}",
                labels.len()
            )));
        }
        for g in labels.chunks(group_size) {
            if g.iter().any(|&l| l != g[0]) {
                return Err(Error::InvalidInput("a row group mixes labels".into()));
            }
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("embedding rows".into()));
        }
        Ok(Self {
            dim,
            rows,
            labels,
            n_classes,
            seconds_per_row,
            group_size,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub fn seconds_per_row(&self) -> f64 {
        self.seconds_per_row
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    /// Rows selected by group index, in the given order.
    fn select_groups(&self, groups: &[usize]) -> Self {
        let g = self.group_size;
        let mut rows = Vec::with_capacity(groups.len() * g * self.dim);
        let mut labels = Vec::with_capacity(groups.len() * g);
        for &gi in groups {
            rows.extend_from_slice(&self.rows[gi * g * self.dim..(gi + 1) * g * self.dim]);
            labels.extend_from_slice(&self.labels[gi * g..(gi + 1) * g]);
        }
        Self {
            dim: self.dim,
            rows,
            labels,
            n_classes: self.n_classes,
            seconds_per_row: self.seconds_per_row,
            group_size: g,
        }
    }
}

/// Training rows per class bought by `seconds` of labelled audio.
pub fn budget_rows(seconds: f64, seconds_per_row: f64) -> usize {
    // The tolerance keeps exact ratios such as 10 / 0.016 from rounding down.
    libm::floor(seconds / seconds_per_row + 1e-9).max(0.0) as usize
}

/// Per class, draw `floor(seconds / seconds_per_row)` rows (rounded down to
/// whole groups) for training; everything else is test.
pub fn split_by_budget(
    data: &LabeledEmbeddings,
    seconds: f64,
    rng: &mut RngStream,
) -> Result<(LabeledEmbeddings, LabeledEmbeddings)> {
    let per_class = budget_rows(seconds, data.seconds_per_row) / data.group_size;
    if !(seconds > 0.0) || per_class == 0 {
        return Err(Error::Protocol(format!(
            "a budget of {seconds} s buys no training rows at {} s per row",
            data.seconds_per_row
        )));
    }
    let n_groups = data.len() / data.group_size;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); data.n_classes];
    for gi in 0..n_groups {
        by_class[data.labels[gi * data.group_size]].push(gi);
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut groups) in by_class.into_iter().enumerate() {
        if groups.len() <= per_class {
            return Err(Error::Protocol(format!(
                "class {class} has {} rows, needs more than {} for a {seconds} s budget",
                groups.len() * data.group_size,
                per_class * data.group_size
            )));
        }
        rng.shuffle(&mut groups);
        let (tr, te) = groups.split_at(per_class);
        train.extend_from_slice(tr);
        test.extend_from_slice(te);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.select_groups(&train), data.select_groups(&test)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogRegConfig {
    /// L2 strength on the weights (biases are not penalized).
    pub lambda: f64,
    pub iterations: usize,
    /// Initial step size of the backtracking search.
    pub learning_rate: f64,
    /// Standardize features with training-set mean and deviation first.
    pub standardize: bool,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-3,
            iterations: 500,
            learning_rate: 1.0,
            standardize: true,
        }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !(self.learning_rate > 0.0) {
            return Err(Error::Config(
                "probe lambda must be >= 0 and learning_rate > 0".into(),
            ));
        }
        Ok(())
    }
}

/// A fitted multinomial logistic regression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub n_classes: usize,
    pub dim: usize,
    /// `n_classes x dim`, row-major.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    /// Feature shift and scale applied before the affine map.
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
    /// Objective value after every accepted iteration (first entry: at init).
    pub objective_trace: Vec<f64>,
}

impl LogRegModel {
    pub fn logits(&self, x: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let w = &self.weights[k * self.dim..(k + 1) * self.dim];
            let mut z = self.biases[k];
            for j in 0..self.dim {
                z += w[j] * (x[j] - self.shift[j]) * self.scale[j];
            }
            *o = z;
        }
    }

    /// Class probabilities of one row.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n_classes];
        self.logits(x, &mut p);
        softmax_in_place(&mut p);
        p
    }

    pub fn predict(&self, data: &LabeledEmbeddings) -> Vec<usize> {
        let mut z = vec![0.0; self.n_classes];
        (0..data.len())
            .map(|i| {
                self.logits(data.row(i), &mut z);
                argmax(&z)
            })
            .collect()
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in z.iter_mut() {
        *v = libm::exp(*v - m);
        s += *v;
    }
    for v in z.iter_mut() {
        *v /= s;
    }
}

/// Standardized design matrix shared by objective evaluations.
struct Problem<'a> {
    x: Vec<f64>,
    labels: &'a [usize],
    n: usize,
    d: usize,
    k: usize,
    lambda: f64,
}

impl Problem<'_> {
    /// Objective `mean CE + lambda/2 |W|^2` and, if asked, its gradient
    /// (weights then biases, same layout as the parameter vector).
    fn eval(&self, theta: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let (d, k) = (self.d, self.k);
        let (w, b) = theta.split_at(k * d);
        let mut loss = 0.0;
        let mut z = vec![0.0; k];
        let mut g_acc = grad.as_ref().map(|_| vec![0.0; theta.len()]);
        for i in 0..self.n {
            let x = &self.x[i * d..(i + 1) * d];
            for c in 0..k {
                let wc = &w[c * d..(c + 1) * d];
                z[c] = b[c] + wc.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            }
            let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + libm::log(z.iter().map(|&v| libm::exp(v - m)).sum::<f64>());
            let y = self.labels[i];
            loss += lse - z[y];
            if let Some(g) = g_acc.as_mut() {
                for c in 0..k {
                    let r = libm::exp(z[c] - lse) - if c == y { 1.0 } else { 0.0 };
                    let gw = &mut g[c * d..(c + 1) * d];
                    for j in 0..d {
                        gw[j] += r * x[j];
                    }
                    g[k * d + c] += r;
                }
            }
        }
        let n = self.n as f64;
        let reg: f64 = w.iter().map(|v| v * v).sum::<f64>() * 0.5 * self.lambda;
        if let (Some(out), Some(acc)) = (grad, g_acc) {
            for (i, o) in out.iter_mut().enumerate() {
                *o = acc[i] / n + if i < k * d { self.lambda * w[i] } else { 0.0 };
            }
        }
        loss / n + reg
    }
}

/// Full-batch gradient descent with Armijo backtracking; the step grows again
/// after every accepted iteration, so the objective never increases.
pub fn fit_logreg(train: &LabeledEmbeddings, cfg: &LogRegConfig) -> Result<LogRegModel> {
    cfg.validate()?;
    let (n, d, k) = (train.len(), train.dim, train.n_classes);
    if n == 0 {
        return Err(Error::Protocol("empty probe training set".into()));
    }
    let mut shift = vec![0.0; d];
    let mut scale = vec![1.0; d];
    if cfg.standardize {
        for i in 0..n {
            for (s, v) in shift.iter_mut().zip(train.row(i)) {
                *s += v / n as f64;
            }
        }
        let mut var = vec![0.0; d];
        for i in 0..n {
            for j in 0..d {
                let c = train.row(i)[j] - shift[j];
                var[j] += c * c / n as f64;
            }
        }
        for (s, v) in scale.iter_mut().zip(&var) {
            *s = if *v > 1e-12 { 1.0 / libm::sqrt(*v) } else { 1.0 };
        }
    }
    let mut x = Vec::with_capacity(n * d);
    for i in 0..n {
        x.extend(
            train
                .row(i)
                .iter()
                .zip(shift.iter().zip(&scale))
                .map(|(v, (m, s))| (v - m) * s),
        );
    }
    let problem = Problem {
        x,
        labels: &train.labels,
        n,
        d,
        k,
        lambda: cfg.lambda,
    };
    let mut theta = vec![0.0; k * d + k];
    let mut grad = vec![0.0; theta.len()];
    let mut trial = vec![0.0; theta.len()];
    let mut f = problem.eval(&theta, Some(&mut grad));
    let mut trace = vec![f];
    let mut step = cfg.learning_rate;
    for _ in 0..cfg.iterations {
        let gg: f64 = grad.iter().map(|g| g * g).sum();
        if gg < 1e-20 {
            break;
        }
        let mut accepted = None;
        for _ in 0..60 {
            for ((t, th), g) in trial.iter_mut().zip(&theta).zip(&grad) {
                *t = th - step * g;
            }
            let ft = problem.eval(&trial, None);
            if ft <= f - 0.5 * step * gg {
                accepted = Some(ft);
                break;
            }
            step *= 0.5;
        }
        let Some(ft) = accepted else { break };
        core::mem::swap(&mut theta, &mut trial);
        f = problem.eval(&theta, Some(&mut grad));
        debug_assert!((f - ft).abs() <= 1e-9 * f.abs().max(1.0));
        trace.push(f);
        step *= 2.0;
    }
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("probe weights".into()));
    }
    let biases = theta.split_off(k * d);
    Ok(LogRegModel {
        n_classes: k,
        dim: d,
        weights: theta,
        biases,
        shift,
        scale,
        objective_trace: trace,
    })
}

/// Objective and gradient at `theta` on raw (unstandardized) features; exposed
/// for gradient checks.
pub fn logreg_objective(
    data: &LabeledEmbeddings,
    lambda: f64,
    theta: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let (d, k) = (data.dim, data.n_classes);
    if theta.len() != k * d + k {
        return Err(Error::Contract(format!(
            "parameter vector has {} entries, expected {}",
            theta.len(),
            k * d + k
        )));
    }
    let problem = Problem {
        x: data.rows.clone(),
        labels: &data.labels,
        n: data.len(),
        d,
        k,
        lambda,
    };
    let mut g = vec![0.0; theta.len()];
    let f = problem.eval(theta, Some(&mut g));
    Ok((f, g))
}

/// Unweighted mean over classes of per-class F1 (0 for a class that is never
/// predicted and never true).
pub fn macro_f1(pred: &[usize], truth: &[usize], n_classes: usize) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::Contract(format!(
            "{} predictions for {} labels",
            pred.len(),
            truth.len()
        )));
    }
    if n_classes == 0 || pred.iter().chain(truth).any(|&l| l >= n_classes) {
        return Err(Error::Contract(format!("labels must lie in [0, {n_classes})")));
    }
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fneg = vec![0usize; n_classes];
    for (&p, &t) in pred.iter().zip(truth) {
        if p == t {
            tp[p] += 1;
        } else {
            fp[p] += 1;
            fneg[t] += 1;
        }
    }
    let total: f64 = (0..n_classes)
        .map(|c| {
            // 2PR/(P+R) simplifies to 2TP/(2TP+FP+FN).
            let denom = 2 * tp[c] + fp[c] + fneg[c];
            if denom == 0 {
                0.0
            } else {
                2.0 * tp[c] as f64 / denom as f64
            }
        })
        .sum();
    Ok(total / n_classes as f64)
}

/// Split, fit, and score one probe cell.
pub fn probe_cell(
    data: &LabeledEmbeddings,
    seconds: f64,
    cfg: &LogRegConfig,
    rng: &mut RngStream,
) -> Result<ProbeScore> {
    let (train, test) = split_by_budget(data, seconds, rng)?;
    let model = fit_logreg(&train, cfg)?;
    let pred = model.predict(&test);
    Ok(ProbeScore {
        macro_f1: macro_f1(&pred, test.labels(), data.n_classes)?,
        n_train: train.len(),
        n_test: test.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeScore {
    pub macro_f1: f64,
    pub n_train: usize,
    pub n_test: usize,
}

/// Projection of rows onto their first two principal components.
#[derive(Clone, Debug, PartialEq)]
pub struct Pca2 {
    pub mean: Vec<f64>,
    pub components: [Vec<f64>; 2],
    pub variances: [f64; 2],
}

impl Pca2 {
    /// Fit by a cyclic Jacobi eigendecomposition of the covariance matrix.
    /// Component signs are fixed so the largest-magnitude entry is positive.
    pub fn fit(rows: &[f64], dim: usize) -> Result<Self> {
        if dim == 0 || rows.is_empty() || rows.len() % dim != 0 {
            return Err(Error::InvalidInput("PCA needs a non-empty row matrix".into()));
        }
        let n = rows.len() / dim;
        let mut mean = vec![0.0; dim];
        for r in rows.chunks(dim) {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v / n as f64;
            }
        }
        let mut cov = vec![0.0; dim * dim];
        for r in rows.chunks(dim) {
            for i in 0..dim {
                let ci = r[i] - mean[i];
                for j in i..dim {
                    cov[i * dim + j] += ci * (r[j] - mean[j]);
                }
            }
        }
        let denom = (n.max(2) - 1) as f64;
        for i in 0..dim {
            for j in i..dim {
                let v = cov[i * dim + j] / denom;
                cov[i * dim + j] = v;
                cov[j * dim + i] = v;
            }
        }
        let (values, vectors) = jacobi_eigen(cov, dim);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let take = |c: usize| -> Vec<f64> {
            let mut v: Vec<f64> = (0..dim).map(|i| vectors[i * dim + c]).collect();
            let lead = v.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        };
        let second = if dim > 1 { take(order[1]) } else { vec![0.0; dim] };
        Ok(Self {
            components: [take(order[0]), second],
            variances: [values[order[0]], if dim > 1 { values[order[1]] } else { 0.0 }],
            mean,
        })
    }

    pub fn project(&self, row: &[f64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = row
                .iter()
                .zip(&self.mean)
                .zip(c)
                .map(|((x, m), w)| (x - m) * w)
                .sum();
        }
        out
    }
}

/// Eigenvalues and column eigenvectors of a symmetric matrix.
fn jacobi_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off <= 1e-22 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// Which encoder produced an embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoder {
    Source,
    Content,
}

impl Encoder {
    pub fn name(self) -> &'static str {
        match self {
            Encoder::Source => "E_s",
            Encoder::Content => "E_c",
        }
    }
}

/// Which ground-truth factor a probe predicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Source,
    Content,
}

impl LabelKind {
    pub fn name(self) -> &'static str {
        match self {
            LabelKind::Source => "source",
            LabelKind::Content => "content",
        }
    }
}

/// One row of a decomposition report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub encoder: String,
    pub label_kind: String,
    pub budget_seconds: f64,
    pub macro_f1: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
}

/// Probe cells for every encoder x label kind x budget, plus PCA coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport {
    pub rows: Vec<ReportRow>,
    /// `(encoder, [x, y] per chunk)` for the pooled embeddings.
    pub pca: Vec<(Encoder, Vec<[f64; 2]>)>,
}

impl DecompositionReport {
    pub fn f1(&self, encoder: Encoder, label: LabelKind, budget_seconds: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| {
                r.encoder == encoder.name()
                    && r.label_kind == label.name()
                    && r.budget_seconds == budget_seconds
            })
            .map(|r| r.macro_f1)
    }
}

/// Chunks with both ground-truth labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledCorpus {
    pub chunks: Vec<MelChunk>,
    pub source_labels: Vec<usize>,
    pub content_labels: Vec<usize>,
    pub n_sources: usize,
    pub n_contents: usize,
}

impl LabeledCorpus {
    pub fn validate(&self) -> Result<()> {
        let n = self.chunks.len();
        if self.source_labels.len() != n || self.content_labels.len() != n {
            return Err(Error::InvalidInput("label columns do not match chunk count".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    pub logreg: LogRegConfig,
    /// Labelled seconds per class; 10.24 s is ten chunks.
    pub budgets: Vec<f64>,
    /// Seed of the train/test splits.
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            logreg: LogRegConfig::default(),
            budgets: vec![10.0 * SECONDS_PER_CHUNK],
            seed: 1,
        }
    }
}

/// Mean-pooled chunk embeddings of one encoder with one label column.
pub fn pooled_embeddings(
    model: &Autodecompose,
    chunks: &[MelChunk],
    which: Which,
    labels: &[usize],
    n_classes: usize,
) -> Result<LabeledEmbeddings> {
    let e = model.embed(chunks, which, Pooling::Mean)?;
    LabeledEmbeddings::new(e.dim, e.to_f64(), labels.to_vec(), n_classes, SECONDS_PER_CHUNK, 1)
}

/// Probe both encoders for both factors at every budget.
///
/// Both label kinds are probed on mean-pooled chunk embeddings: the content
/// of a chunk is its whole 1.024 s script, which no single 16 ms frame
/// determines. E_s and E_c cells with the same label and budget share the
/// same train/test split.
pub fn decomposition_report(
    model: &Autodecompose,
    corpus: &LabeledCorpus,
    cfg: &ProbeConfig,
) -> Result<DecompositionReport> {
    corpus.validate()?;
    let mut rows = Vec::new();
    let mut pca = Vec::new();
    for encoder in [Encoder::Source, Encoder::Content] {
        let which = match encoder {
            Encoder::Source => Which::Source,
            Encoder::Content => Which::Content,
        };
        let emb = model.embed(&corpus.chunks, which, Pooling::Mean)?;
        let values = emb.to_f64();
        let p = Pca2::fit(&values, emb.dim)?;
        pca.push((encoder, values.chunks(emb.dim).map(|r| p.project(r)).collect()));
        for (li, label) in [LabelKind::Source, LabelKind::Content].into_iter().enumerate() {
            let (labels, k) = match label {
                LabelKind::Source => (&corpus.source_labels, corpus.n_sources),
                LabelKind::Content => (&corpus.content_labels, corpus.n_contents),
            };
            let data = LabeledEmbeddings::new(
                emb.dim,
                values.clone(),
                labels.clone(),
                k,
                SECONDS_PER_CHUNK,
                1,
            )?;
            for (bi, &budget) in cfg.budgets.iter().enumerate() {
                let mut rng = RngStream::new(cfg.seed).split((li * 1000 + bi) as u64);
                let score = probe_cell(&data, budget, &cfg.logreg, &mut rng)?;
                rows.push(ReportRow {
                    encoder: String::from(encoder.name()),
                    label_kind: String::from(label.name()),
                    budget_seconds: budget,
                    macro_f1: score.macro_f1,
                    n_train: score.n_train,
                    n_test: score.n_test,
                    seed: cfg.seed,
                });
            }
        }
    }
    Ok(DecompositionReport { rows, pca })
}
