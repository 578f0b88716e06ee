//! CART random forest with impurity-decrease importances.
//!
//! Each tree is grown on its own bootstrap sample with random feature
//! subsets per split. Leaf values are then re-estimated from every training
//! row that lands in the leaf, so a single-leaf tree predicts the training mean.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::TaskKind;
use crate::seed::{Domain, SeedStream};

use super::FeaturesPerSplit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn leaf_of(&self, columns: &[Vec<f64>], row: usize) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { .. } => return at,
                Node::Split { feature, threshold, left, right } => {
                    at = if columns[feature][row] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict_row(&self, columns: &[Vec<f64>], row: usize) -> f64 {
        match self.nodes[self.leaf_of(columns, row)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
    /// Impurity decrease per feature, normalized to sum to one.
    pub importances: Vec<f64>,
}

impl Forest {
    pub fn predict(&self, columns: &[Vec<f64>]) -> Vec<f64> {
        let n = columns.first().map_or(0, |c| c.len());
        let k = self.trees.len() as f64;
        (0..n)
            .map(|row| self.trees.iter().map(|t| t.predict_row(columns, row)).sum::<f64>() / k)
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub features_per_split: FeaturesPerSplit,
}

pub(crate) fn features_per_split(rule: FeaturesPerSplit, m: usize) -> usize {
    let k = match rule {
        FeaturesPerSplit::Sqrt => (m as f64).sqrt().floor() as usize,
        FeaturesPerSplit::Fraction(f) => (f * m as f64 + 1e-9).floor() as usize,
    };
    k.clamp(1, m.max(1))
}

pub(crate) fn fit_forest(columns: &[Vec<f64>], y: &[f64], task: TaskKind, params: ForestParams, seed: u64) -> Forest {
    let m = columns.len();
    let mtry = features_per_split(params.features_per_split, m);
    let seeds = SeedStream::new(seed, Domain::Tree);
    let grown: Vec<(Tree, Vec<f64>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeds.rng(t as u64);
            grow_tree(columns, y, task, &params, mtry, &mut rng)
        })
        .collect();

    let mut importances = vec![0.0; m];
    let mut trees = Vec::with_capacity(grown.len());
    for (tree, gains) in grown {
        for (acc, g) in importances.iter_mut().zip(&gains) {
            *acc += g;
        }
        trees.push(tree);
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        importances.iter_mut().for_each(|v| *v /= total);
    } else {
        // No split anywhere: nothing distinguishes the columns.
        importances.iter_mut().for_each(|v| *v = 1.0 / m as f64);
    }
    Forest { trees, importances }
}

struct Grower<'a> {
    columns: &'a [Vec<f64>],
    y: &'a [f64],
    task: TaskKind,
    params: &'a ForestParams,
    mtry: usize,
    nodes: Vec<Node>,
    gains: Vec<f64>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    left_len: usize,
}

fn grow_tree<R: Rng>(
    columns: &[Vec<f64>],
    y: &[f64],
    task: TaskKind,
    params: &ForestParams,
    mtry: usize,
    rng: &mut R,
) -> (Tree, Vec<f64>) {
    let n = y.len();
    let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut g = Grower { columns, y, task, params, mtry, nodes: Vec::new(), gains: vec![0.0; columns.len()] };
    g.grow(rows, 0, rng);

    // Re-estimate leaf values on all training rows.
    let mut tree = Tree { nodes: g.nodes };
    let mut sums = vec![(0.0, 0usize); tree.nodes.len()];
    for row in 0..n {
        let leaf = tree.leaf_of(columns, row);
        sums[leaf].0 += y[row];
        sums[leaf].1 += 1;
    }
    for (node, (s, c)) in tree.nodes.iter_mut().zip(sums) {
        if let Node::Leaf { value } = node {
            if c > 0 {
                *value = s / c as f64;
            }
        }
    }
    (tree, g.gains)
}

impl Grower<'_> {
    fn grow<R: Rng>(&mut self, mut rows: Vec<usize>, depth: usize, rng: &mut R) -> usize {
        let id = self.nodes.len();
        let mean = rows.iter().map(|&r| self.y[r]).sum::<f64>() / rows.len() as f64;
        self.nodes.push(Node::Leaf { value: mean });

        if depth >= self.params.max_depth || rows.len() < 2 * self.params.min_leaf {
            return id;
        }
        let Some(best) = self.best_split(&mut rows, rng) else {
            return id;
        };
        self.gains[best.feature] += best.gain;
        let col = &self.columns[best.feature];
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| col[r] <= best.threshold);
        debug_assert_eq!(left_rows.len(), best.left_len);
        let left = self.grow(left_rows, depth + 1, rng);
        let right = self.grow(right_rows, depth + 1, rng);
        self.nodes[id] = Node::Split { feature: best.feature, threshold: best.threshold, left, right };
        id
    }

    /// Tie-break between features that does not depend on column order.
    fn column_precedes(&self, a: usize, b: usize) -> bool {
        a != b && self.columns[a].iter().zip(&self.columns[b]).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()) == Some(std::cmp::Ordering::Less)
    }

    fn best_split<R: Rng>(&self, rows: &mut [usize], rng: &mut R) -> Option<BestSplit> {
        let m = self.columns.len();
        let n = rows.len();
        let total: f64 = rows.iter().map(|&r| self.y[r]).sum();
        let min_leaf = self.params.min_leaf.max(1);
        let mut best: Option<BestSplit> = None;

        // Drawing all m candidates would only shuffle them; keep index order instead.
        let candidates: Vec<usize> = if self.mtry >= m { (0..m).collect() } else { sample(rng, m, self.mtry).into_vec() };
        for feature in candidates {
            let col = &self.columns[feature];
            rows.sort_unstable_by(|&a, &b| col[a].total_cmp(&col[b]));
            let mut left_sum = 0.0;
            for i in 0..n - 1 {
                left_sum += self.y[rows[i]];
                let left_len = i + 1;
                if left_len < min_leaf || n - left_len < min_leaf {
                    continue;
                }
                let (lo, hi) = (col[rows[i]], col[rows[i + 1]]);
                if lo == hi {
                    continue;
                }
                let gain = self.impurity_decrease(left_sum, left_len, total, n);
                if gain > 1e-12 && best.as_ref().is_none_or(|b| gain > b.gain || (gain == b.gain && self.column_precedes(feature, b.feature))) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(BestSplit { feature, threshold, gain, left_len });
                }
            }
        }
        best
    }

    /// Node-weighted impurity decrease: Gini for classification, sum of squares for regression.
    fn impurity_decrease(&self, left_sum: f64, left_len: usize, total: f64, n: usize) -> f64 {
        let (nl, nr, nt) = (left_len as f64, (n - left_len) as f64, n as f64);
        let right_sum = total - left_sum;
        match self.task {
            TaskKind::BinaryClassification => {
                // N * gini = 2 * N1 * N0 / N for a binary node.
                let node = |ones: f64, size: f64| 2.0 * ones * (size - ones) / size;
                node(total, nt) - node(left_sum, nl) - node(right_sum, nr)
            }
            TaskKind::Regression => {
                let diff = left_sum / nl - right_sum / nr;
                nl * nr / nt * diff * diff
            }
        }
    }
}
