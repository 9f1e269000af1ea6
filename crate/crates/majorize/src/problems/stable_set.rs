use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{HolderSmoothness, ProblemSpec, SimpleSet, SmoothFunctionOracle};

/// `max eeᵀ•YYᵀ` s.t. `I•YYᵀ ≤ 1`, `(YYᵀ)ᵢⱼ ≤ δ` on edges, `Y ≥ 0`, with
/// `Y ∈ ℝ^{n×K}` stored column-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableSetInstance {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub delta: f64,
    pub k: usize,
}

impl StableSetInstance {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>, delta: f64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("K must be at least 1".into()));
        }
        if !(delta >= 0.0) {
            return Err(Error::InvalidInput("delta must be nonnegative".into()));
        }
        for &(i, j) in &edges {
            if i >= n_vertices || j >= n_vertices || i == j {
                return Err(Error::InvalidInput(format!("invalid edge ({i}, {j})")));
            }
        }
        Ok(StableSetInstance { n_vertices, edges, delta, k })
    }

    pub fn cycle(n: usize, delta: f64, k: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput("a cycle needs at least 3 vertices".into()));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect(), delta, k)
    }

    pub fn dim(&self) -> usize {
        self.n_vertices * self.k
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        let (n, k) = (self.n_vertices, self.k);
        let shape = move |x: &DVector<f64>| DMatrix::from_column_slice(n, k, x.as_slice());
        let flat = |y: DMatrix<f64>| DVector::from_column_slice(y.as_slice());
        let objective = SmoothFunctionOracle::new(
            n * k,
            HolderSmoothness::lipschitz(2.0 * n as f64)?,
            move |x| -shape(x).row_sum().norm_squared(),
            move |x| {
                let y = shape(x);
                let s = y.row_sum();
                flat(DMatrix::from_fn(n, k, |_, c| -2.0 * s[c]))
            },
        )
        .with_hessian(move |_| {
            let mut h = DMatrix::zeros(n * k, n * k);
            for c in 0..k {
                h.view_mut((c * n, c * n), (n, n)).fill(-2.0);
            }
            h
        })
        .with_hessian_lipschitz(0.0);
        let mut cons = vec![SmoothFunctionOracle::ball(DVector::zeros(n * k), 1.0)?];
        for &(i, j) in &self.edges {
            let delta = self.delta;
            let oracle = SmoothFunctionOracle::new(
                n * k,
                HolderSmoothness::lipschitz(1.0)?,
                move |x| (0..k).map(|c| x[c * n + i] * x[c * n + j]).sum::<f64>() - delta,
                move |x| {
                    let mut g = DVector::zeros(n * k);
                    for c in 0..k {
                        g[c * n + i] = x[c * n + j];
                        g[c * n + j] = x[c * n + i];
                    }
                    g
                },
            )
            .with_hessian(move |_| {
                let mut h = DMatrix::zeros(n * k, n * k);
                for c in 0..k {
                    h[(c * n + i, c * n + j)] = 1.0;
                    h[(c * n + j, c * n + i)] = 1.0;
                }
                h
            })
            .with_hessian_lipschitz(0.0);
            cons.push(oracle);
        }
        ProblemSpec::new(objective, cons)?.with_domain(SimpleSet::NonnegativeOrthant)
    }

    /// Uniform nonnegative start scaled to strict feasibility; `index` picks
    /// an independent stream of `seed`.
    pub fn start(&self, seed: u64, index: u64) -> DVector<f64> {
        let (n, k) = (self.n_vertices, self.k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let y = DVector::from_fn(n * k, |_, _| rng.random_range(0.0..1.0));
        let mut worst_edge: f64 = 0.0;
        for &(i, j) in &self.edges {
            worst_edge = worst_edge.max((0..k).map(|c| y[c * n + i] * y[c * n + j]).sum());
        }
        let mut scale = 1.0 / y.norm();
        if worst_edge > 0.0 && self.delta > 0.0 {
            scale = scale.min((self.delta / worst_edge).sqrt());
        }
        y * (0.5 * scale)
    }

    /// `−α(G)` for the cycle `Cₙ`, i.e. `−⌊n/2⌋`.
    pub fn cycle_optimum(n: usize) -> f64 {
        -((n / 2) as f64)
    }
}

pub fn make_cycle_stable_set(n: usize, delta: f64, k: usize) -> Result<ProblemSpec> {
    let inst = StableSetInstance::cycle(n, delta, k)?;
    Ok(inst.problem()?.with_known_optimum(StableSetInstance::cycle_optimum(n)))
}

/// Reads `i j` pairs, one edge per line. Lines starting with `#` and blank
/// lines are skipped. Returns the vertex count (max index + 1) and edges.
pub fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(i)), Some(Ok(j)), None) => {
                n = n.max(i + 1).max(j + 1);
                edges.push((i, j));
            }
            _ => return Err(Error::InvalidInput(format!("line {}: expected two vertex indices", lineno + 1))),
        }
    }
    Ok((n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_is_strictly_feasible() {
        let inst = StableSetInstance::cycle(15, 1e-4, 2).unwrap();
        let p = inst.problem().unwrap();
        for i in 0..3 {
            let y = inst.start(7, i);
            assert!(p.check_strictly_feasible(&y).is_ok());
        }
    }

    #[test]
    fn stable_set_indicator_is_feasible_with_value() {
        let inst = StableSetInstance::cycle(6, 0.0, 2).unwrap();
        let p = inst.problem().unwrap();
        let mut y = DVector::zeros(12);
        for v in [0, 2, 4] {
            y[v] = 1.0 / 3f64.sqrt();
        }
        assert!((p.objective.value(&y) + 3.0).abs() < 1e-12);
        assert!(p.max_constraint(&y) <= 1e-15);
    }

    #[test]
    fn edge_list() {
        let (n, e) = parse_edge_list("# c4\n0 1\n1 2\n\n2 3\n3 0\n").unwrap();
        assert_eq!(n, 4);
        assert_eq!(e.len(), 4);
        assert!(parse_edge_list("0 1 2").is_err());
    }
}
