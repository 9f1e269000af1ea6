use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{from_rows, to_rows};
use crate::error::{Error, Result};
use crate::numeric::spectral_norm;
use crate::problem::{HolderSmoothness, ProblemSpec, SimpleSet, SmoothFunctionOracle};

/// `min ⟨C₀, YYᵀ⟩` s.t. `⟨Cᵢ, YYᵀ⟩ ≤ bᵢ`, `Y ≥ 0`, `Y ∈ ℝ^{n×r}` stored
/// column-major. Matrices are kept as row lists so the instance reads
/// naturally as JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopositiveLpInstance {
    pub seed: u64,
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub c0: Vec<Vec<f64>>,
    pub ci: Vec<Vec<Vec<f64>>>,
    pub b: Vec<f64>,
    /// Strictly feasible start.
    pub y0: Vec<f64>,
}

fn quad_oracle(c: DMatrix<f64>, n: usize, r: usize, shift: f64) -> Result<SmoothFunctionOracle> {
    let lip = (2.0 * spectral_norm(&c)).max(1e-12);
    let (cv, cg, ch) = (c.clone(), c.clone(), c);
    let shape = move |x: &DVector<f64>| DMatrix::from_column_slice(n, r, x.as_slice());
    Ok(SmoothFunctionOracle::new(
        n * r,
        HolderSmoothness::lipschitz(lip)?,
        move |x| {
            let y = shape(x);
            (y.transpose() * &cv * &y).trace() - shift
        },
        move |x| {
            let g = &cg * shape(x) * 2.0;
            DVector::from_column_slice(g.as_slice())
        },
    )
    .with_hessian(move |_| {
        let mut h = DMatrix::zeros(n * r, n * r);
        for col in 0..r {
            h.view_mut((col * n, col * n), (n, n)).copy_from(&(&ch * 2.0));
        }
        h
    })
    .with_hessian_lipschitz(0.0))
}

impl CopositiveLpInstance {
    /// `C₀ = GGᵀ/n` with standard normal `G`; `Cᵢ` symmetrized standard
    /// normal; `Y₀` uniform on `[0, 1/√(nr))`; `bᵢ = vᵢ + |vᵢ|/4` where
    /// `vᵢ = ⟨Cᵢ, Y₀Y₀ᵀ⟩`.
    pub fn generate(seed: u64, n: usize, r: usize, m: usize) -> Result<Self> {
        if n == 0 || r == 0 || m == 0 {
            return Err(Error::InvalidInput("n, r and m must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let c0 = &g * g.transpose() / n as f64;
        let mut ci = Vec::with_capacity(m);
        for _ in 0..m {
            let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            ci.push((&a + a.transpose()) * 0.5);
        }
        let top = 1.0 / ((n * r) as f64).sqrt();
        let y0 = DMatrix::from_fn(n, r, |_, _| rng.random_range(0.0..top));
        let x0 = &y0 * y0.transpose();
        let b = ci.iter().map(|c: &DMatrix<f64>| {
            let v = c.dot(&x0);
            v + 0.25 * v.abs()
        });
        Ok(CopositiveLpInstance {
            seed,
            n,
            r,
            m,
            c0: to_rows(&c0),
            b: b.collect(),
            ci: ci.iter().map(to_rows).collect(),
            y0: y0.as_slice().to_vec(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let (n, r, m) = (self.n, self.r, self.m);
        let bad = |what: &str| Err(Error::InvalidInput(format!("copositive LP: inconsistent {what}")));
        if self.c0.len() != n || self.c0.iter().any(|row| row.len() != n) {
            return bad("C0");
        }
        if self.ci.len() != m || self.ci.iter().any(|c| c.len() != n || c.iter().any(|row| row.len() != n)) {
            return bad("Ci");
        }
        if self.b.len() != m {
            return bad("b");
        }
        if self.y0.len() != n * r {
            return bad("y0");
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        self.validate()?;
        let (n, r) = (self.n, self.r);
        let objective = quad_oracle(from_rows(&self.c0)?, n, r, 0.0)?;
        let cons = self
            .ci
            .iter()
            .zip(&self.b)
            .map(|(c, &b)| quad_oracle(from_rows(c)?, n, r, b))
            .collect::<Result<Vec<_>>>()?;
        ProblemSpec::new(objective, cons)?.with_domain(SimpleSet::NonnegativeOrthant)
    }

    pub fn start(&self) -> DVector<f64> {
        DVector::from_vec(self.y0.clone())
    }
}

pub fn make_copositive_lp(seed: u64, n: usize, r: usize, m: usize) -> Result<(ProblemSpec, DVector<f64>)> {
    let inst = CopositiveLpInstance::generate(seed, n, r, m)?;
    Ok((inst.problem()?, inst.start()))
}
