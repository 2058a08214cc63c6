//! Dense, exact linear algebra on tiny two-type tori: every state of the
//! process is enumerated (3 symbols per site: empty / up / down) and the
//! generator parts are materialized as matrices, so the structural identities
//! of the dynamics can be checked to machine precision.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

pub const EMPTY: u8 = 0;
pub const UP: u8 = 1;
pub const DOWN: u8 = 2;

/// Spin value of a site symbol: +1 up, -1 down, 0 empty.
fn spin(v: u8) -> f64 {
    match v {
        UP => 1.0,
        DOWN => -1.0,
        _ => 0.0,
    }
}

/// Drift strength of a two-type particle along axis `i`: the up atom points
/// along +e1, the down atom along -e1; neither has a second component.
fn lambda_i(lambda: f64, i: usize, v: u8) -> f64 {
    if i != 0 {
        return 0.0;
    }
    match v {
        UP => lambda,
        DOWN => -lambda,
        _ => 0.0,
    }
}

/// A two-type model on an n1 x n2 torus, small enough to enumerate.
#[derive(Debug, Clone)]
pub struct TinyModel {
    pub n1: usize,
    pub n2: usize,
    pub lambda: f64,
    pub beta: f64,
    /// Scale entering the full generator `N^2 L + N L_wa + L_g`.
    pub n_scale: f64,
}

impl TinyModel {
    pub fn new(n1: usize, n2: usize, lambda: f64, beta: f64) -> Result<Self> {
        let sites = n1 * n2;
        if sites == 0 || 3usize.checked_pow(sites as u32).is_none() || sites > 12 {
            return Err(Error::StateSpaceTooLarge(sites));
        }
        Ok(TinyModel {
            n1,
            n2,
            lambda,
            beta,
            n_scale: 2.0,
        })
    }

    pub fn sites(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn states(&self) -> usize {
        3usize.pow(self.sites() as u32)
    }

    pub fn decode(&self, mut index: usize) -> Vec<u8> {
        let mut out = vec![0u8; self.sites()];
        for v in out.iter_mut() {
            *v = (index % 3) as u8;
            index /= 3;
        }
        out
    }

    pub fn encode(&self, state: &[u8]) -> usize {
        state.iter().rev().fold(0usize, |acc, &v| acc * 3 + v as usize)
    }

    /// Site reached from `x` by one step along `z` (0..4: +e1, -e1, +e2,
    /// -e2), with wraparound. On a side of length 1 this is `x` itself; on a
    /// side of length 2 both signs reach the same site, doubling the edge.
    pub fn neighbor(&self, x: usize, z: usize) -> usize {
        let (c1, c2) = (x % self.n1, x / self.n1);
        let (c1, c2) = match z {
            0 => ((c1 + 1) % self.n1, c2),
            1 => ((c1 + self.n1 - 1) % self.n1, c2),
            2 => (c1, (c2 + 1) % self.n2),
            _ => (c1, (c2 + self.n2 - 1) % self.n2),
        };
        c1 + self.n1 * c2
    }

    /// Symmetric exclusion part: rate 1 for each directed licit jump.
    pub fn generator_sym(&self) -> DMatrix<f64> {
        let n = self.states();
        let mut a: DMatrix<f64> = DMatrix::zeros(n, n);
        for s in 0..n {
            let st = self.decode(s);
            for x in 0..self.sites() {
                if st[x] == EMPTY {
                    continue;
                }
                for z in 0..4 {
                    let y = self.neighbor(x, z);
                    if st[y] != EMPTY {
                        continue;
                    }
                    let mut sw = st.clone();
                    sw.swap(x, y);
                    let t = self.encode(&sw);
                    a[(s, t)] += 1.0;
                    a[(s, s)] -= 1.0;
                }
            }
        }
        a
    }

    /// Weakly asymmetric part: signed rate `delta lambda_i(theta_x)` per
    /// licit jump along `delta e_i`. Not a Markov generator on its own (it
    /// has negative rates); only sums with the symmetric part are.
    pub fn generator_wa(&self) -> DMatrix<f64> {
        let n = self.states();
        let mut a: DMatrix<f64> = DMatrix::zeros(n, n);
        for s in 0..n {
            let st = self.decode(s);
            for x in 0..self.sites() {
                if st[x] == EMPTY {
                    continue;
                }
                for z in 0..4 {
                    let y = self.neighbor(x, z);
                    if st[y] != EMPTY {
                        continue;
                    }
                    let (i, delta) = (z / 2, if z % 2 == 0 { 1.0 } else { -1.0 });
                    let rate = delta * lambda_i(self.lambda, i, st[x]);
                    let mut sw = st.clone();
                    sw.swap(x, y);
                    let t = self.encode(&sw);
                    a[(s, t)] += rate;
                    a[(s, s)] -= rate;
                }
            }
        }
        a
    }

    /// Alignment (Glauber) part: each particle refreshes its atom to up /
    /// down with the heat-bath probabilities given its 4 neighbor spins.
    pub fn generator_glauber(&self) -> DMatrix<f64> {
        let n = self.states();
        let mut a: DMatrix<f64> = DMatrix::zeros(n, n);
        for s in 0..n {
            let st = self.decode(s);
            for x in 0..self.sites() {
                if st[x] == EMPTY {
                    continue;
                }
                let ssum: f64 = (0..4).map(|z| spin(st[self.neighbor(x, z)])).sum();
                let (eu, ed) = ((self.beta * ssum).exp(), (-self.beta * ssum).exp());
                let p_up = eu / (eu + ed);
                for (target, p) in [(UP, p_up), (DOWN, 1.0 - p_up)] {
                    if st[x] == target {
                        continue;
                    }
                    let mut fl = st.clone();
                    fl[x] = target;
                    let t = self.encode(&fl);
                    a[(s, t)] += p;
                    a[(s, s)] -= p;
                }
            }
        }
        a
    }

    /// Full accelerated generator `N^2 L + N L_wa + L_g`.
    pub fn generator_full(&self) -> DMatrix<f64> {
        let n = self.n_scale;
        self.generator_sym() * (n * n) + self.generator_wa() * n + self.generator_glauber()
    }

    /// Unnormalized product weights from single-site probabilities
    /// `(empty, up, down)`.
    pub fn product_weights(&self, p: [f64; 3]) -> Vec<f64> {
        (0..self.states())
            .map(|s| self.decode(s).iter().map(|&v| p[v as usize]).product())
            .collect()
    }

    /// Weights of the uniform-angle equilibrium measure at density `alpha`:
    /// empty with probability 1 - alpha, each atom with alpha / 2.
    pub fn mu_star(&self, alpha: f64) -> Vec<f64> {
        self.product_weights([1.0 - alpha, alpha / 2.0, alpha / 2.0])
    }

    /// `sup` norm of the row sums; zero for any genuine generator part.
    pub fn row_sum_defect(a: &DMatrix<f64>) -> f64 {
        (0..a.nrows())
            .map(|i| a.row(i).sum().abs())
            .fold(0.0, f64::max)
    }

    /// Self-adjointness defect of `a` in L^2(mu): `max |mu_s a_st - mu_t a_ts|`.
    pub fn self_adjoint_defect(a: &DMatrix<f64>, mu: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for s in 0..a.nrows() {
            for t in 0..a.ncols() {
                worst = worst.max((mu[s] * a[(s, t)] - mu[t] * a[(t, s)]).abs());
            }
        }
        worst
    }

    /// The microscopic drift current through the directed edge `(x, x + e_i)`:
    /// `j_i^{lambda_i} = lambda_i(theta_x) eta_x (1 - eta_{x+e_i})
    ///                 - lambda_i(theta_{x+e_i}) eta_{x+e_i} (1 - eta_x)`.
    pub fn drift_current(&self, st: &[u8], x: usize, i: usize) -> f64 {
        let y = self.neighbor(x, 2 * i);
        let occ = |v: u8| if v == EMPTY { 0.0 } else { 1.0 };
        lambda_i(self.lambda, i, st[x]) * occ(st[x]) * (1.0 - occ(st[y]))
            - lambda_i(self.lambda, i, st[y]) * occ(st[y]) * (1.0 - occ(st[x]))
    }

    /// Adjoint identity for the asymmetric part w.r.t. the uniform-angle
    /// product measure: the adjoint equals minus the operator, minus twice the
    /// total drift current acting as a multiplication operator. Off the
    /// diagonal, reversing an allowed jump flips the sign of its rate, so
    /// `(L_wa^*)_{st} = -(L_wa)_{st}` there; on the diagonal the signed exit
    /// rates telescope to minus the summed drift current, giving
    /// `(L_wa)_{ss} = -J(s)` and hence `L_wa^* = -L_wa - 2 M_j`. Returns the
    /// max-abs defect of `L_wa^* + L_wa + 2 M_j`.
    pub fn adjoint_defect(&self, alpha: f64) -> f64 {
        let wa = self.generator_wa();
        let mu = self.mu_star(alpha);
        let n = self.states();
        let mut worst = 0.0f64;
        for s in 0..n {
            let st = self.decode(s);
            let total_current: f64 = (0..self.sites())
                .map(|x| (0..2).map(|i| self.drift_current(&st, x, i)).sum::<f64>())
                .sum();
            for t in 0..n {
                // (L_wa^*)_{st} = mu_t (L_wa)_{ts} / mu_s
                let adj = mu[t] * wa[(t, s)] / mu[s];
                let diag = if s == t { -2.0 * total_current } else { 0.0 };
                worst = worst.max((adj + wa[(s, t)] - diag).abs());
            }
        }
        worst
    }

    /// `||mu^T L_N||_inf` for the normalized measure with the given weights.
    pub fn stationarity_residual(&self, weights: &[f64]) -> f64 {
        let full = self.generator_full();
        let total: f64 = weights.iter().sum();
        let n = self.states();
        (0..n)
            .map(|t| {
                (0..n)
                    .map(|s| weights[s] / total * full[(s, t)])
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    /// Dirichlet form of `h` w.r.t. the product measure with the given
    /// weights, computed two independent ways: `-E[h L h]` and the
    /// sum-of-squares over jumps `1/2 E[sum (grad h)^2]`. Returns both.
    pub fn dirichlet_form(&self, h: &[f64], weights: &[f64]) -> (f64, f64) {
        let sym = self.generator_sym();
        let total: f64 = weights.iter().sum();
        let n = self.states();
        let mut quad = 0.0;
        for s in 0..n {
            let lh: f64 = (0..n).map(|t| sym[(s, t)] * h[t]).sum();
            quad -= weights[s] / total * h[s] * lh;
        }
        let mut sq = 0.0;
        for s in 0..n {
            let st = self.decode(s);
            for x in 0..self.sites() {
                if st[x] == EMPTY {
                    continue;
                }
                for z in 0..4 {
                    let y = self.neighbor(x, z);
                    if st[y] != EMPTY {
                        continue;
                    }
                    let mut sw = st.clone();
                    sw.swap(x, y);
                    let t = self.encode(&sw);
                    sq += 0.5 * weights[s] / total * (h[t] - h[s]).powi(2);
                }
            }
        }
        (quad, sq)
    }

    /// Connected components of the exclusion jump graph (the sectors on
    /// which the Dirichlet form can vanish).
    pub fn exclusion_sectors(&self) -> Vec<usize> {
        let n = self.states();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(s) = stack.pop() {
                let st = self.decode(s);
                for x in 0..self.sites() {
                    if st[x] == EMPTY {
                        continue;
                    }
                    for z in 0..4 {
                        let y = self.neighbor(x, z);
                        if st[y] != EMPTY {
                            continue;
                        }
                        let mut sw = st.clone();
                        sw.swap(x, y);
                        let t = self.encode(&sw);
                        if comp[t] == usize::MAX {
                            comp[t] = next;
                            stack.push(t);
                        }
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Defect of the current-decomposition identity
    /// `L eta^omega_x = sum_i (tau_{x-e_i} j^omega_i - tau_x j^omega_i)`
    /// for an arbitrary angle observable `omega = (omega(up), omega(down))`,
    /// maximized over states and sites.
    pub fn current_decomposition_defect(&self, omega: [f64; 2]) -> f64 {
        let sym = self.generator_sym();
        let n = self.states();
        let w = |v: u8| match v {
            UP => omega[0],
            DOWN => omega[1],
            _ => 0.0,
        };
        let occ = |v: u8| if v == EMPTY { 0.0 } else { 1.0 };
        // j^omega_i at the edge (y, y + e_i)
        let j = |st: &[u8], y: usize, i: usize| -> f64 {
            let yr = self.neighbor(y, 2 * i);
            w(st[y]) * (1.0 - occ(st[yr])) - w(st[yr]) * (1.0 - occ(st[y]))
        };
        let mut worst = 0.0f64;
        for x in 0..self.sites() {
            let v: Vec<f64> = (0..n).map(|s| w(self.decode(s)[x])).collect();
            for s in 0..n {
                let lhs: f64 = (0..n).map(|t| sym[(s, t)] * v[t]).sum();
                let st = self.decode(s);
                let mut rhs = 0.0;
                for i in 0..2 {
                    let xm = self.neighbor(x, 2 * i + 1);
                    rhs += j(&st, xm, i) - j(&st, x, i);
                }
                worst = worst.max((lhs - rhs).abs());
            }
        }
        worst
    }
}
