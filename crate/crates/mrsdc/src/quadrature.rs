//! Quadrature nodes and weight matrices for collocation and multi-rate
//! deferred correction.
//!
//! Nodes follow the equidistant "no-left" convention: the left interval
//! endpoint is not a node and the right endpoint is the last node. Weights
//! are integrals of Lagrange polynomials over node-to-node (or sub-node)
//! intervals; they are computed from the monomial expansion of the Lagrange
//! basis with exact antiderivatives. Internally everything is evaluated in
//! coordinates scaled to the unit interval, which keeps the expansion well
//! conditioned for the node counts used here (up to ~10).
//!
//! Four weight families appear, distinguished by where the integral runs and
//! where the integrand is sampled:
//!
//! | integral bounds   | sampled at standard | sampled at embedded |
//! |-------------------|---------------------|---------------------|
//! | standard interval | `s[m][j]`           | `s_hat[m][p]`       |
//! | embedded interval | `s_tilde[m][p][j]`  | `s_emb[m][p][q]`    |

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableauError {
    /// Node counts must be at least one.
    InvalidCount,
    /// The integration interval has zero or negative length.
    DegenerateInterval,
    /// Nodes must be strictly increasing.
    NodesNotIncreasing,
}

impl fmt::Display for TableauError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableauError::InvalidCount => write!(f, "node count must be at least 1"),
            TableauError::DegenerateInterval => write!(f, "interval must have positive length"),
            TableauError::NodesNotIncreasing => write!(f, "nodes must be strictly increasing"),
        }
    }
}

impl std::error::Error for TableauError {}

/// Equidistant nodes on `(t_left, t_right]`: `tau_m = t_left + m*h/M`.
pub fn equidistant_no_left(m: usize, t_left: f64, t_right: f64) -> Result<Vec<f64>, TableauError> {
    if m == 0 {
        return Err(TableauError::InvalidCount);
    }
    if !(t_right > t_left) {
        return Err(TableauError::DegenerateInterval);
    }
    let h = t_right - t_left;
    Ok((1..=m).map(|i| t_left + h * i as f64 / m as f64).collect())
}

/// Monomial coefficients (ascending powers) of each Lagrange polynomial for
/// the given nodes: `coeffs[j]` represents `l_j` with `l_j(nodes[i]) = δ_ij`.
fn lagrange_monomial_coeffs(nodes: &[f64]) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut all = Vec::with_capacity(n);
    for j in 0..n {
        let mut coeffs = vec![1.0];
        for (i, &ti) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let scale = nodes[j] - ti;
            // coeffs <- coeffs * (x - ti) / scale
            let mut next = vec![0.0; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k] += c * (-ti) / scale;
                next[k + 1] += c / scale;
            }
            coeffs = next;
        }
        all.push(coeffs);
    }
    all
}

/// Exact integral of a polynomial in monomial form over `[a, b]`.
fn integrate_poly(coeffs: &[f64], a: f64, b: f64) -> f64 {
    let mut acc = 0.0;
    let mut pa = a;
    let mut pb = b;
    for (k, &c) in coeffs.iter().enumerate() {
        acc += c * (pb - pa) / (k + 1) as f64;
        pa *= a;
        pb *= b;
    }
    acc
}

fn check_increasing(nodes: &[f64], t_left: f64) -> Result<(), TableauError> {
    let mut prev = t_left;
    for &t in nodes {
        if !(t > prev) {
            return Err(TableauError::NodesNotIncreasing);
        }
        prev = t;
    }
    Ok(())
}

/// Collocation weights `q[m][j] = ∫_{t_left}^{tau_m} l_j`.
pub fn collocation_weights(nodes: &[f64], t_left: f64) -> Result<Vec<Vec<f64>>, TableauError> {
    if nodes.is_empty() {
        return Err(TableauError::InvalidCount);
    }
    check_increasing(nodes, t_left)?;
    // scale to the unit interval for conditioning
    let h = nodes[nodes.len() - 1] - t_left;
    let scaled: Vec<f64> = nodes.iter().map(|&t| (t - t_left) / h).collect();
    let coeffs = lagrange_monomial_coeffs(&scaled);
    Ok(scaled
        .iter()
        .map(|&um| {
            coeffs
                .iter()
                .map(|c| h * integrate_poly(c, 0.0, um))
                .collect()
        })
        .collect())
}

/// Node-to-node weights `s[m][j]`: first row of `q`, then row differences.
pub fn node_to_node_weights(q: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut s = Vec::with_capacity(q.len());
    for m in 0..q.len() {
        if m == 0 {
            s.push(q[0].clone());
        } else {
            s.push(q[m].iter().zip(&q[m - 1]).map(|(a, b)| a - b).collect());
        }
    }
    s
}

/// Standard quadrature nodes with collocation and node-to-node weights over
/// one time step `[t_left, t_right]`.
#[derive(Debug, Clone)]
pub struct CollocationTableau {
    t_left: f64,
    t_right: f64,
    nodes: Vec<f64>,
    q: Vec<Vec<f64>>,
    s: Vec<Vec<f64>>,
    dtau: Vec<f64>,
}

impl CollocationTableau {
    pub fn equidistant_no_left(m: usize, t_left: f64, t_right: f64) -> Result<Self, TableauError> {
        let nodes = equidistant_no_left(m, t_left, t_right)?;
        Self::from_nodes(nodes, t_left, t_right)
    }

    fn from_nodes(nodes: Vec<f64>, t_left: f64, t_right: f64) -> Result<Self, TableauError> {
        check_increasing(&nodes, t_left)?;
        let q = collocation_weights(&nodes, t_left)?;
        let s = node_to_node_weights(&q);
        let mut dtau = Vec::with_capacity(nodes.len());
        let mut prev = t_left;
        for &t in &nodes {
            dtau.push(t - prev);
            prev = t;
        }
        Ok(CollocationTableau {
            t_left,
            t_right,
            nodes,
            q,
            s,
            dtau,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn t_left(&self) -> f64 {
        self.t_left
    }

    pub fn t_right(&self) -> f64 {
        self.t_right
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Previous node for node index `m` (the left interval end for `m = 0`).
    pub fn node_left_of(&self, m: usize) -> f64 {
        if m == 0 {
            self.t_left
        } else {
            self.nodes[m - 1]
        }
    }

    pub fn q(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn s(&self) -> &[Vec<f64>] {
        &self.s
    }

    pub fn dtau(&self) -> &[f64] {
        &self.dtau
    }
}

/// Standard plus embedded nodes and all four weight families needed by the
/// multi-rate sweep.
#[derive(Debug, Clone)]
pub struct MultiRateTableau {
    base: CollocationTableau,
    p: usize,
    /// `embedded[m][p] = tau_{m,p}`, with `tau_{m,P-1} == tau_m`
    embedded: Vec<Vec<f64>>,
    /// `s_hat[m][p] = ∫_{tau_{m-1}}^{tau_m} l_{m,p}`
    s_hat: Vec<Vec<f64>>,
    /// `s_tilde[m][p][j] = ∫_{tau_{m,p-1}}^{tau_{m,p}} l_j`
    s_tilde: Vec<Vec<Vec<f64>>>,
    /// `s_emb[m][p][q] = ∫_{tau_{m,p-1}}^{tau_{m,p}} l_{m,q}`
    s_emb: Vec<Vec<Vec<f64>>>,
    /// embedded node spacings
    dtau_emb: Vec<Vec<f64>>,
}

impl MultiRateTableau {
    pub fn equidistant_no_left(
        m: usize,
        p: usize,
        t_left: f64,
        t_right: f64,
    ) -> Result<Self, TableauError> {
        if p == 0 {
            return Err(TableauError::InvalidCount);
        }
        let base = CollocationTableau::equidistant_no_left(m, t_left, t_right)?;

        // everything below works in unit-interval coordinates of the step
        let h = t_right - t_left;
        let unit = |t: f64| (t - t_left) / h;
        let std_unit: Vec<f64> = base.nodes.iter().map(|&t| unit(t)).collect();
        let std_coeffs = lagrange_monomial_coeffs(&std_unit);

        let mut embedded = Vec::with_capacity(m);
        let mut s_hat = Vec::with_capacity(m);
        let mut s_tilde = Vec::with_capacity(m);
        let mut s_emb = Vec::with_capacity(m);
        let mut dtau_emb = Vec::with_capacity(m);

        for mi in 0..m {
            let left = base.node_left_of(mi);
            let right = base.nodes[mi];
            let emb = equidistant_no_left(p, left, right)?;
            let emb_unit: Vec<f64> = emb.iter().map(|&t| unit(t)).collect();
            let emb_coeffs = lagrange_monomial_coeffs(&emb_unit);
            let bounds: Vec<f64> = std::iter::once(unit(left))
                .chain(emb_unit.iter().copied())
                .collect();

            s_hat.push(
                emb_coeffs
                    .iter()
                    .map(|c| h * integrate_poly(c, unit(left), unit(right)))
                    .collect::<Vec<f64>>(),
            );
            s_tilde.push(
                (0..p)
                    .map(|pi| {
                        std_coeffs
                            .iter()
                            .map(|c| h * integrate_poly(c, bounds[pi], bounds[pi + 1]))
                            .collect::<Vec<f64>>()
                    })
                    .collect::<Vec<_>>(),
            );
            s_emb.push(
                (0..p)
                    .map(|pi| {
                        emb_coeffs
                            .iter()
                            .map(|c| h * integrate_poly(c, bounds[pi], bounds[pi + 1]))
                            .collect::<Vec<f64>>()
                    })
                    .collect::<Vec<_>>(),
            );
            dtau_emb.push(
                (0..p)
                    .map(|pi| {
                        let lo = if pi == 0 { left } else { emb[pi - 1] };
                        emb[pi] - lo
                    })
                    .collect::<Vec<f64>>(),
            );
            embedded.push(emb);
        }

        Ok(MultiRateTableau {
            base,
            p,
            embedded,
            s_hat,
            s_tilde,
            s_emb,
            dtau_emb,
        })
    }

    pub fn base(&self) -> &CollocationTableau {
        &self.base
    }

    pub fn num_nodes(&self) -> usize {
        self.base.num_nodes()
    }

    pub fn num_embedded(&self) -> usize {
        self.p
    }

    pub fn embedded(&self) -> &[Vec<f64>] {
        &self.embedded
    }

    /// Embedded node to the left of `(m, p)`; for `p = 0` that is the
    /// standard node `tau_{m-1}` (or the interval start).
    pub fn embedded_left_of(&self, m: usize, p: usize) -> f64 {
        if p == 0 {
            self.base.node_left_of(m)
        } else {
            self.embedded[m][p - 1]
        }
    }

    pub fn s_hat(&self) -> &[Vec<f64>] {
        &self.s_hat
    }

    pub fn s_tilde(&self) -> &[Vec<Vec<f64>>] {
        &self.s_tilde
    }

    pub fn s_emb(&self) -> &[Vec<Vec<f64>>] {
        &self.s_emb
    }

    pub fn dtau_emb(&self) -> &[Vec<f64>] {
        &self.dtau_emb
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Composite Simpson rule; independent cross-check for the exact
    /// polynomial integrals.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = f(a) + f(b);
        for i in 1..panels {
            let x = a + i as f64 * h;
            acc += if i % 2 == 0 { 2.0 } else { 4.0 } * f(x);
        }
        acc * h / 3.0
    }

    fn lagrange_eval(nodes: &[f64], j: usize, x: f64) -> f64 {
        let mut v = 1.0;
        for (i, &ti) in nodes.iter().enumerate() {
            if i != j {
                v *= (x - ti) / (nodes[j] - ti);
            }
        }
        v
    }

    #[test]
    fn equidistant_no_left_examples() {
        assert_eq!(equidistant_no_left(1, 0.0, 1.0).unwrap(), vec![1.0]);
        assert_eq!(equidistant_no_left(2, 0.0, 1.0).unwrap(), vec![0.5, 1.0]);
        assert_eq!(
            equidistant_no_left(4, 0.0, 2.0).unwrap(),
            vec![0.5, 1.0, 1.5, 2.0]
        );
    }

    #[test]
    fn equidistant_no_left_rejects_bad_input() {
        assert_eq!(
            equidistant_no_left(0, 0.0, 1.0),
            Err(TableauError::InvalidCount)
        );
        assert_eq!(
            equidistant_no_left(3, 1.0, 1.0),
            Err(TableauError::DegenerateInterval)
        );
        assert_eq!(
            equidistant_no_left(3, 2.0, 1.0),
            Err(TableauError::DegenerateInterval)
        );
    }

    #[test]
    fn collocation_weights_single_node() {
        let q = collocation_weights(&[1.0], 0.0).unwrap();
        assert_eq!(q, vec![vec![1.0]]);
    }

    #[test]
    fn collocation_weights_two_nodes() {
        // analytic integration of the two linear Lagrange polynomials,
        // cross-checked below by the Simpson oracle
        let nodes = [0.5, 1.0];
        let q = collocation_weights(&nodes, 0.0).unwrap();
        let expected = [[0.75, -0.25], [1.0, 0.0]];
        for m in 0..2 {
            for j in 0..2 {
                assert!((q[m][j] - expected[m][j]).abs() < 1e-14, "q[{m}][{j}]");
                let oracle = simpson(|x| lagrange_eval(&nodes, j, x), 0.0, nodes[m], 2000);
                assert!((q[m][j] - oracle).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn collocation_weights_reject_unsorted() {
        assert!(collocation_weights(&[1.0, 0.5], 0.0).is_err());
        assert!(collocation_weights(&[0.5, 0.5], 0.0).is_err());
    }

    #[test]
    fn node_to_node_weights_examples() {
        let q = vec![vec![0.75, -0.25], vec![1.0, 0.0]];
        let s = node_to_node_weights(&q);
        assert_eq!(s[0], vec![0.75, -0.25]);
        assert!((s[1][0] - 0.25).abs() < 1e-15);
        assert!((s[1][1] - 0.25).abs() < 1e-15);
        assert_eq!(node_to_node_weights(&[vec![1.0]]), vec![vec![1.0]]);
    }

    #[test]
    fn last_q_row_integrates_constants() {
        for m in 1..=8 {
            let tab = CollocationTableau::equidistant_no_left(m, 0.3, 2.7).unwrap();
            let total: f64 = tab.q()[m - 1].iter().sum();
            assert!((total - 2.4).abs() < 1e-12, "M={m}: {total}");
        }
    }

    #[test]
    fn quadrature_exactness_on_polynomials() {
        // degree < M exactness for the collocation rows
        for m in 1..=8usize {
            let tab = CollocationTableau::equidistant_no_left(m, 0.0, 1.3).unwrap();
            for deg in 0..m {
                let poly = |x: f64| x.powi(deg as i32);
                let exact = |a: f64, b: f64| {
                    (b.powi(deg as i32 + 1) - a.powi(deg as i32 + 1)) / (deg as f64 + 1.0)
                };
                for (mi, &tm) in tab.nodes().iter().enumerate() {
                    let approx: f64 = tab.q()[mi]
                        .iter()
                        .zip(tab.nodes())
                        .map(|(w, &tj)| w * poly(tj))
                        .sum();
                    assert!(
                        (approx - exact(0.0, tm)).abs() < 1e-12,
                        "M={m} deg={deg} m={mi}"
                    );
                }
            }
        }
    }

    #[test]
    fn multirate_single_embedded_node_degenerates() {
        let tab = MultiRateTableau::equidistant_no_left(2, 1, 0.0, 1.0).unwrap();
        for m in 0..2 {
            assert!((tab.embedded()[m][0] - tab.base().nodes()[m]).abs() < 1e-15);
            assert!((tab.s_hat()[m][0] - 0.5).abs() < 1e-15);
            assert!((tab.s_emb()[m][0][0] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn multirate_consistency_identities() {
        // s[m][j] = Σ_p s_tilde[m][p][j] and s_hat[m][p] = Σ_q s_emb[m][p][q]
        for (m, p) in [(5, 8), (3, 2), (1, 1), (8, 3)] {
            let tab = MultiRateTableau::equidistant_no_left(m, p, 0.0, 0.37).unwrap();
            let scale = 0.37 / m as f64;
            for mi in 0..m {
                for j in 0..m {
                    let sum: f64 = (0..p).map(|pi| tab.s_tilde()[mi][pi][j]).sum();
                    let s = tab.base().s()[mi][j];
                    assert!((s - sum).abs() <= 1e-12 * scale.max(s.abs()), "({m},{p})");
                }
                for pi in 0..p {
                    let sum: f64 = (0..p).map(|qi| tab.s_emb()[mi][pi][qi]).sum();
                    let sh = tab.s_hat()[mi][pi];
                    assert!((sh - sum).abs() <= 1e-12 * scale.max(sh.abs()));
                }
            }
        }
    }

    #[test]
    fn multirate_embedded_rows_integrate_constants() {
        let tab = MultiRateTableau::equidistant_no_left(3, 2, 0.0, 1.0).unwrap();
        for mi in 0..3 {
            for pi in 0..2 {
                let dt = tab.dtau_emb()[mi][pi];
                let sum_emb: f64 = tab.s_emb()[mi][pi].iter().sum();
                let sum_tilde: f64 = tab.s_tilde()[mi][pi].iter().sum();
                assert!((sum_emb - dt).abs() < 1e-14);
                assert!((sum_tilde - dt).abs() < 1e-14);
                assert!(tab.s_hat()[mi][pi].is_finite());
            }
        }
    }

    #[test]
    fn multirate_weights_match_simpson_oracle() {
        let (m, p) = (4, 3);
        let tab = MultiRateTableau::equidistant_no_left(m, p, 0.0, 2.0).unwrap();
        let std: Vec<f64> = tab.base().nodes().to_vec();
        for mi in 0..m {
            let left = tab.base().node_left_of(mi);
            let emb = &tab.embedded()[mi];
            for pi in 0..p {
                let oracle = simpson(
                    |x| lagrange_eval(emb, pi, x),
                    left,
                    tab.base().nodes()[mi],
                    4000,
                );
                assert!((tab.s_hat()[mi][pi] - oracle).abs() < 1e-10);
                let lo = tab.embedded_left_of(mi, pi);
                let hi = emb[pi];
                for j in 0..m {
                    let oracle = simpson(|x| lagrange_eval(&std, j, x), lo, hi, 4000);
                    assert!((tab.s_tilde()[mi][pi][j] - oracle).abs() < 1e-10);
                }
                for qi in 0..p {
                    let oracle = simpson(|x| lagrange_eval(emb, qi, x), lo, hi, 4000);
                    assert!((tab.s_emb()[mi][pi][qi] - oracle).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn telescoping_s_to_q() {
        let tab = CollocationTableau::equidistant_no_left(5, 0.0, 1.0).unwrap();
        for m in 0..5 {
            for j in 0..5 {
                let acc: f64 = (0..=m).map(|mi| tab.s()[mi][j]).sum();
                assert!((acc - tab.q()[m][j]).abs() < 1e-13);
            }
        }
    }

    proptest! {
        #[test]
        fn consistency_for_all_small_tableaux(m in 1usize..=8, p in 1usize..=8) {
            let tab = MultiRateTableau::equidistant_no_left(m, p, 0.0, 1.0).unwrap();
            for mi in 0..m {
                for j in 0..m {
                    let sum: f64 = (0..p).map(|pi| tab.s_tilde()[mi][pi][j]).sum();
                    prop_assert!((tab.base().s()[mi][j] - sum).abs() < 1e-12);
                }
                for pi in 0..p {
                    let sum: f64 = (0..p).map(|qi| tab.s_emb()[mi][pi][qi]).sum();
                    prop_assert!((tab.s_hat()[mi][pi] - sum).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn embedded_nodes_nest_strictly(m in 1usize..=6, p in 1usize..=6) {
            let tab = MultiRateTableau::equidistant_no_left(m, p, 0.0, 1.0).unwrap();
            for mi in 0..m {
                let mut prev = tab.base().node_left_of(mi);
                for &t in &tab.embedded()[mi] {
                    prop_assert!(t > prev);
                    prev = t;
                }
                prop_assert!((prev - tab.base().nodes()[mi]).abs() < 1e-15);
            }
        }
    }
}
