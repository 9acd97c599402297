use rand::Rng;

use crate::SimError;

/// Nodes scattered uniformly over an `a x a` field with a common radio range.
#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentGraph {
    pub positions: Vec<(f64, f64)>,
    pub side: f64,
    pub range: f64,
    pub p_loss: f64,
    adjacency: Vec<Vec<u32>>,
}

impl DeploymentGraph {
    /// Builds the graph for fixed positions.
    pub fn from_positions(positions: Vec<(f64, f64)>, side: f64, range: f64, p_loss: f64) -> Result<Self, SimError> {
        if positions.is_empty() {
            return Err(SimError::Validation("network needs at least one node".into()));
        }
        if positions.len() > u16::MAX as usize {
            return Err(SimError::Validation("node ids are 16 bits".into()));
        }
        if !(side > 0.0) || !side.is_finite() {
            return Err(SimError::Validation("field side must be positive".into()));
        }
        if !(range >= 0.0) || !range.is_finite() {
            return Err(SimError::Validation("range must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&p_loss) {
            return Err(SimError::Validation("p_loss must lie in [0, 1]".into()));
        }
        let n = positions.len();
        let mut adjacency = vec![Vec::new(); n];
        let r2 = range * range;
        for i in 0..n {
            for j in i + 1..n {
                if dist2(positions[i], positions[j]) <= r2 && range > 0.0 {
                    adjacency[i].push(j as u32);
                    adjacency[j].push(i as u32);
                }
            }
        }
        Ok(DeploymentGraph { positions, side, range, p_loss, adjacency })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn mean_degree(&self) -> f64 {
        self.adjacency.iter().map(Vec::len).sum::<usize>() as f64 / self.len() as f64
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&(j as u32)).is_ok()
    }

    /// Undirected edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, ns)| ns.iter().filter(move |&&j| j as usize > i).map(move |&j| (i, j as usize)))
    }

    /// Nodes within range of an arbitrary point.
    pub fn in_range_of(&self, p: (f64, f64)) -> Vec<u32> {
        let r2 = self.range * self.range;
        (0..self.len() as u32).filter(|&i| dist2(self.positions[i as usize], p) <= r2).collect()
    }

    pub fn center(&self) -> (f64, f64) {
        (self.side / 2.0, self.side / 2.0)
    }
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

/// Uniform random deployment.
pub fn deploy<R: Rng + ?Sized>(n: usize, side: f64, range: f64, p_loss: f64, rng: &mut R) -> Result<DeploymentGraph, SimError> {
    if !(side > 0.0) {
        return Err(SimError::Validation("field side must be positive".into()));
    }
    let positions = (0..n).map(|_| (rng.gen_range(0.0..side), rng.gen_range(0.0..side))).collect();
    DeploymentGraph::from_positions(positions, side, range, p_loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn large_range_gives_complete_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = deploy(40, 100.0, 100.0 * 2f64.sqrt(), 0.0, &mut rng).unwrap();
        assert_eq!(g.edges().count(), 40 * 39 / 2);
    }

    #[test]
    fn zero_range_gives_no_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = deploy(40, 100.0, 0.0, 0.0, &mut rng).unwrap();
        assert_eq!(g.edges().count(), 0);
    }

    #[test]
    fn adjacency_is_symmetric_and_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = deploy(200, 500.0, 60.0, 0.0, &mut rng).unwrap();
        for i in 0..g.len() {
            for j in 0..g.len() {
                let d = dist2(g.positions[i], g.positions[j]).sqrt();
                assert_eq!(g.is_adjacent(i, j), i != j && d <= 60.0);
                assert_eq!(g.is_adjacent(i, j), g.is_adjacent(j, i));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(deploy(0, 500.0, 30.0, 0.0, &mut rng).is_err());
        assert!(deploy(5, 0.0, 30.0, 0.0, &mut rng).is_err());
        assert!(deploy(5, 500.0, 30.0, 1.5, &mut rng).is_err());
    }
}
