//! Uniform time grids and the sample paths that live on them.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform partition of `[0, horizon]` into `steps` equal cells.
///
/// A grid with `steps = N` has `N + 1` nodes `t_i = i * horizon / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<F: Scalar> {
    horizon: F,
    steps: usize,
}

impl<F: Scalar> TimeGrid<F> {
    pub fn new(horizon: F, steps: usize) -> Result<Self> {
        if !(horizon > F::zero()) || !horizon.is_finite() || steps == 0 {
            return Err(Error::InvalidGrid);
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> F {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of nodes, `steps + 1`.
    pub fn node_count(&self) -> usize {
        self.steps + 1
    }

    pub fn dt(&self) -> F {
        self.horizon / F::cast_usize(self.steps)
    }

    /// Node `t_i`. Panics if `i` is out of range.
    pub fn t(&self, i: usize) -> F {
        assert!(i <= self.steps, "node index {i} out of range");
        // i * T / N rather than i * dt: the last node is then exactly the horizon.
        self.horizon * F::cast_usize(i) / F::cast_usize(self.steps)
    }

    pub fn times(&self) -> Vec<F> {
        (0..self.node_count()).map(|i| self.t(i)).collect()
    }
}

/// What a sample path represents; Fbm paths are pinned to start at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathLabel {
    Fbm,
    ExactSolution,
    MollifiedSolution,
    Generic,
}

/// Values of a scalar function sampled at every node of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath<F: Scalar> {
    grid: TimeGrid<F>,
    values: Vec<F>,
    label: PathLabel,
}

impl<F: Scalar> SamplePath<F> {
    pub fn new(grid: TimeGrid<F>, values: Vec<F>, label: PathLabel) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::PathLength {
                expected: grid.node_count(),
                got: values.len(),
            });
        }
        if label == PathLabel::Fbm && values[0] != F::zero() {
            return Err(Error::FbmNonzeroStart(values[0].as_f64()));
        }
        Ok(Self { grid, values, label })
    }

    pub fn grid(&self) -> &TimeGrid<F> {
        &self.grid
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn value(&self, i: usize) -> F {
        self.values[i]
    }

    pub fn label(&self) -> PathLabel {
        self.label
    }

    /// Restriction to every `stride`-th node.
    ///
    /// The result is the same underlying function sampled on the coarser
    /// nested grid, so refinement studies can compare resolutions of one
    /// realization instead of generating fresh paths.
    pub fn subsample(&self, stride: usize) -> Result<Self> {
        if stride == 0 || self.grid.steps() % stride != 0 {
            return Err(Error::InvalidGrid);
        }
        let coarse = TimeGrid::new(self.grid.horizon(), self.grid.steps() / stride)?;
        let values = self.values.iter().copied().step_by(stride).collect();
        Self::new(coarse, values, self.label)
    }

    /// Two-column CSV `t,value` with header, one row per node.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,value")?;
        for i in 0..self.grid.node_count() {
            writeln!(w, "{},{}", self.grid.t(i), self.values[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_nodes_hit_endpoints_exactly() {
        let g: TimeGrid<f64> = TimeGrid::new(1.0, 7).unwrap();
        assert_eq!(g.t(0), 0.0);
        assert_eq!(g.t(7), 1.0);
        assert_eq!(g.node_count(), 8);
        assert!((g.dt() - 1.0 / 7.0).abs() < 1e-16);
        let ts = g.times();
        assert_eq!(ts.len(), 8);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn grid_rejects_degenerate_input() {
        assert_eq!(TimeGrid::<f64>::new(0.0, 4).unwrap_err(), Error::InvalidGrid);
        assert_eq!(TimeGrid::<f64>::new(-1.0, 4).unwrap_err(), Error::InvalidGrid);
        assert_eq!(TimeGrid::<f64>::new(1.0, 0).unwrap_err(), Error::InvalidGrid);
        assert_eq!(
            TimeGrid::<f64>::new(f64::INFINITY, 4).unwrap_err(),
            Error::InvalidGrid
        );
    }

    #[test]
    fn path_length_must_match_grid() {
        let g: TimeGrid<f64> = TimeGrid::new(1.0, 4).unwrap();
        let err = SamplePath::new(g, vec![0.0; 4], PathLabel::Generic).unwrap_err();
        assert_eq!(err, Error::PathLength { expected: 5, got: 4 });
    }

    #[test]
    fn fbm_label_requires_zero_start() {
        let g: TimeGrid<f64> = TimeGrid::new(1.0, 2).unwrap();
        assert!(SamplePath::new(g, vec![0.1, 0.2, 0.3], PathLabel::Fbm).is_err());
        assert!(SamplePath::new(g, vec![0.0, 0.2, 0.3], PathLabel::Fbm).is_ok());
        assert!(SamplePath::new(g, vec![0.1, 0.2, 0.3], PathLabel::Generic).is_ok());
    }

    #[test]
    fn subsample_keeps_endpoints_and_label() {
        let g: TimeGrid<f64> = TimeGrid::new(2.0, 8).unwrap();
        let vals: Vec<f64> = (0..9).map(|i| i as f64).collect();
        let p = SamplePath::new(g, vals, PathLabel::Generic).unwrap();
        let c = p.subsample(4).unwrap();
        assert_eq!(c.grid().steps(), 2);
        assert_eq!(c.values(), &[0.0, 4.0, 8.0]);
        assert_eq!(c.label(), PathLabel::Generic);
        assert!(p.subsample(3).is_err());
        assert!(p.subsample(0).is_err());
    }

    #[test]
    fn csv_output_is_plain_two_column() {
        let g: TimeGrid<f64> = TimeGrid::new(1.0, 2).unwrap();
        let p = SamplePath::new(g, vec![0.0, 0.5, -1.0], PathLabel::Generic).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "t,value\n0,0\n0.5,0.5\n1,-1\n");
    }
}
