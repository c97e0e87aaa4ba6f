//! Closed-interval boxes and regular grid scans shared by the solvers.

/// Closed interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    /// Finite, non-empty interval.
    pub fn is_valid(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite() && self.lower <= self.upper
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.lower && value <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// The `index`-th of `count` evenly spaced points. A single-point grid
    /// collapses to the lower endpoint.
    pub fn lattice_point(&self, index: usize, count: usize) -> f64 {
        if count <= 1 {
            self.lower
        } else {
            self.lower + self.width() * index as f64 / (count - 1) as f64
        }
    }
}

/// Visits every point of the `per_dim^d` regular grid over `domain` in
/// row-major order (last coordinate fastest), which is also lexicographic
/// order of the coordinate tuples.
pub fn try_scan_grid<E>(
    domain: &[Interval],
    per_dim: usize,
    mut visit: impl FnMut(&[f64]) -> Result<(), E>,
) -> Result<(), E> {
    let dims = domain.len();
    if dims == 0 || per_dim == 0 {
        return Ok(());
    }
    let mut index = vec![0usize; dims];
    let mut point: Vec<f64> = domain.iter().map(|iv| iv.lattice_point(0, per_dim)).collect();
    loop {
        visit(&point)?;
        let mut k = dims;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            index[k] += 1;
            if index[k] < per_dim {
                point[k] = domain[k].lattice_point(index[k], per_dim);
                break;
            }
            index[k] = 0;
            point[k] = domain[k].lattice_point(0, per_dim);
            if k == 0 {
                return Ok(());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_point_endpoints() {
        let iv = Interval::new(0.0, 5.0);
        assert_eq!(iv.lattice_point(0, 11), 0.0);
        assert_eq!(iv.lattice_point(10, 11), 5.0);
        assert_eq!(iv.lattice_point(4, 11), 2.0);
        assert_eq!(iv.lattice_point(0, 1), 0.0);
    }

    #[test]
    fn grid_scan_is_row_major() {
        let domain = [Interval::new(0.0, 1.0), Interval::new(0.0, 2.0)];
        let mut seen = Vec::new();
        try_scan_grid::<()>(&domain, 2, |p| {
            seen.push((p[0], p[1]));
            Ok(())
        })
        .unwrap();
        assert_eq!(
            seen,
            vec![(0.0, 0.0), (0.0, 2.0), (1.0, 0.0), (1.0, 2.0)]
        );
    }

    #[test]
    fn grid_scan_single_point() {
        let domain = [Interval::new(3.0, 4.0)];
        let mut count = 0;
        try_scan_grid::<()>(&domain, 1, |p| {
            assert_eq!(p[0], 3.0);
            count += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(count, 1);
    }
}
